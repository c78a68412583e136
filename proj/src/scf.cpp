#include "qsphere/scf.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace qsphere {

ScfStep scf_step(const Problem& p, std::span<const double> x, double tol)
{
    if (x.size() != p.n()) {
        throw DimensionError("scf_step: x does not match the problem");
    }
    require_unit(x);
    Vector d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        d[i] = p.alpha() * x[i] * x[i];
    }
    EigenPair e = smallest_eigpair(add_diagonal(p.B(), d), tol, x);
    sign_normalize(e.vector);
    return {e.value, std::move(e.vector)};
}

double scf_alpha_bound(const SparseSymmetricMatrix& B)
{
    if (B.n() < 2) {
        throw std::invalid_argument("scf_alpha_bound: need n >= 2");
    }
    const auto pairs = smallest_eigpairs(B, 2);
    const double gap = pairs[1].value - pairs[0].value;
    if (gap <= 1e-9 * std::max(1.0, B.norm_inf())) {
        std::cerr << "warning: scf_alpha_bound: the two smallest eigenvalues of B coincide\n";
        return 0.0;
    }
    return gap / 3.0;
}

void ScfConfig::validate() const
{
    if (!(theta > 0.0 && theta <= 1.0)) {
        throw std::invalid_argument("ScfConfig: theta must lie in (0, 1]");
    }
    if (!(tol > 0.0) || max_iter < 1) {
        throw std::invalid_argument("ScfConfig: need tol > 0 and max_iter >= 1");
    }
}

SolveReport solve_scf(const Problem& p, const ScfConfig& cfg, std::span<const double> init,
                      const IterationObserver& observer)
{
    cfg.validate();
    if (init.size() != p.n()) {
        throw DimensionError("solve_scf: initial point does not match the problem");
    }
    require_unit(init);
    const Stopwatch clock;
    SolveReport report;
    report.method = "scf";
    Vector x(init.begin(), init.end());
    sign_normalize(x);
    for (int k = 0; k < cfg.max_iter; ++k) {
        ScfStep step = scf_step(p, x, cfg.eig_tol);
        Vector next = std::move(step.x);
        if (cfg.theta < 1.0) {
            for (std::size_t i = 0; i < next.size(); ++i) {
                next[i] = cfg.theta * next[i] + (1.0 - cfg.theta) * x[i];
            }
            next = normalized(next);
        }
        const double moved = distance_inf(next, x);
        x = std::move(next);
        report.iterations = k + 1;
        if (observer) {
            IterationRecord rec;
            rec.k = k + 1;
            rec.objective = objective(p, x);
            rec.nrmG = riemannian_grad_norm(p, x);
            rec.step_norm = moved;
            observer(rec);
        }
        if (moved <= cfg.tol) {
            report.converged = true;
            break;
        }
    }
    if (!report.converged) {
        report.message = "max_iter reached before the iteration settled";
    }
    report.x = x;
    report.objective = objective(p, x);
    report.lambda = rayleigh_lambda(p, x);
    report.nrmG = riemannian_grad_norm(p, x);
    report.wall_seconds = clock.seconds();
    return report;
}

}  // namespace qsphere
