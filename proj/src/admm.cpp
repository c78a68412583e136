#include "qsphere/admm.hpp"

#include <algorithm>
#include <cmath>

namespace qsphere {

void AdmmConfig::validate() const
{
    if (!(rho > 0.0)) {
        throw std::invalid_argument("AdmmConfig: rho must be positive");
    }
    if (!(eps_abs >= 0.0) || !(eps_rel >= 0.0)) {
        throw std::invalid_argument("AdmmConfig: stopping tolerances must be nonnegative");
    }
    if (max_outer < 1) {
        throw std::invalid_argument("AdmmConfig: max_outer must be at least 1");
    }
    if (eps0 && !(*eps0 >= 0.0)) {
        throw std::invalid_argument("AdmmConfig: eps0 must be nonnegative");
    }
    if (inner_schedule) {
        // Summability cannot be checked; sample the head for sign and order.
        double prev = inner_schedule(0);
        for (int k = 0; k <= 1000; ++k) {
            const double e = inner_schedule(k);
            if (!(e >= 0.0) || e > prev) {
                throw std::invalid_argument("AdmmConfig: inner_schedule must be nonnegative and non-increasing");
            }
            prev = e;
        }
    }
}

double AdmmConfig::inner_tolerance(int k) const
{
    if (inner_schedule) {
        return inner_schedule(k);
    }
    const double e0 = eps0.value_or(1e-2 * rho);
    const double kk = static_cast<double>(k) + 1.0;
    return e0 / (kk * kk);
}

Vector project_sphere_nonneg(std::span<const double> y)
{
    if (y.empty()) {
        throw std::invalid_argument("project_sphere_nonneg: empty vector");
    }
    const auto top = std::max_element(y.begin(), y.end());
    const std::size_t i_top = static_cast<std::size_t>(top - y.begin());
    Vector x(y.size(), 0.0);
    if (*top > 0.0) {
        for (std::size_t i = 0; i < y.size(); ++i) {
            x[i] = std::max(y[i], 0.0);
        }
        scale(1.0 / norm2(x), x);
    } else {
        // max yᵢ = 0 or < 0: max_element already returns the lowest index
        // attaining the maximum, which is also the lowest zero entry.
        x[i_top] = 1.0;
    }
    return x;
}

Vector project_sphere(std::span<const double> y)
{
    const double nrm = norm2(y);
    if (!(nrm > 0.0)) {
        throw std::domain_error("project_sphere: zero vector has no projection");
    }
    Vector x(y.begin(), y.end());
    scale(1.0 / nrm, x);
    return x;
}

namespace {

struct SubproblemModel {
    const Problem& p;
    std::span<const double> x;
    std::span<const double> w;
    double rho;

    double value(std::span<const double> y) const
    {
        double quartic = 0.0;
        double coupling = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            quartic += y[i] * y[i] * y[i] * y[i];
            coupling += (x[i] - y[i]) * (x[i] - y[i]);
        }
        const Vector by = matvec(p.B(), y);
        return 0.5 * p.alpha() * quartic + dot(y, by) - dot(w, y) + 0.5 * rho * coupling;
    }

    Vector grad(std::span<const double> y) const
    {
        Vector g = matvec(p.B(), y);
        for (std::size_t i = 0; i < y.size(); ++i) {
            g[i] = 2.0 * p.alpha() * y[i] * y[i] * y[i] + 2.0 * g[i] - w[i] - rho * (x[i] - y[i]);
        }
        return g;
    }
};

// Hessian 2B + ρI + 6α·diag(y²) applied without assembling it.
class NewtonSystem {
public:
    NewtonSystem(const SparseSymmetricMatrix& B, double alpha, double rho, std::span<const double> y)
        : B_(B), diag_(B.n())
    {
        const Vector bd = B.diagonal_entries();
        extra_.resize(B.n());
        for (std::size_t i = 0; i < B.n(); ++i) {
            extra_[i] = rho + 6.0 * alpha * y[i] * y[i];
            diag_[i] = 2.0 * bd[i] + extra_[i];
        }
    }

    void apply(std::span<const double> v, std::span<double> out) const
    {
        matvec(B_, v, out);
        for (std::size_t i = 0; i < v.size(); ++i) {
            out[i] = 2.0 * out[i] + extra_[i] * v[i];
        }
    }

    void gauss_seidel(std::span<const double> b, std::span<double> v) const
    {
        const auto rows = B_.row_offsets();
        const auto cols = B_.col_indices();
        const auto vals = B_.values();
        for (std::size_t i = 0; i < v.size(); ++i) {
            double sum = b[i];
            for (std::size_t q = rows[i]; q < rows[i + 1]; ++q) {
                if (cols[q] != i) {
                    sum -= 2.0 * vals[q] * v[cols[q]];
                }
            }
            v[i] = sum / diag_[i];
        }
    }

    double diagonal(std::size_t i) const { return diag_[i]; }

private:
    const SparseSymmetricMatrix& B_;
    Vector diag_;
    Vector extra_;
};

bool all_finite(std::span<const double> v)
{
    return std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
}

}  // namespace

SubproblemResult y_subproblem_solve(const Problem& p, std::span<const double> x, std::span<const double> w,
                                    double rho, double eps_k, std::optional<std::span<const double>> start,
                                    const SubproblemLimits& limits)
{
    const std::size_t n = p.n();
    if (x.size() != n || w.size() != n || (start && start->size() != n)) {
        throw DimensionError("y_subproblem_solve: vector sizes do not match the problem");
    }
    if (!(rho > 0.0)) {
        throw std::invalid_argument("y_subproblem_solve: rho must be positive");
    }
    const SubproblemModel model{p, x, w, rho};
    SubproblemResult out;
    out.y = start ? Vector(start->begin(), start->end()) : Vector(x.begin(), x.end());

    Vector g = model.grad(out.y);
    double phi = model.value(out.y);
    Vector d(n), rhs(n), hd(n), trial(n);
    for (int it = 0;; ++it) {
        out.residual = norm2(g);
        if (out.residual <= eps_k) {
            out.converged = true;
            break;
        }
        if (it >= limits.max_newton) {
            break;
        }
        const NewtonSystem hess(p.B(), p.alpha(), rho, out.y);
        for (std::size_t i = 0; i < n; ++i) {
            rhs[i] = -g[i];
            d[i] = 0.0;
        }
        const double target = limits.gs_forcing * out.residual;
        for (int s = 0; s < limits.max_gs_sweeps; ++s) {
            hess.gauss_seidel(rhs, d);
            ++out.gs_sweeps;
            hess.apply(d, hd);
            double r2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                r2 += (hd[i] - rhs[i]) * (hd[i] - rhs[i]);
            }
            if (std::sqrt(r2) <= target) {
                break;
            }
        }
        double slope = dot(g, d);
        if (!(slope < 0.0) || !all_finite(d)) {
            for (std::size_t i = 0; i < n; ++i) {
                d[i] = -g[i] / hess.diagonal(i);
            }
            slope = dot(g, d);
        }
        ++out.newton_iterations;

        const double slack = 1e-13 * std::max(1.0, std::abs(phi));
        double t = 1.0;
        bool moved = false;
        for (int h = 0; h <= limits.max_halvings; ++h) {
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] = out.y[i] + t * d[i];
            }
            const double phi_trial = model.value(trial);
            if (phi_trial <= phi + 1e-4 * t * slope + slack) {
                out.y.swap(trial);
                phi = phi_trial;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) {
            break;
        }
        g = model.grad(out.y);
    }
    return out;
}

double augmented_lagrangian(const Problem& p, std::span<const double> x, std::span<const double> y,
                            std::span<const double> w, double rho, bool nonneg)
{
    if (x.size() != p.n() || y.size() != p.n() || w.size() != p.n()) {
        throw DimensionError("augmented_lagrangian: vector sizes do not match the problem");
    }
    if (std::abs(norm2(x) - 1.0) > 1e-8) {
        throw InfeasibleError("augmented_lagrangian: x is off the sphere");
    }
    if (nonneg && *std::min_element(x.begin(), x.end()) < -1e-12) {
        throw InfeasibleError("augmented_lagrangian: x has negative entries");
    }
    double coupling = 0.0;
    double multiplier = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = x[i] - y[i];
        coupling += diff * diff;
        multiplier += w[i] * diff;
    }
    return objective(p, y) + multiplier + 0.5 * rho * coupling;
}

AdmmState admm_step(const Problem& p, const AdmmState& s, const AdmmConfig& cfg, StepDiagnostics* diagnostics)
{
    const std::size_t n = p.n();
    if (s.y.size() != n || s.w.size() != n) {
        throw DimensionError("admm_step: state does not match the problem");
    }
    Vector v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = s.y[i] - s.w[i] / cfg.rho;
    }
    AdmmState next;
    if (cfg.nonneg) {
        next.x = project_sphere_nonneg(v);
    } else if (norm2(v) > 0.0) {
        next.x = project_sphere(v);
    } else {
        next.x.assign(n, 0.0);
        next.x[0] = 1.0;
    }
    const double eps_k = cfg.inner_tolerance(s.k);
    SubproblemLimits limits{cfg.max_newton, cfg.max_halvings, cfg.max_gs_sweeps, cfg.gs_forcing};
    auto inner = y_subproblem_solve(p, next.x, s.w, cfg.rho, eps_k, std::span<const double>(s.y), limits);
    next.y = inner.y;
    next.w = s.w;
    for (std::size_t i = 0; i < n; ++i) {
        next.w[i] += cfg.rho * (next.x[i] - next.y[i]);
    }
    next.k = s.k + 1;
    if (diagnostics) {
        diagnostics->inner = std::move(inner);
        diagnostics->inner_tolerance = eps_k;
    }
    return next;
}

SolveReport solve_admm(const Problem& p, const AdmmConfig& cfg, const std::optional<AdmmInit>& init,
                       const IterationObserver& observer)
{
    cfg.validate();
    const Stopwatch clock;
    const std::size_t n = p.n();
    AdmmState state;
    if (init) {
        if (init->y0.size() != n || init->w0.size() != n) {
            throw DimensionError("solve_admm: initial point does not match the problem");
        }
        state.y = init->y0;
        state.w = init->w0;
    } else {
        state.y.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));
        state.w.assign(n, 0.0);
    }
    Vector v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = state.y[i] - state.w[i] / cfg.rho;
    }
    state.x = cfg.nonneg ? project_sphere_nonneg(v) : normalized(v);

    SolveReport report;
    report.method = "admm";
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    for (int outer = 0; outer < cfg.max_outer; ++outer) {
        StepDiagnostics diag;
        AdmmState next = admm_step(p, state, cfg, &diag);
        report.iterations = next.k;
        report.inner_iterations += diag.inner.newton_iterations;
        if (!all_finite(next.y) || !all_finite(next.w)) {
            report.message = "iterates diverged";
            break;
        }
        const double primal = distance2(next.x, next.y);
        const double dual = cfg.rho * distance2(next.x, state.x);
        const double eps_pri = sqrt_n * cfg.eps_abs + cfg.eps_rel * std::max(norm2(next.x), norm2(next.y));
        const double eps_dual = sqrt_n * cfg.eps_abs + cfg.eps_rel * cfg.rho * norm2(next.w);
        if (observer) {
            IterationRecord rec;
            rec.k = next.k;
            rec.objective = objective(p, next.x);
            rec.primal_residual = primal;
            rec.nrmG = riemannian_grad_norm(p, next.x);
            rec.lagrangian = augmented_lagrangian(p, next.x, next.y, next.w, cfg.rho, cfg.nonneg);
            rec.step_norm = distance2(next.y, state.y);
            rec.inner_tolerance = diag.inner_tolerance;
            rec.inner_residual = diag.inner.residual;
            rec.y_norm = norm2(next.y);
            observer(rec);
        }
        state = std::move(next);
        // The residuals alone vanish when a loose inner tolerance lets the
        // y-update return its starting point, so the subproblem gradient has
        // to be small as well.
        if (primal <= eps_pri && dual <= eps_dual && diag.inner.residual <= eps_dual) {
            report.converged = true;
            break;
        }
    }
    if (!report.converged && report.message.empty()) {
        report.message = "max_outer reached before the stopping rule was met";
    }
    report.x = state.x;
    report.objective = objective(p, state.x);
    report.lambda = rayleigh_lambda(p, state.x);
    report.nrmG = riemannian_grad_norm(p, state.x);
    report.wall_seconds = clock.seconds();
    return report;
}

double lipschitz_estimate(const Problem& p, double D)
{
    if (!(D > 0.0)) {
        throw std::invalid_argument("lipschitz_estimate: D must be positive");
    }
    return 6.0 * p.alpha() * D * D + 2.0 * largest_eigval_estimate(p.B());
}

double rho_lower_bound(const Problem& p, double D, double w0_norm, double Lf)
{
    if (!(D > 1.0)) {
        throw std::invalid_argument("rho_lower_bound: D must exceed 1");
    }
    const double lmin = smallest_eigpair(p.B()).value;
    const double lmax = largest_eigval_estimate(p.B());
    const double alpha = p.alpha();
    const double t1 = (w0_norm - 2.0 * D * lmin) / (D - 1.0);
    const double t2 = (2.0 * D * D * D * alpha + 2.0 * D * (lmax - lmin)) / (D - 1.0);
    const double t3 = 2.0 * (Lf + 1.0);
    const double t4 = 2.0 * alpha + 2.0 * lmax;
    return std::max({t1, t2, t3, t4});
}

}  // namespace qsphere
