#include "qsphere/rnewton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qsphere {

void RnConfig::validate() const
{
    if (!(sigma0 > 0.0)) {
        throw std::invalid_argument("RnConfig: sigma0 must be positive");
    }
    if (!(eta1 > 0.0 && eta1 < 1.0)) {
        throw std::invalid_argument("RnConfig: eta1 must lie in (0, 1)");
    }
    if (!(sigma_up > 1.0) || !(sigma_down > 0.0 && sigma_down < 1.0)) {
        throw std::invalid_argument("RnConfig: need sigma_up > 1 and 0 < sigma_down < 1");
    }
    if (max_iter < 1 || max_cg < 1) {
        throw std::invalid_argument("RnConfig: iteration caps must be positive");
    }
}

namespace {

// Everything the model needs at a fixed x.
struct LocalModel {
    const Problem& p;
    std::span<const double> x;
    Vector rgrad;
    double xg = 0.0;  // xᵀ∇f

    LocalModel(const Problem& prob, std::span<const double> at) : p(prob), x(at)
    {
        rgrad = gradient(p, x);
        xg = dot(x, rgrad);
        axpy(-xg, x, rgrad);
    }

    void project(std::span<double> v) const { axpy(-dot(x, v), x, v); }

    // (Hess + σI)d for tangent d.
    Vector apply(std::span<const double> d, double sigma) const
    {
        Vector out = matvec(p.B(), d);
        for (std::size_t i = 0; i < d.size(); ++i) {
            out[i] = 6.0 * p.alpha() * x[i] * x[i] * d[i] + 2.0 * out[i];
        }
        project(out);
        axpy(sigma - xg, d, out);
        return out;
    }

    double value(std::span<const double> d, double sigma) const
    {
        const Vector hd = apply(d, sigma);
        return dot(rgrad, d) + 0.5 * dot(d, hd);
    }
};

}  // namespace

double rn_model_value(const Problem& p, std::span<const double> x, std::span<const double> d, double sigma)
{
    if (x.size() != p.n() || d.size() != p.n()) {
        throw DimensionError("rn_model_value: vector sizes do not match the problem");
    }
    require_unit(x);
    if (std::abs(dot(x, d)) > 1e-8 * std::max(1.0, norm2(d))) {
        throw std::invalid_argument("rn_model_value: d is not tangent to the sphere at x");
    }
    return LocalModel(p, x).value(d, sigma);
}

RnStep rn_step(const Problem& p, std::span<const double> x, double sigma, const RnConfig& cfg)
{
    if (x.size() != p.n()) {
        throw DimensionError("rn_step: x does not match the problem");
    }
    require_unit(x);
    const std::size_t n = x.size();
    const LocalModel model(p, x);

    // Truncated CG on (Hess + σI)d = −g inside the tangent space.
    RnStep out;
    Vector d(n, 0.0);
    Vector r(model.rgrad);
    scale(-1.0, r);
    Vector dir(r);
    const double g_norm = norm2(model.rgrad);
    const double stop = std::min(0.5, std::sqrt(g_norm)) * g_norm;
    double rr = dot(r, r);
    bool breakdown = false;
    for (int it = 0; it < cfg.max_cg && std::sqrt(rr) > stop; ++it) {
        const Vector ad = model.apply(dir, sigma);
        const double curv = dot(dir, ad);
        ++out.cg_iterations;
        if (!(curv > 0.0) || !std::isfinite(curv)) {
            if (it == 0) {
                // Negative curvature right away: fall back to a scaled gradient step.
                d = r;
                scale(1.0 / sigma, d);
            }
            breakdown = !std::isfinite(curv);
            break;
        }
        const double a = rr / curv;
        axpy(a, dir, d);
        axpy(-a, ad, r);
        model.project(r);
        const double rr_next = dot(r, r);
        for (std::size_t i = 0; i < n; ++i) {
            dir[i] = r[i] + (rr_next / rr) * dir[i];
        }
        model.project(dir);
        rr = rr_next;
    }
    model.project(d);

    const double m = model.value(d, sigma);
    out.model_decrease = -m;
    const double e_x = objective(p, x);
    Vector z(x.begin(), x.end());
    axpy(1.0, d, z);
    const double z_norm = norm2(z);
    // A direction the model does not predict to decrease E (CG losing
    // tangency on a nearly singular system) counts as a breakdown.
    if (breakdown || !(m <= 0.0) || !(z_norm > 0.0) || !std::isfinite(z_norm)) {
        out.x.assign(x.begin(), x.end());
        out.sigma = sigma * cfg.sigma_up;
        return out;
    }
    scale(1.0 / z_norm, z);
    if (cfg.take_abs) {
        const double e_signed = objective(p, z);
        for (double& v : z) {
            v = std::abs(v);
        }
        const double e_abs = objective(p, z);
        if (p.validated() && e_abs > e_signed + 1e-12 * std::max(1.0, std::abs(e_signed))) {
            throw std::logic_error("rn_step: |z| raised the energy, B is not an M-matrix");
        }
    }
    out.actual_decrease = e_x - objective(p, z);
    // Roundoff slack so a converged iterate (d ≈ 0) is accepted.
    const double slack = 1e-14 * std::max(1.0, std::abs(e_x));
    if (out.actual_decrease + slack >= cfg.eta1 * out.model_decrease) {
        out.accepted = true;
        out.x = std::move(z);
        out.sigma = sigma * cfg.sigma_down;
    } else {
        out.x.assign(x.begin(), x.end());
        out.sigma = sigma * cfg.sigma_up;
    }
    return out;
}

SolveReport solve_rn(const Problem& p, const RnConfig& cfg, std::span<const double> init,
                     const IterationObserver& observer)
{
    cfg.validate();
    if (init.size() != p.n()) {
        throw DimensionError("solve_rn: initial point does not match the problem");
    }
    require_unit(init);
    const Stopwatch clock;
    SolveReport report;
    report.method = "rn";
    Vector x(init.begin(), init.end());
    double sigma = cfg.sigma0;
    for (int k = 0; k < cfg.max_iter; ++k) {
        if (riemannian_grad_norm(p, x) <= cfg.tol_nrmG) {
            report.converged = true;
            break;
        }
        RnStep step = rn_step(p, x, sigma, cfg);
        report.iterations = k + 1;
        report.inner_iterations += step.cg_iterations;
        const double moved = distance_inf(step.x, x);
        x = std::move(step.x);
        sigma = step.sigma;
        if (observer) {
            IterationRecord rec;
            rec.k = k + 1;
            rec.objective = objective(p, x);
            rec.nrmG = riemannian_grad_norm(p, x);
            rec.step_norm = moved;
            rec.sigma = sigma;
            rec.accepted = step.accepted;
            observer(rec);
        }
        if (step.accepted && moved <= cfg.xtol) {
            report.converged = true;
            break;
        }
        if (!(sigma < 1e30)) {
            report.message = "regularization blew up without an acceptable step";
            break;
        }
    }
    if (!report.converged && report.message.empty()) {
        report.message = "max_iter reached before the stopping rule was met";
    }
    report.x = x;
    report.objective = objective(p, x);
    report.lambda = rayleigh_lambda(p, x);
    report.nrmG = riemannian_grad_norm(p, x);
    report.wall_seconds = clock.seconds();
    return report;
}

}  // namespace qsphere
