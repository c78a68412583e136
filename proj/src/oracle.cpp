#include "qsphere/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qsphere {

namespace {

constexpr double kTiny = 1e-300;

Vector root(std::span<const double> y, double floor, const char* who)
{
    Vector s(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(y[i] > floor)) {
            throw std::domain_error(std::string(who) + ": entries must be positive");
        }
        s[i] = std::sqrt(y[i]);
    }
    return s;
}

void check_size(const Problem& p, std::span<const double> y, const char* who)
{
    if (y.size() != p.n()) {
        throw DimensionError(std::string(who) + ": vector does not match the problem");
    }
}

// f(y + δ) − f(y) evaluated through d = √(y + δ) − √y, which avoids
// cancelling the large diagonal and off-diagonal contributions of B.
double objective_change(const Problem& p, std::span<const double> y, std::span<const double> delta)
{
    Vector s(y.size());
    Vector d(y.size());
    double quad = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        s[i] = std::sqrt(y[i]);
        d[i] = delta[i] / (std::sqrt(y[i] + delta[i]) + s[i]);
        quad += delta[i] * (2.0 * y[i] + delta[i]);
    }
    const Vector bd = matvec(p.B(), d);
    return 0.5 * p.alpha() * quad + 2.0 * dot(s, bd) + dot(d, bd);
}

}  // namespace

void check_simplex(std::span<const double> y)
{
    if (y.empty()) {
        throw std::invalid_argument("check_simplex: empty vector");
    }
    double sum = 0.0;
    for (double v : y) {
        if (!(v > 0.0)) {
            throw std::invalid_argument("check_simplex: entries must be positive");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("check_simplex: entries must sum to 1");
    }
}

double reform_objective(const Problem& p, std::span<const double> y)
{
    check_size(p, y, "reform_objective");
    const Vector s = root(y, 0.0, "reform_objective");
    return 0.5 * p.alpha() * dot(y, y) + dot(s, matvec(p.B(), s));
}

Vector reform_gradient(const Problem& p, std::span<const double> y)
{
    check_size(p, y, "reform_gradient");
    const Vector s = root(y, kTiny, "reform_gradient");
    Vector g = matvec(p.B(), s);
    for (std::size_t i = 0; i < y.size(); ++i) {
        g[i] = p.alpha() * y[i] + g[i] / s[i];
    }
    return g;
}

double reform_hessian_form(const Problem& p, std::span<const double> y, std::span<const double> z)
{
    check_size(p, y, "reform_hessian_form");
    check_size(p, z, "reform_hessian_form");
    const Vector s = root(y, kTiny, "reform_hessian_form");
    const auto rows = p.B().row_offsets();
    const auto cols = p.B().col_indices();
    const auto vals = p.B().values();
    // ∂²/∂yᵢ∂yⱼ = bᵢⱼ/(2sᵢsⱼ) off the diagonal, α − Σ_{j≠i} bᵢⱼsⱼ/(2sᵢ³) on it.
    double q = p.alpha() * dot(z, z);
    for (std::size_t i = 0; i < y.size(); ++i) {
        double diag = 0.0;
        for (std::size_t k = rows[i]; k < rows[i + 1]; ++k) {
            const std::size_t j = cols[k];
            if (j == i) {
                continue;
            }
            q += vals[k] * z[i] * z[j] / (2.0 * s[i] * s[j]);
            diag += vals[k] * s[j];
        }
        q -= z[i] * z[i] * diag / (2.0 * s[i] * s[i] * s[i]);
    }
    return q;
}

ReformResult solve_reform(const Problem& p, const ReformConfig& cfg)
{
    const std::size_t n = p.n();
    ReformResult out;
    out.y.assign(n, 1.0 / static_cast<double>(n));
    Vector g = reform_gradient(p, out.y);
    double t = 1.0 / (p.alpha() + 2.0 * largest_eigval_estimate(p.B()));
    Vector delta(n);
    for (;;) {
        const auto [lo, hi] = std::minmax_element(g.begin(), g.end());
        out.spread = *hi - *lo;
        if (out.spread <= cfg.tol) {
            out.converged = true;
            break;
        }
        if (out.iterations >= cfg.max_iter) {
            break;
        }
        const double gmin = *lo;
        const double mass = std::accumulate(out.y.begin(), out.y.end(), 0.0);
        bool accepted = false;
        for (int h = 0; h <= cfg.max_halvings && !accepted; ++h, t *= 0.5) {
            // yᵢ·exp(−t(gᵢ − g_min))/Z − yᵢ, formed with expm1 so that small
            // steps are not swamped by rounding in the normalization.
            double zm1 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                delta[i] = std::expm1(-t * (g[i] - gmin));
                zm1 += out.y[i] * delta[i];
            }
            zm1 /= mass;
            double slope = 0.0;
            bool underflow = false;
            for (std::size_t i = 0; i < n; ++i) {
                delta[i] = out.y[i] * (delta[i] - zm1) / (1.0 + zm1);
                underflow = underflow || !(out.y[i] + delta[i] > kTiny);
                slope += (g[i] - gmin) * delta[i];
            }
            if (underflow) {
                continue;
            }
            if (objective_change(p, out.y, delta) <= 1e-4 * slope) {
                for (std::size_t i = 0; i < n; ++i) {
                    out.y[i] += delta[i];
                }
                accepted = true;
            }
        }
        if (!accepted) {
            break;
        }
        // The loop halved t once past the accepted step; undo that and grow.
        t *= 4.0;
        ++out.iterations;
        g = reform_gradient(p, out.y);
    }
    out.value = reform_objective(p, out.y);
    out.x = root(out.y, 0.0, "solve_reform");
    scale(1.0 / norm2(out.x), out.x);
    return out;
}

}  // namespace qsphere
