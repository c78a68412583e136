#include "qsphere/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

namespace qsphere {

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::GLOBAL:
        return "GLOBAL";
    case Verdict::STATIONARY_ONLY:
        return "STATIONARY_ONLY";
    case Verdict::NOT_STATIONARY:
        break;
    }
    return "NOT_STATIONARY";
}

namespace {

bool same_sign(std::span<const double> x, double tol)
{
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    return *lo >= -tol || *hi <= tol;
}

}  // namespace

Certificate certify(const Problem& p, std::span<const double> x, const CertifyOptions& opts)
{
    if (x.size() != p.n()) {
        throw DimensionError("certify: x does not match the problem");
    }
    require_unit(x);
    Certificate c;
    c.sign_uniform = same_sign(x, opts.tol_sign.value_or(1e-8 * norm_inf(x)));
    c.nepv_resid = nepv_residual(p, x);
    c.lambda = rayleigh_lambda(p, x);
    if (opts.oracle_value) {
        c.oracle_gap = objective(p, x) - *opts.oracle_value;
    }
    if (opts.check_psd) {
        Vector d(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            d[i] = p.alpha() * x[i] * x[i] - c.lambda;
        }
        c.psd_min = smallest_eigpair(add_diagonal(p.B(), d), 1e-10).value;
    }
    c.resid_threshold = opts.tol_resid * std::max(1.0, p.B().norm_inf());
    if (c.nepv_resid > c.resid_threshold) {
        c.verdict = Verdict::NOT_STATIONARY;
    } else {
        c.verdict = c.sign_uniform ? Verdict::GLOBAL : Verdict::STATIONARY_ONLY;
    }
    return c;
}

unsigned worker_threads()
{
    unsigned count = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("QS_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) {
            count = std::min(count, static_cast<unsigned>(cap));
        }
    }
    return count;
}

namespace {

// F(x, λ) = (αx³ + Bx − λx, (1 − xᵀx)/2)
Vector kkt_residual(const Problem& p, std::span<const double> x, double lambda)
{
    const std::size_t n = x.size();
    Vector f(n + 1);
    const Vector bx = matvec(p.B(), x);
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = p.alpha() * x[i] * x[i] * x[i] + bx[i] - lambda * x[i];
    }
    f[n] = 0.5 * (1.0 - dot(x, x));
    return f;
}

std::optional<StationaryPoint> newton_from(const Problem& p, Vector x, double tol)
{
    const std::size_t n = x.size();
    const std::size_t m = n + 1;
    const double scale_b = std::max(1.0, p.B().norm_inf());
    double lambda = rayleigh_lambda(p, x);
    Vector f = kkt_residual(p, x, lambda);
    double fn = norm2(f);
    for (int it = 0; it < 100 && fn > tol * scale_b; ++it) {
        std::vector<double> jac(m * m, 0.0);
        for (const auto& t : p.B().triplets()) {
            jac[t.row * m + t.col] += t.value;
        }
        for (std::size_t i = 0; i < n; ++i) {
            jac[i * m + i] += 3.0 * p.alpha() * x[i] * x[i] - lambda;
            jac[i * m + n] = -x[i];
            jac[n * m + i] = -x[i];
        }
        Vector rhs(f);
        scale(-1.0, rhs);
        Vector delta;
        try {
            delta = solve_dense(std::move(jac), std::move(rhs));
        } catch (const std::runtime_error&) {
            return std::nullopt;
        }
        double t = 1.0;
        bool moved = false;
        for (int h = 0; h < 30; ++h, t *= 0.5) {
            Vector xt(x);
            for (std::size_t i = 0; i < n; ++i) {
                xt[i] += t * delta[i];
            }
            const double lt = lambda + t * delta[n];
            Vector ft = kkt_residual(p, xt, lt);
            const double ftn = norm2(ft);
            if (ftn <= (1.0 - 1e-4 * t) * fn) {
                x = std::move(xt);
                lambda = lt;
                f = std::move(ft);
                fn = ftn;
                moved = true;
                break;
            }
        }
        if (!moved) {
            return std::nullopt;
        }
    }
    if (!(fn <= tol * scale_b)) {
        return std::nullopt;
    }
    x = normalized(x);
    if (!(nepv_residual(p, x) <= 1e-8 * scale_b)) {
        return std::nullopt;
    }
    sign_normalize(x);
    StationaryPoint sp;
    sp.lambda = rayleigh_lambda(p, x);
    sp.sign_uniform = same_sign(x, 1e-8 * norm_inf(x));
    sp.x = std::move(x);
    return sp;
}

double distance_up_to_sign(std::span<const double> a, std::span<const double> b)
{
    double plus = 0.0;
    double minus = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        plus += (a[i] - b[i]) * (a[i] - b[i]);
        minus += (a[i] + b[i]) * (a[i] + b[i]);
    }
    return std::sqrt(std::min(plus, minus));
}

}  // namespace

std::vector<StationaryPoint> enumerate_stationary(const Problem& p, int starts, double tol, std::uint64_t seed)
{
    if (starts < 1) {
        throw std::invalid_argument("enumerate_stationary: need at least one start");
    }
    const std::size_t n = p.n();
    std::vector<std::optional<StationaryPoint>> found(static_cast<std::size_t>(starts));
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int i = next++; i < starts; i = next++) {
            std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(i + 1));
            std::normal_distribution<double> normal;
            Vector x(n);
            for (double& v : x) {
                v = normal(rng);
                if (i % 2 == 0) {
                    v = std::abs(v);
                }
            }
            found[static_cast<std::size_t>(i)] = newton_from(p, normalized(x), tol);
        }
    };
    const unsigned threads = std::min<unsigned>(worker_threads(), static_cast<unsigned>(starts));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& th : pool) {
        th.join();
    }

    std::vector<StationaryPoint> unique;
    for (auto& candidate : found) {
        if (!candidate) {
            continue;
        }
        const bool seen = std::any_of(unique.begin(), unique.end(), [&](const StationaryPoint& u) {
            return distance_up_to_sign(u.x, candidate->x) <= 1e-6;
        });
        if (!seen) {
            unique.push_back(std::move(*candidate));
        }
    }
    std::sort(unique.begin(), unique.end(), [](const StationaryPoint& a, const StationaryPoint& b) {
        if (a.lambda != b.lambda) {
            return a.lambda < b.lambda;
        }
        return std::lexicographical_compare(a.x.begin(), a.x.end(), b.x.begin(), b.x.end());
    });
    return unique;
}

}  // namespace qsphere
