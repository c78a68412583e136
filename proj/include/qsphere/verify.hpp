#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsphere/problem.hpp"

namespace qsphere {

enum class Verdict { NOT_STATIONARY, STATIONARY_ONLY, GLOBAL };

std::string to_string(Verdict v);

struct Certificate {
    bool sign_uniform = false;
    double nepv_resid = 0.0;
    /// tol_resid·max(1, ‖B‖∞), the level nepv_resid was compared against.
    double resid_threshold = 0.0;
    double lambda = 0.0;
    std::optional<double> oracle_gap;  // objective(x) − oracle value
    /// λ_min(α·diag(x²) + B − λI), when requested.
    std::optional<double> psd_min;
    Verdict verdict = Verdict::NOT_STATIONARY;
};

struct CertifyOptions {
    /// Relative to max(1, ‖B‖∞), the scale of the residual's terms.
    double tol_resid = 1e-6;
    /// Unset means 1e-8·‖x‖∞.
    std::optional<double> tol_sign;
    std::optional<double> oracle_value;
    bool check_psd = false;
};

/// Sign uniformity plus stationarity: a sign-uniform stationary point is the
/// global minimizer, a mixed-sign one is not.
Certificate certify(const Problem& p, std::span<const double> x, const CertifyOptions& opts = {});

struct StationaryPoint {
    double lambda = 0.0;
    Vector x;
    bool sign_uniform = false;
};

/// Brute-force search for NEPv solutions on small instances: damped Newton on
/// the KKT system from `starts` seeded random unit vectors (alternately
/// nonnegative and signed). Solutions equal up to a global sign are merged;
/// the result is sorted by λ, then lexicographically by x. Runs starts in
/// parallel, capped by QS_THREADS.
std::vector<StationaryPoint> enumerate_stationary(const Problem& p, int starts, double tol = 1e-10,
                                                  std::uint64_t seed = 42);

/// Worker count: hardware concurrency, capped by QS_THREADS when set.
unsigned worker_threads();

}  // namespace qsphere
