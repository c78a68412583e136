#pragma once

#include <span>

#include "qsphere/problem.hpp"
#include "qsphere/report.hpp"

namespace qsphere {

struct RnConfig {
    double sigma0 = 1.0;
    double eta1 = 0.1;
    double sigma_up = 4.0;
    double sigma_down = 0.25;
    double tol_nrmG = 1e-8;
    /// Stop once an accepted step moves x by at most this in the ∞-norm.
    double xtol = 1e-6;
    int max_iter = 1000;
    /// Replace the trial point by its entrywise absolute value.
    bool take_abs = true;
    int max_cg = 100;

    void validate() const;
};

/// gᵀd + ½dᵀ(Hess + σI)d for a tangent direction d at x, where g is the
/// Riemannian gradient and Hess = P(6α·diag(x²) + 2B)P − (xᵀ∇f)P with
/// P = I − xxᵀ. Throws std::invalid_argument when |xᵀd| exceeds
/// 1e-8·max(1, ‖d‖).
double rn_model_value(const Problem& p, std::span<const double> x, std::span<const double> d, double sigma);

struct RnStep {
    Vector x;
    double sigma = 0.0;
    bool accepted = false;
    double model_decrease = 0.0;   // −m(d)
    double actual_decrease = 0.0;  // E(x) − E(z)
    int cg_iterations = 0;
};

/// One regularized Newton trial: truncated CG on the tangent-space system,
/// normalization retraction, optional absolute value, ratio test.
RnStep rn_step(const Problem& p, std::span<const double> x, double sigma, const RnConfig& cfg);

/// Iterates rn_step from `init` (unit norm) until nrmG ≤ tol_nrmG or an
/// accepted step is shorter than xtol.
SolveReport solve_rn(const Problem& p, const RnConfig& cfg, std::span<const double> init,
                     const IterationObserver& observer = {});

}  // namespace qsphere
