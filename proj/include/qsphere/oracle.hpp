#pragma once

#include <span>

#include "qsphere/problem.hpp"

namespace qsphere {

// Substituting y = x² turns the sphere problem into the strictly convex
//   min (α/2)·Σyᵢ² + √yᵀB√y  over the probability simplex,
// whose minimizer maps back to the global optimum x = √y.

/// Throws std::invalid_argument unless every entry is positive and the
/// entries sum to 1 within 1e-12.
void check_simplex(std::span<const double> y);

/// Defined on the open positive orthant; throws std::domain_error on an
/// entry ≤ 0 (objective) or below 1e-300 (gradient, Hessian form).
double reform_objective(const Problem& p, std::span<const double> y);
/// αyᵢ + Σⱼ bᵢⱼ√yⱼ/√yᵢ
Vector reform_gradient(const Problem& p, std::span<const double> y);
/// zᵀ∇²f(y)z
double reform_hessian_form(const Problem& p, std::span<const double> y, std::span<const double> z);

struct ReformConfig {
    /// Stop once max ∇ᵢ − min ∇ᵢ ≤ tol.
    double tol = 1e-8;
    int max_iter = 200000;
    int max_halvings = 60;
};

struct ReformResult {
    Vector y;
    Vector x;
    double value = 0.0;
    double spread = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Entropic mirror descent from the uniform point with Armijo halving. When
/// max_iter runs out, `value` is still an upper bound on the optimum.
ReformResult solve_reform(const Problem& p, const ReformConfig& cfg = {});

}  // namespace qsphere
