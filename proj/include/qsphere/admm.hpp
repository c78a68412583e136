#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>

#include "qsphere/problem.hpp"
#include "qsphere/report.hpp"

namespace qsphere {

/// The indicator term of L_ρ is +∞ at an infeasible x.
class InfeasibleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct AdmmConfig {
    double rho = 100.0;
    double eps_abs = 1e-6;
    double eps_rel = 1e-6;
    int max_outer = 1000;
    /// Initial inner tolerance; unset means 1e-2·ρ.
    std::optional<double> eps0;
    /// Overrides the default ε_k = eps0/(k+1)². Must be nonnegative,
    /// non-increasing and summable.
    std::function<double(int)> inner_schedule;
    /// Project onto sphere ∩ nonnegative orthant; false projects onto the sphere.
    bool nonneg = true;

    // Inner Newton / Gauss-Seidel limits.
    int max_newton = 50;
    int max_halvings = 30;
    int max_gs_sweeps = 200;
    double gs_forcing = 0.1;

    void validate() const;
    double inner_tolerance(int k) const;
};

struct AdmmState {
    Vector x;  // sphere iterate
    Vector y;  // unconstrained copy
    Vector w;  // multiplier
    int k = 0;
};

struct AdmmInit {
    Vector y0;
    Vector w0;
};

/// Closed-form projection onto {‖x‖ = 1, x ≥ 0}. Ties in the degenerate
/// cases go to the lowest index.
Vector project_sphere_nonneg(std::span<const double> y);

/// y/‖y‖; throws std::domain_error on the zero vector.
Vector project_sphere(std::span<const double> y);

struct SubproblemResult {
    Vector y;
    double residual = 0.0;  // ‖2αy³ + 2By − w − ρ(x − y)‖
    int newton_iterations = 0;
    int gs_sweeps = 0;
    bool converged = false;
};

struct SubproblemLimits {
    int max_newton = 50;
    int max_halvings = 30;
    int max_gs_sweeps = 200;
    double gs_forcing = 0.1;
};

/// Inexact Newton on the strongly convex y-subproblem
///   min f(y) + wᵀ(x − y) + (ρ/2)‖x − y‖²
/// with Gauss-Seidel directions and halving backtracking. Stops once the
/// gradient norm is ≤ eps_k; otherwise returns the best iterate with
/// converged = false.
SubproblemResult y_subproblem_solve(const Problem& p, std::span<const double> x, std::span<const double> w,
                                    double rho, double eps_k, std::optional<std::span<const double>> start = {},
                                    const SubproblemLimits& limits = {});

/// f(y) + wᵀ(x − y) + (ρ/2)‖x − y‖². Throws InfeasibleError when x is not on
/// the feasible set (unit norm, and x ≥ 0 when `nonneg`).
double augmented_lagrangian(const Problem& p, std::span<const double> x, std::span<const double> y,
                            std::span<const double> w, double rho, bool nonneg = true);

struct StepDiagnostics {
    SubproblemResult inner;
    double inner_tolerance = 0.0;
};

/// x ← Proj(y − w/ρ); y ← subproblem(x, w); w ← w + ρ(x − y).
AdmmState admm_step(const Problem& p, const AdmmState& s, const AdmmConfig& cfg,
                    StepDiagnostics* diagnostics = nullptr);

/// Iterates admm_step until ‖x − y‖ ≤ ε_pri and ‖ρ(xᵏ⁺¹ − xᵏ)‖ ≤ ε_dual, or
/// until max_outer. Default start: y⁰ = normalized ones, w⁰ = 0.
SolveReport solve_admm(const Problem& p, const AdmmConfig& cfg, const std::optional<AdmmInit>& init = {},
                       const IterationObserver& observer = {});

/// 6αD² + 2·λ_max(B): bounds ‖∇²f(y)‖ on the ball ‖y‖ ≤ D.
double lipschitz_estimate(const Problem& p, double D);

/// The four-term penalty lower bound that guarantees bounded iterates and
/// sufficient descent for the ADMM iteration. Throws for D ≤ 1.
double rho_lower_bound(const Problem& p, double D, double w0_norm, double Lf);

}  // namespace qsphere
