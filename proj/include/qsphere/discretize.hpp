#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "qsphere/problem.hpp"

namespace qsphere {

/// Finite-difference setup of a non-rotating condensate in a harmonic trap on
/// a box with zero Dirichlet boundary.
struct BecSpec {
    int dim = 1;
    /// Split points per axis, both endpoints included.
    int N = 3;
    double beta = 1.0;
    std::vector<double> gammas;                     // empty → all ones
    std::vector<std::pair<double, double>> domain;  // empty → [0,1] per axis

    /// Fills defaulted fields and throws std::invalid_argument on bad input.
    BecSpec normalized() const;
    std::size_t unknowns() const;
};

/// (1/2)·Σ γᵢ²·pᵢ²
double harmonic_potential(std::span<const double> point, std::span<const double> gammas);

/// Interior node coordinates along each axis (x varies fastest in the flat
/// ordering used everywhere else).
std::vector<std::vector<double>> interior_axes(const BecSpec& spec);

/// B = Σ_axis (1/(2h²))·L_axis + diag(V), assembled as a Kronecker sum of 1D
/// second-difference matrices; α = β/∏h (β·nᵈ on the unit box). Throws
/// std::invalid_argument for β ≤ 0.
Problem build_bec_problem(const BecSpec& spec);

/// Laplacian part only, (1/(2h²)) scaling included.
SparseSymmetricMatrix bec_kinetic_matrix(const BecSpec& spec);

/// The 16×16 discretized Laplacian of the L-shaped domain
/// [0,1]² ∖ [0.5,1]² with h = 1/6, scaled by n² = 36 (no potential).
SparseSymmetricMatrix build_l_shaped_laplacian();

/// Samples f at interior nodes, flat x-fastest ordering.
template <typename F>
Vector sample_on_grid(const BecSpec& spec, F&& f)
{
    const auto axes = interior_axes(spec);
    const std::size_t per_axis = axes.front().size();
    const std::size_t total = spec.normalized().unknowns();
    Vector out(total);
    std::vector<double> point(axes.size());
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            point[a] = axes[a][rem % per_axis];
            rem /= per_axis;
        }
        out[flat] = f(std::span<const double>(point));
    }
    return out;
}

/// Multilinear interpolation of a coarse-grid vector (N_coarse split points)
/// onto the grid with 2·N_coarse − 1 split points, then normalized. Used for
/// mesh-refinement warm starts.
Vector prolongate(std::span<const double> coarse, int dim, int N_coarse);

}  // namespace qsphere
