#pragma once

#include <span>

#include "qsphere/problem.hpp"
#include "qsphere/report.hpp"

namespace qsphere {

struct ScfStep {
    double lambda = 0.0;
    Vector x;
};

/// Smallest eigenpair of H(x) = B + α·diag(x²), eigenvector sign-normalized
/// so its dominant entry is positive.
ScfStep scf_step(const Problem& p, std::span<const double> x, double tol = 1e-10);

/// (λ₂(B) − λ₁(B))/3, the α range below which SCF is known to converge.
/// Prints a warning and returns 0 when the two eigenvalues coincide.
double scf_alpha_bound(const SparseSymmetricMatrix& B);

struct ScfConfig {
    double tol = 1e-8;      // on ‖x^{k+1} − x^k‖∞
    int max_iter = 500;
    double theta = 1.0;     // mixing, in (0, 1]
    double eig_tol = 1e-10;

    void validate() const;
};

SolveReport solve_scf(const Problem& p, const ScfConfig& cfg, std::span<const double> init,
                      const IterationObserver& observer = {});

}  // namespace qsphere
