#pragma once

#include <map>
#include <span>
#include <string>

#include "qsphere/linalg.hpp"

namespace qsphere {

/// Outcome of the structural checks on B.
struct StructureReport {
    bool offdiag_nonpositive = false;
    bool diagonal_positive = false;
    bool psd_certified = false;
    bool irreducible = false;
    double lambda_min_estimate = 0.0;
    std::string details;

    bool m_matrix() const { return offdiag_nonpositive && diagonal_positive && psd_certified; }
    bool all() const { return m_matrix() && irreducible; }
};

/// Sign pattern scan plus a smallest-eigenvalue PSD certificate
/// (λ_min ≥ −1e-8·‖B‖∞). `irreducible` is filled in as well.
StructureReport m_matrix_check(const SparseSymmetricMatrix& B);

/// True iff the graph on the off-diagonal nonzeros is connected.
bool irreducibility_check(const SparseSymmetricMatrix& B);

/// min (α/2)·Σxᵢ⁴ + xᵀBx  subject to  ‖x‖ = 1, with B a symmetric irreducible
/// M-matrix.
class Problem {
public:
    /// Validates α > 0 and the structure of B; throws std::invalid_argument
    /// carrying the StructureReport details on failure.
    Problem(double alpha, SparseSymmetricMatrix B);

    /// Skips the structure checks (α > 0 is still required). For experiments
    /// with reducible or otherwise invalid B.
    static Problem unchecked(double alpha, SparseSymmetricMatrix B);

    double alpha() const noexcept { return alpha_; }
    const SparseSymmetricMatrix& B() const noexcept { return B_; }
    std::size_t n() const noexcept { return B_.n(); }
    bool validated() const noexcept { return validated_; }

    std::map<std::string, std::string>& metadata() noexcept { return metadata_; }
    const std::map<std::string, std::string>& metadata() const noexcept { return metadata_; }

private:
    struct Unchecked {};
    Problem(double alpha, SparseSymmetricMatrix B, Unchecked);

    double alpha_;
    SparseSymmetricMatrix B_;
    bool validated_ = false;
    std::map<std::string, std::string> metadata_;
};

double objective(const Problem& p, std::span<const double> x);
/// 2α·x³ + 2Bx (elementwise cube).
Vector gradient(const Problem& p, std::span<const double> x);

// The following require ‖x‖ = 1 within 1e-8.
double rayleigh_lambda(const Problem& p, std::span<const double> x);
double nepv_residual(const Problem& p, std::span<const double> x);
double riemannian_grad_norm(const Problem& p, std::span<const double> x);

/// Throws std::domain_error unless |‖x‖ − 1| ≤ tol.
void require_unit(std::span<const double> x, double tol = 1e-8);

}  // namespace qsphere
