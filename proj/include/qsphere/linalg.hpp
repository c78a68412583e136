#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsphere {

using Vector = std::vector<double>;

/// Thrown when operand sizes disagree.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown by iterative kernels that hit their iteration cap.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Symmetric real matrix in CSR form. Both triangles are stored, rows are
/// sorted and duplicate-free. Immutable after construction.
class SparseSymmetricMatrix {
public:
    SparseSymmetricMatrix(std::size_t n, std::vector<std::size_t> row_offsets,
                          std::vector<std::size_t> col_indices, Vector values);

    /// Duplicate entries are summed; explicit zeros are dropped. Throws if the
    /// resulting pattern or values are not symmetric.
    static SparseSymmetricMatrix from_triplets(std::size_t n, std::vector<Triplet> entries);

    static SparseSymmetricMatrix identity(std::size_t n);
    static SparseSymmetricMatrix diagonal(std::span<const double> d);

    std::size_t n() const noexcept { return n_; }
    std::size_t nnz() const noexcept { return values_.size(); }

    std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
    std::span<const std::size_t> col_indices() const noexcept { return col_indices_; }
    std::span<const double> values() const noexcept { return values_; }

    /// Entry (i, j), zero when not stored.
    double at(std::size_t i, std::size_t j) const;
    Vector diagonal_entries() const;
    std::vector<Triplet> triplets() const;

    /// Maximum absolute row sum; bounds the spectral radius.
    double norm_inf() const;
    double gershgorin_lower() const;
    double gershgorin_upper() const;

private:
    std::size_t n_;
    std::vector<std::size_t> row_offsets_;
    std::vector<std::size_t> col_indices_;
    Vector values_;
};

/// A + diag(d); inserts diagonal entries that are not stored.
SparseSymmetricMatrix add_diagonal(const SparseSymmetricMatrix& a, std::span<const double> d);
/// a·A + b·B on the union pattern.
SparseSymmetricMatrix linear_combination(double a, const SparseSymmetricMatrix& A, double b,
                                         const SparseSymmetricMatrix& B);
/// Block-diagonal assembly, for reducible test instances.
SparseSymmetricMatrix block_diagonal(std::span<const SparseSymmetricMatrix> blocks);

// Vector helpers.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);
double distance2(std::span<const double> a, std::span<const double> b);
double distance_inf(std::span<const double> a, std::span<const double> b);
/// y += a·x
void axpy(double a, std::span<const double> x, std::span<double> y);
void scale(double a, std::span<double> x);
/// Returns x / ‖x‖; throws std::domain_error on a zero vector.
Vector normalized(std::span<const double> x);

Vector matvec(const SparseSymmetricMatrix& A, std::span<const double> x);
void matvec(const SparseSymmetricMatrix& A, std::span<const double> x, std::span<double> y);

/// Forward Gauss-Seidel sweeps toward Ax = b starting from x. Throws on a
/// zero (or missing) diagonal entry.
Vector gauss_seidel_sweep(const SparseSymmetricMatrix& A, std::span<const double> b,
                          std::span<const double> x, int sweeps);
void gauss_seidel_inplace(const SparseSymmetricMatrix& A, std::span<const double> b,
                          std::span<double> x, int sweeps);

struct CgResult {
    Vector x;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Conjugate gradients for (A + shift·I) x = b, SPD required. Stops when
/// ‖b − (A+shift)x‖ ≤ rel_tol·‖b‖.
CgResult conjugate_gradient(const SparseSymmetricMatrix& A, double shift, std::span<const double> b,
                            std::span<const double> x0, double rel_tol, int max_iter);

struct EigenPair {
    double value = 0.0;
    Vector vector;
    double residual = 0.0;
    int iterations = 0;
};

/// Largest-magnitude entry positive, ties broken by the lowest index.
void sign_normalize(std::span<double> v);

/// Smallest eigenpair by shifted inverse iteration. The shift sits below the
/// Gershgorin lower bound, so every inner solve is SPD. Converges when
/// ‖Av − λv‖ ≤ tol·max(1, ‖A‖∞). Throws ConvergenceError after max(10n, 200)
/// outer iterations.
EigenPair smallest_eigpair(const SparseSymmetricMatrix& A, double tol = 1e-10,
                           std::optional<std::span<const double>> initial = std::nullopt);

/// The k smallest eigenpairs, found one at a time with deflation against the
/// earlier ones.
std::vector<EigenPair> smallest_eigpairs(const SparseSymmetricMatrix& A, std::size_t k,
                                         double tol = 1e-10);

/// Largest eigenvalue via Lanczos with full reorthogonalization. The returned
/// value is the top Ritz value plus its residual bound, clipped to the
/// Gershgorin upper bound, so it errs on the high side. Returns the
/// Gershgorin bound itself if the iteration cap is reached first.
double largest_eigval_estimate(const SparseSymmetricMatrix& A, double tol = 1e-8);

/// Eigenvalues (ascending) of a symmetric tridiagonal matrix. When
/// `last_components` is given it receives the last entry of each normalized
/// eigenvector, in the same order (the Lanczos residual bound needs only these).
Vector tridiagonal_eigen(std::span<const double> diag, std::span<const double> offdiag,
                         Vector* last_components = nullptr);

/// Dense solve by Gaussian elimination with partial pivoting. `m` is row-major
/// size×size. Throws std::runtime_error when numerically singular.
Vector solve_dense(std::vector<double> m, Vector rhs);

}  // namespace qsphere
