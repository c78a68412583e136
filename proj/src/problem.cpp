#include "qsphere/problem.hpp"

#include <cmath>
#include <queue>
#include <sstream>

namespace qsphere {

namespace {

void require_dim(const Problem& p, std::span<const double> x, const char* what)
{
    if (x.size() != p.n()) {
        throw DimensionError(std::string(what) + ": vector has length " + std::to_string(x.size()) +
                             " but the problem has n = " + std::to_string(p.n()));
    }
}

}  // namespace

bool irreducibility_check(const SparseSymmetricMatrix& B)
{
    const std::size_t n = B.n();
    const auto rows = B.row_offsets();
    const auto cols = B.col_indices();
    std::vector<char> seen(n, 0);
    std::queue<std::size_t> frontier;
    frontier.push(0);
    seen[0] = 1;
    std::size_t reached = 1;
    while (!frontier.empty()) {
        const std::size_t i = frontier.front();
        frontier.pop();
        for (std::size_t p = rows[i]; p < rows[i + 1]; ++p) {
            const std::size_t j = cols[p];
            if (j != i && !seen[j]) {
                seen[j] = 1;
                ++reached;
                frontier.push(j);
            }
        }
    }
    return reached == n;
}

StructureReport m_matrix_check(const SparseSymmetricMatrix& B)
{
    StructureReport r;
    std::ostringstream msg;
    r.offdiag_nonpositive = true;
    r.diagonal_positive = true;
    const auto rows = B.row_offsets();
    const auto cols = B.col_indices();
    const auto vals = B.values();
    for (std::size_t i = 0; i < B.n(); ++i) {
        bool has_diag = false;
        for (std::size_t p = rows[i]; p < rows[i + 1]; ++p) {
            if (cols[p] == i) {
                has_diag = true;
                if (!(vals[p] > 0.0) && r.diagonal_positive) {
                    r.diagonal_positive = false;
                    msg << "diagonal entry (" << i << "," << i << ") = " << vals[p] << " is not positive; ";
                }
            } else if (vals[p] > 0.0 && r.offdiag_nonpositive) {
                r.offdiag_nonpositive = false;
                msg << "off-diagonal entry (" << i << "," << cols[p] << ") = " << vals[p] << " is positive; ";
            }
        }
        if (!has_diag && r.diagonal_positive) {
            r.diagonal_positive = false;
            msg << "diagonal entry (" << i << "," << i << ") is missing; ";
        }
    }

    const double scale_b = B.norm_inf();
    if (B.gershgorin_lower() >= 0.0) {
        // Diagonal dominance already certifies PSD.
        r.lambda_min_estimate = B.gershgorin_lower();
        r.psd_certified = true;
    } else {
        try {
            r.lambda_min_estimate = smallest_eigpair(B, 1e-10).value;
            r.psd_certified = r.lambda_min_estimate >= -1e-8 * scale_b;
        } catch (const ConvergenceError& e) {
            r.psd_certified = false;
            msg << "smallest-eigenvalue estimate failed: " << e.what() << "; ";
        }
        if (!r.psd_certified) {
            msg << "lambda_min estimate " << r.lambda_min_estimate << " below -1e-8*||B||; ";
        }
    }
    r.irreducible = irreducibility_check(B);
    if (!r.irreducible) {
        msg << "off-diagonal graph is disconnected; ";
    }
    r.details = msg.str();
    return r;
}

Problem::Problem(double alpha, SparseSymmetricMatrix B, Unchecked)
    : alpha_(alpha), B_(std::move(B))
{
    if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) {
        throw std::invalid_argument("Problem: alpha must be positive and finite");
    }
}

Problem::Problem(double alpha, SparseSymmetricMatrix B)
    : Problem(alpha, std::move(B), Unchecked{})
{
    const auto report = m_matrix_check(B_);
    if (!report.all()) {
        throw std::invalid_argument("Problem: B is not a symmetric irreducible M-matrix: " + report.details);
    }
    validated_ = true;
}

Problem Problem::unchecked(double alpha, SparseSymmetricMatrix B)
{
    return Problem(alpha, std::move(B), Unchecked{});
}

void require_unit(std::span<const double> x, double tol)
{
    const double nrm = norm2(x);
    if (!(std::abs(nrm - 1.0) <= tol)) {
        throw std::domain_error("expected a unit vector, got norm " + std::to_string(nrm));
    }
}

double objective(const Problem& p, std::span<const double> x)
{
    require_dim(p, x, "objective");
    double quartic = 0.0;
    for (double v : x) {
        quartic += v * v * v * v;
    }
    const Vector bx = matvec(p.B(), x);
    return 0.5 * p.alpha() * quartic + dot(x, bx);
}

Vector gradient(const Problem& p, std::span<const double> x)
{
    require_dim(p, x, "gradient");
    Vector g = matvec(p.B(), x);
    for (std::size_t i = 0; i < x.size(); ++i) {
        g[i] = 2.0 * p.alpha() * x[i] * x[i] * x[i] + 2.0 * g[i];
    }
    return g;
}

namespace {

// α·x³ + Bx
Vector nepv_operator(const Problem& p, std::span<const double> x)
{
    Vector r = matvec(p.B(), x);
    for (std::size_t i = 0; i < x.size(); ++i) {
        r[i] += p.alpha() * x[i] * x[i] * x[i];
    }
    return r;
}

}  // namespace

double rayleigh_lambda(const Problem& p, std::span<const double> x)
{
    require_dim(p, x, "rayleigh_lambda");
    require_unit(x);
    return dot(x, nepv_operator(p, x));
}

double nepv_residual(const Problem& p, std::span<const double> x)
{
    require_dim(p, x, "nepv_residual");
    require_unit(x);
    Vector r = nepv_operator(p, x);
    const double lambda = dot(x, r);
    axpy(-lambda, x, r);
    return norm2(r);
}

double riemannian_grad_norm(const Problem& p, std::span<const double> x)
{
    require_dim(p, x, "riemannian_grad_norm");
    require_unit(x);
    Vector g = gradient(p, x);
    const double radial = dot(x, g);
    axpy(-radial, x, g);
    return norm2(g);
}

}  // namespace qsphere
