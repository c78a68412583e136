#include "qsphere/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

namespace qsphere {

namespace {

void require_size(std::size_t got, std::size_t want, const char* what)
{
    if (got != want) {
        throw DimensionError(std::string(what) + ": expected length " + std::to_string(want) +
                             ", got " + std::to_string(got));
    }
}

}  // namespace

SparseSymmetricMatrix::SparseSymmetricMatrix(std::size_t n, std::vector<std::size_t> row_offsets,
                                             std::vector<std::size_t> col_indices, Vector values)
    : n_(n),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values))
{
    if (n_ == 0) {
        throw std::invalid_argument("SparseSymmetricMatrix: n must be at least 1");
    }
    if (row_offsets_.size() != n_ + 1 || row_offsets_.front() != 0 ||
        row_offsets_.back() != col_indices_.size() || col_indices_.size() != values_.size()) {
        throw std::invalid_argument("SparseSymmetricMatrix: inconsistent CSR arrays");
    }
    for (std::size_t i = 0; i < n_; ++i) {
        if (row_offsets_[i] > row_offsets_[i + 1]) {
            throw std::invalid_argument("SparseSymmetricMatrix: row offsets must be non-decreasing");
        }
        for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
            if (col_indices_[p] >= n_) {
                throw std::invalid_argument("SparseSymmetricMatrix: column index out of range");
            }
            if (p > row_offsets_[i] && col_indices_[p] <= col_indices_[p - 1]) {
                throw std::invalid_argument("SparseSymmetricMatrix: columns must be sorted and unique");
            }
        }
    }
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
            const std::size_t j = col_indices_[p];
            const auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[j]);
            const auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[j + 1]);
            const auto it = std::lower_bound(first, last, i);
            if (it == last || *it != i ||
                values_[static_cast<std::size_t>(it - col_indices_.begin())] != values_[p]) {
                throw std::invalid_argument("SparseSymmetricMatrix: matrix is not symmetric at (" +
                                            std::to_string(i) + ", " + std::to_string(j) + ")");
            }
        }
    }
}

SparseSymmetricMatrix SparseSymmetricMatrix::from_triplets(std::size_t n, std::vector<Triplet> entries)
{
    for (const auto& t : entries) {
        if (t.row >= n || t.col >= n) {
            throw std::invalid_argument("from_triplets: index out of range");
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<std::size_t> offsets(n + 1, 0);
    std::vector<std::size_t> cols;
    Vector vals;
    cols.reserve(entries.size());
    vals.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size();) {
        const std::size_t r = entries[k].row;
        const std::size_t c = entries[k].col;
        double sum = 0.0;
        while (k < entries.size() && entries[k].row == r && entries[k].col == c) {
            sum += entries[k].value;
            ++k;
        }
        if (sum != 0.0) {
            cols.push_back(c);
            vals.push_back(sum);
            ++offsets[r + 1];
        }
    }
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    return {n, std::move(offsets), std::move(cols), std::move(vals)};
}

SparseSymmetricMatrix SparseSymmetricMatrix::identity(std::size_t n)
{
    return diagonal(Vector(n, 1.0));
}

SparseSymmetricMatrix SparseSymmetricMatrix::diagonal(std::span<const double> d)
{
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < d.size(); ++i) {
        t.push_back({i, i, d[i]});
    }
    return from_triplets(d.size(), std::move(t));
}

double SparseSymmetricMatrix::at(std::size_t i, std::size_t j) const
{
    if (i >= n_ || j >= n_) {
        throw std::out_of_range("SparseSymmetricMatrix::at: index out of range");
    }
    const auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
    const auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) {
        return 0.0;
    }
    return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

Vector SparseSymmetricMatrix::diagonal_entries() const
{
    Vector d(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        d[i] = at(i, i);
    }
    return d;
}

std::vector<Triplet> SparseSymmetricMatrix::triplets() const
{
    std::vector<Triplet> t;
    t.reserve(nnz());
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
            t.push_back({i, col_indices_[p], values_[p]});
        }
    }
    return t;
}

double SparseSymmetricMatrix::norm_inf() const
{
    double best = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
            s += std::abs(values_[p]);
        }
        best = std::max(best, s);
    }
    return best;
}

double SparseSymmetricMatrix::gershgorin_lower() const
{
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_; ++i) {
        double diag = 0.0;
        double radius = 0.0;
        for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
            if (col_indices_[p] == i) {
                diag = values_[p];
            } else {
                radius += std::abs(values_[p]);
            }
        }
        lo = std::min(lo, diag - radius);
    }
    return lo;
}

double SparseSymmetricMatrix::gershgorin_upper() const
{
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_; ++i) {
        double diag = 0.0;
        double radius = 0.0;
        for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
            if (col_indices_[p] == i) {
                diag = values_[p];
            } else {
                radius += std::abs(values_[p]);
            }
        }
        hi = std::max(hi, diag + radius);
    }
    return hi;
}

SparseSymmetricMatrix add_diagonal(const SparseSymmetricMatrix& a, std::span<const double> d)
{
    require_size(d.size(), a.n(), "add_diagonal");
    auto t = a.triplets();
    for (std::size_t i = 0; i < d.size(); ++i) {
        t.push_back({i, i, d[i]});
    }
    return SparseSymmetricMatrix::from_triplets(a.n(), std::move(t));
}

SparseSymmetricMatrix linear_combination(double a, const SparseSymmetricMatrix& A, double b,
                                         const SparseSymmetricMatrix& B)
{
    require_size(B.n(), A.n(), "linear_combination");
    std::vector<Triplet> t;
    for (auto e : A.triplets()) {
        e.value *= a;
        t.push_back(e);
    }
    for (auto e : B.triplets()) {
        e.value *= b;
        t.push_back(e);
    }
    return SparseSymmetricMatrix::from_triplets(A.n(), std::move(t));
}

SparseSymmetricMatrix block_diagonal(std::span<const SparseSymmetricMatrix> blocks)
{
    std::vector<Triplet> t;
    std::size_t offset = 0;
    for (const auto& blk : blocks) {
        for (auto e : blk.triplets()) {
            t.push_back({e.row + offset, e.col + offset, e.value});
        }
        offset += blk.n();
    }
    return SparseSymmetricMatrix::from_triplets(offset, std::move(t));
}

double dot(std::span<const double> a, std::span<const double> b)
{
    require_size(b.size(), a.size(), "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double norm2(std::span<const double> a)
{
    return std::sqrt(dot(a, a));
}

double norm_inf(std::span<const double> a)
{
    double m = 0.0;
    for (double v : a) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

double distance2(std::span<const double> a, std::span<const double> b)
{
    require_size(b.size(), a.size(), "distance2");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return std::sqrt(s);
}

double distance_inf(std::span<const double> a, std::span<const double> b)
{
    require_size(b.size(), a.size(), "distance_inf");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

void axpy(double a, std::span<const double> x, std::span<double> y)
{
    require_size(y.size(), x.size(), "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] += a * x[i];
    }
}

void scale(double a, std::span<double> x)
{
    for (double& v : x) {
        v *= a;
    }
}

Vector normalized(std::span<const double> x)
{
    const double nrm = norm2(x);
    if (!(nrm > 0.0) || !std::isfinite(nrm)) {
        throw std::domain_error("normalized: zero or non-finite vector");
    }
    Vector out(x.begin(), x.end());
    scale(1.0 / nrm, out);
    return out;
}

void matvec(const SparseSymmetricMatrix& A, std::span<const double> x, std::span<double> y)
{
    require_size(x.size(), A.n(), "matvec");
    require_size(y.size(), A.n(), "matvec output");
    const auto rows = A.row_offsets();
    const auto cols = A.col_indices();
    const auto vals = A.values();
    for (std::size_t i = 0; i < A.n(); ++i) {
        double s = 0.0;
        for (std::size_t p = rows[i]; p < rows[i + 1]; ++p) {
            s += vals[p] * x[cols[p]];
        }
        y[i] = s;
    }
}

Vector matvec(const SparseSymmetricMatrix& A, std::span<const double> x)
{
    Vector y(A.n());
    matvec(A, x, y);
    return y;
}

void gauss_seidel_inplace(const SparseSymmetricMatrix& A, std::span<const double> b,
                          std::span<double> x, int sweeps)
{
    require_size(b.size(), A.n(), "gauss_seidel_sweep rhs");
    require_size(x.size(), A.n(), "gauss_seidel_sweep x");
    const auto rows = A.row_offsets();
    const auto cols = A.col_indices();
    const auto vals = A.values();
    Vector diag(A.n(), 0.0);
    for (std::size_t i = 0; i < A.n(); ++i) {
        for (std::size_t p = rows[i]; p < rows[i + 1]; ++p) {
            if (cols[p] == i) {
                diag[i] = vals[p];
            }
        }
        if (diag[i] == 0.0) {
            throw std::domain_error("gauss_seidel_sweep: zero diagonal entry in row " + std::to_string(i));
        }
    }
    for (int s = 0; s < sweeps; ++s) {
        for (std::size_t i = 0; i < A.n(); ++i) {
            double sum = b[i];
            for (std::size_t p = rows[i]; p < rows[i + 1]; ++p) {
                if (cols[p] != i) {
                    sum -= vals[p] * x[cols[p]];
                }
            }
            x[i] = sum / diag[i];
        }
    }
}

Vector gauss_seidel_sweep(const SparseSymmetricMatrix& A, std::span<const double> b,
                          std::span<const double> x, int sweeps)
{
    Vector out(x.begin(), x.end());
    gauss_seidel_inplace(A, b, out, sweeps);
    return out;
}

CgResult conjugate_gradient(const SparseSymmetricMatrix& A, double shift, std::span<const double> b,
                            std::span<const double> x0, double rel_tol, int max_iter)
{
    const std::size_t n = A.n();
    require_size(b.size(), n, "conjugate_gradient rhs");
    require_size(x0.size(), n, "conjugate_gradient x0");
    CgResult out;
    out.x.assign(x0.begin(), x0.end());
    Vector r(n), p(n), q(n);
    matvec(A, out.x, q);
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = b[i] - q[i] - shift * out.x[i];
    }
    const double target = rel_tol * norm2(b);
    double rr = dot(r, r);
    p = r;
    for (int it = 0; it < max_iter; ++it) {
        if (std::sqrt(rr) <= target) {
            out.converged = true;
            break;
        }
        matvec(A, p, q);
        axpy(shift, p, q);
        const double pq = dot(p, q);
        if (!(pq > 0.0)) {
            break;
        }
        const double step = rr / pq;
        axpy(step, p, out.x);
        axpy(-step, q, r);
        const double rr_new = dot(r, r);
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = r[i] + (rr_new / rr) * p[i];
        }
        rr = rr_new;
        out.iterations = it + 1;
    }
    if (std::sqrt(rr) <= target) {
        out.converged = true;
    }
    out.residual = std::sqrt(rr);
    return out;
}

void sign_normalize(std::span<double> v)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (std::abs(v[i]) > std::abs(v[best])) {
            best = i;
        }
    }
    if (!v.empty() && v[best] < 0.0) {
        scale(-1.0, v);
    }
}

namespace {

void orthogonalize(std::span<double> v, const std::vector<EigenPair>& against)
{
    for (const auto& e : against) {
        axpy(-dot(e.vector, v), e.vector, v);
    }
}

Vector default_start(std::size_t n)
{
    Vector v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = 1.0 + 0.25 * std::sin(1.7 * static_cast<double>(i) + 0.3);
    }
    return v;
}

// Deterministic, spectrally rough start: hashed values in [−1, 1).
Vector rough_start(std::size_t n)
{
    Vector v(n);
    std::uint64_t h = 0x9E3779B97F4A7C15ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= h >> 33;
        h *= 0xFF51AFD7ED558CCDULL;
        h ^= h >> 29;
        h += 0x2545F4914F6CDD1DULL;
        v[i] = static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
    }
    return v;
}

EigenPair inverse_iteration(const SparseSymmetricMatrix& A, double tol,
                            std::optional<std::span<const double>> initial,
                            const std::vector<EigenPair>& deflate)
{
    const std::size_t n = A.n();
    const double scale_a = std::max(1.0, A.norm_inf());
    const double threshold = tol * scale_a;
    // Inner systems are (A − σI) with σ strictly below the spectrum.
    const double sigma = A.gershgorin_lower() - 1e-3 * scale_a - 1e-12;
    const int max_outer = static_cast<int>(std::max<std::size_t>(10 * n, 200));
    const int max_cg = static_cast<int>(10 * n + 100);

    Vector v = initial ? Vector(initial->begin(), initial->end()) : default_start(n);
    require_size(v.size(), n, "smallest_eigpair initial guess");
    orthogonalize(v, deflate);
    if (norm2(v) < 1e-14) {
        v = default_start(n);
        orthogonalize(v, deflate);
    }
    v = normalized(v);

    EigenPair out;
    Vector av(n), guess(n);
    double theta = 0.0;
    double resid = std::numeric_limits<double>::infinity();
    for (int it = 0; it <= max_outer; ++it) {
        matvec(A, v, av);
        theta = dot(v, av);
        Vector r = av;
        axpy(-theta, v, r);
        orthogonalize(r, deflate);
        resid = norm2(r);
        out.iterations = it;
        if (resid <= threshold) {
            break;
        }
        if (it == max_outer) {
            throw ConvergenceError("smallest_eigpair: no convergence within iteration cap", resid);
        }
        for (std::size_t i = 0; i < n; ++i) {
            guess[i] = v[i] / (theta - sigma);
        }
        auto cg = conjugate_gradient(A, -sigma, v, guess, 1e-13, max_cg);
        orthogonalize(cg.x, deflate);
        v = normalized(cg.x);
    }
    sign_normalize(v);
    out.value = theta;
    out.residual = resid;
    out.vector = std::move(v);
    return out;
}

}  // namespace

EigenPair smallest_eigpair(const SparseSymmetricMatrix& A, double tol,
                           std::optional<std::span<const double>> initial)
{
    return inverse_iteration(A, tol, initial, {});
}

std::vector<EigenPair> smallest_eigpairs(const SparseSymmetricMatrix& A, std::size_t k, double tol)
{
    if (k > A.n()) {
        throw DimensionError("smallest_eigpairs: k exceeds matrix dimension");
    }
    std::vector<EigenPair> found;
    for (std::size_t j = 0; j < k; ++j) {
        found.push_back(inverse_iteration(A, tol, std::nullopt, found));
    }
    return found;
}

Vector tridiagonal_eigen(std::span<const double> diag, std::span<const double> offdiag,
                         Vector* last_components)
{
    // Implicit QL with Wilkinson shifts (tql2).
    const std::size_t n = diag.size();
    if (n == 0) {
        return {};
    }
    require_size(offdiag.size() + 1, n, "tridiagonal_eigen");
    Vector d(diag.begin(), diag.end());
    Vector e(n, 0.0);
    std::copy(offdiag.begin(), offdiag.end(), e.begin());
    // Only the last row of the eigenvector matrix is tracked.
    Vector z(n, 0.0);
    z[n - 1] = 1.0;
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m = l;
        while (true) {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) {
                    break;
                }
            }
            if (m == l) {
                break;
            }
            if (++iter > 60) {
                throw ConvergenceError("tridiagonal_eigen: QL iteration did not converge", std::abs(e[l]));
            }
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            std::size_t i = m;
            bool underflow = false;
            while (i-- > l) {
                double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if (underflow) {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    Vector sorted(n);
    for (std::size_t i = 0; i < n; ++i) {
        sorted[i] = d[order[i]];
    }
    if (last_components) {
        last_components->resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            (*last_components)[i] = z[order[i]];
        }
    }
    return sorted;
}

double largest_eigval_estimate(const SparseSymmetricMatrix& A, double tol)
{
    const std::size_t n = A.n();
    const double upper = A.gershgorin_upper();
    if (n == 1) {
        return A.at(0, 0);
    }
    const std::size_t max_steps = std::min<std::size_t>(n, 400);
    std::vector<Vector> basis;
    Vector alphas, betas;
    Vector q = normalized(rough_start(n));
    Vector w(n);
    double estimate = upper;
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < max_steps; ++j) {
        basis.push_back(q);
        matvec(A, q, w);
        alphas.push_back(dot(q, w));
        // Full reorthogonalization, applied twice.
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) {
                axpy(-dot(b, w), b, w);
            }
        }
        const double beta = norm2(w);
        const bool check = j % 10 == 9 || j + 1 == max_steps || beta <= 1e-14 * std::abs(alphas.back());
        if (!check) {
            betas.push_back(beta);
            q = w;
            scale(1.0 / beta, q);
            continue;
        }
        Vector last;
        const Vector ritz = tridiagonal_eigen(alphas, betas, &last);
        const double top = ritz.back();
        const double bound = beta * std::abs(last.back());
        estimate = std::min(upper, top + bound);
        const double scale_top = std::max(std::abs(top), 1e-300);
        if (bound <= tol * scale_top || beta <= 1e-14 * std::max(1.0, std::abs(top)) ||
            std::abs(top - previous) <= 1e-3 * tol * scale_top) {
            return estimate;
        }
        previous = top;
        if (j + 1 == max_steps) {
            break;
        }
        betas.push_back(beta);
        q = w;
        scale(1.0 / beta, q);
    }
    if (basis.size() == n) {
        return estimate;
    }
    // Out of steps: the Ritz value may still sit below λ_max, so fall back
    // to the bound that is certain.
    return upper;
}

Vector solve_dense(std::vector<double> m, Vector rhs)
{
    const std::size_t n = rhs.size();
    require_size(m.size(), n * n, "solve_dense");
    double scale_m = 0.0;
    for (double v : m) {
        scale_m = std::max(scale_m, std::abs(v));
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(m[i * n + k]) > std::abs(m[piv * n + k])) {
                piv = i;
            }
        }
        if (std::abs(m[piv * n + k]) <= 1e-14 * std::max(scale_m, 1e-300)) {
            throw std::runtime_error("solve_dense: matrix is numerically singular");
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(m[k * n + j], m[piv * n + j]);
            }
            std::swap(rhs[k], rhs[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = m[i * n + k] / m[k * n + k];
            if (f == 0.0) {
                continue;
            }
            for (std::size_t j = k; j < n; ++j) {
                m[i * n + j] -= f * m[k * n + j];
            }
            rhs[i] -= f * rhs[k];
        }
    }
    Vector x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = rhs[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            s -= m[i * n + j] * x[j];
        }
        x[i] = s / m[i * n + i];
    }
    return x;
}

}  // namespace qsphere
