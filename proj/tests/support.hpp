#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's numerical kernels.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "qsphere/linalg.hpp"
#include "qsphere/problem.hpp"

namespace qtest {

using qsphere::SparseSymmetricMatrix;
using qsphere::Triplet;
using qsphere::Vector;

// splitmix64, so test inputs do not depend on the standard library's
// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next()
    {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(next() % n); }
    double normal()
    {
        const double u1 = std::max(uniform(), 1e-300);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
    Vector normal_vector(std::size_t n)
    {
        Vector v(n);
        for (double& x : v) {
            x = normal();
        }
        return v;
    }
    Vector unit_vector(std::size_t n)
    {
        Vector v = normal_vector(n);
        double s = 0.0;
        for (double x : v) {
            s += x * x;
        }
        s = std::sqrt(s);
        for (double& x : v) {
            x /= s;
        }
        return v;
    }

private:
    std::uint64_t state_;
};

inline double ref_dot(const Vector& a, const Vector& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

inline double ref_norm(const Vector& a) { return std::sqrt(ref_dot(a, a)); }

using Dense = std::vector<std::vector<double>>;

inline Dense to_dense(const SparseSymmetricMatrix& A)
{
    Dense d(A.n(), std::vector<double>(A.n(), 0.0));
    for (const auto& t : A.triplets()) {
        d[t.row][t.col] += t.value;
    }
    return d;
}

inline Vector dense_mul(const Dense& A, const Vector& x)
{
    Vector y(x.size(), 0.0);
    for (std::size_t i = 0; i < A.size(); ++i) {
        for (std::size_t j = 0; j < A.size(); ++j) {
            y[i] += A[i][j] * x[j];
        }
    }
    return y;
}

inline SparseSymmetricMatrix from_dense(const Dense& d)
{
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = 0; j < d.size(); ++j) {
            if (d[i][j] != 0.0) {
                t.push_back({i, j, d[i][j]});
            }
        }
    }
    return SparseSymmetricMatrix::from_triplets(d.size(), std::move(t));
}

struct DenseEigen {
    Vector values;  // ascending
    Dense vectors;  // vectors[k] is the eigenvector of values[k]
};

// Cyclic Jacobi rotations.
inline DenseEigen jacobi_eigen(Dense a)
{
    const std::size_t n = a.size();
    Dense v(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        v[i][i] = 1.0;
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                off += a[i][j] * a[i][j];
            }
        }
        if (off < 1e-30) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) {
                    continue;
                }
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p];
                    const double akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k];
                    const double aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k][p];
                    const double vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a[x][x] < a[y][y]; });
    DenseEigen out;
    for (std::size_t k : order) {
        out.values.push_back(a[k][k]);
        Vector col(n);
        for (std::size_t i = 0; i < n; ++i) {
            col[i] = v[i][k];
        }
        out.vectors.push_back(std::move(col));
    }
    return out;
}

inline SparseSymmetricMatrix tridiag(std::size_t n, double diag = 2.0, double off = -1.0)
{
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < n; ++i) {
        t.push_back({i, i, diag});
        if (i + 1 < n) {
            t.push_back({i, i + 1, off});
            t.push_back({i + 1, i, off});
        }
    }
    return SparseSymmetricMatrix::from_triplets(n, std::move(t));
}

// Random symmetric irreducible M-matrix: a random spanning tree plus extra
// negative couplings, and a diagonal that dominates the row sums by a random
// positive margin (so it is nonsingular and PSD).
inline SparseSymmetricMatrix random_m_matrix(Rng& rng, std::size_t n, double extra_density = 0.2)
{
    Dense d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t j = rng.index(i);
        const double w = -rng.uniform(0.1, 2.0);
        d[i][j] = d[j][i] = w;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (d[i][j] == 0.0 && rng.uniform() < extra_density) {
                const double w = -rng.uniform(0.1, 2.0);
                d[i][j] = d[j][i] = w;
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            s += i == j ? 0.0 : -d[i][j];
        }
        d[i][i] = s + rng.uniform(0.0, 1.0);
    }
    return from_dense(d);
}

inline double ref_objective(double alpha, const Dense& B, const Vector& x)
{
    double q = 0.0;
    for (double v : x) {
        q += v * v * v * v;
    }
    return 0.5 * alpha * q + ref_dot(x, dense_mul(B, x));
}

// Bisection on a bracketing interval.
inline double bisect(const std::function<double(double)>& f, double lo, double hi)
{
    double flo = f(lo);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

inline Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& x, double h)
{
    Vector g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        Vector a(x), b(x);
        a[i] += h;
        b[i] -= h;
        g[i] = (f(a) - f(b)) / (2.0 * h);
    }
    return g;
}

}  // namespace qtest
