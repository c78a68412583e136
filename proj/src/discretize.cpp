#include "qsphere/discretize.hpp"

#include <cmath>
#include <stdexcept>

namespace qsphere {

BecSpec BecSpec::normalized() const
{
    BecSpec s = *this;
    if (s.dim < 1 || s.dim > 3) {
        throw std::invalid_argument("BecSpec: dim must be 1, 2 or 3");
    }
    if (s.N < 3) {
        throw std::invalid_argument("BecSpec: N must be at least 3");
    }
    if (!(s.beta >= 0.0) || !std::isfinite(s.beta)) {
        throw std::invalid_argument("BecSpec: beta must be nonnegative");
    }
    const auto d = static_cast<std::size_t>(s.dim);
    if (s.gammas.empty()) {
        s.gammas.assign(d, 1.0);
    }
    if (s.domain.empty()) {
        s.domain.assign(d, {0.0, 1.0});
    }
    if (s.gammas.size() != d || s.domain.size() != d) {
        throw std::invalid_argument("BecSpec: gammas and domain need one entry per axis");
    }
    for (double g : s.gammas) {
        if (!(g > 0.0)) {
            throw std::invalid_argument("BecSpec: trap frequencies must be positive");
        }
    }
    for (const auto& [a, b] : s.domain) {
        if (!(a < b)) {
            throw std::invalid_argument("BecSpec: each axis interval needs a < b");
        }
    }
    return s;
}

std::size_t BecSpec::unknowns() const
{
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) {
        total *= static_cast<std::size_t>(N - 2);
    }
    return total;
}

double harmonic_potential(std::span<const double> point, std::span<const double> gammas)
{
    if (point.size() != gammas.size() || point.empty() || point.size() > 3) {
        throw DimensionError("harmonic_potential: point and gammas must share a length in {1,2,3}");
    }
    double v = 0.0;
    for (std::size_t i = 0; i < point.size(); ++i) {
        v += gammas[i] * gammas[i] * point[i] * point[i];
    }
    return 0.5 * v;
}

std::vector<std::vector<double>> interior_axes(const BecSpec& spec)
{
    const BecSpec s = spec.normalized();
    const int intervals = s.N - 1;
    std::vector<std::vector<double>> axes;
    for (const auto& [a, b] : s.domain) {
        const double h = (b - a) / intervals;
        std::vector<double> pts;
        for (int i = 1; i < intervals; ++i) {
            pts.push_back(a + i * h);
        }
        axes.push_back(std::move(pts));
    }
    return axes;
}

SparseSymmetricMatrix bec_kinetic_matrix(const BecSpec& spec)
{
    const BecSpec s = spec.normalized();
    const std::size_t m = static_cast<std::size_t>(s.N - 2);
    const std::size_t total = s.unknowns();
    const int intervals = s.N - 1;

    std::vector<Triplet> t;
    t.reserve(total * static_cast<std::size_t>(1 + 2 * s.dim));
    // Axis a has stride m^a in the x-fastest ordering; L_d = Σ_a I ⊗ L1 ⊗ I.
    std::size_t stride = 1;
    for (int a = 0; a < s.dim; ++a) {
        const double h = (s.domain[static_cast<std::size_t>(a)].second -
                          s.domain[static_cast<std::size_t>(a)].first) / intervals;
        const double c = 1.0 / (2.0 * h * h);
        for (std::size_t flat = 0; flat < total; ++flat) {
            const std::size_t coord = (flat / stride) % m;
            t.push_back({flat, flat, 2.0 * c});
            if (coord > 0) {
                t.push_back({flat, flat - stride, -c});
            }
            if (coord + 1 < m) {
                t.push_back({flat, flat + stride, -c});
            }
        }
        stride *= m;
    }
    return SparseSymmetricMatrix::from_triplets(total, std::move(t));
}

Problem build_bec_problem(const BecSpec& spec)
{
    const BecSpec s = spec.normalized();
    if (!(s.beta > 0.0)) {
        throw std::invalid_argument(
            "build_bec_problem: beta must be positive (beta = 0 leaves a linear eigenproblem)");
    }
    const int intervals = s.N - 1;
    double cell = 1.0;
    for (const auto& [a, b] : s.domain) {
        cell *= (b - a) / intervals;
    }
    const Vector potential =
        sample_on_grid(s, [&](std::span<const double> pt) { return harmonic_potential(pt, s.gammas); });
    Problem p(s.beta / cell, add_diagonal(bec_kinetic_matrix(s), potential));
    p.metadata()["source"] = "bec";
    p.metadata()["dim"] = std::to_string(s.dim);
    p.metadata()["N"] = std::to_string(s.N);
    p.metadata()["beta"] = std::to_string(s.beta);
    return p;
}

SparseSymmetricMatrix build_l_shaped_laplacian()
{
    // Column blocks of the grid after dropping the removed quarter: three
    // blocks with two live nodes, then two full blocks of five.
    const std::array<std::size_t, 5> sizes{2, 2, 2, 5, 5};
    std::array<std::size_t, 5> offset{};
    for (std::size_t b = 1; b < sizes.size(); ++b) {
        offset[b] = offset[b - 1] + sizes[b - 1];
    }
    const double n2 = 36.0;
    std::vector<Triplet> t;
    for (std::size_t b = 0; b < sizes.size(); ++b) {
        for (std::size_t i = 0; i < sizes[b]; ++i) {
            const std::size_t r = offset[b] + i;
            t.push_back({r, r, 4.0 * n2});
            if (i + 1 < sizes[b]) {
                t.push_back({r, r + 1, -n2});
                t.push_back({r + 1, r, -n2});
            }
        }
        if (b + 1 < sizes.size()) {
            const std::size_t shared = std::min(sizes[b], sizes[b + 1]);
            for (std::size_t i = 0; i < shared; ++i) {
                t.push_back({offset[b] + i, offset[b + 1] + i, -n2});
                t.push_back({offset[b + 1] + i, offset[b] + i, -n2});
            }
        }
    }
    return SparseSymmetricMatrix::from_triplets(16, std::move(t));
}

Vector prolongate(std::span<const double> coarse, int dim, int N_coarse)
{
    if (dim < 1 || dim > 3 || N_coarse < 3) {
        throw std::invalid_argument("prolongate: bad grid description");
    }
    const std::size_t mc = static_cast<std::size_t>(N_coarse - 2);
    std::size_t expected = 1;
    for (int a = 0; a < dim; ++a) {
        expected *= mc;
    }
    if (coarse.size() != expected) {
        throw DimensionError("prolongate: coarse vector does not match the grid");
    }
    const int N_fine = 2 * N_coarse - 1;
    const std::size_t mf = static_cast<std::size_t>(N_fine - 2);

    // Coarse value at grid index c (0..N_coarse-1, boundary = 0).
    auto coarse_at = [&](const std::array<long, 3>& c) {
        std::size_t flat = 0;
        std::size_t stride = 1;
        for (int a = 0; a < dim; ++a) {
            if (c[static_cast<std::size_t>(a)] <= 0 || c[static_cast<std::size_t>(a)] >= N_coarse - 1) {
                return 0.0;
            }
            flat += static_cast<std::size_t>(c[static_cast<std::size_t>(a)] - 1) * stride;
            stride *= mc;
        }
        return coarse[flat];
    };

    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) {
        total *= mf;
    }
    Vector fine(total);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::array<long, 3> node{};
        std::size_t rem = flat;
        for (int a = 0; a < dim; ++a) {
            node[static_cast<std::size_t>(a)] = static_cast<long>(rem % mf) + 1;
            rem /= mf;
        }
        // Average over the 2^k coarse neighbours along odd fine coordinates.
        double sum = 0.0;
        int count = 0;
        for (int corner = 0; corner < (1 << dim); ++corner) {
            std::array<long, 3> c{};
            bool skip = false;
            for (int a = 0; a < dim; ++a) {
                const long f = node[static_cast<std::size_t>(a)];
                const bool upper = (corner >> a) & 1;
                if (f % 2 == 0) {
                    if (upper) {
                        skip = true;
                        break;
                    }
                    c[static_cast<std::size_t>(a)] = f / 2;
                } else {
                    c[static_cast<std::size_t>(a)] = upper ? (f + 1) / 2 : (f - 1) / 2;
                }
            }
            if (skip) {
                continue;
            }
            sum += coarse_at(c);
            ++count;
        }
        fine[flat] = sum / count;
    }
    return normalized(fine);
}

}  // namespace qsphere
