#include <doctest.h>

#include <cmath>

#include "qsphere/discretize.hpp"
#include "qsphere/experiments.hpp"
#include "qsphere/rnewton.hpp"
#include "qsphere/verify.hpp"
#include "support.hpp"

using namespace qsphere;
using qtest::Rng;

namespace {

Problem bec(int dim, int N, double beta)
{
    BecSpec s;
    s.dim = dim;
    s.N = N;
    s.beta = beta;
    return build_bec_problem(s);
}

Vector flat(std::size_t n) { return Vector(n, 1.0 / std::sqrt(static_cast<double>(n))); }

Vector tangent(Rng& rng, const Vector& x)
{
    Vector d = rng.normal_vector(x.size());
    const double c = qtest::ref_dot(d, x);
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] -= c * x[i];
    }
    return d;
}

Vector retract(const Vector& x, const Vector& d, double t)
{
    Vector z(x);
    axpy(t, d, z);
    return normalized(z);
}

}  // namespace

TEST_CASE("RnConfig validation")
{
    RnConfig c;
    CHECK_NOTHROW(c.validate());
    c.eta1 = 1.0;
    CHECK_THROWS(c.validate());
    c.eta1 = 0.1;
    c.sigma0 = 0.0;
    CHECK_THROWS(c.validate());
    c.sigma0 = 1.0;
    c.sigma_down = 1.5;
    CHECK_THROWS(c.validate());
}

TEST_CASE("rn_model_value")
{
    Rng rng(61);
    const std::size_t n = 12;
    const Problem p(2.0, qtest::random_m_matrix(rng, n));
    const Vector x = rng.unit_vector(n);
    CHECK(rn_model_value(p, x, Vector(n, 0.0), 1.0) == 0.0);
    CHECK_THROWS_AS(rn_model_value(p, x, x, 1.0), std::invalid_argument);

    SUBCASE("second-order agreement with the retracted energy")
    {
        for (int trial = 0; trial < 10; ++trial) {
            const Vector y = rng.unit_vector(n);
            const Vector d = tangent(rng, y);
            auto err = [&](double t) {
                Vector td(d);
                scale(t, td);
                return std::abs(objective(p, retract(y, d, t)) - objective(p, y) - rn_model_value(p, y, td, 0.0));
            };
            const double e1 = err(1e-2);
            const double e2 = err(5e-3);
            // Third-order remainder: halving t divides the error by about 8.
            CHECK(e2 < e1 / 5.0);
            CHECK(e1 < 1e-3 * qtest::ref_norm(d) * qtest::ref_norm(d));
        }
    }
    SUBCASE("regularization dominates")
    {
        const Vector d = tangent(rng, x);
        CHECK(rn_model_value(p, x, d, 1e12) > 1e10);
        CHECK(rn_model_value(p, x, d, 1e3) > rn_model_value(p, x, d, 1.0));
    }
}

TEST_CASE("rn_step")
{
    SUBCASE("stationary point stays put")
    {
        const Problem p = bec(1, 21, 0.5);
        const SolveReport r = solve_rn(p, RnConfig{}, flat(p.n()));
        REQUIRE(r.nrmG < 1e-8);
        const RnStep s = rn_step(p, r.x, 1.0, RnConfig{});
        CHECK(distance_inf(s.x, r.x) < 1e-9);
    }
    SUBCASE("energy never increases and iterates stay on the sphere")
    {
        Rng rng(67);
        for (int trial = 0; trial < 10; ++trial) {
            const std::size_t n = 5 + rng.index(20);
            const Problem p(rng.uniform(0.1, 10.0), qtest::random_m_matrix(rng, n));
            Vector x = rng.unit_vector(n);
            double sigma = 1.0;
            for (bool take_abs : {true, false}) {
                RnConfig cfg;
                cfg.take_abs = take_abs;
                for (int k = 0; k < 20; ++k) {
                    const RnStep s = rn_step(p, x, sigma, cfg);
                    CHECK(std::abs(norm2(s.x) - 1.0) <= 1e-12);
                    if (s.accepted) {
                        CHECK(objective(p, s.x) <= objective(p, x) + 1e-12);
                        CHECK(s.sigma < sigma);
                        if (take_abs) {
                            for (double v : s.x) {
                                CHECK(v >= 0.0);
                            }
                        }
                    } else {
                        CHECK(s.x == x);
                        CHECK(s.sigma > sigma);
                    }
                    x = s.x;
                    sigma = s.sigma;
                }
            }
        }
    }
}

TEST_CASE("solve_rn")
{
    SUBCASE("reaches the certified global minimizer with the absolute value")
    {
        Rng rng(71);
        for (int trial = 0; trial < 10; ++trial) {
            const std::size_t n = 5 + rng.index(20);
            const Problem p(rng.uniform(0.1, 10.0), qtest::random_m_matrix(rng, n));
            const SolveReport r = solve_rn(p, RnConfig{}, rng.unit_vector(n));
            CHECK(r.converged);
            for (double v : r.x) {
                CHECK(v >= 0.0);
            }
            CHECK(certify(p, r.x).verdict == Verdict::GLOBAL);
        }
    }
    SUBCASE("monotone energy along the trace")
    {
        const Problem p = bec(2, 17, 0.5);
        std::vector<IterationRecord> trace;
        const SolveReport r = solve_rn(p, RnConfig{}, flat(p.n()), [&](const IterationRecord& rec) {
            trace.push_back(rec);
        });
        CHECK(r.converged);
        for (std::size_t k = 1; k < trace.size(); ++k) {
            CHECK(trace[k].objective <= trace[k - 1].objective + 1e-12);
        }
    }
    SUBCASE("2D N = 33 and 3D N = 17")
    {
        const SolveReport r2 = solve_rn(bec(2, 33, 0.5), RnConfig{}, flat(31 * 31));
        CHECK(std::abs(r2.objective - 10.6994) <= 1e-3);
        CHECK(r2.nrmG <= 4.3e-4);
        const SolveReport r3 = solve_rn(bec(3, 17, 0.5), RnConfig{}, flat(15 * 15 * 15));
        CHECK(std::abs(r3.objective - 16.0005) <= 2e-3);
    }
    SUBCASE("strong interaction")
    {
        const SolveReport r = solve_rn(bec(2, 33, 500.0), RnConfig{}, flat(31 * 31));
        CHECK(std::abs(r.objective - 313.6436) <= 0.05);
    }
    SUBCASE("excited-state start with and without the absolute value")
    {
        const BecSpec s = excited_state_spec();
        const Problem p = build_bec_problem(s);
        RnConfig signed_cfg;
        signed_cfg.take_abs = false;
        const SolveReport plain = solve_rn(p, signed_cfg, excited_state_init(s));
        const SolveReport with_abs = solve_rn(p, RnConfig{}, excited_state_init(s));
        CHECK(certify(p, plain.x).verdict == Verdict::STATIONARY_ONLY);
        CHECK(certify(p, with_abs.x).verdict == Verdict::GLOBAL);
        CHECK(std::abs(with_abs.objective - 2.7307) <= 0.01);
        CHECK(plain.objective > with_abs.objective);
    }
    CHECK_THROWS_AS(solve_rn(bec(1, 9, 1.0), RnConfig{}, flat(3)), DimensionError);
    CHECK_THROWS_AS(solve_rn(bec(1, 9, 1.0), RnConfig{}, Vector(7, 1.0)), std::domain_error);
}
