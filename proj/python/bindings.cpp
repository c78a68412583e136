#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qsphere/admm.hpp"
#include "qsphere/discretize.hpp"
#include "qsphere/io.hpp"
#include "qsphere/oracle.hpp"
#include "qsphere/rnewton.hpp"
#include "qsphere/scf.hpp"
#include "qsphere/verify.hpp"

namespace py = pybind11;
using namespace qsphere;

namespace {

IterationObserver wrap(const std::optional<std::function<void(const IterationRecord&)>>& cb)
{
    if (!cb) {
        return {};
    }
    return *cb;
}

Vector default_start(const Problem& p, const std::optional<Vector>& init)
{
    if (init) {
        return *init;
    }
    return Vector(p.n(), 1.0 / std::sqrt(static_cast<double>(p.n())));
}

}  // namespace

PYBIND11_MODULE(_qsphere, m)
{
    m.doc() = "Quartic minimization on the unit sphere: solvers and certificates";

    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_ValueError);

    py::class_<SparseSymmetricMatrix>(m, "SparseSymmetricMatrix")
        .def_static(
            "from_triplets",
            [](std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& entries) {
                std::vector<Triplet> t;
                t.reserve(entries.size());
                for (const auto& [r, c, v] : entries) {
                    t.push_back({r, c, v});
                }
                return SparseSymmetricMatrix::from_triplets(n, std::move(t));
            },
            py::arg("n"), py::arg("entries"))
        .def_static("identity", &SparseSymmetricMatrix::identity)
        .def_static("diagonal", [](const Vector& d) { return SparseSymmetricMatrix::diagonal(d); })
        .def_property_readonly("n", &SparseSymmetricMatrix::n)
        .def_property_readonly("nnz", &SparseSymmetricMatrix::nnz)
        .def("at", &SparseSymmetricMatrix::at)
        .def("norm_inf", &SparseSymmetricMatrix::norm_inf)
        .def("matvec", [](const SparseSymmetricMatrix& A, const Vector& x) { return matvec(A, x); })
        .def("triplets",
             [](const SparseSymmetricMatrix& A) {
                 std::vector<std::tuple<std::size_t, std::size_t, double>> out;
                 for (const Triplet& t : A.triplets()) {
                     out.emplace_back(t.row, t.col, t.value);
                 }
                 return out;
             })
        .def("to_dense", [](const SparseSymmetricMatrix& A) {
            std::vector<Vector> d(A.n(), Vector(A.n(), 0.0));
            for (const Triplet& t : A.triplets()) {
                d[t.row][t.col] = t.value;
            }
            return d;
        });

    py::class_<Problem>(m, "Problem")
        .def(py::init<double, SparseSymmetricMatrix>(), py::arg("alpha"), py::arg("B"))
        .def_static("unchecked", &Problem::unchecked, py::arg("alpha"), py::arg("B"))
        .def_property_readonly("alpha", &Problem::alpha)
        .def_property_readonly("B", &Problem::B)
        .def_property_readonly("n", &Problem::n)
        .def_property_readonly("validated", &Problem::validated);

    m.def("objective", [](const Problem& p, const Vector& x) { return objective(p, x); });
    m.def("gradient", [](const Problem& p, const Vector& x) { return gradient(p, x); });
    m.def("rayleigh_lambda", [](const Problem& p, const Vector& x) { return rayleigh_lambda(p, x); });
    m.def("nepv_residual", [](const Problem& p, const Vector& x) { return nepv_residual(p, x); });
    m.def("riemannian_grad_norm", [](const Problem& p, const Vector& x) { return riemannian_grad_norm(p, x); });
    m.def("irreducibility_check", &irreducibility_check);

    py::class_<BecSpec>(m, "BecSpec")
        .def(py::init([](int dim, int N, double beta, std::vector<double> gammas,
                         std::vector<std::pair<double, double>> domain) {
                 BecSpec s;
                 s.dim = dim;
                 s.N = N;
                 s.beta = beta;
                 s.gammas = std::move(gammas);
                 s.domain = std::move(domain);
                 return s;
             }),
             py::arg("dim") = 1, py::arg("N") = 3, py::arg("beta") = 1.0, py::arg("gammas") = std::vector<double>{},
             py::arg("domain") = std::vector<std::pair<double, double>>{})
        .def_readwrite("dim", &BecSpec::dim)
        .def_readwrite("N", &BecSpec::N)
        .def_readwrite("beta", &BecSpec::beta)
        .def_readwrite("gammas", &BecSpec::gammas)
        .def_readwrite("domain", &BecSpec::domain)
        .def("unknowns", &BecSpec::unknowns);
    m.def("build_bec_problem", &build_bec_problem);

    py::class_<IterationRecord>(m, "IterationRecord")
        .def_readonly("k", &IterationRecord::k)
        .def_readonly("objective", &IterationRecord::objective)
        .def_readonly("primal_residual", &IterationRecord::primal_residual)
        .def_readonly("nrmG", &IterationRecord::nrmG)
        .def_readonly("lagrangian", &IterationRecord::lagrangian)
        .def_readonly("step_norm", &IterationRecord::step_norm)
        .def_readonly("sigma", &IterationRecord::sigma)
        .def_readonly("accepted", &IterationRecord::accepted);

    py::class_<SolveReport>(m, "SolveReport")
        .def_readonly("method", &SolveReport::method)
        .def_readonly("x", &SolveReport::x)
        .def_readonly("objective", &SolveReport::objective)
        .def_readonly("lambda_", &SolveReport::lambda)
        .def_readonly("nrmG", &SolveReport::nrmG)
        .def_readonly("converged", &SolveReport::converged)
        .def_readonly("iterations", &SolveReport::iterations)
        .def_readonly("inner_iterations", &SolveReport::inner_iterations)
        .def_readonly("wall_seconds", &SolveReport::wall_seconds)
        .def_readonly("message", &SolveReport::message)
        .def("to_json", [](const SolveReport& r) { return to_json(r).dump(); });

    py::class_<AdmmConfig>(m, "AdmmConfig")
        .def(py::init<>())
        .def_readwrite("rho", &AdmmConfig::rho)
        .def_readwrite("eps_abs", &AdmmConfig::eps_abs)
        .def_readwrite("eps_rel", &AdmmConfig::eps_rel)
        .def_readwrite("max_outer", &AdmmConfig::max_outer)
        .def_readwrite("eps0", &AdmmConfig::eps0)
        .def_readwrite("nonneg", &AdmmConfig::nonneg)
        .def("validate", &AdmmConfig::validate);

    py::class_<RnConfig>(m, "RnConfig")
        .def(py::init<>())
        .def_readwrite("sigma0", &RnConfig::sigma0)
        .def_readwrite("tol_nrmG", &RnConfig::tol_nrmG)
        .def_readwrite("xtol", &RnConfig::xtol)
        .def_readwrite("max_iter", &RnConfig::max_iter)
        .def_readwrite("take_abs", &RnConfig::take_abs)
        .def("validate", &RnConfig::validate);

    py::class_<ScfConfig>(m, "ScfConfig")
        .def(py::init<>())
        .def_readwrite("tol", &ScfConfig::tol)
        .def_readwrite("max_iter", &ScfConfig::max_iter)
        .def_readwrite("theta", &ScfConfig::theta)
        .def("validate", &ScfConfig::validate);

    py::class_<ReformConfig>(m, "ReformConfig")
        .def(py::init<>())
        .def_readwrite("tol", &ReformConfig::tol)
        .def_readwrite("max_iter", &ReformConfig::max_iter);

    py::class_<ReformResult>(m, "ReformResult")
        .def_readonly("y", &ReformResult::y)
        .def_readonly("x", &ReformResult::x)
        .def_readonly("value", &ReformResult::value)
        .def_readonly("iterations", &ReformResult::iterations)
        .def_readonly("converged", &ReformResult::converged);

    using Callback = std::optional<std::function<void(const IterationRecord&)>>;
    m.def(
        "solve_admm",
        [](const Problem& p, const AdmmConfig& cfg, Callback observer) {
            return solve_admm(p, cfg, {}, wrap(observer));
        },
        py::arg("problem"), py::arg("config") = AdmmConfig{}, py::arg("observer") = py::none());
    m.def(
        "solve_rn",
        [](const Problem& p, const RnConfig& cfg, const std::optional<Vector>& init, Callback observer) {
            return solve_rn(p, cfg, default_start(p, init), wrap(observer));
        },
        py::arg("problem"), py::arg("config") = RnConfig{}, py::arg("init") = py::none(),
        py::arg("observer") = py::none());
    m.def(
        "solve_scf",
        [](const Problem& p, const ScfConfig& cfg, const std::optional<Vector>& init) {
            return solve_scf(p, cfg, default_start(p, init));
        },
        py::arg("problem"), py::arg("config") = ScfConfig{}, py::arg("init") = py::none());
    m.def("solve_reform", &solve_reform, py::arg("problem"), py::arg("config") = ReformConfig{});
    m.def("reform_objective", [](const Problem& p, const Vector& y) { return reform_objective(p, y); });

    m.def("project_sphere_nonneg", [](const Vector& y) { return project_sphere_nonneg(y); });
    m.def("lipschitz_estimate", &lipschitz_estimate, py::arg("problem"), py::arg("D"));

    py::enum_<Verdict>(m, "Verdict")
        .value("NOT_STATIONARY", Verdict::NOT_STATIONARY)
        .value("STATIONARY_ONLY", Verdict::STATIONARY_ONLY)
        .value("GLOBAL", Verdict::GLOBAL);

    py::class_<Certificate>(m, "Certificate")
        .def_readonly("sign_uniform", &Certificate::sign_uniform)
        .def_readonly("nepv_resid", &Certificate::nepv_resid)
        .def_readonly("resid_threshold", &Certificate::resid_threshold)
        .def_readonly("lambda_", &Certificate::lambda)
        .def_readonly("oracle_gap", &Certificate::oracle_gap)
        .def_readonly("psd_min", &Certificate::psd_min)
        .def_readonly("verdict", &Certificate::verdict);

    m.def(
        "certify",
        [](const Problem& p, const Vector& x, double tol_resid, std::optional<double> tol_sign,
           std::optional<double> oracle_value, bool check_psd) {
            CertifyOptions o;
            o.tol_resid = tol_resid;
            o.tol_sign = tol_sign;
            o.oracle_value = oracle_value;
            o.check_psd = check_psd;
            return certify(p, x, o);
        },
        py::arg("problem"), py::arg("x"), py::arg("tol_resid") = 1e-6, py::arg("tol_sign") = py::none(),
        py::arg("oracle_value") = py::none(), py::arg("check_psd") = false);

    py::class_<StationaryPoint>(m, "StationaryPoint")
        .def_readonly("lambda_", &StationaryPoint::lambda)
        .def_readonly("x", &StationaryPoint::x)
        .def_readonly("sign_uniform", &StationaryPoint::sign_uniform);
    m.def(
        "enumerate_stationary",
        [](const Problem& p, int starts, double tol, std::uint64_t seed) {
            py::gil_scoped_release release;
            return enumerate_stationary(p, starts, tol, seed);
        },
        py::arg("problem"), py::arg("starts"), py::arg("tol") = 1e-10, py::arg("seed") = 42);

    m.def("load_problem", &load_problem, py::arg("path"), py::arg("validate") = true);
    m.def("save_problem", &save_problem, py::arg("problem"), py::arg("path"));
}
