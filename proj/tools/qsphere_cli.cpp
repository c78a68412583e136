// qsphere: build instances, run the solvers, check certificates, replicate
// the experiment tables.

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "qsphere/admm.hpp"
#include "qsphere/experiments.hpp"
#include "qsphere/io.hpp"
#include "qsphere/oracle.hpp"
#include "qsphere/rnewton.hpp"
#include "qsphere/scf.hpp"
#include "qsphere/verify.hpp"

using namespace qsphere;
using nlohmann::json;

namespace {

struct InstanceArgs {
    std::string spec_file;
    std::string problem_file;
    int dim = 1;
    int N = 0;
    double beta = 0.5;
    std::vector<double> gammas;
    std::vector<double> domain;  // a b (applied to every axis) or one pair per axis
    std::string save_problem;

    void attach(CLI::App* app)
    {
        app->add_option("--spec", spec_file, "BEC spec JSON (dim, N, beta, gammas, domain)");
        app->add_option("--problem", problem_file, "Problem JSON (alpha, n, matrix)");
        app->add_option("--dim", dim, "Space dimension")->check(CLI::Range(1, 3));
        app->add_option("--N", N, "Split points per axis, endpoints included");
        app->add_option("--beta", beta, "Interaction strength");
        app->add_option("--gammas", gammas, "Trap frequencies, one per axis");
        app->add_option("--domain", domain, "Box bounds: a b, or a1 b1 a2 b2 ...");
        app->add_option("--save-problem", save_problem, "Write the assembled problem here");
    }

    Problem build() const
    {
        if (!problem_file.empty()) {
            return load_problem(problem_file);
        }
        BecSpec s;
        if (!spec_file.empty()) {
            s = bec_spec_from_json(read_json_file(spec_file));
        } else {
            if (N == 0) {
                throw std::invalid_argument("give --problem, --spec or --N");
            }
            s.dim = dim;
            s.N = N;
            s.beta = beta;
            s.gammas = gammas;
            if (domain.size() == 2) {
                s.domain.assign(static_cast<std::size_t>(dim), {domain[0], domain[1]});
            } else if (domain.size() == 2 * static_cast<std::size_t>(dim)) {
                for (std::size_t a = 0; a < domain.size(); a += 2) {
                    s.domain.emplace_back(domain[a], domain[a + 1]);
                }
            } else if (!domain.empty()) {
                throw std::invalid_argument("--domain needs 2 or 2*dim numbers");
            }
        }
        Problem p = build_bec_problem(s);
        if (!save_problem.empty()) {
            qsphere::save_problem(p, save_problem);
        }
        return p;
    }
};

Vector initial_point(const std::string& how, std::size_t n, std::uint64_t seed)
{
    if (how.empty() || how == "ones") {
        return Vector(n, 1.0 / std::sqrt(static_cast<double>(n)));
    }
    if (how == "random") {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal;
        Vector x(n);
        for (double& v : x) {
            v = normal(rng);
        }
        return normalized(x);
    }
    Vector x = load_solution(how);
    if (x.size() != n) {
        throw std::invalid_argument("--init file has the wrong length");
    }
    return normalized(x);
}

int run_solve(const InstanceArgs& inst, const std::string& method, const AdmmConfig& admm_cfg,
              const RnConfig& rn_cfg, const ScfConfig& scf_cfg, double oracle_tol, int oracle_iters,
              const std::string& init, bool with_oracle, const std::string& trace_path,
              const std::string& output, double tol_resid, std::uint64_t seed)
{
    const Problem p = inst.build();
    std::clog << "seed " << seed << ", n = " << p.n() << ", alpha = " << p.alpha() << '\n';
    std::unique_ptr<std::ofstream> trace_file;
    std::unique_ptr<CsvTrace> trace;
    IterationObserver observer;
    if (!trace_path.empty()) {
        trace_file = std::make_unique<std::ofstream>(trace_path);
        if (!*trace_file) {
            throw std::runtime_error("cannot write " + trace_path);
        }
        trace = std::make_unique<CsvTrace>(*trace_file);
        observer = trace->observer();
    }

    ReformConfig oracle_cfg;
    oracle_cfg.tol = oracle_tol;
    oracle_cfg.max_iter = oracle_iters;
    const Vector x0 = initial_point(init, p.n(), seed);
    SolveReport report;
    if (method == "admm") {
        std::optional<AdmmInit> start;
        if (!init.empty() && init != "ones") {
            start = AdmmInit{x0, Vector(p.n(), 0.0)};
        }
        report = solve_admm(p, admm_cfg, start, observer);
    } else if (method == "rn") {
        report = solve_rn(p, rn_cfg, x0, observer);
    } else if (method == "scf") {
        report = solve_scf(p, scf_cfg, x0, observer);
    } else if (method == "oracle") {
        const Stopwatch clock;
        const ReformResult o = solve_reform(p, oracle_cfg);
        report.method = "oracle";
        report.x = o.x;
        report.objective = objective(p, o.x);
        report.lambda = rayleigh_lambda(p, o.x);
        report.nrmG = riemannian_grad_norm(p, o.x);
        report.converged = o.converged;
        report.iterations = o.iterations;
        report.wall_seconds = clock.seconds();
        if (!o.converged) {
            report.message = "gradient spread " + format_sig(o.spread) + " above tolerance";
        }
    } else {
        throw std::invalid_argument("unknown method '" + method + "'");
    }

    CertifyOptions copts;
    copts.tol_resid = tol_resid;
    if (with_oracle && method != "oracle") {
        copts.oracle_value = solve_reform(p, oracle_cfg).value;
    }
    json out = to_json(report);
    out["certificate"] = to_json(certify(p, report.x, copts));
    if (!output.empty()) {
        write_json_file(output, out);
        json brief = out;
        brief.erase("x");
        std::cout << brief.dump(2) << '\n';
    } else {
        std::cout << out.dump(2) << '\n';
    }
    return report.converged ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Quartic minimization on the unit sphere: solvers, certificates, experiments"};
    app.require_subcommand(1);
    std::uint64_t seed = 42;
    app.add_option("--seed", seed, "Seed for every random choice")->capture_default_str();

    // solve
    auto* solve = app.add_subcommand("solve", "Run one solver on one instance");
    InstanceArgs solve_inst;
    solve_inst.attach(solve);
    std::string method = "admm";
    AdmmConfig admm_cfg;
    RnConfig rn_cfg;
    ScfConfig scf_cfg;
    double tol = -1.0;
    int max_iter = -1;
    double oracle_tol = 1e-8;
    int oracle_iters = 200000;
    std::string init, trace_path, output;
    bool with_oracle = false;
    double tol_resid = 1e-6;
    solve->add_option("--method", method, "admm | rn | scf | oracle")
        ->check(CLI::IsMember({"admm", "rn", "scf", "oracle"}))
        ->capture_default_str();
    solve->add_option("--rho", admm_cfg.rho, "ADMM penalty")->capture_default_str();
    solve->add_option("--eps-abs", admm_cfg.eps_abs)->capture_default_str();
    solve->add_option("--eps-rel", admm_cfg.eps_rel)->capture_default_str();
    solve->add_option("--max-outer", admm_cfg.max_outer)->capture_default_str();
    solve->add_option("--nonneg", admm_cfg.nonneg, "Project onto the nonnegative part of the sphere")
        ->capture_default_str();
    solve->add_option("--init", init, "ones | random | solution JSON");
    solve->add_option("--sigma0", rn_cfg.sigma0)->capture_default_str();
    solve->add_option("--eta1", rn_cfg.eta1)->capture_default_str();
    solve->add_option("--take-abs", rn_cfg.take_abs)->capture_default_str();
    solve->add_option("--theta", scf_cfg.theta, "SCF mixing")->capture_default_str();
    solve->add_option("--tol", tol, "rn: nrmG tolerance; scf: step tolerance; oracle: gradient spread");
    solve->add_option("--max-iter", max_iter, "Iteration cap for rn, scf and oracle");
    solve->add_flag("--oracle", with_oracle, "Also run the oracle and report the gap");
    solve->add_option("--trace", trace_path, "Iterate trace CSV");
    solve->add_option("--output", output, "Write the full report JSON here");
    solve->add_option("--tol-resid", tol_resid, "Certificate residual tolerance (relative to |B|)")
        ->capture_default_str();

    // verify
    auto* verify = app.add_subcommand("verify", "Certify a stored solution");
    InstanceArgs verify_inst;
    verify_inst.attach(verify);
    std::string solution;
    CertifyOptions vopts;
    double tol_sign = -1.0;
    bool verify_oracle = false;
    verify->add_option("--solution", solution, "JSON with an 'x' array")->required();
    verify->add_option("--tol-resid", vopts.tol_resid)->capture_default_str();
    verify->add_option("--tol-sign", tol_sign, "Default 1e-8*|x|_inf");
    verify->add_flag("--psd", vopts.check_psd, "Also check alpha*diag(x^2) + B - lambda*I >= 0");
    verify->add_flag("--oracle", verify_oracle, "Report the gap to the oracle value");

    // replicate
    auto* rep = app.add_subcommand("replicate", "Rerun an experiment grid and write CSV");
    std::string which;
    std::string rep_out;
    ReplicateOptions ropts;
    rep->add_option("table", which, "1 | 4 | 5 | 6 | example5.5 | figure2")->required();
    rep->add_option("--output,-o", rep_out, "CSV path (default stdout)");
    rep->add_option("--max-N", ropts.max_N, "Largest mesh for tables 5 and 6")->capture_default_str();
    rep->add_option("--beta", ropts.beta, "Only this beta in table 5");
    rep->add_flag("!--no-oracle", ropts.run_oracle, "Skip the oracle column");

    // bench
    auto* bench = app.add_subcommand("bench", "Time the solvers on one instance");
    InstanceArgs bench_inst;
    bench_inst.attach(bench);
    int repeat = 3;
    double bench_rho = 100.0;
    std::vector<std::string> methods{"admm", "rn", "scf", "oracle"};
    bench->add_option("--repeat", repeat)->capture_default_str();
    bench->add_option("--rho", bench_rho)->capture_default_str();
    bench->add_option("--methods", methods)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*solve) {
            if (tol > 0.0) {
                rn_cfg.tol_nrmG = tol;
                scf_cfg.tol = tol;
                oracle_tol = tol;
            }
            if (max_iter > 0) {
                rn_cfg.max_iter = max_iter;
                scf_cfg.max_iter = max_iter;
                oracle_iters = max_iter;
            }
            return run_solve(solve_inst, method, admm_cfg, rn_cfg, scf_cfg, oracle_tol, oracle_iters, init,
                             with_oracle, trace_path, output, tol_resid, seed);
        }
        if (*verify) {
            const Problem p = verify_inst.build();
            const Vector x = load_solution(solution);
            if (tol_sign >= 0.0) {
                vopts.tol_sign = tol_sign;
            }
            if (verify_oracle) {
                vopts.oracle_value = solve_reform(p).value;
            }
            const Certificate c = certify(p, x, vopts);
            std::cout << to_json(c).dump(2) << '\n';
            return 0;
        }
        if (*rep) {
            ropts.seed = seed;
            std::clog << "seed " << seed << '\n';
            const Table t = replicate(which, ropts);
            if (rep_out.empty()) {
                t.write_csv(std::cout);
            } else {
                std::ofstream out(rep_out);
                if (!out) {
                    throw std::runtime_error("cannot write " + rep_out);
                }
                t.write_csv(out);
            }
            return 0;
        }
        if (*bench) {
            const Problem p = bench_inst.build();
            const Vector x0(p.n(), 1.0 / std::sqrt(static_cast<double>(p.n())));
            std::cout << "method,repeat,min_seconds,mean_seconds,objective,converged\n";
            bool all_ok = true;
            for (const auto& m : methods) {
                double best = 1e300;
                double total = 0.0;
                double obj = 0.0;
                bool ok = true;
                for (int r = 0; r < repeat; ++r) {
                    const Stopwatch clock;
                    if (m == "admm") {
                        AdmmConfig c;
                        c.rho = bench_rho;
                        const auto rep_ = solve_admm(p, c);
                        obj = rep_.objective;
                        ok = rep_.converged;
                    } else if (m == "rn") {
                        const auto rep_ = solve_rn(p, RnConfig{}, x0);
                        obj = rep_.objective;
                        ok = rep_.converged;
                    } else if (m == "scf") {
                        const auto rep_ = solve_scf(p, ScfConfig{}, x0);
                        obj = rep_.objective;
                        ok = rep_.converged;
                    } else if (m == "oracle") {
                        const auto o = solve_reform(p);
                        obj = o.value;
                        ok = o.converged;
                    } else {
                        throw std::invalid_argument("unknown method '" + m + "'");
                    }
                    const double s = clock.seconds();
                    best = std::min(best, s);
                    total += s;
                }
                all_ok = all_ok && ok;
                std::cout << m << ',' << repeat << ',' << format_sig(best) << ',' << format_sig(total / repeat)
                          << ',' << format_sig(obj, 10) << ',' << (ok ? 1 : 0) << '\n';
            }
            return all_ok ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
