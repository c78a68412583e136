#include "qsphere/experiments.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "qsphere/io.hpp"
#include "qsphere/oracle.hpp"
#include "qsphere/verify.hpp"

namespace qsphere {

void Table::write_csv(std::ostream& out) const
{
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out << (i ? "," : "") << cells[i];
        }
        out << '\n';
    };
    line(header);
    for (const auto& r : rows) {
        line(r);
    }
}

double tuned_rho(int dim, double beta, int N)
{
    if (dim == 3) {
        if (N >= 129) {
            return 30000.0;
        }
        if (N >= 65) {
            return 900.0;
        }
        return N >= 33 ? 200.0 : 100.0;
    }
    if (beta >= 1000.0) {
        return 3000.0;
    }
    if (beta >= 500.0) {
        if (N >= 65) {
            return 2000.0;
        }
        return N >= 33 ? 1500.0 : 1000.0;
    }
    return N >= 129 ? 2000.0 : 100.0;
}

BecSpec excited_state_spec()
{
    BecSpec s;
    s.dim = 2;
    s.N = 17;
    s.beta = 0.5;
    s.domain = {{-1.0, 1.0}, {-1.0, 1.0}};
    return s.normalized();
}

Vector excited_state_init(const BecSpec& spec)
{
    return normalized(sample_on_grid(spec, [](std::span<const double> q) {
        return q[0] * std::exp(-(q[0] * q[0] + q[1] * q[1]) / 2.0);
    }));
}

namespace {

Vector uniform_unit(std::size_t n)
{
    return Vector(n, 1.0 / std::sqrt(static_cast<double>(n)));
}

Vector refine(const Vector& coarse, int dim, int N_coarse)
{
    try {
        return prolongate(coarse, dim, N_coarse);
    } catch (const std::domain_error&) {
        // A degenerate coarse iterate interpolates to zero; restart flat.
        std::size_t n = 1;
        for (int a = 0; a < dim; ++a) {
            n *= static_cast<std::size_t>(2 * N_coarse - 3);
        }
        return uniform_unit(n);
    }
}

std::string yes_no(bool b)
{
    return b ? "Y" : "N";
}

std::string status(std::initializer_list<std::pair<const char*, bool>> checks)
{
    std::string s;
    for (const auto& [name, ok] : checks) {
        if (!ok) {
            s += (s.empty() ? "" : ";") + std::string(name) + "_unconverged";
        }
    }
    return s.empty() ? "ok" : s;
}

std::string sig(double v)
{
    return format_sig(v, 6);
}

std::string sci(double v)
{
    return format_sig(v, 2);
}

}  // namespace

std::vector<RefinementRun> mesh_refinement(int dim, double beta, const std::vector<int>& Ns)
{
    std::vector<RefinementRun> out;
    double rn_clock = 0.0;
    double admm_clock = 0.0;
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        BecSpec s;
        s.dim = dim;
        s.N = Ns[i];
        s.beta = beta;
        const Problem p = build_bec_problem(s);
        RefinementRun run;
        run.N = Ns[i];

        AdmmConfig ac;
        ac.rho = tuned_rho(dim, beta, Ns[i]);
        RnConfig rc;
        if (i == 0) {
            run.rn = solve_rn(p, rc, uniform_unit(p.n()));
            run.admm = solve_admm(p, ac);
        } else {
            const auto& prev = out.back();
            run.rn = solve_rn(p, rc, refine(prev.rn.x, dim, prev.N));
            AdmmInit init{refine(prev.admm.x, dim, prev.N), Vector(p.n(), 0.0)};
            run.admm = solve_admm(p, ac, init);
        }
        rn_clock += run.rn.wall_seconds;
        admm_clock += run.admm.wall_seconds;
        run.rn.wall_seconds = rn_clock;
        run.admm.wall_seconds = admm_clock;
        out.push_back(std::move(run));
    }
    return out;
}

Table replicate_table1(const ReplicateOptions& opts)
{
    Table t;
    t.header = {"N-1", "admm_obj", "rn_obj", "oracle_obj", "lambda0", "sign", "status"};
    for (int intervals : {50, 100, 200, 500, 1000, 1500}) {
        BecSpec s;
        s.dim = 1;
        s.N = intervals + 1;
        s.beta = 0.5;
        const Problem p = build_bec_problem(s);
        AdmmConfig ac;
        const SolveReport admm = solve_admm(p, ac);
        const SolveReport rn = solve_rn(p, RnConfig{}, uniform_unit(p.n()));
        std::string oracle_value = "skipped";
        bool oracle_ok = true;
        if (opts.run_oracle) {
            const ReformResult o = solve_reform(p);
            oracle_value = sig(o.value);
            oracle_ok = o.converged;
        }
        const bool sign = certify(p, admm.x).sign_uniform && certify(p, rn.x).sign_uniform;
        t.rows.push_back({std::to_string(intervals), sig(admm.objective), sig(rn.objective), oracle_value,
                          sig(admm.lambda), yes_no(sign),
                          status({{"admm", admm.converged}, {"rn", rn.converged}, {"oracle", oracle_ok}})});
    }
    return t;
}

Table replicate_table4(const ReplicateOptions& opts)
{
    Table t;
    t.header = {"case", "lambda", "admm_obj", "rn_obj", "oracle_obj", "sign", "status"};
    const std::vector<std::pair<int, int>> cases{{1, 257}, {1, 513}, {2, 9}, {2, 17}, {3, 5}, {3, 9}};
    for (const auto& [dim, N] : cases) {
        BecSpec s;
        s.dim = dim;
        s.N = N;
        s.beta = 0.5;
        const Problem p = build_bec_problem(s);
        AdmmConfig ac;
        ac.rho = 100.0;
        const SolveReport admm = solve_admm(p, ac);
        const SolveReport rn = solve_rn(p, RnConfig{}, uniform_unit(p.n()));
        std::string oracle_value = "skipped";
        bool oracle_ok = true;
        if (opts.run_oracle) {
            const ReformResult o = solve_reform(p);
            oracle_value = sig(o.value);
            oracle_ok = o.converged;
        }
        const bool sign = certify(p, admm.x).sign_uniform && certify(p, rn.x).sign_uniform;
        t.rows.push_back({"d=" + std::to_string(dim) + " N=" + std::to_string(N), sig(admm.lambda),
                          sig(admm.objective), sig(rn.objective), oracle_value, yes_no(sign),
                          status({{"admm", admm.converged}, {"rn", rn.converged}, {"oracle", oracle_ok}})});
    }
    return t;
}

namespace {

std::vector<int> grid_sizes(int max_N)
{
    std::vector<int> Ns;
    for (int N = 17; N <= std::min(max_N, 129); N = 2 * N - 1) {
        Ns.push_back(N);
    }
    return Ns;
}

void refinement_rows(Table& t, int dim, double beta, const ReplicateOptions& opts)
{
    for (const auto& run : mesh_refinement(dim, beta, grid_sizes(opts.max_N))) {
        t.rows.push_back({format_sig(beta, 6), std::to_string(run.N), std::to_string(run.rn.iterations),
                          sig(run.rn.wall_seconds), sig(run.rn.objective), sci(run.rn.nrmG),
                          std::to_string(run.admm.inner_iterations) + "(" + std::to_string(run.admm.iterations) + ")",
                          sig(run.admm.wall_seconds), sig(run.admm.objective), sci(run.admm.nrmG),
                          format_sig(tuned_rho(dim, beta, run.N), 6),
                          status({{"rn", run.rn.converged}, {"admm", run.admm.converged}})});
    }
}

const std::vector<std::string> kRefinementHeader{"beta",     "N",        "rn_iter",  "rn_cpu",
                                                 "rn_obj",   "rn_nrmG",  "admm_iter", "admm_cpu",
                                                 "admm_obj", "admm_nrmG", "rho",      "status"};

}  // namespace

Table replicate_table5(const ReplicateOptions& opts)
{
    Table t;
    t.header = kRefinementHeader;
    for (double beta : {0.5, 500.0, 1000.0}) {
        if (opts.beta > 0.0 && opts.beta != beta) {
            continue;
        }
        refinement_rows(t, 2, beta, opts);
    }
    if (t.rows.empty()) {
        throw std::invalid_argument("replicate table5: beta must be 0.5, 500 or 1000");
    }
    return t;
}

Table replicate_table6(const ReplicateOptions& opts)
{
    Table t;
    t.header = kRefinementHeader;
    refinement_rows(t, 3, 0.5, opts);
    return t;
}

Table replicate_example55(const ReplicateOptions&)
{
    Table t;
    t.header = {"take_abs", "objective", "verdict", "iterations", "nrmG", "status"};
    const BecSpec s = excited_state_spec();
    const Problem p = build_bec_problem(s);
    const Vector init = excited_state_init(s);
    for (bool take_abs : {false, true}) {
        RnConfig rc;
        rc.take_abs = take_abs;
        const SolveReport r = solve_rn(p, rc, init);
        t.rows.push_back({take_abs ? "true" : "false", sig(r.objective), to_string(certify(p, r.x).verdict),
                          std::to_string(r.iterations), sci(r.nrmG), status({{"rn", r.converged}})});
    }
    return t;
}

Table replicate_figure2(const ReplicateOptions&)
{
    Table t;
    t.header = {"rho", "k", "nrmG", "converged"};
    BecSpec s;
    s.dim = 2;
    s.N = 33;
    s.beta = 0.5;
    const Problem p = build_bec_problem(s);
    for (double rho : {1.0, 5.0, 10.0, 50.0, 100.0, 500.0, 1000.0}) {
        AdmmConfig ac;
        ac.rho = rho;
        ac.max_outer = 200;
        std::vector<std::pair<int, double>> series;
        const SolveReport r =
            solve_admm(p, ac, {}, [&](const IterationRecord& rec) { series.emplace_back(rec.k, rec.nrmG); });
        for (const auto& [k, g] : series) {
            t.rows.push_back({format_sig(rho, 6), std::to_string(k), sci(g), r.converged ? "1" : "0"});
        }
    }
    return t;
}

Table replicate(const std::string& which, const ReplicateOptions& opts)
{
    if (which == "1" || which == "table1") {
        return replicate_table1(opts);
    }
    if (which == "4" || which == "table4") {
        return replicate_table4(opts);
    }
    if (which == "5" || which == "table5") {
        return replicate_table5(opts);
    }
    if (which == "6" || which == "table6") {
        return replicate_table6(opts);
    }
    if (which == "example5.5" || which == "example55") {
        return replicate_example55(opts);
    }
    if (which == "figure2" || which == "fig2") {
        return replicate_figure2(opts);
    }
    throw std::invalid_argument("unknown experiment '" + which + "' (expected 1, 4, 5, 6, example5.5, figure2)");
}

}  // namespace qsphere
