#include "qsphere/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace qsphere {

namespace fs = std::filesystem;
using nlohmann::json;

void write_matrix_market(std::ostream& out, const SparseSymmetricMatrix& A)
{
    std::size_t lower = 0;
    for (const auto& t : A.triplets()) {
        lower += t.row >= t.col ? 1 : 0;
    }
    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    out << A.n() << ' ' << A.n() << ' ' << lower << '\n';
    out << std::setprecision(17);
    for (const auto& t : A.triplets()) {
        if (t.row >= t.col) {
            out << t.row + 1 << ' ' << t.col + 1 << ' ' << t.value << '\n';
        }
    }
}

SparseSymmetricMatrix read_matrix_market(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("MatrixMarket: empty input");
    }
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    for (auto* s : {&object, &format, &field, &symmetry}) {
        for (char& c : *s) {
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
    }
    if (tag != "%%MatrixMarket" || object != "matrix" || format != "coordinate") {
        throw std::runtime_error("MatrixMarket: only 'matrix coordinate' files are supported");
    }
    if (field != "real" && field != "integer") {
        throw std::runtime_error("MatrixMarket: field must be real or integer");
    }
    const bool symmetric = symmetry == "symmetric";
    if (!symmetric && symmetry != "general") {
        throw std::runtime_error("MatrixMarket: symmetry must be symmetric or general");
    }
    while (std::getline(in, line) && (line.empty() || line[0] == '%')) {
    }
    std::istringstream dims(line);
    std::size_t rows = 0, cols = 0, entries = 0;
    if (!(dims >> rows >> cols >> entries) || rows != cols || rows == 0) {
        throw std::runtime_error("MatrixMarket: bad size line");
    }
    std::vector<Triplet> t;
    t.reserve(symmetric ? 2 * entries : entries);
    for (std::size_t k = 0; k < entries; ++k) {
        std::size_t i = 0, j = 0;
        double v = 0.0;
        if (!(in >> i >> j >> v) || i == 0 || j == 0 || i > rows || j > rows) {
            throw std::runtime_error("MatrixMarket: bad entry " + std::to_string(k + 1));
        }
        t.push_back({i - 1, j - 1, v});
        if (symmetric && i != j) {
            t.push_back({j - 1, i - 1, v});
        }
    }
    return SparseSymmetricMatrix::from_triplets(rows, std::move(t));
}

json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const json& j)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << j.dump(2) << '\n';
}

void save_problem(const Problem& p, const std::string& json_path)
{
    const fs::path jp(json_path);
    fs::path mtx = jp;
    mtx.replace_extension(".mtx");
    {
        std::ofstream out(mtx);
        if (!out) {
            throw std::runtime_error("cannot write " + mtx.string());
        }
        write_matrix_market(out, p.B());
    }
    json j;
    j["alpha"] = p.alpha();
    j["n"] = p.n();
    j["metadata"] = p.metadata();
    j["matrix"] = mtx.filename().string();
    write_json_file(json_path, j);
}

Problem load_problem(const std::string& json_path, bool validate)
{
    const json j = read_json_file(json_path);
    if (!j.contains("alpha") || !j.contains("matrix")) {
        throw std::runtime_error(json_path + ": problem files need 'alpha' and 'matrix'");
    }
    fs::path mtx(j.at("matrix").get<std::string>());
    if (mtx.is_relative()) {
        mtx = fs::path(json_path).parent_path() / mtx;
    }
    std::ifstream in(mtx);
    if (!in) {
        throw std::runtime_error("cannot open " + mtx.string());
    }
    SparseSymmetricMatrix B = read_matrix_market(in);
    if (j.contains("n") && j.at("n").get<std::size_t>() != B.n()) {
        throw std::runtime_error(json_path + ": 'n' disagrees with the matrix size");
    }
    const double alpha = j.at("alpha").get<double>();
    Problem p = validate ? Problem(alpha, std::move(B)) : Problem::unchecked(alpha, std::move(B));
    if (j.contains("metadata")) {
        for (const auto& [k, v] : j.at("metadata").items()) {
            p.metadata()[k] = v.is_string() ? v.get<std::string>() : v.dump();
        }
    }
    return p;
}

BecSpec bec_spec_from_json(const json& j)
{
    BecSpec s;
    try {
        s.dim = j.value("dim", 1);
        s.N = j.value("N", 3);
        s.beta = j.value("beta", 1.0);
        if (j.contains("gammas")) {
            s.gammas = j.at("gammas").get<std::vector<double>>();
        }
        if (j.contains("domain")) {
            for (const auto& iv : j.at("domain")) {
                const auto ab = iv.get<std::vector<double>>();
                if (ab.size() != 2) {
                    throw std::invalid_argument("domain entries must be [a, b]");
                }
                s.domain.emplace_back(ab[0], ab[1]);
            }
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad spec: ") + e.what());
    }
    return s.normalized();
}

json to_json(const BecSpec& s)
{
    json j;
    j["dim"] = s.dim;
    j["N"] = s.N;
    j["beta"] = s.beta;
    j["gammas"] = s.gammas;
    json dom = json::array();
    for (const auto& [a, b] : s.domain) {
        dom.push_back({a, b});
    }
    j["domain"] = dom;
    return j;
}

json to_json(const SolveReport& r, bool include_x)
{
    json j;
    j["method"] = r.method;
    j["objective"] = r.objective;
    j["lambda"] = r.lambda;
    j["nrmG"] = r.nrmG;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["inner_iterations"] = r.inner_iterations;
    j["wall_seconds"] = r.wall_seconds;
    if (!r.message.empty()) {
        j["message"] = r.message;
    }
    if (include_x) {
        j["x"] = r.x;
    }
    return j;
}

json to_json(const Certificate& c)
{
    json j;
    j["sign_uniform"] = c.sign_uniform;
    j["nepv_resid"] = c.nepv_resid;
    j["resid_threshold"] = c.resid_threshold;
    j["lambda"] = c.lambda;
    j["oracle_gap"] = c.oracle_gap ? json(*c.oracle_gap) : json(nullptr);
    if (c.psd_min) {
        j["psd_min"] = *c.psd_min;
    }
    j["verdict"] = to_string(c.verdict);
    return j;
}

Vector load_solution(const std::string& path)
{
    const json j = read_json_file(path);
    if (!j.contains("x") || !j.at("x").is_array()) {
        throw std::runtime_error(path + ": no 'x' array");
    }
    return j.at("x").get<Vector>();
}

CsvTrace::CsvTrace(std::ostream& out) : out_(&out)
{
    *out_ << "k,obj,primal_residual,nrmG,lagrangian\n";
}

IterationObserver CsvTrace::observer()
{
    return [out = out_](const IterationRecord& r) {
        *out << r.k << ',' << format_sig(r.objective, 10) << ',' << format_sig(r.primal_residual) << ','
             << format_sig(r.nrmG) << ',' << format_sig(r.lagrangian, 10) << '\n';
    };
}

std::string format_sig(double v, int digits)
{
    if (std::isnan(v)) {
        return "nan";
    }
    std::ostringstream s;
    s << std::setprecision(digits) << v;
    return s.str();
}

}  // namespace qsphere
