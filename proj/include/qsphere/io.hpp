#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "qsphere/discretize.hpp"
#include "qsphere/report.hpp"
#include "qsphere/verify.hpp"

namespace qsphere {

/// MatrixMarket "coordinate real symmetric": lower triangle, 1-based.
void write_matrix_market(std::ostream& out, const SparseSymmetricMatrix& A);
/// Accepts symmetric or general coordinate real files; general files must
/// hold a symmetric matrix.
SparseSymmetricMatrix read_matrix_market(std::istream& in);

/// Writes `json_path` (alpha, n, metadata, matrix) and the MatrixMarket file
/// it names, placed next to it.
void save_problem(const Problem& p, const std::string& json_path);
/// Relative matrix paths resolve against the JSON file's directory.
/// `validate` = false skips the structure checks.
Problem load_problem(const std::string& json_path, bool validate = true);

/// Keys dim, N, beta, gammas, domain ([[a, b], ...]).
BecSpec bec_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BecSpec& s);

nlohmann::json to_json(const SolveReport& r, bool include_x = true);
nlohmann::json to_json(const Certificate& c);

/// Reads a JSON object with an "x" array (a solve report qualifies).
Vector load_solution(const std::string& path);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

/// Streams IterationRecords as CSV rows k,obj,primal,nrmG,lagrangian.
class CsvTrace {
public:
    explicit CsvTrace(std::ostream& out);
    IterationObserver observer();

private:
    std::ostream* out_;
};

/// Fixed 6-significant-digit rendering; NaN becomes "nan".
std::string format_sig(double v, int digits = 6);

}  // namespace qsphere
