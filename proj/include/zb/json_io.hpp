#ifndef ZB_JSON_IO_HPP
#define ZB_JSON_IO_HPP

#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "json.hpp"
#include "zb/conic.hpp"
#include "zb/polynomial.hpp"
#include "zb/setcalc.hpp"
#include "zb/sysid.hpp"

namespace zb {

using Json = nlohmann::ordered_json;

// Matrices are row-major nested arrays, vectors flat arrays. Readers throw
// InvalidInput naming `where` (a JSON-pointer-like path) on malformed input.

Json to_json(const Eigen::MatrixXd& M);
Json to_json_vector(const Eigen::VectorXd& v);
Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& where);
Eigen::VectorXd vector_from_json(const Json& j, const std::string& where);

/// {"center": [...], "generators": [[column], ...]}
Json to_json(const Zonotope& Z);
Zonotope zonotope_from_json(const Json& j, const std::string& where);

/// {"center": matrix, "generators": [matrix, ...]}
Json to_json(const MatrixZonotope& M);
MatrixZonotope matrix_zonotope_from_json(const Json& j, const std::string& where);

/// {"lower": ..., "upper": ...}
Json to_json(const Box& b);
Box box_from_json(const Json& j, const std::string& where);
Json to_json(const IntervalMatrix& M);
IntervalMatrix interval_matrix_from_json(const Json& j, const std::string& where);

/// [{"exponents": [...], "coeff": c}, ...] in graded-lex order.
Json to_json(const Polynomial& p);
Polynomial polynomial_from_json(const Json& j, std::size_t num_vars, const std::string& where);

Json to_json(const ModelSet& ms);
ModelSet model_set_from_json(const Json& j, const std::string& where);

/// Status and statistics only; primal blocks are omitted.
Json solver_stats_json(const SdpSolution& sol);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace zb

#endif
