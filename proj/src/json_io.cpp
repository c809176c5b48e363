#include "zb/json_io.hpp"

#include <fstream>
#include <sstream>

#include "zb/error.hpp"

namespace zb {

namespace {

InvalidInput bad(const std::string& where, const std::string& what) { return InvalidInput(where + ": " + what); }

double number(const Json& j, const std::string& where)
{
    if (!j.is_number()) throw bad(where, "expected a number");
    return j.get<double>();
}

const Json& field(const Json& j, const char* key, const std::string& where)
{
    if (!j.is_object()) throw bad(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw bad(where, std::string("missing field '") + key + "'");
    return *it;
}

} // namespace

Json to_json(const Eigen::MatrixXd& M)
{
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        Json r = Json::array();
        for (Eigen::Index k = 0; k < M.cols(); ++k) r.push_back(M(i, k));
        rows.push_back(std::move(r));
    }
    return rows;
}

Json to_json_vector(const Eigen::VectorXd& v)
{
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Eigen::VectorXd vector_from_json(const Json& j, const std::string& where)
{
    if (!j.is_array()) throw bad(where, "expected an array of numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], where + "/" + std::to_string(i));
    return v;
}

Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& where)
{
    if (!j.is_array()) throw bad(where, "expected an array of rows");
    if (j.empty()) return Eigen::MatrixXd(0, 0);
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    Eigen::MatrixXd M(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string w = where + "/" + std::to_string(i);
        if (!j[i].is_array() || j[i].size() != cols) throw bad(w, "rows must be arrays of equal length");
        for (std::size_t k = 0; k < cols; ++k)
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = number(j[i][k], w + "/" + std::to_string(k));
    }
    return M;
}

Json to_json(const Zonotope& Z)
{
    Json gens = Json::array();
    for (Eigen::Index k = 0; k < Z.num_generators(); ++k) gens.push_back(to_json_vector(Z.generators().col(k)));
    return Json{{"center", to_json_vector(Z.center())}, {"generators", std::move(gens)}};
}

Zonotope zonotope_from_json(const Json& j, const std::string& where)
{
    const Eigen::VectorXd c = vector_from_json(field(j, "center", where), where + "/center");
    const Json& g = field(j, "generators", where);
    if (!g.is_array()) throw bad(where + "/generators", "expected an array of columns");
    Eigen::MatrixXd G(c.size(), static_cast<Eigen::Index>(g.size()));
    for (std::size_t k = 0; k < g.size(); ++k) {
        const std::string w = where + "/generators/" + std::to_string(k);
        const Eigen::VectorXd col = vector_from_json(g[k], w);
        if (col.size() != c.size()) throw bad(w, "generator length differs from the center");
        G.col(static_cast<Eigen::Index>(k)) = col;
    }
    return Zonotope(c, G);
}

Json to_json(const MatrixZonotope& M)
{
    Json gens = Json::array();
    for (const auto& G : M.generators()) gens.push_back(to_json(G));
    return Json{{"center", to_json(M.center())}, {"generators", std::move(gens)}};
}

MatrixZonotope matrix_zonotope_from_json(const Json& j, const std::string& where)
{
    const Eigen::MatrixXd C = matrix_from_json(field(j, "center", where), where + "/center");
    const Json& g = field(j, "generators", where);
    if (!g.is_array()) throw bad(where + "/generators", "expected an array of matrices");
    std::vector<Eigen::MatrixXd> gens;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const std::string w = where + "/generators/" + std::to_string(k);
        Eigen::MatrixXd G = matrix_from_json(g[k], w);
        if (G.rows() != C.rows() || G.cols() != C.cols()) throw bad(w, "generator shape differs from the center");
        gens.push_back(std::move(G));
    }
    return MatrixZonotope(C, std::move(gens));
}

Json to_json(const Box& b) { return Json{{"lower", to_json_vector(b.lower())}, {"upper", to_json_vector(b.upper())}}; }

Box box_from_json(const Json& j, const std::string& where)
{
    const Eigen::VectorXd lo = vector_from_json(field(j, "lower", where), where + "/lower");
    const Eigen::VectorXd hi = vector_from_json(field(j, "upper", where), where + "/upper");
    if (lo.size() != hi.size()) throw bad(where, "lower and upper differ in length");
    try {
        return Box(lo, hi);
    } catch (const std::exception& e) {
        throw bad(where, e.what());
    }
}

Json to_json(const IntervalMatrix& M) { return Json{{"lower", to_json(M.lower())}, {"upper", to_json(M.upper())}}; }

IntervalMatrix interval_matrix_from_json(const Json& j, const std::string& where)
{
    const Eigen::MatrixXd lo = matrix_from_json(field(j, "lower", where), where + "/lower");
    const Eigen::MatrixXd hi = matrix_from_json(field(j, "upper", where), where + "/upper");
    if (lo.rows() != hi.rows() || lo.cols() != hi.cols()) throw bad(where, "lower and upper differ in shape");
    try {
        return IntervalMatrix(lo, hi);
    } catch (const std::exception& e) {
        throw bad(where, e.what());
    }
}

Json to_json(const Polynomial& p)
{
    Json terms = Json::array();
    for (const auto& [m, c] : p.terms()) terms.push_back(Json{{"exponents", m.exponents()}, {"coeff", c}});
    return terms;
}

Polynomial polynomial_from_json(const Json& j, std::size_t num_vars, const std::string& where)
{
    if (!j.is_array()) throw bad(where, "expected an array of terms");
    Polynomial p(num_vars);
    for (std::size_t k = 0; k < j.size(); ++k) {
        const std::string w = where + "/" + std::to_string(k);
        const Json& e = field(j[k], "exponents", w);
        if (!e.is_array() || e.size() != num_vars) throw bad(w + "/exponents", "expected " + std::to_string(num_vars) + " exponents");
        std::vector<int> exps;
        for (const auto& x : e) {
            if (!x.is_number_integer() || x.get<int>() < 0) throw bad(w + "/exponents", "exponents must be nonnegative integers");
            exps.push_back(x.get<int>());
        }
        p.add_term(Monomial(std::move(exps)), number(field(j[k], "coeff", w), w + "/coeff"));
    }
    return p;
}

Json to_json(const ModelSet& ms)
{
    return Json{{"matrix_zonotope", to_json(ms.mz)},
                {"A_c", to_json(ms.A_c)},
                {"B_c", to_json(ms.B_c)},
                {"interval", to_json(ms.interval)},
                {"disturbance", to_json(ms.disturbance)}};
}

ModelSet model_set_from_json(const Json& j, const std::string& where)
{
    ModelSet ms;
    ms.mz = matrix_zonotope_from_json(field(j, "matrix_zonotope", where), where + "/matrix_zonotope");
    const Eigen::Index nx = ms.mz.rows();
    if (ms.mz.cols() <= nx) throw bad(where + "/matrix_zonotope", "expected n_x x (n_x + n_u) members");
    ms.A_c = ms.mz.center().leftCols(nx);
    ms.B_c = ms.mz.center().rightCols(ms.mz.cols() - nx);
    ms.interval = to_interval(ms.mz);
    ms.disturbance = zonotope_from_json(field(j, "disturbance", where), where + "/disturbance");
    if (ms.disturbance.dim() != nx) throw bad(where + "/disturbance", "dimension differs from n_x");
    return ms;
}

Json solver_stats_json(const SdpSolution& sol)
{
    return Json{{"status", to_string(sol.status)},
                {"iterations", sol.iterations},
                {"primal_objective", sol.primal_objective},
                {"dual_objective", sol.dual_objective},
                {"primal_residual", sol.primal_residual},
                {"dual_residual", sol.dual_residual},
                {"gap", sol.gap},
                {"infeasibility_residual", sol.infeasibility_residual},
                {"min_eigenvalue", sol.min_eigenvalue},
                {"message", sol.message}};
}

Json read_json_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InvalidInput(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace zb
