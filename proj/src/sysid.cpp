#include "zb/sysid.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "zb/random.hpp"

namespace zb {

void TrueSystem::validate() const
{
    require_dims(A.rows() == A.cols(), "true system: A must be square");
    require_dims(B.rows() == A.rows(), "true system: B must have n_x rows");
    require_dims(noise.dim() == A.rows(), "true system: noise zonotope must have dimension n_x");
    if (contains_point(noise, Eigen::VectorXd::Zero(n_x())).verdict != Membership::inside)
        throw InvalidInput("true system: noise zonotope must contain the origin");
}

Trajectory simulate(const TrueSystem& sys, const Eigen::VectorXd& x0, const Eigen::MatrixXd& inputs,
                    std::uint64_t seed)
{
    require_dims(x0.size() == sys.n_x(), "simulate: initial state length must be n_x");
    require_dims(inputs.rows() == sys.n_u(), "simulate: inputs must have n_u rows");
    const Eigen::Index L = inputs.cols();
    Rng rng(seed);
    Trajectory tr;
    tr.inputs = inputs;
    tr.states.resize(sys.n_x(), L + 1);
    tr.noise.resize(sys.n_x(), L);
    tr.states.col(0) = x0;
    for (Eigen::Index k = 0; k < L; ++k) {
        tr.noise.col(k) = sys.noise.point(uniform_beta(rng, sys.noise.num_generators()));
        tr.states.col(k + 1) = sys.A * tr.states.col(k) + sys.B * inputs.col(k) + tr.noise.col(k);
    }
    return tr;
}

Eigen::MatrixXd DataSet::D_minus() const
{
    Eigen::MatrixXd D(n_x() + n_u(), T());
    D << X_minus, U_minus;
    return D;
}

DataSet assemble(const std::vector<Trajectory>& trajectories, std::uint64_t seed)
{
    if (trajectories.empty()) throw InvalidInput("assemble: no trajectories");
    const Eigen::Index nx = trajectories.front().states.rows(), nu = trajectories.front().inputs.rows();
    Eigen::Index T = 0;
    for (const auto& tr : trajectories) {
        require_dims(tr.states.rows() == nx && tr.inputs.rows() == nu, "assemble: trajectories disagree on dimensions");
        require_dims(tr.states.cols() == tr.inputs.cols() + 1,
                     "assemble: each state sequence must be one longer than its input sequence");
        T += tr.inputs.cols();
    }
    if (T == 0) throw InvalidInput("assemble: no transitions");
    DataSet ds;
    ds.seed = seed;
    ds.X_plus.resize(nx, T);
    ds.X_minus.resize(nx, T);
    ds.U_minus.resize(nu, T);
    Eigen::Index col = 0;
    for (std::size_t t = 0; t < trajectories.size(); ++t) {
        const auto& tr = trajectories[t];
        const Eigen::Index L = tr.inputs.cols();
        if (t > 0) ds.boundaries.push_back(col);
        ds.X_minus.middleCols(col, L) = tr.states.leftCols(L);
        ds.X_plus.middleCols(col, L) = tr.states.rightCols(L);
        ds.U_minus.middleCols(col, L) = tr.inputs;
        col += L;
    }
    return ds;
}

RankReport check_rank(const Eigen::MatrixXd& D)
{
    RankReport r;
    if (D.size() == 0) return r;
    r.singular_values = Eigen::JacobiSVD<Eigen::MatrixXd>(D).singularValues();
    const double cut = 1e-10 * r.singular_values[0];
    for (Eigen::Index i = 0; i < r.singular_values.size(); ++i)
        if (r.singular_values[i] > cut) ++r.rank;
    r.full_row_rank = r.singular_values[0] > 0.0 && r.rank == D.rows();
    return r;
}

Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& D)
{
    const RankReport rr = check_rank(D);
    if (!rr.full_row_rank) {
        std::ostringstream os;
        os << "pseudoinverse: matrix lacks full row rank (rank " << rr.rank << " of " << D.rows() << ")";
        throw RankDeficientError(os.str(), rr.singular_values);
    }
    const Eigen::MatrixXd DDt = D * D.transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(DDt);
    if (llt.info() == Eigen::Success && llt.rcond() > 1e-8) return llt.solve(D).transpose();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(D, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd inv = svd.singularValues().cwiseInverse();
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

MatrixZonotope noise_matrix_zonotope(const Zonotope& Zw, Eigen::Index T)
{
    if (T < 1) throw InvalidInput("noise matrix zonotope: T must be positive");
    const Eigen::Index n = Zw.dim();
    Eigen::MatrixXd C = Zw.center().replicate(1, T);
    std::vector<Eigen::MatrixXd> gens;
    gens.reserve(static_cast<std::size_t>(T * Zw.num_generators()));
    for (Eigen::Index k = 0; k < T; ++k)
        for (Eigen::Index i = 0; i < Zw.num_generators(); ++i) {
            Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, T);
            G.col(k) = Zw.generators().col(i);
            gens.push_back(std::move(G));
        }
    return MatrixZonotope(std::move(C), std::move(gens));
}

IntervalMatrix ModelSet::interval_A() const
{
    return IntervalMatrix(interval.lower().leftCols(n_x()), interval.upper().leftCols(n_x()));
}

IntervalMatrix ModelSet::interval_B() const
{
    return IntervalMatrix(interval.lower().rightCols(n_u()), interval.upper().rightCols(n_u()));
}

ModelSet identify(const DataSet& ds, const Zonotope& Zw, const Box& Zx, const Box& Zu)
{
    const Eigen::Index nx = ds.n_x(), nu = ds.n_u();
    require_dims(ds.X_plus.rows() == nx && ds.X_plus.cols() == ds.T() && ds.U_minus.cols() == ds.T(),
                 "identify: data matrices disagree on shape");
    require_dims(Zw.dim() == nx, "identify: noise zonotope must have dimension n_x");
    require_dims(Zx.dim() == nx && Zu.dim() == nu, "identify: state/input domains must match the data dimensions");

    const Eigen::MatrixXd Dp = pseudoinverse(ds.D_minus());  // throws on rank failure
    const Eigen::MatrixXd center = (ds.X_plus - Zw.center().replicate(1, ds.T())) * Dp;

    // -G_{w,(k,i)} D^+ is the outer product -g_i (row k of D^+)
    std::vector<Eigen::MatrixXd> gens;
    gens.reserve(static_cast<std::size_t>(ds.T() * Zw.num_generators()));
    for (Eigen::Index k = 0; k < ds.T(); ++k)
        for (Eigen::Index i = 0; i < Zw.num_generators(); ++i)
            gens.push_back(-Zw.generators().col(i) * Dp.row(k));

    ModelSet ms;
    ms.mz = MatrixZonotope(center, std::move(gens));
    ms.A_c = center.leftCols(nx);
    ms.B_c = center.rightCols(nu);
    ms.interval = to_interval(ms.mz);
    const MatrixZonotope generator_part(Eigen::MatrixXd::Zero(nx, nx + nu), ms.mz.generators());
    const Zonotope xu = cartesian_product(Zx.to_zonotope(), Zu.to_zonotope());
    ms.disturbance = minkowski_sum(matzono_times_zono(generator_part, xu), Zw);
    return ms;
}

namespace {

void write_csv(const Eigen::MatrixXd& M, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    char buf[40];
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", M(i, j));
            out << (j ? "," : "") << buf;
        }
        out << '\n';
    }
}

Eigen::MatrixXd read_csv(const std::filesystem::path& path, Eigen::Index rows, Eigen::Index cols)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    Eigen::MatrixXd M(rows, cols);
    std::string line;
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (!std::getline(in, line)) throw InvalidInput(path.string() + ": too few rows");
        std::istringstream ls(line);
        std::string cell;
        for (Eigen::Index j = 0; j < cols; ++j) {
            if (!std::getline(ls, cell, ',')) throw InvalidInput(path.string() + ": too few columns");
            M(i, j) = std::stod(cell);
        }
    }
    return M;
}

} // namespace

void write_dataset(const DataSet& ds, const std::string& dir)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    write_csv(ds.X_plus, fs::path(dir) / "X_plus.csv");
    write_csv(ds.X_minus, fs::path(dir) / "X_minus.csv");
    write_csv(ds.U_minus, fs::path(dir) / "U_minus.csv");
    nlohmann::json m;
    m["n_x"] = ds.n_x();
    m["n_u"] = ds.n_u();
    m["T"] = ds.T();
    m["seed"] = ds.seed;
    m["boundaries"] = ds.boundaries;
    std::ofstream(fs::path(dir) / "manifest.json") << m.dump(2) << '\n';
}

DataSet read_dataset(const std::string& dir)
{
    namespace fs = std::filesystem;
    std::ifstream in(fs::path(dir) / "manifest.json");
    if (!in) throw std::runtime_error("cannot open manifest in '" + dir + "'");
    const auto m = nlohmann::json::parse(in);
    const auto nx = m.at("n_x").get<Eigen::Index>(), nu = m.at("n_u").get<Eigen::Index>(), T = m.at("T").get<Eigen::Index>();
    DataSet ds;
    ds.seed = m.at("seed").get<std::uint64_t>();
    ds.boundaries = m.at("boundaries").get<std::vector<Eigen::Index>>();
    ds.X_plus = read_csv(fs::path(dir) / "X_plus.csv", nx, T);
    ds.X_minus = read_csv(fs::path(dir) / "X_minus.csv", nx, T);
    ds.U_minus = read_csv(fs::path(dir) / "U_minus.csv", nu, T);
    return ds;
}

} // namespace zb
