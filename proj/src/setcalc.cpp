#include "zb/setcalc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "zb/conic.hpp"
#include "zb/error.hpp"

namespace zb {

namespace {

constexpr double kMembershipTol = 1e-8;

Eigen::MatrixXd prune_zero_columns(const Eigen::MatrixXd& G)
{
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < G.cols(); ++j)
        if (G.col(j).cwiseAbs().maxCoeff() > 0.0) keep.push_back(j);
    if (static_cast<Eigen::Index>(keep.size()) == G.cols()) return G;
    Eigen::MatrixXd out(G.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = G.col(keep[k]);
    return out;
}

} // namespace

Zonotope::Zonotope(Eigen::VectorXd center) : center_(std::move(center)), generators_(center_.size(), 0) {}

Zonotope::Zonotope(Eigen::VectorXd center, Eigen::MatrixXd generators) : center_(std::move(center))
{
    require_dims(generators.rows() == center_.size() || generators.cols() == 0,
                 "zonotope: generator rows must equal center length");
    generators_ = generators.cols() == 0 ? Eigen::MatrixXd(center_.size(), 0) : prune_zero_columns(generators);
}

Eigen::VectorXd Zonotope::point(const Eigen::VectorXd& beta) const
{
    require_dims(beta.size() == num_generators(), "zonotope point: beta length mismatch");
    return center_ + generators_ * beta;
}

MatrixZonotope::MatrixZonotope(Eigen::MatrixXd center) : center_(std::move(center)) {}

MatrixZonotope::MatrixZonotope(Eigen::MatrixXd center, std::vector<Eigen::MatrixXd> generators)
    : center_(std::move(center))
{
    for (auto& g : generators) {
        require_dims(g.rows() == center_.rows() && g.cols() == center_.cols(),
                     "matrix zonotope: generator shape differs from center");
        if (g.size() > 0 && g.cwiseAbs().maxCoeff() > 0.0) generators_.push_back(std::move(g));
    }
}

Eigen::MatrixXd MatrixZonotope::member(const Eigen::VectorXd& beta) const
{
    require_dims(beta.size() == static_cast<Eigen::Index>(generators_.size()), "matrix zonotope member: beta length mismatch");
    Eigen::MatrixXd M = center_;
    for (std::size_t i = 0; i < generators_.size(); ++i) M += beta[static_cast<Eigen::Index>(i)] * generators_[i];
    return M;
}

IntervalMatrix::IntervalMatrix(Eigen::MatrixXd lower, Eigen::MatrixXd upper)
    : lower_(std::move(lower)), upper_(std::move(upper))
{
    require_dims(lower_.rows() == upper_.rows() && lower_.cols() == upper_.cols(), "interval matrix: bound shapes differ");
    if ((lower_.array() > upper_.array()).any()) throw InvalidInput("interval matrix: lower bound exceeds upper bound");
}

bool IntervalMatrix::contains(const Eigen::MatrixXd& M, double slack) const
{
    require_dims(M.rows() == rows() && M.cols() == cols(), "interval matrix contains: shape mismatch");
    return (M.array() >= lower_.array() - slack).all() && (M.array() <= upper_.array() + slack).all();
}

Box::Box(Eigen::VectorXd lower, Eigen::VectorXd upper) : lower_(std::move(lower)), upper_(std::move(upper))
{
    require_dims(lower_.size() == upper_.size(), "box: bound lengths differ");
    if ((lower_.array() > upper_.array()).any()) throw InvalidInput("box: lower bound exceeds upper bound");
}

bool Box::contains(const Eigen::VectorXd& x, double slack) const
{
    require_dims(x.size() == dim(), "box contains: dimension mismatch");
    return (x.array() >= lower_.array() - slack).all() && (x.array() <= upper_.array() + slack).all();
}

bool Box::contains(const Box& o) const
{
    require_dims(o.dim() == dim(), "box contains: dimension mismatch");
    return (o.lower_.array() >= lower_.array()).all() && (o.upper_.array() <= upper_.array()).all();
}

bool Box::intersects(const Box& o) const
{
    require_dims(o.dim() == dim(), "box intersects: dimension mismatch");
    return (o.lower_.array() <= upper_.array()).all() && (lower_.array() <= o.upper_.array()).all();
}

double Box::volume() const { return (upper_ - lower_).prod(); }

Zonotope Box::to_zonotope() const { return Zonotope(center(), Eigen::MatrixXd(radius().asDiagonal())); }

Zonotope linear_map(const Eigen::MatrixXd& L, const Zonotope& Z)
{
    require_dims(L.cols() == Z.dim(), "linear map: matrix columns must equal zonotope dimension");
    return Zonotope(L * Z.center(), L * Z.generators());
}

Zonotope minkowski_sum(const Zonotope& a, const Zonotope& b)
{
    require_dims(a.dim() == b.dim(), "minkowski sum: dimension mismatch");
    Eigen::MatrixXd G(a.dim(), a.num_generators() + b.num_generators());
    G << a.generators(), b.generators();
    return Zonotope(a.center() + b.center(), std::move(G));
}

Zonotope cartesian_product(const Zonotope& a, const Zonotope& b)
{
    Eigen::VectorXd c(a.dim() + b.dim());
    c << a.center(), b.center();
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(c.size(), a.num_generators() + b.num_generators());
    G.topLeftCorner(a.dim(), a.num_generators()) = a.generators();
    G.bottomRightCorner(b.dim(), b.num_generators()) = b.generators();
    return Zonotope(std::move(c), std::move(G));
}

Box interval_hull(const Zonotope& Z)
{
    const Eigen::VectorXd r = Z.generators().cwiseAbs().rowwise().sum();
    return Box(Z.center() - r, Z.center() + r);
}

IntervalMatrix to_interval(const MatrixZonotope& M)
{
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(M.rows(), M.cols());
    for (const auto& g : M.generators()) r += g.cwiseAbs();
    return IntervalMatrix(M.center() - r, M.center() + r);
}

Zonotope matzono_times_zono(const MatrixZonotope& M, const Zonotope& Z)
{
    require_dims(M.cols() == Z.dim(), "matrix zonotope product: column count must equal zonotope dimension");
    const Eigen::Index gz = Z.num_generators();
    const auto gm = static_cast<Eigen::Index>(M.num_generators());
    Eigen::MatrixXd G(M.rows(), gz + gm * (1 + gz));
    G.leftCols(gz) = M.center() * Z.generators();
    Eigen::Index col = gz;
    for (const auto& Gi : M.generators()) {
        G.col(col++) = Gi * Z.center();
        G.middleCols(col, gz) = Gi * Z.generators();
        col += gz;
    }
    return Zonotope(M.center() * Z.center(), std::move(G));
}

Zonotope reduce_order(const Zonotope& Z, Eigen::Index max_generators)
{
    if (max_generators < Z.dim()) throw InvalidInput("reduce_order: max_generators must be at least the dimension");
    if (Z.num_generators() <= max_generators) return Z;

    const Eigen::MatrixXd& G = Z.generators();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(G.cols()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::vector<double> score(order.size());
    for (Eigen::Index j = 0; j < G.cols(); ++j)
        score[static_cast<std::size_t>(j)] = G.col(j).lpNorm<1>() - G.col(j).lpNorm<Eigen::Infinity>();
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return score[static_cast<std::size_t>(a)] > score[static_cast<std::size_t>(b)]; });

    const Eigen::Index keep = max_generators - Z.dim();
    Eigen::VectorXd boxed = Eigen::VectorXd::Zero(Z.dim());
    for (std::size_t k = static_cast<std::size_t>(keep); k < order.size(); ++k) boxed += G.col(order[k]).cwiseAbs();

    // kept generators stay in their original relative order
    std::vector<Eigen::Index> kept(order.begin(), order.begin() + keep);
    std::sort(kept.begin(), kept.end());
    Eigen::MatrixXd out(Z.dim(), keep + Z.dim());
    for (Eigen::Index k = 0; k < keep; ++k) out.col(k) = G.col(kept[static_cast<std::size_t>(k)]);
    out.rightCols(Z.dim()) = boxed.asDiagonal();
    return Zonotope(Z.center(), std::move(out));
}

std::vector<Polynomial> box_to_polys(const Box& box, std::span<const std::size_t> vars, std::size_t num_vars)
{
    require_dims(static_cast<Eigen::Index>(vars.size()) == box.dim(), "box_to_polys: one variable per box coordinate required");
    std::vector<Polynomial> out;
    out.reserve(2 * vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i) {
        Polynomial p = Polynomial::variable(num_vars, vars[i]);
        p += Polynomial::constant(num_vars, -box.lower()[static_cast<Eigen::Index>(i)]);
        out.push_back(std::move(p));
    }
    for (std::size_t i = 0; i < vars.size(); ++i) {
        Polynomial p = Polynomial::constant(num_vars, box.upper()[static_cast<Eigen::Index>(i)]);
        p -= Polynomial::variable(num_vars, vars[i]);
        out.push_back(std::move(p));
    }
    return out;
}

MembershipResult contains_point(const Zonotope& Z, const Eigen::VectorXd& x)
{
    require_dims(x.size() == Z.dim(), "contains_point: dimension mismatch");
    MembershipResult res;
    const Eigen::VectorXd rhs = x - Z.center();
    const Eigen::Index gamma = Z.num_generators();

    if (!interval_hull(Z).contains(x, kMembershipTol)) {
        res.verdict = Membership::outside;
        return res;
    }
    if (gamma == 0) {
        res.residual = rhs.cwiseAbs().maxCoeff();
        res.verdict = res.residual <= kMembershipTol ? Membership::inside : Membership::outside;
        res.witness = Eigen::VectorXd(0);
        return res;
    }

    const Eigen::MatrixXd& G = Z.generators();
    // restrict the equations to range(G); a component outside it is a definite miss
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(G);
    qr.setThreshold(1e-12);
    const Eigen::Index rank = qr.rank();
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(G.rows(), rank);
    const Eigen::VectorXd off_range = rhs - Q * (Q.transpose() * rhs);
    if (off_range.cwiseAbs().maxCoeff() > kMembershipTol) {
        res.verdict = Membership::outside;
        return res;
    }
    const Eigen::MatrixXd Gr = Q.transpose() * G;
    const Eigen::VectorXd rr = Q.transpose() * rhs;

    // beta = r (2t - 1), t + s = 1, t, s >= 0, with r = 1 + tol
    const double r = 1.0 + kMembershipTol;
    SdpProblem lp;
    lp.blocks = {{static_cast<int>(2 * gamma), ConeKind::nonneg}};
    lp.b.resize(rank + gamma);
    for (Eigen::Index i = 0; i < rank; ++i) {
        std::vector<Entry> row;
        for (Eigen::Index j = 0; j < gamma; ++j)
            if (Gr(i, j) != 0.0) row.push_back({0, static_cast<int>(j), static_cast<int>(j), 2.0 * r * Gr(i, j)});
        lp.constraints.push_back(std::move(row));
        lp.b[i] = rr[i] + r * Gr.row(i).sum();
    }
    for (Eigen::Index j = 0; j < gamma; ++j) {
        const int t = static_cast<int>(j), s = static_cast<int>(gamma + j);
        lp.constraints.push_back({{0, t, t, 1.0}, {0, s, s, 1.0}});
        lp.b[rank + j] = 1.0;
    }

    SolverOptions opt;
    opt.primal_tol = opt.dual_tol = opt.gap_tol = 1e-10;
    opt.infeasibility_tol = 1e-9;
    const SdpSolution sol = solve(lp, opt);

    if (sol.status == SdpStatus::infeasible) {
        res.verdict = Membership::outside;
        return res;
    }
    if (sol.status != SdpStatus::feasible) {
        res.verdict = Membership::indeterminate;
        return res;
    }
    Eigen::VectorXd beta = r * (2.0 * sol.X[0].col(0).head(gamma).array() - 1.0).matrix();
    Eigen::VectorXd resid = rhs - G * beta;
    if (resid.cwiseAbs().maxCoeff() > kMembershipTol) {
        // least-norm polish of the equation residual
        beta += G.completeOrthogonalDecomposition().solve(resid);
        resid = rhs - G * beta;
    }
    res.witness = beta;
    res.residual = resid.cwiseAbs().maxCoeff();
    const bool in_bounds = beta.cwiseAbs().maxCoeff() <= 1.0 + kMembershipTol + 1e-12;
    res.verdict = (res.residual <= kMembershipTol && in_bounds) ? Membership::inside : Membership::indeterminate;
    return res;
}

Zonotope flatten(const MatrixZonotope& M)
{
    const Eigen::Index n = M.rows() * M.cols();
    Eigen::MatrixXd G(n, static_cast<Eigen::Index>(M.num_generators()));
    for (std::size_t i = 0; i < M.num_generators(); ++i)
        G.col(static_cast<Eigen::Index>(i)) = M.generators()[i].reshaped();
    return Zonotope(M.center().reshaped(), std::move(G));
}

MembershipResult contains_matrix(const MatrixZonotope& M, const Eigen::MatrixXd& X)
{
    require_dims(X.rows() == M.rows() && X.cols() == M.cols(), "contains_matrix: shape mismatch");
    if (!to_interval(M).contains(X, kMembershipTol)) {
        MembershipResult res;
        res.verdict = Membership::outside;
        return res;
    }
    return contains_point(flatten(M), X.reshaped());
}

} // namespace zb
