#include "zb/conic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "zb/error.hpp"

namespace zb {

int SdpProblem::cone_dimension() const
{
    int n = 0;
    for (const auto& blk : blocks) n += blk.size;
    return n;
}

namespace {

void validate_entry(const Entry& e, const std::vector<Block>& blocks, const char* where)
{
    if (e.block < 0 || e.block >= static_cast<int>(blocks.size()))
        throw InvalidInput(std::string(where) + ": entry block index out of range");
    const Block& blk = blocks[static_cast<std::size_t>(e.block)];
    if (e.row < 0 || e.col < 0 || e.row >= blk.size || e.col >= blk.size)
        throw InvalidInput(std::string(where) + ": entry position out of range");
    if (e.row > e.col) throw InvalidInput(std::string(where) + ": entries must be upper-triangular (row <= col)");
    if (blk.kind == ConeKind::nonneg && e.row != e.col)
        throw InvalidInput(std::string(where) + ": off-diagonal entry in a nonnegative block");
    if (!std::isfinite(e.value)) throw InvalidInput(std::string(where) + ": non-finite coefficient");
}

} // namespace

void SdpProblem::validate() const
{
    for (const auto& blk : blocks)
        if (blk.size <= 0) throw InvalidInput("sdp: block sizes must be positive");
    if (b.size() != static_cast<Eigen::Index>(constraints.size()))
        throw InvalidInput("sdp: right-hand side length differs from constraint count");
    if (!b.allFinite()) throw InvalidInput("sdp: non-finite right-hand side");
    for (const auto& e : objective) validate_entry(e, blocks, "objective");
    for (const auto& row : constraints)
        for (const auto& e : row) validate_entry(e, blocks, "constraint");
}

bool operator==(const SdpProblem& a, const SdpProblem& b)
{
    if (a.blocks.size() != b.blocks.size()) return false;
    for (std::size_t k = 0; k < a.blocks.size(); ++k)
        if (a.blocks[k].size != b.blocks[k].size || a.blocks[k].kind != b.blocks[k].kind) return false;
    if (a.b.size() != b.b.size()) return false;
    for (Eigen::Index i = 0; i < a.b.size(); ++i)
        if (std::memcmp(&a.b[i], &b.b[i], sizeof(double)) != 0) return false;
    return a.objective == b.objective && a.constraints == b.constraints;
}

std::string to_string(SdpStatus s)
{
    switch (s) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::feasible: return "feasible";
    case SdpStatus::infeasible: return "infeasible";
    case SdpStatus::indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

SolverOptions SolverOptions::from_key_values(const std::map<std::string, std::string>& kv)
{
    SolverOptions o;
    for (const auto& [key, value] : kv) {
        try {
            if (key == "primal_tol") o.primal_tol = std::stod(value);
            else if (key == "dual_tol") o.dual_tol = std::stod(value);
            else if (key == "gap_tol") o.gap_tol = std::stod(value);
            else if (key == "infeasibility_tol") o.infeasibility_tol = std::stod(value);
            else if (key == "max_iterations") o.max_iterations = std::stoi(value);
            else if (key == "step_fraction") o.step_fraction = std::stod(value);
            else if (key == "max_constraints") o.max_constraints = std::stoi(value);
            else if (key == "verbose") o.verbose = (value == "1" || value == "true");
            else throw InvalidInput("solver option: unknown key '" + key + "'");
        } catch (const std::logic_error& e) {
            if (dynamic_cast<const InvalidInput*>(&e)) throw;
            throw InvalidInput("solver option: cannot parse value '" + value + "' for key '" + key + "'");
        }
    }
    if (o.max_iterations < 1) throw InvalidInput("solver option: max_iterations must be >= 1");
    if (!(o.step_fraction > 0.0 && o.step_fraction < 1.0)) throw InvalidInput("solver option: step_fraction must be in (0,1)");
    return o;
}

std::map<std::string, std::string> SolverOptions::to_key_values() const
{
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    return {{"primal_tol", num(primal_tol)},         {"dual_tol", num(dual_tol)},
            {"gap_tol", num(gap_tol)},               {"infeasibility_tol", num(infeasibility_tol)},
            {"max_iterations", std::to_string(max_iterations)}, {"step_fraction", num(step_fraction)},
            {"max_constraints", std::to_string(max_constraints)}, {"verbose", verbose ? "true" : "false"}};
}

double apply_constraint(const std::vector<Entry>& entries, const std::vector<Eigen::MatrixXd>& X,
                        const std::vector<Block>& blocks)
{
    double s = 0.0;
    for (const auto& e : entries) {
        const auto& Xk = X[static_cast<std::size_t>(e.block)];
        if (blocks[static_cast<std::size_t>(e.block)].kind == ConeKind::nonneg) s += e.value * Xk(e.row, 0);
        else s += e.value * (e.row == e.col ? Xk(e.row, e.col) : Xk(e.row, e.col) + Xk(e.col, e.row));
    }
    return s;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Primal/dual iterate in the solver's internal layout: PSD blocks as dense
// matrices, all nonnegative blocks concatenated into one vector.
struct BlockVec {
    std::vector<MatrixXd> psd;
    VectorXd lp;

    BlockVec& operator+=(const BlockVec& o)
    {
        for (std::size_t k = 0; k < psd.size(); ++k) psd[k] += o.psd[k];
        lp += o.lp;
        return *this;
    }
    void axpy(double a, const BlockVec& o)
    {
        for (std::size_t k = 0; k < psd.size(); ++k) psd[k] += a * o.psd[k];
        lp += a * o.lp;
    }
    BlockVec scaled(double a) const
    {
        BlockVec r = *this;
        for (auto& m : r.psd) m *= a;
        r.lp *= a;
        return r;
    }
    double norm() const
    {
        double s = lp.squaredNorm();
        for (const auto& m : psd) s += m.squaredNorm();
        return std::sqrt(s);
    }
};

double inner(const BlockVec& a, const BlockVec& b)
{
    double s = a.lp.dot(b.lp);
    for (std::size_t k = 0; k < a.psd.size(); ++k) s += a.psd[k].cwiseProduct(b.psd[k]).sum();
    return s;
}

MatrixXd sym(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

struct PsdTerm {
    int row, col;
    double value;
};

// Constraint data compiled for fast operator application and Schur assembly.
struct Compiled {
    int m = 0;
    std::vector<int> psd_sizes;
    int lp_size = 0;
    std::vector<int> block_to_psd;  // -1 for nonneg blocks
    std::vector<int> block_lp_offset;

    // per constraint: per psd block sparse terms (upper triangle)
    std::vector<std::vector<std::pair<int, std::vector<PsdTerm>>>> psd_terms;
    std::vector<std::vector<std::pair<int, double>>> lp_terms;
    // per psd block: constraints touching it, with symmetric-expanded terms
    std::vector<std::vector<std::pair<int, std::vector<PsdTerm>>>> block_users;
    // per lp index: (constraint, value)
    std::vector<std::vector<std::pair<int, double>>> lp_users;

    BlockVec C;
    VectorXd b;
    VectorXd row_scale;

    BlockVec zero() const
    {
        BlockVec z;
        for (int n : psd_sizes) z.psd.push_back(MatrixXd::Zero(n, n));
        z.lp = VectorXd::Zero(lp_size);
        return z;
    }
    BlockVec identity() const
    {
        BlockVec z;
        for (int n : psd_sizes) z.psd.push_back(MatrixXd::Identity(n, n));
        z.lp = VectorXd::Ones(lp_size);
        return z;
    }

    VectorXd apply(const BlockVec& X) const
    {
        VectorXd r = VectorXd::Zero(m);
        for (int i = 0; i < m; ++i) {
            double s = 0.0;
            for (const auto& [k, terms] : psd_terms[static_cast<std::size_t>(i)]) {
                const MatrixXd& Xk = X.psd[static_cast<std::size_t>(k)];
                for (const auto& t : terms)
                    s += t.value * (t.row == t.col ? Xk(t.row, t.col) : Xk(t.row, t.col) + Xk(t.col, t.row));
            }
            for (const auto& [l, v] : lp_terms[static_cast<std::size_t>(i)]) s += v * X.lp[l];
            r[i] = s;
        }
        return r;
    }

    BlockVec adjoint(const VectorXd& y) const
    {
        BlockVec out = zero();
        for (int i = 0; i < m; ++i) {
            const double yi = y[i];
            if (yi == 0.0) continue;
            for (const auto& [k, terms] : psd_terms[static_cast<std::size_t>(i)]) {
                MatrixXd& Ok = out.psd[static_cast<std::size_t>(k)];
                for (const auto& t : terms) {
                    Ok(t.row, t.col) += yi * t.value;
                    if (t.row != t.col) Ok(t.col, t.row) += yi * t.value;
                }
            }
            for (const auto& [l, v] : lp_terms[static_cast<std::size_t>(i)]) out.lp[l] += yi * v;
        }
        return out;
    }
};

Compiled compile(const SdpProblem& p, const std::vector<int>& kept_rows)
{
    Compiled c;
    c.m = static_cast<int>(kept_rows.size());
    int lp_off = 0;
    for (const auto& blk : p.blocks) {
        if (blk.kind == ConeKind::psd) {
            c.block_to_psd.push_back(static_cast<int>(c.psd_sizes.size()));
            c.block_lp_offset.push_back(-1);
            c.psd_sizes.push_back(blk.size);
        } else {
            c.block_to_psd.push_back(-1);
            c.block_lp_offset.push_back(lp_off);
            lp_off += blk.size;
        }
    }
    c.lp_size = lp_off;

    auto place = [&](const std::vector<Entry>& entries, std::vector<std::pair<int, std::vector<PsdTerm>>>& psd,
                     std::vector<std::pair<int, double>>& lp, double scale) {
        std::map<int, std::map<std::pair<int, int>, double>> acc;
        std::map<int, double> lp_acc;
        for (const auto& e : entries) {
            const int k = c.block_to_psd[static_cast<std::size_t>(e.block)];
            if (k >= 0) acc[k][{e.row, e.col}] += scale * e.value;
            else lp_acc[c.block_lp_offset[static_cast<std::size_t>(e.block)] + e.row] += scale * e.value;
        }
        for (auto& [k, mp] : acc) {
            std::vector<PsdTerm> terms;
            for (auto& [rc, v] : mp)
                if (v != 0.0) terms.push_back({rc.first, rc.second, v});
            if (!terms.empty()) psd.emplace_back(k, std::move(terms));
        }
        for (auto& [l, v] : lp_acc)
            if (v != 0.0) lp.emplace_back(l, v);
    };

    c.psd_terms.resize(static_cast<std::size_t>(c.m));
    c.lp_terms.resize(static_cast<std::size_t>(c.m));
    c.b.resize(c.m);
    c.row_scale.resize(c.m);
    for (int i = 0; i < c.m; ++i) {
        const auto& row = p.constraints[static_cast<std::size_t>(kept_rows[static_cast<std::size_t>(i)])];
        double nrm = 0.0;
        for (const auto& e : row) nrm += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
        const double d = 1.0 / std::sqrt(nrm);
        c.row_scale[i] = d;
        c.b[i] = d * p.b[kept_rows[static_cast<std::size_t>(i)]];
        place(row, c.psd_terms[static_cast<std::size_t>(i)], c.lp_terms[static_cast<std::size_t>(i)], d);
    }

    c.block_users.resize(c.psd_sizes.size());
    c.lp_users.resize(static_cast<std::size_t>(c.lp_size));
    for (int i = 0; i < c.m; ++i) {
        for (const auto& [k, terms] : c.psd_terms[static_cast<std::size_t>(i)]) {
            std::vector<PsdTerm> full;
            for (const auto& t : terms) {
                full.push_back(t);
                if (t.row != t.col) full.push_back({t.col, t.row, t.value});
            }
            c.block_users[static_cast<std::size_t>(k)].emplace_back(i, std::move(full));
        }
        for (const auto& [l, v] : c.lp_terms[static_cast<std::size_t>(i)]) c.lp_users[static_cast<std::size_t>(l)].emplace_back(i, v);
    }

    c.C = c.zero();
    for (const auto& e : p.objective) {
        const int k = c.block_to_psd[static_cast<std::size_t>(e.block)];
        if (k >= 0) {
            c.C.psd[static_cast<std::size_t>(k)](e.row, e.col) += e.value;
            if (e.row != e.col) c.C.psd[static_cast<std::size_t>(k)](e.col, e.row) += e.value;
        } else {
            c.C.lp[c.block_lp_offset[static_cast<std::size_t>(e.block)] + e.row] += e.value;
        }
    }
    return c;
}

// HKM Schur complement M_ij = tr(A_i X A_j S^-1) (+ LP part).
MatrixXd schur(const Compiled& c, const BlockVec& X, const std::vector<MatrixXd>& Sinv, const VectorXd& lp_ratio)
{
    MatrixXd M = MatrixXd::Zero(c.m, c.m);
    for (std::size_t k = 0; k < c.psd_sizes.size(); ++k) {
        const auto& users = c.block_users[k];
        const MatrixXd& Xk = X.psd[k];
        const MatrixXd& Sk = Sinv[k];
        const int n = c.psd_sizes[k];
        MatrixXd G(n, n);
        for (std::size_t jj = 0; jj < users.size(); ++jj) {
            const auto& [j, tj] = users[jj];
            // G = X A_j S^-1 as a sum of outer products
            G.setZero();
            for (const auto& t : tj) G.noalias() += t.value * Xk.col(t.row) * Sk.row(t.col);
            for (std::size_t ii = jj; ii < users.size(); ++ii) {
                const auto& [i, ti] = users[ii];
                double s = 0.0;
                for (const auto& t : ti) s += t.value * G(t.col, t.row);
                M(i, j) += s;
                if (i != j) M(j, i) += s;
            }
        }
    }
    for (int l = 0; l < c.lp_size; ++l) {
        const auto& users = c.lp_users[static_cast<std::size_t>(l)];
        const double r = lp_ratio[l];
        for (std::size_t a = 0; a < users.size(); ++a)
            for (std::size_t bb = a; bb < users.size(); ++bb) {
                const double v = r * users[a].second * users[bb].second;
                M(users[a].first, users[bb].first) += v;
                if (users[a].first != users[bb].first) M(users[bb].first, users[a].first) += v;
            }
    }
    return M;
}

// Factorization of the Schur complement. Pure LP problems with structurally
// sparse normal equations (e.g. box constraints on many variables) use a
// sparse Cholesky with fill-reducing ordering; everything else is dense.
class SchurSolver {
public:
    explicit SchurSolver(const Compiled& c) : m_(c.m)
    {
        if (!c.psd_sizes.empty() || c.m < 64) return;
        long nnz = c.m;
        for (const auto& users : c.lp_users) nnz += static_cast<long>(users.size() * users.size());
        sparse_ = static_cast<double>(nnz) < 0.1 * static_cast<double>(c.m) * static_cast<double>(c.m);
    }

    bool factor(const Compiled& c, const BlockVec& X, const std::vector<MatrixXd>& Sinv, const VectorXd& lp_ratio)
    {
        if (m_ == 0) return true;
        return sparse_ ? factor_sparse(c, lp_ratio) : factor_dense(schur(c, X, Sinv, lp_ratio));
    }

    VectorXd solve(const VectorXd& v) const
    {
        if (m_ == 0) return VectorXd();
        return sparse_ ? VectorXd(sllt_.solve(v)) : VectorXd(dllt_.solve(v));
    }

private:
    bool factor_dense(const MatrixXd& M)
    {
        dllt_.compute(M);
        double reg = 0.0;
        const double scale = std::max(M.diagonal().cwiseAbs().maxCoeff(), 1.0);
        while (dllt_.info() != Eigen::Success) {
            reg = reg == 0.0 ? 1e-14 * scale : reg * 100.0;
            if (reg > 1e-2 * scale) return false;
            dllt_.compute(M + reg * MatrixXd::Identity(m_, m_));
        }
        return true;
    }

    bool factor_sparse(const Compiled& c, const VectorXd& lp_ratio)
    {
        // lower triangle, diagonal always present so the pattern never changes
        std::vector<Eigen::Triplet<double>> trip;
        double scale = 1.0;
        std::vector<double> diag(static_cast<std::size_t>(m_), 0.0);
        for (int l = 0; l < c.lp_size; ++l) {
            const auto& users = c.lp_users[static_cast<std::size_t>(l)];
            const double r = lp_ratio[l];
            for (std::size_t a = 0; a < users.size(); ++a) {
                diag[static_cast<std::size_t>(users[a].first)] += r * users[a].second * users[a].second;
                for (std::size_t bb = 0; bb < users.size(); ++bb)
                    if (users[bb].first > users[a].first)
                        trip.emplace_back(users[bb].first, users[a].first, r * users[a].second * users[bb].second);
            }
        }
        for (double d : diag) scale = std::max(scale, std::abs(d));
        double reg = 0.0;
        for (;;) {
            std::vector<Eigen::Triplet<double>> t = trip;
            for (int i = 0; i < m_; ++i) t.emplace_back(i, i, diag[static_cast<std::size_t>(i)] + reg);
            Eigen::SparseMatrix<double> M(m_, m_);
            M.setFromTriplets(t.begin(), t.end());
            if (!analyzed_) {
                sllt_.analyzePattern(M);
                analyzed_ = true;
            }
            sllt_.factorize(M);
            if (sllt_.info() == Eigen::Success) return true;
            reg = reg == 0.0 ? 1e-14 * scale : reg * 100.0;
            if (reg > 1e-2 * scale) return false;
        }
    }

    int m_ = 0;
    bool sparse_ = false;
    bool analyzed_ = false;
    Eigen::LLT<MatrixXd> dllt_;
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> sllt_;
};

// Largest step alpha such that V + alpha dV stays in the cone.
double max_step(const BlockVec& V, const BlockVec& dV, bool& ok)
{
    double alpha = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < V.psd.size(); ++k) {
        Eigen::LLT<MatrixXd> llt(V.psd[k]);
        if (llt.info() != Eigen::Success) {
            ok = false;
            return 0.0;
        }
        MatrixXd Linv_dV = llt.matrixL().solve(dV.psd[k]);
        MatrixXd T = llt.matrixL().solve(Linv_dV.transpose());
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(T), Eigen::EigenvaluesOnly);
        const double lmin = es.eigenvalues().minCoeff();
        if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
    }
    for (Eigen::Index l = 0; l < V.lp.size(); ++l)
        if (dV.lp[l] < 0.0) alpha = std::min(alpha, -V.lp[l] / dV.lp[l]);
    return alpha;
}

double min_eig(const MatrixXd& m)
{
    if (m.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

struct Direction {
    BlockVec dX, dS;
    VectorXd dy;
    double dtau = 0.0, dkappa = 0.0;
};

} // namespace

SdpSolution solve(const SdpProblem& problem, const SolverOptions& opt)
{
    problem.validate();
    SdpSolution sol;

    const int m_all = problem.num_constraints();
    std::vector<int> kept;
    for (int i = 0; i < m_all; ++i) {
        bool empty = true;
        for (const auto& e : problem.constraints[static_cast<std::size_t>(i)])
            if (e.value != 0.0) empty = false;
        if (!empty) {
            kept.push_back(i);
        } else if (problem.b[i] != 0.0) {
            // 0 = b_i with b_i != 0: y = e_i / b_i is a zero-residual Farkas ray
            sol.status = SdpStatus::infeasible;
            sol.y = VectorXd::Zero(m_all);
            sol.y[i] = 1.0 / problem.b[i];
            sol.message = "constraint " + std::to_string(i) + " has no coefficients but a nonzero right-hand side";
            return sol;
        }
    }

    if (m_all > opt.max_constraints) {
        sol.status = SdpStatus::indeterminate;
        sol.message = "problem has " + std::to_string(m_all) + " constraints, above the dense-solver limit of " +
                      std::to_string(opt.max_constraints) + "; not attempted";
        return sol;
    }

    const Compiled c = compile(problem, kept);
    const int m = c.m;
    const double nu = static_cast<double>(problem.cone_dimension());
    const double b_norm = c.b.norm();
    const double C_norm = c.C.norm();

    BlockVec X = c.identity();
    BlockVec S = c.identity();
    VectorXd y = VectorXd::Zero(m);
    double tau = 1.0, kappa = 1.0;

    auto unscale_y = [&](const VectorXd& ys) {
        VectorXd out = VectorXd::Zero(m_all);
        for (int i = 0; i < m; ++i) out[kept[static_cast<std::size_t>(i)]] = ys[i] * c.row_scale[i];
        return out;
    };
    auto export_block = [&](const BlockVec& V, double scale) {
        std::vector<MatrixXd> out;
        for (std::size_t blk = 0; blk < problem.blocks.size(); ++blk) {
            const int k = c.block_to_psd[blk];
            if (k >= 0) out.push_back(V.psd[static_cast<std::size_t>(k)] * scale);
            else out.push_back(V.lp.segment(c.block_lp_offset[blk], problem.blocks[blk].size) * scale);
        }
        return out;
    };

    sol.message = "iteration limit reached";
    int stall = 0;
    SchurSolver factor(c);

    for (int iter = 0; iter <= opt.max_iterations; ++iter) {
        sol.iterations = iter;
        const VectorXd rp = c.b * tau - c.apply(X);
        BlockVec rd = c.C.scaled(tau);
        rd.axpy(-1.0, c.adjoint(y));
        rd.axpy(-1.0, S);
        const double cx = inner(c.C, X);
        const double by = c.b.dot(y);
        const double rg = kappa + cx - by;
        const double mu = (inner(X, S) + tau * kappa) / (nu + 1.0);

        const double pres = rp.norm() / tau / (1.0 + b_norm);
        const double dres = rd.norm() / tau / (1.0 + C_norm);
        const double pobj = cx / tau, dobj = by / tau;
        const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

        sol.primal_residual = pres;
        sol.dual_residual = dres;
        sol.gap = gap;
        sol.primal_objective = pobj;
        sol.dual_objective = dobj;

        if (opt.verbose)
            std::fprintf(stderr, "%3d  pobj %+.6e  dobj %+.6e  pres %.2e  dres %.2e  gap %.2e  tau %.2e  kappa %.2e  mu %.2e\n",
                         iter, pobj, dobj, pres, dres, gap, tau, kappa, mu);

        if (pres <= opt.primal_tol && dres <= opt.dual_tol && gap <= opt.gap_tol) {
            sol.status = problem.is_feasibility_problem() ? SdpStatus::feasible : SdpStatus::optimal;
            sol.X = export_block(X, 1.0 / tau);
            sol.S = export_block(S, 1.0 / tau);
            sol.y = unscale_y(y / tau);
            sol.message = "converged";
            break;
        }
        if (by > 0.0) {
            BlockVec ray = c.adjoint(y);
            ray += S;
            const double res = ray.norm() / by;
            if (res <= opt.infeasibility_tol) {
                sol.status = SdpStatus::infeasible;
                sol.y = unscale_y(y / by);
                sol.S = export_block(S, 1.0 / by);
                sol.infeasibility_residual = res;
                sol.message = "dual improving ray found";
                break;
            }
        }
        if (cx < 0.0) {
            const double res = c.apply(X).norm() / (-cx);
            if (res <= opt.infeasibility_tol) {
                sol.status = SdpStatus::indeterminate;
                sol.X = export_block(X, -1.0 / cx);
                sol.message = "dual infeasible: primal improving ray found (problem unbounded or dual infeasible)";
                break;
            }
        }
        if (iter == opt.max_iterations) break;

        // Scaling data
        std::vector<MatrixXd> Sinv;
        bool ok = true;
        for (const auto& Sk : S.psd) {
            Eigen::LLT<MatrixXd> llt(Sk);
            if (llt.info() != Eigen::Success) {
                ok = false;
                break;
            }
            Sinv.push_back(llt.solve(MatrixXd::Identity(Sk.rows(), Sk.cols())));
        }
        if (!ok) {
            sol.message = "numerical failure: dual slack lost definiteness";
            break;
        }
        VectorXd lp_ratio = X.lp.cwiseQuotient(S.lp);

        if (!factor.factor(c, X, Sinv, lp_ratio)) {
            sol.message = "numerical failure: Schur complement factorization";
            break;
        }

        // Quantities shared by predictor and corrector
        BlockVec XCSinv = c.zero();  // sym(X C S^-1)
        double w = 0.0;
        for (std::size_t k = 0; k < X.psd.size(); ++k) {
            MatrixXd t = X.psd[k] * c.C.psd[k] * Sinv[k];
            w += (c.C.psd[k] * t).trace();
            XCSinv.psd[k] = sym(t);
        }
        XCSinv.lp = X.lp.cwiseProduct(c.C.lp).cwiseProduct(S.lp.cwiseInverse());
        w += c.C.lp.dot(XCSinv.lp);
        const VectorXd u = c.apply(XCSinv);
        const VectorXd q = m > 0 ? VectorXd(factor.solve(u + c.b)) : VectorXd();

        BlockVec XrdSinv = c.zero();
        double tr_term = 0.0;  // tr(C X rd S^-1)
        for (std::size_t k = 0; k < X.psd.size(); ++k) {
            MatrixXd t = X.psd[k] * rd.psd[k] * Sinv[k];
            tr_term += (c.C.psd[k] * t).trace();
            XrdSinv.psd[k] = sym(t);
        }
        XrdSinv.lp = X.lp.cwiseProduct(rd.lp).cwiseQuotient(S.lp);
        tr_term += c.C.lp.dot(XrdSinv.lp);
        const VectorXd A_XrdSinv = c.apply(XrdSinv);

        auto direction = [&](double sigma, double eta, const BlockVec* corr, double corr_tk) {
            Direction d;
            BlockVec R = c.zero();
            for (std::size_t k = 0; k < X.psd.size(); ++k) {
                R.psd[k] = sigma * mu * Sinv[k] - X.psd[k];
                if (corr) R.psd[k] -= corr->psd[k];
            }
            R.lp = sigma * mu * S.lp.cwiseInverse() - X.lp;
            if (corr) R.lp -= corr->lp;

            const VectorXd h1 = eta * rp - c.apply(R) + eta * A_XrdSinv;
            const VectorXd p = m > 0 ? VectorXd(factor.solve(h1)) : VectorXd();
            const double cR = inner(c.C, R);
            const double tk_rhs = sigma * mu - tau * kappa - corr_tk;
            const double num = -eta * rg - cR + eta * tr_term - (m > 0 ? u.dot(p) - c.b.dot(p) : 0.0) - tk_rhs / tau;
            const double den = (m > 0 ? u.dot(q) - c.b.dot(q) : 0.0) - w - kappa / tau;
            d.dtau = num / den;
            d.dy = m > 0 ? VectorXd(p + q * d.dtau) : VectorXd();
            d.dS = rd.scaled(eta);
            d.dS.axpy(-1.0, c.adjoint(d.dy));
            d.dS.axpy(d.dtau, c.C);
            d.dX = c.zero();
            for (std::size_t k = 0; k < X.psd.size(); ++k)
                d.dX.psd[k] = sym(R.psd[k] - X.psd[k] * d.dS.psd[k] * Sinv[k]);
            d.dX.lp = R.lp - X.lp.cwiseProduct(d.dS.lp).cwiseQuotient(S.lp);
            d.dkappa = (tk_rhs - kappa * d.dtau) / tau;
            return d;
        };

        auto step_length = [&](const Direction& d, bool& good) {
            double a = std::min(max_step(X, d.dX, good), max_step(S, d.dS, good));
            if (d.dtau < 0.0) a = std::min(a, -tau / d.dtau);
            if (d.dkappa < 0.0) a = std::min(a, -kappa / d.dkappa);
            return a;
        };

        // Predictor
        const Direction aff = direction(0.0, 1.0, nullptr, 0.0);
        bool good = true;
        const double a_aff = std::min(1.0, step_length(aff, good));
        if (!good) {
            sol.message = "numerical failure: iterate lost definiteness";
            break;
        }
        BlockVec Xa = X, Sa = S;
        Xa.axpy(a_aff, aff.dX);
        Sa.axpy(a_aff, aff.dS);
        const double mu_aff = (inner(Xa, Sa) + (tau + a_aff * aff.dtau) * (kappa + a_aff * aff.dkappa)) / (nu + 1.0);
        const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

        // Corrector
        BlockVec corr = c.zero();
        for (std::size_t k = 0; k < X.psd.size(); ++k) corr.psd[k] = aff.dX.psd[k] * aff.dS.psd[k] * Sinv[k];
        corr.lp = aff.dX.lp.cwiseProduct(aff.dS.lp).cwiseQuotient(S.lp);
        const Direction dir = direction(sigma, 1.0 - sigma, &corr, aff.dtau * aff.dkappa);
        const double a_max = step_length(dir, good);
        if (!good) {
            sol.message = "numerical failure: iterate lost definiteness";
            break;
        }
        const double alpha = std::min(1.0, opt.step_fraction * a_max);

        X.axpy(alpha, dir.dX);
        S.axpy(alpha, dir.dS);
        if (m > 0) y += alpha * dir.dy;
        tau += alpha * dir.dtau;
        kappa += alpha * dir.dkappa;

        if (alpha < 1e-10) {
            if (++stall >= 5) {
                sol.message = "stalled: step length collapsed";
                break;
            }
        } else {
            stall = 0;
        }
        if (!(mu > 0.0) || !std::isfinite(mu) || !std::isfinite(tau)) {
            sol.message = "numerical failure: non-finite iterate";
            break;
        }
    }

    if (sol.status == SdpStatus::indeterminate && sol.X.empty()) {
        sol.X = export_block(X, tau > 0.0 ? 1.0 / tau : 1.0);
        sol.S = export_block(S, tau > 0.0 ? 1.0 / tau : 1.0);
        sol.y = unscale_y(tau > 0.0 ? VectorXd(y / tau) : y);
    }
    double lmin = std::numeric_limits<double>::infinity();
    for (std::size_t blk = 0; blk < sol.X.size(); ++blk) {
        if (problem.blocks[blk].kind == ConeKind::psd) lmin = std::min(lmin, min_eig(sol.X[blk]));
        else if (sol.X[blk].size() > 0) lmin = std::min(lmin, sol.X[blk].minCoeff());
    }
    sol.min_eigenvalue = std::isfinite(lmin) ? lmin : 0.0;
    if ((sol.status == SdpStatus::optimal || sol.status == SdpStatus::feasible) && sol.min_eigenvalue < -1e-8) {
        sol.status = SdpStatus::indeterminate;
        sol.message = "converged iterate fails the eigenvalue floor";
    }
    return sol;
}

} // namespace zb
