#include "zb/sos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "zb/error.hpp"

namespace zb {

int AffinePolynomial::degree() const
{
    int d = constant.degree();
    for (const auto& [j, p] : linear) d = std::max(d, p.degree());
    return d;
}

Polynomial AffinePolynomial::evaluate(const std::vector<double>& values) const
{
    Polynomial out = constant;
    for (const auto& [j, p] : linear) {
        if (j < 0 || static_cast<std::size_t>(j) >= values.size()) throw InvalidInput("affine polynomial: free variable out of range");
        out += values[static_cast<std::size_t>(j)] * p;
    }
    return out;
}

int SosProgram::add_free_variables(int count, const std::string& prefix)
{
    if (count < 0) throw InvalidInput("negative free variable count");
    const int first = num_free();
    for (int k = 0; k < count; ++k) free_names_.push_back(prefix + "_" + std::to_string(k));
    return first;
}

void SosProgram::add_constraint(SosConstraintSpec spec)
{
    if (spec.g.size() != spec.multiplier_degrees.size())
        throw InvalidInput("sos constraint '" + spec.name + "': one multiplier degree per g required");
    for (int k : spec.multiplier_degrees)
        if (k < 0 || k % 2 != 0)
            throw InvalidInput("sos constraint '" + spec.name + "': multiplier degree " + std::to_string(k) +
                               " is not even and nonnegative, so it cannot be an SOS degree");
    for (const auto& gi : spec.g)
        require_dims(gi.num_vars() == spec.target.num_vars(), "sos constraint '" + spec.name + "': g variable count differs");
    for (const auto& [j, p] : spec.target.linear) {
        if (j < 0 || j >= num_free()) throw InvalidInput("sos constraint '" + spec.name + "': unknown free variable");
        require_dims(p.num_vars() == spec.target.num_vars(), "sos constraint '" + spec.name + "': target variable count differs");
    }
    if (spec.sigma_name.empty()) spec.sigma_name = spec.name + ":sigma";
    if (spec.multiplier_name.empty()) spec.multiplier_name = spec.name + ":lambda";
    constraints_.push_back(std::move(spec));
}

int gram_half_degree(int target_degree, const std::vector<int>& multiplier_degrees, const std::vector<Polynomial>& g)
{
    int D = target_degree;
    for (std::size_t i = 0; i < g.size(); ++i) D = std::max(D, multiplier_degrees[i] + g[i].degree());
    return (D + 1) / 2;
}

int default_multiplier_degree(int target_degree, int g_degree)
{
    int k = std::max(target_degree - g_degree, 0);
    if (k % 2 != 0) ++k;
    return k;
}

namespace {

// Basis monomials of degree <= d whose per-variable exponents stay within
// half of what the witness polynomial can contain in that variable.
std::vector<Monomial> witness_basis(const SosConstraintSpec& spec, int d)
{
    std::vector<Monomial> all = monomials_up_to(spec.target.num_vars(), d);
    if (!spec.trim_basis) return all;
    const std::size_t n = spec.target.num_vars();
    std::vector<int> cap(n, 0);
    auto absorb = [&](const Polynomial& p, int extra) {
        for (const auto& [m, c] : p.terms())
            for (std::size_t i = 0; i < n; ++i) cap[i] = std::max(cap[i], m[i] + extra);
    };
    absorb(spec.target.constant, 0);
    for (const auto& [j, p] : spec.target.linear) absorb(p, 0);
    for (std::size_t i = 0; i < spec.g.size(); ++i) {
        // lambda_i contributes up to its full degree in any variable
        absorb(spec.g[i], spec.multiplier_degrees[i]);
    }
    std::vector<Monomial> kept;
    for (auto& m : all) {
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) ok = 2 * m[i] <= cap[i] + (cap[i] % 2);
        if (ok) kept.push_back(std::move(m));
    }
    return kept;
}

using EntryKey = std::tuple<int, int, int>;

} // namespace

LoweredSos SosProgram::lower() const
{
    LoweredSos low;
    low.num_free = num_free();
    SdpProblem& sdp = low.sdp;
    if (low.num_free > 0) {
        low.free_block = 0;
        sdp.blocks.push_back({2 * low.num_free, ConeKind::nonneg});
        for (int j = 0; j < low.num_free; ++j) {
            low.dictionary.push_back({free_names_[static_cast<std::size_t>(j)], 0, j, j, 1.0});
            low.dictionary.push_back({free_names_[static_cast<std::size_t>(j)], 0, low.num_free + j, low.num_free + j, -1.0});
        }
    }

    std::vector<double> b;
    for (const auto& spec : constraints_) {
        const std::size_t nv = spec.target.num_vars();
        LoweredConstraint lc;
        lc.name = spec.name;
        lc.gram_degree = gram_half_degree(spec.target.degree(), spec.multiplier_degrees, spec.g);
        lc.first_row = static_cast<int>(b.size());

        const std::vector<Monomial> rows = monomials_up_to(nv, 2 * lc.gram_degree);
        std::map<Monomial, int, GrlexLess> row_of;
        for (std::size_t r = 0; r < rows.size(); ++r) row_of.emplace(rows[r], static_cast<int>(r));
        std::vector<std::map<EntryKey, double>> acc(rows.size());
        std::vector<double> rhs(rows.size(), 0.0);
        auto at = [&](const Monomial& m) -> int {
            auto it = row_of.find(m);
            if (it == row_of.end()) throw InvalidInput("sos lowering: monomial beyond the witness degree");
            return it->second;
        };

        auto add_gram = [&](const std::string& name, const std::vector<Monomial>& basis, const Polynomial* g) {
            GramBlock gb;
            gb.name = name;
            gb.block = static_cast<int>(sdp.blocks.size());
            gb.basis = basis;
            sdp.blocks.push_back({static_cast<int>(basis.size()), ConeKind::psd});
            for (std::size_t a = 0; a < basis.size(); ++a)
                for (std::size_t c = a; c < basis.size(); ++c) {
                    const Monomial ab = basis[a] * basis[c];
                    const EntryKey key{gb.block, static_cast<int>(a), static_cast<int>(c)};
                    if (!g) {
                        acc[static_cast<std::size_t>(at(ab))][key] += 1.0;
                    } else {
                        for (const auto& [beta, gv] : g->terms()) acc[static_cast<std::size_t>(at(ab * beta))][key] += gv;
                    }
                    low.dictionary.push_back(
                        {name + ":q_" + std::to_string(a) + "_" + std::to_string(c), gb.block, static_cast<int>(a), static_cast<int>(c), 1.0});
                }
            return gb;
        };

        lc.sigma = add_gram(spec.sigma_name, witness_basis(spec, lc.gram_degree), nullptr);
        for (std::size_t i = 0; i < spec.g.size(); ++i)
            lc.multipliers.push_back(add_gram(spec.multiplier_name + ":" + std::to_string(i),
                                              monomials_up_to(nv, spec.multiplier_degrees[i] / 2), &spec.g[i]));

        // sigma + sum lambda_i g_i - sum_j c_j T_j = T_0
        for (const auto& [m, v] : spec.target.constant.terms()) rhs[static_cast<std::size_t>(at(m))] += v;
        for (const auto& [j, p] : spec.target.linear)
            for (const auto& [m, v] : p.terms()) {
                auto& row = acc[static_cast<std::size_t>(at(m))];
                row[{low.free_block, j, j}] -= v;
                row[{low.free_block, low.num_free + j, low.num_free + j}] += v;
            }

        for (std::size_t r = 0; r < rows.size(); ++r) {
            std::vector<Entry> entries;
            for (const auto& [key, v] : acc[r])
                if (v != 0.0) entries.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), v});
            sdp.constraints.push_back(std::move(entries));
            b.push_back(rhs[r]);
        }
        lc.num_rows = static_cast<int>(rows.size());
        low.constraints.push_back(std::move(lc));
    }
    sdp.b = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
    return low;
}

std::vector<double> free_values(const LoweredSos& low, const SdpSolution& sol)
{
    std::vector<double> c(static_cast<std::size_t>(low.num_free), 0.0);
    if (low.free_block < 0) return c;
    if (sol.X.size() <= static_cast<std::size_t>(low.free_block)) throw InvalidInput("solution lacks primal blocks");
    const Eigen::MatrixXd& v = sol.X[static_cast<std::size_t>(low.free_block)];
    for (int j = 0; j < low.num_free; ++j) c[static_cast<std::size_t>(j)] = v(j, 0) - v(low.num_free + j, 0);
    return c;
}

Polynomial gram_polynomial(const GramBlock& g, const Eigen::MatrixXd& Q, std::size_t num_vars)
{
    require_dims(Q.rows() == static_cast<Eigen::Index>(g.basis.size()) && Q.cols() == Q.rows(),
                 "gram polynomial: matrix size differs from the basis");
    Polynomial p(num_vars);
    for (std::size_t a = 0; a < g.basis.size(); ++a)
        for (std::size_t c = 0; c < g.basis.size(); ++c)
            p.add_term(g.basis[a] * g.basis[c], Q(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)));
    return p;
}

namespace {

double min_eig(const Eigen::MatrixXd& Q)
{
    if (Q.size() == 0) return 0.0;
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (Q + Q.transpose()), Eigen::EigenvaluesOnly).eigenvalues()[0];
}

} // namespace

std::vector<ConstraintResidual> gram_residuals(const SosProgram& prog, const LoweredSos& low,
                                               const std::vector<Eigen::MatrixXd>& X)
{
    SdpSolution tmp;
    tmp.X = X;
    const std::vector<double> c = free_values(low, tmp);
    std::vector<ConstraintResidual> out;
    for (std::size_t k = 0; k < low.constraints.size(); ++k) {
        const auto& spec = prog.constraints()[k];
        const auto& lc = low.constraints[k];
        const std::size_t nv = spec.target.num_vars();
        ConstraintResidual r;
        r.name = lc.name;
        r.min_eigenvalue = std::numeric_limits<double>::infinity();
        Polynomial lhs = spec.target.evaluate(c);
        for (std::size_t i = 0; i < lc.multipliers.size(); ++i) {
            const auto& Q = X[static_cast<std::size_t>(lc.multipliers[i].block)];
            lhs -= gram_polynomial(lc.multipliers[i], Q, nv) * spec.g[i];
            r.min_eigenvalue = std::min(r.min_eigenvalue, min_eig(Q));
        }
        const auto& Q0 = X[static_cast<std::size_t>(lc.sigma.block)];
        r.min_eigenvalue = std::min(r.min_eigenvalue, min_eig(Q0));
        r.residual = max_coeff_difference(lhs, gram_polynomial(lc.sigma, Q0, nv));
        out.push_back(r);
    }
    return out;
}

std::string to_string(SynthesisMode m) { return m == SynthesisMode::nominal ? "nominal" : "robust"; }

Polynomial BarrierTemplate::polynomial(const std::vector<double>& coeffs) const
{
    Polynomial p(num_vars);
    for (std::size_t j = 0; j < basis.size(); ++j)
        p.add_term(basis[j], coeffs.at(static_cast<std::size_t>(first_variable) + j));
    return p;
}

namespace {

// p_j(subs) for every basis monomial, sharing one power table.
std::vector<Polynomial> compose_basis(const std::vector<Monomial>& basis, const std::vector<Polynomial>& subs,
                                      std::size_t out_vars)
{
    std::vector<std::vector<Polynomial>> powers(subs.size());
    auto power = [&](std::size_t i, int k) -> const Polynomial& {
        auto& cache = powers[i];
        if (cache.empty()) cache.push_back(Polynomial::constant(out_vars, 1.0));
        while (static_cast<int>(cache.size()) <= k) cache.push_back(cache.back() * subs[i]);
        return cache[static_cast<std::size_t>(k)];
    };
    std::vector<Polynomial> out;
    out.reserve(basis.size());
    for (const auto& m : basis) {
        Polynomial t = Polynomial::constant(out_vars, 1.0);
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (m[i] > 0) t = t * power(i, m[i]);
        out.push_back(std::move(t));
    }
    return out;
}

Polynomial lift(const Polynomial& p, std::size_t total, std::size_t offset)
{
    std::vector<std::size_t> pos(p.num_vars());
    for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = offset + i;
    return p.embed(total, pos);
}

std::vector<Polynomial> box_polys_at(const Box& box, std::size_t offset, std::size_t total)
{
    std::vector<std::size_t> vars(static_cast<std::size_t>(box.dim()));
    for (std::size_t i = 0; i < vars.size(); ++i) vars[i] = offset + i;
    return box_to_polys(box, vars, total);
}

void append(std::vector<Polynomial>& to, std::vector<Polynomial> from)
{
    for (auto& p : from) to.push_back(std::move(p));
}

void check_options(const BarrierOptions& opt, std::size_t nx)
{
    if (!(opt.epsilon > 0.0)) throw InvalidInput("barrier: epsilon must be positive");
    if (opt.fixed_barrier) {
        require_dims(opt.fixed_barrier->num_vars() == nx, "barrier: fixed certificate must be a polynomial in the state");
        if (opt.fixed_barrier->degree() < 1) throw InvalidInput("barrier: fixed certificate must have degree at least 1");
    } else if (opt.degree < 1) {
        throw InvalidInput("barrier: degree must be at least 1");
    }
    if (opt.multiplier_degree && (*opt.multiplier_degree < 0 || *opt.multiplier_degree % 2 != 0))
        throw InvalidInput("barrier: multiplier degree " + std::to_string(*opt.multiplier_degree) +
                           " must be even and nonnegative so the multipliers can be SOS");
}

void check_sets(const ScenarioSets& s, std::size_t nx, std::size_t nu)
{
    require_dims(static_cast<std::size_t>(s.Zx.dim()) == nx && static_cast<std::size_t>(s.X0.dim()) == nx &&
                     static_cast<std::size_t>(s.Xu.dim()) == nx,
                 "barrier: state sets must have dimension n_x");
    require_dims(static_cast<std::size_t>(s.Zu.dim()) == nu, "barrier: input set must have dimension n_u");
}

ConstraintSize size_of(const std::string& name, std::size_t nv, int target_degree, const BarrierOptions& opt)
{
    ConstraintSize cs;
    cs.name = name;
    cs.num_vars = nv;
    cs.target_degree = target_degree;
    cs.multiplier_degree = opt.multiplier_degree ? *opt.multiplier_degree : default_multiplier_degree(target_degree);
    cs.gram_degree = (std::max(target_degree, cs.multiplier_degree + 1) + 1) / 2;
    cs.basis_size = monomial_count(nv, cs.gram_degree);
    cs.rows = monomial_count(nv, 2 * cs.gram_degree);
    cs.num_multipliers = 2 * nv;
    cs.multiplier_basis_size = monomial_count(nv, cs.multiplier_degree / 2);
    return cs;
}

std::string describe(const SizeReport& r)
{
    std::ostringstream os;
    os.precision(12);
    for (const auto& c : r.constraints)
        os << (&c == &r.constraints.front() ? "" : "; ") << c.name << ": " << c.num_vars << " variables, degree " << c.target_degree << ", witness basis " << c.basis_size
           << " monomials, " << c.rows << " coefficient rows";
    return os.str();
}

// Common tail: sizes, cap, and the three constraints.
SynthesisProblem finish(SynthesisProblem sp, std::size_t nx, const ScenarioSets& sets, int dec_degree,
                        const std::vector<std::string>& dec_names, const std::vector<Polynomial>& dec_subs,
                        const std::vector<Polynomial>& dec_g, const BarrierOptions& opt)
{
    const std::size_t nv = dec_names.size();
    const int dB = sp.barrier.degree;
    sp.size.constraints = {size_of("init", nx, dB, opt), size_of("unsafe", nx, dB, opt), size_of("decrease", nv, dec_degree, opt)};
    for (const auto& c : sp.size.constraints) {
        sp.size.total_rows += c.rows;
        sp.size.largest_basis = std::max(sp.size.largest_basis, c.basis_size);
    }
    sp.size.free_variables = opt.fixed_barrier ? 0.0 : static_cast<double>(sp.barrier.basis.size());
    if (sp.size.largest_basis > static_cast<double>(opt.basis_cap)) {
        sp.refused = true;
        std::ostringstream os;
        os.precision(12);
        os << "monomial basis of " << sp.size.largest_basis << " exceeds the cap of " << opt.basis_cap << "; not expanded. "
           << describe(sp.size);
        sp.diagnostic = os.str();
        return sp;
    }

    // Barrier polynomial in x, either fixed or with one free coefficient per basis monomial.
    const auto& basis = sp.barrier.basis;
    if (!opt.fixed_barrier) sp.barrier.first_variable = sp.program.add_free_variables(static_cast<int>(basis.size()), "barrier:c");
    auto barrier_affine = [&](std::size_t vars, const std::vector<Polynomial>& images, double sign) {
        AffinePolynomial a(vars);
        if (opt.fixed_barrier) {
            a.constant = sign * (images.size() == 1 ? images[0] : Polynomial(vars));
        } else {
            for (std::size_t j = 0; j < basis.size(); ++j)
                a.linear.emplace_back(sp.barrier.first_variable + static_cast<int>(j), sign * images[j]);
        }
        return a;
    };
    auto images_of = [&](const std::vector<Polynomial>& subs, std::size_t vars) {
        if (opt.fixed_barrier) return std::vector<Polynomial>{opt.fixed_barrier->compose(subs)};
        return compose_basis(basis, subs, vars);
    };

    std::vector<Polynomial> xs;
    for (std::size_t i = 0; i < nx; ++i) xs.push_back(Polynomial::variable(nx, i));
    const std::vector<Polynomial> Bx = images_of(xs, nx);

    auto spec_for = [&](const std::string& name, const std::string& sigma, const std::string& lambda, AffinePolynomial target,
                        std::vector<Polynomial> g, const ConstraintSize& cs) {
        SosConstraintSpec s;
        s.name = name;
        s.sigma_name = sigma;
        s.multiplier_name = lambda;
        s.target = std::move(target);
        s.multiplier_degrees.assign(g.size(), cs.multiplier_degree);
        s.g = std::move(g);
        s.trim_basis = opt.trim_basis;
        return s;
    };

    // -B(x) - lambda_0' g_0 is SOS
    sp.program.add_constraint(spec_for("init", "sigma_0", "lambda_0", barrier_affine(nx, Bx, -1.0), box_polys_at(sets.X0, 0, nx),
                                       sp.size.constraints[0]));
    // B(x) - eps - lambda_u' g_u is SOS
    AffinePolynomial unsafe = barrier_affine(nx, Bx, 1.0);
    unsafe.constant -= Polynomial::constant(nx, sp.epsilon);
    sp.program.add_constraint(
        spec_for("unsafe", "sigma_u", "lambda_u", std::move(unsafe), box_polys_at(sets.Xu, 0, nx), sp.size.constraints[1]));

    // B(x) - B(f) - lambda' g is SOS over the decrease variables
    std::vector<Polynomial> Bx_lifted;
    for (const auto& p : Bx) Bx_lifted.push_back(lift(p, nv, 0));
    const std::vector<Polynomial> Bf = images_of(dec_subs, nv);
    AffinePolynomial dec = barrier_affine(nv, Bx_lifted, 1.0);
    const AffinePolynomial dec_f = barrier_affine(nv, Bf, -1.0);
    dec.constant += dec_f.constant;
    for (std::size_t j = 0; j < dec.linear.size(); ++j) dec.linear[j].second += dec_f.linear[j].second;
    sp.program.add_constraint(spec_for("decrease", "sigma", "lambda", std::move(dec), dec_g, sp.size.constraints[2]));

    sp.lowered = sp.program.lower();
    return sp;
}

std::vector<std::string> names(const std::string& stem, std::size_t n)
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(stem + std::to_string(i + 1));
    return out;
}

SynthesisProblem start(SynthesisMode mode, std::size_t nx, const BarrierOptions& opt)
{
    SynthesisProblem sp;
    sp.mode = mode;
    sp.epsilon = opt.epsilon;
    sp.fixed_barrier = opt.fixed_barrier;
    sp.barrier.num_vars = nx;
    sp.barrier.degree = opt.fixed_barrier ? opt.fixed_barrier->degree() : opt.degree;
    if (!opt.fixed_barrier) sp.barrier.basis = monomials_up_to(nx, opt.degree);
    return sp;
}

} // namespace

SynthesisProblem assemble_nominal(const Eigen::MatrixXd& A_c, const Eigen::MatrixXd& B_c, const ScenarioSets& sets,
                                  const Box& Zd, const BarrierOptions& opt)
{
    const auto nx = static_cast<std::size_t>(A_c.rows()), nu = static_cast<std::size_t>(B_c.cols());
    require_dims(A_c.cols() == A_c.rows() && B_c.rows() == A_c.rows(), "nominal assembly: A_c/B_c shapes inconsistent");
    require_dims(static_cast<std::size_t>(Zd.dim()) == nx, "nominal assembly: disturbance box must have dimension n_x");
    check_sets(sets, nx, nu);
    check_options(opt, nx);

    SynthesisProblem sp = start(SynthesisMode::nominal, nx, opt);
    // variables (x, u, d)
    std::vector<std::string> vars = names("x", nx);
    for (auto& s : names("u", nu)) vars.push_back(s);
    for (auto& s : names("d", nx)) vars.push_back(s);
    sp.variable_names = vars;
    const std::size_t nv = vars.size();
    sp.quantified_variables = nv;

    Eigen::MatrixXd M(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(nv));
    M << A_c, B_c, Eigen::MatrixXd::Identity(A_c.rows(), A_c.rows());
    std::vector<Polynomial> subs;
    for (std::size_t i = 0; i < nx; ++i) {
        Polynomial s(nv);
        for (std::size_t j = 0; j < nv; ++j)
            s.add_term(Monomial::variable(nv, j), M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        subs.push_back(std::move(s));
    }
    std::vector<Polynomial> g = box_polys_at(sets.Zx, 0, nv);
    append(g, box_polys_at(sets.Zu, nx, nv));
    append(g, box_polys_at(Zd, nx + nu, nv));
    const int dec_degree = sp.barrier.degree;
    return finish(std::move(sp), nx, sets, dec_degree, vars, subs, g, opt);
}

SynthesisProblem assemble_robust(const IntervalMatrix& AB, const ScenarioSets& sets, const Box& Zw, const BarrierOptions& opt)
{
    const auto nx = static_cast<std::size_t>(AB.rows());
    require_dims(AB.cols() > AB.rows(), "robust assembly: interval matrix must be n_x x (n_x + n_u)");
    const auto nu = static_cast<std::size_t>(AB.cols()) - nx;
    require_dims(static_cast<std::size_t>(Zw.dim()) == nx, "robust assembly: noise box must have dimension n_x");
    check_sets(sets, nx, nu);
    check_options(opt, nx);

    SynthesisProblem sp = start(SynthesisMode::robust, nx, opt);
    // variables (x, u, w, a_ij row-major, b_ik row-major)
    std::vector<std::string> vars = names("x", nx);
    for (auto& s : names("u", nu)) vars.push_back(s);
    for (auto& s : names("w", nx)) vars.push_back(s);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < nx; ++j) vars.push_back("a" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t k = 0; k < nu; ++k) vars.push_back("b" + std::to_string(i + 1) + "_" + std::to_string(k + 1));
    sp.variable_names = vars;
    const std::size_t nv = vars.size();
    sp.quantified_variables = nv;
    const std::size_t w0 = nx + nu, a0 = w0 + nx, b0 = a0 + nx * nx;

    const int dec_degree = 2 * sp.barrier.degree;
    std::vector<Polynomial> subs;
    std::vector<Polynomial> g;
    Eigen::VectorXd lo(static_cast<Eigen::Index>(nx * (nx + nu))), hi(lo.size());
    // only build the bilinear substitutes when the problem will be expanded
    for (std::size_t i = 0; i < nx; ++i) {
        Polynomial s = Polynomial::variable(nv, w0 + i);
        for (std::size_t j = 0; j < nx; ++j)
            s += Polynomial::variable(nv, a0 + i * nx + j) * Polynomial::variable(nv, j);
        for (std::size_t k = 0; k < nu; ++k)
            s += Polynomial::variable(nv, b0 + i * nu + k) * Polynomial::variable(nv, nx + k);
        subs.push_back(std::move(s));
    }
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < nx; ++j) {
            lo[static_cast<Eigen::Index>(i * nx + j)] = AB.lower()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            hi[static_cast<Eigen::Index>(i * nx + j)] = AB.upper()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t k = 0; k < nu; ++k) {
            const auto idx = static_cast<Eigen::Index>(nx * nx + i * nu + k);
            lo[idx] = AB.lower()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(nx + k));
            hi[idx] = AB.upper()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(nx + k));
        }
    g = box_polys_at(sets.Zx, 0, nv);
    append(g, box_polys_at(sets.Zu, nx, nv));
    append(g, box_polys_at(Zw, w0, nv));
    append(g, box_polys_at(Box(lo, hi), a0, nv));
    return finish(std::move(sp), nx, sets, dec_degree, vars, subs, g, opt);
}

Certificate extract_certificate(const SynthesisProblem& sp, const SdpSolution& sol, double tol)
{
    Certificate cert;
    cert.epsilon = sp.epsilon;
    if (sp.refused) {
        cert.message = "problem was not expanded: " + sp.diagnostic;
        return cert;
    }
    if (sol.status != SdpStatus::feasible && sol.status != SdpStatus::optimal) {
        cert.message = "solver reported " + to_string(sol.status) + ": " + sol.message;
        return cert;
    }
    const std::vector<double> c = free_values(sp.lowered, sol);
    cert.barrier = sp.fixed_barrier ? *sp.fixed_barrier : sp.barrier.polynomial(c);
    cert.residuals = gram_residuals(sp.program, sp.lowered, sol.X);
    for (const auto& r : cert.residuals) {
        cert.max_residual = std::max(cert.max_residual, r.residual);
        cert.min_eigenvalue = std::min(cert.min_eigenvalue, r.min_eigenvalue);
    }
    if (cert.max_residual > tol) {
        std::ostringstream os;
        os << "numerically unsound certificate: Gram reconstruction residual " << cert.max_residual << " exceeds " << tol;
        cert.message = os.str();
    } else if (cert.min_eigenvalue < -1e-8) {
        std::ostringstream os;
        os << "numerically unsound certificate: Gram eigenvalue " << cert.min_eigenvalue << " below -1e-8";
        cert.message = os.str();
    } else {
        cert.sound = true;
        cert.message = "certificate extracted";
    }
    return cert;
}

} // namespace zb
