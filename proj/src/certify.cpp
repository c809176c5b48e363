#include "zb/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include "zb/error.hpp"

namespace zb {

std::string to_string(Condition c)
{
    switch (c) {
    case Condition::init: return "init";
    case Condition::unsafe: return "unsafe";
    case Condition::decrease: return "decrease";
    }
    return "?";
}

std::string to_string(IntervalVerdict v)
{
    switch (v) {
    case IntervalVerdict::sound_pass: return "sound-pass";
    case IntervalVerdict::unknown: return "unknown";
    case IntervalVerdict::violation: return "violation";
    }
    return "?";
}

double state_margin(const Polynomial& B, double epsilon, Condition c, const Eigen::VectorXd& x)
{
    const double b = B.eval(x);
    if (c == Condition::init) return b;
    if (c == Condition::unsafe) return epsilon - b;
    throw InvalidInput("state_margin: the decrease condition needs dynamics");
}

double nominal_margin(const Polynomial& B, const ModelSet& ms, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                      const Eigen::VectorXd& d)
{
    const Eigen::VectorXd next = ms.A_c * x + ms.B_c * u + d;
    return B.eval(next) - B.eval(x);
}

double true_margin(const Polynomial& B, const TrueSystem& sys, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& w)
{
    const Eigen::VectorXd next = sys.A * x + sys.B * u + w;
    return B.eval(next) - B.eval(x);
}

namespace {

Eigen::VectorXd corner(const Box& b, unsigned long bits)
{
    Eigen::VectorXd v(b.dim());
    for (Eigen::Index i = 0; i < b.dim(); ++i) v[i] = (bits >> i) & 1UL ? b.upper()[i] : b.lower()[i];
    return v;
}

// Vertex of Z furthest in the direction of the sign pattern `bits`.
Eigen::VectorXd support_vertex(const Zonotope& Z, unsigned long bits)
{
    Eigen::VectorXd s(Z.dim());
    for (Eigen::Index i = 0; i < Z.dim(); ++i) s[i] = (bits >> i) & 1UL ? 1.0 : -1.0;
    if (Z.is_singleton()) return Z.center();
    const Eigen::VectorXd proj = Z.generators().transpose() * s;
    Eigen::VectorXd beta(proj.size());
    for (Eigen::Index k = 0; k < proj.size(); ++k) beta[k] = proj[k] >= 0 ? 1.0 : -1.0;
    return Z.point(beta);
}

Eigen::VectorXd sample_zonotope(const Zonotope& Z, Rng& rng)
{
    if (Z.is_singleton()) return Z.center();
    return Z.point(uniform_beta(rng, Z.num_generators()));
}

constexpr int max_corner_bits = 20;
constexpr int max_rejections = 100000;

// Shared driver for the sampling checks. `margin(x, u, d, AB)` evaluates
// the decrease condition, `noise` is the zonotope d (or w) ranges over and
// `AB`, when given, is sampled as well.
template <class Margin>
CheckResult run_checks(const Polynomial& B, double epsilon, const ScenarioSets& sets, const Zonotope& noise,
                       Margin margin, const CheckOptions& opt, const IntervalMatrix* AB = nullptr)
{
    if (!(epsilon > 0)) throw InvalidInput("check: epsilon must be positive");
    if (opt.samples < 0 || opt.batch_size < 1) throw InvalidInput("check: bad sample budget");
    const Eigen::Index nx = sets.Zx.dim();
    require_dims(sets.X0.dim() == nx && sets.Xu.dim() == nx && noise.dim() == nx, "check: set dimension mismatch");
    require_dims(B.num_vars() == static_cast<std::size_t>(nx), "check: barrier variable count mismatch");

    CheckResult res;
    auto fail = [&](Violation v) {
        res.pass = false;
        res.violation = std::move(v);
        return res;
    };

    // Box corners.
    const Condition state_order[] = {Condition::unsafe, Condition::init};
    for (Condition c : state_order) {
        const Box& box = c == Condition::unsafe ? sets.Xu : sets.X0;
        if (box.dim() <= max_corner_bits)
            for (unsigned long bits = 0; bits < (1UL << box.dim()); ++bits) {
                const Eigen::VectorXd x = corner(box, bits);
                ++res.evaluated;
                const double m = state_margin(B, epsilon, c, x);
                if (m > opt.slack) return fail({c, x, {}, {}, {}, m});
            }
    }
    const Eigen::Index nu = sets.Zu.dim();
    if (2 * nx + nu <= max_corner_bits)
        for (unsigned long xb = 0; xb < (1UL << nx); ++xb) {
            const Eigen::VectorXd x = corner(sets.Zx, xb);
            if (sets.Xu.contains(x)) continue;
            for (unsigned long ub = 0; ub < (1UL << nu); ++ub) {
                const Eigen::VectorXd u = corner(sets.Zu, ub);
                for (unsigned long db = 0; db < (1UL << nx); ++db) {
                    const Eigen::VectorXd d = support_vertex(noise, db);
                    const Eigen::MatrixXd ab = AB ? Eigen::MatrixXd(0.5 * (AB->lower() + AB->upper())) : Eigen::MatrixXd();
                    ++res.evaluated;
                    const double m = margin(x, u, d, ab);
                    if (m > opt.slack) return fail({Condition::decrease, x, u, d, ab, m});
                }
            }
        }

    // Random batches: each batch has its own stream, so the first violation
    // in (batch, index) order does not depend on the thread count.
    const long nbatches = (opt.samples + opt.batch_size - 1) / opt.batch_size;
    const Condition order[] = {Condition::unsafe, Condition::init, Condition::decrease};
    for (Condition c : order) {
        auto run_batch = [&](long b, std::optional<Violation>& out, long& count) {
            Rng rng = substream(opt.seed, (static_cast<std::uint64_t>(c) << 32) | static_cast<std::uint64_t>(b));
            const long n = std::min<long>(opt.batch_size, opt.samples - b * opt.batch_size);
            count = 0;
            for (long k = 0; k < n; ++k) {
                ++count;
                if (c != Condition::decrease) {
                    const Box& box = c == Condition::unsafe ? sets.Xu : sets.X0;
                    const Eigen::VectorXd x = uniform_vector(rng, box.lower(), box.upper());
                    const double m = state_margin(B, epsilon, c, x);
                    if (m > opt.slack) {
                        out = Violation{c, x, {}, {}, {}, m};
                        return;
                    }
                    continue;
                }
                Eigen::VectorXd x;
                int tries = 0;
                do {
                    x = uniform_vector(rng, sets.Zx.lower(), sets.Zx.upper());
                    if (++tries > max_rejections) throw InvalidInput("check: Zx \\ Xu is empty or too small to sample");
                } while (sets.Xu.contains(x));
                const Eigen::VectorXd u = uniform_vector(rng, sets.Zu.lower(), sets.Zu.upper());
                const Eigen::VectorXd d = sample_zonotope(noise, rng);
                Eigen::MatrixXd ab;
                if (AB) {
                    ab.resize(AB->rows(), AB->cols());
                    for (Eigen::Index j = 0; j < ab.cols(); ++j)
                        for (Eigen::Index i = 0; i < ab.rows(); ++i)
                            ab(i, j) = uniform(rng, AB->lower()(i, j), AB->upper()(i, j));
                }
                const double m = margin(x, u, d, ab);
                if (m > opt.slack) {
                    out = Violation{c, x, u, d, ab, m};
                    return;
                }
            }
        };
        const int threads = std::max(1, opt.threads);
        for (long first = 0; first < nbatches; first += threads) {
            const long wave = std::min<long>(threads, nbatches - first);
            std::vector<std::optional<Violation>> found(static_cast<std::size_t>(wave));
            std::vector<long> counts(static_cast<std::size_t>(wave), 0);
            if (wave == 1) {
                run_batch(first, found[0], counts[0]);
            } else {
                std::vector<std::thread> pool;
                for (long t = 0; t < wave; ++t)
                    pool.emplace_back([&, t] { run_batch(first + t, found[static_cast<std::size_t>(t)], counts[static_cast<std::size_t>(t)]); });
                for (auto& th : pool) th.join();
            }
            for (long t = 0; t < wave; ++t) {
                res.evaluated += counts[static_cast<std::size_t>(t)];
                if (found[static_cast<std::size_t>(t)]) return fail(*found[static_cast<std::size_t>(t)]);
            }
        }
    }
    res.pass = true;
    return res;
}

} // namespace

CheckResult check_sampling(const Polynomial& B, double epsilon, const ModelSet& ms, const ScenarioSets& sets,
                           const CheckOptions& opt)
{
    require_dims(ms.n_x() == sets.Zx.dim() && ms.n_u() == sets.Zu.dim(), "check_sampling: model/set mismatch");
    return run_checks(
        B, epsilon, sets, ms.disturbance,
        [&](const Eigen::VectorXd& x, const Eigen::VectorXd& u, const Eigen::VectorXd& d, const Eigen::MatrixXd&) {
            return nominal_margin(B, ms, x, u, d);
        },
        opt);
}

CheckResult check_true_dynamics(const Polynomial& B, double epsilon, const TrueSystem& sys,
                                const ScenarioSets& sets, const CheckOptions& opt)
{
    sys.validate();
    require_dims(sys.n_x() == sets.Zx.dim() && sys.n_u() == sets.Zu.dim(), "check_true_dynamics: system/set mismatch");
    return run_checks(
        B, epsilon, sets, sys.noise,
        [&](const Eigen::VectorXd& x, const Eigen::VectorXd& u, const Eigen::VectorXd& w, const Eigen::MatrixXd&) {
            return true_margin(B, sys, x, u, w);
        },
        opt);
}

double interval_model_margin(const Polynomial& B, const Eigen::MatrixXd& AB, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& u, const Eigen::VectorXd& w)
{
    const Eigen::Index nx = x.size();
    const Eigen::VectorXd next = AB.leftCols(nx) * x + AB.rightCols(AB.cols() - nx) * u + w;
    return B.eval(next) - B.eval(x);
}

CheckResult check_interval_model(const Polynomial& B, double epsilon, const IntervalMatrix& AB, const Zonotope& Zw,
                                 const ScenarioSets& sets, const CheckOptions& opt)
{
    require_dims(AB.rows() == sets.Zx.dim() && AB.cols() == sets.Zx.dim() + sets.Zu.dim(),
                 "check_interval_model: interval/set mismatch");
    return run_checks(
        B, epsilon, sets, Zw,
        [&](const Eigen::VectorXd& x, const Eigen::VectorXd& u, const Eigen::VectorXd& w, const Eigen::MatrixXd& ab) {
            return interval_model_margin(B, ab, x, u, w);
        },
        opt, &AB);
}

// ---------------------------------------------------------------------------
// Interval bounds

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

Interval widen(double lo, double hi) { return {std::nextafter(lo, -inf), std::nextafter(hi, inf)}; }

Interval operator+(Interval a, Interval b) { return widen(a.lo + b.lo, a.hi + b.hi); }

Interval operator*(Interval a, Interval b)
{
    const double p[] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return widen(*std::min_element(p, p + 4), *std::max_element(p, p + 4));
}

using TermList = std::vector<std::pair<const Monomial*, double>>;

// Horner in variable v with interval coefficients from the remaining ones.
Interval horner(const TermList& terms, std::size_t v, const std::vector<Interval>& box)
{
    if (terms.empty()) return {0.0, 0.0};
    if (v == box.size()) {
        // Every term has an exhausted exponent vector; they are constants.
        Interval sum{0.0, 0.0};
        for (const auto& t : terms) sum = sum + Interval{t.second, t.second};
        return sum;
    }
    std::map<int, TermList> by_power;
    for (const auto& t : terms) by_power[(*t.first)[v]].push_back(t);
    const int top = by_power.rbegin()->first;
    Interval r = horner(by_power[top], v + 1, box);
    for (int k = top - 1; k >= 0; --k) {
        r = r * box[v];
        auto it = by_power.find(k);
        if (it != by_power.end()) r = r + horner(it->second, v + 1, box);
    }
    return r;
}

std::vector<Interval> to_intervals(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi)
{
    std::vector<Interval> out(static_cast<std::size_t>(lo.size()));
    for (Eigen::Index i = 0; i < lo.size(); ++i) out[static_cast<std::size_t>(i)] = {lo[i], hi[i]};
    return out;
}

// Cell `index` of a grid with `per_axis` cells along each axis of `box`.
Box grid_cell(const Box& box, long index, long per_axis)
{
    Eigen::VectorXd lo(box.dim()), hi(box.dim());
    for (Eigen::Index i = 0; i < box.dim(); ++i) {
        const long k = index % per_axis;
        index /= per_axis;
        const double w = (box.upper()[i] - box.lower()[i]) / static_cast<double>(per_axis);
        lo[i] = box.lower()[i] + w * static_cast<double>(k);
        hi[i] = k + 1 == per_axis ? box.upper()[i] : box.lower()[i] + w * static_cast<double>(k + 1);
    }
    return Box(lo, hi);
}

// Probe points of a cell: its center, then its corners.
std::vector<Eigen::VectorXd> probes(const Box& cell)
{
    std::vector<Eigen::VectorXd> pts{cell.center()};
    if (cell.dim() <= max_corner_bits)
        for (unsigned long bits = 0; bits < (1UL << cell.dim()); ++bits) pts.push_back(corner(cell, bits));
    return pts;
}

} // namespace

Interval interval_eval(const Polynomial& p, const std::vector<Interval>& box)
{
    require_dims(box.size() == p.num_vars(), "interval_eval: box dimension mismatch");
    TermList terms;
    terms.reserve(p.size());
    for (const auto& [m, c] : p.terms()) terms.emplace_back(&m, c);
    return horner(terms, 0, box);
}

IntervalCheckResult check_interval_bound(const Polynomial& B, double epsilon, const ModelSet& ms,
                                         const ScenarioSets& sets, int depth, double slack)
{
    if (depth < 0) throw InvalidInput("check_interval_bound: depth must be >= 0");
    if (!(epsilon > 0)) throw InvalidInput("check_interval_bound: epsilon must be positive");
    const std::size_t nx = static_cast<std::size_t>(ms.n_x()), nu = static_cast<std::size_t>(ms.n_u());
    require_dims(B.num_vars() == nx && sets.Zx.dim() == ms.n_x() && sets.Zu.dim() == ms.n_u(),
                 "check_interval_bound: dimension mismatch");
    const long per_axis = 1L << depth;
    const double cells_d = std::pow(static_cast<double>(per_axis), static_cast<double>(nx));
    if (cells_d > 1e7) throw InvalidInput("check_interval_bound: more than 1e7 cells; lower the depth");
    const long cells = static_cast<long>(cells_d);

    IntervalCheckResult res;
    res.verdict = IntervalVerdict::sound_pass;
    auto finish_violation = [&](Violation v) {
        res.verdict = IntervalVerdict::violation;
        res.violation = std::move(v);
        return res;
    };

    const Condition state_order[] = {Condition::unsafe, Condition::init};
    for (Condition c : state_order) {
        const Box& box = c == Condition::unsafe ? sets.Xu : sets.X0;
        IntervalConditionReport rep;
        rep.condition = c;
        double unknown_volume = 0.0;
        for (long k = 0; k < cells; ++k) {
            const Box cell = grid_cell(box, k, per_axis);
            ++rep.cells;
            const Interval b = interval_eval(B, to_intervals(cell.lower(), cell.upper()));
            // margin = B (init) or eps - B (unsafe), enclosed outward
            const Interval m = c == Condition::init ? b : widen(epsilon - b.hi, epsilon - b.lo);
            if (m.hi <= slack) {
                ++rep.proven;
                continue;
            }
            for (const auto& x : probes(cell)) {
                const double mv = state_margin(B, epsilon, c, x);
                if (mv > slack) {
                    rep.unknown_volume_fraction = box.volume() > 0 ? unknown_volume / box.volume() : 0.0;
                    res.conditions.push_back(rep);
                    return finish_violation({c, x, {}, {}, {}, mv});
                }
            }
            ++rep.unknown;
            unknown_volume += cell.volume();
        }
        const double vol = box.volume();
        rep.unknown_volume_fraction = vol > 0 ? unknown_volume / vol : (rep.unknown ? 1.0 : 0.0);
        if (rep.unknown) res.verdict = IntervalVerdict::unknown;
        res.conditions.push_back(rep);
    }

    // Decrease: q(x, u, d) = B(A_c x + B_c u + d) - B(x) over cell x Zu x hull(Z_d).
    const std::size_t nv = 2 * nx + nu;
    Eigen::MatrixXd M(nx, nv);
    M << ms.A_c, ms.B_c, Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(nx));
    std::vector<std::size_t> xpos(nx);
    for (std::size_t i = 0; i < nx; ++i) xpos[i] = i;
    const Polynomial q = B.compose_affine(M, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nx))) - B.embed(nv, xpos);
    const Box dhull = interval_hull(ms.disturbance);
    std::vector<Eigen::VectorXd> d_probes{ms.disturbance.center()};
    if (nx <= max_corner_bits)
        for (unsigned long bits = 0; bits < (1UL << nx); ++bits) d_probes.push_back(support_vertex(ms.disturbance, bits));
    std::vector<Eigen::VectorXd> u_probes{sets.Zu.center()};
    if (nu <= max_corner_bits)
        for (unsigned long bits = 0; bits < (1UL << nu); ++bits) u_probes.push_back(corner(sets.Zu, bits));

    IntervalConditionReport rep;
    rep.condition = Condition::decrease;
    double unknown_volume = 0.0;
    for (long k = 0; k < cells; ++k) {
        const Box cell = grid_cell(sets.Zx, k, per_axis);
        if (sets.Xu.contains(cell)) continue;  // no decrease obligation inside Xu
        ++rep.cells;
        std::vector<Interval> box = to_intervals(cell.lower(), cell.upper());
        for (const auto& iv : to_intervals(sets.Zu.lower(), sets.Zu.upper())) box.push_back(iv);
        for (const auto& iv : to_intervals(dhull.lower(), dhull.upper())) box.push_back(iv);
        if (interval_eval(q, box).hi <= slack) {
            ++rep.proven;
            continue;
        }
        for (const auto& x : probes(cell)) {
            if (sets.Xu.contains(x)) continue;
            for (const auto& u : u_probes)
                for (const auto& d : d_probes) {
                    const double mv = nominal_margin(B, ms, x, u, d);
                    if (mv > slack) {
                        rep.unknown_volume_fraction = sets.Zx.volume() > 0 ? unknown_volume / sets.Zx.volume() : 0.0;
                        res.conditions.push_back(rep);
                        return finish_violation({Condition::decrease, x, u, d, {}, mv});
                    }
                }
        }
        ++rep.unknown;
        unknown_volume += cell.volume();
    }
    const double vol = sets.Zx.volume();
    rep.unknown_volume_fraction = vol > 0 ? unknown_volume / vol : (rep.unknown ? 1.0 : 0.0);
    if (rep.unknown) res.verdict = IntervalVerdict::unknown;
    res.conditions.push_back(rep);
    return res;
}

// ---------------------------------------------------------------------------

InputPolicy uniform_policy(const Box& Zu)
{
    return [Zu](int, const Eigen::VectorXd&, Rng& rng) { return uniform_vector(rng, Zu.lower(), Zu.upper()); };
}

SafetyReport safety_monte_carlo(const TrueSystem& sys, const Box& X0, const Box& Xu, const InputPolicy& policy,
                                int horizon, long trials, std::uint64_t seed, const std::optional<Box>& domain)
{
    sys.validate();
    require_dims(X0.dim() == sys.n_x() && Xu.dim() == sys.n_x(), "safety_monte_carlo: set dimension mismatch");
    if (horizon < 0 || trials < 0) throw InvalidInput("safety_monte_carlo: negative horizon or trial count");
    SafetyReport rep;
    rep.trials = trials;
    for (long t = 0; t < trials; ++t) {
        Rng rng = substream(seed, static_cast<std::uint64_t>(t));
        Eigen::MatrixXd states(sys.n_x(), horizon + 1);
        states.col(0) = uniform_vector(rng, X0.lower(), X0.upper());
        int entered = Xu.contains(states.col(0)) ? 0 : -1;
        bool left = false;
        for (int k = 0; k < horizon && entered < 0; ++k) {
            const Eigen::VectorXd x = states.col(k);
            const Eigen::VectorXd u = policy(k, x, rng);
            require_dims(u.size() == sys.n_u(), "safety_monte_carlo: policy returned a wrong-sized input");
            const Eigen::VectorXd w = sample_zonotope(sys.noise, rng);
            states.col(k + 1) = sys.A * x + sys.B * u + w;
            if (domain && !domain->contains(states.col(k + 1))) left = true;
            if (Xu.contains(states.col(k + 1))) entered = k + 1;
        }
        if (left) ++rep.left_domain;
        if (entered >= 0) {
            ++rep.unsafe_trials;
            if (rep.safe) {
                rep.safe = false;
                rep.first_unsafe_trial = t;
                rep.prefix = states.leftCols(entered + 1);
            }
        }
    }
    return rep;
}

} // namespace zb
