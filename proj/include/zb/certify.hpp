#ifndef ZB_CERTIFY_HPP
#define ZB_CERTIFY_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "zb/polynomial.hpp"
#include "zb/random.hpp"
#include "zb/setcalc.hpp"
#include "zb/sos.hpp"
#include "zb/sysid.hpp"

namespace zb {

enum class Condition { init, unsafe, decrease };
std::string to_string(Condition c);

/// A point where one barrier condition fails. `margin` is the signed amount
/// of failure: B(x) for init, eps - B(x) for unsafe and B(x+) - B(x) for
/// decrease; a violation has margin > slack.
struct Violation {
    Condition condition = Condition::init;
    Eigen::VectorXd x;
    Eigen::VectorXd u;  ///< decrease only
    Eigen::VectorXd d;  ///< decrease only: d (model set) or w (true system, interval model)
    Eigen::MatrixXd AB; ///< decrease only, interval model: the sampled [A B]
    double margin = 0.0;
};

struct CheckOptions {
    long samples = 100000;  ///< random points per condition, after the box corners
    std::uint64_t seed = 1;
    double slack = 1e-9;
    int batch_size = 4096;
    int threads = 1;
};

struct CheckResult {
    bool pass = false;
    std::optional<Violation> violation;
    long evaluated = 0;  ///< points evaluated before stopping
};

/// Margin of the init or unsafe condition at x.
double state_margin(const Polynomial& B, double epsilon, Condition c, const Eigen::VectorXd& x);
/// B(A_c x + B_c u + d) - B(x).
double nominal_margin(const Polynomial& B, const ModelSet& ms, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                      const Eigen::VectorXd& d);
/// B(A x + B u + w) - B(x) for the true system.
double true_margin(const Polynomial& B, const TrueSystem& sys, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& w);

/// Falsification of the model-set conditions: x in Xu, x in X0, then
/// (x in Zx \ Xu, u in Zu, d in Z_d). Box corners are checked before the
/// random points; the reported witness is the first failure in that order.
CheckResult check_sampling(const Polynomial& B, double epsilon, const ModelSet& ms, const ScenarioSets& sets,
                           const CheckOptions& opt = {});

/// As check_sampling, with the decrease condition taken over the true
/// dynamics and w in the noise zonotope.
CheckResult check_true_dynamics(const Polynomial& B, double epsilon, const TrueSystem& sys,
                                const ScenarioSets& sets, const CheckOptions& opt = {});

/// As check_sampling, with the decrease condition B(A x + B u + w) <= B(x)
/// for every [A B] in the interval matrix and w in Zw. Corners use the
/// interval center; random points draw [A B] uniformly over the interval.
CheckResult check_interval_model(const Polynomial& B, double epsilon, const IntervalMatrix& AB, const Zonotope& Zw,
                                 const ScenarioSets& sets, const CheckOptions& opt = {});
/// B(A x + B u + w) - B(x) with [A B] given as one matrix.
double interval_model_margin(const Polynomial& B, const Eigen::MatrixXd& AB, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& u, const Eigen::VectorXd& w);

enum class IntervalVerdict { sound_pass, unknown, violation };
std::string to_string(IntervalVerdict v);

/// On a violation the report covers the cells scanned up to the witness.
struct IntervalConditionReport {
    Condition condition = Condition::init;
    long cells = 0;
    long proven = 0;
    long unknown = 0;
    double unknown_volume_fraction = 0.0;
};

struct IntervalCheckResult {
    IntervalVerdict verdict = IntervalVerdict::unknown;
    std::vector<IntervalConditionReport> conditions;
    std::optional<Violation> violation;
};

/// Interval enclosure of p over a box: per-variable Horner evaluation with
/// every operation rounded outward by one ulp.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};
Interval interval_eval(const Polynomial& p, const std::vector<Interval>& box);

/// Bounds each condition over a grid of 2^depth cells per state axis; the
/// decrease condition keeps u and d over their whole boxes (d over the hull
/// of Z_d). Cells that cannot be decided are probed at a few points and a
/// Violation is only reported with such a concrete witness.
IntervalCheckResult check_interval_bound(const Polynomial& B, double epsilon, const ModelSet& ms,
                                         const ScenarioSets& sets, int depth, double slack = 1e-9);

/// Chooses u_k from the step index, the current state and a random stream.
using InputPolicy = std::function<Eigen::VectorXd(int, const Eigen::VectorXd&, Rng&)>;
/// Uniform sampling over a box at every step.
InputPolicy uniform_policy(const Box& Zu);

struct SafetyReport {
    bool safe = true;
    long trials = 0;
    long unsafe_trials = 0;
    long first_unsafe_trial = -1;
    Eigen::MatrixXd prefix;  ///< states of the first unsafe trajectory up to the entry into Xu
    /// Trials whose states left `domain` at some step (reported, not a failure).
    long left_domain = 0;
};

SafetyReport safety_monte_carlo(const TrueSystem& sys, const Box& X0, const Box& Xu, const InputPolicy& policy,
                                int horizon, long trials, std::uint64_t seed,
                                const std::optional<Box>& domain = std::nullopt);

} // namespace zb

#endif
