#ifndef ZB_SOS_HPP
#define ZB_SOS_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "zb/conic.hpp"
#include "zb/polynomial.hpp"
#include "zb/setcalc.hpp"
#include "zb/sysid.hpp"

namespace zb {

/// Polynomial whose coefficients are affine in the free decision variables:
/// constant + sum_j c_j * linear[j].second, with c_j indexed by linear[j].first.
struct AffinePolynomial {
    Polynomial constant;
    std::vector<std::pair<int, Polynomial>> linear;

    explicit AffinePolynomial(std::size_t num_vars = 0) : constant(num_vars) {}
    std::size_t num_vars() const { return constant.num_vars(); }
    int degree() const;
    /// Fixes the free variables at `values`.
    Polynomial evaluate(const std::vector<double>& values) const;
};

/// target - sum_i lambda_i g_i is SOS, with every lambda_i SOS of the given
/// (even) degree.
struct SosConstraintSpec {
    std::string name;            ///< e.g. "init"; names dictionary entries
    std::string sigma_name;      ///< e.g. "sigma_0"
    std::string multiplier_name; ///< e.g. "lambda_0"
    AffinePolynomial target;
    std::vector<Polynomial> g;
    std::vector<int> multiplier_degrees;  ///< one per g
    /// Trim the witness basis by the per-variable degree bound.
    bool trim_basis = false;
};

struct GramBlock {
    std::string name;
    int block = 0;
    std::vector<Monomial> basis;
};

struct LoweredConstraint {
    std::string name;
    int gram_degree = 0;
    GramBlock sigma;
    std::vector<GramBlock> multipliers;
    int first_row = 0;
    int num_rows = 0;
};

/// Named handle on one scalar of the SDP: sign * X[block](row, col).
struct DictEntry {
    std::string name;
    int block = 0;
    int row = 0;
    int col = 0;
    double sign = 1.0;
};

struct LoweredSos {
    SdpProblem sdp;
    std::vector<LoweredConstraint> constraints;
    std::vector<DictEntry> dictionary;
    int free_block = -1;  ///< nonneg block holding (c+, c-), or -1
    int num_free = 0;
};

/// Collection of free scalars and SOS constraints, lowered to one SDP by the
/// Gram encoding with coefficient matching in graded-lex order.
class SosProgram {
public:
    /// Returns the index of the first new variable; names are prefix_<k>.
    int add_free_variables(int count, const std::string& prefix);
    void add_constraint(SosConstraintSpec spec);

    int num_free() const { return static_cast<int>(free_names_.size()); }
    const std::vector<std::string>& free_names() const { return free_names_; }
    const std::vector<SosConstraintSpec>& constraints() const { return constraints_; }

    LoweredSos lower() const;

private:
    std::vector<std::string> free_names_;
    std::vector<SosConstraintSpec> constraints_;
};

/// Witness degree 2d for a target of degree D with multipliers of degree k
/// on g of degree e: d = ceil(max(D, k + e) / 2).
int gram_half_degree(int target_degree, const std::vector<int>& multiplier_degrees, const std::vector<Polynomial>& g);

/// Smallest even k with k + g_degree >= target degree, so the multiplier
/// terms can absorb the target's leading part.
int default_multiplier_degree(int target_degree, int g_degree = 1);

/// Free-variable values c_j = c+_j - c-_j read from a solution.
std::vector<double> free_values(const LoweredSos& low, const SdpSolution& sol);

/// m^T Q m over the block's basis.
Polynomial gram_polynomial(const GramBlock& g, const Eigen::MatrixXd& Q, std::size_t num_vars);

struct ConstraintResidual {
    std::string name;
    double residual = 0.0;        ///< max coefficient gap between both reconstructions
    double min_eigenvalue = 0.0;  ///< over the constraint's Gram blocks
};

/// Per constraint: |coeff(target(c) - sum lambda_i g_i) - coeff(m^T Q_0 m)|.
std::vector<ConstraintResidual> gram_residuals(const SosProgram& prog, const LoweredSos& low,
                                               const std::vector<Eigen::MatrixXd>& X);

// ---------------------------------------------------------------------------
// Barrier synthesis

enum class SynthesisMode { nominal, robust };
std::string to_string(SynthesisMode m);

struct BarrierTemplate {
    int degree = 0;
    std::size_t num_vars = 0;
    std::vector<Monomial> basis;  ///< all monomials of degree <= degree, grlex
    int first_variable = 0;       ///< index of c_0 among the program's free variables

    Polynomial polynomial(const std::vector<double>& coeffs) const;
};

struct ScenarioSets {
    Box Zx, Zu, X0, Xu;
};

struct BarrierOptions {
    int degree = 4;
    double epsilon = 1e-2;
    /// Even multiplier degrees; unset picks default_multiplier_degree per constraint.
    std::optional<int> multiplier_degree;
    /// Refuse to expand when any witness basis exceeds this many monomials.
    std::size_t basis_cap = 5000;
    bool trim_basis = false;
    /// Certificate to check instead of synthesize (multipliers only are free).
    std::optional<Polynomial> fixed_barrier;
};

struct ConstraintSize {
    std::string name;
    std::size_t num_vars = 0;
    int target_degree = 0;
    int multiplier_degree = 0;
    int gram_degree = 0;             ///< half degree d of the witness
    double basis_size = 0;           ///< C(n + d, d)
    double rows = 0;                 ///< C(n + 2d, 2d)
    std::size_t num_multipliers = 0;
    double multiplier_basis_size = 0;
};

struct SizeReport {
    std::vector<ConstraintSize> constraints;
    double total_rows = 0;
    double largest_basis = 0;
    double free_variables = 0;
};

struct SynthesisProblem {
    SynthesisMode mode = SynthesisMode::nominal;
    double epsilon = 0.0;
    std::size_t quantified_variables = 0;  ///< variable count of the decrease constraint
    std::vector<std::string> variable_names;
    BarrierTemplate barrier;
    std::optional<Polynomial> fixed_barrier;
    SizeReport size;
    bool refused = false;
    std::string diagnostic;
    SosProgram program;
    LoweredSos lowered;  ///< empty when refused
};

/// Nominal mode: x+ = A_c x + B_c u + d with d in `Zd`.
SynthesisProblem assemble_nominal(const Eigen::MatrixXd& A_c, const Eigen::MatrixXd& B_c, const ScenarioSets& sets,
                                  const Box& Zd, const BarrierOptions& opt);
inline SynthesisProblem assemble_nominal(const ModelSet& ms, const ScenarioSets& sets, const BarrierOptions& opt)
{
    return assemble_nominal(ms.A_c, ms.B_c, sets, interval_hull(ms.disturbance), opt);
}

/// Robust mode: x+ = A x + B u + w with [A B] in `AB` and w in `Zw`.
SynthesisProblem assemble_robust(const IntervalMatrix& AB, const ScenarioSets& sets, const Box& Zw,
                                 const BarrierOptions& opt);

struct Certificate {
    Polynomial barrier;
    double epsilon = 0.0;
    std::vector<ConstraintResidual> residuals;
    double max_residual = 0.0;
    double min_eigenvalue = 0.0;
    bool sound = false;
    std::string message;
};

/// Reads B from the solution and re-derives every constraint polynomial from
/// extracted coefficients and from the Gram blocks; sound when all residuals
/// are <= tol and the Gram blocks pass the eigenvalue floor.
Certificate extract_certificate(const SynthesisProblem& sp, const SdpSolution& sol, double tol = 1e-6);

} // namespace zb

#endif
