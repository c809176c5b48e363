#ifndef ZB_CONIC_HPP
#define ZB_CONIC_HPP

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace zb {

enum class ConeKind { psd, nonneg };

/// One diagonal block of the cone: a PSD matrix or a nonnegative vector.
struct Block {
    int size = 0;
    ConeKind kind = ConeKind::psd;
};

/// Upper-triangle entry (row <= col) of a block matrix; 0-based.
/// For nonneg blocks row == col.
struct Entry {
    int block = 0;
    int row = 0;
    int col = 0;
    double value = 0.0;

    friend bool operator==(const Entry&, const Entry&) = default;
};

/// Standard-form conic program
///
///     minimize <C, X>  s.t.  <A_i, X> = b_i (i = 1..m),  X in K,
///
/// with K a product of PSD and nonnegative-orthant blocks. Its dual is
///
///     maximize b'y  s.t.  S = C - sum_i y_i A_i in K.
///
/// Off-diagonal entries stand for both symmetric positions.
struct SdpProblem {
    std::vector<Block> blocks;
    Eigen::VectorXd b;
    std::vector<Entry> objective;
    std::vector<std::vector<Entry>> constraints;

    int num_constraints() const { return static_cast<int>(constraints.size()); }
    /// Sum of block sizes (the barrier parameter of K).
    int cone_dimension() const;
    bool is_feasibility_problem() const { return objective.empty(); }

    /// Throws InvalidInput on malformed blocks, out-of-range entries, NaN/Inf.
    void validate() const;

    friend bool operator==(const SdpProblem& a, const SdpProblem& b);
};

enum class SdpStatus { optimal, feasible, infeasible, indeterminate };

std::string to_string(SdpStatus s);

struct SolverOptions {
    double primal_tol = 1e-7;
    double dual_tol = 1e-7;
    double gap_tol = 1e-7;
    double infeasibility_tol = 1e-7;
    int max_iterations = 200;
    double step_fraction = 0.95;
    /// Problems with more equality constraints than this are not attempted
    /// (the dense Schur complement would not fit desk-scale resources).
    int max_constraints = 8000;
    bool verbose = false;

    /// Reads "key = value" pairs; unknown keys throw InvalidInput.
    static SolverOptions from_key_values(const std::map<std::string, std::string>& kv);
    std::map<std::string, std::string> to_key_values() const;
};

struct SdpSolution {
    SdpStatus status = SdpStatus::indeterminate;
    /// Per block: dense matrix for PSD blocks, column vector for nonneg blocks.
    std::vector<Eigen::MatrixXd> X;
    std::vector<Eigen::MatrixXd> S;
    Eigen::VectorXd y;

    double primal_objective = 0.0;
    double dual_objective = 0.0;
    double primal_residual = 0.0;   ///< ||b - A(X)|| / (1 + ||b||)
    double dual_residual = 0.0;     ///< ||C - A*(y) - S|| / (1 + ||C||)
    double gap = 0.0;               ///< |<C,X> - b'y| / (1 + |<C,X>| + |b'y|)
    double infeasibility_residual = 0.0;  ///< ||A*(y) + S|| with b'y = 1, for infeasible status
    double min_eigenvalue = 0.0;    ///< smallest eigenvalue over all blocks of X
    int iterations = 0;
    std::string message;
};

SdpSolution solve(const SdpProblem& problem, const SolverOptions& options = {});

/// <A_i, X> for a block value laid out like SdpSolution::X.
double apply_constraint(const std::vector<Entry>& entries, const std::vector<Eigen::MatrixXd>& X,
                        const std::vector<Block>& blocks);

void export_sdpa(const SdpProblem& problem, const std::string& path);
std::string format_sdpa(const SdpProblem& problem);
SdpProblem parse_sdpa(const std::string& path);
SdpProblem parse_sdpa_text(const std::string& text);

} // namespace zb

#endif
