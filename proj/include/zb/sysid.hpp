#ifndef ZB_SYSID_HPP
#define ZB_SYSID_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "zb/error.hpp"
#include "zb/setcalc.hpp"

namespace zb {

/// Ground truth x+ = A x + B u + w with w in the noise zonotope.
struct TrueSystem {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Zonotope noise;

    Eigen::Index n_x() const { return A.rows(); }
    Eigen::Index n_u() const { return B.cols(); }
    /// Shapes consistent and the origin inside the noise zonotope.
    void validate() const;
};

struct Trajectory {
    Eigen::MatrixXd states;  ///< n_x x (L+1)
    Eigen::MatrixXd inputs;  ///< n_u x L
    Eigen::MatrixXd noise;   ///< n_x x L, the realized w_k
};

/// Rolls the system forward over the columns of `inputs`; noise coefficients
/// are drawn uniformly on [-1, 1] from a stream seeded by `seed`.
Trajectory simulate(const TrueSystem& sys, const Eigen::VectorXd& x0, const Eigen::MatrixXd& inputs,
                    std::uint64_t seed);

struct DataSet {
    Eigen::MatrixXd X_plus;
    Eigen::MatrixXd X_minus;
    Eigen::MatrixXd U_minus;
    /// Column index where each trajectory after the first starts.
    std::vector<Eigen::Index> boundaries;
    std::uint64_t seed = 0;

    Eigen::Index T() const { return X_minus.cols(); }
    Eigen::Index n_x() const { return X_minus.rows(); }
    Eigen::Index n_u() const { return U_minus.rows(); }
    /// X_minus stacked over U_minus.
    Eigen::MatrixXd D_minus() const;
};

DataSet assemble(const std::vector<Trajectory>& trajectories, std::uint64_t seed = 0);

struct RankReport {
    bool full_row_rank = false;
    Eigen::Index rank = 0;
    Eigen::VectorXd singular_values;
};

/// Rank by singular values above 1e-10 * sigma_max.
RankReport check_rank(const Eigen::MatrixXd& D);
inline RankReport check_rank(const DataSet& ds) { return check_rank(ds.D_minus()); }

class RankDeficientError : public InvalidInput {
public:
    RankDeficientError(const std::string& what, Eigen::VectorXd sv) : InvalidInput(what), singular_values(std::move(sv)) {}
    Eigen::VectorXd singular_values;
};

/// D^T (D D^T)^{-1} for full-row-rank D.
Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& D);

/// All n_x x T matrices whose columns each lie in Z_w. Generator (k, i)
/// carries g_i in column k; generators are ordered by time k, then i.
MatrixZonotope noise_matrix_zonotope(const Zonotope& Zw, Eigen::Index T);

struct ModelSet {
    MatrixZonotope mz;          ///< set of [A B] consistent with the data
    Eigen::MatrixXd A_c, B_c;   ///< center split
    IntervalMatrix interval;
    Zonotope disturbance;       ///< Z_d: the generator part over Z_x x Z_u plus Z_w

    Eigen::Index n_x() const { return A_c.rows(); }
    Eigen::Index n_u() const { return B_c.cols(); }
    /// Interval bounds of the A and B blocks.
    IntervalMatrix interval_A() const;
    IntervalMatrix interval_B() const;
};

ModelSet identify(const DataSet& ds, const Zonotope& Zw, const Box& Zx, const Box& Zu);

/// CSV per matrix (X_plus.csv, X_minus.csv, U_minus.csv; columns are time)
/// plus manifest.json with dims, T, seed and boundaries.
void write_dataset(const DataSet& ds, const std::string& dir);
DataSet read_dataset(const std::string& dir);

} // namespace zb

#endif
