#ifndef ZB_SETCALC_HPP
#define ZB_SETCALC_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "zb/polynomial.hpp"

namespace zb {

/// Zonotope <c, G> = { c + G beta : beta in [-1, 1]^gamma }.
///
/// Zero-length generator columns are pruned on construction, so
/// num_generators() counts only columns that move the set.
class Zonotope {
public:
    Zonotope() = default;
    explicit Zonotope(Eigen::VectorXd center);
    Zonotope(Eigen::VectorXd center, Eigen::MatrixXd generators);

    Eigen::Index dim() const { return center_.size(); }
    Eigen::Index num_generators() const { return generators_.cols(); }
    const Eigen::VectorXd& center() const { return center_; }
    const Eigen::MatrixXd& generators() const { return generators_; }
    bool is_singleton() const { return generators_.cols() == 0; }

    /// Point c + G beta.
    Eigen::VectorXd point(const Eigen::VectorXd& beta) const;

private:
    Eigen::VectorXd center_;
    Eigen::MatrixXd generators_;
};

/// Matrix zonotope <C, {G_1..G_gamma}> over n x m matrices.
class MatrixZonotope {
public:
    MatrixZonotope() = default;
    explicit MatrixZonotope(Eigen::MatrixXd center);
    MatrixZonotope(Eigen::MatrixXd center, std::vector<Eigen::MatrixXd> generators);

    Eigen::Index rows() const { return center_.rows(); }
    Eigen::Index cols() const { return center_.cols(); }
    std::size_t num_generators() const { return generators_.size(); }
    const Eigen::MatrixXd& center() const { return center_; }
    const std::vector<Eigen::MatrixXd>& generators() const { return generators_; }

    Eigen::MatrixXd member(const Eigen::VectorXd& beta) const;

private:
    Eigen::MatrixXd center_;
    std::vector<Eigen::MatrixXd> generators_;
};

/// Elementwise bounds lower <= M <= upper.
class IntervalMatrix {
public:
    IntervalMatrix() = default;
    IntervalMatrix(Eigen::MatrixXd lower, Eigen::MatrixXd upper);

    const Eigen::MatrixXd& lower() const { return lower_; }
    const Eigen::MatrixXd& upper() const { return upper_; }
    Eigen::Index rows() const { return lower_.rows(); }
    Eigen::Index cols() const { return lower_.cols(); }
    Eigen::MatrixXd width() const { return upper_ - lower_; }
    bool contains(const Eigen::MatrixXd& M, double slack = 0.0) const;

private:
    Eigen::MatrixXd lower_, upper_;
};

/// Axis-aligned box, the one-column interval matrix.
class Box {
public:
    Box() = default;
    Box(Eigen::VectorXd lower, Eigen::VectorXd upper);

    Eigen::Index dim() const { return lower_.size(); }
    const Eigen::VectorXd& lower() const { return lower_; }
    const Eigen::VectorXd& upper() const { return upper_; }
    Eigen::VectorXd center() const { return 0.5 * (lower_ + upper_); }
    Eigen::VectorXd radius() const { return 0.5 * (upper_ - lower_); }
    bool contains(const Eigen::VectorXd& x, double slack = 0.0) const;
    bool contains(const Box& other) const;
    bool intersects(const Box& other) const;
    double volume() const;

    /// The box as a zonotope with one axis-aligned generator per nonflat axis.
    Zonotope to_zonotope() const;

private:
    Eigen::VectorXd lower_, upper_;
};

Zonotope linear_map(const Eigen::MatrixXd& L, const Zonotope& Z);
Zonotope minkowski_sum(const Zonotope& a, const Zonotope& b);
Zonotope cartesian_product(const Zonotope& a, const Zonotope& b);
Box interval_hull(const Zonotope& Z);
IntervalMatrix to_interval(const MatrixZonotope& M);

/// Over-approximation of { M z : M in Mz, z in Z } treating the matrix and
/// vector coefficients as independent (cross terms become generators).
Zonotope matzono_times_zono(const MatrixZonotope& M, const Zonotope& Z);

/// Box (Girard) order reduction: keeps the generators with the largest
/// ||g||_1 - ||g||_inf and encloses the rest in their interval hull as dim
/// axis-aligned generators. Ties keep the earlier column.
Zonotope reduce_order(const Zonotope& Z, Eigen::Index max_generators);

/// For each coordinate i the pair x_i - lower_i, upper_i - x_i, as
/// polynomials in `num_vars` variables with x_i at index vars[i].
std::vector<Polynomial> box_to_polys(const Box& box, std::span<const std::size_t> vars, std::size_t num_vars);

enum class Membership { inside, outside, indeterminate };

struct MembershipResult {
    Membership verdict = Membership::indeterminate;
    Eigen::VectorXd witness;   ///< beta with c + G beta = x (when inside)
    double residual = 0.0;     ///< ||c + G beta - x||_inf of the witness
};

/// Decides x in Z by a linear feasibility problem on beta; |beta_i| <= 1 is
/// relaxed by 1e-8 and the witness equation must hold to 1e-8.
MembershipResult contains_point(const Zonotope& Z, const Eigen::VectorXd& x);

/// Decides X in M by flattening to a point-in-zonotope query.
MembershipResult contains_matrix(const MatrixZonotope& M, const Eigen::MatrixXd& X);

/// Column-major flattening of a matrix zonotope into a zonotope.
Zonotope flatten(const MatrixZonotope& M);

} // namespace zb

#endif
