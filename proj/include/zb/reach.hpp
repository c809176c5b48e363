#ifndef ZB_REACH_HPP
#define ZB_REACH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "zb/setcalc.hpp"
#include "zb/sysid.hpp"

namespace zb {

struct ReductionEvent {
    int step = 0;
    Eigen::Index before = 0;
    Eigen::Index after = 0;
};

struct ReachSequence {
    std::vector<Zonotope> sets;                ///< R_0 .. R_N
    std::vector<Eigen::Index> generator_counts;  ///< after reduction, per set
    std::vector<ReductionEvent> reductions;

    /// CSV with header step,dim,lower,upper; one row per step and coordinate.
    std::string hulls_csv() const;
};

/// M_Sigma (R x U) + Z_w.
Zonotope reach_step(const ModelSet& ms, const Zonotope& R, const Zonotope& U, const Zonotope& Zw);

/// N steps from X0 with order reduction to max_generators after each step;
/// max_generators <= 0 selects 5 n_x.
ReachSequence reach_horizon(const ModelSet& ms, const Zonotope& X0, const Zonotope& U, const Zonotope& Zw, int N,
                            Eigen::Index max_generators = 0);
/// Per-step input sets U_0 .. U_{N-1}.
ReachSequence reach_horizon(const ModelSet& ms, const Zonotope& X0, const std::vector<Zonotope>& U,
                            const Zonotope& Zw, Eigen::Index max_generators = 0);

/// True-system trajectories from uniform points of X0 under uniform inputs
/// from U; entry k holds the states at step k, one column per sample.
std::vector<Eigen::MatrixXd> sample_reachable(const TrueSystem& sys, const Zonotope& X0, const Zonotope& U, int N,
                                              int samples, std::uint64_t seed);

} // namespace zb

#endif
