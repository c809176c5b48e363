#ifndef ZB_RANDOM_HPP
#define ZB_RANDOM_HPP

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace zb {

// The standard distributions are implementation-defined, so sampled data
// would differ between standard libraries. These draw directly from the
// 64-bit engine output and are reproducible everywhere.

using Rng = std::mt19937_64;

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

inline Eigen::VectorXd uniform_vector(Rng& rng, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi)
{
    Eigen::VectorXd v(lo.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = uniform(rng, lo[i], hi[i]);
    return v;
}

/// Coefficient vector uniform on [-1, 1]^n.
inline Eigen::VectorXd uniform_beta(Rng& rng, Eigen::Index n)
{
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(rng, -1.0, 1.0);
    return v;
}

/// Independent stream for (seed, index), e.g. per batch or per worker.
inline Rng substream(std::uint64_t seed, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return Rng(seq);
}

} // namespace zb

#endif
