#include "zb/reach.hpp"

#include <cstdio>
#include <sstream>

#include "zb/random.hpp"

namespace zb {

Zonotope reach_step(const ModelSet& ms, const Zonotope& R, const Zonotope& U, const Zonotope& Zw)
{
    require_dims(R.dim() == ms.mz.rows(), "reach step: state set dimension differs from the model set");
    require_dims(U.dim() == ms.mz.cols() - ms.mz.rows(), "reach step: input set dimension differs from the model set");
    require_dims(Zw.dim() == ms.mz.rows(), "reach step: noise dimension differs from the model set");
    return minkowski_sum(matzono_times_zono(ms.mz, cartesian_product(R, U)), Zw);
}

ReachSequence reach_horizon(const ModelSet& ms, const Zonotope& X0, const std::vector<Zonotope>& U,
                            const Zonotope& Zw, Eigen::Index max_generators)
{
    require_dims(X0.dim() == ms.mz.rows(), "reach: initial set dimension differs from the model set");
    if (max_generators <= 0) max_generators = 5 * X0.dim();
    ReachSequence seq;
    seq.sets.push_back(X0);
    seq.generator_counts.push_back(X0.num_generators());
    for (std::size_t k = 0; k < U.size(); ++k) {
        Zonotope next = reach_step(ms, seq.sets.back(), U[k], Zw);
        if (next.num_generators() > max_generators) {
            seq.reductions.push_back({static_cast<int>(k + 1), next.num_generators(), max_generators});
            next = reduce_order(next, max_generators);
            seq.reductions.back().after = next.num_generators();
        }
        seq.generator_counts.push_back(next.num_generators());
        seq.sets.push_back(std::move(next));
    }
    return seq;
}

ReachSequence reach_horizon(const ModelSet& ms, const Zonotope& X0, const Zonotope& U, const Zonotope& Zw, int N,
                            Eigen::Index max_generators)
{
    if (N < 0) throw InvalidInput("reach: horizon must be nonnegative");
    return reach_horizon(ms, X0, std::vector<Zonotope>(static_cast<std::size_t>(N), U), Zw, max_generators);
}

std::string ReachSequence::hulls_csv() const
{
    std::ostringstream os;
    os << "step,dim,lower,upper\n";
    char buf[96];
    for (std::size_t k = 0; k < sets.size(); ++k) {
        const Box h = interval_hull(sets[k]);
        for (Eigen::Index i = 0; i < h.dim(); ++i) {
            std::snprintf(buf, sizeof buf, "%zu,%td,%.17g,%.17g\n", k, i, h.lower()[i], h.upper()[i]);
            os << buf;
        }
    }
    return os.str();
}

std::vector<Eigen::MatrixXd> sample_reachable(const TrueSystem& sys, const Zonotope& X0, const Zonotope& U, int N,
                                              int samples, std::uint64_t seed)
{
    require_dims(X0.dim() == sys.n_x() && U.dim() == sys.n_u(), "sample reachable: set dimensions differ from the system");
    if (N < 0 || samples < 0) throw InvalidInput("sample reachable: negative horizon or sample count");
    std::vector<Eigen::MatrixXd> cloud(static_cast<std::size_t>(N + 1), Eigen::MatrixXd(sys.n_x(), samples));
    for (int s = 0; s < samples; ++s) {
        Rng rng = substream(seed, static_cast<std::uint64_t>(s));
        const Eigen::VectorXd x0 = X0.point(uniform_beta(rng, X0.num_generators()));
        Eigen::MatrixXd u(sys.n_u(), N);
        for (int k = 0; k < N; ++k) u.col(k) = U.point(uniform_beta(rng, U.num_generators()));
        const Trajectory tr = simulate(sys, x0, u, rng());
        for (int k = 0; k <= N; ++k) cloud[static_cast<std::size_t>(k)].col(s) = tr.states.col(k);
    }
    return cloud;
}

} // namespace zb
