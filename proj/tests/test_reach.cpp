#include "doctest.h"
#include "zb/random.hpp"
#include "zb/reach.hpp"

using namespace zb;

namespace {

Box box(std::initializer_list<double> lo, std::initializer_list<double> hi)
{
    Eigen::VectorXd l(static_cast<Eigen::Index>(lo.size())), h(static_cast<Eigen::Index>(hi.size()));
    Eigen::Index i = 0;
    for (double v : lo) l[i++] = v;
    i = 0;
    for (double v : hi) h[i++] = v;
    return Box(l, h);
}

ModelSet point_model(const Eigen::MatrixXd& AB, Eigen::Index nx)
{
    ModelSet ms;
    ms.mz = MatrixZonotope(AB);
    ms.A_c = AB.leftCols(nx);
    ms.B_c = AB.rightCols(AB.cols() - nx);
    ms.interval = to_interval(ms.mz);
    return ms;
}

struct Scenario2D {
    TrueSystem sys;
    Box Zx = box({-4, 0}, {2, 5});
    Box Zu = box({9.75}, {10.25});
    Box X0 = box({0.9, 0.9}, {1.1, 1.1});
    DataSet ds;

    explicit Scenario2D(std::uint64_t seed)
    {
        Eigen::MatrixXd AB(2, 3);
        AB << 0.932, -0.189, 0.0436, 0.189, 0.932, 0.0533;
        sys = {AB.leftCols(2), AB.rightCols(1), box({-0.005, -0.005}, {0.005, 0.005}).to_zonotope()};
        Rng rng(seed);
        Eigen::MatrixXd u(1, 100);
        for (Eigen::Index k = 0; k < 100; ++k) u(0, k) = uniform(rng, 9.75, 10.25);
        ds = assemble({simulate(sys, uniform_vector(rng, X0.lower(), X0.upper()), u, seed)});
    }
};

} // namespace

TEST_CASE("single reach step")
{
    Eigen::MatrixXd id(2, 3);
    id << 1, 0, 0, 0, 1, 0;
    const Zonotope R(Eigen::Vector2d(1, 2), Eigen::Matrix2d::Identity() * 0.5);
    const Zonotope U = box({-1}, {1}).to_zonotope();
    const Zonotope none(Eigen::Vector2d::Zero());
    const Zonotope same = reach_step(point_model(id, 2), R, U, none);
    CHECK(same.center() == R.center());
    CHECK(same.generators() == R.generators());

    const Zonotope Zw = box({-0.1, -0.2}, {0.1, 0.2}).to_zonotope();
    const Zonotope forget = reach_step(point_model(Eigen::MatrixXd::Zero(2, 3), 2), R, U, Zw);
    CHECK(forget.center() == Zw.center());
    CHECK(forget.generators() == Zw.generators());
    CHECK_THROWS_AS(reach_step(point_model(id, 2), Zonotope(Eigen::Vector3d::Zero()), U, none), DimensionError);

    Scenario2D sc(31);
    const ModelSet ms = identify(sc.ds, sc.sys.noise, sc.Zx, sc.Zu);
    const Zonotope X0 = sc.X0.to_zonotope(), Uz = sc.Zu.to_zonotope();
    const Zonotope next = reach_step(ms, X0, Uz, sc.sys.noise);
    Rng rng(1);
    for (int t = 0; t < 1000; ++t) {
        const Eigen::MatrixXd M = ms.mz.member(uniform_beta(rng, static_cast<Eigen::Index>(ms.mz.num_generators())));
        Eigen::VectorXd xu(3);
        xu << X0.point(uniform_beta(rng, 2)), Uz.point(uniform_beta(rng, 1));
        const Eigen::VectorXd x1 = M * xu + sc.sys.noise.point(uniform_beta(rng, 2));
        CHECK(contains_point(next, x1).verdict == Membership::inside);
    }
}

TEST_CASE("horizon basics")
{
    Scenario2D sc(32);
    const ModelSet ms = identify(sc.ds, sc.sys.noise, sc.Zx, sc.Zu);
    const auto seq0 = reach_horizon(ms, sc.X0.to_zonotope(), sc.Zu.to_zonotope(), sc.sys.noise, 0);
    REQUIRE(seq0.sets.size() == 1);
    CHECK(seq0.sets[0].generators() == sc.X0.to_zonotope().generators());
    CHECK_THROWS_AS(reach_horizon(ms, sc.X0.to_zonotope(), sc.Zu.to_zonotope(), sc.sys.noise, -1), InvalidInput);

    const auto seq = reach_horizon(ms, sc.X0.to_zonotope(), sc.Zu.to_zonotope(), sc.sys.noise, 4);
    CHECK(seq.sets.size() == 5);
    for (auto g : seq.generator_counts) CHECK(g <= 10);
    CHECK(seq.reductions.size() == 4);
    const std::string csv = seq.hulls_csv();
    CHECK(csv.rfind("step,dim,lower,upper\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 5 * 2);
}

TEST_CASE("scalar geometric series")
{
    // noise-free identification of x+ = a x + b u recovers a point model; the
    // reach radius then follows r_k = |a|^k r_0 + w (1 - |a|^k) / (1 - |a|)
    const double a = 0.6, b = 0.3, w = 0.05;
    TrueSystem sys{Eigen::MatrixXd::Constant(1, 1, a), Eigen::MatrixXd::Constant(1, 1, b), Zonotope(Eigen::VectorXd::Zero(1))};
    Rng rng(3);
    Eigen::MatrixXd u(1, 20);
    for (Eigen::Index k = 0; k < 20; ++k) u(0, k) = uniform(rng, -1, 1);
    const DataSet ds = assemble({simulate(sys, Eigen::VectorXd::Constant(1, 0.5), u, 0)});
    const ModelSet ms = identify(ds, sys.noise, box({-5}, {5}), box({-1}, {1}));
    REQUIRE(ms.mz.num_generators() == 0);

    const Zonotope X0 = box({-2}, {2}).to_zonotope();
    const Zonotope Zw = box({-w}, {w}).to_zonotope();
    const auto seq = reach_horizon(ms, X0, Zonotope(Eigen::VectorXd::Zero(1)), Zw, 10);
    double prev = 1e300;
    for (int k = 0; k <= 10; ++k) {
        const double r = interval_hull(seq.sets[static_cast<std::size_t>(k)]).radius()[0];
        const double expect = std::pow(a, k) * 2.0 + w * (1.0 - std::pow(a, k)) / (1.0 - a);
        CHECK(r == doctest::Approx(expect).epsilon(1e-9));
        CHECK(r < prev);
        CHECK(r > w / (1.0 - a));
        prev = r;
    }
}

TEST_CASE("Monte-Carlo soundness on the reference 2D system")
{
    Scenario2D sc(33);
    const ModelSet ms = identify(sc.ds, sc.sys.noise, sc.Zx, sc.Zu);
    const Zonotope X0 = sc.X0.to_zonotope(), U = sc.Zu.to_zonotope();
    const auto seq = reach_horizon(ms, X0, U, sc.sys.noise, 10);
    const auto cloud = sample_reachable(sc.sys, X0, U, 10, 1000, 77);
    int violations = 0;
    for (int k = 0; k <= 10; ++k)
        for (int s = 0; s < 1000; ++s)
            violations += contains_point(seq.sets[static_cast<std::size_t>(k)], cloud[static_cast<std::size_t>(k)].col(s)).verdict !=
                          Membership::inside;
    CHECK(violations == 0);

    // reduction only enlarges: reduced sets contain points of an unreduced run
    const auto loose = reach_horizon(ms, X0, U, sc.sys.noise, 3, 1000000);
    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
        const Zonotope& Z = loose.sets[3];
        CHECK(contains_point(seq.sets[3], Z.point(uniform_beta(rng, Z.num_generators()))).verdict == Membership::inside);
    }

    // identifying and propagating with a doubled noise zonotope enlarges the hulls
    const Zonotope W2 = linear_map(2.0 * Eigen::Matrix2d::Identity(), sc.sys.noise);
    const ModelSet ms2 = identify(sc.ds, W2, sc.Zx, sc.Zu);
    const auto seq2 = reach_horizon(ms2, X0, U, W2, 10);
    for (int k = 0; k <= 10; ++k) {
        const Box h = interval_hull(seq.sets[static_cast<std::size_t>(k)]);
        const Box h2 = interval_hull(seq2.sets[static_cast<std::size_t>(k)]);
        CHECK(h2.contains(h));
    }
}

TEST_CASE("reachable sampler")
{
    TrueSystem still{Eigen::Matrix2d::Identity(), Eigen::MatrixXd::Zero(2, 1), Zonotope(Eigen::Vector2d::Zero())};
    const Zonotope X0 = box({0, 0}, {1, 1}).to_zonotope();
    const auto c = sample_reachable(still, X0, box({-1}, {1}).to_zonotope(), 5, 50, 9);
    REQUIRE(c.size() == 6);
    for (const auto& step : c) {
        CHECK(step.cols() == 50);
        CHECK(step == c[0]);
    }
    CHECK((c[0].array() >= 0.0).all());
    CHECK((c[0].array() <= 1.0).all());
    CHECK(sample_reachable(still, X0, box({-1}, {1}).to_zonotope(), 5, 50, 9)[3] == c[3]);
    CHECK(sample_reachable(still, X0, box({-1}, {1}).to_zonotope(), 5, 50, 10)[3] != c[3]);
}
