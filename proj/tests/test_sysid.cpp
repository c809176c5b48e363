#include <filesystem>

#include "doctest.h"
#include "zb/random.hpp"
#include "zb/sysid.hpp"

using namespace zb;

namespace {

Eigen::MatrixXd ab_true()
{
    Eigen::MatrixXd AB(2, 3);
    AB << 0.932, -0.189, 0.0436, 0.189, 0.932, 0.0533;
    return AB;
}

TrueSystem table1_system(double w)
{
    const Eigen::MatrixXd AB = ab_true();
    return {AB.leftCols(2), AB.rightCols(1), Box(Eigen::Vector2d::Constant(-w), Eigen::Vector2d::Constant(w)).to_zonotope()};
}

Eigen::MatrixXd random_inputs(Rng& rng, const Box& U, Eigen::Index L)
{
    Eigen::MatrixXd u(U.dim(), L);
    for (Eigen::Index k = 0; k < L; ++k) u.col(k) = uniform_vector(rng, U.lower(), U.upper());
    return u;
}

Eigen::MatrixXd gaussian(Rng& rng, Eigen::Index r, Eigen::Index c)
{
    Eigen::MatrixXd M(r, c);
    for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = uniform(rng, -1.0, 1.0);
    return M;
}

const Box kZx(Eigen::Vector2d(-4, 0), Eigen::Vector2d(2, 5));
const Box kZu(Eigen::VectorXd::Constant(1, 9.75), Eigen::VectorXd::Constant(1, 10.25));

} // namespace

TEST_CASE("simulate")
{
    const TrueSystem still{Eigen::Matrix2d::Identity(), Eigen::MatrixXd::Zero(2, 1), Zonotope(Eigen::Vector2d::Zero())};
    const auto tr = simulate(still, Eigen::Vector2d(1, 1), Eigen::MatrixXd::Random(1, 10), 3);
    for (Eigen::Index k = 0; k <= 10; ++k) CHECK(tr.states.col(k) == Eigen::Vector2d(1, 1));

    const auto one = simulate(table1_system(0.0), Eigen::Vector2d(1, 1), Eigen::MatrixXd::Constant(1, 1, 10.0), 0);
    CHECK(one.states(0, 1) == doctest::Approx(1.179).epsilon(1e-3));
    CHECK(one.states(1, 1) == doctest::Approx(1.654).epsilon(1e-3));

    const TrueSystem noisy = table1_system(0.005);
    const Eigen::MatrixXd u = Eigen::MatrixXd::Constant(1, 20, 10.0);
    const auto a = simulate(noisy, Eigen::Vector2d(1, 1), u, 42), b = simulate(noisy, Eigen::Vector2d(1, 1), u, 42),
               c = simulate(noisy, Eigen::Vector2d(1, 1), u, 43);
    CHECK(a.states == b.states);
    CHECK(a.noise == b.noise);
    CHECK(a.noise != c.noise);
    CHECK(a.noise.cwiseAbs().maxCoeff() <= 0.005);
    CHECK_THROWS_AS(simulate(noisy, Eigen::Vector3d::Zero(), u, 0), DimensionError);
    CHECK_THROWS_AS(simulate(noisy, Eigen::Vector2d::Zero(), Eigen::MatrixXd::Zero(2, 3), 0), DimensionError);
}

TEST_CASE("true system validation")
{
    TrueSystem s = table1_system(0.005);
    CHECK_NOTHROW(s.validate());
    s.noise = Zonotope(Eigen::Vector2d(1, 0), Eigen::Matrix2d::Identity() * 0.1);
    CHECK_THROWS_AS(s.validate(), InvalidInput);
}

TEST_CASE("assemble")
{
    Trajectory t;
    t.states = Eigen::MatrixXd(1, 3);
    t.states << 1, 2, 3;
    t.inputs = Eigen::MatrixXd(1, 2);
    t.inputs << 10, 20;
    const DataSet ds = assemble({t});
    CHECK(ds.T() == 2);
    CHECK(ds.X_plus(0, 0) == ds.X_minus(0, 1));
    CHECK(ds.boundaries.empty());

    Trajectory a, b;
    a.states = Eigen::MatrixXd::Constant(1, 2, 1.0);
    a.inputs = Eigen::MatrixXd::Constant(1, 1, 0.0);
    b.states = Eigen::MatrixXd::Constant(1, 2, 5.0);
    b.inputs = Eigen::MatrixXd::Constant(1, 1, 0.0);
    const DataSet two = assemble({a, b});
    CHECK(two.T() == 2);
    REQUIRE(two.boundaries.size() == 1);
    CHECK(two.boundaries[0] == 1);

    CHECK_THROWS_AS(assemble({}), InvalidInput);
    Trajectory bad = t;
    bad.inputs = Eigen::MatrixXd::Zero(1, 3);
    CHECK_THROWS_AS(assemble({bad}), DimensionError);

    Rng rng(5);
    const auto sim = simulate(table1_system(0.005), Eigen::Vector2d(1, 1), random_inputs(rng, kZu, 50), 9);
    const DataSet d = assemble({sim});
    for (Eigen::Index k = 0; k + 1 < d.T(); ++k) CHECK(d.X_plus.col(k) == d.X_minus.col(k + 1));
    CHECK(d.X_plus.col(d.T() - 1) == sim.states.col(50));
}

TEST_CASE("rank check")
{
    Rng rng(6);
    CHECK(check_rank(gaussian(rng, 3, 5)).full_row_rank);
    Eigen::MatrixXd dup(3, 2);
    dup << 1, 1, 2, 2, 3, 3;
    const auto r = check_rank(dup);
    CHECK_FALSE(r.full_row_rank);
    CHECK(r.rank == 1);
    CHECK(r.singular_values.size() == 2);

    for (int t = 0; t < 100; ++t) {
        const Eigen::Index rows = 2 + t % 4, inner = 1 + t % 6;
        const Eigen::MatrixXd D = gaussian(rng, rows, inner) * gaussian(rng, inner, 8);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(D);
        qr.setThreshold(1e-10);
        CHECK(check_rank(D).rank == qr.rank());
        CHECK(check_rank(D).full_row_rank == (qr.rank() == rows));
    }
}

TEST_CASE("pseudoinverse")
{
    Eigen::MatrixXd D(2, 3);
    D << 1, 0, 0, 0, 1, 0;
    Eigen::MatrixXd expect(3, 2);
    expect << 1, 0, 0, 1, 0, 0;
    CHECK((pseudoinverse(D) - expect).cwiseAbs().maxCoeff() < 1e-14);

    Eigen::Matrix3d sq;
    sq << 2, 1, 0, 1, 3, 1, 0, 1, 4;
    CHECK((pseudoinverse(sq) - sq.inverse()).cwiseAbs().maxCoeff() < 1e-12);

    Rng rng(7);
    for (int t = 0; t < 100; ++t) {
        const Eigen::MatrixXd R = gaussian(rng, 2 + t % 5, 10 + t % 7);
        const Eigen::MatrixXd P = pseudoinverse(R);
        CHECK((R * P * R - R).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((R * P - Eigen::MatrixXd::Identity(R.rows(), R.rows())).cwiseAbs().maxCoeff() < 1e-8);
    }

    // badly scaled rows take the SVD route and still satisfy the identities
    Eigen::MatrixXd ill = gaussian(rng, 3, 12);
    ill.row(2) *= 1e-6;
    const Eigen::MatrixXd Pi = pseudoinverse(ill);
    CHECK((ill * Pi - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-8);

    Eigen::MatrixXd dup(2, 3);
    dup << 1, 2, 3, 2, 4, 6;
    try {
        pseudoinverse(dup);
        FAIL("expected rank failure");
    } catch (const RankDeficientError& e) {
        CHECK(e.singular_values.size() == 2);
    }
}

TEST_CASE("noise matrix zonotope")
{
    const auto single = noise_matrix_zonotope(Zonotope(Eigen::Vector2d::Zero()), 5);
    CHECK(single.num_generators() == 0);
    CHECK(single.center() == Eigen::MatrixXd::Zero(2, 5));

    const auto four = noise_matrix_zonotope(Zonotope(Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity()), 2);
    REQUIRE(four.num_generators() == 4);
    for (const auto& G : four.generators()) {
        CHECK(G.sum() == 1.0);
        CHECK(G.cwiseAbs().maxCoeff() == 1.0);
        CHECK((G.array() != 0.0).count() == 1);
    }
    CHECK_THROWS_AS(noise_matrix_zonotope(Zonotope(Eigen::Vector2d::Zero()), 0), InvalidInput);

    Rng rng(8);
    Eigen::Matrix2d G;
    G << 0.3, 0.1, -0.2, 0.4;
    const Zonotope Zw(Eigen::Vector2d(0.1, -0.1), G);
    const Box hull = interval_hull(Zw);
    const auto Mw = noise_matrix_zonotope(Zw, 6);
    for (int t = 0; t < 1000; ++t) {
        const Eigen::MatrixXd W = Mw.member(uniform_beta(rng, static_cast<Eigen::Index>(Mw.num_generators())));
        for (Eigen::Index k = 0; k < 6; ++k) CHECK(hull.contains(W.col(k), 1e-12));
    }
}

TEST_CASE("identification, noise-free")
{
    Rng rng(9);
    const TrueSystem sys{ab_true().leftCols(2), ab_true().rightCols(1), Zonotope(Eigen::Vector2d::Zero())};
    const auto tr = simulate(sys, Eigen::Vector2d(1, 1), random_inputs(rng, kZu, 20), 1);
    const DataSet ds = assemble({tr});
    const ModelSet ms = identify(ds, sys.noise, kZx, kZu);
    CHECK(ms.mz.num_generators() == 0);
    Eigen::MatrixXd C(2, 3);
    C << ms.A_c, ms.B_c;
    CHECK((C - ab_true()).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((ds.X_plus - ab_true() * ds.D_minus()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(ms.disturbance.is_singleton());
}

TEST_CASE("identification, reference 2D scenario")
{
    const TrueSystem sys = table1_system(0.005);
    Rng rng(2024);
    const Box X0(Eigen::Vector2d(0.9, 0.9), Eigen::Vector2d(1.1, 1.1));
    const Eigen::VectorXd x0 = uniform_vector(rng, X0.lower(), X0.upper());
    const DataSet ds = assemble({simulate(sys, x0, random_inputs(rng, kZu, 100), 2024)});
    REQUIRE(check_rank(ds).full_row_rank);
    const ModelSet ms = identify(ds, sys.noise, kZx, kZu);
    CHECK(contains_matrix(ms.mz, ab_true()).verdict == Membership::inside);
    CHECK(ms.interval.contains(ab_true()));

    Eigen::MatrixXd lo(2, 3), hi(2, 3);
    lo << 0.928, -0.194, 0.0418, 0.185, 0.927, 0.0514;
    hi << 0.935, -0.184, 0.0452, 0.192, 0.937, 0.0549;
    const Eigen::ArrayXXd ratio = ms.interval.width().array() / (hi - lo).array();
    MESSAGE("interval width / reference width:\n" << ratio);
    CHECK((ratio > 0.1).all());
    CHECK((ratio < 10.0).all());
    CHECK(ms.interval_A().cols() == 2);
    CHECK(ms.interval_B().cols() == 1);
}

TEST_CASE("identification containment over random systems")
{
    Rng rng(10);
    int contained = 0;
    for (int run = 0; run < 20; ++run) {
        TrueSystem sys;
        sys.A = 0.9 * gaussian(rng, 2, 2) / 2.0;
        sys.B = gaussian(rng, 2, 1);
        const double w = uniform(rng, 0.001, 0.05);
        sys.noise = Box(Eigen::Vector2d::Constant(-w), Eigen::Vector2d::Constant(w)).to_zonotope();
        const Box U(Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 1.0));
        const Box X(Eigen::Vector2d::Constant(-3), Eigen::Vector2d::Constant(3));
        const DataSet ds = assemble({simulate(sys, Eigen::Vector2d::Zero(), random_inputs(rng, U, 30), 100 + run)});
        const ModelSet ms = identify(ds, sys.noise, X, U);
        Eigen::MatrixXd AB(2, 3);
        AB << sys.A, sys.B;
        const auto r = contains_matrix(ms.mz, AB);
        contained += r.verdict == Membership::inside;

        // shrinking Z_w while the realized noise stays inside it shrinks every width
        const double alpha = 0.5;
        const ModelSet half = identify(ds, linear_map(alpha * Eigen::Matrix2d::Identity(), sys.noise), X, U);
        CHECK((half.interval.width().array() <= ms.interval.width().array() + 1e-15).all());

        // symmetric domains and centered noise give a centered Z_d
        CHECK(ms.disturbance.center().cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK(contained == 20);

    DataSet bad;
    bad.X_minus = Eigen::MatrixXd::Ones(2, 4);
    bad.X_plus = Eigen::MatrixXd::Ones(2, 4);
    bad.U_minus = Eigen::MatrixXd::Ones(1, 4);
    CHECK_THROWS_AS(identify(bad, Zonotope(Eigen::Vector2d::Zero()), kZx, kZu), RankDeficientError);
}

TEST_CASE("dataset files round trip")
{
    Rng rng(11);
    const TrueSystem sys = table1_system(0.005);
    std::vector<Trajectory> trs;
    for (int i = 0; i < 3; ++i) trs.push_back(simulate(sys, Eigen::Vector2d(1, 1), random_inputs(rng, kZu, 7), i));
    const DataSet ds = assemble(trs, 77);
    const auto dir = std::filesystem::temp_directory_path() / "zb_dataset_test";
    write_dataset(ds, dir.string());
    const DataSet back = read_dataset(dir.string());
    CHECK(back.X_plus == ds.X_plus);
    CHECK(back.X_minus == ds.X_minus);
    CHECK(back.U_minus == ds.U_minus);
    CHECK(back.boundaries == ds.boundaries);
    CHECK(back.seed == 77);
    std::filesystem::remove_all(dir);
}
