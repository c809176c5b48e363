#include <random>

#include "doctest.h"
#include "zb/error.hpp"
#include "zb/setcalc.hpp"

using namespace zb;

namespace {

Eigen::VectorXd uniform_beta(std::mt19937_64& rng, Eigen::Index n)
{
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) b[i] = U(rng);
    return b;
}

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c)
{
    std::normal_distribution<double> N(0.0, 1.0);
    Eigen::MatrixXd M(r, c);
    for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = N(rng);
    return M;
}

Zonotope random_zonotope(std::mt19937_64& rng, Eigen::Index n, Eigen::Index g)
{
    return Zonotope(random_matrix(rng, n, 1).col(0), random_matrix(rng, n, g));
}

bool inside(const Zonotope& Z, const Eigen::VectorXd& x)
{
    const auto r = contains_point(Z, x);
    REQUIRE(r.verdict != Membership::indeterminate);
    return r.verdict == Membership::inside;
}

// All 2^gamma sign vectors.
std::vector<Eigen::VectorXd> sign_patterns(Eigen::Index gamma)
{
    std::vector<Eigen::VectorXd> out;
    for (long mask = 0; mask < (1L << gamma); ++mask) {
        Eigen::VectorXd s(gamma);
        for (Eigen::Index i = 0; i < gamma; ++i) s[i] = (mask >> i) & 1 ? 1.0 : -1.0;
        out.push_back(s);
    }
    return out;
}

// Brute-force membership for a planar zonotope: the generators beyond the
// first two are swept on a grid and the first two solved for exactly.
// Returns +1 inside, -1 outside, 0 when the point is too close to call.
int grid_oracle(const Zonotope& Z, const Eigen::Vector2d& x, double step)
{
    const Eigen::Index g = Z.num_generators();
    const Eigen::Matrix2d G2 = Z.generators().leftCols(2);
    const Eigen::Index free = g - 2;
    const long per_axis = static_cast<long>(2.0 / step) + 1;
    long total = 1;
    for (Eigen::Index k = 0; k < free; ++k) total *= per_axis;
    double best = 1e300;
    for (long idx = 0; idx < total; ++idx) {
        Eigen::Vector2d rhs = x - Z.center();
        double worst = 0.0;
        long rest = idx;
        for (Eigen::Index k = 0; k < free; ++k) {
            const double b = -1.0 + step * static_cast<double>(rest % per_axis);
            rest /= per_axis;
            rhs -= b * Z.generators().col(2 + k);
        }
        const Eigen::Vector2d b12 = G2.partialPivLu().solve(rhs);
        worst = std::max(worst, b12.cwiseAbs().maxCoeff());
        best = std::min(best, worst);
    }
    if (best <= 0.98) return 1;
    if (best >= 1.05) return -1;
    return 0;
}

} // namespace

TEST_CASE("zonotope construction and pruning")
{
    Eigen::MatrixXd G(2, 3);
    G << 1, 0, 0, 0, 0, 2;
    const Zonotope Z(Eigen::Vector2d(1, 2), G);
    CHECK(Z.num_generators() == 2);
    CHECK(Zonotope(Eigen::Vector2d(1, 2)).is_singleton());
    CHECK_THROWS_AS(Zonotope(Eigen::Vector2d(1, 2), Eigen::MatrixXd::Ones(3, 1)), DimensionError);
    CHECK_THROWS_AS(Box(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)), InvalidInput);
    CHECK_THROWS_AS(IntervalMatrix(Eigen::Matrix2d::Ones(), Eigen::Matrix2d::Zero()), InvalidInput);
}

TEST_CASE("linear map")
{
    const Zonotope Z(Eigen::Vector2d(1, 1), Eigen::Matrix2d::Identity());
    const Zonotope same = linear_map(Eigen::Matrix2d::Identity(), Z);
    CHECK(same.center() == Z.center());
    CHECK(same.generators() == Z.generators());

    const Zonotope scaled = linear_map(Eigen::Vector2d(2, 1).asDiagonal().toDenseMatrix(), Z);
    CHECK(scaled.center() == Eigen::Vector2d(2, 1));
    CHECK(scaled.generators() == Eigen::Matrix2d(Eigen::Vector2d(2, 1).asDiagonal()));

    CHECK_THROWS_AS(linear_map(Eigen::MatrixXd::Ones(2, 3), Z), DimensionError);

    std::mt19937_64 rng(11);
    const Zonotope R = random_zonotope(rng, 3, 4);
    const Eigen::MatrixXd L = random_matrix(rng, 2, 3);
    const Zonotope LR = linear_map(L, R);
    for (int t = 0; t < 1000; ++t) CHECK(inside(LR, L * R.point(uniform_beta(rng, 4))));
}

TEST_CASE("minkowski sum")
{
    const Zonotope a(Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity());
    const Zonotope b(Eigen::Vector2d(1, 1), 0.5 * Eigen::Matrix2d::Identity());
    const Zonotope s = minkowski_sum(a, b);
    Eigen::MatrixXd expect(2, 4);
    expect << 1, 0, 0.5, 0, 0, 1, 0, 0.5;
    CHECK(s.center() == Eigen::Vector2d(1, 1));
    CHECK(s.generators() == expect);

    const Zonotope id = minkowski_sum(a, Zonotope(Eigen::Vector2d::Zero()));
    CHECK(id.center() == a.center());
    CHECK(id.generators() == a.generators());
    CHECK_THROWS_AS(minkowski_sum(a, Zonotope(Eigen::Vector3d::Zero())), DimensionError);

    std::mt19937_64 rng(12);
    const Zonotope p = random_zonotope(rng, 3, 2), q = random_zonotope(rng, 3, 3);
    const Zonotope pq = minkowski_sum(p, q);
    for (int t = 0; t < 1000; ++t)
        CHECK(inside(pq, p.point(uniform_beta(rng, 2)) + q.point(uniform_beta(rng, 3))));
}

TEST_CASE("cartesian product")
{
    const Zonotope a(Eigen::VectorXd::Constant(1, 1.0), Eigen::MatrixXd::Constant(1, 1, 1.0));
    const Zonotope b(Eigen::VectorXd::Constant(1, 2.0), Eigen::MatrixXd::Constant(1, 1, 3.0));
    const Zonotope p = cartesian_product(a, b);
    CHECK(p.center() == Eigen::Vector2d(1, 2));
    CHECK(p.generators() == Eigen::Matrix2d(Eigen::Vector2d(1, 3).asDiagonal()));

    const Zonotope ss = cartesian_product(Zonotope(Eigen::Vector2d(1, 2)), Zonotope(Eigen::VectorXd::Constant(1, 3.0)));
    CHECK(ss.is_singleton());
    CHECK(ss.center() == Eigen::Vector3d(1, 2, 3));

    std::mt19937_64 rng(13);
    for (int t = 0; t < 50; ++t) {
        std::uniform_int_distribution<int> D(1, 4), G(0, 5);
        const int n1 = D(rng), n2 = D(rng), g1 = G(rng), g2 = G(rng);
        const Zonotope r = cartesian_product(random_zonotope(rng, n1, g1), random_zonotope(rng, n2, g2));
        CHECK(r.dim() == n1 + n2);
        CHECK(r.num_generators() == g1 + g2);
    }
}

TEST_CASE("interval hull")
{
    Eigen::MatrixXd G(1, 2);
    G << 1, -2;
    const Box h = interval_hull(Zonotope(Eigen::VectorXd::Zero(1), G));
    CHECK(h.lower()[0] == -3.0);
    CHECK(h.upper()[0] == 3.0);
    const Box s = interval_hull(Zonotope(Eigen::Vector2d(4, 5)));
    CHECK(s.lower() == Eigen::Vector2d(4, 5));
    CHECK(s.upper() == Eigen::Vector2d(4, 5));

    std::mt19937_64 rng(14);
    for (int t = 0; t < 20; ++t) {
        const Zonotope Z = random_zonotope(rng, 3, 1 + t % 10);
        const Box B = interval_hull(Z);
        Eigen::VectorXd lo = Eigen::VectorXd::Constant(3, 1e300), hi = Eigen::VectorXd::Constant(3, -1e300);
        for (const auto& s : sign_patterns(Z.num_generators())) {
            const Eigen::VectorXd v = Z.point(s);
            lo = lo.cwiseMin(v);
            hi = hi.cwiseMax(v);
        }
        CHECK((lo - B.lower()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((hi - B.upper()).cwiseAbs().maxCoeff() < 1e-12);
        for (int k = 0; k < 50; ++k) CHECK(B.contains(Z.point(uniform_beta(rng, Z.num_generators())), 1e-12));
    }
}

TEST_CASE("matrix zonotope to interval matrix")
{
    const MatrixZonotope M(Eigen::Matrix2d::Identity(), {0.1 * Eigen::Matrix2d::Identity()});
    const IntervalMatrix I = to_interval(M);
    CHECK(I.lower()(0, 0) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(I.upper()(1, 1) == doctest::Approx(1.1).epsilon(1e-15));
    CHECK(I.lower()(0, 1) == 0.0);
    CHECK(I.upper()(1, 0) == 0.0);

    const Eigen::Matrix2d C = Eigen::Matrix2d::Constant(3.0);
    const IntervalMatrix J = to_interval(MatrixZonotope(C));
    CHECK(J.lower() == C);
    CHECK(J.upper() == C);

    std::mt19937_64 rng(15);
    std::vector<Eigen::MatrixXd> gens;
    for (int i = 0; i < 6; ++i) gens.push_back(random_matrix(rng, 2, 3));
    const MatrixZonotope R(random_matrix(rng, 2, 3), gens);
    const IntervalMatrix K = to_interval(R);
    for (int t = 0; t < 1000; ++t) CHECK(K.contains(R.member(uniform_beta(rng, 6)), 1e-12));
    Eigen::MatrixXd lo = Eigen::MatrixXd::Constant(2, 3, 1e300), hi = Eigen::MatrixXd::Constant(2, 3, -1e300);
    for (const auto& s : sign_patterns(6)) {
        lo = lo.cwiseMin(R.member(s));
        hi = hi.cwiseMax(R.member(s));
    }
    CHECK((lo - K.lower()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((hi - K.upper()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("box to polynomials")
{
    const Box B(Eigen::Vector2d(-4, 0), Eigen::Vector2d(2, 5));
    const std::size_t vars[] = {0, 1};
    const auto polys = box_to_polys(B, vars, 2);
    REQUIRE(polys.size() == 4);
    const Polynomial x1 = Polynomial::variable(2, 0), x2 = Polynomial::variable(2, 1);
    CHECK(max_coeff_difference(polys[0], x1 + Polynomial::constant(2, 4)) == 0.0);
    CHECK(max_coeff_difference(polys[1], x2) == 0.0);
    CHECK(max_coeff_difference(polys[2], Polynomial::constant(2, 2) - x1) == 0.0);
    CHECK(max_coeff_difference(polys[3], Polynomial::constant(2, 5) - x2) == 0.0);

    const std::size_t v0[] = {0};
    const auto deg = box_to_polys(Box(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)), v0, 1);
    REQUIRE(deg.size() == 2);
    CHECK(max_coeff_difference(deg[0], Polynomial::variable(1, 0)) == 0.0);
    CHECK(max_coeff_difference(deg[1], -Polynomial::variable(1, 0)) == 0.0);

    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> U(-6.0, 7.0);
    for (int t = 0; t < 1000; ++t) {
        const Eigen::Vector2d x(U(rng), U(rng));
        bool all = true;
        for (const auto& p : polys) all = all && p.eval(x) >= 0.0;
        CHECK(all == B.contains(x));
    }
    CHECK_THROWS_AS(box_to_polys(B, v0, 2), DimensionError);
}

TEST_CASE("point membership")
{
    const Zonotope Z(Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity());
    const auto in = contains_point(Z, Eigen::Vector2d(0.5, 0.5));
    REQUIRE(in.verdict == Membership::inside);
    CHECK((in.witness - Eigen::Vector2d(0.5, 0.5)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(in.residual <= 1e-8);
    CHECK(contains_point(Z, Eigen::Vector2d(1.5, 0)).verdict == Membership::outside);
    CHECK_THROWS_AS(contains_point(Z, Eigen::Vector3d::Zero()), DimensionError);

    // inside the hull but outside a skewed zonotope
    Eigen::Matrix2d S;
    S << 1, 1, 0, 1;
    const Zonotope skew(Eigen::Vector2d::Zero(), S);
    CHECK(contains_point(skew, Eigen::Vector2d(-1.8, 0.9)).verdict == Membership::outside);
    CHECK(contains_point(skew, Eigen::Vector2d(1.5, 0.9)).verdict == Membership::inside);

    // rank-deficient generators: off the generated line
    Eigen::MatrixXd line(2, 2);
    line << 1, 2, 1, 2;
    CHECK(contains_point(Zonotope(Eigen::Vector2d::Zero(), line), Eigen::Vector2d(1, 1)).verdict == Membership::inside);
    CHECK(contains_point(Zonotope(Eigen::Vector2d::Zero(), line), Eigen::Vector2d(1, 0.9)).verdict == Membership::outside);

    std::mt19937_64 rng(17);
    int decided = 0;
    for (int q = 0; q < 100; ++q) {
        const Zonotope R = random_zonotope(rng, 2, 2 + q % 2);
        const Box H = interval_hull(R);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        Eigen::Vector2d x;
        for (int i = 0; i < 2; ++i) x[i] = H.lower()[i] + U(rng) * (H.upper()[i] - H.lower()[i]);
        const int truth = grid_oracle(R, x, 1e-3);
        if (truth == 0) continue;
        ++decided;
        const auto r = contains_point(R, x);
        CHECK(r.verdict == (truth > 0 ? Membership::inside : Membership::outside));
        if (r.verdict == Membership::inside) {
            CHECK((R.point(r.witness) - x).cwiseAbs().maxCoeff() <= 1e-8);
            CHECK(r.witness.cwiseAbs().maxCoeff() <= 1.0 + 1e-8);
        }
    }
    CHECK(decided >= 80);
}

TEST_CASE("matrix membership")
{
    const Eigen::Matrix2d C = Eigen::Matrix2d::Identity();
    CHECK(contains_matrix(MatrixZonotope(C), C).verdict == Membership::inside);
    const MatrixZonotope M(C, {0.1 * Eigen::Matrix2d::Ones()});
    CHECK(contains_matrix(M, 2.0 * C).verdict == Membership::outside);
    CHECK_THROWS_AS(contains_matrix(M, Eigen::MatrixXd::Zero(2, 3)), DimensionError);

    std::mt19937_64 rng(18);
    for (int t = 0; t < 100; ++t) {
        std::vector<Eigen::MatrixXd> gens;
        for (int i = 0; i < 5; ++i) gens.push_back(random_matrix(rng, 2, 3));
        const MatrixZonotope R(random_matrix(rng, 2, 3), gens);
        Eigen::VectorXd beta = 1.3 * uniform_beta(rng, 5);
        const Eigen::MatrixXd X = R.member(beta);
        const auto a = contains_matrix(R, X);
        const auto b = contains_point(flatten(R), X.reshaped());
        CHECK(a.verdict == b.verdict);
        CHECK(a.verdict != Membership::indeterminate);
        if (beta.cwiseAbs().maxCoeff() <= 1.0) CHECK(a.verdict == Membership::inside);
    }
}

TEST_CASE("matrix zonotope times zonotope")
{
    std::mt19937_64 rng(19);
    const Zonotope Z = random_zonotope(rng, 2, 3);
    const Zonotope same = matzono_times_zono(MatrixZonotope(Eigen::Matrix2d::Identity()), Z);
    CHECK(same.center() == Z.center());
    CHECK(same.generators() == Z.generators());

    const Zonotope g = matzono_times_zono(MatrixZonotope(Eigen::Matrix2d::Zero(), {Eigen::Matrix2d::Identity()}),
                                          Zonotope(Eigen::Vector2d(1, 0)));
    CHECK(g.center() == Eigen::Vector2d::Zero());
    REQUIRE(g.num_generators() == 1);
    CHECK(g.generators().col(0) == Eigen::Vector2d(1, 0));
    CHECK_THROWS_AS(matzono_times_zono(MatrixZonotope(Eigen::Matrix3d::Identity()), Z), DimensionError);

    std::vector<Eigen::MatrixXd> gens;
    for (int i = 0; i < 3; ++i) gens.push_back(0.2 * random_matrix(rng, 2, 3));
    const MatrixZonotope M(random_matrix(rng, 2, 3), gens);
    const Zonotope V = random_zonotope(rng, 3, 2);
    const Zonotope P = matzono_times_zono(M, V);
    for (int t = 0; t < 1000; ++t)
        CHECK(inside(P, M.member(uniform_beta(rng, 3)) * V.point(uniform_beta(rng, 2))));
}

TEST_CASE("order reduction")
{
    std::mt19937_64 rng(20);
    const Zonotope Z = random_zonotope(rng, 3, 5);
    const Zonotope u = reduce_order(Z, 5);
    CHECK(u.generators() == Z.generators());

    const Zonotope boxed = reduce_order(Z, 3);
    const Box h = interval_hull(Z), hb = interval_hull(boxed);
    CHECK(boxed.num_generators() <= 3);
    CHECK((h.lower() - hb.lower()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((h.upper() - hb.upper()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((boxed.generators() - Eigen::MatrixXd(h.radius().asDiagonal())).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(reduce_order(Z, 2), InvalidInput);

    const Zonotope big = random_zonotope(rng, 3, 30);
    const Zonotope r = reduce_order(big, 9);
    CHECK(r.num_generators() <= 9);
    for (int t = 0; t < 1000; ++t) CHECK(inside(r, big.point(uniform_beta(rng, 30))));
}
