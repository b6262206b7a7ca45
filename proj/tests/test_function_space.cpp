#include <doctest.h>

#include <cmath>
#include <random>

#include "parambvp/function_space.hpp"
#include "parambvp/quadrature.hpp"

using namespace parambvp;

namespace {

SampledFn random_sampled(std::mt19937& rng, const GridSpec& grid, int dim, int order) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    SampledFn x{grid, dim, {}};
    for (int j = 0; j <= order; ++j) {
        CMatrix track(dim, grid.points());
        for (int c = 0; c < dim; ++c)
            for (int i = 0; i < grid.points(); ++i) track(c, i) = Complex(u(rng), u(rng));
        x.tracks.push_back(std::move(track));
    }
    return x;
}

} // namespace

TEST_SUITE("function_space") {

TEST_CASE("graded norm of sin on [0, pi]: one sup per derivative order") {
    const Interval dom{0.0, M_PI};
    const auto x = SmoothVectorFn::from_exprs(dom, {{expr::parse("sin(t)"), nullptr}}, 2);
    const GridSpec grid(dom, 64);
    // sup|sin| = 1 (pi/2 is a grid point), sup|cos| = 1, sup|-sin| = 1.
    CHECK(ck_norm(x, 0, grid) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ck_norm(x, 1, grid) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(ck_norm(x, 2, grid) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("expression-backed functions expose exact derivative tracks") {
    const Interval dom{0.0, 1.0};
    const auto x = SmoothVectorFn::from_exprs(dom, {{expr::parse("exp(2*t)"), nullptr}}, 3);
    CHECK(x.eval(0.5, 0)[0].real() == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
    CHECK(x.eval(0.5, 3)[0].real() == doctest::Approx(8.0 * std::exp(1.0)).epsilon(1e-13));
    CHECK_THROWS_AS(x.eval(0.5, 4), SmoothnessError);
    CHECK_THROWS_AS(x.eval(2.0, 0), IntervalError);
}

TEST_CASE("the zero branch of a dual entry takes over exactly at eps = 0") {
    const Interval dom{0.0, 1.0};
    const ParamExpr dual{expr::parse("sin(t/eps)"), expr::parse("0")};
    const auto x = SmoothVectorFn::from_exprs(dom, {dual}, 0, 0.5);
    CHECK(x.eval(0.25, 0)[0].real() == doctest::Approx(std::sin(0.5)).epsilon(1e-14));
    const auto x0 = x.at_eps(0.0);
    CHECK(x0.eval(0.25, 0)[0].real() == 0.0); // sin(t/0) never evaluated
}

TEST_CASE("matrix-valued functions mirror the vector interface") {
    const Interval dom{0.0, 1.0};
    const auto A = SmoothMatrixFn::from_exprs(
        dom, 2, 2,
        {{expr::parse("t"), nullptr},
         {expr::parse("1"), nullptr},
         {expr::parse("0"), nullptr},
         {expr::parse("t^2"), nullptr}},
        1);
    const CMatrix v = A.eval(0.5, 1);
    CHECK(v(0, 0).real() == doctest::Approx(1.0));
    CHECK(v(1, 1).real() == doctest::Approx(1.0)); // (t^2)' at 0.5
    CHECK(A.rows() == 2);
    CHECK(ck_norm(A, 0, GridSpec(dom, 8)) ==
          doctest::Approx(1.0 + 1.0 + 0.0 + 1.0).epsilon(1e-12));
}

TEST_CASE("norm homogeneity and triangle inequality over random samples") {
    std::mt19937 rng(445566);
    const GridSpec grid(Interval{0.0, 1.0}, 16);
    std::uniform_real_distribution<double> scale(-3.0, 3.0);
    for (int it = 0; it < 120; ++it) {
        const int dim = 1 + it % 3;
        const int order = it % 4;
        const SampledFn x = random_sampled(rng, grid, dim, order);
        const SampledFn y = random_sampled(rng, grid, dim, order);
        const double c = scale(rng);

        SampledFn cx = x;
        SampledFn xy = x;
        for (int j = 0; j <= order; ++j) {
            cx.tracks[j] *= c;
            xy.tracks[j] += y.tracks[j];
        }
        const double nx = ck_norm(x, order), ny = ck_norm(y, order);
        CHECK(ck_norm(cx, order) == doctest::Approx(std::abs(c) * nx).epsilon(1e-12));
        CHECK(ck_norm(xy, order) <= nx + ny + 1e-12);
        CHECK(nx >= 0.0);
        // distance to itself is zero, and symmetric
        CHECK(ck_distance(x, x, order) == 0.0);
        CHECK(ck_distance(x, y, order) == doctest::Approx(ck_distance(y, x, order)));
    }
}

TEST_CASE("distance between sampled and analytic representations of one function") {
    const Interval dom{0.0, 1.0};
    const GridSpec grid(dom, 32);
    const auto x = SmoothVectorFn::from_exprs(dom, {{expr::parse("t^2"), nullptr}}, 1);
    SampledFn s{grid, 1, {}};
    CMatrix t0(1, grid.points()), t1(1, grid.points());
    for (int i = 0; i < grid.points(); ++i) {
        const double t = grid.point(i);
        t0(0, i) = t * t;
        t1(0, i) = 2.0 * t;
    }
    s.tracks = {t0, t1};
    CHECK(ck_distance(s, x, 1) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("shape mismatches are rejected") {
    const GridSpec grid(Interval{0.0, 1.0}, 8);
    std::mt19937 rng(1);
    const SampledFn a = random_sampled(rng, grid, 2, 1);
    const SampledFn b = random_sampled(rng, grid, 3, 1);
    CHECK_THROWS_AS(ck_distance(a, b, 1), ShapeError);
    CHECK_THROWS_AS((GridSpec{Interval{0.0, 1.0}, 7}), IntervalError); // odd panels
    CHECK_THROWS_AS((Interval{1.0, 1.0}), IntervalError);
}

TEST_CASE("adaptive quadrature reproduces antiderivative values") {
    const double v = quad::integrate([](double t) { return 3.0 * t * t; }, 0.0, 1.0, 1e-12);
    CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

    const double w =
        quad::integrate([](double t) { return std::exp(t); }, -1.0, 2.0, 1e-12);
    CHECK(w == doctest::Approx(std::exp(2.0) - std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("oscillatory integrand: pre-splitting defeats dyadic sampling blind spots") {
    const double eps = 0.01;
    const double exact = eps * (1.0 - std::cos(1.0 / eps));
    const double v = quad::integrate([eps](double t) { return std::sin(t / eps); }, 0.0, 1.0,
                                     1e-12, 400);
    CHECK(v == doctest::Approx(exact).epsilon(1e-10));

    // |sin(t/eps)| over a whole number of half-periods: 1/eps = 16*pi gives
    // exactly 2/pi. The breakpoint list carries the kink locations.
    const double eps2 = 1.0 / (16.0 * M_PI);
    std::vector<double> kinks;
    for (int k = 1; k < 16; ++k) kinks.push_back(k * M_PI * eps2);
    const double tv = quad::integrate(
        [eps2](double t) { return std::abs(std::sin(t / eps2)); }, 0.0, 1.0, 1e-12, 64, kinks);
    CHECK(tv == doctest::Approx(2.0 / M_PI).epsilon(1e-10));
}

TEST_CASE("sample-based Simpson is exact on cubics") {
    const GridSpec grid(Interval{0.0, 1.0}, 8);
    std::vector<double> samples(grid.points());
    for (int i = 0; i < grid.points(); ++i) samples[i] = std::pow(grid.point(i), 3);
    CHECK(quad::simpson_samples(samples, grid.step()) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("matrix quadrature integrates entrywise") {
    const CMatrix v = quad::integrate_matrix(
        [](double t) {
            CMatrix M(1, 2);
            M(0, 0) = t;
            M(0, 1) = Complex(0.0, 2.0 * t);
            return M;
        },
        0.0, 1.0, 1e-12);
    CHECK(v(0, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(v(0, 1).imag() == doctest::Approx(1.0).epsilon(1e-12));
}

} // TEST_SUITE
