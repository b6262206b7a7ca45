#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "parambvp/reduction.hpp"

using namespace parambvp;

namespace {

const Interval kUnit{0.0, 1.0};

ParamExpr pe(const std::string& text) { return {expr::parse(text), nullptr}; }

/// z'' + z = 0 as a higher-order system (K_0 = 1, K_1 = 0, f = 0), n = 1.
HigherOrderSystem oscillator(int n) {
    return {kUnit,
            2,
            n,
            1,
            {SmoothMatrixFn::from_exprs(kUnit, 1, 1, {pe("1")}, n),
             SmoothMatrixFn::from_exprs(kUnit, 1, 1, {pe("0")}, n)},
            SmoothVectorFn::from_exprs(kUnit, {pe("0")}, n)};
}

} // namespace

TEST_SUITE("reduction") {

TEST_CASE("companion system is satisfied by a known solution") {
    // z = sin t solves z'' + z = 0; y = (z, z') must satisfy y' + A y = g.
    const FirstOrderSystem sys = build_companion(oscillator(0), 0.0);
    REQUIRE(sys.dim == 2);
    for (double t : {0.0, 0.3, 0.7, 1.0}) {
        CVector y(2), yp(2);
        y << std::sin(t), std::cos(t);
        yp << std::cos(t), -std::sin(t);
        const CVector residual = yp + sys.A.eval(t) * y - sys.g.eval(t);
        CHECK(entry_sum_norm(residual) <= 1e-12);
    }
}

TEST_CASE("companion layout: minus identity above, coefficients in the last row") {
    const FirstOrderSystem sys = build_companion(oscillator(0), 0.0);
    const CMatrix A = sys.A.eval(0.5);
    CHECK(A(0, 0) == Complex(0.0));
    CHECK(A(0, 1) == Complex(-1.0)); // y_1' = y_2 ⇒ superdiagonal -I
    CHECK(A(1, 0) == Complex(1.0));  // K_0
    CHECK(A(1, 1) == Complex(0.0));  // K_1
}

TEST_CASE("inhomogeneous load lands in the last block of g") {
    // z'' = 6 t (so K = 0, f = 6t).
    const HigherOrderSystem sys{
        kUnit,
        2,
        0,
        1,
        {SmoothMatrixFn::from_exprs(kUnit, 1, 1, {pe("0")}, 0),
         SmoothMatrixFn::from_exprs(kUnit, 1, 1, {pe("0")}, 0)},
        SmoothVectorFn::from_exprs(kUnit, {pe("6*t")}, 0)};
    const FirstOrderSystem first = build_companion(sys, 0.0);
    const CVector g = first.g.eval(0.5);
    CHECK(g[0] == Complex(0.0));
    CHECK(g[1].real() == doctest::Approx(3.0));
}

TEST_CASE("lifting recovers every z derivative analytically") {
    // Sample y = (sin, cos) and its first-order derivative tracks on a grid,
    // lift, and compare all z tracks 0..n+r against the exact derivatives.
    const int n = 1;
    const HigherOrderSystem sys = oscillator(n);
    const GridSpec grid(kUnit, 64);
    SampledFn y{grid, 2, {}};
    for (int s = 0; s <= n + 1; ++s) y.tracks.emplace_back(2, grid.points());
    for (int i = 0; i < grid.points(); ++i) {
        const double t = grid.point(i);
        // y = (sin, cos); each extra track differentiates once.
        const double tracks[3][2] = {{std::sin(t), std::cos(t)},
                                     {std::cos(t), -std::sin(t)},
                                     {-std::sin(t), -std::cos(t)}};
        for (int s = 0; s <= n + 1; ++s)
            for (int c = 0; c < 2; ++c) y.tracks[s](c, i) = tracks[s][c];
    }
    const SampledFn z = lift_solution(y, sys);
    REQUIRE(z.order() == n + 2); // tracks 0..n+r
    REQUIRE(z.dim == 1);
    double worst = 0.0;
    for (int i = 0; i < grid.points(); ++i) {
        const double t = grid.point(i);
        const double exact[4] = {std::sin(t), std::cos(t), -std::sin(t), -std::cos(t)};
        for (int k = 0; k <= n + 2; ++k)
            worst = std::max(worst, std::abs(z.tracks[k](0, i) - Complex(exact[k])));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("parameter binding happens at reduction time") {
    // K_0 = eps: the companion matrix must carry the bound value.
    const HigherOrderSystem sys{kUnit,
                                1,
                                0,
                                1,
                                {SmoothMatrixFn::from_exprs(kUnit, 1, 1, {pe("eps")}, 0)},
                                SmoothVectorFn::from_exprs(kUnit, {pe("1")}, 0)};
    CHECK(build_companion(sys, 0.25).A.eval(0.5)(0, 0).real() == doctest::Approx(0.25));
    CHECK(build_companion(sys, 0.0).A.eval(0.5)(0, 0).real() == 0.0);
}

TEST_CASE("shape validation rejects mismatched coefficient blocks") {
    HigherOrderSystem sys = oscillator(0);
    sys.K.pop_back(); // r = 2 needs two blocks
    CHECK_THROWS_AS(sys.validate(), ShapeError);
}

TEST_CASE("multipoint reduction maps derivative orders onto first-order tracks") {
    // For r = 2, n = 0: z(c) and z'(c) live in y(c) directly; z''(c) needs
    // the first derivative track of y. Check the recorded stop points.
    MultipointBoundaryOperator B{kUnit, 0, 2, 1, {}};
    CMatrix a0(2, 1), a2(2, 1);
    a0 << 1.0, 0.0;
    a2 << 0.0, 1.0;
    B.terms.push_back({1, 0.25, {a0, CMatrix::Zero(2, 1), a2}});
    const ReducedBoundaryOp N = reduce_boundary(B);
    CHECK(N.dim() == 2);
    const auto stops = N.stop_points();
    CHECK(std::count(stops.begin(), stops.end(), 0.25) == 1);
    bool needs_first_track = false;
    for (const auto& term : N.point_terms)
        if (term.deriv > 0) needs_first_track = true;
    CHECK(needs_first_track); // the z'' evaluation
}

} // TEST_SUITE
