#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "parambvp/solver.hpp"

using namespace parambvp;

namespace {

const Interval kUnit{0.0, 1.0};

ParamExpr pe(const std::string& text) { return {expr::parse(text), nullptr}; }

SmoothMatrixFn coeff11(const std::string& text, int n) {
    return SmoothMatrixFn::from_exprs(kUnit, 1, 1, {pe(text)}, n);
}

CVector qvec(std::initializer_list<double> values) {
    CVector q(static_cast<int>(values.size()));
    int i = 0;
    for (double v : values) q[i++] = v;
    return q;
}

/// Initial conditions B z = (z(a), …, z^{(r-1)}(a)) for a scalar problem.
MultipointBoundaryOperator initial_conditions(int r, int n) {
    MultipointBoundaryOperator B{kUnit, n, r, 1, {}};
    MultipointBoundaryOperator::Term term;
    term.group = 1;
    term.point = kUnit.a;
    for (int l = 0; l <= n + r; ++l) {
        CMatrix a = CMatrix::Zero(r, 1);
        if (l < r) a(l, 0) = 1.0;
        term.alpha.push_back(std::move(a));
    }
    B.terms.push_back(std::move(term));
    return B;
}

/// Dirichlet pair B z = (z(a), z(b)) for a scalar second-order problem.
MultipointBoundaryOperator dirichlet_pair(int n) {
    MultipointBoundaryOperator B{kUnit, n, 2, 1, {}};
    auto slot = [&](int row) {
        std::vector<CMatrix> alpha;
        for (int l = 0; l <= n + 2; ++l) {
            CMatrix a = CMatrix::Zero(2, 1);
            if (l == 0) a(row, 0) = 1.0;
            alpha.push_back(std::move(a));
        }
        return alpha;
    };
    B.terms.push_back({1, kUnit.a, slot(0)});
    B.terms.push_back({2, kUnit.b, slot(1)});
    return B;
}

HigherOrderSystem oscillator(double k, int n) {
    char text[40];
    std::snprintf(text, sizeof text, "%.17g", k);
    return {kUnit,
            2,
            n,
            1,
            {coeff11(text, n), coeff11("0", n)},
            SmoothVectorFn::from_exprs(kUnit, {pe("0")}, n)};
}

} // namespace

TEST_SUITE("solver") {

TEST_CASE("first-order growth: z' - z = 0, z(0) = 1 reproduces exp") {
    const HigherOrderSystem sys{
        kUnit, 1, 0, 1, {coeff11("-1", 0)}, SmoothVectorFn::from_exprs(kUnit, {pe("0")}, 0)};
    const SolveOutcome sol = solve_bvp(sys, initial_conditions(1, 0), qvec({1.0}), 0.0);
    const auto exact = SmoothVectorFn::from_exprs(kUnit, {pe("exp(t)")}, 1);
    CHECK(ck_distance(sol.z, exact, 1) <= 1e-8);
    CHECK(sol.ode_residual <= 1e-8);
    CHECK(sol.boundary_residual <= 1e-10);
}

TEST_CASE("coupled rotation: z(0) = (0,1) gives (sin, cos)") {
    std::vector<ParamExpr> entries = {pe("0"), pe("-1"), pe("1"), pe("0")};
    const HigherOrderSystem sys{kUnit,
                                1,
                                0,
                                2,
                                {SmoothMatrixFn::from_exprs(kUnit, 2, 2, entries, 0)},
                                SmoothVectorFn::from_exprs(kUnit, {pe("0"), pe("0")}, 0)};
    MultipointBoundaryOperator B{kUnit, 0, 1, 2, {}};
    B.terms.push_back({1, 0.0, {CMatrix::Identity(2, 2), CMatrix::Zero(2, 2)}});
    const SolveOutcome sol = solve_bvp(sys, B, qvec({0.0, 1.0}), 0.0);
    const auto exact = SmoothVectorFn::from_exprs(kUnit, {pe("sin(t)"), pe("cos(t)")}, 1);
    CHECK(ck_distance(sol.z, exact, 1) <= 1e-8);
}

TEST_CASE("two-point problem: z'' + 9z = 0 with Dirichlet data hits sin(3t)") {
    const SolveOutcome sol =
        solve_bvp(oscillator(9.0, 0), dirichlet_pair(0), qvec({0.0, std::sin(3.0)}), 0.0);
    const auto exact = SmoothVectorFn::from_exprs(kUnit, {pe("sin(3*t)")}, 2);
    CHECK(ck_distance(sol.z, exact, 2) <= 1e-6);
    // Characteristic matrix rows (z(0); z(1)) on columns (cos 3t, sin(3t)/3):
    // singular values computed independently from that 2x2 matrix.
    CHECK(sol.sigma_min == doctest::Approx(0.03341991).epsilon(1e-5));
    CHECK(sol.sigma_max == doctest::Approx(1.40754432).epsilon(1e-5));
}

TEST_CASE("third order: z''' = 6 with zero initial data gives t^3") {
    const HigherOrderSystem sys{kUnit,
                                3,
                                0,
                                1,
                                {coeff11("0", 0), coeff11("0", 0), coeff11("0", 0)},
                                SmoothVectorFn::from_exprs(kUnit, {pe("6")}, 0)};
    const SolveOutcome sol = solve_bvp(sys, initial_conditions(3, 0), qvec({0.0, 0.0, 0.0}), 0.0);
    const auto exact = SmoothVectorFn::from_exprs(kUnit, {pe("t^3")}, 3);
    CHECK(ck_distance(sol.z, exact, 3) <= 1e-8);
}

TEST_CASE("an eigenvalue of the Dirichlet problem is flagged as degenerate") {
    const double pi2 = M_PI * M_PI;
    const PreparedProblem prepared(oscillator(pi2, 0), BoundaryOperator(dirichlet_pair(0)), 0.0);
    CHECK(prepared.degenerate());
    CHECK(prepared.sigma_min() <= 1e-6);
    CHECK_THROWS_AS(prepared.solve(qvec({0.0, 0.0})), DegenerateProblem);

    const Condition0Report report =
        check_condition0(oscillator(pi2, 0), dirichlet_pair(0), 0.0);
    CHECK(report.degenerate);
    const Condition0Report good = check_condition0(oscillator(9.0, 0), dirichlet_pair(0), 0.0);
    CHECK_FALSE(good.degenerate);
    CHECK(good.sigma_min >= 1e-2);
}

TEST_CASE("fundamental matrix identities on the oscillator") {
    const FirstOrderSystem companion = build_companion(oscillator(1.0, 1), 0.0);
    const GridSpec grid(kUnit, 256);
    const FundamentalMatrix Y = fundamental_matrix(companion, grid, 1e-10, {0.3});

    // Y(a) = I by construction.
    CHECK(entry_sum_norm(CMatrix(Y.value(0) - CMatrix::Identity(2, 2))) <= 1e-14);

    // Closed form: columns rotate, Y(t) = [[cos t, sin t], [-sin t, cos t]].
    CMatrix closed(2, 2);
    const double t = grid.point(64); // 0.25
    closed << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
    CHECK(entry_sum_norm(CMatrix(Y.value(64) - closed)) <= 1e-9);

    // Extra stops are landed on exactly and carry all derivative tracks.
    bool found = false;
    for (const auto& [stop, tracks] : Y.at_stops)
        if (std::abs(stop - 0.3) < 1e-12) {
            found = true;
            CHECK(tracks.size() == Y.tracks.size());
            CMatrix at(2, 2);
            at << std::cos(0.3), std::sin(0.3), -std::sin(0.3), std::cos(0.3);
            CHECK(entry_sum_norm(CMatrix(tracks[0] - at)) <= 1e-9);
        }
    CHECK(found);

    // Normalizing by the characteristic matrix makes [N Y_norm] the identity.
    const ReducedBoundaryOp N = reduce_boundary(dirichlet_pair(1));
    const CMatrix M = characteristic_matrix(Y, N);
    const FundamentalMatrix Yn = normalized_fundamental(Y, M);
    const CMatrix MN = characteristic_matrix(Yn, N);
    CHECK(entry_sum_norm(CMatrix(MN - CMatrix::Identity(2, 2))) <= 1e-9);

    // Coefficient recovery A = -Y' Y^{-1} returns the companion matrix.
    const SampledMatrixTrack rec = reconstruct_A(Y);
    CHECK(reconstruction_distance(rec, companion.A) <= 1e-6);
}

TEST_CASE("solves are linear in the boundary data over random cases") {
    const PreparedProblem prepared(oscillator(9.0, 0), BoundaryOperator(dirichlet_pair(0)), 0.0,
                                   SolverOptions{1e-9, 128, 1e-8, 1e-12});
    std::mt19937 rng(881199);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int it = 0; it < 110; ++it) {
        const CVector q1 = qvec({u(rng), u(rng)});
        const CVector q2 = qvec({u(rng), u(rng)});
        const double a = u(rng);
        const SolveOutcome s1 = prepared.solve(q1);
        const SolveOutcome s2 = prepared.solve(q2);
        const SolveOutcome s12 = prepared.solve(q1 + a * q2);
        double worst = 0.0;
        for (int j = 0; j <= 2; ++j)
            worst = std::max(worst, (s12.z.tracks[j] - (s1.z.tracks[j] + a * s2.z.tracks[j]))
                                        .cwiseAbs()
                                        .maxCoeff());
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("solves are additive across load and boundary data") {
    const HigherOrderSystem sys{
        kUnit, 1, 0, 1, {coeff11("-1", 0)}, SmoothVectorFn::from_exprs(kUnit, {pe("0")}, 0)};
    const PreparedProblem prepared(sys, BoundaryOperator(initial_conditions(1, 0)), 0.0,
                                   SolverOptions{1e-9, 128, 1e-8, 1e-12});
    std::mt19937 rng(5150);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int it = 0; it < 30; ++it) {
        const double c0 = u(rng), c1 = u(rng);
        const auto f1 = SmoothVectorFn::from_exprs(
            kUnit, {pe(std::to_string(c0) + " + " + std::to_string(c1) + "*t")}, 0);
        const auto f2 = SmoothVectorFn::from_exprs(kUnit, {pe(std::to_string(-c1) + "*t")}, 0);
        const auto f12 = SmoothVectorFn::from_exprs(kUnit, {pe(std::to_string(c0))}, 0);
        const CVector q1 = qvec({u(rng)}), q2 = qvec({u(rng)});
        const SolveOutcome s1 = prepared.solve_with(f1, q1);
        const SolveOutcome s2 = prepared.solve_with(f2, q2);
        const SolveOutcome s12 = prepared.solve_with(f12, q1 + q2);
        double worst = 0.0;
        for (int j = 0; j <= 1; ++j)
            worst = std::max(worst, (s12.z.tracks[j] - (s1.z.tracks[j] + s2.z.tracks[j]))
                                        .cwiseAbs()
                                        .maxCoeff());
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("refining the storage grid never makes the solution worse") {
    const auto exact = SmoothVectorFn::from_exprs(kUnit, {pe("sin(3*t)")}, 2);
    double previous = -1.0;
    for (int panels : {32, 64, 256, 1024, 4096}) {
        SolverOptions opts;
        opts.grid_panels = panels;
        const SolveOutcome sol =
            solve_bvp(oscillator(9.0, 0), dirichlet_pair(0), qvec({0.0, std::sin(3.0)}), 0.0,
                      opts);
        const double err = ck_distance(sol.z, exact, 2);
        if (previous >= 0.0) CHECK(err <= previous + 1e-12); // noise floor cushion
        previous = err;
    }
}

} // TEST_SUITE
