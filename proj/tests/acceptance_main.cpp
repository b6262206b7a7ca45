// Acceptance gate: one line per criterion, each backed by the pinned
// tolerances below. Exit code = number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "parambvp/catalog.hpp"
#include "parambvp/limits.hpp"
#include "parambvp/truncation.hpp"

using namespace parambvp;

namespace {

int failed = 0;

void report(int index, bool pass, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", index, pass ? "PASS" : "FAIL", detail.c_str());
    if (!pass) ++failed;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

const Interval kUnit{0.0, 1.0};

ParamExpr pe(const std::string& text) { return {expr::parse(text), nullptr}; }

CMatrix scalar(double v) {
    CMatrix M(1, 1);
    M(0, 0) = v;
    return M;
}

// 1. Closed-form solver suite across orders, sizes, and smoothness grades.
void criterion_solver_oracles() {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    int count = 0;
    std::set<int> rs, ms, ns;
    std::string worst_name;
    for (const std::string& name : catalog_names()) {
        const ProblemFamily fam = catalog_family(name);
        if (!fam.exact) continue;
        const SolveOutcome sol = solve_family(fam, 0.0);
        const double err = ck_distance(sol.z, fam.exact(0.0), fam.n + fam.r);
        if (err > worst) {
            worst = err;
            worst_name = name;
        }
        ++count;
        rs.insert(fam.r);
        ms.insert(fam.m);
        ns.insert(fam.n);
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool coverage = rs.count(1) && rs.count(2) && rs.count(3) && ms.count(1) &&
                          ms.count(2) && ns.count(0) && ns.count(1);
    report(1, count >= 6 && worst <= 1e-6 && coverage && seconds < 30.0,
           std::to_string(count) + " closed-form families, worst graded-norm error " +
               fmt(worst) + " (" + worst_name + "), r/m/n coverage " +
               (coverage ? "complete" : "INCOMPLETE") + ", " + fmt(seconds) + " s");
}

// 2. Unique-solvability detector on the two Dirichlet oscillators.
void criterion_degeneracy_detector() {
    const ProblemFamily eigen = catalog_family("dirichlet-eigen");
    const Condition0Report bad = check_condition0(eigen.system(0.0), eigen.boundary(0.0), 0.0);
    const ProblemFamily nine = catalog_family("dirichlet-9");
    const Condition0Report good = check_condition0(nine.system(0.0), nine.boundary(0.0), 0.0);
    report(2,
           bad.degenerate && bad.sigma_min <= 1e-6 && !good.degenerate &&
               good.sigma_min >= 1e-2,
           "eigenvalue case sigma_min " + fmt(bad.sigma_min) + " (degenerate " +
               (bad.degenerate ? "yes" : "NO") + "), regular case sigma_min " +
               fmt(good.sigma_min));
}

// 3. Error really vanishes at first order when every condition holds.
void criterion_sufficiency() {
    StudyOptions opts;
    opts.jobs = 4;
    const ConvergenceReport rep = convergence_study(catalog_family("k0-eps"), opts);
    bool decreasing = true;
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
        if (!(rep.rows[i].err < rep.rows[i - 1].err)) decreasing = false;
    const double final_err = rep.rows.empty() ? 1.0 : rep.rows.back().err;
    const bool slope_ok = rep.err_slope >= 0.8 && rep.err_slope <= 1.2;
    report(3,
           rep.continuous && decreasing && final_err <= 1e-3 && slope_ok &&
               rep.matches_prediction,
           "err strictly decreasing " + std::string(decreasing ? "yes" : "NO") +
               ", final err " + fmt(final_err) + ", log-log slope " + fmt(rep.err_slope));
}

// 4. Oscillating coefficient: checker rejects it and the error stalls.
void criterion_necessity_coefficients() {
    StudyOptions opts;
    opts.jobs = 4;
    const ConvergenceReport rep = convergence_study(catalog_family("osc-k"), opts);
    double floor_err = 1.0;
    bool floor_holds = true;
    for (const auto& row : rep.rows) {
        if (row.eps > 1.0 / 64.0 + 1e-12) continue;
        if (!row.solved || row.err < 0.05) floor_holds = false;
        floor_err = std::min(floor_err, row.err);
    }
    const bool checker_rejects =
        rep.conditions.has_value() && !rep.conditions->coefficients.pass;
    report(4, checker_rejects && floor_holds && !rep.continuous,
           std::string("coefficient check fails ") + (checker_rejects ? "yes" : "NO") +
               ", min err at eps <= 2^-6 is " + fmt(floor_err) + " (floor 0.05)");
}

// 5. Divided differences: structural (d4) and probe checks reject, error stays.
void criterion_necessity_boundary() {
    StudyOptions opts;
    opts.jobs = 4;
    const ConvergenceReport rep = convergence_study(catalog_family("divdiff-mp"), opts);
    bool ok = rep.conditions.has_value() && !rep.continuous;
    double probe_value = 0.0;
    if (ok) {
        const ConditionVerdicts& v = *rep.conditions;
        ok = v.multipoint.has_value() && !v.multipoint->drift_weight_vanishes.pass &&
             !v.probes.pass;
        for (std::size_t i = 0; i < v.probes.probe_names.size(); ++i)
            if (v.probes.probe_names[i] == "t^1") probe_value = v.probes.per_probe[i].back();
        ok = ok && std::abs(probe_value - 1.0) <= 1e-3;
    }
    report(5, ok,
           "drift-weight and probe checks reject, |B(eps)t - B(0)t| settles at " +
               fmt(probe_value) + " (expect 1 +- 1e-3), verdict " +
               (rep.continuous ? "continuous (WRONG)" : "not continuous"));
}

// 6. Two-sided error/discrepancy estimate on every compliant family.
void criterion_two_sided_bound() {
    StudyOptions opts;
    opts.jobs = 4;
    bool all_hold = true;
    int families = 0, rows_checked = 0;
    std::string offender;
    for (const std::string& name : catalog_names()) {
        const ProblemFamily fam = catalog_family(name);
        if (!fam.tagged_satisfying) continue;
        ++families;
        const ConvergenceReport rep = convergence_study(fam, opts);
        if (!rep.kappa_available || !rep.bounds_hold) {
            all_hold = false;
            offender = name;
        }
        for (const auto& row : rep.rows)
            if (row.bounds_checked) ++rows_checked;
    }
    report(6, all_hold && families >= 5 && rows_checked >= 10,
           std::to_string(families) + " compliant families, " + std::to_string(rows_checked) +
               " rows inside [kappa1 d, kappa2 d]" +
               (all_hold ? "" : ", first violation in " + offender));
}

// 7. Pointwise convergence without variation convergence.
void criterion_weaker_than_variation() {
    const ProblemFamily fam = catalog_family("osc-density");
    const ConditionVerdicts v = check_all_conditions(fam);
    bool ok = v.canonical.has_value() && v.canonical->pass;

    double probe_at_210 = 1.0;
    const double target = std::ldexp(1.0, -10);
    for (std::size_t i = 0; i < v.probes.worst.eps.size(); ++i)
        if (std::abs(v.probes.worst.eps[i] - target) < 1e-15)
            probe_at_210 = v.probes.worst.values[i];
    ok = ok && probe_at_210 <= 1e-2;

    bool variation_stays = v.canonical.has_value();
    if (variation_stays)
        for (double w : v.canonical->variation_distance.values)
            if (w < 0.5) variation_stays = false;
    report(7, ok && variation_stays,
           "pointwise battery passes, max probe gap at eps = 2^-10 is " + fmt(probe_at_210) +
               " (cap 1e-2), variation distance stays >= 0.5");
}

// 8. Fundamental-matrix identities across the whole catalog.
void criterion_reduction_identities() {
    SolverOptions opts;
    opts.grid_panels = 512;
    double worst_rec = 0.0, worst_id = 0.0;
    for (const std::string& name : catalog_names()) {
        const ProblemFamily fam = catalog_family(name);
        const FirstOrderSystem companion = build_companion(fam.system(0.0), 0.0);
        const GridSpec grid(fam.domain, opts.grid_panels);
        const ReducedBoundaryOp N = reduce_boundary(fam.boundary(0.0), fam.domain);
        std::vector<double> stops = N.stop_points();
        const FundamentalMatrix Y = fundamental_matrix(companion, grid, opts.tol, stops);
        worst_rec = std::max(worst_rec, reconstruction_distance(reconstruct_A(Y), companion.A));

        const CMatrix M = characteristic_matrix(Y, N);
        const Eigen::JacobiSVD<CMatrix> svd(M);
        if (svd.singularValues().minCoeff() <=
            1e-8 * svd.singularValues().maxCoeff())
            continue; // normalization undefined on the degenerate examples
        const FundamentalMatrix Yn = normalized_fundamental(Y, M);
        const CMatrix MN = characteristic_matrix(Yn, N);
        worst_id = std::max(
            worst_id, entry_sum_norm(CMatrix(MN - CMatrix::Identity(MN.rows(), MN.cols()))));
    }
    report(8, worst_rec <= 1e-6 && worst_id <= 1e-9,
           "coefficient recovery worst " + fmt(worst_rec) + " (cap 1e-6), [N Ynorm] - I worst " +
               fmt(worst_id) + " (cap 1e-9)");
}

// 9. Truncation demo: pointwise convergence with exactly linear inverse blow-up.
void criterion_truncation_demo() {
    bool ok = true;
    for (int n = 1; n <= 64; ++n)
        if (inverse_blowup_pair(n, 64).inverse_norm() != static_cast<double>(n)) ok = false;
    const auto rows = truncation_demo(64, 20240901);
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].sn_error > rows[i - 1].sn_error) ok = false;
    if (rows.back().sn_error != 0.0) ok = false;
    report(9, ok,
           "inverse norms are the exact integers 1..64; partial-sum error is "
           "nonincreasing and ends at 0");
}

// 10. Randomized property suites at their pinned tolerances.
void criterion_property_suites() {
    // (a) solve linearity, 110 cases at 1e-8
    bool linearity = true;
    {
        const ProblemFamily fam = catalog_family("dirichlet-9");
        const PreparedProblem prepared(fam.system(0.0), fam.boundary(0.0), 0.0,
                                       SolverOptions{1e-9, 128, 1e-8, 1e-12});
        std::mt19937 rng(881199);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (int it = 0; it < 110 && linearity; ++it) {
            CVector q1(2), q2(2);
            q1 << u(rng), u(rng);
            q2 << u(rng), u(rng);
            const double a = u(rng);
            const SolveOutcome s1 = prepared.solve(q1);
            const SolveOutcome s2 = prepared.solve(q2);
            const SolveOutcome s12 = prepared.solve(q1 + a * q2);
            for (int j = 0; j <= 2; ++j)
                if ((s12.z.tracks[j] - (s1.z.tracks[j] + a * s2.z.tracks[j]))
                        .cwiseAbs()
                        .maxCoeff() > 1e-8)
                    linearity = false;
        }
    }

    // (b) norm homogeneity/triangle, 120 cases at 1e-12
    bool norms = true;
    {
        std::mt19937 rng(445566);
        const GridSpec grid(kUnit, 16);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (int it = 0; it < 120 && norms; ++it) {
            const int dim = 1 + it % 3, order = it % 4;
            SampledFn x{grid, dim, {}}, y{grid, dim, {}};
            for (int j = 0; j <= order; ++j) {
                CMatrix tx(dim, grid.points()), ty(dim, grid.points());
                for (int c = 0; c < dim; ++c)
                    for (int i = 0; i < grid.points(); ++i) {
                        tx(c, i) = Complex(u(rng), u(rng));
                        ty(c, i) = Complex(u(rng), u(rng));
                    }
                x.tracks.push_back(tx);
                y.tracks.push_back(ty);
            }
            const double c = u(rng);
            SampledFn cx = x, xy = x;
            for (int j = 0; j <= order; ++j) {
                cx.tracks[j] *= c;
                xy.tracks[j] += y.tracks[j];
            }
            if (std::abs(ck_norm(cx, order) - std::abs(c) * ck_norm(x, order)) >
                1e-12 * (1.0 + ck_norm(x, order)))
                norms = false;
            if (ck_norm(xy, order) > ck_norm(x, order) + ck_norm(y, order) + 1e-12)
                norms = false;
        }
    }

    // (c) canonicalization consistency, 120 cases at 1e-8
    bool canonical = true;
    {
        std::mt19937 rng(20240515);
        std::uniform_real_distribution<double> point(0.05, 0.95);
        std::uniform_real_distribution<double> weight(-2.0, 2.0);
        std::uniform_int_distribution<int> nterms(1, 4);
        for (int it = 0; it < 120 && canonical; ++it) {
            const int n = it % 2;
            MultipointBoundaryOperator B{kUnit, n, 1, 1, {}};
            const int count = nterms(rng);
            for (int k = 0; k < count; ++k) {
                MultipointBoundaryOperator::Term term;
                term.group = 1 + k;
                term.point = point(rng);
                for (int l = 0; l <= n + 1; ++l) term.alpha.push_back(scalar(weight(rng)));
                B.terms.push_back(std::move(term));
            }
            const GenericBoundaryOperator C = canonicalize_multipoint(B);
            for (const auto& z : probe_functions(kUnit, 1, n + 1, 3))
                if (entry_sum_norm(CVector(apply_multipoint(B, z) - apply_generic(C, z))) >
                    1e-8)
                    canonical = false;
        }
    }

    // (d) grid refinement: graded norms are monotone under nesting (100
    // random smooth functions), and the flagship solve never worsens.
    bool refinement = true;
    {
        std::mt19937 rng(330022);
        std::uniform_real_distribution<double> coef(-2.0, 2.0);
        for (int it = 0; it < 100 && refinement; ++it) {
            char text[160];
            std::snprintf(text, sizeof text, "%.6f + %.6f*t + %.6f*t^2 + %.6f*sin(%d*t)",
                          coef(rng), coef(rng), coef(rng), coef(rng), 1 + it % 5);
            const auto x = SmoothVectorFn::from_exprs(kUnit, {pe(text)}, 1);
            double prev = -1.0;
            for (int panels : {32, 64, 128, 256}) {
                const double norm = ck_norm(x, 1, GridSpec(kUnit, panels));
                if (norm + 1e-12 < prev) refinement = false;
                prev = norm;
            }
        }
        const ProblemFamily nine = catalog_family("dirichlet-9");
        double prev_err = -1.0;
        for (int panels : {32, 64, 256, 1024}) {
            SolverOptions opts;
            opts.grid_panels = panels;
            const double err =
                ck_distance(solve_family(nine, 0.0, opts).z, nine.exact(0.0), 2);
            if (prev_err >= 0.0 && err > prev_err + 1e-12) refinement = false;
            prev_err = err;
        }
    }

    report(10, linearity && norms && canonical && refinement,
           std::string("linearity ") + (linearity ? "pass" : "FAIL") + ", norms " +
               (norms ? "pass" : "FAIL") + ", canonicalization " +
               (canonical ? "pass" : "FAIL") + ", refinement " +
               (refinement ? "pass" : "FAIL"));
}

} // namespace

int main() {
    criterion_solver_oracles();
    criterion_degeneracy_detector();
    criterion_sufficiency();
    criterion_necessity_coefficients();
    criterion_necessity_boundary();
    criterion_two_sided_bound();
    criterion_weaker_than_variation();
    criterion_reduction_identities();
    criterion_truncation_demo();
    criterion_property_suites();
    std::printf("ACCEPTANCE: %d/10 criteria pass\n", 10 - failed);
    return failed;
}
