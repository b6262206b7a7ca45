#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "parambvp/solver.hpp"

namespace parambvp {

/// Geometric parameter schedule 2^{-k_min}, …, 2^{-k_max}, descending.
std::vector<double> default_schedule(int k_min = 3, int k_max = 12);

/// A boundary-value problem depending on a small parameter. The builders
/// produce the concrete problem at any parameter value; 0 means the limit
/// problem, whose data may be declared independently when the pointwise limit
/// of the parameterized data does not exist (divided differences, drifting
/// points, oscillating densities).
struct ProblemFamily {
    std::string name;
    std::string summary;
    Interval domain{0.0, 1.0};
    int r = 1;
    int n = 0;
    int m = 1;
    std::function<HigherOrderSystem(double)> system;
    std::function<BoundaryOperator(double)> boundary;
    std::function<CVector(double)> rhs; // boundary values q
    std::vector<double> schedule = default_schedule();
    /// Optional closed-form solution (including at 0), used by oracle tests.
    std::function<SmoothVectorFn(double)> exact;
    /// Built to satisfy every convergence condition (used to scope the
    /// two-sided error/discrepancy bound, which presumes them).
    bool tagged_satisfying = false;

    void validate() const;
};

/// Nonnegative witnesses over the schedule plus the decision "vanishes":
/// final value ≤ tolerance AND nonincreasing over the last four samples.
/// Fluctuation below the tolerance never counts as growth (the values are
/// clamped up to the tolerance before the monotonicity test), so a sequence
/// that has settled inside the decision band cannot fail on noise.
struct SequenceVerdict {
    std::vector<double> eps;
    std::vector<double> values;
    double tolerance = 1e-3;
    bool pass = false;
};

SequenceVerdict judge_vanishing(std::vector<double> eps, std::vector<double> values,
                                double tolerance);

/// Boundedness decision: max ≤ ratio_cap · median (a growing sequence such as
/// 1/ε fails on a geometric schedule; a convergent or constant one passes).
SequenceVerdict judge_bounded(std::vector<double> eps, std::vector<double> values,
                              double ratio_cap = 10.0);

// --- Condition checkers ----------------------------------------------------

/// Coefficient convergence: ‖K_j(·,ε) − K_j(·,0)‖ in the C^(n) grid norm,
/// one witness sequence per coefficient.
struct CoefficientCheck {
    std::vector<SequenceVerdict> per_coefficient; // index j = order of z^{(j)}
    bool pass = false;
};
CoefficientCheck check_coefficients_converge(const ProblemFamily& fam, double tolerance = 1e-3,
                                             int grid_panels = kDefaultGridPanels);

/// Right-hand-side convergence: ‖f(·,ε) − f(·,0)‖ in C^(n) and |q(ε) − q(0)|.
struct RhsCheck {
    SequenceVerdict f_distance;
    SequenceVerdict q_distance;
    bool pass = false;
};
RhsCheck check_rhs_converge(const ProblemFamily& fam, double tolerance = 1e-3,
                            int grid_panels = kDefaultGridPanels);

/// Pointwise boundary-operator convergence, sampled on a fixed probe
/// dictionary (monomials 1, t, …, t^{n+r+2} and sin t, cos t per component
/// slot): |B(ε)z − B(0)z| per probe, plus the worst case. Probe-verified:
/// a pass means no probe in the dictionary witnesses divergence.
struct ProbeCheck {
    std::vector<std::string> probe_names;
    std::vector<std::vector<double>> per_probe; // [probe][schedule index]
    SequenceVerdict worst;                      // max over probes
    bool pass = false;
};
ProbeCheck check_boundary_probes_converge(const ProblemFamily& fam, double tolerance = 1e-3,
                                          double quad_tol = 1e-10);

/// Convergence battery on the canonical (derivatives-at-a plus Stieltjes
/// measure) form; multipoint operators are canonicalized first. Checks:
/// every β_k converges; total variations stay bounded; Φ(b,ε) → Φ(b,0);
/// ∫_a^t Φ(·,ε) → ∫_a^t Φ(·,0) on a fixed 17-point mesh. Also reports the
/// full variation distance, which is strictly stronger and may stay large
/// while all four checks pass (oscillating densities).
struct CanonicalCheck {
    std::vector<SequenceVerdict> beta_distance; // per derivative order k-1
    SequenceVerdict variation;                  // TV(Φ(·,ε)), judged bounded
    SequenceVerdict endpoint;                   // |Φ(b,ε) − Φ(b,0)|
    SequenceVerdict mean_distribution;          // max_mesh |∫_a^t (Φ(ε) − Φ(0))|
    SequenceVerdict variation_distance;         // informational, not part of pass
    bool betas_pass = false;
    bool variation_bounded = false;
    bool endpoint_pass = false;
    bool mean_pass = false;
    bool pass = false; // the four above
};
CanonicalCheck check_canonical_convergence(const ProblemFamily& fam, double tolerance = 1e-3,
                                           double quad_tol = 1e-10);

/// Convergence battery specific to multipoint operators with a declared
/// limit (each group j ≥ 1 of the limit operator has exactly one term, its
/// point t_j and matrices α_j; group 0 has no limit terms). Checks:
///   points converge:        max |t_{j,k}(ε) − t_j| → 0
///   group sums converge:    max_l ‖Σ_k α_{j,k}^{(l)}(ε) − α_j^{(l)}‖ → 0
///   top coefficients O(1):  ‖α_{j,k}^{(n+r)}(ε)‖ bounded
///   drift·weight vanishes:  ‖α_{j,k}^{(l)}(ε)‖·|t_{j,k}(ε) − t_j| → 0, l < n+r
///   stray group vanishes:   ‖α_{0,k}^{(l)}(ε)‖ → 0
/// All five together imply the probe check must pass as well (tested as an
/// invariant on the catalog).
struct MultipointCheck {
    SequenceVerdict points_converge;
    SequenceVerdict group_sums_converge;
    SequenceVerdict top_coefficients_bounded;
    SequenceVerdict drift_weight_vanishes;
    SequenceVerdict stray_group_vanishes;
    bool pass = false;
};
MultipointCheck check_multipoint_convergence(const ProblemFamily& fam, double tolerance = 1e-3);

/// Everything known about a family's limit behavior: nondegeneracy of the
/// limit problem with its singular values, the three convergence checkers,
/// and the specialized batteries where the operator's form allows them.
/// Every boolean is backed by the numeric witnesses it was decided on.
struct ConditionVerdicts {
    bool nondegenerate = false;
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    CoefficientCheck coefficients;
    ProbeCheck probes;
    RhsCheck rhs;
    std::optional<CanonicalCheck> canonical;   // canonical form reachable
    std::optional<MultipointCheck> multipoint; // operator is multipoint

    /// The continuity criterion: limit problem uniquely solvable and both
    /// homogeneous-data checkers pass.
    bool predicts_continuous() const { return nondegenerate && coefficients.pass && probes.pass; }
};
ConditionVerdicts check_all_conditions(const ProblemFamily& fam, double tolerance = 1e-3,
                                       const SolverOptions& opts = {});

// --- Discrepancy and the error sweep ----------------------------------------

/// Residual of the limit solution inserted into the ε-problem:
///   ode      = ‖L(ε) z(·,0) − f(·,ε)‖ in the C^(n) grid norm,
///   boundary = |B(ε) z(·,0) − q(ε)|.
/// The differential part uses the stored derivative tracks analytically; the
/// boundary part re-integrates the limit solution with the ε-operator
/// accumulated alongside, so unresolvable densities and off-grid points cost
/// no accuracy.
struct Discrepancy {
    double ode = 0.0;
    double boundary = 0.0;
    double total() const { return ode + boundary; }
};
Discrepancy discrepancy(const ProblemFamily& fam, double eps, const SolveOutcome& limit,
                        const SolverOptions& opts = {});

/// Certified constants for the two-sided bound
///   kappa1 · d(ε) ≤ ‖z(·,ε) − z(·,0)‖ ≤ kappa2 · d(ε):
/// kappa1 = 1 / (an upper bound on the forward operator norm, maximized over
/// the schedule); kappa2 = 2 × the largest inverse-norm ratio witnessed by a
/// probe right-hand-side set (unit boundary vectors, monomial/trig loads).
struct KappaEstimate {
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double forward_bound = 0.0; // the maximized denominator behind kappa1
    double probe_max = 0.0;     // un-inflated inverse-norm witness
};
KappaEstimate estimate_kappa(const ProblemFamily& fam, const SolverOptions& opts = {});

struct SweepRow {
    double eps = 0.0;
    bool solved = false; // false ⇒ degenerate at this ε
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    double err = 0.0;   // ‖z(·,ε) − z(·,0)‖ in the C^(n+r) grid norm
    double d = 0.0;     // discrepancy total
    double ratio = 0.0; // err / d, NaN when d ≈ 0
    bool bounds_checked = false;
    bool within_bounds = false; // kappa1·d ≤ err ≤ kappa2·d
};

struct StudyOptions {
    SolverOptions solver{};
    double tolerance = 1e-3; // decision tolerance for all verdicts
    int jobs = 1;            // per-ε solves run concurrently
    bool run_checkers = true;
    bool estimate_bounds = true;
};

struct ConvergenceReport {
    std::string family;
    int grid_panels = kDefaultGridPanels;
    double solver_tol = 0.0;
    double tolerance = 0.0;

    bool limit_degenerate = false;
    double sigma_min0 = 0.0;
    double sigma_max0 = 0.0;

    std::vector<SweepRow> rows; // schedule order (descending ε)

    /// Largest scheduled ε from which everything smaller solves (the
    /// empirical solvability threshold); NaN when nothing solves.
    double first_solvable_eps = 0.0;
    bool continuous = false; // err vanishes along the solvable suffix
    double err_slope = 0.0;  // log err vs log ε least-squares slope, NaN if <2 pts

    KappaEstimate kappa;       // zeros when not estimated
    bool kappa_available = false;
    bool bounds_hold = false;  // every checked row within [kappa1·d, kappa2·d]
    double certified_eps = 0.0; // largest ε of the all-pass suffix, NaN if none

    std::optional<ConditionVerdicts> conditions;
    bool matches_prediction = false; // continuous == conditions->predicts_continuous()
};

/// Solve at every scheduled ε, tabulate err(ε) and d(ε), decide continuity,
/// and cross-check the verdict against the condition checkers. Stops early
/// (rows empty) when the limit problem itself is degenerate.
ConvergenceReport convergence_study(const ProblemFamily& fam, const StudyOptions& opts = {});

/// Solve the family at one parameter value.
SolveOutcome solve_family(const ProblemFamily& fam, double eps, const SolverOptions& opts = {});

} // namespace parambvp
