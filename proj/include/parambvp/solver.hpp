#pragma once

#include <map>
#include <memory>
#include <variant>
#include <vector>

#include <Eigen/QR>

#include "parambvp/reduction.hpp"

namespace parambvp {

using BoundaryOperator = std::variant<GenericBoundaryOperator, MultipointBoundaryOperator>;

struct SolverOptions {
    double tol = 1e-10;             // local stepping tolerance (abs = rel)
    int grid_panels = kDefaultGridPanels;
    double degeneracy_ratio = 1e-8; // σ_min ≤ ratio·σ_max ⇒ degenerate
    double quad_tol = 1e-12;
};

/// Matrix solution of Y' + A Y = 0 with Y(a) = I, stored as derivative tracks
/// on the grid (tracks via the analytic recursion, not differencing) plus
/// exact states at requested off-grid stop points.
struct FundamentalMatrix {
    GridSpec grid;
    int dim;
    std::vector<std::vector<CMatrix>> tracks; // tracks[s][i], s = 0..n+1
    std::map<double, std::vector<CMatrix>> at_stops;

    int order() const noexcept { return static_cast<int>(tracks.size()) - 1; }
    const CMatrix& value(int i) const { return tracks[0][i]; }
};

/// Integrate the homogeneous matrix equation. `extra_stops` are landed on
/// exactly and their derivative tracks recorded.
FundamentalMatrix fundamental_matrix(const FirstOrderSystem& sys, const GridSpec& grid,
                                     double tol, const std::vector<double>& extra_stops = {});

/// Particular solution of y' + A y = g with y(a) = 0, as tracks 0..n+1.
SampledFn particular_solution(const FirstOrderSystem& sys, const GridSpec& grid, double tol);

/// Reduce either kind of boundary operator (the Interval is only needed for
/// the canonical form; multipoint operators carry their own).
ReducedBoundaryOp reduce_boundary(const BoundaryOperator& B, Interval domain);

/// Characteristic matrix [N Y]: the reduced boundary operator applied to the
/// columns of Y using the stored tracks. Point terms use grid points or
/// recorded stops; densities use composite Simpson over the grid samples, so
/// this evaluator requires grid-resolved densities (the solve pipeline
/// accumulates the integral during stepping instead and has no such limit).
CMatrix characteristic_matrix(const FundamentalMatrix& Y, const ReducedBoundaryOp& N);

struct Condition0Report {
    CMatrix M;
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    bool degenerate = true;
};

/// Nondegeneracy of the homogeneous limit problem: smallest singular value of
/// the characteristic matrix against σ_max·ratio.
Condition0Report check_condition0(const HigherOrderSystem& sys, const BoundaryOperator& B,
                                  double eps, const SolverOptions& opts = {});

/// Y·M⁻¹ (all tracks); satisfies [N Y_norm] = I.
FundamentalMatrix normalized_fundamental(const FundamentalMatrix& Y, const CMatrix& M);

struct SampledMatrixTrack {
    GridSpec grid;
    std::vector<CMatrix> values;
};

/// Coefficient recovery A = −Y'·Y⁻¹ per grid point.
SampledMatrixTrack reconstruct_A(const FundamentalMatrix& Y);

/// Sup over the grid of the entrywise-sum distance between a reconstruction
/// and a reference coefficient.
double reconstruction_distance(const SampledMatrixTrack& rec, const SmoothMatrixFn& A);

struct SolveOutcome {
    SampledFn z;              // tracks 0..n+r, dimension m
    SampledFn y;              // first-order tracks 0..n+1, dimension rm
    CMatrix characteristic;   // [N Y]
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    double ode_residual = 0.0;      // sup-grid ‖L z − f‖₁ from the lifted tracks
    double boundary_residual = 0.0; // |B z − q|₁ via an independent re-integration

    // Re-integrable closure of the solution (first-order form actually solved
    // and its initial value): lets boundary operators of *other* parameter
    // values be applied to this solution exactly, without grid interpolation.
    std::shared_ptr<const FirstOrderSystem> first_order;
    CVector initial;
};

/// Apply a reduced boundary operator to the solution of y' + Ay = g,
/// y(a) = initial, by a fresh integration with forced stops and an
/// integrated density accumulator. Exact to the stepping tolerance even for
/// densities the storage grid cannot resolve.
CVector apply_reduced_exact(const ReducedBoundaryOp& N, const FirstOrderSystem& sys,
                            const CVector& initial, const GridSpec& grid, double tol);

/// Factor the problem once (fundamental matrix + characteristic matrix) and
/// solve for many right-hand sides. Throws DegenerateProblem from solve()
/// when the characteristic matrix fails the σ test.
class PreparedProblem {
public:
    PreparedProblem(const HigherOrderSystem& sys, const BoundaryOperator& B, double eps,
                    SolverOptions opts = {});

    double sigma_min() const noexcept { return data_.sigma_min; }
    double sigma_max() const noexcept { return data_.sigma_max; }
    bool degenerate() const noexcept {
        return data_.sigma_min <= opts_.degeneracy_ratio * data_.sigma_max;
    }
    const CMatrix& characteristic() const noexcept { return data_.M; }
    const FundamentalMatrix& fundamental() const noexcept { return data_.Y; }
    const FirstOrderSystem& companion() const noexcept { return companion_; }
    const HigherOrderSystem& system() const noexcept { return sys_; }
    const ReducedBoundaryOp& reduced() const noexcept { return N_; }
    const GridSpec& grid() const noexcept { return grid_; }
    double eps() const noexcept { return eps_; }

    SolveOutcome solve(const CVector& q) const;
    SolveOutcome solve_with(const SmoothVectorFn& f, const CVector& q) const;

private:
    struct Factored {
        FundamentalMatrix Y;
        CMatrix M;
        Eigen::ColPivHouseholderQR<CMatrix> qr;
        double sigma_min;
        double sigma_max;
    };
    static Factored factor(const HigherOrderSystem& sys, const FirstOrderSystem& companion,
                           const ReducedBoundaryOp& N, const GridSpec& grid,
                           const SolverOptions& opts);

    HigherOrderSystem sys_;
    ReducedBoundaryOp N_;
    FirstOrderSystem companion_;
    SolverOptions opts_;
    GridSpec grid_;
    double eps_;
    Factored data_;
};

/// One-shot convenience wrapper around PreparedProblem.
SolveOutcome solve_bvp(const HigherOrderSystem& sys, const BoundaryOperator& B, const CVector& q,
                       double eps, const SolverOptions& opts = {});

namespace detail {

/// Derivative tracks of a first-order solution from its value:
/// X^{(1)} = g − A X, X^{(s+1)} = g^{(s)} − Σ_i C(s,i)·A^{(i)}·X^{(s-i)}.
/// X may be a matrix of column solutions (g broadcast columnwise, null for
/// the homogeneous case). Returns tracks s = 0..upto.
std::vector<CMatrix> derivative_tracks(const SmoothMatrixFn& A, const SmoothVectorFn* g,
                                       double t, const CMatrix& X, int upto);

/// Adaptive Dormand–Prince 5(4) over sorted output points. `record` is called
/// at every output point (including the start); state is any Eigen matrix.
/// Throws IntegrationError on step-size underflow or non-finite values.
void integrate_dp54(const std::function<CMatrix(double, const CMatrix&)>& rhs, CMatrix state,
                    const std::vector<double>& outputs, double tol,
                    const std::function<void(int, double, const CMatrix&)>& record);

} // namespace detail

} // namespace parambvp
