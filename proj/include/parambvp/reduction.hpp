#pragma once

#include <vector>

#include "parambvp/boundary.hpp"
#include "parambvp/function_space.hpp"

namespace parambvp {

/// C(n, k) as a double (exact for the small orders used here).
double binomial(int n, int k);

/// Order-r linear system
///   L z = z^{(r)} + Σ_{j=1}^{r} K_{r-j}·z^{(r-j)} = f,
/// with coefficients of smoothness n. K[j] stores the coefficient of z^{(j)}.
/// All members are bound to a concrete ε; families rebind via at_eps.
struct HigherOrderSystem {
    Interval domain;
    int r = 1;
    int n = 0;
    int m = 1;
    std::vector<SmoothMatrixFn> K; // r entries, each m×m with order ≥ n
    SmoothVectorFn f;              // dimension m, order ≥ n

    void validate() const;
    HigherOrderSystem at_eps(double eps) const;
};

/// First-order form y' + A y = g on C^{rm}.
struct FirstOrderSystem {
    Interval domain;
    int dim = 1; // rm
    int n = 0;   // smoothness of A and g
    SmoothMatrixFn A;
    SmoothVectorFn g;
};

/// Companion reduction of L z = f under y = col(z, z', …, z^{(r-1)}):
/// A carries −I_m on the superdiagonal blocks and (K_0 … K_{r-1}) in the last
/// block row, g = col(0, …, 0, f). (The superdiagonal sign is forced by
/// y' + Ay = g; substituting a known z is the oracle test for it.)
FirstOrderSystem build_companion(const HigherOrderSystem& sys, double eps);

/// A boundary operator rewritten to act on first-order solutions y:
/// finitely many terms W·y^{(s)}(t) plus densities integrated against
/// y_r^{(n+1)} (the last m-block of the (n+1)-st derivative track).
struct ReducedBoundaryOp {
    struct PointTerm {
        double point;
        int deriv;      // derivative track s of y
        CMatrix weight; // rm × rm
    };
    struct DensityPart {
        SmoothMatrixFn phi; // rm × m, weights y_r^{(n+1)}
        double upper;       // support [a, upper]
    };

    Interval domain;
    int r = 1;
    int n = 0;
    int m = 1;
    std::vector<PointTerm> point_terms;
    std::vector<DensityPart> densities;
    double feature_scale;

    int dim() const noexcept { return r * m; }

    /// Distinct interior evaluation points (atoms and multipoint values);
    /// the integrator must land on these exactly.
    std::vector<double> stop_points() const;

    /// Cutoffs of the density supports (quadrature/stepper split points).
    std::vector<double> density_breakpoints() const;

    bool has_density() const noexcept { return !densities.empty(); }

    /// Pointwise density weight Σ active φ(t), rm × m.
    CMatrix density_at(double t) const;
};

ReducedBoundaryOp reduce_boundary(const GenericBoundaryOperator& B, Interval domain);
ReducedBoundaryOp reduce_boundary(const MultipointBoundaryOperator& B);

/// Recover the z derivative tracks 0..n+r from a first-order solution sample:
/// z^{(k)} = y_{k+1} for k < r, and upward via the differentiated equation
/// z^{(r+i)} = f^{(i)} − Σ_j Σ_s C(i,s)·K_{r-j}^{(s)}·z^{(r-j+i-s)}
/// (analytic recursion; no numerical differentiation).
SampledFn lift_solution(const SampledFn& y, const HigherOrderSystem& sys);

} // namespace parambvp
