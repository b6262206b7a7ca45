#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "parambvp/function_space.hpp"
#include "parambvp/types.hpp"

namespace parambvp {

/// Matrix-valued measure dΦ on [a, b]: finitely many atoms plus an
/// absolutely continuous part given by (possibly support-truncated) smooth
/// densities. Φ(a) = 0 and Φ is right-continuous inside the interval; atoms
/// at t = a are permitted (Φ keeps a right jump there, Φ(a) stays 0).
class MatrixMeasure {
public:
    struct DensityTerm {
        SmoothMatrixFn phi;
        double upper; // contributes on [a, upper] only
    };

    MatrixMeasure(Interval domain, int rows, int cols);

    void add_jump(double point, CMatrix weight);
    void add_density(SmoothMatrixFn phi);                  // full support
    void add_density(SmoothMatrixFn phi, double upper);    // truncated support

    /// Shortest feature length of the densities (e.g. oscillation wavelength);
    /// quadrature pre-splits at this scale. Defaults to the interval length.
    void set_feature_scale(double scale);
    double feature_scale() const noexcept { return feature_scale_; }

    const Interval& domain() const noexcept { return domain_; }
    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    const std::vector<std::pair<double, CMatrix>>& jumps() const noexcept { return jumps_; }
    const std::vector<DensityTerm>& densities() const noexcept { return density_; }
    bool has_density() const noexcept { return !density_.empty(); }

    /// Pointwise density φ(t) (sum of active terms).
    CMatrix density_at(double t) const;

    /// Support cutoffs strictly inside the interval (quadrature split points).
    std::vector<double> breakpoints() const;

    /// Total variation: Σ‖J_i‖ + ∫‖φ‖ dt (entrywise-sum norms).
    double total_variation(double quad_tol = 1e-10) const;

    /// Φ(t) = Σ_{t_i ≤ t} J_i + ∫_a^t φ(s) ds for t > a; Φ(a) = 0.
    CMatrix distribution_at(double t, double quad_tol = 1e-10) const;

    /// ∫_a^t Φ(s) ds, computed as Σ J_i·(t − t_i)⁺ + ∫_a^t (t − u)·φ(u) du.
    CMatrix integral_of_distribution(double t, double quad_tol = 1e-10) const;

private:
    Interval domain_;
    int rows_, cols_;
    std::vector<std::pair<double, CMatrix>> jumps_;
    std::vector<DensityTerm> density_;
    double feature_scale_;
};

/// Distance in variation between two measures over the same interval:
/// atoms matched by location, densities subtracted pointwise.
double variation_distance(const MatrixMeasure& x, const MatrixMeasure& y,
                          double quad_tol = 1e-10);

/// Boundary operator in canonical form,
///   B z = Σ_{k=1}^{n+r} β_k z^{(k-1)}(a) + ∫_a^b (dΦ) z^{(n+r)},
/// mapping (C^{(n+r)})^m functions to C^{rm}. Bound to a concrete parameter
/// value (families rebuild it per ε).
struct GenericBoundaryOperator {
    int n = 0;
    int r = 1;
    int m = 1;
    std::vector<CMatrix> beta; // n+r blocks, each rm × m; beta[k-1] acts on z^{(k-1)}(a)
    MatrixMeasure measure;     // rm × m

    int rm() const noexcept { return r * m; }
    void validate() const;
};

/// B z for analytically known z (order ≥ n+r). Integral part by adaptive
/// quadrature split at the measure's cutoffs and feature scale.
CVector apply_generic(const GenericBoundaryOperator& B, const SmoothVectorFn& z,
                      double quad_tol = 1e-10);

/// B z for grid-sampled z: atoms snap to grid points, the density integral is
/// composite Simpson over the samples. Accurate for densities resolved by the
/// grid; prefer the solver-integrated path otherwise.
CVector apply_generic(const GenericBoundaryOperator& B, const SampledFn& z);

/// Multipoint boundary operator (bound at a concrete ε):
///   B z = Σ_terms Σ_{l=0}^{n+r} α^{(l)} z^{(l)}(t_term).
/// Terms tagged with group 0 are the "stray" part that must fade as ε → 0;
/// groups ≥ 1 approach the limiting operator's points.
struct MultipointBoundaryOperator {
    struct Term {
        int group = 1;
        double point = 0.0;
        std::vector<CMatrix> alpha; // indexed by derivative order l = 0..n+r, each rm × m
    };

    Interval domain;
    int n = 0;
    int r = 1;
    int m = 1;
    std::vector<Term> terms;

    int rm() const noexcept { return r * m; }
    void validate() const;
};

CVector apply_multipoint(const MultipointBoundaryOperator& B, const SmoothVectorFn& z);

/// Rewrite a multipoint operator in canonical form via Taylor expansion at a
/// with integral remainder: interior values of z^{(l)} (l < n+r) become
/// β-contributions plus truncated polynomial-kernel densities; z^{(n+r)}
/// values become atoms.
GenericBoundaryOperator canonicalize_multipoint(const MultipointBoundaryOperator& B);

struct NormBound {
    double upper; // certified: |B z| ≤ upper·‖z‖_(n+r)
    double lower; // witnessed by a concrete probe
};

/// Two-sided bound on the operator norm of B over (C^{(n+r)})^m.
NormBound operator_norm_bound(const GenericBoundaryOperator& B, const GridSpec& grid);
NormBound operator_norm_bound(const MultipointBoundaryOperator& B, const GridSpec& grid);

/// Probe dictionary used for norm witnesses and strong-convergence checks:
/// monomials 1, t, …, t^max_power plus sin t and cos t, placed in every
/// component slot of an m-vector, built with smoothness `order`.
std::vector<SmoothVectorFn> probe_functions(Interval domain, int m, int order, int max_power);

/// Display labels matching probe_functions' construction order.
std::vector<std::string> probe_names(int m, int max_power);

} // namespace parambvp
