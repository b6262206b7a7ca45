#pragma once

#include <vector>

#include "parambvp/types.hpp"

namespace parambvp {

/// Finite coordinate space with the max-|coordinate| norm: a desk-scale model
/// of a space with a coordinate basis, on which two phenomena are exhibited
/// side by side — truncation operators converge pointwise while their
/// inverses' norms grow without bound.
struct TruncatedSpace {
    int dimension;

    explicit TruncatedSpace(int N = 64);

    double norm(const RVector& x) const;
};

/// S_n: keep coordinates 1…n, zero the rest (1-based cutoff).
RVector partial_sum(const RVector& x, int n);

/// The diagonal pair around coordinate `index` of an N-dimensional space:
/// the forward map scales that coordinate by 1/index (a small, invertible
/// perturbation of the identity), the inverse scales it back by index. In
/// the max-coordinate norm both operator norms are exactly the largest
/// |diagonal entry|: 1 for the forward map, index for the inverse.
struct DiagonalScaling {
    int dimension = 2;
    int index = 1;
    RVector diagonal;
    RVector inverse_diagonal;

    RVector apply(const RVector& x) const;
    RVector apply_inverse(const RVector& x) const;
    double norm() const;         // max |diagonal entry| = 1
    double inverse_norm() const; // max |inverse diagonal entry| = index, exact
};

DiagonalScaling inverse_blowup_pair(int index, int N);

/// One line of the demo table at cutoff n, all norms max-coordinate:
///   sn_error     = ‖S_n x − x‖ for the geometric vector x_k = 2^{1-k}
///   tsn_error    = ‖(T·S_n)x − T x‖ for a fixed random T (finite-rank
///                  approximants converge pointwise)
///   in_error     = ‖I_n x − x‖ (the forward maps converge pointwise too)
///   inverse_norm = ‖I_n⁻¹‖ = n (inversion stays discontinuous)
struct TruncationDemoRow {
    int n = 0;
    double sn_error = 0.0;
    double tsn_error = 0.0;
    double in_error = 0.0;
    double inverse_norm = 0.0;
};

std::vector<TruncationDemoRow> truncation_demo(int N = 64, unsigned seed = 20240901);

} // namespace parambvp
