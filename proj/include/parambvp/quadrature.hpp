#pragma once

#include <functional>
#include <vector>

#include "parambvp/types.hpp"

namespace parambvp::quad {

/// Adaptive composite Simpson over [a, b].
///
/// `breakpoints`: interior points where the integrand may lose smoothness
/// (support cutoffs); the interval is always split there first.
/// `min_splits`: minimum number of uniform initial segments — callers pass the
/// oscillation scale of the integrand through this to defeat the classic
/// failure of adaptive rules on periodic integrands sampled at dyadic points.
double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 int min_splits = 16, const std::vector<double>& breakpoints = {});

/// Entrywise adaptive Simpson for matrix-valued integrands; refinement is
/// driven by the entry-sum of the rule discrepancy.
CMatrix integrate_matrix(const std::function<CMatrix(double)>& f, double a, double b, double tol,
                         int min_splits = 16, const std::vector<double>& breakpoints = {});

/// Composite Simpson over uniformly gridded samples (even panel count).
double simpson_samples(const std::vector<double>& values, double step);

} // namespace parambvp::quad
