#pragma once

#include <complex>

#include <Eigen/Dense>

#include "parambvp/errors.hpp"

namespace parambvp {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/// Entrywise absolute-value sum. The norm used for number vectors and
/// matrices throughout (boundary values, jump matrices, β blocks).
inline double entry_sum_norm(const CMatrix& M) { return M.cwiseAbs().sum(); }
inline double entry_sum_norm(const CVector& v) { return v.cwiseAbs().sum(); }

/// Closed interval [a, b] with a < b.
struct Interval {
    double a;
    double b;

    Interval(double a_, double b_) : a(a_), b(b_) {
        if (!(a < b)) throw IntervalError("interval requires a < b");
    }

    double length() const noexcept { return b - a; }

    bool contains(double t) const noexcept {
        const double slack = 1e-12 * length();
        return t >= a - slack && t <= b + slack;
    }
};

/// Uniform evaluation grid: panels+1 points over the interval. Panel count
/// must be even and positive so composite Simpson applies directly.
struct GridSpec {
    Interval interval;
    int panels;

    GridSpec(Interval iv, int n) : interval(iv), panels(n) {
        if (n <= 0 || n % 2 != 0) throw IntervalError("grid panel count must be positive and even");
    }

    int points() const noexcept { return panels + 1; }
    double step() const noexcept { return interval.length() / panels; }
    double point(int i) const noexcept { return interval.a + step() * i; }

    /// Index of the closest grid point, if t lies on the grid up to rounding.
    /// Returns -1 otherwise.
    int snap(double t) const noexcept {
        const double x = (t - interval.a) / step();
        const double r = std::round(x);
        if (r < 0 || r > panels) return -1;
        if (std::abs(x - r) <= 1e-9) return static_cast<int>(r);
        return -1;
    }
};

constexpr int kDefaultGridPanels = 4096;

} // namespace parambvp
