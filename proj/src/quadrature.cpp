#include "parambvp/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace parambvp::quad {

namespace {

constexpr int kMaxDepth = 32;

// One adaptive Simpson recursion on [a, b] with endpoint/midpoint values given.
template <typename Value, typename ErrNorm>
Value adapt(const std::function<Value(double)>& f, double a, double b, const Value& fa,
            const Value& fm, const Value& fb, const Value& whole, double tol, int depth,
            const ErrNorm& err_norm) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const Value flm = f(lm);
    const Value frm = f(rm);
    const double h = b - a;
    const Value left = (h / 12.0) * (fa + 4.0 * flm + fm);
    const Value right = (h / 12.0) * (fm + 4.0 * frm + fb);
    const Value refined = left + right;
    const Value delta = refined - whole;
    if (depth >= kMaxDepth || err_norm(delta) <= 15.0 * tol)
        return refined + delta / 15.0; // Richardson correction
    return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, err_norm) +
           adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, err_norm);
}

template <typename Value, typename ErrNorm>
Value segment(const std::function<Value(double)>& f, double a, double b, double tol,
              const ErrNorm& err_norm) {
    const double m = 0.5 * (a + b);
    const Value fa = f(a);
    const Value fm = f(m);
    const Value fb = f(b);
    const Value whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
    return adapt(f, a, b, fa, fm, fb, whole, tol, 0, err_norm);
}

std::vector<double> split_points(double a, double b, int min_splits,
                                 const std::vector<double>& breakpoints) {
    std::vector<double> pts{a, b};
    for (double p : breakpoints)
        if (p > a && p < b) pts.push_back(p);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    min_splits = std::clamp(min_splits, 1, 1 << 20);
    const double max_len = (b - a) / min_splits;
    std::vector<double> out;
    out.push_back(pts.front());
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double lo = pts[i - 1], hi = pts[i];
        const int pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_len)));
        for (int k = 1; k <= pieces; ++k) out.push_back(lo + (hi - lo) * k / pieces);
    }
    return out;
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 int min_splits, const std::vector<double>& breakpoints) {
    if (a == b) return 0.0;
    const auto pts = split_points(a, b, min_splits, breakpoints);
    const auto err = [](double d) { return std::fabs(d); };
    double total = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double frac = (pts[i] - pts[i - 1]) / (b - a);
        total += segment<double>(f, pts[i - 1], pts[i], tol * frac, err);
    }
    return total;
}

CMatrix integrate_matrix(const std::function<CMatrix(double)>& f, double a, double b, double tol,
                         int min_splits, const std::vector<double>& breakpoints) {
    const CMatrix probe = f(a);
    if (a == b) return CMatrix::Zero(probe.rows(), probe.cols());
    const auto pts = split_points(a, b, min_splits, breakpoints);
    const auto err = [](const CMatrix& d) { return entry_sum_norm(d); };
    CMatrix total = CMatrix::Zero(probe.rows(), probe.cols());
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double frac = (pts[i] - pts[i - 1]) / (b - a);
        total += segment<CMatrix>(f, pts[i - 1], pts[i], tol * frac, err);
    }
    return total;
}

double simpson_samples(const std::vector<double>& values, double step) {
    const int n = static_cast<int>(values.size()) - 1;
    if (n <= 0 || n % 2 != 0) throw IntervalError("Simpson needs an even, positive panel count");
    double acc = values[0] + values[n];
    for (int i = 1; i < n; ++i) acc += values[i] * (i % 2 ? 4.0 : 2.0);
    return acc * step / 3.0;
}

} // namespace parambvp::quad
