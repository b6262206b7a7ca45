#include "parambvp/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "parambvp/quadrature.hpp"

namespace parambvp {

namespace {

int splits_for_scale(const Interval& domain, double scale) {
    if (scale <= 0) return 1 << 16;
    const double ratio = domain.length() / scale;
    return std::clamp(static_cast<int>(std::ceil(4.0 * ratio)), 16, 1 << 18);
}

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

} // namespace

MatrixMeasure::MatrixMeasure(Interval domain, int rows, int cols)
    : domain_(domain), rows_(rows), cols_(cols), feature_scale_(domain.length()) {
    if (rows <= 0 || cols <= 0) throw ShapeError("measure shape must be positive");
}

void MatrixMeasure::add_jump(double point, CMatrix weight) {
    if (!domain_.contains(point)) throw IntervalError("measure atom outside the interval");
    if (weight.rows() != rows_ || weight.cols() != cols_)
        throw ShapeError("measure atom has wrong shape");
    jumps_.emplace_back(point, std::move(weight));
}

void MatrixMeasure::add_density(SmoothMatrixFn phi) { add_density(std::move(phi), domain_.b); }

void MatrixMeasure::add_density(SmoothMatrixFn phi, double upper) {
    if (phi.rows() != rows_ || phi.cols() != cols_)
        throw ShapeError("measure density has wrong shape");
    if (!domain_.contains(upper)) throw IntervalError("density cutoff outside the interval");
    density_.push_back({std::move(phi), upper});
}

void MatrixMeasure::set_feature_scale(double scale) {
    if (scale <= 0) throw IntervalError("feature scale must be positive");
    feature_scale_ = scale;
}

CMatrix MatrixMeasure::density_at(double t) const {
    CMatrix total = CMatrix::Zero(rows_, cols_);
    for (const auto& term : density_)
        if (t <= term.upper) total += term.phi.eval(t);
    return total;
}

std::vector<double> MatrixMeasure::breakpoints() const {
    std::vector<double> pts;
    for (const auto& term : density_)
        if (term.upper > domain_.a && term.upper < domain_.b) pts.push_back(term.upper);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

double MatrixMeasure::total_variation(double quad_tol) const {
    double tv = 0.0;
    for (const auto& [point, J] : jumps_) tv += entry_sum_norm(J);
    if (has_density()) {
        tv += quad::integrate([this](double t) { return entry_sum_norm(density_at(t)); },
                              domain_.a, domain_.b, quad_tol,
                              splits_for_scale(domain_, feature_scale_), breakpoints());
    }
    return tv;
}

CMatrix MatrixMeasure::distribution_at(double t, double quad_tol) const {
    CMatrix phi = CMatrix::Zero(rows_, cols_);
    if (t <= domain_.a) return phi;
    for (const auto& [point, J] : jumps_)
        if (point <= t) phi += J;
    if (has_density()) {
        phi += quad::integrate_matrix([this](double s) { return density_at(s); }, domain_.a, t,
                                      quad_tol, splits_for_scale(domain_, feature_scale_),
                                      breakpoints());
    }
    return phi;
}

CMatrix MatrixMeasure::integral_of_distribution(double t, double quad_tol) const {
    CMatrix acc = CMatrix::Zero(rows_, cols_);
    if (t <= domain_.a) return acc;
    for (const auto& [point, J] : jumps_) {
        const double base = std::max(point, domain_.a);
        if (base < t) acc += J * Complex(t - base, 0.0);
    }
    if (has_density()) {
        acc += quad::integrate_matrix(
            [this, t](double u) { return CMatrix(density_at(u) * Complex(t - u, 0.0)); },
            domain_.a, t, quad_tol, splits_for_scale(domain_, feature_scale_), breakpoints());
    }
    return acc;
}

double variation_distance(const MatrixMeasure& x, const MatrixMeasure& y, double quad_tol) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw ShapeError("variation distance between measures of different shape");
    if (x.domain().a != y.domain().a || x.domain().b != y.domain().b)
        throw ShapeError("variation distance between measures on different intervals");

    // Atoms matched by location.
    std::map<double, CMatrix> atoms;
    for (const auto& [p, J] : x.jumps()) {
        auto [it, fresh] = atoms.emplace(p, J);
        if (!fresh) it->second += J;
    }
    for (const auto& [p, J] : y.jumps()) {
        auto [it, fresh] = atoms.emplace(p, CMatrix(-J));
        if (!fresh) it->second -= J;
    }
    double dist = 0.0;
    for (const auto& [p, J] : atoms) dist += entry_sum_norm(J);

    if (x.has_density() || y.has_density()) {
        std::vector<double> pts = x.breakpoints();
        const auto ypts = y.breakpoints();
        pts.insert(pts.end(), ypts.begin(), ypts.end());
        const double scale = std::min(x.feature_scale(), y.feature_scale());
        dist += quad::integrate(
            [&](double t) { return entry_sum_norm(CMatrix(x.density_at(t) - y.density_at(t))); },
            x.domain().a, x.domain().b, quad_tol, splits_for_scale(x.domain(), scale), pts);
    }
    return dist;
}

// -- canonical boundary operator ------------------------------------------

void GenericBoundaryOperator::validate() const {
    if (n < 0 || r < 1 || m < 1) throw ShapeError("boundary operator needs n ≥ 0, r ≥ 1, m ≥ 1");
    if (static_cast<int>(beta.size()) != n + r)
        throw ShapeError("boundary operator needs exactly n+r β blocks");
    for (const auto& b : beta)
        if (b.rows() != rm() || b.cols() != m) throw ShapeError("β block has wrong shape");
    if (measure.rows() != rm() || measure.cols() != m)
        throw ShapeError("boundary measure has wrong shape");
}

CVector apply_generic(const GenericBoundaryOperator& B, const SmoothVectorFn& z,
                      double quad_tol) {
    B.validate();
    if (z.dim() != B.m) throw ShapeError("boundary operator applied to wrong dimension");
    if (z.order() < B.n + B.r)
        throw SmoothnessError("boundary operator needs z of smoothness n+r");

    const double a = B.measure.domain().a;
    CVector value = CVector::Zero(B.rm());
    for (int k = 1; k <= B.n + B.r; ++k) value += B.beta[k - 1] * z.eval(a, k - 1);
    const int top = B.n + B.r;
    for (const auto& [point, J] : B.measure.jumps()) value += J * z.eval(point, top);
    if (B.measure.has_density()) {
        const auto& dom = B.measure.domain();
        value += quad::integrate_matrix(
            [&](double t) { return CMatrix(B.measure.density_at(t) * z.eval(t, top)); }, dom.a,
            dom.b, quad_tol, splits_for_scale(dom, B.measure.feature_scale()),
            B.measure.breakpoints());
    }
    return value;
}

CVector apply_generic(const GenericBoundaryOperator& B, const SampledFn& z) {
    B.validate();
    if (z.dim != B.m) throw ShapeError("boundary operator applied to wrong dimension");
    const int top = B.n + B.r;
    if (z.order() < top) throw SmoothnessError("boundary operator needs z of smoothness n+r");

    CVector value = CVector::Zero(B.rm());
    for (int k = 1; k <= B.n + B.r; ++k) value += B.beta[k - 1] * z.at(k - 1, 0);
    for (const auto& [point, J] : B.measure.jumps()) {
        const int i = z.grid.snap(point);
        if (i < 0) throw IntervalError("measure atom does not lie on the sample grid");
        value += J * z.at(top, i);
    }
    if (B.measure.has_density()) {
        // Entrywise composite Simpson over the samples.
        const int pts = z.grid.points();
        std::vector<CMatrix> weighted(pts);
        for (int i = 0; i < pts; ++i)
            weighted[i] = B.measure.density_at(z.grid.point(i)) * z.at(top, i);
        std::vector<double> comp(pts);
        for (int rr = 0; rr < B.rm(); ++rr) {
            for (int i = 0; i < pts; ++i) comp[i] = weighted[i](rr).real();
            const double re = quad::simpson_samples(comp, z.grid.step());
            for (int i = 0; i < pts; ++i) comp[i] = weighted[i](rr).imag();
            const double im = quad::simpson_samples(comp, z.grid.step());
            value(rr) += Complex(re, im);
        }
    }
    return value;
}

// -- multipoint boundary operator -------------------------------------------

void MultipointBoundaryOperator::validate() const {
    if (n < 0 || r < 1 || m < 1) throw ShapeError("boundary operator needs n ≥ 0, r ≥ 1, m ≥ 1");
    for (const auto& term : terms) {
        if (term.group < 0) throw ShapeError("multipoint group index must be ≥ 0");
        if (!domain.contains(term.point))
            throw IntervalError("multipoint boundary point outside the interval");
        if (static_cast<int>(term.alpha.size()) != n + r + 1)
            throw ShapeError("multipoint term needs α blocks for derivative orders 0..n+r");
        for (const auto& A : term.alpha)
            if (A.rows() != rm() || A.cols() != m)
                throw ShapeError("multipoint α block has wrong shape");
    }
}

CVector apply_multipoint(const MultipointBoundaryOperator& B, const SmoothVectorFn& z) {
    B.validate();
    if (z.dim() != B.m) throw ShapeError("boundary operator applied to wrong dimension");
    if (z.order() < B.n + B.r)
        throw SmoothnessError("boundary operator needs z of smoothness n+r");
    CVector value = CVector::Zero(B.rm());
    for (const auto& term : B.terms)
        for (int l = 0; l <= B.n + B.r; ++l)
            if (!term.alpha[l].isZero(0.0)) value += term.alpha[l] * z.eval(term.point, l);
    return value;
}

GenericBoundaryOperator canonicalize_multipoint(const MultipointBoundaryOperator& B) {
    B.validate();
    const int top = B.n + B.r;
    const double a = B.domain.a;

    GenericBoundaryOperator G{B.n, B.r, B.m,
                              std::vector<CMatrix>(top, CMatrix::Zero(B.rm(), B.m)),
                              MatrixMeasure(B.domain, B.rm(), B.m)};

    for (const auto& term : B.terms) {
        for (int l = 0; l <= top; ++l) {
            const CMatrix& alpha = term.alpha[l];
            if (alpha.isZero(0.0)) continue;
            if (l == top) {
                // Direct value of the highest derivative: an atom of dΦ.
                G.measure.add_jump(term.point, alpha);
                continue;
            }
            // Taylor at a with integral remainder:
            //   z^{(l)}(t0) = Σ_{i=l}^{top-1} z^{(i)}(a)·(t0-a)^{i-l}/(i-l)!
            //              + ∫_a^{t0} (t0-s)^{top-1-l}/(top-1-l)!·z^{(top)}(s) ds.
            const double t0 = term.point;
            for (int i = l; i < top; ++i)
                G.beta[i] += alpha * std::pow(t0 - a, i - l) / factorial(i - l);
            if (t0 > a) {
                const int d = top - 1 - l;
                auto kernel = [alpha, t0, d](double s, double, int j) -> CMatrix {
                    if (j > d) return CMatrix::Zero(alpha.rows(), alpha.cols());
                    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
                    return alpha * (sign * std::pow(t0 - s, d - j) / factorial(d - j));
                };
                // Piecewise-polynomial kernel: smooth between cutoffs, so the
                // cutoff breakpoints alone keep the quadrature exact-grade.
                G.measure.add_density(
                    SmoothMatrixFn(B.domain, B.rm(), B.m, B.n + 1, std::move(kernel)), t0);
            }
        }
    }
    return G;
}

// -- operator norm bounds -----------------------------------------------

std::vector<SmoothVectorFn> probe_functions(Interval domain, int m, int order, int max_power) {
    std::vector<SmoothVectorFn> probes;
    std::vector<expr::ExprPtr> shapes;
    for (int p = 0; p <= max_power; ++p) shapes.push_back(expr::pow(expr::var_t(), p));
    shapes.push_back(expr::sin(expr::var_t()));
    shapes.push_back(expr::cos(expr::var_t()));
    for (int slot = 0; slot < m; ++slot) {
        for (const auto& shape : shapes) {
            std::vector<ParamExpr> comps(m, ParamExpr::constant(0.0));
            comps[slot] = ParamExpr{shape, nullptr};
            probes.push_back(SmoothVectorFn::from_exprs(domain, std::move(comps), order));
        }
    }
    return probes;
}

std::vector<std::string> probe_names(int m, int max_power) {
    std::vector<std::string> shapes;
    for (int p = 0; p <= max_power; ++p) shapes.push_back("t^" + std::to_string(p));
    shapes.emplace_back("sin(t)");
    shapes.emplace_back("cos(t)");
    std::vector<std::string> names;
    for (int slot = 1; slot <= m; ++slot)
        for (const auto& s : shapes)
            names.push_back(m == 1 ? s : s + "*e" + std::to_string(slot));
    return names;
}

namespace {

template <typename Op, typename Apply>
NormBound probe_norm_bound(const Op& B, const GridSpec& grid, double upper, Apply&& apply) {
    double lower = 0.0;
    const auto probes =
        probe_functions(grid.interval, B.m, B.n + B.r + 2, B.n + B.r + 2);
    for (const auto& z : probes) {
        const double zn = ck_norm(z, B.n + B.r, grid);
        if (zn <= 0) continue;
        lower = std::max(lower, entry_sum_norm(CVector(apply(z))) / zn);
    }
    return {upper, lower};
}

} // namespace

NormBound operator_norm_bound(const GenericBoundaryOperator& B, const GridSpec& grid) {
    B.validate();
    double upper = B.measure.total_variation();
    for (const auto& b : B.beta) upper += entry_sum_norm(b);
    return probe_norm_bound(B, grid, upper,
                            [&](const SmoothVectorFn& z) { return apply_generic(B, z); });
}

NormBound operator_norm_bound(const MultipointBoundaryOperator& B, const GridSpec& grid) {
    B.validate();
    double upper = 0.0;
    for (const auto& term : B.terms)
        for (const auto& A : term.alpha) upper += entry_sum_norm(A);
    return probe_norm_bound(B, grid, upper,
                            [&](const SmoothVectorFn& z) { return apply_multipoint(B, z); });
}

} // namespace parambvp
