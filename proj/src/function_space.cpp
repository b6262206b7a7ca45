#include "parambvp/function_space.hpp"

#include <cmath>
#include <utility>

namespace parambvp {

namespace {

void check_order(int j, int order) {
    if (j < 0) throw SmoothnessError("negative derivative order requested");
    if (j > order)
        throw SmoothnessError("derivative of order " + std::to_string(j) +
                              " requested from a function of smoothness " + std::to_string(order));
}

void check_point(double t, const Interval& domain) {
    if (!domain.contains(t))
        throw IntervalError("evaluation point " + std::to_string(t) + " outside [" +
                            std::to_string(domain.a) + ", " + std::to_string(domain.b) + "]");
}

// Derivative trees per entry: trees[entry][j], j = 0..order.
std::vector<std::vector<ParamExpr>> derivative_tables(std::vector<ParamExpr> entries, int order) {
    std::vector<std::vector<ParamExpr>> tables(entries.size());
    for (std::size_t c = 0; c < entries.size(); ++c) {
        tables[c].reserve(order + 1);
        tables[c].push_back(std::move(entries[c]));
        for (int j = 1; j <= order; ++j)
            tables[c].push_back(tables[c][j - 1].derivative(expr::Var::T));
    }
    return tables;
}

} // namespace

SmoothVectorFn::SmoothVectorFn(Interval domain, int dim, int order, Body body, double eps)
    : domain_(domain), dim_(dim), order_(order), body_(std::move(body)), eps_(eps) {
    if (dim <= 0) throw ShapeError("function dimension must be positive");
    if (order < 0) throw SmoothnessError("smoothness order must be nonnegative");
}

SmoothVectorFn SmoothVectorFn::from_exprs(Interval domain, std::vector<ParamExpr> components,
                                          int order, double eps) {
    const int dim = static_cast<int>(components.size());
    auto tables = std::make_shared<std::vector<std::vector<ParamExpr>>>(
        derivative_tables(std::move(components), order));
    Body body = [tables, dim](double t, double e, int j) {
        CVector v(dim);
        for (int c = 0; c < dim; ++c) v(c) = Complex((*tables)[c][j].eval(t, e), 0.0);
        return v;
    };
    return SmoothVectorFn(domain, dim, order, std::move(body), eps);
}

CVector SmoothVectorFn::eval(double t, int j) const {
    check_order(j, order_);
    check_point(t, domain_);
    CVector v = body_(t, eps_, j);
    if (v.size() != dim_) throw ShapeError("function body returned wrong dimension");
    return v;
}

SmoothVectorFn SmoothVectorFn::at_eps(double eps) const {
    SmoothVectorFn copy(*this);
    copy.eps_ = eps;
    return copy;
}

SmoothMatrixFn::SmoothMatrixFn(Interval domain, int rows, int cols, int order, Body body,
                               double eps)
    : domain_(domain), rows_(rows), cols_(cols), order_(order), body_(std::move(body)), eps_(eps) {
    if (rows <= 0 || cols <= 0) throw ShapeError("matrix function shape must be positive");
    if (order < 0) throw SmoothnessError("smoothness order must be nonnegative");
}

SmoothMatrixFn SmoothMatrixFn::from_exprs(Interval domain, int rows, int cols,
                                          std::vector<ParamExpr> entries, int order, double eps) {
    if (static_cast<int>(entries.size()) != rows * cols)
        throw ShapeError("matrix function needs rows*cols entries");
    auto tables = std::make_shared<std::vector<std::vector<ParamExpr>>>(
        derivative_tables(std::move(entries), order));
    Body body = [tables, rows, cols](double t, double e, int j) {
        CMatrix M(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                M(r, c) = Complex((*tables)[r * cols + c][j].eval(t, e), 0.0);
        return M;
    };
    return SmoothMatrixFn(domain, rows, cols, order, std::move(body), eps);
}

SmoothMatrixFn SmoothMatrixFn::constant(Interval domain, CMatrix value, int order) {
    const int rows = static_cast<int>(value.rows());
    const int cols = static_cast<int>(value.cols());
    Body body = [value = std::move(value), rows, cols](double, double, int j) {
        if (j == 0) return value;
        return CMatrix(CMatrix::Zero(rows, cols));
    };
    return SmoothMatrixFn(domain, rows, cols, order, std::move(body));
}

CMatrix SmoothMatrixFn::eval(double t, int j) const {
    check_order(j, order_);
    check_point(t, domain_);
    CMatrix M = body_(t, eps_, j);
    if (M.rows() != rows_ || M.cols() != cols_)
        throw ShapeError("matrix function body returned wrong shape");
    return M;
}

SmoothMatrixFn SmoothMatrixFn::at_eps(double eps) const {
    SmoothMatrixFn copy(*this);
    copy.eps_ = eps;
    return copy;
}

// -- norms ---------------------------------------------------------------

namespace {

// Sum over entries of per-entry sup over the grid, one derivative order.
template <typename EvalEntry>
double track_contribution(int entries, int points, EvalEntry&& value) {
    std::vector<double> sup(entries, 0.0);
    for (int i = 0; i < points; ++i)
        for (int c = 0; c < entries; ++c) sup[c] = std::max(sup[c], value(c, i));
    double total = 0.0;
    for (double s : sup) total += s;
    return total;
}

} // namespace

double ck_norm(const SmoothVectorFn& x, int l, const GridSpec& grid) {
    check_order(l, x.order());
    double total = 0.0;
    for (int j = 0; j <= l; ++j) {
        std::vector<CVector> samples(grid.points());
        for (int i = 0; i < grid.points(); ++i) samples[i] = x.eval(grid.point(i), j);
        total += track_contribution(x.dim(), grid.points(),
                                    [&](int c, int i) { return std::abs(samples[i](c)); });
    }
    return total;
}

double ck_norm(const SmoothMatrixFn& x, int l, const GridSpec& grid) {
    check_order(l, x.order());
    const int entries = x.rows() * x.cols();
    double total = 0.0;
    for (int j = 0; j <= l; ++j) {
        std::vector<CMatrix> samples(grid.points());
        for (int i = 0; i < grid.points(); ++i) samples[i] = x.eval(grid.point(i), j);
        total += track_contribution(entries, grid.points(), [&](int c, int i) {
            return std::abs(samples[i](c / x.cols(), c % x.cols()));
        });
    }
    return total;
}

double ck_norm(const SampledFn& x, int l) {
    check_order(l, x.order());
    double total = 0.0;
    for (int j = 0; j <= l; ++j)
        total += track_contribution(x.dim, x.grid.points(),
                                    [&](int c, int i) { return std::abs(x.tracks[j](c, i)); });
    return total;
}

double ck_distance(const SmoothVectorFn& x, const SmoothVectorFn& y, int l, const GridSpec& grid) {
    if (x.dim() != y.dim()) throw ShapeError("distance between functions of different dimension");
    check_order(l, x.order());
    check_order(l, y.order());
    double total = 0.0;
    for (int j = 0; j <= l; ++j) {
        std::vector<CVector> dx(grid.points());
        for (int i = 0; i < grid.points(); ++i)
            dx[i] = x.eval(grid.point(i), j) - y.eval(grid.point(i), j);
        total += track_contribution(x.dim(), grid.points(),
                                    [&](int c, int i) { return std::abs(dx[i](c)); });
    }
    return total;
}

double ck_distance(const SmoothMatrixFn& x, const SmoothMatrixFn& y, int l, const GridSpec& grid) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw ShapeError("distance between matrix functions of different shape");
    check_order(l, x.order());
    check_order(l, y.order());
    const int entries = x.rows() * x.cols();
    double total = 0.0;
    for (int j = 0; j <= l; ++j) {
        std::vector<CMatrix> dx(grid.points());
        for (int i = 0; i < grid.points(); ++i)
            dx[i] = x.eval(grid.point(i), j) - y.eval(grid.point(i), j);
        total += track_contribution(entries, grid.points(), [&](int c, int i) {
            return std::abs(dx[i](c / x.cols(), c % x.cols()));
        });
    }
    return total;
}

double ck_distance(const SampledFn& x, const SampledFn& y, int l) {
    if (x.dim != y.dim) throw ShapeError("distance between functions of different dimension");
    if (x.grid.panels != y.grid.panels || x.grid.interval.a != y.grid.interval.a ||
        x.grid.interval.b != y.grid.interval.b)
        throw ShapeError("sampled functions live on different grids");
    check_order(l, x.order());
    check_order(l, y.order());
    double total = 0.0;
    for (int j = 0; j <= l; ++j)
        total += track_contribution(x.dim, x.grid.points(), [&](int c, int i) {
            return std::abs(x.tracks[j](c, i) - y.tracks[j](c, i));
        });
    return total;
}

double ck_distance(const SampledFn& x, const SmoothVectorFn& y, int l) {
    if (x.dim != y.dim()) throw ShapeError("distance between functions of different dimension");
    check_order(l, x.order());
    check_order(l, y.order());
    double total = 0.0;
    for (int j = 0; j <= l; ++j) {
        std::vector<CVector> dy(x.grid.points());
        for (int i = 0; i < x.grid.points(); ++i)
            dy[i] = x.tracks[j].col(i) - y.eval(x.grid.point(i), j);
        total += track_contribution(x.dim, x.grid.points(),
                                    [&](int c, int i) { return std::abs(dy[i](c)); });
    }
    return total;
}

} // namespace parambvp
