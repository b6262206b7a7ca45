#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "parambvp/expr.hpp"
#include "parambvp/types.hpp"

namespace parambvp {

/// Scalar entry of a parameter-dependent function: one expression for ε ≠ 0
/// and an optional replacement used at ε = 0 (for formulas like sin(t/eps)
/// that have no value at the limit and need the limit declared separately).
struct ParamExpr {
    expr::ExprPtr general;
    expr::ExprPtr at_zero; // may be null: general is used at ε = 0 too

    static ParamExpr constant(double v) { return {expr::literal(v), nullptr}; }

    double eval(double t, double eps) const {
        if (eps == 0.0 && at_zero) return expr::evaluate(at_zero, t, eps);
        return expr::evaluate(general, t, eps);
    }

    ParamExpr derivative(expr::Var v) const {
        return {expr::differentiate(general, v),
                at_zero ? expr::differentiate(at_zero, v) : nullptr};
    }

    bool uses(expr::Var v) const {
        return expr::uses(general, v) || (at_zero && expr::uses(at_zero, v));
    }
};

/// Vector-valued function of t with `order` continuous derivatives available
/// analytically. May depend on the parameter; the object is always bound to a
/// concrete ε (rebind with `at_eps`). Derivatives are exact — expression-backed
/// instances carry pre-differentiated trees, closed-form instances supply all
/// tracks directly. Never produced by numerical differentiation.
class SmoothVectorFn {
public:
    using Body = std::function<CVector(double t, double eps, int j)>;

    SmoothVectorFn(Interval domain, int dim, int order, Body body, double eps = 0.0);

    /// Build from one expression per component, with derivative trees
    /// precomputed up to `order`.
    static SmoothVectorFn from_exprs(Interval domain, std::vector<ParamExpr> components,
                                     int order, double eps = 0.0);

    /// j-th derivative at t. Throws SmoothnessError when j exceeds the order,
    /// IntervalError when t leaves the domain.
    CVector eval(double t, int j = 0) const;

    SmoothVectorFn at_eps(double eps) const;

    int dim() const noexcept { return dim_; }
    int order() const noexcept { return order_; }
    const Interval& domain() const noexcept { return domain_; }
    double eps() const noexcept { return eps_; }

private:
    Interval domain_;
    int dim_;
    int order_;
    Body body_;
    double eps_;
};

/// Matrix-valued counterpart of SmoothVectorFn.
class SmoothMatrixFn {
public:
    using Body = std::function<CMatrix(double t, double eps, int j)>;

    SmoothMatrixFn(Interval domain, int rows, int cols, int order, Body body, double eps = 0.0);

    /// Entries given row-major as expressions; derivative trees precomputed.
    static SmoothMatrixFn from_exprs(Interval domain, int rows, int cols,
                                     std::vector<ParamExpr> entries, int order, double eps = 0.0);

    static SmoothMatrixFn constant(Interval domain, CMatrix value, int order);

    CMatrix eval(double t, int j = 0) const;

    SmoothMatrixFn at_eps(double eps) const;

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    int order() const noexcept { return order_; }
    const Interval& domain() const noexcept { return domain_; }
    double eps() const noexcept { return eps_; }

private:
    Interval domain_;
    int rows_, cols_;
    int order_;
    Body body_;
    double eps_;
};

/// Function known through its derivative tracks sampled on a uniform grid:
/// tracks[j].col(i) is the j-th derivative at grid point i. The usual output
/// of the solver.
struct SampledFn {
    GridSpec grid;
    int dim;
    std::vector<CMatrix> tracks; // tracks[j]: dim × grid.points(), j = 0..order

    int order() const noexcept { return static_cast<int>(tracks.size()) - 1; }
    CVector at(int j, int i) const { return tracks.at(j).col(i); }
};

/// ‖x‖_(l) = Σ_components Σ_{j=0..l} sup_t |x_c^{(j)}(t)|, the sup taken over
/// the grid points. Requires l ≤ order of x.
double ck_norm(const SmoothVectorFn& x, int l, const GridSpec& grid);
double ck_norm(const SmoothMatrixFn& x, int l, const GridSpec& grid);
double ck_norm(const SampledFn& x, int l);

/// ‖x − y‖_(l) over a shared grid. Shapes must agree.
double ck_distance(const SmoothVectorFn& x, const SmoothVectorFn& y, int l, const GridSpec& grid);
double ck_distance(const SmoothMatrixFn& x, const SmoothMatrixFn& y, int l, const GridSpec& grid);
double ck_distance(const SampledFn& x, const SampledFn& y, int l);
double ck_distance(const SampledFn& x, const SmoothVectorFn& y, int l);

} // namespace parambvp
