#include "parambvp/reduction.hpp"

#include <algorithm>
#include <cmath>

namespace parambvp {

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double acc = 1.0;
    for (int i = 1; i <= k; ++i) acc = acc * (n - k + i) / i;
    return std::round(acc);
}

void HigherOrderSystem::validate() const {
    if (r < 1 || n < 0 || m < 1) throw ShapeError("system needs r ≥ 1, n ≥ 0, m ≥ 1");
    if (static_cast<int>(K.size()) != r) throw ShapeError("system needs exactly r coefficients");
    for (const auto& k : K) {
        if (k.rows() != m || k.cols() != m) throw ShapeError("coefficient has wrong shape");
        if (k.order() < n) throw SmoothnessError("coefficient smoothness below n");
    }
    if (f.dim() != m) throw ShapeError("right-hand side has wrong dimension");
    if (f.order() < n) throw SmoothnessError("right-hand side smoothness below n");
}

HigherOrderSystem HigherOrderSystem::at_eps(double eps) const {
    HigherOrderSystem out(*this);
    for (auto& k : out.K) k = k.at_eps(eps);
    out.f = out.f.at_eps(eps);
    return out;
}

FirstOrderSystem build_companion(const HigherOrderSystem& sys_in, double eps) {
    sys_in.validate();
    const HigherOrderSystem sys = sys_in.at_eps(eps);
    const int r = sys.r, m = sys.m, rm = r * m;

    auto K = std::make_shared<std::vector<SmoothMatrixFn>>(sys.K);
    SmoothMatrixFn::Body abody = [K, r, m, rm](double t, double, int j) {
        CMatrix A = CMatrix::Zero(rm, rm);
        if (j == 0)
            for (int k = 0; k < r - 1; ++k)
                A.block(k * m, (k + 1) * m, m, m) = -CMatrix::Identity(m, m);
        for (int k = 0; k < r; ++k) A.block((r - 1) * m, k * m, m, m) = (*K)[k].eval(t, j);
        return A;
    };

    auto f = std::make_shared<SmoothVectorFn>(sys.f);
    SmoothVectorFn::Body gbody = [f, r, m, rm](double t, double, int j) {
        CVector g = CVector::Zero(rm);
        g.segment((r - 1) * m, m) = f->eval(t, j);
        return g;
    };

    return FirstOrderSystem{sys.domain, rm, sys.n,
                            SmoothMatrixFn(sys.domain, rm, rm, sys.n, std::move(abody), eps),
                            SmoothVectorFn(sys.domain, rm, sys.n, std::move(gbody), eps)};
}

// -- reduced boundary operators ------------------------------------------

std::vector<double> ReducedBoundaryOp::stop_points() const {
    std::vector<double> pts;
    for (const auto& term : point_terms)
        if (term.point > domain.a) pts.push_back(term.point);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

std::vector<double> ReducedBoundaryOp::density_breakpoints() const {
    std::vector<double> pts;
    for (const auto& d : densities)
        if (d.upper > domain.a && d.upper < domain.b) pts.push_back(d.upper);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

CMatrix ReducedBoundaryOp::density_at(double t) const {
    CMatrix total = CMatrix::Zero(dim(), m);
    for (const auto& d : densities)
        if (t <= d.upper) total += d.phi.eval(t);
    return total;
}

namespace {

// Selector picking block k (1-based) of y: E_k y = y_k, as an rm×rm-compatible
// weight factor W = coeff·E_k (coeff is rm×m).
CMatrix fold_selector(const CMatrix& coeff, int block_1based, int r, int m) {
    CMatrix W = CMatrix::Zero(r * m, r * m);
    W.block(0, (block_1based - 1) * m, r * m, m) = coeff;
    return W;
}

} // namespace

ReducedBoundaryOp reduce_boundary(const GenericBoundaryOperator& B, Interval domain) {
    B.validate();
    ReducedBoundaryOp N{domain, B.r, B.n, B.m, {}, {}, B.measure.feature_scale()};

    // β_k z^{(k-1)}(a): k ≤ r-1 selects block k of y(a); k ≥ r selects the
    // (k-r)-th derivative of the last block.
    for (int k = 1; k <= B.n + B.r; ++k) {
        if (B.beta[k - 1].isZero(0.0)) continue;
        if (k <= B.r - 1)
            N.point_terms.push_back({domain.a, 0, fold_selector(B.beta[k - 1], k, B.r, B.m)});
        else
            N.point_terms.push_back(
                {domain.a, k - B.r, fold_selector(B.beta[k - 1], B.r, B.r, B.m)});
    }
    // Atoms of dΦ act on z^{(n+r)} = y_r^{(n+1)}.
    for (const auto& [point, J] : B.measure.jumps())
        N.point_terms.push_back({point, B.n + 1, fold_selector(J, B.r, B.r, B.m)});
    for (const auto& d : B.measure.densities()) N.densities.push_back({d.phi, d.upper});
    return N;
}

ReducedBoundaryOp reduce_boundary(const MultipointBoundaryOperator& B) {
    B.validate();
    ReducedBoundaryOp N{B.domain, B.r, B.n, B.m, {}, {}, B.domain.length()};
    for (const auto& term : B.terms) {
        for (int l = 0; l <= B.n + B.r; ++l) {
            if (term.alpha[l].isZero(0.0)) continue;
            // z^{(l)} = block l+1 of y for l < r, else derivative l-r+1 of y_r.
            if (l <= B.r - 1)
                N.point_terms.push_back({term.point, 0, fold_selector(term.alpha[l], l + 1, B.r, B.m)});
            else
                N.point_terms.push_back(
                    {term.point, l - B.r + 1, fold_selector(term.alpha[l], B.r, B.r, B.m)});
        }
    }
    return N;
}

// -- lifting ------------------------------------------------------------

SampledFn lift_solution(const SampledFn& y, const HigherOrderSystem& sys) {
    sys.validate();
    const int r = sys.r, n = sys.n, m = sys.m;
    if (y.dim != r * m) throw ShapeError("first-order solution has wrong dimension");
    const int pts = y.grid.points();

    SampledFn z{y.grid, m, std::vector<CMatrix>(n + r + 1, CMatrix::Zero(m, pts))};

    for (int k = 0; k < r; ++k) z.tracks[k] = y.tracks[0].block(k * m, 0, m, pts);

    // z^{(r+i)} = f^{(i)} − Σ_{j=1}^{r} Σ_{s=0}^{i} C(i,s)·K_{r-j}^{(s)}·z^{(r-j+i-s)}
    for (int i = 0; i <= n; ++i) {
        for (int p = 0; p < pts; ++p) {
            const double t = y.grid.point(p);
            CVector v = sys.f.eval(t, i);
            for (int j = 1; j <= r; ++j)
                for (int s = 0; s <= i; ++s)
                    v -= binomial(i, s) * (sys.K[r - j].eval(t, s) *
                                           CVector(z.tracks[r - j + i - s].col(p)));
            z.tracks[r + i].col(p) = v;
        }
    }
    return z;
}

} // namespace parambvp
