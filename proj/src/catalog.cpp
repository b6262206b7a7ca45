#include "parambvp/catalog.hpp"

#include <cmath>
#include <functional>

namespace parambvp {

namespace {

const Interval kUnit{0.0, 1.0};

ParamExpr pe(const std::string& general) { return {expr::parse(general), nullptr}; }
ParamExpr pe(const std::string& general, const std::string& zero) {
    return {expr::parse(general), expr::parse(zero)};
}

CMatrix scalar(double v) {
    CMatrix M(1, 1);
    M(0, 0) = v;
    return M;
}

SmoothMatrixFn coeff11(const std::string& e, int order) {
    return SmoothMatrixFn::from_exprs(kUnit, 1, 1, {pe(e)}, order);
}

CVector qvec(std::initializer_list<double> values) {
    CVector q(static_cast<int>(values.size()));
    int i = 0;
    for (double v : values) q[i++] = v;
    return q;
}

/// alpha vector for one multipoint term: zeros except alpha[l] = w.
std::vector<CMatrix> alpha_single(int rm, int m, int top, int l, const CMatrix& w) {
    std::vector<CMatrix> alpha(top + 1, CMatrix::Zero(rm, m));
    alpha[l] = w;
    return alpha;
}

/// Initial-value conditions z^{(l)}(a) = q_{l+1}, l = 0..r-1, as one term.
MultipointBoundaryOperator initial_conditions(int r, int n, int m) {
    MultipointBoundaryOperator B{kUnit, n, r, m, {}};
    MultipointBoundaryOperator::Term term;
    term.group = 1;
    term.point = kUnit.a;
    term.alpha.assign(n + r + 1, CMatrix::Zero(r * m, m));
    for (int l = 0; l < r; ++l)
        for (int c = 0; c < m; ++c) term.alpha[l](l * m + c, c) = 1.0;
    B.terms.push_back(std::move(term));
    return B;
}

/// Scalar Dirichlet conditions for r = 2: z(a) = q_1, z(b) = q_2.
MultipointBoundaryOperator dirichlet_pair(int n) {
    MultipointBoundaryOperator B{kUnit, n, 2, 1, {}};
    CMatrix left = CMatrix::Zero(2, 1), right = CMatrix::Zero(2, 1);
    left(0, 0) = 1.0;
    right(1, 0) = 1.0;
    B.terms.push_back({1, kUnit.a, alpha_single(2, 1, n + 2, 0, left)});
    B.terms.push_back({2, kUnit.b, alpha_single(2, 1, n + 2, 0, right)});
    return B;
}

/// First-order scalar system z' + k(t,ε) z = f(t,ε) on [0,1].
std::function<HigherOrderSystem(double)> scalar_system(const ParamExpr& k, const std::string& f,
                                                       int n) {
    const SmoothMatrixFn K = SmoothMatrixFn::from_exprs(kUnit, 1, 1, {k}, n);
    const SmoothVectorFn F = SmoothVectorFn::from_exprs(kUnit, {pe(f)}, n);
    return [K, F, n](double e) {
        return HigherOrderSystem{kUnit, 1, n, 1, {K}, F}.at_eps(e);
    };
}

std::function<HigherOrderSystem(double)> scalar_system(const std::string& k,
                                                       const std::string& f, int n) {
    return scalar_system(pe(k), f, n);
}

std::function<SmoothVectorFn(double)> exact11(const ParamExpr& z, int order) {
    return [z, order](double e) {
        return SmoothVectorFn::from_exprs(kUnit, {z}, order, e);
    };
}

std::function<CVector(double)> fixed_q(CVector q) {
    return [q = std::move(q)](double) { return q; };
}

std::function<BoundaryOperator(double)> fixed_boundary(MultipointBoundaryOperator B) {
    return [B = std::move(B)](double) -> BoundaryOperator { return B; };
}

// --- family constructors ----------------------------------------------------

ProblemFamily make_line() {
    ProblemFamily fam;
    fam.name = "line";
    fam.summary = "z' = 1, z(0) = 0; solution z = t";
    fam.domain = kUnit;
    fam.system = scalar_system("0", "1", 0);
    fam.boundary = fixed_boundary(initial_conditions(1, 0, 1));
    fam.rhs = fixed_q(qvec({0.0}));
    fam.exact = exact11(pe("t"), 1);
    fam.tagged_satisfying = true;
    return fam;
}

ProblemFamily make_exp() {
    ProblemFamily fam;
    fam.name = "exp";
    fam.summary = "z' - z = 0, z(0) = 1; solution z = exp(t)";
    fam.domain = kUnit;
    fam.system = scalar_system("-1", "0", 0);
    fam.boundary = fixed_boundary(initial_conditions(1, 0, 1));
    fam.rhs = fixed_q(qvec({1.0}));
    fam.exact = exact11(pe("exp(t)"), 1);
    fam.tagged_satisfying = true;
    return fam;
}

ProblemFamily make_sin() {
    ProblemFamily fam;
    fam.name = "sin";
    fam.summary = "z'' + z = 0, z(0) = 0, z(1) = sin 1; solution z = sin t";
    fam.domain = kUnit;
    fam.r = 2;
    const SmoothMatrixFn K0 = coeff11("1", 0);
    const SmoothMatrixFn K1 = coeff11("0", 0);
    const SmoothVectorFn F = SmoothVectorFn::from_exprs(kUnit, {pe("0")}, 0);
    fam.system = [K0, K1, F](double e) {
        return HigherOrderSystem{kUnit, 2, 0, 1, {K0, K1}, F}.at_eps(e);
    };
    fam.boundary = fixed_boundary(dirichlet_pair(0));
    fam.rhs = fixed_q(qvec({0.0, std::sin(1.0)}));
    fam.exact = exact11(pe("sin(t)"), 2);
    fam.tagged_satisfying = true;
    return fam;
}

ProblemFamily make_linpoly() {
    ProblemFamily fam;
    fam.name = "linpoly";
    fam.summary = "z' = 2t with C^1 data (n = 1), z(0) = 0; solution z = t^2";
    fam.domain = kUnit;
    fam.n = 1;
    fam.system = scalar_system("0", "2*t", 1);
    fam.boundary = fixed_boundary(initial_conditions(1, 1, 1));
    fam.rhs = fixed_q(qvec({0.0}));
    fam.exact = exact11(pe("t^2"), 2);
    fam.tagged_satisfying = true;
    return fam;
}

ProblemFamily make_cubic() {
    ProblemFamily fam;
    fam.name = "cubic";
    fam.summary = "z''' = 6, zero initial data; solution z = t^3";
    fam.domain = kUnit;
    fam.r = 3;
    const SmoothMatrixFn Z = coeff11("0", 0);
    const SmoothVectorFn F = SmoothVectorFn::from_exprs(kUnit, {pe("6")}, 0);
    fam.system = [Z, F](double e) {
        return HigherOrderSystem{kUnit, 3, 0, 1, {Z, Z, Z}, F}.at_eps(e);
    };
    fam.boundary = fixed_boundary(initial_conditions(3, 0, 1));
    fam.rhs = fixed_q(qvec({0.0, 0.0, 0.0}));
    fam.exact = exact11(pe("t^3"), 3);
    fam.tagged_satisfying = true;
    return fam;
}

ProblemFamily make_coupled() {
    ProblemFamily fam;
    fam.name = "coupled";
    fam.summary = "rotation system z1' = z2, z2' = -z1, z(0) = (0,1); solution (sin t, cos t)";
    fam.domain = kUnit;
    fam.m = 2;
    CMatrix A = CMatrix::Zero(2, 2);
    A(0, 1) = -1.0;
    A(1, 0) = 1.0;
    const SmoothMatrixFn K0 = SmoothMatrixFn::constant(kUnit, A, 0);
    const SmoothVectorFn F = SmoothVectorFn::from_exprs(kUnit, {pe("0"), pe("0")}, 0);
    fam.system = [K0, F](double e) {
        return HigherOrderSystem{kUnit, 1, 0, 2, {K0}, F}.at_eps(e);
    };
    fam.boundary = fixed_boundary(initial_conditions(1, 0, 2));
    fam.rhs = fixed_q(qvec({0.0, 1.0}));
    const std::vector<ParamExpr> comps = {pe("sin(t)"), pe("cos(t)")};
    fam.exact = [comps](double e) { return SmoothVectorFn::from_exprs(kUnit, comps, 1, e); };
    fam.tagged_satisfying = true;
    return fam;
}

ProblemFamily make_dirichlet(double lambda, const std::string& name, const std::string& summary,
                             CVector q, std::function<SmoothVectorFn(double)> exact) {
    ProblemFamily fam;
    fam.name = name;
    fam.summary = summary;
    fam.domain = kUnit;
    fam.r = 2;
    const SmoothMatrixFn K0 = SmoothMatrixFn::constant(kUnit, scalar(lambda), 0);
    const SmoothMatrixFn K1 = coeff11("0", 0);
    const SmoothVectorFn F = SmoothVectorFn::from_exprs(kUnit, {pe("0")}, 0);
    fam.system = [K0, K1, F](double e) {
        return HigherOrderSystem{kUnit, 2, 0, 1, {K0, K1}, F}.at_eps(e);
    };
    fam.boundary = fixed_boundary(dirichlet_pair(0));
    fam.rhs = fixed_q(std::move(q));
    fam.exact = std::move(exact);
    return fam;
}

ProblemFamily make_integral_bc() {
    ProblemFamily fam;
    fam.name = "integral-bc";
    fam.summary = "z' = 1 with the integral condition z(0) + INT z' dt = 1; solution z = t";
    fam.domain = kUnit;
    fam.system = scalar_system("0", "1", 0);
    const SmoothMatrixFn phi = SmoothMatrixFn::constant(kUnit, scalar(1.0), 0);
    fam.boundary = [phi](double e) -> BoundaryOperator {
        GenericBoundaryOperator B{0, 1, 1, {scalar(1.0)}, MatrixMeasure(kUnit, 1, 1)};
        B.measure.add_density(phi.at_eps(e));
        return B;
    };
    fam.rhs = fixed_q(qvec({1.0}));
    fam.exact = exact11(pe("t"), 1);
    fam.tagged_satisfying = true;
    return fam;
}

ProblemFamily make_const() {
    ProblemFamily fam = make_line();
    fam.name = "const";
    fam.summary = "parameter-independent control family; err(eps) identically ~0";
    return fam;
}

ProblemFamily make_k0_eps() {
    ProblemFamily fam;
    fam.name = "k0-eps";
    fam.summary = "z' + eps z = 1, z(0) = 0; converges to z = t at rate O(eps)";
    fam.domain = kUnit;
    fam.system = scalar_system("eps", "1", 0);
    fam.boundary = fixed_boundary(initial_conditions(1, 0, 1));
    fam.rhs = fixed_q(qvec({0.0}));
    fam.exact = exact11(pe("(1-exp(-eps*t))/eps", "t"), 1);
    fam.tagged_satisfying = true;
    return fam;
}

ProblemFamily make_f_shift() {
    ProblemFamily fam;
    fam.name = "f-shift";
    fam.summary = "load shifted by eps: z' = 1 + eps, z(0) = 0; discrepancy is exactly eps";
    fam.domain = kUnit;
    fam.system = scalar_system("0", "1+eps", 0);
    fam.boundary = fixed_boundary(initial_conditions(1, 0, 1));
    fam.rhs = fixed_q(qvec({0.0}));
    fam.exact = exact11(pe("(1+eps)*t", "t"), 1);
    fam.tagged_satisfying = true;
    return fam;
}

ProblemFamily make_q_shift() {
    ProblemFamily fam;
    fam.name = "q-shift";
    fam.summary = "boundary value shifted by eps: z' = 1, z(0) = eps; discrepancy is exactly eps";
    fam.domain = kUnit;
    fam.system = scalar_system("0", "1", 0);
    fam.boundary = fixed_boundary(initial_conditions(1, 0, 1));
    fam.rhs = [](double e) { return qvec({e}); };
    fam.exact = exact11(pe("t+eps", "t"), 1);
    fam.tagged_satisfying = true;
    return fam;
}

ProblemFamily make_osc_k() {
    ProblemFamily fam;
    fam.name = "osc-k";
    fam.summary = "oscillating coefficient sin(t/eps) with declared limit 0; "
                  "coefficient convergence fails and the error stalls";
    fam.domain = kUnit;
    fam.system = scalar_system(pe("sin(t/eps)", "0"), "1", 0);
    fam.boundary = fixed_boundary(initial_conditions(1, 0, 1));
    fam.rhs = fixed_q(qvec({0.0}));
    return fam;
}

ProblemFamily make_divdiff_mp() {
    ProblemFamily fam;
    fam.name = "divdiff-mp";
    fam.summary = "difference-quotient condition z(0) + (z(eps) - z(0))/eps = 2 with declared "
                  "limit z(0) = 2; the drift-weight product stays at 1 and the error at 1";
    fam.domain = kUnit;
    fam.system = scalar_system("0", "1", 0);
    fam.boundary = [](double e) -> BoundaryOperator {
        MultipointBoundaryOperator B{kUnit, 0, 1, 1, {}};
        if (e == 0.0) {
            B.terms.push_back({1, 0.0, alpha_single(1, 1, 1, 0, scalar(1.0))});
        } else {
            B.terms.push_back({1, e, alpha_single(1, 1, 1, 0, scalar(1.0 / e))});
            B.terms.push_back({1, 0.0, alpha_single(1, 1, 1, 0, scalar(1.0 - 1.0 / e))});
        }
        return B;
    };
    fam.rhs = fixed_q(qvec({2.0}));
    fam.exact = exact11(pe("t+1", "t+2"), 1);
    return fam;
}

ProblemFamily make_mp_moving() {
    ProblemFamily fam;
    fam.name = "mp-moving";
    fam.summary = "moving-point condition z(eps) = 1 for z' = 1; converges to z(0) = 1";
    fam.domain = kUnit;
    fam.system = scalar_system("0", "1", 0);
    fam.boundary = [](double e) -> BoundaryOperator {
        MultipointBoundaryOperator B{kUnit, 0, 1, 1, {}};
        B.terms.push_back({1, e, alpha_single(1, 1, 1, 0, scalar(1.0))});
        return B;
    };
    fam.rhs = fixed_q(qvec({1.0}));
    fam.exact = exact11(pe("t+1-eps", "t+1"), 1);
    fam.tagged_satisfying = true;
    return fam;
}

ProblemFamily make_osc_density() {
    ProblemFamily fam;
    fam.name = "osc-density";
    fam.summary = "condition z(0) + INT sin(t/eps) z'(t) dt = 0: the measure does not converge "
                  "in variation, yet the operator converges pointwise";
    fam.domain = kUnit;
    fam.system = scalar_system("0", "1", 0);
    const SmoothMatrixFn phi = SmoothMatrixFn::from_exprs(kUnit, 1, 1, {pe("sin(t/eps)", "0")}, 0);
    fam.boundary = [phi](double e) -> BoundaryOperator {
        GenericBoundaryOperator B{0, 1, 1, {scalar(1.0)}, MatrixMeasure(kUnit, 1, 1)};
        B.measure.add_density(phi.at_eps(e));
        const double len = kUnit.b - kUnit.a;
        B.measure.set_feature_scale(e > 0.0 ? std::min(len, 2.0 * M_PI * e) : len);
        return B;
    };
    fam.rhs = fixed_q(qvec({0.0}));
    fam.exact = exact11(pe("t-eps*(1-cos(1/eps))", "t"), 1);
    fam.tagged_satisfying = true;
    return fam;
}

ProblemFamily make_eigen_family() {
    ProblemFamily fam;
    fam.name = "eigen-family";
    fam.summary = "z'' + (pi^2 - eps) z = 0 with Dirichlet data: solvable for eps > 0, "
                  "degenerate in the limit";
    fam.domain = kUnit;
    fam.r = 2;
    const ParamExpr k0{expr::sub(expr::literal(M_PI * M_PI), expr::var_eps()), nullptr};
    const SmoothMatrixFn K0 = SmoothMatrixFn::from_exprs(kUnit, 1, 1, {k0}, 0);
    const SmoothMatrixFn K1 = coeff11("0", 0);
    const SmoothVectorFn F = SmoothVectorFn::from_exprs(kUnit, {pe("0")}, 0);
    fam.system = [K0, K1, F](double e) {
        return HigherOrderSystem{kUnit, 2, 0, 1, {K0, K1}, F}.at_eps(e);
    };
    fam.boundary = fixed_boundary(dirichlet_pair(0));
    fam.rhs = fixed_q(qvec({0.0, 0.0}));
    return fam;
}

using Maker = ProblemFamily (*)();

struct NamedMaker {
    const char* name;
    const char* summary;
    Maker make;
};

ProblemFamily make_dirichlet_9() {
    return make_dirichlet(9.0, "dirichlet-9",
                          "z'' + 9z = 0, z(0) = 0, z(1) = sin 3; solution z = sin 3t",
                          qvec({0.0, std::sin(3.0)}), exact11(pe("sin(3*t)"), 2));
}

ProblemFamily make_dirichlet_eigen() {
    ProblemFamily fam = make_dirichlet(M_PI * M_PI, "dirichlet-eigen",
                                       "z'' + pi^2 z = 0 with Dirichlet data: the characteristic "
                                       "matrix is singular",
                                       qvec({0.0, 0.0}), nullptr);
    return fam;
}

const NamedMaker kMakers[] = {
    {"line", "z' = 1, z(0) = 0; solution z = t", make_line},
    {"exp", "z' - z = 0, z(0) = 1; solution z = exp(t)", make_exp},
    {"sin", "z'' + z = 0, Dirichlet data; solution z = sin t", make_sin},
    {"linpoly", "z' = 2t with C^1 data, z(0) = 0; solution z = t^2", make_linpoly},
    {"cubic", "z''' = 6, zero initial data; solution z = t^3", make_cubic},
    {"coupled", "rotation system with z(0) = (0,1); solution (sin t, cos t)", make_coupled},
    {"dirichlet-9", "z'' + 9z = 0, Dirichlet data; solution z = sin 3t", make_dirichlet_9},
    {"dirichlet-eigen", "z'' + pi^2 z = 0, Dirichlet data; degenerate", make_dirichlet_eigen},
    {"integral-bc", "z' = 1 with z(0) + INT z' = 1; solution z = t", make_integral_bc},
    {"const", "parameter-independent control family", make_const},
    {"k0-eps", "z' + eps z = 1, z(0) = 0; first-order convergence", make_k0_eps},
    {"f-shift", "load shifted by eps; discrepancy exactly eps", make_f_shift},
    {"q-shift", "boundary value shifted by eps; discrepancy exactly eps", make_q_shift},
    {"osc-k", "oscillating coefficient; coefficient check fails, error stalls", make_osc_k},
    {"divdiff-mp", "difference-quotient condition; drift-weight check fails", make_divdiff_mp},
    {"mp-moving", "moving evaluation point z(eps) = 1; continuous", make_mp_moving},
    {"osc-density", "oscillating density; pointwise-converging, not in variation",
     make_osc_density},
    {"eigen-family", "limit problem degenerate; sweep stops at the limit", make_eigen_family},
};

} // namespace

const std::vector<CatalogEntry>& catalog_entries() {
    static const std::vector<CatalogEntry> entries = [] {
        std::vector<CatalogEntry> out;
        for (const auto& maker : kMakers) out.push_back({maker.name, maker.summary});
        return out;
    }();
    return entries;
}

std::vector<std::string> catalog_names() {
    std::vector<std::string> names;
    for (const auto& maker : kMakers) names.emplace_back(maker.name);
    return names;
}

ProblemFamily catalog_family(const std::string& name) {
    for (const auto& maker : kMakers)
        if (name == maker.name) {
            ProblemFamily fam = maker.make();
            fam.validate();
            return fam;
        }
    throw ConfigError("unknown catalog family '" + name + "'");
}

} // namespace parambvp
