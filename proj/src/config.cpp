#include "parambvp/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace parambvp {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

ParamExpr entry_expr(const json& j, const std::string& where) {
    try {
        if (j.is_number()) return ParamExpr::constant(j.get<double>());
        if (j.is_string()) return {expr::parse(j.get<std::string>()), nullptr};
        if (j.is_object()) {
            if (!j.contains("eps")) fail(where + ": a dual expression needs an \"eps\" branch");
            expr::ExprPtr general = expr::parse(j.at("eps").get<std::string>());
            expr::ExprPtr zero =
                j.contains("zero") ? expr::parse(j.at("zero").get<std::string>()) : nullptr;
            return {std::move(general), std::move(zero)};
        }
    } catch (const ParseError& e) {
        fail(where + ": " + e.what());
    }
    fail(where + ": expected a number, an expression string, or {\"eps\", \"zero\"}");
}

void require_t_free(const ParamExpr& e, const std::string& where) {
    if (e.uses(expr::Var::T)) fail(where + " must not depend on t");
}

std::vector<ParamExpr> matrix_entries(const json& j, int rows, int cols,
                                      const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows)
        fail(where + ": expected " + std::to_string(rows) + " rows");
    std::vector<ParamExpr> out;
    out.reserve(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r) {
        const json& row = j[r];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            fail(where + ", row " + std::to_string(r + 1) + ": expected " + std::to_string(cols) +
                 " entries");
        for (int c = 0; c < cols; ++c) out.push_back(entry_expr(row[c], where));
    }
    return out;
}

std::vector<ParamExpr> vector_entries(const json& j, int dim, const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        fail(where + ": expected " + std::to_string(dim) + " entries");
    std::vector<ParamExpr> out;
    out.reserve(dim);
    for (int i = 0; i < dim; ++i) out.push_back(entry_expr(j[i], where));
    return out;
}

CMatrix eval_matrix(const std::vector<ParamExpr>& entries, int rows, int cols, double eps) {
    CMatrix M(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) M(r, c) = entries[r * cols + c].eval(0.0, eps);
    return M;
}

struct MultipointTermSpec {
    int group = 1;
    ParamExpr point;
    std::vector<std::vector<ParamExpr>> alpha; // per l, rm×m row-major
};

struct JumpSpec {
    ParamExpr point;
    std::vector<ParamExpr> weight;
};

struct DensitySpec {
    SmoothMatrixFn phi;
    ParamExpr upper;
    bool truncated = false;
};

std::function<BoundaryOperator(double)> multipoint_builder(
    Interval domain, int r, int n, int m, std::vector<MultipointTermSpec> specs) {
    const int rm = r * m;
    const int top = n + r;
    return [=](double e) -> BoundaryOperator {
        MultipointBoundaryOperator B{domain, n, r, m, {}};
        if (e > 0.0) {
            for (const auto& spec : specs) {
                MultipointBoundaryOperator::Term term;
                term.group = spec.group;
                term.point = spec.point.eval(0.0, e);
                for (int l = 0; l <= top; ++l)
                    term.alpha.push_back(eval_matrix(spec.alpha[l], rm, m, e));
                B.terms.push_back(std::move(term));
            }
            return B;
        }
        // Limit operator: stray (group 0) terms must vanish, groups merge to a
        // single term whose point every member agrees on.
        std::map<int, MultipointBoundaryOperator::Term> merged;
        for (const auto& spec : specs) {
            std::vector<CMatrix> alpha;
            for (int l = 0; l <= top; ++l) alpha.push_back(eval_matrix(spec.alpha[l], rm, m, 0.0));
            if (spec.group == 0) {
                for (const auto& a : alpha)
                    if (entry_sum_norm(a) > 1e-12)
                        fail("boundary: stray (group 0) coefficients must vanish at eps = 0; "
                             "declare their limit branch as 0");
                continue;
            }
            const double point = spec.point.eval(0.0, 0.0);
            auto [it, fresh] = merged.try_emplace(spec.group);
            if (fresh) {
                it->second.group = spec.group;
                it->second.point = point;
                it->second.alpha = std::move(alpha);
            } else {
                if (std::abs(it->second.point - point) > 1e-12)
                    fail("boundary: group " + std::to_string(spec.group) +
                         " terms disagree on their limit point");
                for (int l = 0; l <= top; ++l) it->second.alpha[l] += alpha[l];
            }
        }
        if (merged.empty()) fail("boundary: the limit operator has no terms");
        for (auto& [group, term] : merged) B.terms.push_back(std::move(term));
        return B;
    };
}

std::function<BoundaryOperator(double)> canonical_builder(Interval domain, int r, int n, int m,
                                                          std::vector<std::vector<ParamExpr>> beta,
                                                          std::vector<JumpSpec> jumps,
                                                          std::vector<DensitySpec> densities,
                                                          ParamExpr feature_scale,
                                                          bool has_feature_scale) {
    const int rm = r * m;
    return [=](double e) -> BoundaryOperator {
        GenericBoundaryOperator B{n, r, m, {}, MatrixMeasure(domain, rm, m)};
        for (const auto& block : beta) B.beta.push_back(eval_matrix(block, rm, m, e));
        for (const auto& jump : jumps)
            B.measure.add_jump(jump.point.eval(0.0, e), eval_matrix(jump.weight, rm, m, e));
        for (const auto& density : densities) {
            if (density.truncated)
                B.measure.add_density(density.phi.at_eps(e), density.upper.eval(0.0, e));
            else
                B.measure.add_density(density.phi.at_eps(e));
        }
        if (has_feature_scale) {
            const double scale = feature_scale.eval(0.0, e);
            B.measure.set_feature_scale(
                std::min(domain.b - domain.a, std::max(scale, 1e-12)));
        }
        return B;
    };
}

RunConfig build(const json& j) {
    RunConfig cfg;
    ProblemFamily& fam = cfg.family;
    fam.name = j.value("name", std::string("config"));
    fam.summary = j.value("summary", std::string());

    if (!j.contains("interval") || !j.at("interval").is_array() || j.at("interval").size() != 2)
        fail("interval: expected [a, b]");
    const double a = j.at("interval")[0].get<double>();
    const double b = j.at("interval")[1].get<double>();
    if (!(a < b)) fail("interval: needs a < b");
    fam.domain = Interval{a, b};

    const json& orders = j.contains("orders") ? j.at("orders") : json::object();
    fam.r = orders.value("r", 1);
    fam.n = orders.value("n", 0);
    fam.m = orders.value("m", 1);
    if (fam.r < 1 || fam.m < 1 || fam.n < 0) fail("orders: need r >= 1, m >= 1, n >= 0");
    const int rm = fam.r * fam.m;
    const int top = fam.n + fam.r;

    if (!j.contains("coefficients")) fail("missing coefficients block");
    const json& co = j.at("coefficients");
    if (!co.contains("K") || !co.at("K").is_array() ||
        static_cast<int>(co.at("K").size()) != fam.r)
        fail("coefficients.K: expected " + std::to_string(fam.r) + " matrix blocks");
    std::vector<SmoothMatrixFn> K;
    for (int jj = 0; jj < fam.r; ++jj)
        K.push_back(SmoothMatrixFn::from_exprs(
            fam.domain, fam.m, fam.m,
            matrix_entries(co.at("K")[jj], fam.m, fam.m,
                           "coefficients.K[" + std::to_string(jj) + "]"),
            fam.n));
    if (!co.contains("f")) fail("coefficients.f: missing");
    const SmoothVectorFn f = SmoothVectorFn::from_exprs(
        fam.domain, vector_entries(co.at("f"), fam.m, "coefficients.f"), fam.n);
    if (!co.contains("q")) fail("coefficients.q: missing");
    const std::vector<ParamExpr> q_entries = vector_entries(co.at("q"), rm, "coefficients.q");
    for (const auto& entry : q_entries) require_t_free(entry, "coefficients.q");

    {
        const Interval domain = fam.domain;
        const int r = fam.r, n = fam.n, m = fam.m;
        fam.system = [domain, r, n, m, K, f](double e) {
            return HigherOrderSystem{domain, r, n, m, K, f}.at_eps(e);
        };
        fam.rhs = [q_entries, rm](double e) {
            CVector q(rm);
            for (int i = 0; i < rm; ++i) q[i] = q_entries[i].eval(0.0, e);
            return q;
        };
    }

    if (!j.contains("boundary") || !j.at("boundary").is_object())
        fail("missing boundary block");
    const json& bd = j.at("boundary");
    const std::string kind = bd.value("kind", std::string());
    if (kind == "multipoint") {
        if (!bd.contains("terms") || !bd.at("terms").is_array() || bd.at("terms").empty())
            fail("boundary.terms: expected a nonempty array");
        std::vector<MultipointTermSpec> specs;
        int index = 0;
        for (const json& tj : bd.at("terms")) {
            const std::string where = "boundary.terms[" + std::to_string(index++) + "]";
            MultipointTermSpec spec;
            spec.group = tj.value("group", 1);
            if (spec.group < 0) fail(where + ".group: must be >= 0");
            if (!tj.contains("point")) fail(where + ".point: missing");
            spec.point = entry_expr(tj.at("point"), where + ".point");
            require_t_free(spec.point, where + ".point");
            if (!tj.contains("alpha") || !tj.at("alpha").is_array() ||
                static_cast<int>(tj.at("alpha").size()) != top + 1)
                fail(where + ".alpha: expected " + std::to_string(top + 1) +
                     " matrices (derivative orders 0.." + std::to_string(top) + ")");
            for (int l = 0; l <= top; ++l) {
                auto entries = matrix_entries(tj.at("alpha")[l], rm, fam.m,
                                              where + ".alpha[" + std::to_string(l) + "]");
                for (const auto& entry : entries)
                    require_t_free(entry, where + ".alpha[" + std::to_string(l) + "]");
                spec.alpha.push_back(std::move(entries));
            }
            specs.push_back(std::move(spec));
        }
        fam.boundary = multipoint_builder(fam.domain, fam.r, fam.n, fam.m, std::move(specs));
    } else if (kind == "canonical") {
        if (!bd.contains("beta") || !bd.at("beta").is_array() ||
            static_cast<int>(bd.at("beta").size()) != top)
            fail("boundary.beta: expected " + std::to_string(top) + " matrices");
        std::vector<std::vector<ParamExpr>> beta;
        for (int k = 0; k < top; ++k) {
            auto entries = matrix_entries(bd.at("beta")[k], rm, fam.m,
                                          "boundary.beta[" + std::to_string(k) + "]");
            for (const auto& entry : entries)
                require_t_free(entry, "boundary.beta[" + std::to_string(k) + "]");
            beta.push_back(std::move(entries));
        }
        std::vector<JumpSpec> jumps;
        if (bd.contains("jumps")) {
            int index = 0;
            for (const json& jj : bd.at("jumps")) {
                const std::string where = "boundary.jumps[" + std::to_string(index++) + "]";
                JumpSpec spec;
                if (!jj.contains("point")) fail(where + ".point: missing");
                spec.point = entry_expr(jj.at("point"), where + ".point");
                require_t_free(spec.point, where + ".point");
                if (!jj.contains("weight")) fail(where + ".weight: missing");
                spec.weight = matrix_entries(jj.at("weight"), rm, fam.m, where + ".weight");
                for (const auto& entry : spec.weight) require_t_free(entry, where + ".weight");
                jumps.push_back(std::move(spec));
            }
        }
        std::vector<DensitySpec> densities;
        if (bd.contains("densities")) {
            int index = 0;
            for (const json& dj : bd.at("densities")) {
                const std::string where = "boundary.densities[" + std::to_string(index++) + "]";
                if (!dj.contains("phi")) fail(where + ".phi: missing");
                DensitySpec spec{
                    SmoothMatrixFn::from_exprs(fam.domain, rm, fam.m,
                                               matrix_entries(dj.at("phi"), rm, fam.m,
                                                              where + ".phi"),
                                               fam.n),
                    ParamExpr::constant(fam.domain.b), false};
                if (dj.contains("upper")) {
                    spec.upper = entry_expr(dj.at("upper"), where + ".upper");
                    require_t_free(spec.upper, where + ".upper");
                    spec.truncated = true;
                }
                densities.push_back(std::move(spec));
            }
        }
        ParamExpr feature_scale = ParamExpr::constant(fam.domain.b - fam.domain.a);
        bool has_feature_scale = false;
        if (bd.contains("feature_scale")) {
            feature_scale = entry_expr(bd.at("feature_scale"), "boundary.feature_scale");
            require_t_free(feature_scale, "boundary.feature_scale");
            has_feature_scale = true;
        }
        fam.boundary = canonical_builder(fam.domain, fam.r, fam.n, fam.m, std::move(beta),
                                         std::move(jumps), std::move(densities),
                                         std::move(feature_scale), has_feature_scale);
    } else {
        fail("boundary.kind: expected \"multipoint\" or \"canonical\"");
    }

    if (j.contains("schedule")) {
        const json& sc = j.at("schedule");
        if (sc.is_object() && sc.contains("values")) {
            fam.schedule = sc.at("values").get<std::vector<double>>();
        } else if (sc.is_array()) {
            fam.schedule = sc.get<std::vector<double>>();
        } else {
            fam.schedule = default_schedule(sc.value("k_min", 3), sc.value("k_max", 12));
        }
    }

    if (j.contains("tolerances")) {
        const json& tol = j.at("tolerances");
        cfg.solver.tol = tol.value("solver", cfg.solver.tol);
        cfg.solver.quad_tol = tol.value("quadrature", cfg.solver.quad_tol);
        cfg.solver.degeneracy_ratio = tol.value("degeneracy", cfg.solver.degeneracy_ratio);
        cfg.decision_tolerance = tol.value("decision", cfg.decision_tolerance);
    }
    if (j.contains("grid")) {
        cfg.solver.grid_panels = j.at("grid").get<int>();
        if (cfg.solver.grid_panels < 2 || cfg.solver.grid_panels % 2 != 0)
            fail("grid: expected an even panel count >= 2");
    }
    cfg.output_dir = j.value("output", std::string());

    fam.validate();
    // Surface shape mistakes now rather than mid-run: build both endpoints.
    fam.system(0.0).validate();
    fam.system(fam.schedule.front()).validate();
    std::visit([](const auto& op) { op.validate(); }, fam.boundary(0.0));
    std::visit([](const auto& op) { op.validate(); }, fam.boundary(fam.schedule.front()));
    return cfg;
}

} // namespace

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        return build(j);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

} // namespace parambvp
