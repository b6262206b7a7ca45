#include "parambvp/limits.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <thread>

namespace parambvp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

GenericBoundaryOperator canonical_of(const BoundaryOperator& B) {
    return std::visit(
        [](const auto& op) -> GenericBoundaryOperator {
            if constexpr (std::is_same_v<std::decay_t<decltype(op)>, GenericBoundaryOperator>)
                return op;
            else
                return canonicalize_multipoint(op);
        },
        B);
}

CVector apply_boundary(const BoundaryOperator& B, const SmoothVectorFn& z, double quad_tol) {
    return std::visit(
        [&](const auto& op) -> CVector {
            if constexpr (std::is_same_v<std::decay_t<decltype(op)>, GenericBoundaryOperator>)
                return apply_generic(op, z, quad_tol);
            else
                return apply_multipoint(op, z);
        },
        B);
}

} // namespace

std::vector<double> default_schedule(int k_min, int k_max) {
    if (k_min > k_max) throw ConfigError("schedule exponents out of order");
    std::vector<double> s;
    for (int k = k_min; k <= k_max; ++k) s.push_back(std::ldexp(1.0, -k));
    return s;
}

void ProblemFamily::validate() const {
    if (!system || !boundary || !rhs)
        throw ConfigError("family '" + name + "' is missing a builder");
    if (r < 1 || m < 1 || n < 0)
        throw ShapeError("family '" + name + "' has invalid orders");
    if (schedule.empty())
        throw ConfigError("family '" + name + "' has an empty schedule");
    double prev = std::numeric_limits<double>::infinity();
    for (double e : schedule) {
        if (!(e > 0.0))
            throw ConfigError("family '" + name +
                              "': schedule values must be positive (0 is implicit)");
        if (!(e < prev))
            throw ConfigError("family '" + name + "': schedule must be strictly decreasing");
        prev = e;
    }
}

SequenceVerdict judge_vanishing(std::vector<double> eps, std::vector<double> values,
                                double tolerance) {
    if (eps.size() != values.size()) throw ShapeError("witness sequence length mismatch");
    SequenceVerdict v{std::move(eps), std::move(values), tolerance, false};
    if (v.values.empty()) return v;
    bool ok = std::isfinite(v.values.back()) && v.values.back() <= tolerance;
    const std::size_t window = std::min<std::size_t>(4, v.values.size());
    for (std::size_t i = v.values.size() - window; ok && i + 1 < v.values.size(); ++i) {
        const double prev = std::max(v.values[i], tolerance);
        const double next = std::max(v.values[i + 1], tolerance);
        ok = next <= prev + 1e-12;
    }
    v.pass = ok;
    return v;
}

SequenceVerdict judge_bounded(std::vector<double> eps, std::vector<double> values,
                              double ratio_cap) {
    if (eps.size() != values.size()) throw ShapeError("witness sequence length mismatch");
    SequenceVerdict v{std::move(eps), std::move(values), ratio_cap, false};
    if (v.values.empty()) {
        v.pass = true;
        return v;
    }
    std::vector<double> sorted = v.values;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t nvals = sorted.size();
    const double median = (sorted[(nvals - 1) / 2] + sorted[nvals / 2]) / 2.0;
    v.pass = std::isfinite(sorted.back()) && sorted.back() <= ratio_cap * std::max(median, 1e-12);
    return v;
}

CoefficientCheck check_coefficients_converge(const ProblemFamily& fam, double tolerance,
                                             int grid_panels) {
    fam.validate();
    const GridSpec grid(fam.domain, grid_panels);
    const HigherOrderSystem limit = fam.system(0.0);
    limit.validate();
    std::vector<std::vector<double>> values(limit.K.size());
    for (double e : fam.schedule) {
        const HigherOrderSystem se = fam.system(e);
        se.validate();
        if (se.K.size() != limit.K.size())
            throw ShapeError("family '" + fam.name + "' changes order across the schedule");
        for (std::size_t j = 0; j < limit.K.size(); ++j)
            values[j].push_back(ck_distance(se.K[j], limit.K[j], fam.n, grid));
    }
    CoefficientCheck out;
    out.pass = true;
    for (auto& vals : values) {
        out.per_coefficient.push_back(judge_vanishing(fam.schedule, std::move(vals), tolerance));
        out.pass = out.pass && out.per_coefficient.back().pass;
    }
    return out;
}

RhsCheck check_rhs_converge(const ProblemFamily& fam, double tolerance, int grid_panels) {
    fam.validate();
    const GridSpec grid(fam.domain, grid_panels);
    const HigherOrderSystem limit = fam.system(0.0);
    const CVector q0 = fam.rhs(0.0);
    std::vector<double> fv, qv;
    for (double e : fam.schedule) {
        fv.push_back(ck_distance(fam.system(e).f, limit.f, fam.n, grid));
        qv.push_back(entry_sum_norm(CVector(fam.rhs(e) - q0)));
    }
    RhsCheck out;
    out.f_distance = judge_vanishing(fam.schedule, std::move(fv), tolerance);
    out.q_distance = judge_vanishing(fam.schedule, std::move(qv), tolerance);
    out.pass = out.f_distance.pass && out.q_distance.pass;
    return out;
}

ProbeCheck check_boundary_probes_converge(const ProblemFamily& fam, double tolerance,
                                          double quad_tol) {
    fam.validate();
    const int top = fam.n + fam.r;
    const auto probes = probe_functions(fam.domain, fam.m, top, top + 2);
    const BoundaryOperator limit = fam.boundary(0.0);
    std::vector<CVector> limit_values;
    limit_values.reserve(probes.size());
    for (const auto& z : probes) limit_values.push_back(apply_boundary(limit, z, quad_tol));

    ProbeCheck out;
    out.probe_names = probe_names(fam.m, top + 2);
    out.per_probe.assign(probes.size(), {});
    std::vector<double> worst(fam.schedule.size(), 0.0);
    for (std::size_t k = 0; k < fam.schedule.size(); ++k) {
        const BoundaryOperator be = fam.boundary(fam.schedule[k]);
        for (std::size_t p = 0; p < probes.size(); ++p) {
            const double dist = entry_sum_norm(
                CVector(apply_boundary(be, probes[p], quad_tol) - limit_values[p]));
            out.per_probe[p].push_back(dist);
            worst[k] = std::max(worst[k], dist);
        }
    }
    out.worst = judge_vanishing(fam.schedule, std::move(worst), tolerance);
    out.pass = out.worst.pass;
    return out;
}

CanonicalCheck check_canonical_convergence(const ProblemFamily& fam, double tolerance,
                                           double quad_tol) {
    fam.validate();
    const GenericBoundaryOperator limit = canonical_of(fam.boundary(0.0));
    limit.validate();
    const Interval dom = fam.domain;
    const int nb = static_cast<int>(limit.beta.size());

    std::vector<double> mesh;
    for (int i = 1; i <= 17; ++i) mesh.push_back(dom.a + i * (dom.b - dom.a) / 17.0);
    const CMatrix phi_end0 = limit.measure.distribution_at(dom.b, quad_tol);
    std::vector<CMatrix> mean0;
    for (double t : mesh) mean0.push_back(limit.measure.integral_of_distribution(t, quad_tol));

    std::vector<std::vector<double>> beta_vals(nb);
    std::vector<double> tv_vals, end_vals, mean_vals, vd_vals;
    for (double e : fam.schedule) {
        const GenericBoundaryOperator be = canonical_of(fam.boundary(e));
        be.validate();
        if (static_cast<int>(be.beta.size()) != nb)
            throw ShapeError("family '" + fam.name +
                             "' changes its boundary block count across the schedule");
        for (int k = 0; k < nb; ++k)
            beta_vals[k].push_back(entry_sum_norm(CMatrix(be.beta[k] - limit.beta[k])));
        tv_vals.push_back(be.measure.total_variation(quad_tol));
        end_vals.push_back(
            entry_sum_norm(CMatrix(be.measure.distribution_at(dom.b, quad_tol) - phi_end0)));
        double worst = 0.0;
        for (std::size_t i = 0; i < mesh.size(); ++i)
            worst = std::max(worst,
                             entry_sum_norm(CMatrix(
                                 be.measure.integral_of_distribution(mesh[i], quad_tol) -
                                 mean0[i])));
        mean_vals.push_back(worst);
        vd_vals.push_back(variation_distance(be.measure, limit.measure, quad_tol));
    }

    CanonicalCheck out;
    out.betas_pass = true;
    for (auto& vals : beta_vals) {
        out.beta_distance.push_back(judge_vanishing(fam.schedule, std::move(vals), tolerance));
        out.betas_pass = out.betas_pass && out.beta_distance.back().pass;
    }
    out.variation = judge_bounded(fam.schedule, std::move(tv_vals));
    out.variation_bounded = out.variation.pass;
    out.endpoint = judge_vanishing(fam.schedule, std::move(end_vals), tolerance);
    out.endpoint_pass = out.endpoint.pass;
    out.mean_distribution = judge_vanishing(fam.schedule, std::move(mean_vals), tolerance);
    out.mean_pass = out.mean_distribution.pass;
    out.variation_distance = judge_vanishing(fam.schedule, std::move(vd_vals), tolerance);
    out.pass = out.betas_pass && out.variation_bounded && out.endpoint_pass && out.mean_pass;
    return out;
}

MultipointCheck check_multipoint_convergence(const ProblemFamily& fam, double tolerance) {
    fam.validate();
    const BoundaryOperator limit_any = fam.boundary(0.0);
    const auto* limit = std::get_if<MultipointBoundaryOperator>(&limit_any);
    if (!limit)
        throw ConfigError("family '" + fam.name +
                          "': the multipoint battery needs a multipoint boundary operator");
    limit->validate();

    std::map<int, const MultipointBoundaryOperator::Term*> limit_terms;
    for (const auto& term : limit->terms) {
        if (term.group == 0)
            throw ConfigError("family '" + fam.name +
                              "': the limit operator must not keep stray (group 0) terms");
        if (!limit_terms.emplace(term.group, &term).second)
            throw ConfigError("family '" + fam.name +
                              "': the limit operator needs exactly one term per group");
    }

    const int top = fam.n + fam.r;
    std::vector<double> pt_vals, sum_vals, top_vals, drift_vals, stray_vals;
    for (double e : fam.schedule) {
        const BoundaryOperator be_any = fam.boundary(e);
        const auto* be = std::get_if<MultipointBoundaryOperator>(&be_any);
        if (!be)
            throw ConfigError("family '" + fam.name +
                              "' switches boundary operator kind across the schedule");
        be->validate();

        double pt = 0.0, tp = 0.0, dr = 0.0, st = 0.0;
        std::map<int, std::vector<CMatrix>> sums;
        for (const auto& term : be->terms) {
            if (term.group == 0) {
                for (const auto& alpha : term.alpha) st = std::max(st, entry_sum_norm(alpha));
                continue;
            }
            const auto it = limit_terms.find(term.group);
            if (it == limit_terms.end())
                throw ConfigError("family '" + fam.name + "': group " +
                                  std::to_string(term.group) + " has no declared limit");
            const double drift = std::abs(term.point - it->second->point);
            pt = std::max(pt, drift);
            tp = std::max(tp, entry_sum_norm(term.alpha[top]));
            for (int l = 0; l < top; ++l)
                dr = std::max(dr, entry_sum_norm(term.alpha[l]) * drift);
            auto& acc = sums[term.group];
            if (acc.empty())
                acc = term.alpha;
            else
                for (int l = 0; l <= top; ++l) acc[l] += term.alpha[l];
        }
        double sm = 0.0;
        for (const auto& [group, acc] : sums) {
            const auto& decl = *limit_terms.at(group);
            for (int l = 0; l <= top; ++l)
                sm = std::max(sm, entry_sum_norm(CMatrix(acc[l] - decl.alpha[l])));
        }
        for (const auto& [group, decl] : limit_terms)
            if (!sums.count(group))
                for (int l = 0; l <= top; ++l)
                    sm = std::max(sm, entry_sum_norm(decl->alpha[l]));

        pt_vals.push_back(pt);
        sum_vals.push_back(sm);
        top_vals.push_back(tp);
        drift_vals.push_back(dr);
        stray_vals.push_back(st);
    }

    MultipointCheck out;
    out.points_converge = judge_vanishing(fam.schedule, std::move(pt_vals), tolerance);
    out.group_sums_converge = judge_vanishing(fam.schedule, std::move(sum_vals), tolerance);
    out.top_coefficients_bounded = judge_bounded(fam.schedule, std::move(top_vals));
    out.drift_weight_vanishes = judge_vanishing(fam.schedule, std::move(drift_vals), tolerance);
    out.stray_group_vanishes = judge_vanishing(fam.schedule, std::move(stray_vals), tolerance);
    out.pass = out.points_converge.pass && out.group_sums_converge.pass &&
               out.top_coefficients_bounded.pass && out.drift_weight_vanishes.pass &&
               out.stray_group_vanishes.pass;
    return out;
}

ConditionVerdicts check_all_conditions(const ProblemFamily& fam, double tolerance,
                                       const SolverOptions& opts) {
    fam.validate();
    ConditionVerdicts out;
    const Condition0Report rep = check_condition0(fam.system(0.0), fam.boundary(0.0), 0.0, opts);
    out.nondegenerate = !rep.degenerate;
    out.sigma_min = rep.sigma_min;
    out.sigma_max = rep.sigma_max;
    out.coefficients = check_coefficients_converge(fam, tolerance, opts.grid_panels);
    out.rhs = check_rhs_converge(fam, tolerance, opts.grid_panels);
    out.probes = check_boundary_probes_converge(fam, tolerance);
    out.canonical = check_canonical_convergence(fam, tolerance);
    if (std::holds_alternative<MultipointBoundaryOperator>(fam.boundary(0.0)))
        out.multipoint = check_multipoint_convergence(fam, tolerance);
    return out;
}

Discrepancy discrepancy(const ProblemFamily& fam, double eps, const SolveOutcome& limit,
                        const SolverOptions& opts) {
    fam.validate();
    if (!limit.first_order)
        throw ShapeError("limit solution lacks its re-integration closure");
    const HigherOrderSystem sys = fam.system(eps);
    sys.validate();
    const SampledFn& z = limit.z;
    if (z.dim != sys.m) throw ShapeError("limit solution has the wrong dimension");
    if (z.order() < sys.n + sys.r)
        throw SmoothnessError("limit solution lacks the derivative tracks the residual needs");

    const GridSpec& grid = z.grid;
    Discrepancy out;
    for (int l = 0; l <= sys.n; ++l) {
        RVector sup = RVector::Zero(sys.m);
        for (int i = 0; i < grid.points(); ++i) {
            const double t = grid.point(i);
            CVector res = z.tracks[sys.r + l].col(i);
            for (int j = 0; j < sys.r; ++j)
                for (int s = 0; s <= l; ++s)
                    res += binomial(l, s) *
                           (sys.K[j].eval(t, s) * CVector(z.tracks[j + l - s].col(i)));
            res -= sys.f.eval(t, l);
            for (int c = 0; c < sys.m; ++c) sup[c] = std::max(sup[c], std::abs(res[c]));
        }
        out.ode += sup.sum();
    }

    const ReducedBoundaryOp N = reduce_boundary(fam.boundary(eps), fam.domain);
    const CVector bz = apply_reduced_exact(N, *limit.first_order, limit.initial, grid, opts.tol);
    out.boundary = entry_sum_norm(CVector(bz - fam.rhs(eps)));
    return out;
}

KappaEstimate estimate_kappa(const ProblemFamily& fam, const SolverOptions& opts) {
    fam.validate();
    const GridSpec grid(fam.domain, opts.grid_panels);
    const int rm = fam.r * fam.m;

    std::vector<SmoothVectorFn> f_probes;
    {
        const std::vector<expr::ExprPtr> shapes = {
            expr::literal(1.0), expr::var_t(), expr::pow(expr::var_t(), 2),
            expr::sin(expr::var_t()), expr::cos(expr::var_t())};
        for (int c = 0; c < fam.m; ++c)
            for (const auto& shape : shapes) {
                std::vector<ParamExpr> comps(fam.m, ParamExpr::constant(0.0));
                comps[c] = ParamExpr{shape, nullptr};
                f_probes.push_back(SmoothVectorFn::from_exprs(fam.domain, std::move(comps), fam.n));
            }
    }
    const SmoothVectorFn f_zero = SmoothVectorFn::from_exprs(
        fam.domain, std::vector<ParamExpr>(fam.m, ParamExpr::constant(0.0)), fam.n);

    std::vector<double> all_eps = fam.schedule;
    all_eps.insert(all_eps.begin(), 0.0);

    KappaEstimate out;
    for (double e : all_eps) {
        const HigherOrderSystem sys = fam.system(e);
        const BoundaryOperator B = fam.boundary(e);

        double bound = 1.0;
        const double binfac = binomial(sys.n, sys.n / 2);
        for (const auto& K : sys.K) bound += binfac * ck_norm(K, sys.n, grid);
        bound += std::visit([&](const auto& op) { return operator_norm_bound(op, grid).upper; }, B);
        out.forward_bound = std::max(out.forward_bound, bound);

        const PreparedProblem prepared(sys, B, e, opts);
        if (prepared.degenerate())
            throw DegenerateProblem("problem is degenerate at eps = " + std::to_string(e),
                                    prepared.sigma_min(), prepared.sigma_max());
        const CVector q_zero = CVector::Zero(rm);
        for (const auto& f : f_probes) {
            const double fn = ck_norm(f, sys.n, grid);
            const SolveOutcome sol = prepared.solve_with(f, q_zero);
            out.probe_max = std::max(out.probe_max, ck_norm(sol.z, sys.n + sys.r) / fn);
        }
        for (int i = 0; i < rm; ++i) {
            CVector q = CVector::Zero(rm);
            q[i] = 1.0;
            const SolveOutcome sol = prepared.solve_with(f_zero, q);
            out.probe_max = std::max(out.probe_max, ck_norm(sol.z, sys.n + sys.r));
        }
    }
    out.kappa1 = 1.0 / out.forward_bound;
    out.kappa2 = 2.0 * out.probe_max;
    return out;
}

ConvergenceReport convergence_study(const ProblemFamily& fam, const StudyOptions& opts) {
    fam.validate();
    ConvergenceReport rep;
    rep.family = fam.name;
    rep.grid_panels = opts.solver.grid_panels;
    rep.solver_tol = opts.solver.tol;
    rep.tolerance = opts.tolerance;
    rep.first_solvable_eps = rep.err_slope = rep.certified_eps = kNaN;

    const PreparedProblem limit_problem(fam.system(0.0), fam.boundary(0.0), 0.0, opts.solver);
    rep.sigma_min0 = limit_problem.sigma_min();
    rep.sigma_max0 = limit_problem.sigma_max();
    if (limit_problem.degenerate()) {
        rep.limit_degenerate = true;
        return rep;
    }
    const SolveOutcome limit = limit_problem.solve(fam.rhs(0.0));

    const std::size_t count = fam.schedule.size();
    rep.rows.assign(count, SweepRow{});
    std::vector<std::exception_ptr> failures(count);
    const auto work = [&](std::size_t i) {
        try {
            const double e = fam.schedule[i];
            SweepRow row;
            row.eps = e;
            row.err = row.d = row.ratio = kNaN;
            const PreparedProblem prepared(fam.system(e), fam.boundary(e), e, opts.solver);
            row.sigma_min = prepared.sigma_min();
            row.sigma_max = prepared.sigma_max();
            if (!prepared.degenerate()) {
                const SolveOutcome sol = prepared.solve(fam.rhs(e));
                row.err = ck_distance(sol.z, limit.z, fam.n + fam.r);
                const Discrepancy disc = discrepancy(fam, e, limit, opts.solver);
                row.d = disc.total();
                row.ratio = row.d > 1e-300 ? row.err / row.d : kNaN;
                row.solved = true;
            }
            rep.rows[i] = row;
        } catch (...) {
            failures[i] = std::current_exception();
        }
    };
    const int jobs = std::max(1, opts.jobs);
    if (jobs == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) work(i);
    } else {
        std::vector<std::thread> pool;
        const int width = std::min<int>(jobs, static_cast<int>(count));
        pool.reserve(width);
        for (int k = 0; k < width; ++k)
            pool.emplace_back([&, k] {
                for (std::size_t i = static_cast<std::size_t>(k); i < count;
                     i += static_cast<std::size_t>(width))
                    work(i);
            });
        for (auto& th : pool) th.join();
    }
    for (auto& failure : failures)
        if (failure) std::rethrow_exception(failure);

    // Maximal all-solved suffix: the empirical solvability threshold.
    std::size_t suffix = count;
    for (std::size_t i = count; i-- > 0;) {
        if (!rep.rows[i].solved) break;
        suffix = i;
    }
    if (suffix < count) {
        rep.first_solvable_eps = rep.rows[suffix].eps;
        std::vector<double> es, errs;
        for (std::size_t i = suffix; i < count; ++i) {
            es.push_back(rep.rows[i].eps);
            errs.push_back(rep.rows[i].err);
        }
        rep.continuous = judge_vanishing(std::move(es), std::move(errs), opts.tolerance).pass;

        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int pts = 0;
        for (std::size_t i = suffix; i < count; ++i) {
            const auto& row = rep.rows[i];
            if (!(row.err > 100.0 * opts.solver.tol)) continue;
            const double x = std::log(row.eps), y = std::log(row.err);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++pts;
        }
        if (pts >= 2) {
            const double den = pts * sxx - sx * sx;
            if (std::abs(den) > 0) rep.err_slope = (pts * sxy - sx * sy) / den;
        }
    }

    if (opts.run_checkers) {
        rep.conditions = check_all_conditions(fam, opts.tolerance, opts.solver);
        rep.matches_prediction = (rep.continuous == rep.conditions->predicts_continuous());
    }

    if (opts.estimate_bounds) {
        try {
            rep.kappa = estimate_kappa(fam, opts.solver);
            rep.kappa_available = true;
            const double floor = 100.0 * opts.solver.tol;
            bool all_ok = true;
            for (auto& row : rep.rows) {
                if (!row.solved || !(row.err > floor)) continue;
                row.bounds_checked = true;
                row.within_bounds = rep.kappa.kappa1 * row.d <= row.err * (1.0 + 1e-9) &&
                                    row.err <= rep.kappa.kappa2 * row.d * (1.0 + 1e-9);
                all_ok = all_ok && row.within_bounds;
            }
            rep.bounds_hold = all_ok;
            double certified = kNaN;
            for (std::size_t i = count; i-- > 0;) {
                const auto& row = rep.rows[i];
                if (!row.solved) break;
                if (row.bounds_checked && !row.within_bounds) break;
                certified = row.eps;
            }
            rep.certified_eps = certified;
        } catch (const DegenerateProblem&) {
            rep.kappa_available = false;
        }
    }
    return rep;
}

SolveOutcome solve_family(const ProblemFamily& fam, double eps, const SolverOptions& opts) {
    fam.validate();
    return solve_bvp(fam.system(eps), fam.boundary(eps), fam.rhs(eps), eps, opts);
}

} // namespace parambvp
