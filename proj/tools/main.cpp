#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "parambvp/catalog.hpp"
#include "parambvp/config.hpp"
#include "parambvp/truncation.hpp"

namespace {

using namespace parambvp;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct CommonOpts {
    std::string config;
    std::string preset;
    std::string out;
    double tol = 0.0;
    int grid = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config, "JSON problem description (see README for the schema)");
    cmd->add_option("--preset", o.preset, "built-in catalog family (see `catalog list`)");
    cmd->add_option("--out", o.out, "output directory for CSV reports (default: current)");
    cmd->add_option("--tol", o.tol, "solver stepping tolerance override");
    cmd->add_option("--grid", o.grid, "storage grid panel count override (even)");
}

RunConfig resolve(const CommonOpts& o) {
    if (o.config.empty() == o.preset.empty())
        throw ConfigError("give exactly one of --config PATH or --preset NAME");
    RunConfig cfg;
    if (!o.preset.empty())
        cfg.family = catalog_family(o.preset);
    else
        cfg = load_config(o.config);
    if (o.tol > 0.0) cfg.solver.tol = o.tol;
    if (o.grid > 0) {
        if (o.grid % 2 != 0) throw ConfigError("--grid must be an even panel count");
        cfg.solver.grid_panels = o.grid;
    }
    if (!o.out.empty()) cfg.output_dir = o.out;
    return cfg;
}

std::filesystem::path report_dir(const RunConfig& cfg) {
    std::filesystem::path dir = cfg.output_dir.empty() ? "." : cfg.output_dir;
    std::filesystem::create_directories(dir);
    return dir;
}

int cmd_solve(const CommonOpts& opts, double eps) {
    const RunConfig cfg = resolve(opts);
    const SolveOutcome sol = solve_family(cfg.family, eps, cfg.solver);

    const auto path = report_dir(cfg) / "solution.csv";
    std::ofstream out(path);
    out << "t";
    for (int c = 1; c <= sol.z.dim; ++c)
        for (int j = 0; j <= sol.z.order(); ++j)
            out << ",z" << c << "_d" << j << "_re,z" << c << "_d" << j << "_im";
    out << "\n";
    for (int i = 0; i < sol.z.grid.points(); ++i) {
        out << fmt(sol.z.grid.point(i));
        for (int c = 0; c < sol.z.dim; ++c)
            for (int j = 0; j <= sol.z.order(); ++j) {
                const Complex v = sol.z.tracks[j](c, i);
                out << "," << fmt(v.real()) << "," << fmt(v.imag());
            }
        out << "\n";
    }
    std::cerr << "sigma_min = " << fmt_short(sol.sigma_min)
              << ", sigma_max = " << fmt_short(sol.sigma_max) << "\n"
              << "ode residual = " << fmt_short(sol.ode_residual)
              << ", boundary residual = " << fmt_short(sol.boundary_residual) << "\n";
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

void print_condition(std::ostream& text, std::ofstream& csv, const std::string& name, bool pass,
                     double witness) {
    char line[128];
    std::snprintf(line, sizeof line, "%-34s %-5s witness %s", name.c_str(),
                  pass ? "pass" : "FAIL", fmt_short(witness).c_str());
    text << line << "\n";
    csv << name << "," << (pass ? 1 : 0) << "," << fmt(witness) << "\n";
}

int cmd_check(const CommonOpts& opts, double decision_tol) {
    RunConfig cfg = resolve(opts);
    if (decision_tol > 0.0) cfg.decision_tolerance = decision_tol;
    const ConditionVerdicts v =
        check_all_conditions(cfg.family, cfg.decision_tolerance, cfg.solver);

    const auto path = report_dir(cfg) / "conditions.csv";
    std::ofstream csv(path);
    csv << "condition,pass,witness\n";
    std::cout << "family: " << cfg.family.name << "\n";
    print_condition(std::cout, csv, "limit-problem-nondegenerate", v.nondegenerate, v.sigma_min);
    for (std::size_t j = 0; j < v.coefficients.per_coefficient.size(); ++j) {
        const auto& s = v.coefficients.per_coefficient[j];
        print_condition(std::cout, csv, "coefficient-" + std::to_string(j) + "-converges",
                        s.pass, s.values.back());
    }
    print_condition(std::cout, csv, "load-converges", v.rhs.f_distance.pass,
                    v.rhs.f_distance.values.back());
    print_condition(std::cout, csv, "boundary-values-converge", v.rhs.q_distance.pass,
                    v.rhs.q_distance.values.back());
    print_condition(std::cout, csv, "boundary-probes-converge", v.probes.pass,
                    v.probes.worst.values.back());
    if (v.canonical) {
        const auto& c = *v.canonical;
        for (std::size_t k = 0; k < c.beta_distance.size(); ++k)
            print_condition(std::cout, csv, "beta-" + std::to_string(k) + "-converges",
                            c.beta_distance[k].pass, c.beta_distance[k].values.back());
        print_condition(std::cout, csv, "variation-bounded", c.variation_bounded,
                        *std::max_element(c.variation.values.begin(), c.variation.values.end()));
        print_condition(std::cout, csv, "distribution-endpoint-converges", c.endpoint_pass,
                        c.endpoint.values.back());
        print_condition(std::cout, csv, "mean-distribution-converges", c.mean_pass,
                        c.mean_distribution.values.back());
        print_condition(std::cout, csv, "variation-distance-vanishes (info)",
                        c.variation_distance.pass, c.variation_distance.values.back());
    }
    if (v.multipoint) {
        const auto& mp = *v.multipoint;
        print_condition(std::cout, csv, "points-converge", mp.points_converge.pass,
                        mp.points_converge.values.back());
        print_condition(std::cout, csv, "group-sums-converge", mp.group_sums_converge.pass,
                        mp.group_sums_converge.values.back());
        print_condition(std::cout, csv, "top-coefficients-bounded",
                        mp.top_coefficients_bounded.pass,
                        *std::max_element(mp.top_coefficients_bounded.values.begin(),
                                          mp.top_coefficients_bounded.values.end()));
        print_condition(std::cout, csv, "drift-weight-vanishes", mp.drift_weight_vanishes.pass,
                        mp.drift_weight_vanishes.values.back());
        print_condition(std::cout, csv, "stray-group-vanishes", mp.stray_group_vanishes.pass,
                        mp.stray_group_vanishes.values.back());
    }
    std::cout << "criterion predicts: "
              << (v.predicts_continuous() ? "continuous" : "not continuous") << "\n";
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

int cmd_sweep(const CommonOpts& opts, double decision_tol, int jobs) {
    RunConfig cfg = resolve(opts);
    if (decision_tol > 0.0) cfg.decision_tolerance = decision_tol;
    StudyOptions study;
    study.solver = cfg.solver;
    study.tolerance = cfg.decision_tolerance;
    study.jobs = jobs;
    const ConvergenceReport rep = convergence_study(cfg.family, study);

    const auto path = report_dir(cfg) / "sweep.csv";
    std::ofstream csv(path);
    csv << "eps,err,d_n,ratio,within_bounds\n";
    for (const auto& row : rep.rows) {
        csv << fmt(row.eps) << ",";
        if (row.solved)
            csv << fmt(row.err) << "," << fmt(row.d) << "," << fmt(row.ratio) << ","
                << (row.bounds_checked ? (row.within_bounds ? "1" : "0") : "");
        else
            csv << "degenerate,,,";
        csv << "\n";
    }
    csv << "kappa1," << (rep.kappa_available ? fmt(rep.kappa.kappa1) : "") << ",,,\n";
    csv << "kappa2," << (rep.kappa_available ? fmt(rep.kappa.kappa2) : "") << ",,,\n";
    csv << "verdict,"
        << (rep.limit_degenerate ? "degenerate" : (rep.continuous ? "continuous" : "not-continuous"))
        << ",,,\n";

    std::cout << "family: " << rep.family << "\n";
    if (rep.limit_degenerate) {
        std::cout << "limit problem is degenerate (sigma_min = " << fmt_short(rep.sigma_min0)
                  << ", sigma_max = " << fmt_short(rep.sigma_max0) << ")\n";
        std::cout << "wrote " << path.string() << "\n";
        return 2;
    }
    std::printf("%-12s %-13s %-13s %-10s %s\n", "eps", "err", "d_n", "ratio", "bounds");
    for (const auto& row : rep.rows) {
        if (!row.solved) {
            std::printf("%-12s degenerate\n", fmt_short(row.eps).c_str());
            continue;
        }
        std::printf("%-12s %-13s %-13s %-10s %s\n", fmt_short(row.eps).c_str(),
                    fmt_short(row.err).c_str(), fmt_short(row.d).c_str(),
                    fmt_short(row.ratio).c_str(),
                    row.bounds_checked ? (row.within_bounds ? "ok" : "VIOLATED") : "-");
    }
    if (rep.kappa_available)
        std::cout << "kappa1 = " << fmt_short(rep.kappa.kappa1)
                  << " (forward bound " << fmt_short(rep.kappa.forward_bound) << "), kappa2 = "
                  << fmt_short(rep.kappa.kappa2) << " (probe max "
                  << fmt_short(rep.kappa.probe_max) << ")\n";
    std::cout << "verdict: " << (rep.continuous ? "continuous" : "not continuous");
    if (rep.conditions)
        std::cout << "; criterion predicts "
                  << (rep.conditions->predicts_continuous() ? "continuous" : "not continuous")
                  << " (" << (rep.matches_prediction ? "consistent" : "INCONSISTENT") << ")";
    std::cout << "\n";
    if (!rep.rows.empty() && std::isfinite(rep.err_slope))
        std::cout << "log-log error slope: " << fmt_short(rep.err_slope) << "\n";
    if (rep.kappa_available && std::isfinite(rep.certified_eps))
        std::cout << "two-sided bound certified for scheduled eps <= "
                  << fmt_short(rep.certified_eps) << "\n";
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

int cmd_demo(int dim, unsigned seed, const std::string& out) {
    const auto rows = truncation_demo(dim, seed);
    std::printf("%4s %14s %14s %14s %12s\n", "n", "|Sn x - x|", "|T Sn x - Tx|", "|In x - x|",
                "|inv In|");
    for (const auto& row : rows)
        std::printf("%4d %14.6e %14.6e %14.6e %12.1f\n", row.n, row.sn_error, row.tsn_error,
                    row.in_error, row.inverse_norm);
    std::cout << "partial sums converge on every fixed vector; the inverses' norms grow "
                 "linearly without bound.\n";
    if (!out.empty()) {
        std::filesystem::create_directories(out);
        const auto path = std::filesystem::path(out) / "truncation.csv";
        std::ofstream csv(path);
        csv << "n,sn_error,tsn_error,in_error,inverse_norm\n";
        for (const auto& row : rows)
            csv << row.n << "," << fmt(row.sn_error) << "," << fmt(row.tsn_error) << ","
                << fmt(row.in_error) << "," << fmt(row.inverse_norm) << "\n";
        std::cout << "wrote " << path.string() << "\n";
    }
    return 0;
}

int cmd_catalog_list() {
    for (const auto& entry : catalog_entries())
        std::printf("%-16s %s\n", entry.name.c_str(), entry.summary.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"linear boundary-value problems depending on a small parameter: "
                 "solve, check limit conditions, run convergence sweeps"};
    app.require_subcommand(1);

    CommonOpts solve_opts;
    double solve_eps = 0.0;
    CLI::App* solve = app.add_subcommand("solve", "solve one problem and write solution.csv");
    add_common(solve, solve_opts);
    solve->add_option("--eps", solve_eps, "parameter value (default 0 = limit problem)");

    CommonOpts check_opts;
    double check_tol = 0.0;
    CLI::App* check = app.add_subcommand("check", "evaluate the limit-condition checkers");
    add_common(check, check_opts);
    check->add_option("--decision-tol", check_tol, "verdict tolerance (default 1e-3)");

    CommonOpts sweep_opts;
    double sweep_tol = 0.0;
    int sweep_jobs = 1;
    CLI::App* sweep = app.add_subcommand("sweep", "solve along the schedule and write sweep.csv");
    add_common(sweep, sweep_opts);
    sweep->add_option("--decision-tol", sweep_tol, "verdict tolerance (default 1e-3)");
    sweep->add_option("--jobs", sweep_jobs, "concurrent per-parameter solves");

    int demo_dim = 64;
    unsigned demo_seed = 20240901;
    std::string demo_out;
    CLI::App* demo = app.add_subcommand(
        "demo-appendix", "finite truncation model: pointwise-convergent maps, unbounded inverses");
    demo->add_option("--dim", demo_dim, "space dimension (default 64)");
    demo->add_option("--seed", demo_seed, "seed for the fixed random operator");
    demo->add_option("--out", demo_out, "also write truncation.csv here");

    CLI::App* catalog = app.add_subcommand("catalog", "built-in problem families");
    catalog->require_subcommand(1);
    catalog->add_subcommand("list", "list family names and summaries");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Error& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(solve)) return cmd_solve(solve_opts, solve_eps);
        if (app.got_subcommand(check)) return cmd_check(check_opts, check_tol);
        if (app.got_subcommand(sweep)) return cmd_sweep(sweep_opts, sweep_tol, sweep_jobs);
        if (app.got_subcommand(demo)) return cmd_demo(demo_dim, demo_seed, demo_out);
        if (app.got_subcommand(catalog)) return cmd_catalog_list();
    } catch (const DegenerateProblem& e) {
        std::cerr << "degenerate problem: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
