#include "parambvp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/SVD>

#include "parambvp/quadrature.hpp"

namespace parambvp {

namespace detail {

std::vector<CMatrix> derivative_tracks(const SmoothMatrixFn& A, const SmoothVectorFn* g,
                                       double t, const CMatrix& X, int upto) {
    if (g && X.cols() != 1)
        throw ShapeError("inhomogeneous derivative tracks need a single-column state");
    std::vector<CMatrix> tracks{X};
    tracks.reserve(upto + 1);
    for (int s = 0; s < upto; ++s) {
        CMatrix next = g ? CMatrix(g->eval(t, s)) : CMatrix(CMatrix::Zero(X.rows(), X.cols()));
        for (int i = 0; i <= s; ++i) next -= binomial(s, i) * (A.eval(t, i) * tracks[s - i]);
        tracks.push_back(std::move(next));
    }
    return tracks;
}

namespace {

// Dormand–Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

double growth(double err) { return std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-16), -0.2))); }

} // namespace

void integrate_dp54(const std::function<CMatrix(double, const CMatrix&)>& rhs, CMatrix state,
                    const std::vector<double>& outputs, double tol,
                    const std::function<void(int, double, const CMatrix&)>& record) {
    if (outputs.size() < 2) throw IntervalError("integration needs at least two output points");
    const double span = outputs.back() - outputs.front();
    if (span <= 0) throw IntervalError("integration outputs must increase");
    const double snap_eps = 1e-14 * span;

    record(0, outputs[0], state);
    double t = outputs[0];
    double h = span / 64.0;

    for (std::size_t seg = 1; seg < outputs.size(); ++seg) {
        const double target = outputs[seg];
        while (t < target - snap_eps) {
            const double trial = std::min(h, target - t);
            const CMatrix k1 = rhs(t, state);
            const CMatrix k2 = rhs(t + c2 * trial, state + trial * (a21 * k1));
            const CMatrix k3 = rhs(t + c3 * trial, state + trial * (a31 * k1 + a32 * k2));
            const CMatrix k4 =
                rhs(t + c4 * trial, state + trial * (a41 * k1 + a42 * k2 + a43 * k3));
            const CMatrix k5 = rhs(t + c5 * trial,
                                   state + trial * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const CMatrix k6 = rhs(
                t + trial, state + trial * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            const CMatrix next =
                state + trial * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const CMatrix k7 = rhs(t + trial, next);
            const CMatrix errm =
                trial * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            const auto scale =
                (tol + tol * state.cwiseAbs().cwiseMax(next.cwiseAbs()).array()).matrix();
            const double err = (errm.cwiseAbs().array() / scale.array()).maxCoeff();

            if (!next.allFinite())
                throw IntegrationError("non-finite state during time stepping");

            if (err <= 1.0) {
                t += trial;
                state = next;
                const double grown = trial * growth(err);
                h = (trial < h) ? std::max(h, grown) : grown;
            } else {
                h = trial * std::min(0.9, std::max(0.1, 0.9 * std::pow(err, -0.2)));
                if (h < snap_eps)
                    throw IntegrationError("step size underflow during time stepping");
            }
        }
        t = target;
        record(static_cast<int>(seg), target, state);
    }
}

} // namespace detail

namespace {

struct IntegrationResult {
    std::vector<std::vector<CMatrix>> tracks; // [s][grid index]
    std::map<double, std::vector<CMatrix>> at_stops;
    CMatrix n_value; // N applied columnwise (when N was supplied)
};

// Shared driver: integrate X' = g − A X from X(a) = init across the grid,
// landing exactly on requested stop points, recording derivative tracks, and
// (when N is given) accumulating its density integral alongside the state.
IntegrationResult run_integration(const SmoothMatrixFn& A, const SmoothVectorFn* g, CMatrix init,
                                  const GridSpec& grid, double tol, const ReducedBoundaryOp* N,
                                  const std::vector<double>& extra_stops = {}) {
    const int dim = A.rows();
    const int cols = static_cast<int>(init.cols());
    const int upto = A.order() + 1;
    const bool with_density = N != nullptr && N->has_density();
    const int block_m = N ? N->m : 0;

    std::vector<double> stop_requests = extra_stops;
    if (N) {
        const auto pts = N->stop_points();
        stop_requests.insert(stop_requests.end(), pts.begin(), pts.end());
        const auto cuts = N->density_breakpoints();
        stop_requests.insert(stop_requests.end(), cuts.begin(), cuts.end());
    }

    std::vector<double> outputs;
    outputs.reserve(grid.points() + stop_requests.size());
    for (int i = 0; i < grid.points(); ++i) outputs.push_back(grid.point(i));
    std::set<double> off_grid;
    for (double p : stop_requests) {
        if (!grid.interval.contains(p))
            throw IntervalError("boundary evaluation point outside the interval");
        if (grid.snap(p) < 0) {
            outputs.push_back(p);
            off_grid.insert(p);
        }
    }
    std::sort(outputs.begin(), outputs.end());
    outputs.erase(std::unique(outputs.begin(), outputs.end()), outputs.end());

    auto rhs = [&](double t, const CMatrix& S) -> CMatrix {
        if (!with_density) {
            CMatrix dX = -(A.eval(t) * S);
            if (g) dX += g->eval(t);
            return dX;
        }
        const CMatrix X = S.topRows(dim);
        const auto tracks = detail::derivative_tracks(A, g, t, X, upto);
        CMatrix dS(2 * dim, cols);
        dS.topRows(dim) = tracks[1];
        dS.bottomRows(dim) = N->density_at(t) * tracks[upto].bottomRows(block_m);
        return dS;
    };

    CMatrix state0 = init;
    if (with_density) {
        state0 = CMatrix::Zero(2 * dim, cols);
        state0.topRows(dim) = init;
    }

    IntegrationResult out;
    out.tracks.assign(upto + 1, std::vector<CMatrix>(grid.points()));
    CMatrix final_state;
    const double t_end = outputs.back();

    detail::integrate_dp54(
        rhs, std::move(state0), outputs, tol,
        [&](int, double t, const CMatrix& S) {
            const CMatrix X = with_density ? CMatrix(S.topRows(dim)) : S;
            const int idx = grid.snap(t);
            if (idx >= 0) {
                auto tracks = detail::derivative_tracks(A, g, t, X, upto);
                for (int s = 0; s <= upto; ++s) out.tracks[s][idx] = std::move(tracks[s]);
            }
            if (off_grid.count(t)) out.at_stops.emplace(t, detail::derivative_tracks(A, g, t, X, upto));
            if (t == t_end) final_state = S;
        });

    if (N) {
        CMatrix value = CMatrix::Zero(dim, cols);
        for (const auto& term : N->point_terms) {
            const int idx = grid.snap(term.point);
            const auto& tracks =
                idx >= 0 ? out.tracks[term.deriv][idx] : out.at_stops.at(term.point)[term.deriv];
            value += term.weight * tracks;
        }
        if (with_density) value += final_state.bottomRows(dim);
        out.n_value = std::move(value);
    }
    return out;
}

SampledFn to_sampled(const GridSpec& grid, const std::vector<std::vector<CMatrix>>& tracks) {
    const int dim = static_cast<int>(tracks[0][0].rows());
    SampledFn fn{grid, dim, {}};
    fn.tracks.reserve(tracks.size());
    for (const auto& track : tracks) {
        CMatrix T(dim, grid.points());
        for (int i = 0; i < grid.points(); ++i) T.col(i) = track[i];
        fn.tracks.push_back(std::move(T));
    }
    return fn;
}

std::pair<double, double> sigma_extremes(const CMatrix& M) {
    Eigen::JacobiSVD<CMatrix> svd(M);
    const auto& sv = svd.singularValues();
    return {sv(sv.size() - 1), sv(0)};
}

} // namespace

ReducedBoundaryOp reduce_boundary(const BoundaryOperator& B, Interval domain) {
    return std::visit(
        [&](const auto& op) {
            if constexpr (std::is_same_v<std::decay_t<decltype(op)>, GenericBoundaryOperator>)
                return reduce_boundary(op, domain);
            else
                return reduce_boundary(op);
        },
        B);
}

FundamentalMatrix fundamental_matrix(const FirstOrderSystem& sys, const GridSpec& grid,
                                     double tol, const std::vector<double>& extra_stops) {
    auto result = run_integration(sys.A, nullptr, CMatrix::Identity(sys.dim, sys.dim), grid, tol,
                                  nullptr, extra_stops);
    return FundamentalMatrix{grid, sys.dim, std::move(result.tracks), std::move(result.at_stops)};
}

SampledFn particular_solution(const FirstOrderSystem& sys, const GridSpec& grid, double tol) {
    auto result =
        run_integration(sys.A, &sys.g, CMatrix::Zero(sys.dim, 1), grid, tol, nullptr);
    return to_sampled(grid, result.tracks);
}

CMatrix characteristic_matrix(const FundamentalMatrix& Y, const ReducedBoundaryOp& N) {
    if (N.dim() != Y.dim) throw ShapeError("boundary operator does not match the system size");
    CMatrix M = CMatrix::Zero(Y.dim, Y.dim);
    for (const auto& term : N.point_terms) {
        const int idx = Y.grid.snap(term.point);
        if (idx >= 0) {
            if (term.deriv >= static_cast<int>(Y.tracks.size()))
                throw SmoothnessError("fundamental matrix lacks the requested track");
            M += term.weight * Y.tracks[term.deriv][idx];
        } else {
            const auto it = Y.at_stops.find(term.point);
            if (it == Y.at_stops.end())
                throw IntervalError("fundamental matrix was not evaluated at a boundary point");
            M += term.weight * it->second[term.deriv];
        }
    }
    if (N.has_density()) {
        // Composite Simpson over the stored samples of φ(t)·Y_r^{(n+1)}(t).
        const int top = N.n + 1;
        if (Y.order() < top)
            throw SmoothnessError("fundamental matrix lacks the top derivative track");
        const int pts = Y.grid.points();
        CMatrix acc = CMatrix::Zero(Y.dim, Y.dim);
        for (int i = 0; i < pts; ++i) {
            const double w = (i == 0 || i == pts - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc += w * (N.density_at(Y.grid.point(i)) *
                        Y.tracks[top][i].bottomRows(N.m));
        }
        M += acc * (Y.grid.step() / 3.0);
    }
    return M;
}

Condition0Report check_condition0(const HigherOrderSystem& sys, const BoundaryOperator& B,
                                  double eps, const SolverOptions& opts) {
    PreparedProblem prepared(sys, B, eps, opts);
    return {prepared.characteristic(), prepared.sigma_min(), prepared.sigma_max(),
            prepared.degenerate()};
}

FundamentalMatrix normalized_fundamental(const FundamentalMatrix& Y, const CMatrix& M) {
    if (M.rows() != Y.dim || M.cols() != Y.dim)
        throw ShapeError("characteristic matrix does not match the system size");
    const CMatrix Minv = M.colPivHouseholderQr().inverse();
    FundamentalMatrix out{Y.grid, Y.dim, {}, {}};
    out.tracks.assign(Y.tracks.size(), std::vector<CMatrix>(Y.grid.points()));
    for (std::size_t s = 0; s < Y.tracks.size(); ++s)
        for (int i = 0; i < Y.grid.points(); ++i) out.tracks[s][i] = Y.tracks[s][i] * Minv;
    for (const auto& [t, tracks] : Y.at_stops) {
        std::vector<CMatrix> scaled;
        scaled.reserve(tracks.size());
        for (const auto& T : tracks) scaled.push_back(T * Minv);
        out.at_stops.emplace(t, std::move(scaled));
    }
    return out;
}

SampledMatrixTrack reconstruct_A(const FundamentalMatrix& Y) {
    if (Y.tracks.size() < 2) throw SmoothnessError("coefficient recovery needs the Y' track");
    SampledMatrixTrack rec{Y.grid, {}};
    rec.values.reserve(Y.grid.points());
    for (int i = 0; i < Y.grid.points(); ++i)
        rec.values.push_back(-Y.tracks[1][i] * Y.tracks[0][i].inverse());
    return rec;
}

double reconstruction_distance(const SampledMatrixTrack& rec, const SmoothMatrixFn& A) {
    double worst = 0.0;
    for (int i = 0; i < rec.grid.points(); ++i)
        worst = std::max(worst,
                         entry_sum_norm(CMatrix(rec.values[i] - A.eval(rec.grid.point(i)))));
    return worst;
}

CVector apply_reduced_exact(const ReducedBoundaryOp& N, const FirstOrderSystem& sys,
                            const CVector& initial, const GridSpec& grid, double tol) {
    if (N.dim() != sys.dim) throw ShapeError("boundary operator does not match the system size");
    auto result = run_integration(sys.A, &sys.g, initial, grid, tol, &N);
    return CVector(result.n_value);
}

// -- prepared problem ------------------------------------------------------

PreparedProblem::Factored PreparedProblem::factor(const HigherOrderSystem& sys,
                                                  const FirstOrderSystem& companion,
                                                  const ReducedBoundaryOp& N,
                                                  const GridSpec& grid,
                                                  const SolverOptions& opts) {
    if (N.r != sys.r || N.m != sys.m || N.n != sys.n)
        throw ShapeError("boundary operator orders do not match the system");
    auto result = run_integration(companion.A, nullptr,
                                  CMatrix::Identity(companion.dim, companion.dim), grid, opts.tol,
                                  &N);
    FundamentalMatrix Y{grid, companion.dim, std::move(result.tracks),
                        std::move(result.at_stops)};
    CMatrix M = std::move(result.n_value);
    const auto [smin, smax] = sigma_extremes(M);
    auto qr = M.colPivHouseholderQr();
    return {std::move(Y), std::move(M), std::move(qr), smin, smax};
}

PreparedProblem::PreparedProblem(const HigherOrderSystem& sys, const BoundaryOperator& B,
                                 double eps, SolverOptions opts)
    : sys_(sys.at_eps(eps)),
      N_(reduce_boundary(B, sys.domain)),
      companion_(build_companion(sys_, eps)),
      opts_(opts),
      grid_(sys.domain, opts.grid_panels),
      eps_(eps),
      data_(factor(sys_, companion_, N_, grid_, opts_)) {}

SolveOutcome PreparedProblem::solve(const CVector& q) const { return solve_with(sys_.f, q); }

SolveOutcome PreparedProblem::solve_with(const SmoothVectorFn& f, const CVector& q) const {
    if (degenerate())
        throw DegenerateProblem("characteristic matrix is numerically singular (sigma_min = " +
                                    std::to_string(data_.sigma_min) + ")",
                                data_.sigma_min, data_.sigma_max);
    if (q.size() != companion_.dim) throw ShapeError("boundary value has wrong dimension");

    HigherOrderSystem sys_f = sys_;
    sys_f.f = f.at_eps(eps_);
    auto fo = std::make_shared<const FirstOrderSystem>(build_companion(sys_f, eps_));

    auto particular =
        run_integration(fo->A, &fo->g, CMatrix::Zero(fo->dim, 1), grid_, opts_.tol, &N_);
    const CVector c = data_.qr.solve(CVector(q - CVector(particular.n_value)));

    // Combine tracks linearly; then re-integrate the combined solution once to
    // apply N independently of the linear solve (boundary residual witness).
    const auto& Ytracks = data_.Y.tracks;
    std::vector<std::vector<CMatrix>> combined(Ytracks.size(),
                                               std::vector<CMatrix>(grid_.points()));
    for (std::size_t s = 0; s < Ytracks.size(); ++s)
        for (int i = 0; i < grid_.points(); ++i)
            combined[s][i] = Ytracks[s][i] * c + particular.tracks[s][i];

    const CVector witness = apply_reduced_exact(N_, *fo, c, grid_, opts_.tol);
    const double boundary_residual = entry_sum_norm(CVector(witness - q));

    SampledFn y = to_sampled(grid_, combined);
    SampledFn z = lift_solution(y, sys_f);

    // Residual of the lifted tracks in the original equation (consistency of
    // the lift; near machine zero by construction).
    const SmoothVectorFn f_eps = f.at_eps(eps_);
    double ode_residual = 0.0;
    for (int i = 0; i < grid_.points(); ++i) {
        const double t = grid_.point(i);
        CVector res = CVector(z.tracks[sys_.r].col(i)) - f_eps.eval(t);
        for (int j = 1; j <= sys_.r; ++j)
            res += sys_.K[sys_.r - j].eval(t) * CVector(z.tracks[sys_.r - j].col(i));
        ode_residual = std::max(ode_residual, entry_sum_norm(res));
    }

    return SolveOutcome{std::move(z),      std::move(y),      data_.M,
                        data_.sigma_min,   data_.sigma_max,   ode_residual,
                        boundary_residual, fo,                c};
}

SolveOutcome solve_bvp(const HigherOrderSystem& sys, const BoundaryOperator& B, const CVector& q,
                       double eps, const SolverOptions& opts) {
    return PreparedProblem(sys, B, eps, opts).solve(q);
}

} // namespace parambvp
