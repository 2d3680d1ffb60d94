#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pbm/builder.hpp"
#include "pbm/errors.hpp"
#include "pbm/interp.hpp"
#include "pbm/linalg.hpp"
#include "pbm/nodes.hpp"

namespace pbm {

/// An initial value problem y' = f(t, y) evaluable at complex times, with an
/// exact Jacobian and an optional closed-form solution.
struct Problem {
    int dimension = 1;
    std::function<cvector(cplx, const cvector&)> rhs;
    std::function<CMatrix(cplx, const cvector&)> jacobian;
    std::function<cvector(double)> exact;  // may be empty
    bool real_analytic = false;  // asserts f(conj t, conj y) = conj f(t, y)
    int bandwidth = -1;          // Jacobian bandwidth; -1 means dense
    std::string name = "problem";
};

/// The q solution and derivative vectors carried between steps.
/// Y[j] approximates y(t_n + r z_j); F[j] holds the unscaled f there.
struct BlockState {
    double t_n = 0.0;
    double r = 0.0;
    std::vector<cvector> Y, F;
};

struct NewtonConfig {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    int max_iterations = 20;
};

struct NewtonStats {
    long solves = 0;
    long total_iterations = 0;
    int max_iterations_in_solve = 0;
    std::vector<double> last_residual_history;
};

struct TrajectoryRow {
    int step;
    cplx t;
    int node;
    cvector components;
};

struct IntegrationResult {
    cvector terminal;
    std::optional<double> error_inf;
    BlockState final_state;
    NewtonStats newton;
    bool terminal_used_value_fallback = false;
    std::vector<TrajectoryRow> trajectory;
};

namespace detail {

inline void require_finite(const cvector& v, const std::string& where) {
    if (!all_finite(v)) throw BlowUpError("non-finite values in " + where);
}

/// Classical RK4 along the straight segment t0 -> t1 in the complex plane.
inline cvector rk4_march(const Problem& p, cplx t0, cvector y, cplx t1, int substeps) {
    const cplx dt = (t1 - t0) / cplx(static_cast<double>(substeps), 0.0);
    cplx t = t0;
    const std::size_t n = y.size();
    for (int s = 0; s < substeps; ++s) {
        const cvector k1 = p.rhs(t, y);
        cvector y2(n);
        for (std::size_t i = 0; i < n; ++i) y2[i] = y[i] + 0.5 * dt * k1[i];
        const cvector k2 = p.rhs(t + 0.5 * dt, y2);
        for (std::size_t i = 0; i < n; ++i) y2[i] = y[i] + 0.5 * dt * k2[i];
        const cvector k3 = p.rhs(t + 0.5 * dt, y2);
        for (std::size_t i = 0; i < n; ++i) y2[i] = y[i] + dt * k3[i];
        const cvector k4 = p.rhs(t + dt, y2);
        for (std::size_t i = 0; i < n; ++i)
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        t += dt;
        if (!all_finite(y)) return y;
    }
    return y;
}

} // namespace detail

/// March from t0 to t1 with step-halving Richardson verification: accept once
/// the halved run agrees to 1e-11 relative (doubling the substep count up to
/// 2^14) and return the fourth-order Richardson extrapolant of the final pair.
inline cvector march_verified(const Problem& p, cplx t0, const cvector& y0, cplx t1,
                              int substeps, const std::string& label) {
    if (std::abs(t1 - t0) == 0.0) return y0;
    cvector coarse = detail::rk4_march(p, t0, y0, t1, substeps);
    for (int n = substeps; n <= (1 << 14); n *= 2) {
        const cvector fine = detail::rk4_march(p, t0, y0, t1, 2 * n);
        if (!all_finite(fine) || !all_finite(coarse))
            throw AnalyticityError("non-finite values along the path to " + label);
        double diff = 0.0, scale = 1.0;
        for (std::size_t i = 0; i < fine.size(); ++i) {
            diff = std::max(diff, std::abs(fine[i] - coarse[i]));
            scale = std::max(scale, std::abs(fine[i]));
        }
        if (diff <= 1e-11 * scale) {
            cvector out(fine.size());
            for (std::size_t i = 0; i < fine.size(); ++i)
                out[i] = fine[i] + (fine[i] - coarse[i]) / 15.0;
            return out;
        }
        coarse = fine;
    }
    throw AnalyticityError("path refinement cap reached marching to " + label);
}

/// Fill a block by marching along the straight segments t0 -> t0 + r z_j.
inline BlockState init_block(const Problem& problem, double t0, const cvector& y0,
                             const NodeSet& nodes, double r, int substeps = 64) {
    BlockState state;
    state.t_n = t0;
    state.r = r;
    for (int j = 1; j <= nodes.q; ++j) {
        const cplx target = cplx(t0, 0.0) + r * nodes.values[j - 1];
        cvector y = march_verified(problem, cplx(t0, 0.0), y0, target, substeps,
                                   "node " + std::to_string(j));
        cvector f = problem.rhs(target, y);
        detail::require_finite(f, "initial derivative at node " + std::to_string(j));
        state.Y.push_back(std::move(y));
        state.F.push_back(std::move(f));
    }
    return state;
}

namespace detail {

/// Solve y = c + r d f(t, y) by Newton with the exact Jacobian, warm started
/// from the explicit predictor c.
inline cvector newton_solve(const Problem& p, const cvector& c, double r, cplx d, cplx t,
                            const NewtonConfig& cfg, NewtonStats& stats) {
    const std::size_t n = c.size();
    cvector y = c;
    std::vector<double> history;
    ++stats.solves;
    for (int it = 0; it < cfg.max_iterations; ++it) {
        const cvector f = p.rhs(t, y);
        cvector g(n);
        for (std::size_t i = 0; i < n; ++i) g[i] = y[i] - c[i] - r * d * f[i];
        if (!all_finite(g)) throw BlowUpError("non-finite Newton residual");
        const double res = inf_norm(g);
        history.push_back(res);
        if (res <= cfg.abs_tol + cfg.rel_tol * inf_norm(y)) {
            stats.total_iterations += it;
            stats.max_iterations_in_solve = std::max(stats.max_iterations_in_solve, it);
            stats.last_residual_history = history;
            return y;
        }
        CMatrix jg = p.jacobian(t, y);
        jg *= -r * d;
        for (std::size_t i = 0; i < n; ++i) jg(i, i) += 1.0;
        cvector delta;
        if (p.bandwidth >= 0) {
            BandedLu lu(jg, p.bandwidth, p.bandwidth);
            if (lu.singular()) throw NewtonError("singular Newton matrix", history);
            delta = lu.solve(g);
        } else {
            LuFactorization lu(std::move(jg));
            if (lu.singular()) throw NewtonError("singular Newton matrix", history);
            delta = lu.solve(g);
        }
        for (std::size_t i = 0; i < n; ++i) y[i] -= delta[i];
    }
    throw NewtonError("Newton did not converge in " + std::to_string(cfg.max_iterations) +
                          " iterations",
                      history);
}

/// Assemble the explicit part of output j from the previous block and the
/// already-computed outputs of this step.
inline cvector assemble_rhs(const BlockMatrices& m, const BlockState& state,
                            const std::vector<cvector>& y_new, const std::vector<cvector>& f_new,
                            int j, std::size_t n) {
    cvector c(n, cplx{});
    for (int k = 0; k < m.q; ++k) {
        const cplx a = m.A(j - 1, k), b = m.B(j - 1, k);
        if (a != cplx{})
            for (std::size_t i = 0; i < n; ++i) c[i] += a * state.Y[k][i];
        if (b != cplx{})
            for (std::size_t i = 0; i < n; ++i) c[i] += state.r * b * state.F[k][i];
    }
    for (int k = 0; k < j - 1; ++k) {
        const cplx cc = m.C(j - 1, k), d = m.D(j - 1, k);
        if (cc != cplx{})
            for (std::size_t i = 0; i < n; ++i) c[i] += cc * y_new[k][i];
        if (d != cplx{})
            for (std::size_t i = 0; i < n; ++i) c[i] += state.r * d * f_new[k][i];
    }
    return c;
}

inline void compute_output(const BuiltMethod& method, const BlockState& state,
                           const Problem& problem, const NewtonConfig& newton,
                           std::vector<cvector>& y_new, std::vector<cvector>& f_new, int j,
                           NewtonStats& stats) {
    const BlockMatrices& m = method.matrices;
    const std::size_t n = static_cast<std::size_t>(problem.dimension);
    const cplx t_out = cplx(state.t_n, 0.0) +
                       state.r * (method.spec.nodes.values[j - 1] + method.spec.alpha);
    const cvector c = assemble_rhs(m, state, y_new, f_new, j, n);
    const cplx d = m.D(j - 1, j - 1);
    cvector y = (d == cplx{}) ? c : newton_solve(problem, c, state.r, d, t_out, newton, stats);
    require_finite(y, "output " + std::to_string(j));
    cvector f = problem.rhs(t_out, y);
    require_finite(f, "derivative of output " + std::to_string(j));
    y_new[j - 1] = std::move(y);
    f_new[j - 1] = std::move(f);
}

} // namespace detail

/// Advance one step. Serial methods process outputs in node order; each
/// implicit output solves a single nonlinear system with Newton.
inline BlockState step(const BuiltMethod& method, const BlockState& state, const Problem& problem,
                       const NewtonConfig& newton, NewtonStats& stats) {
    if (method.spec.implicitness == Implicitness::FullyImplicit)
        throw ConfigError("time stepping fully implicit methods is not supported");
    const int q = method.matrices.q;
    std::vector<cvector> y_new(q), f_new(q);
    for (int j = 1; j <= q; ++j)
        detail::compute_output(method, state, problem, newton, y_new, f_new, j, stats);
    BlockState next;
    next.t_n = state.t_n + state.r * method.spec.alpha;
    next.r = state.r;
    next.Y = std::move(y_new);
    next.F = std::move(f_new);
    return next;
}

/// Advance one step computing only one member of each conjugate output pair;
/// the partner is filled by Schwarz reflection. Requires conjugate-structured
/// matrices and a problem asserted to be real-analytic.
inline BlockState step_conjugate(const BuiltMethod& method, const ConjugatePairing& pairing,
                                 const BlockState& state, const Problem& problem,
                                 const NewtonConfig& newton, NewtonStats& stats) {
    if (method.spec.implicitness == Implicitness::FullyImplicit)
        throw ConfigError("time stepping fully implicit methods is not supported");
    if (!problem.real_analytic)
        throw ConfigError("conjugate stepping requires a problem asserted real-analytic");
    const auto [symmetric, dev] = verify_conjugate_structure(method.matrices, pairing);
    if (!symmetric)
        throw StructureError("method matrices are not conjugate symmetric (deviation " +
                             std::to_string(dev) + ")");

    const int q = method.matrices.q;
    const std::vector<int> partner = pairing.partner_of(q);
    std::vector<cvector> y_new(q), f_new(q);
    const std::size_t n = static_cast<std::size_t>(problem.dimension);
    for (int j = 1; j <= q; ++j) {
        if (partner[j] < j) {  // second member of a pair: reflect
            y_new[j - 1].resize(n);
            f_new[j - 1].resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                y_new[j - 1][i] = std::conj(y_new[partner[j] - 1][i]);
                f_new[j - 1][i] = std::conj(f_new[partner[j] - 1][i]);
            }
            continue;
        }
        detail::compute_output(method, state, problem, newton, y_new, f_new, j, stats);
    }
    BlockState next;
    next.t_n = state.t_n + state.r * method.spec.alpha;
    next.r = state.r;
    next.Y = std::move(y_new);
    next.F = std::move(f_new);
    return next;
}

/// Read out the solution at the block's real base time t_n. A node at tau = 0
/// passes through directly; otherwise a Hermite fit over the block data is
/// evaluated at tau = 0, falling back to a value-only fit if not poised.
inline cvector terminal_value(const BlockState& state, const NodeSet& nodes,
                              bool* used_fallback = nullptr) {
    if (used_fallback) *used_fallback = false;
    for (int j = 1; j <= nodes.q; ++j)
        if (std::abs(nodes.values[j - 1]) <= kNodeTol) return state.Y[j - 1];

    const int q = nodes.q;
    std::vector<InterpCondition> conds;
    for (int j = 1; j <= q; ++j) {
        conds.push_back({nodes.values[j - 1], SlotKind::Value,
                         LinearForm::unit(q, {SlotPhase::Input, SlotKind::Value, j})});
        conds.push_back({nodes.values[j - 1], SlotKind::Derivative,
                         LinearForm::unit(q, {SlotPhase::Input, SlotKind::Derivative, j})});
    }
    LinearForm weights(q);
    try {
        weights = hermite_birkhoff_fit(conds).eval(cplx{});
    } catch (const SingularFitError&) {
        if (used_fallback) *used_fallback = true;
        conds.clear();
        for (int j = 1; j <= q; ++j)
            conds.push_back({nodes.values[j - 1], SlotKind::Value,
                             LinearForm::unit(q, {SlotPhase::Input, SlotKind::Value, j})});
        weights = lagrange_fit(conds).eval(cplx{});
    }

    const std::size_t n = state.Y.front().size();
    cvector out(n, cplx{});
    for (int j = 1; j <= q; ++j) {
        const cplx wv = weights.coeff(SlotPhase::Input, SlotKind::Value, j);
        const cplx wd = weights.coeff(SlotPhase::Input, SlotKind::Derivative, j);
        for (std::size_t i = 0; i < n; ++i)
            out[i] += wv * state.Y[j - 1][i] + wd * state.r * state.F[j - 1][i];
    }
    return out;
}

/// Fixed-step integration over [t0, t_end] from a given initial value:
/// initialize the block, step, read out at the terminal time, and compare
/// against the exact solution if known.
inline IntegrationResult integrate_from(const Problem& problem, const BuiltMethod& method,
                                        double t0, const cvector& y0, double t_end, int steps,
                                        const NewtonConfig& newton = {}, bool conjugate = false,
                                        int init_substeps = 64,
                                        const std::vector<int>& trajectory_components = {}) {
    if (steps < 1) throw ConfigError("step count must be at least 1");
    const NodeSet& nodes = method.spec.nodes;
    const double h = (t_end - t0) / steps;
    const double r = h / method.spec.alpha;

    IntegrationResult result;
    BlockState state = init_block(problem, t0, y0, nodes, r, init_substeps);
    const auto pairing = conjugate ? conjugate_pairing(nodes) : ConjugatePairing{};

    auto record = [&](int step_index, const BlockState& s) {
        if (trajectory_components.empty()) return;
        for (int j = 1; j <= nodes.q; ++j) {
            TrajectoryRow row;
            row.step = step_index;
            row.t = cplx(s.t_n, 0.0) + s.r * nodes.values[j - 1];
            row.node = j;
            for (int c : trajectory_components) row.components.push_back(s.Y[j - 1][c]);
            result.trajectory.push_back(std::move(row));
        }
    };
    record(0, state);

    for (int s = 1; s <= steps; ++s) {
        state = conjugate ? step_conjugate(method, pairing, state, problem, newton, result.newton)
                          : step(method, state, problem, newton, result.newton);
        record(s, state);
    }

    result.terminal = terminal_value(state, nodes, &result.terminal_used_value_fallback);
    if (problem.exact) {
        const cvector ref = problem.exact(state.t_n);
        double err = 0.0;
        for (std::size_t i = 0; i < ref.size(); ++i)
            err = std::max(err, std::abs(result.terminal[i] - ref[i]));
        result.error_inf = err;
    }
    result.final_state = std::move(state);
    return result;
}

/// Convenience overload starting from the problem's exact solution at t0.
inline IntegrationResult integrate(const Problem& problem, const BuiltMethod& method, double t0,
                                   double t_end, int steps, const NewtonConfig& newton = {},
                                   bool conjugate = false, int init_substeps = 64,
                                   const std::vector<int>& trajectory_components = {}) {
    if (!problem.exact)
        throw ConfigError("problem has no exact solution to take the initial value from");
    return integrate_from(problem, method, t0, problem.exact(t0), t_end, steps, newton, conjugate,
                          init_substeps, trajectory_components);
}

} // namespace pbm
