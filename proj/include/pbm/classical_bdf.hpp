#pragma once

#include <string>
#include <vector>

#include "pbm/errors.hpp"
#include "pbm/integrator.hpp"
#include "pbm/interp.hpp"
#include "pbm/linalg.hpp"

namespace pbm {

/// Classical BDF-k regenerated from its defining interpolation problem:
/// values at tau = -k+1..0 plus a derivative condition at tau = 1, evaluated
/// at tau = 1. Also exposes the one-step companion block form (state = last k
/// values, alpha = 1) for the stability machinery.
struct ClassicalBdf {
    int k = 2;
    std::vector<double> history_weights;  // on y_{n+1-k} .. y_n, oldest first
    double derivative_weight = 0.0;       // on h f_{n+1}
    BlockMatrices block;                  // companion form, r = h
};

inline ClassicalBdf classical_bdf(int k) {
    if (k < 2 || k > 6) throw ConfigError("classical BDF order must be in 2..6");

    // Reuse the LinearForm machinery with q = k: input value slot m holds
    // y_{n-k+m}, output derivative slot k holds h f_{n+1}.
    std::vector<InterpCondition> conds;
    for (int m = 1; m <= k; ++m)
        conds.push_back({cplx(static_cast<double>(m - k), 0.0), SlotKind::Value,
                         LinearForm::unit(k, {SlotPhase::Input, SlotKind::Value, m})});
    conds.push_back({cplx(1.0, 0.0), SlotKind::Derivative,
                     LinearForm::unit(k, {SlotPhase::Output, SlotKind::Derivative, k})});
    const LinearForm row = hermite_birkhoff_fit(conds).eval(cplx(1.0, 0.0));

    ClassicalBdf bdf;
    bdf.k = k;
    for (int m = 1; m <= k; ++m)
        bdf.history_weights.push_back(row.coeff(SlotPhase::Input, SlotKind::Value, m).real());
    bdf.derivative_weight = row.coeff(SlotPhase::Output, SlotKind::Derivative, k).real();

    BlockMatrices b;
    b.q = k;
    b.A = CMatrix(k, k);
    b.B = CMatrix(k, k);
    b.C = CMatrix(k, k);
    b.D = CMatrix(k, k);
    for (int m = 0; m < k - 1; ++m) b.A(m, m + 1) = 1.0;  // shift rows
    for (int m = 0; m < k; ++m) b.A(k - 1, m) = bdf.history_weights[m];
    b.D(k - 1, k - 1) = bdf.derivative_weight;
    bdf.block = b;
    return bdf;
}

/// Fixed-step BDF-k integration with Newton solves; startup values come from
/// verified RK4 marching along the real axis.
inline IntegrationResult integrate_classical_bdf(const Problem& problem, int k, double t0,
                                                 const cvector& y0, double t_end, int steps,
                                                 const NewtonConfig& newton = {}) {
    if (steps < k) throw ConfigError("BDF-" + std::to_string(k) + " needs at least k steps");
    const ClassicalBdf bdf = classical_bdf(k);
    const double h = (t_end - t0) / steps;
    const std::size_t n = static_cast<std::size_t>(problem.dimension);

    std::vector<cvector> history;  // y at t0, t0+h, ..., oldest first
    history.push_back(y0);
    for (int m = 1; m < k; ++m)
        history.push_back(march_verified(problem, cplx(t0 + (m - 1) * h, 0.0), history.back(),
                                         cplx(t0 + m * h, 0.0), 64,
                                         "BDF startup value " + std::to_string(m)));

    IntegrationResult result;
    for (int s = k - 1; s < steps; ++s) {
        const double t_next = t0 + (s + 1) * h;
        cvector c(n, cplx{});
        for (int m = 0; m < k; ++m)
            for (std::size_t i = 0; i < n; ++i) c[i] += bdf.history_weights[m] * history[m][i];
        const cvector y = detail::newton_solve(problem, c, h, cplx(bdf.derivative_weight, 0.0),
                                               cplx(t_next, 0.0), newton, result.newton);
        history.erase(history.begin());
        history.push_back(y);
    }

    result.terminal = history.back();
    if (problem.exact) {
        const cvector ref = problem.exact(t_end);
        double err = 0.0;
        for (std::size_t i = 0; i < ref.size(); ++i)
            err = std::max(err, std::abs(result.terminal[i] - ref[i]));
        result.error_inf = err;
    }
    return result;
}

} // namespace pbm
