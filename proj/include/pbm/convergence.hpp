#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pbm/builder.hpp"
#include "pbm/classical_bdf.hpp"
#include "pbm/integrator.hpp"

namespace pbm {

/// How convergence_study obtains its reference solution.
enum class ReferencePolicy {
    Exact,        // the problem's closed form
    SelfBdf6,     // classical BDF6 at h_ref <= min(h)/8 (stiff dissipative runs)
    SelfSameMethod  // the method under test at h_ref (dispersive runs)
};

/// A method under test: either a PBM spec or a classical BDF order.
struct MethodUnderTest {
    std::optional<MethodSpec> pbm;
    int classical_bdf_order = 0;
};

struct ConvergenceRun {
    std::vector<double> hs;
    std::vector<double> errors;        // L-inf at the terminal time; inf on blow-up
    std::vector<long> newton_totals;
    std::optional<double> observed_order;  // empty when no asymptotic range exists
};

namespace detail {

/// Least-squares slope of log(error) against log(h) over the asymptotic
/// sub-range: the finest-h run on which the error decreases monotonically and
/// stays above 100x the noise floor. At most the six finest points of that
/// run enter the fit; coarse pre-asymptotic points would bias the slope.
inline std::optional<double> fit_order(const std::vector<double>& hs,
                                       const std::vector<double>& errors, double noise_floor) {
    std::vector<std::size_t> idx(hs.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return hs[a] > hs[b]; });

    std::vector<std::vector<std::pair<double, double>>> runs(1);
    for (std::size_t i : idx) {
        const double e = errors[i];
        const bool usable = std::isfinite(e) && e > 100.0 * noise_floor;
        auto& current = runs.back();
        const bool decreasing = current.empty() || e < current.back().second;
        if (usable && decreasing) {
            current.emplace_back(hs[i], e);
        } else {
            runs.emplace_back();
            if (usable) runs.back().emplace_back(hs[i], e);
        }
    }
    std::vector<std::pair<double, double>> window;
    for (auto it = runs.rbegin(); it != runs.rend(); ++it)
        if (it->size() >= 3) {
            window = *it;
            break;
        }
    if (window.size() < 3) return std::nullopt;
    if (window.size() > 6) window.erase(window.begin(), window.end() - 6);

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [h, e] : window) {
        const double x = std::log(h), y = std::log(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(window.size());
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

} // namespace detail

/// Materialize the reference solution a convergence study compares against.
inline cvector reference_solution(const Problem& problem, const MethodUnderTest& method,
                                  double t0, const cvector& y0, double t_end,
                                  const std::vector<int>& steps_list, ReferencePolicy policy,
                                  const NewtonConfig& newton = {}) {
    if (policy == ReferencePolicy::Exact) {
        if (!problem.exact) throw ConfigError("problem has no exact solution for the reference");
        return problem.exact(t_end);
    }
    const int max_steps = *std::max_element(steps_list.begin(), steps_list.end());
    const int ref_steps = 8 * max_steps;
    if (policy == ReferencePolicy::SelfBdf6)
        return integrate_classical_bdf(problem, 6, t0, y0, t_end, ref_steps, newton).terminal;
    const BuiltMethod built = build_method(*method.pbm);
    return integrate_from(problem, built, t0, y0, t_end, ref_steps, newton).terminal;
}

/// Run a method over a list of stepsizes and fit the observed order. Step
/// counts must divide the interval exactly; hs are converted to integer step
/// counts and rejected if they do not fit. A precomputed reference can be
/// supplied to share one fine run across several studies.
inline ConvergenceRun convergence_study(const Problem& problem, const MethodUnderTest& method,
                                        double t0, const cvector& y0, double t_end,
                                        const std::vector<int>& steps_list,
                                        ReferencePolicy policy = ReferencePolicy::Exact,
                                        const NewtonConfig& newton = {},
                                        const cvector* precomputed_reference = nullptr) {
    if (steps_list.empty()) throw ConfigError("convergence study needs at least one step count");

    const cvector reference =
        precomputed_reference
            ? *precomputed_reference
            : reference_solution(problem, method, t0, y0, t_end, steps_list, policy, newton);
    double ref_scale = 1.0;
    for (const auto& x : reference) ref_scale = std::max(ref_scale, std::abs(x));

    ConvergenceRun run;
    std::optional<BuiltMethod> built;
    if (method.pbm) built = build_method(*method.pbm);

    for (int steps : steps_list) {
        const double h = (t_end - t0) / steps;
        run.hs.push_back(h);
        double err = std::numeric_limits<double>::infinity();
        long newtons = 0;
        try {
            cvector terminal;
            if (method.pbm) {
                const IntegrationResult r =
                    integrate_from(problem, *built, t0, y0, t_end, steps, newton);
                terminal = r.terminal;
                newtons = r.newton.total_iterations;
            } else {
                const IntegrationResult r = integrate_classical_bdf(
                    problem, method.classical_bdf_order, t0, y0, t_end, steps, newton);
                terminal = r.terminal;
                newtons = r.newton.total_iterations;
            }
            err = 0.0;
            for (std::size_t i = 0; i < reference.size(); ++i)
                err = std::max(err, std::abs(terminal[i] - reference[i]));
        } catch (const BlowUpError&) {
        } catch (const NewtonError&) {
        } catch (const AnalyticityError&) {
        }
        run.errors.push_back(err);
        run.newton_totals.push_back(newtons);
    }

    const double noise_floor = std::numeric_limits<double>::epsilon() * ref_scale;
    run.observed_order = detail::fit_order(run.hs, run.errors, noise_floor);
    return run;
}

} // namespace pbm
