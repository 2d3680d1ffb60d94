#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "pbm/builder.hpp"
#include "pbm/errors.hpp"
#include "pbm/linalg.hpp"
#include "pbm/roots.hpp"

namespace pbm {

/// Verdict of one stability-angle measurement.
struct StabilityReport {
    double angle_deg = 0.0;
    bool a90 = false;
    bool root_stable = false;          // the negative real axis ray passes
    double max_spectral_radius_sampled = 0.0;
    long samples = 0;
};

/// Stability angle as a function of the extrapolation factor, plus the
/// root-stable alpha intervals sampled on the same grid.
struct AlphaSweep {
    std::vector<double> alphas;
    std::vector<double> theta_deg;
    std::vector<bool> root_stable;
    std::vector<std::pair<double, double>> root_stable_intervals;
};

/// Boolean stability picture over a rectangle of the zeta plane (h-units).
struct RegionGrid {
    std::vector<double> re, im;          // cell centers
    std::vector<std::vector<bool>> stable;  // [iy][ix]
};

inline constexpr double kRootStabilityTol = 1e-8;
inline constexpr double kEigenClusterRadius = 1e-6;

namespace detail {

/// Direct power-boundedness probe by repeated squaring, used to decide
/// whether a cluster of near-unit-modulus eigenvalues is semisimple. Runs to
/// n = 2^27 steps, the horizon at which a tolerated eigenvalue excursion of
/// 1e-8 still contributes only an e-fold factor; defective unit eigenvalues
/// grow linearly in n and blow far past the bound.
inline bool powers_bounded(const CMatrix& m, int squarings = 27, double bound = 1e6) {
    CMatrix p = m;
    const double scale = std::max(1.0, m.max_abs());
    for (int s = 0; s < squarings; ++s) {
        p = p * p;
        const double norm = p.max_abs();
        if (!std::isfinite(norm) || norm > bound * scale) return false;
    }
    return true;
}

} // namespace detail

/// Amplification matrix of the Dahlquist iteration at zeta_r = r*lambda
/// (node-radius units): M = (I - C - zeta_r D)^(-1) (A + zeta_r B).
inline CMatrix amplification_matrix(const BlockMatrices& m, cplx zeta_r) {
    const int q = m.q;
    CMatrix lhs = CMatrix::identity(q);
    CMatrix rhs(q, q);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) {
            lhs(i, j) -= m.C(i, j) + zeta_r * m.D(i, j);
            rhs(i, j) = m.A(i, j) + zeta_r * m.B(i, j);
        }
    LuFactorization lu(std::move(lhs));
    if (lu.singular())
        throw StructureError("amplification matrix has a pole at the requested zeta");
    return lu.solve(rhs);
}

/// The zeta -> infinity limit of the amplification matrix: -D^(-1) B when D
/// is invertible (leading-order balance of the resolvent). When D is singular
/// the limit can still exist, e.g. for companion forms with explicit shift
/// rows; it is then evaluated at large finite zeta. Returns nothing when the
/// far field is unbounded.
inline std::optional<CMatrix> amplification_limit_at_infinity(const BlockMatrices& m) {
    LuFactorization lu(m.D);
    if (!lu.singular()) {
        CMatrix mb = lu.solve(m.B);
        mb *= cplx(-1.0, 0.0);
        return mb;
    }
    for (const cplx dir : {cplx(-1.0, 0.0), cplx(-0.766, 0.643)}) {
        try {
            const CMatrix near_ = amplification_matrix(m, 1e9 * dir);
            const CMatrix far_ = amplification_matrix(m, 1e11 * dir);
            double diff = 0.0;
            for (std::size_t i = 0; i < near_.rows(); ++i)
                for (std::size_t j = 0; j < near_.cols(); ++j)
                    diff = std::max(diff, std::abs(near_(i, j) - far_(i, j)));
            if (diff <= 1e-6 * std::max(1.0, far_.max_abs())) return far_;
            return std::nullopt;  // still varying: no finite limit
        } catch (const StructureError&) {
            continue;  // hit a resolvent pole along this direction
        }
    }
    return std::nullopt;
}

/// Power boundedness test: eigenvalues in the closed unit disk (tolerance
/// tol), and every near-unit-modulus eigenvalue either isolated from the rest
/// of the spectrum or rescued by an explicit power-boundedness probe.
/// Isolation alone would wrongly condemn semisimple clusters, and the methods
/// here produce exactly that: Adams amplification matrices approach the
/// identity as zeta -> 0.
inline bool is_root_stable(const CMatrix& m, double tol = kRootStabilityTol) {
    const cvector eig = eigenvalues(m);
    for (const auto& l : eig)
        if (std::abs(l) > 1.0 + tol) return false;
    for (std::size_t i = 0; i < eig.size(); ++i) {
        if (std::abs(eig[i]) < 1.0 - tol) continue;
        for (std::size_t j = 0; j < eig.size(); ++j) {
            if (j == i) continue;
            if (std::abs(eig[i] - eig[j]) < kEigenClusterRadius)
                return detail::powers_bounded(m);
        }
    }
    return true;
}

namespace detail {

/// Non-throwing variant used inside samplers: poles and root-finder failures
/// count as unstable points.
inline bool stable_at(const BlockMatrices& m, cplx zeta_r, double* rho_out = nullptr) {
    try {
        const CMatrix amp = amplification_matrix(m, zeta_r);
        if (rho_out) {
            const cvector eig = eigenvalues(amp);
            for (const auto& l : eig) *rho_out = std::max(*rho_out, std::abs(l));
        }
        return is_root_stable(amp);
    } catch (const StructureError&) {
        return false;
    } catch (const RootSolverError&) {
        return false;
    }
}

inline bool stable_matrix_nothrow(const CMatrix& m) {
    try {
        return is_root_stable(m);
    } catch (const RootSolverError&) {
        return false;
    }
}

/// Log-spaced moduli common to all ray tests (zeta in h-units).
inline std::vector<double> ray_moduli(int samples) {
    std::vector<double> out;
    out.reserve(samples);
    for (int i = 0; i < samples; ++i) {
        const double t = samples == 1 ? 0.0 : static_cast<double>(i) / (samples - 1);
        out.push_back(std::pow(10.0, -6.0 + 14.0 * t));
    }
    return out;
}

/// Test the ray arg(-zeta) = theta (upper half; the region is conjugate
/// symmetric for real-symmetric methods). Includes the zeta->infinity limit.
inline bool ray_stable(const BlockMatrices& m, double alpha, double theta_deg,
                       const std::vector<double>& moduli, double* rho_out, long* count) {
    const double phi = std::numbers::pi - theta_deg * std::numbers::pi / 180.0;
    const cplx dir(std::cos(phi), std::sin(phi));
    for (double rho : moduli) {
        ++*count;
        if (!stable_at(m, rho * dir / alpha, rho_out)) return false;
    }
    const auto inf = amplification_limit_at_infinity(m);
    if (!inf || !stable_matrix_nothrow(*inf)) return false;
    return true;
}

} // namespace detail

/// Measure the A(theta) stability angle by bisection over ray tests.
inline StabilityReport stability_angle(const BlockMatrices& m, double alpha,
                                       int ray_samples = 400, double bisect_tol_deg = 0.1) {
    StabilityReport rep;
    const std::vector<double> moduli = detail::ray_moduli(ray_samples);
    auto ray = [&](double theta) {
        return detail::ray_stable(m, alpha, theta, moduli, &rep.max_spectral_radius_sampled,
                                  &rep.samples);
    };

    rep.root_stable = ray(0.0);
    if (!rep.root_stable) {
        rep.angle_deg = 0.0;
        return rep;
    }
    if (ray(90.0)) {
        rep.angle_deg = 90.0;
        rep.a90 = true;
        return rep;
    }
    double lo = 0.0, hi = 90.0;  // lo stable, hi unstable
    while (hi - lo > bisect_tol_deg) {
        const double mid = 0.5 * (lo + hi);
        if (ray(mid)) lo = mid;
        else hi = mid;
    }
    rep.angle_deg = lo;
    // A(90) is a statement at the measurement resolution: rays inside the
    // bisection tolerance of the axis count as reaching it.
    rep.a90 = lo >= 90.0 - bisect_tol_deg;
    return rep;
}

inline StabilityReport stability_angle(const MethodSpec& spec, int ray_samples = 400,
                                       double bisect_tol_deg = 0.1) {
    const BuiltMethod built = build_method(spec);
    return stability_angle(built.matrices, spec.alpha, ray_samples, bisect_tol_deg);
}

/// Root stability of a built method at one alpha: zeta = 0, zeta -> infinity,
/// and a coarse sample of the open left half plane must all be power bounded.
inline bool root_stable_at_alpha(const BlockMatrices& m, double alpha) {
    if (!detail::stable_at(m, cplx{})) return false;
    const auto inf = amplification_limit_at_infinity(m);
    if (!inf || !detail::stable_matrix_nothrow(*inf)) return false;
    for (double theta : {15.0, 45.0, 75.0}) {
        const double phi = std::numbers::pi - theta * std::numbers::pi / 180.0;
        const cplx dir(std::cos(phi), std::sin(phi));
        for (int i = 0; i < 12; ++i) {
            const double rho = std::pow(10.0, -3.0 + 9.0 * i / 11.0);
            if (!detail::stable_at(m, rho * dir / alpha)) return false;
        }
    }
    return true;
}

/// Sweep the extrapolation factor over a grid, rebuilding the method at each
/// point. Grid points share nothing mutable; callers may parallelize.
inline AlphaSweep alpha_sweep(const MethodSpec& spec_template, const std::vector<double>& alphas,
                              int ray_samples = 120, double bisect_tol_deg = 0.25) {
    if (alphas.empty()) throw ConfigError("alpha sweep needs a non-empty grid");
    AlphaSweep sweep;
    sweep.alphas = alphas;
    for (double a : alphas) {
        if (!(a > 0.0)) throw ConfigError("alpha grid values must be positive");
        MethodSpec spec = spec_template;
        spec.alpha = a;
        const BuiltMethod built = build_method(spec);
        sweep.theta_deg.push_back(
            stability_angle(built.matrices, a, ray_samples, bisect_tol_deg).angle_deg);
        sweep.root_stable.push_back(root_stable_at_alpha(built.matrices, a));
    }
    for (std::size_t i = 0; i < sweep.root_stable.size();) {
        if (!sweep.root_stable[i]) { ++i; continue; }
        std::size_t j = i;
        while (j + 1 < sweep.root_stable.size() && sweep.root_stable[j + 1]) ++j;
        sweep.root_stable_intervals.emplace_back(alphas[i], alphas[j]);
        i = j + 1;
    }
    return sweep;
}

/// Per-cell root stability of M(zeta/alpha) over a rectangle of the zeta
/// plane (h-units), at cell centers.
inline RegionGrid region_grid(const BlockMatrices& m, double alpha, double re0, double re1,
                              double im0, double im1, int nx, int ny) {
    if (nx < 2 || ny < 2) throw ConfigError("region grid needs at least 2 points per axis");
    RegionGrid grid;
    for (int i = 0; i < nx; ++i) grid.re.push_back(re0 + (re1 - re0) * i / (nx - 1));
    for (int i = 0; i < ny; ++i) grid.im.push_back(im0 + (im1 - im0) * i / (ny - 1));
    grid.stable.assign(ny, std::vector<bool>(nx, false));
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix)
            grid.stable[iy][ix] = detail::stable_at(m, cplx(grid.re[ix], grid.im[iy]) / alpha);
    return grid;
}

} // namespace pbm
