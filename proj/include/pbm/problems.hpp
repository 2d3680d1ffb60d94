#pragma once

#include <cmath>
#include <memory>
#include <numbers>

#include "pbm/integrator.hpp"
#include "pbm/linalg.hpp"

namespace pbm {

/// y' = lambda y with y(t0) = 1.
inline Problem dahlquist_problem(cplx lambda) {
    Problem p;
    p.dimension = 1;
    p.name = "dahlquist";
    p.real_analytic = lambda.imag() == 0.0;
    p.rhs = [lambda](cplx, const cvector& y) { return cvector{lambda * y[0]}; };
    p.jacobian = [lambda](cplx, const cvector&) {
        CMatrix j(1, 1);
        j(0, 0) = lambda;
        return j;
    };
    p.exact = [lambda](double t) { return cvector{std::exp(lambda * cplx(t, 0.0))}; };
    return p;
}

/// Prothero-Robinson: y' = lambda (y - sin t) + cos t, started on the smooth
/// branch y = sin t. The solution is entire, so complex-time sampling is safe.
inline Problem prothero_robinson_problem(double lambda) {
    Problem p;
    p.dimension = 1;
    p.name = "prothero";
    p.real_analytic = true;
    p.rhs = [lambda](cplx t, const cvector& y) {
        return cvector{lambda * (y[0] - std::sin(t)) + std::cos(t)};
    };
    p.jacobian = [lambda](cplx, const cvector&) {
        CMatrix j(1, 1);
        j(0, 0) = lambda;
        return j;
    };
    p.exact = [](double t) { return cvector{cplx(std::sin(t), 0.0)}; };
    return p;
}

/// Viscous Burgers via second-order central differences on [0, 1] with
/// homogeneous Dirichlet boundaries.
struct BurgersConfig {
    double nu = 3e-4;
    int interior_points = 256;
};

inline cvector burgers_initial_condition(const BurgersConfig& cfg) {
    const int n = cfg.interior_points;
    const double dx = 1.0 / (n + 1);
    cvector u(n);
    for (int i = 1; i <= n; ++i) {
        const double x = i * dx;
        const double s = std::sin(3.0 * std::numbers::pi * x);
        u[i - 1] = cplx(s * s * std::pow(1.0 - x, 1.5), 0.0);
    }
    return u;
}

inline Problem burgers_problem(const BurgersConfig& cfg = {}) {
    if (cfg.interior_points < 8) throw ConfigError("Burgers grid needs at least 8 interior points");
    const int n = cfg.interior_points;
    const double dx = 1.0 / (n + 1);
    const double nu = cfg.nu;

    Problem p;
    p.dimension = n;
    p.name = "burgers";
    p.real_analytic = true;
    p.bandwidth = 1;  // tridiagonal Jacobian
    p.rhs = [n, dx, nu](cplx, const cvector& u) {
        cvector out(n);
        for (int i = 0; i < n; ++i) {
            const cplx um = i > 0 ? u[i - 1] : cplx{};
            const cplx up = i < n - 1 ? u[i + 1] : cplx{};
            out[i] = nu * (um - 2.0 * u[i] + up) / (dx * dx) - u[i] * (up - um) / (2.0 * dx);
        }
        return out;
    };
    p.jacobian = [n, dx, nu](cplx, const cvector& u) {
        CMatrix j(n, n);
        for (int i = 0; i < n; ++i) {
            const cplx um = i > 0 ? u[i - 1] : cplx{};
            const cplx up = i < n - 1 ? u[i + 1] : cplx{};
            j(i, i) = -2.0 * nu / (dx * dx) - (up - um) / (2.0 * dx);
            if (i > 0) j(i, i - 1) = nu / (dx * dx) + u[i] / (2.0 * dx);
            if (i < n - 1) j(i, i + 1) = nu / (dx * dx) - u[i] / (2.0 * dx);
        }
        return j;
    };
    return p;
}

/// Complexified nonlinear Schroedinger on [-4 pi, 4 pi] with a dense Fourier
/// spectral second-derivative matrix. State is the stacked pair (a, b) of the
/// real and imaginary solution components:
///   a_t = -D2 b - (a^2 b + b^3),   b_t = D2 a + (a^3 + a b^2).
struct NlsConfig {
    int modes = 64;  // even
};

/// Dense real circulant second-derivative matrix for the periodic domain.
inline CMatrix nls_spectral_d2(int n) {
    const double length = 8.0 * std::numbers::pi;
    std::vector<double> row(n, 0.0);
    for (int d = 0; d < n; ++d) {
        double s = 0.0;
        for (int k = 1; k <= n / 2; ++k) {
            const double kphys = 2.0 * std::numbers::pi * k / length;
            const double weight = (k == n / 2) ? 1.0 : 2.0;
            s += weight * (-kphys * kphys) * std::cos(2.0 * std::numbers::pi * k * d / n);
        }
        row[d] = s / n;
    }
    CMatrix d2(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d2(i, j) = row[(i - j + n) % n];
    return d2;
}

inline cvector nls_initial_condition(const NlsConfig& cfg) {
    const int n = cfg.modes;
    const double length = 8.0 * std::numbers::pi;
    cvector state(2 * n);
    for (int i = 0; i < n; ++i) {
        const double x = -4.0 * std::numbers::pi + length * i / n;
        const cplx u = 1.0 + std::exp(kI * (x / 4.0)) / 100.0;
        state[i] = cplx(u.real(), 0.0);
        state[n + i] = cplx(u.imag(), 0.0);
    }
    return state;
}

inline Problem nls_problem(const NlsConfig& cfg = {}) {
    if (cfg.modes < 4 || cfg.modes % 2 != 0)
        throw ConfigError("NLS mode count must be even and at least 4");
    const int n = cfg.modes;
    auto d2 = std::make_shared<CMatrix>(nls_spectral_d2(n));

    Problem p;
    p.dimension = 2 * n;
    p.name = "nls";
    p.real_analytic = true;
    p.rhs = [n, d2](cplx, const cvector& s) {
        cvector out(2 * n);
        for (int i = 0; i < n; ++i) {
            cplx d2a{}, d2b{};
            for (int j = 0; j < n; ++j) {
                d2a += (*d2)(i, j) * s[j];
                d2b += (*d2)(i, j) * s[n + j];
            }
            const cplx a = s[i], b = s[n + i];
            out[i] = -d2b - (a * a * b + b * b * b);
            out[n + i] = d2a + (a * a * a + a * b * b);
        }
        return out;
    };
    p.jacobian = [n, d2](cplx, const cvector& s) {
        CMatrix j(2 * n, 2 * n);
        for (int i = 0; i < n; ++i) {
            const cplx a = s[i], b = s[n + i];
            for (int k = 0; k < n; ++k) {
                j(i, n + k) = -(*d2)(i, k);
                j(n + i, k) = (*d2)(i, k);
            }
            j(i, i) += -2.0 * a * b;
            j(i, n + i) += -(a * a + 3.0 * b * b);
            j(n + i, i) += 3.0 * a * a + b * b;
            j(n + i, n + i) += 2.0 * a * b;
        }
        return j;
    };
    return p;
}

} // namespace pbm
