#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "pbm/errors.hpp"
#include "pbm/linalg.hpp"

namespace pbm {

/// Coefficients of the characteristic polynomial of a square matrix via the
/// Faddeev-LeVerrier recursion. Returns monic coefficients c so that
/// p(x) = x^n + c[n-1] x^(n-1) + ... + c[0]. Accurate enough at the q <= 12
/// sizes used here.
inline cvector characteristic_polynomial(const CMatrix& a) {
    const std::size_t n = a.rows();
    cvector coeff(n, cplx{});
    CMatrix m = a;
    cplx c = m.trace();
    if (n >= 1) coeff[n - 1] = -c;
    CMatrix work = m;
    for (std::size_t k = 2; k <= n; ++k) {
        for (std::size_t i = 0; i < n; ++i) work(i, i) -= c;
        work = a * work;
        c = work.trace() / cplx(static_cast<double>(k), 0.0);
        coeff[n - k] = -c;
    }
    return coeff;
}

/// All roots of a monic polynomial by the Aberth-Ehrlich simultaneous
/// iteration. Coefficients as in characteristic_polynomial.
inline cvector aberth_roots(const cvector& coeff, double tol = 1e-12, int max_iter = 200) {
    const int n = static_cast<int>(coeff.size());
    if (n == 0) return {};
    if (n == 1) return {-coeff[0]};

    // Cauchy bound: all roots inside |z| <= 1 + max|c_k|.
    double bound = 0.0;
    for (const auto& c : coeff) bound = std::max(bound, std::abs(c));
    const double radius = 0.5 * (1.0 + bound) + 0.5;

    cvector z(n);
    for (int i = 0; i < n; ++i) {
        const double phi = 2.0 * std::numbers::pi * i / n + 0.4;
        z[i] = radius * cplx(std::cos(phi), std::sin(phi));
    }

    auto eval_with_derivative = [&](cplx x, cplx& p, cplx& dp) {
        p = 1.0;
        dp = 0.0;
        for (int k = n - 1; k >= 0; --k) {
            dp = dp * x + p;
            p = p * x + coeff[k];
        }
    };

    // Backward-stable residual floor: |p(x)| below eps * sum |c_k||x|^k means x
    // is a root of a polynomial within coefficient roundoff. Clustered roots
    // stall the step criterion, so both tests are needed.
    auto residual_floor = [&](cplx x) {
        const double ax = std::abs(x);
        double s = 1.0;
        for (int k = n - 1; k >= 0; --k) s = s * ax + std::abs(coeff[k]);
        return 4.0 * n * std::numeric_limits<double>::epsilon() * s;
    };

    for (int iter = 0; iter < max_iter; ++iter) {
        double max_step = 0.0;
        for (int i = 0; i < n; ++i) {
            cplx p, dp;
            eval_with_derivative(z[i], p, dp);
            if (std::abs(p) <= residual_floor(z[i])) continue;
            cplx w = dp == cplx{} ? cplx{} : p / dp;
            cplx sum{};
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                const cplx d = z[i] - z[j];
                if (std::abs(d) < 1e-300) continue;
                sum += 1.0 / d;
            }
            cplx denom = 1.0 - w * sum;
            cplx step = std::abs(denom) < 1e-300 ? w : w / denom;
            z[i] -= step;
            max_step = std::max(max_step, std::abs(step) / (1.0 + std::abs(z[i])));
        }
        if (max_step <= tol) return z;
    }
    throw RootSolverError("polynomial root iteration did not converge", max_iter);
}

/// Two-sided diagonal balancing by powers of two (norm equalization per
/// row/column pair), improving the conditioning of the characteristic
/// polynomial. Similarity transform: eigenvalues unchanged.
inline CMatrix balance_matrix(CMatrix a) {
    const std::size_t n = a.rows();
    bool converged = false;
    for (int sweep = 0; sweep < 6 && !converged; ++sweep) {
        converged = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                r += std::abs(a(i, j));
                c += std::abs(a(j, i));
            }
            if (r == 0.0 || c == 0.0) continue;
            double f = 1.0;
            while (c < r / 2.0) { c *= 2.0; r /= 2.0; f *= 2.0; }
            while (c > r * 2.0) { c /= 2.0; r *= 2.0; f /= 2.0; }
            if (f != 1.0) {
                converged = false;
                for (std::size_t j = 0; j < n; ++j) a(i, j) /= f;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
    return a;
}

/// Eigenvalues of a small dense complex matrix. The matrix is shifted by the
/// mean eigenvalue first: when the spectrum is a tight cluster (amplification
/// matrices near zeta = 0 are close to the identity), the characteristic
/// polynomial of the shifted matrix carries the splitting at its own scale
/// instead of losing it to eps^(1/n) root noise around the cluster center.
inline cvector eigenvalues(const CMatrix& a, double tol = 1e-12, int max_iter = 200) {
    const std::size_t n = a.rows();
    const cplx mu = a.trace() / cplx(static_cast<double>(n), 0.0);
    CMatrix shifted = a;
    for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= mu;
    cvector roots = aberth_roots(characteristic_polynomial(balance_matrix(shifted)), tol, max_iter);
    for (auto& r : roots) r += mu;
    return roots;
}

} // namespace pbm
