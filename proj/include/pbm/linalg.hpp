#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "pbm/errors.hpp"

namespace pbm {

using cplx = std::complex<double>;
using cvector = std::vector<cplx>;

inline constexpr cplx kI{0.0, 1.0};

/// z^k by repeated multiplication; std::pow(complex, int) NaNs at z = 0.
inline cplx ipow(cplx z, int k) {
    cplx r = 1.0;
    for (int i = 0; i < k; ++i) r *= z;
    return r;
}

/// Dense row-major complex matrix. Sized for the small systems in this
/// library (method matrices q <= 12, desk-scale Jacobians).
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

    static CMatrix identity(std::size_t n) {
        CMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    cplx* data() { return data_.data(); }
    const cplx* data() const { return data_.data(); }

    CMatrix operator*(const CMatrix& other) const {
        CMatrix out(rows_, other.cols_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t k = 0; k < cols_; ++k) {
                const cplx a = (*this)(i, k);
                if (a == cplx{}) continue;
                for (std::size_t j = 0; j < other.cols_; ++j) out(i, j) += a * other(k, j);
            }
        }
        return out;
    }

    cvector operator*(const cvector& v) const {
        cvector out(rows_, cplx{});
        for (std::size_t i = 0; i < rows_; ++i) {
            cplx s{};
            for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
            out[i] = s;
        }
        return out;
    }

    CMatrix& operator+=(const CMatrix& other) {
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
        return *this;
    }

    CMatrix& operator*=(cplx s) {
        for (auto& x : data_) x *= s;
        return *this;
    }

    cplx trace() const {
        cplx t{};
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& x : data_) m = std::max(m, std::abs(x));
        return m;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    cvector data_;
};

/// LU factorization with partial pivoting. Exposes the pivot-magnitude ratio
/// used as the library-wide singularity test.
class LuFactorization {
public:
    explicit LuFactorization(CMatrix a) : lu_(std::move(a)), perm_(lu_.rows()) {
        const std::size_t n = lu_.rows();
        for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t piv = k;
            double best = std::abs(lu_(k, k));
            for (std::size_t i = k + 1; i < n; ++i) {
                const double v = std::abs(lu_(i, k));
                if (v > best) { best = v; piv = i; }
            }
            if (piv != k) {
                for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
                std::swap(perm_[k], perm_[piv]);
            }
            const cplx pivot = lu_(k, k);
            if (std::abs(pivot) == 0.0) continue;  // leaves an exactly singular U
            for (std::size_t i = k + 1; i < n; ++i) {
                const cplx m = lu_(i, k) / pivot;
                lu_(i, k) = m;
                if (m == cplx{}) continue;
                for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= m * lu_(k, j);
            }
        }
    }

    /// min|u_kk| / max|u_kk|; zero for an exactly singular matrix.
    double pivot_ratio() const {
        const std::size_t n = lu_.rows();
        if (n == 0) return 1.0;
        double mn = std::abs(lu_(0, 0)), mx = mn;
        for (std::size_t k = 1; k < n; ++k) {
            const double v = std::abs(lu_(k, k));
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        return mx == 0.0 ? 0.0 : mn / mx;
    }

    bool singular(double tol = 1e-13) const { return pivot_ratio() < tol; }

    cvector solve(const cvector& b) const {
        const std::size_t n = lu_.rows();
        cvector x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu_(i, j) * x[j];
            x[i] /= lu_(i, i);
        }
        return x;
    }

    /// Solve A X = B column by column.
    CMatrix solve(const CMatrix& b) const {
        const std::size_t n = lu_.rows();
        CMatrix x(n, b.cols());
        cvector col(n);
        for (std::size_t j = 0; j < b.cols(); ++j) {
            for (std::size_t i = 0; i < n; ++i) col[i] = b(i, j);
            cvector sol = solve(col);
            for (std::size_t i = 0; i < n; ++i) x(i, j) = sol[i];
        }
        return x;
    }

private:
    CMatrix lu_;
    std::vector<std::size_t> perm_;
};

/// Banded LU with partial pivoting, LAPACK-style storage with fill-in room.
/// Used by the Newton solver when a problem declares a Jacobian bandwidth.
class BandedLu {
public:
    BandedLu(const CMatrix& a, std::size_t lower, std::size_t upper)
        : n_(a.rows()), kl_(lower), ku_(upper),
          ab_((2 * lower + upper + 1) * a.rows(), cplx{}), perm_(a.rows()) {
        // row index kl+ku+i-j within column j
        for (std::size_t j = 0; j < n_; ++j) {
            const std::size_t ilo = j > ku_ ? j - ku_ : 0;
            const std::size_t ihi = std::min(n_ - 1, j + kl_);
            for (std::size_t i = ilo; i <= ihi; ++i) at(kl_ + ku_ + i - j, j) = a(i, j);
        }
        factorize();
    }

    cvector solve(const cvector& b) const {
        cvector x = b;
        for (std::size_t k = 0; k < n_; ++k) {
            if (perm_[k] != k) std::swap(x[k], x[perm_[k]]);
            const std::size_t ihi = std::min(n_ - 1, k + kl_);
            for (std::size_t i = k + 1; i <= ihi && k + 1 <= ihi; ++i)
                x[i] -= at(kl_ + ku_ + i - k, k) * x[k];
        }
        // Back substitution on U, whose bandwidth is kl+ku after fill-in.
        for (std::size_t k = n_; k-- > 0;) {
            cplx s = x[k];
            const std::size_t jhi = std::min(n_ - 1, k + kl_ + ku_);
            for (std::size_t j = k + 1; j <= jhi; ++j) s -= at(kl_ + ku_ + k - j, j) * x[j];
            x[k] = s / at(kl_ + ku_, k);
        }
        return x;
    }

    bool singular(double tol = 1e-13) const {
        double mn = std::abs(at(kl_ + ku_, 0)), mx = mn;
        for (std::size_t k = 1; k < n_; ++k) {
            const double v = std::abs(at(kl_ + ku_, k));
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        return mx == 0.0 || mn / mx < tol;
    }

private:
    cplx& at(std::size_t r, std::size_t c) { return ab_[c * (2 * kl_ + ku_ + 1) + r]; }
    const cplx& at(std::size_t r, std::size_t c) const { return ab_[c * (2 * kl_ + ku_ + 1) + r]; }

    void factorize() {
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t ihi = std::min(n_ - 1, k + kl_);
            std::size_t piv = k;
            double best = std::abs(at(kl_ + ku_ + 0, k));
            for (std::size_t i = k + 1; i <= ihi && k + 1 <= ihi; ++i) {
                const double v = std::abs(at(kl_ + ku_ + i - k, k));
                if (v > best) { best = v; piv = i; }
            }
            perm_[k] = piv;
            if (piv != k) {
                const std::size_t jhi = std::min(n_ - 1, k + kl_ + ku_);
                for (std::size_t j = k; j <= jhi; ++j)
                    std::swap(at(kl_ + ku_ + k - j, j), at(kl_ + ku_ + piv - j, j));
            }
            const cplx pivot = at(kl_ + ku_, k);
            if (std::abs(pivot) == 0.0) continue;
            for (std::size_t i = k + 1; i <= ihi && k + 1 <= ihi; ++i) {
                const cplx m = at(kl_ + ku_ + i - k, k) / pivot;
                at(kl_ + ku_ + i - k, k) = m;
                if (m == cplx{}) continue;
                const std::size_t jhi = std::min(n_ - 1, k + kl_ + ku_);
                for (std::size_t j = k + 1; j <= jhi; ++j)
                    at(kl_ + ku_ + i - j, j) -= m * at(kl_ + ku_ + k - j, j);
            }
        }
    }

    std::size_t n_, kl_, ku_;
    cvector ab_;
    std::vector<std::size_t> perm_;
};

inline double inf_norm(const cvector& v) {
    double m = 0.0;
    for (const auto& x : v) m = std::max(m, std::abs(x));
    return m;
}

inline bool all_finite(const cvector& v) {
    for (const auto& x : v)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
}

} // namespace pbm
