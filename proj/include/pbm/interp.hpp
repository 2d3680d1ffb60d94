#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "pbm/errors.hpp"
#include "pbm/linalg.hpp"

namespace pbm {

enum class SlotPhase { Input, Output };
enum class SlotKind { Value, Derivative };

/// One of the 4q data slots of a block method. Derivative slots carry the
/// scaled derivative r*f. Flat layout: input values, input derivatives,
/// output values, output derivatives, each block node-ordered.
struct DataSlot {
    SlotPhase phase;
    SlotKind kind;
    int node;  // 1-based

    static int flat_index(SlotPhase phase, SlotKind kind, int node, int q) {
        int base = 0;
        if (phase == SlotPhase::Input) base = (kind == SlotKind::Value) ? 0 : q;
        else base = (kind == SlotKind::Value) ? 2 * q : 3 * q;
        return base + node - 1;
    }

    int flat(int q) const { return flat_index(phase, kind, node, q); }
};

/// A complex linear combination of the 4q data slots. Every interpolated
/// quantity in the library is one of these, so extracting block coefficients
/// is a reshape of the weight vector.
class LinearForm {
public:
    LinearForm() = default;
    explicit LinearForm(int q) : w_(static_cast<std::size_t>(4 * q), cplx{}) {}

    static LinearForm unit(int q, const DataSlot& slot) {
        LinearForm f(q);
        f.w_[slot.flat(q)] = 1.0;
        return f;
    }

    int slots() const { return static_cast<int>(w_.size()); }
    int q() const { return static_cast<int>(w_.size()) / 4; }

    cplx& operator[](int i) { return w_[i]; }
    const cplx& operator[](int i) const { return w_[i]; }

    cplx coeff(SlotPhase phase, SlotKind kind, int node) const {
        return w_[DataSlot::flat_index(phase, kind, node, q())];
    }

    LinearForm& operator+=(const LinearForm& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] += o.w_[i];
        return *this;
    }
    LinearForm& operator-=(const LinearForm& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] -= o.w_[i];
        return *this;
    }
    LinearForm& operator*=(cplx s) {
        for (auto& x : w_) x *= s;
        return *this;
    }
    friend LinearForm operator+(LinearForm a, const LinearForm& b) { return a += b; }
    friend LinearForm operator-(LinearForm a, const LinearForm& b) { return a -= b; }
    friend LinearForm operator*(cplx s, LinearForm a) { return a *= s; }

    void add_scaled(cplx s, const LinearForm& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] += s * o.w_[i];
    }

    /// Substitute concrete slot data into the form.
    cplx apply(const cvector& data) const {
        cplx s{};
        for (std::size_t i = 0; i < w_.size(); ++i) s += w_[i] * data[i];
        return s;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& x : w_) m = std::max(m, std::abs(x));
        return m;
    }

private:
    cvector w_;
};

/// Polynomial in tau whose monomial coefficients are LinearForms. Degree is
/// an upper bound; the leading form may be zero.
class SymbolicPoly {
public:
    SymbolicPoly() = default;
    SymbolicPoly(int q, int degree)
        : q_(q), coeffs_(static_cast<std::size_t>(degree) + 1, LinearForm(q)) {}

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    int q() const { return q_; }

    LinearForm& coeff(int k) { return coeffs_[k]; }
    const LinearForm& coeff(int k) const { return coeffs_[k]; }

    /// Horner evaluation; exactly linear in the data slots.
    LinearForm eval(cplx tau) const {
        LinearForm acc = coeffs_.back();
        for (int k = degree() - 1; k >= 0; --k) {
            acc *= tau;
            acc += coeffs_[k];
        }
        return acc;
    }

    /// Formal derivative; degree drops by one (never below zero).
    SymbolicPoly differentiate() const {
        SymbolicPoly out(q_, std::max(0, degree() - 1));
        if (degree() == 0) return out;  // zero polynomial
        for (int k = 1; k <= degree(); ++k) {
            out.coeffs_[k - 1] = coeffs_[k];
            out.coeffs_[k - 1] *= cplx(static_cast<double>(k), 0.0);
        }
        return out;
    }

    /// Integral of the polynomial from b to tau_end (path independent).
    LinearForm integrate_from(cplx b, cplx tau_end) const {
        LinearForm acc(q_);
        cplx pe = tau_end, pb = b;
        for (int k = 0; k <= degree(); ++k) {
            acc.add_scaled((pe - pb) / cplx(k + 1.0, 0.0), coeffs_[k]);
            pe *= tau_end;
            pb *= b;
        }
        return acc;
    }

private:
    int q_ = 0;
    std::vector<LinearForm> coeffs_;
};

/// A single interpolation condition: p(tau) = datum or p'(tau) = datum.
struct InterpCondition {
    cplx tau;
    SlotKind kind;
    LinearForm datum;
};

namespace detail {

inline std::string describe_conditions(const std::vector<InterpCondition>& conds) {
    std::ostringstream os;
    os << "{";
    for (std::size_t i = 0; i < conds.size(); ++i) {
        if (i) os << ", ";
        os << (conds[i].kind == SlotKind::Value ? "p(" : "p'(")
           << conds[i].tau.real() << (conds[i].tau.imag() < 0 ? "-" : "+")
           << std::abs(conds[i].tau.imag()) << "i)";
    }
    os << "}";
    return os.str();
}

} // namespace detail

/// Fit the unique polynomial of degree (#conditions - 1) satisfying mixed
/// value/derivative conditions. Solved in the scaled monomial basis
/// (tau/rho)^k via dense LU on the generalized Vandermonde matrix; a pivot
/// ratio below 1e-13 is reported as a poisedness failure.
inline SymbolicPoly hermite_birkhoff_fit(const std::vector<InterpCondition>& conditions) {
    if (conditions.empty()) throw ConfigError("interpolation requires at least one condition");
    const int m = static_cast<int>(conditions.size());
    const int q = conditions.front().datum.q();

    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (conditions[i].kind == conditions[j].kind &&
                std::abs(conditions[i].tau - conditions[j].tau) <= 1e-14)
                throw SingularFitError("duplicate interpolation condition at node " +
                                       detail::describe_conditions({conditions[i]}));

    double rho = 0.0;
    for (const auto& c : conditions) rho = std::max(rho, std::abs(c.tau));
    if (rho == 0.0) rho = 1.0;

    CMatrix vand(m, m);
    for (int i = 0; i < m; ++i) {
        const cplx t = conditions[i].tau / rho;
        if (conditions[i].kind == SlotKind::Value) {
            cplx p = 1.0;
            for (int k = 0; k < m; ++k) { vand(i, k) = p; p *= t; }
        } else {
            vand(i, 0) = 0.0;
            cplx p = 1.0;
            for (int k = 1; k < m; ++k) {
                vand(i, k) = cplx(static_cast<double>(k), 0.0) * p / rho;
                p *= t;
            }
        }
    }

    LuFactorization lu(vand);
    if (lu.singular())
        throw SingularFitError("interpolation conditions are not poised: " +
                               detail::describe_conditions(conditions));

    CMatrix rhs(m, 4 * q);
    for (int i = 0; i < m; ++i)
        for (int s = 0; s < 4 * q; ++s) rhs(i, s) = conditions[i].datum[s];
    const CMatrix sol = lu.solve(rhs);

    SymbolicPoly p(q, m - 1);
    double scale = 1.0;
    for (int k = 0; k < m; ++k) {
        for (int s = 0; s < 4 * q; ++s) p.coeff(k)[s] = sol(k, s) / scale;
        scale *= rho;
    }
    return p;
}

/// Lagrange fit: value conditions only.
inline SymbolicPoly lagrange_fit(const std::vector<InterpCondition>& conditions) {
    for (const auto& c : conditions)
        if (c.kind != SlotKind::Value)
            throw ConfigError("lagrange_fit accepts value conditions only");
    return hermite_birkhoff_fit(conditions);
}

} // namespace pbm
