#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "pbm/errors.hpp"
#include "pbm/expansion.hpp"
#include "pbm/index_sets.hpp"
#include "pbm/interp.hpp"
#include "pbm/nodes.hpp"

namespace pbm {

enum class PolynomialFamily { Adams, Bdf, Gbdf };

inline std::string family_name(PolynomialFamily f) {
    switch (f) {
    case PolynomialFamily::Adams: return "Adams";
    case PolynomialFamily::Bdf: return "BDF";
    case PolynomialFamily::Gbdf: return "GBDF";
    }
    return "?";
}

/// The full recipe for one polynomial block method.
struct MethodSpec {
    PolynomialFamily family = PolynomialFamily::Bdf;
    IndexStrategy strategy = IndexStrategy::Pmfc;
    Implicitness implicitness = Implicitness::DiagonallyImplicit;
    NodeSet nodes;
    double alpha = 0.5;
    std::optional<EndpointStrategy> endpoints;  // Adams only
};

/// Block coefficient matrices of y' = f stepped as
///   y[n+1] = A y[n] + r B f[n] + C y[n+1] + r D f[n+1].
struct BlockMatrices {
    int q = 0;
    CMatrix A, B, C, D;
};

/// A constructed method: matrices plus the index sets and expansion plan that
/// produced them (needed by the integrator and the diagram emitters).
struct BuiltMethod {
    MethodSpec spec;
    ActiveIndexSets sets;
    std::optional<ExpansionPlan> plan;
    BlockMatrices matrices;
};

namespace detail {

/// Slots each family's construction may legitimately touch for output j.
/// Everything else in the row must come out exactly zero.
struct AllowedSlots {
    std::vector<bool> mask;
    explicit AllowedSlots(int q) : mask(static_cast<std::size_t>(4 * q), false) {}
    void allow(SlotPhase ph, SlotKind k, int node, int q) {
        mask[DataSlot::flat_index(ph, k, node, q)] = true;
    }
};

inline void check_and_snap(LinearForm& row, const AllowedSlots& allowed, int j) {
    for (int s = 0; s < row.slots(); ++s) {
        if (allowed.mask[s]) continue;
        if (std::abs(row[s]) > 1e-13 * std::max(1.0, row.max_abs()))
            throw StructureError("output " + std::to_string(j) +
                                 ": coefficient appeared on a slot outside the active sets");
        row[s] = 0.0;
    }
}

/// Lagrange polynomial through the derivative data at inputs `ins` and
/// outputs `outs` (the L_F of Adams methods and of interpolated derivatives).
inline SymbolicPoly derivative_interpolant(const NodeSet& nodes, double alpha,
                                           const std::vector<int>& ins,
                                           const std::vector<int>& outs) {
    std::vector<InterpCondition> conds;
    for (int k : ins)
        conds.push_back({nodes.values[k - 1], SlotKind::Value,
                         LinearForm::unit(nodes.q, {SlotPhase::Input, SlotKind::Derivative, k})});
    for (int k : outs)
        conds.push_back({nodes.values[k - 1] + alpha, SlotKind::Value,
                         LinearForm::unit(nodes.q, {SlotPhase::Output, SlotKind::Derivative, k})});
    return lagrange_fit(conds);
}

} // namespace detail

/// Assemble the block coefficient matrices for a method spec. Each output row
/// is the LinearForm of its ODE polynomial evaluated at z_j + alpha, reshaped
/// into columns of (A | B | C | D).
inline BuiltMethod build_method(const MethodSpec& spec) {
    const NodeSet& nodes = spec.nodes;
    const int q = nodes.q;
    const double alpha = spec.alpha;

    if (!(alpha > 0.0)) throw ConfigError("extrapolation factor alpha must be positive");
    if (spec.family == PolynomialFamily::Adams && !spec.endpoints)
        throw ConfigError("Adams methods require an endpoint strategy");
    if (spec.family != PolynomialFamily::Adams && spec.endpoints)
        throw ConfigError(family_name(spec.family) + " methods carry no endpoint strategy");

    BuiltMethod built;
    built.spec = spec;
    built.sets = active_index_sets(spec.strategy, q, nodes.ordering, spec.implicitness);

    if (spec.family == PolynomialFamily::Adams) {
        built.plan = expansion_plan(*spec.endpoints, nodes, alpha);
        for (int j = 1; j <= q; ++j) {
            const DataSlot& anchor = built.plan->anchor[j - 1];
            if (anchor.phase == SlotPhase::Output) {
                const auto& O = built.sets.O[j - 1];
                if (std::find(O.begin(), O.end(), anchor.node) == O.end())
                    throw ConfigError("output " + std::to_string(j) +
                                      ": sweeping endpoint anchors an output outside O(j); "
                                      "this endpoint choice needs a serial strategy");
            }
        }
    }

    BlockMatrices m;
    m.q = q;
    m.A = CMatrix(q, q);
    m.B = CMatrix(q, q);
    m.C = CMatrix(q, q);
    m.D = CMatrix(q, q);

    for (int j = 1; j <= q; ++j) {
        const std::vector<int>& I = built.sets.I[j - 1];
        const std::vector<int>& B = built.sets.B[j - 1];
        const std::vector<int>& O = built.sets.O[j - 1];
        const cplx eval_point = nodes.values[j - 1] + alpha;

        LinearForm row(q);
        detail::AllowedSlots allowed(q);

        try {
            switch (spec.family) {
            case PolynomialFamily::Adams: {
                const SymbolicPoly lf = detail::derivative_interpolant(nodes, alpha, I, O);
                row = LinearForm::unit(q, built.plan->anchor[j - 1]);
                row += lf.integrate_from(built.plan->b[j - 1], eval_point);
                const DataSlot& anchor = built.plan->anchor[j - 1];
                allowed.allow(anchor.phase, anchor.kind, anchor.node, q);
                for (int k : I) allowed.allow(SlotPhase::Input, SlotKind::Derivative, k, q);
                for (int k : O) allowed.allow(SlotPhase::Output, SlotKind::Derivative, k, q);
                break;
            }
            case PolynomialFamily::Bdf: {
                std::vector<int> value_outputs = B;
                if (spec.implicitness == Implicitness::FullyImplicit) {
                    value_outputs.clear();
                    for (int k = 1; k <= q; ++k)
                        if (k != j) value_outputs.push_back(k);
                }
                std::vector<InterpCondition> conds;
                for (int k : I)
                    conds.push_back({nodes.values[k - 1], SlotKind::Value,
                                     LinearForm::unit(q, {SlotPhase::Input, SlotKind::Value, k})});
                for (int k : value_outputs)
                    conds.push_back({nodes.values[k - 1] + alpha, SlotKind::Value,
                                     LinearForm::unit(q, {SlotPhase::Output, SlotKind::Value, k})});
                if (spec.implicitness == Implicitness::Explicit) {
                    const SymbolicPoly lf = detail::derivative_interpolant(nodes, alpha, I, O);
                    conds.push_back({eval_point, SlotKind::Derivative, lf.eval(eval_point)});
                    for (int k : I) allowed.allow(SlotPhase::Input, SlotKind::Derivative, k, q);
                    for (int k : O) allowed.allow(SlotPhase::Output, SlotKind::Derivative, k, q);
                } else {
                    conds.push_back({eval_point, SlotKind::Derivative,
                                     LinearForm::unit(q, {SlotPhase::Output, SlotKind::Derivative, j})});
                    allowed.allow(SlotPhase::Output, SlotKind::Derivative, j, q);
                }
                for (int k : I) allowed.allow(SlotPhase::Input, SlotKind::Value, k, q);
                for (int k : value_outputs) allowed.allow(SlotPhase::Output, SlotKind::Value, k, q);
                row = hermite_birkhoff_fit(conds).eval(eval_point);
                break;
            }
            case PolynomialFamily::Gbdf: {
                std::vector<InterpCondition> conds;
                for (int k : I)
                    conds.push_back({nodes.values[k - 1], SlotKind::Value,
                                     LinearForm::unit(q, {SlotPhase::Input, SlotKind::Value, k})});
                if (spec.implicitness == Implicitness::Explicit) {
                    const SymbolicPoly lf = detail::derivative_interpolant(nodes, alpha, I, O);
                    for (int k : B)
                        conds.push_back({nodes.values[k - 1] + alpha, SlotKind::Derivative,
                                         LinearForm::unit(q, {SlotPhase::Output, SlotKind::Derivative, k})});
                    conds.push_back({eval_point, SlotKind::Derivative, lf.eval(eval_point)});
                    for (int k : I) allowed.allow(SlotPhase::Input, SlotKind::Derivative, k, q);
                    for (int k : O) allowed.allow(SlotPhase::Output, SlotKind::Derivative, k, q);
                } else {
                    for (int k : O)
                        conds.push_back({nodes.values[k - 1] + alpha, SlotKind::Derivative,
                                         LinearForm::unit(q, {SlotPhase::Output, SlotKind::Derivative, k})});
                    for (int k : O) allowed.allow(SlotPhase::Output, SlotKind::Derivative, k, q);
                }
                for (int k : I) allowed.allow(SlotPhase::Input, SlotKind::Value, k, q);
                row = hermite_birkhoff_fit(conds).eval(eval_point);
                break;
            }
            }
        } catch (const SingularFitError& e) {
            throw SingularFitError("output " + std::to_string(j) + ": " + e.what());
        }

        detail::check_and_snap(row, allowed, j);
        if (std::abs(row.coeff(SlotPhase::Output, SlotKind::Value, j)) != 0.0)
            throw StructureError("output " + std::to_string(j) +
                                 " references its own output value");

        for (int k = 1; k <= q; ++k) {
            m.A(j - 1, k - 1) = row.coeff(SlotPhase::Input, SlotKind::Value, k);
            m.B(j - 1, k - 1) = row.coeff(SlotPhase::Input, SlotKind::Derivative, k);
            m.C(j - 1, k - 1) = row.coeff(SlotPhase::Output, SlotKind::Value, k);
            m.D(j - 1, k - 1) = row.coeff(SlotPhase::Output, SlotKind::Derivative, k);
        }
    }

    built.matrices = std::move(m);
    return built;
}

/// Substitute exact data sampled from y(t) = t^k (with t_n = 0, r = 1) into
/// row j and compare with the exact output value.
inline double monomial_reproduction_error(const BuiltMethod& built, int j, int k) {
    const NodeSet& nodes = built.spec.nodes;
    const int q = nodes.q;
    const double alpha = built.spec.alpha;
    cvector data(static_cast<std::size_t>(4 * q));
    for (int n = 1; n <= q; ++n) {
        const cplx zin = nodes.values[n - 1];
        const cplx zout = zin + alpha;
        data[DataSlot::flat_index(SlotPhase::Input, SlotKind::Value, n, q)] = ipow(zin, k);
        data[DataSlot::flat_index(SlotPhase::Output, SlotKind::Value, n, q)] = ipow(zout, k);
        data[DataSlot::flat_index(SlotPhase::Input, SlotKind::Derivative, n, q)] =
            k == 0 ? cplx{} : cplx(static_cast<double>(k)) * ipow(zin, k - 1);
        data[DataSlot::flat_index(SlotPhase::Output, SlotKind::Derivative, n, q)] =
            k == 0 ? cplx{} : cplx(static_cast<double>(k)) * ipow(zout, k - 1);
    }
    cplx got{};
    for (int n = 1; n <= q; ++n) {
        got += built.matrices.A(j - 1, n - 1) * data[DataSlot::flat_index(SlotPhase::Input, SlotKind::Value, n, q)];
        got += built.matrices.B(j - 1, n - 1) * data[DataSlot::flat_index(SlotPhase::Input, SlotKind::Derivative, n, q)];
        got += built.matrices.C(j - 1, n - 1) * data[DataSlot::flat_index(SlotPhase::Output, SlotKind::Value, n, q)];
        got += built.matrices.D(j - 1, n - 1) * data[DataSlot::flat_index(SlotPhase::Output, SlotKind::Derivative, n, q)];
    }
    const cplx want = ipow(nodes.values[j - 1] + alpha, k);
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

/// Largest k such that row j reproduces data sampled from y(t) = t^k for all
/// degrees up to k, found by sweeping upward until failure.
inline std::vector<int> exactness_degree(const BuiltMethod& built, double rel_tol = 1e-9,
                                         int k_cap = -1) {
    const int q = built.spec.nodes.q;
    if (k_cap < 0) k_cap = 2 * q + 6;
    std::vector<int> degrees(q, 0);
    for (int j = 1; j <= q; ++j) {
        int k = 0;
        while (k + 1 <= k_cap && monomial_reproduction_error(built, j, k + 1) <= rel_tol) ++k;
        degrees[j - 1] = k;
    }
    return degrees;
}

/// Condition counting gives the degree each family's construction must reach.
inline std::vector<int> theoretical_exactness_degree(const BuiltMethod& built) {
    const int q = built.spec.nodes.q;
    std::vector<int> out(q, 0);
    for (int j = 1; j <= q; ++j) {
        const int ni = static_cast<int>(built.sets.I[j - 1].size());
        const int nb = static_cast<int>(built.sets.B[j - 1].size());
        const int no = static_cast<int>(built.sets.O[j - 1].size());
        switch (built.spec.family) {
        case PolynomialFamily::Adams: out[j - 1] = ni + no; break;
        case PolynomialFamily::Bdf:
            out[j - 1] = built.spec.implicitness == Implicitness::FullyImplicit ? ni + q - 1
                                                                                : ni + nb;
            break;
        case PolynomialFamily::Gbdf: out[j - 1] = ni + no - 1; break;
        }
    }
    return out;
}

/// Check the conjugate-row symmetry of the matrices: row j must equal the
/// conjugate of its partner row with columns permuted by the pairing.
inline std::pair<bool, double> verify_conjugate_structure(const BlockMatrices& m,
                                                          const ConjugatePairing& pairing,
                                                          double tol = 1e-12) {
    const std::vector<int> partner = pairing.partner_of(m.q);
    double dev = 0.0;
    auto check = [&](const CMatrix& x) {
        for (int j = 1; j <= m.q; ++j) {
            const int pj = partner[j];
            for (int k = 1; k <= m.q; ++k)
                dev = std::max(dev,
                               std::abs(x(j - 1, k - 1) - std::conj(x(pj - 1, partner[k] - 1))));
        }
    };
    check(m.A);
    check(m.B);
    check(m.C);
    check(m.D);
    return {dev <= tol, dev};
}

} // namespace pbm
