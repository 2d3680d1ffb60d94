#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "pbm/errors.hpp"
#include "pbm/linalg.hpp"

namespace pbm {

enum class NodeFamily { ImaginaryEquispaced, ImaginaryChebyshev, Custom };
enum class NodeOrdering { Classical, Inward, Outward };

/// Absolute tolerance for node equality, conjugation and zero detection.
inline constexpr double kNodeTol = 1e-14;

/// An ordered set of purely imaginary, real-symmetric nodes in local
/// tau-coordinates. The ordering determines the serial sweep direction.
struct NodeSet {
    int q = 0;
    cvector values;
    NodeFamily family = NodeFamily::Custom;
    NodeOrdering ordering = NodeOrdering::Classical;
};

/// Conjugate structure of a node set: (j, k) index pairs with z_j = conj(z_k),
/// plus the self-conjugate indices (z = 0). Indices are 1-based.
struct ConjugatePairing {
    std::vector<std::pair<int, int>> pairs;
    std::vector<int> self_conjugate;

    /// Permutation sending each index to its conjugate partner (itself if real).
    std::vector<int> partner_of(int q) const {
        std::vector<int> p(static_cast<std::size_t>(q) + 1, 0);
        for (auto [a, b] : pairs) { p[a] = b; p[b] = a; }
        for (int s : self_conjugate) p[s] = s;
        return p;
    }
};

namespace detail {

inline void apply_ordering(cvector& z, NodeOrdering ordering) {
    // Ties in |z| are broken upper-half-plane first (Im descending).
    switch (ordering) {
    case NodeOrdering::Classical:
        std::sort(z.begin(), z.end(), [](cplx a, cplx b) { return a.imag() > b.imag(); });
        break;
    case NodeOrdering::Inward:
        std::sort(z.begin(), z.end(), [](cplx a, cplx b) {
            const double ma = std::abs(a), mb = std::abs(b);
            if (std::abs(ma - mb) > kNodeTol) return ma > mb;
            return a.imag() > b.imag();
        });
        break;
    case NodeOrdering::Outward:
        std::sort(z.begin(), z.end(), [](cplx a, cplx b) {
            const double ma = std::abs(a), mb = std::abs(b);
            if (std::abs(ma - mb) > kNodeTol) return ma < mb;
            return a.imag() > b.imag();
        });
        break;
    }
}

inline void validate_real_symmetric(const cvector& z) {
    const int q = static_cast<int>(z.size());
    for (const auto& v : z)
        if (std::abs(v.real()) > kNodeTol)
            throw StructureError("node set is not purely imaginary");
    for (int j = 0; j < q; ++j)
        for (int k = j + 1; k < q; ++k)
            if (std::abs(z[j] - z[k]) <= kNodeTol)
                throw StructureError("node set has duplicate nodes");
    for (int j = 0; j < q; ++j) {
        bool found = false;
        for (int k = 0; k < q && !found; ++k)
            if (std::abs(z[j] - std::conj(z[k])) <= kNodeTol) found = true;
        if (!found) throw StructureError("node set is not conjugate closed");
    }
}

} // namespace detail

/// Generate q imaginary equispaced or Chebyshev nodes in the given ordering.
/// Base values span [-i, i]; the set is built symmetrically so that conjugate
/// closure is exact and a middle node is exactly zero.
inline NodeSet generate_nodes(NodeFamily family, int q, NodeOrdering ordering) {
    if (q < 2) throw ConfigError("node count q must be at least 2 (got " + std::to_string(q) + ")");
    if (q > 12) throw ConfigError("node count q must be at most 12 (got " + std::to_string(q) + ")");
    if (family == NodeFamily::Custom)
        throw ConfigError("generate_nodes supports only the named node families");

    std::vector<double> upper;  // strictly positive imaginary parts, descending
    for (int j = 1; j <= q / 2; ++j) {
        double a;
        if (family == NodeFamily::ImaginaryEquispaced) {
            a = 1.0 - 2.0 * (j - 1) / (q - 1.0);
        } else {
            a = std::cos(std::numbers::pi * (j - 1) / (q - 1.0));
        }
        upper.push_back(a);
    }

    cvector z;
    for (double a : upper) z.emplace_back(0.0, a);
    if (q % 2 == 1) z.emplace_back(0.0, 0.0);
    for (auto it = upper.rbegin(); it != upper.rend(); ++it) z.emplace_back(0.0, -*it);

    detail::apply_ordering(z, ordering);
    return NodeSet{q, std::move(z), family, ordering};
}

/// Wrap externally supplied nodes, validating real-symmetry, and sort them
/// into the requested ordering.
inline NodeSet make_custom_node_set(cvector values, NodeOrdering ordering) {
    if (values.size() < 2) throw ConfigError("node count q must be at least 2");
    detail::validate_real_symmetric(values);
    detail::apply_ordering(values, ordering);
    return NodeSet{static_cast<int>(values.size()), std::move(values), NodeFamily::Custom, ordering};
}

enum class ChiDirection { In, Out };

/// The piecewise shift functions for sweeping orderings.
/// chi_in(j) is the first retained input index; chi_out feeds the B(j) sets.
inline int chi(ChiDirection direction, int j, int q, NodeOrdering ordering) {
    if (j < 1 || j > q) throw ConfigError("chi index j out of range");
    const bool parity_match = (q % 2) == (j % 2);
    switch (ordering) {
    case NodeOrdering::Inward:
        if (direction == ChiDirection::In) return (j % 2 == 1) ? j : j - 1;
        return (j % 2 == 1) ? 1 : 2;
    case NodeOrdering::Outward:
        if (direction == ChiDirection::In) return parity_match ? std::max(1, j - 1) : j;
        return parity_match ? 1 : 2;
    case NodeOrdering::Classical:
        break;
    }
    throw ConfigError("chi functions are defined only for inward/outward orderings");
}

/// Pair up conjugate nodes. Requires the NodeSet invariants to hold.
inline ConjugatePairing conjugate_pairing(const NodeSet& nodes) {
    detail::validate_real_symmetric(nodes.values);
    ConjugatePairing out;
    std::vector<bool> used(nodes.values.size(), false);
    for (int j = 0; j < nodes.q; ++j) {
        if (used[j]) continue;
        if (std::abs(nodes.values[j]) <= kNodeTol) {
            out.self_conjugate.push_back(j + 1);
            used[j] = true;
            continue;
        }
        for (int k = j + 1; k < nodes.q; ++k) {
            if (used[k]) continue;
            if (std::abs(nodes.values[j] - std::conj(nodes.values[k])) <= kNodeTol) {
                out.pairs.emplace_back(j + 1, k + 1);
                used[j] = used[k] = true;
                break;
            }
        }
        if (!used[j]) throw StructureError("node " + std::to_string(j + 1) + " has no conjugate partner");
    }
    return out;
}

/// Conjugate groups in index order: each group is either a conjugate pair
/// (two adjacent indices) or a singleton real node. Serial sweeps complete a
/// group before the next one starts, which is what makes conjugate outputs
/// possible; the number of outputs available to output j is the total size of
/// all groups preceding j's group.
inline std::vector<int> outputs_available_before(const NodeSet& nodes) {
    std::vector<int> avail(nodes.q + 1, 0);
    int start = 0;
    while (start < nodes.q) {
        const bool self = std::abs(nodes.values[start]) <= kNodeTol;
        const int size = self ? 1 : 2;
        if (!self) {
            if (start + 1 >= nodes.q ||
                std::abs(nodes.values[start] - std::conj(nodes.values[start + 1])) > kNodeTol)
                throw StructureError("nodes are not grouped in adjacent conjugate pairs");
        }
        for (int j = start; j < start + size; ++j) avail[j + 1] = start;
        start += size;
    }
    return avail;  // avail[j] = number of outputs completed before j's group
}

} // namespace pbm
