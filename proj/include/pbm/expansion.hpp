#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "pbm/errors.hpp"
#include "pbm/interp.hpp"
#include "pbm/nodes.hpp"

namespace pbm {

enum class EndpointKind { FixedInput, VariableInput, Sweeping };

/// Expansion-point choice for Adams methods. FixedInput carries the node
/// index ell of the fixed anchor (in classical ordering).
struct EndpointStrategy {
    EndpointKind kind = EndpointKind::VariableInput;
    int ell = 1;
};

/// Per-output expansion point b_j and the single solution-value slot whose
/// constant polynomial serves as L_y. b_j always equals the anchor's
/// tau-coordinate: z_k for an input anchor, z_k + alpha for an output anchor.
struct ExpansionPlan {
    std::vector<cplx> b;
    std::vector<DataSlot> anchor;
};

namespace detail {

/// classical_position[j-1] = rank of node j when nodes are sorted top to bottom.
inline std::vector<int> classical_positions(const NodeSet& nodes) {
    std::vector<int> idx(nodes.q);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        return nodes.values[a].imag() > nodes.values[b].imag();
    });
    std::vector<int> pos(nodes.q);
    for (int rank = 0; rank < nodes.q; ++rank) pos[idx[rank]] = rank + 1;
    return pos;
}

/// The fixed-input pairing function, stated for classical ordering: outputs in
/// the upper half anchor at node ell, outputs in the lower half at its mirror.
inline int fixed_input_ind(int p, int q, int ell) {
    if (q % 2 == 0) return p <= q / 2 ? ell : q - ell + 1;
    const int mid = (q + 1) / 2;
    if (p < mid) return ell;
    if (p == mid) return mid;
    return q - ell + 1;
}

} // namespace detail

inline ExpansionPlan expansion_plan(const EndpointStrategy& strategy, const NodeSet& nodes,
                                    double alpha) {
    const int q = nodes.q;
    ExpansionPlan plan;
    plan.b.resize(q);
    plan.anchor.reserve(q);

    switch (strategy.kind) {
    case EndpointKind::VariableInput:
        for (int j = 1; j <= q; ++j) {
            plan.b[j - 1] = nodes.values[j - 1];
            plan.anchor.push_back({SlotPhase::Input, SlotKind::Value, j});
        }
        break;

    case EndpointKind::FixedInput: {
        if (strategy.ell < 1 || strategy.ell > q)
            throw ConfigError("fixed-input endpoint index ell=" + std::to_string(strategy.ell) +
                              " out of range 1.." + std::to_string(q));
        // The ind formula is stated for classical ordering; map each output to
        // its classical rank, apply it there, and map the anchor back.
        const std::vector<int> pos = detail::classical_positions(nodes);
        std::vector<int> at_rank(q + 1);
        for (int j = 1; j <= q; ++j) at_rank[pos[j - 1]] = j;
        for (int j = 1; j <= q; ++j) {
            const int anchor = at_rank[detail::fixed_input_ind(pos[j - 1], q, strategy.ell)];
            plan.b[j - 1] = nodes.values[anchor - 1];
            plan.anchor.push_back({SlotPhase::Input, SlotKind::Value, anchor});
        }
        break;
    }

    case EndpointKind::Sweeping: {
        if (nodes.ordering == NodeOrdering::Classical)
            throw ConfigError("sweeping endpoints require an inward or outward node ordering");
        const bool inward = nodes.ordering == NodeOrdering::Inward;
        for (int j = 1; j <= q; ++j) {
            cplx b;
            DataSlot anchor{};
            if (inward || q % 2 == 0) {
                if (j <= 2) {
                    b = nodes.values[j - 1];
                    anchor = {SlotPhase::Input, SlotKind::Value, j};
                } else if (q % 2 == 1 && j == q) {
                    // Odd inward sweeps end at the real node; integrate along the real line.
                    b = nodes.values[q - 1];
                    anchor = {SlotPhase::Input, SlotKind::Value, q};
                } else {
                    b = nodes.values[j - 3] + alpha;
                    anchor = {SlotPhase::Output, SlotKind::Value, j - 2};
                }
            } else {
                // Outward, q odd: start at the real node, as printed.
                if (j == 1) {
                    b = nodes.values[0];
                    anchor = {SlotPhase::Input, SlotKind::Value, 1};
                } else if (j <= 3) {
                    b = nodes.values[0] + alpha;
                    anchor = {SlotPhase::Output, SlotKind::Value, 1};
                } else {
                    b = nodes.values[j - 3];
                    anchor = {SlotPhase::Input, SlotKind::Value, j - 2};
                }
            }
            plan.b[j - 1] = b;
            plan.anchor.push_back(anchor);
        }
        break;
    }
    }
    return plan;
}

} // namespace pbm
