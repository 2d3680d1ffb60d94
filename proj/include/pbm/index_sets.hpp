#pragma once

#include <string>
#include <vector>

#include "pbm/errors.hpp"
#include "pbm/nodes.hpp"

namespace pbm {

enum class IndexStrategy { Pmfc, Smvc, Smfc, Pmfcmj, Smfcmj };
enum class Implicitness { Explicit, DiagonallyImplicit, FullyImplicit };

inline bool is_serial(IndexStrategy s) {
    return s == IndexStrategy::Smvc || s == IndexStrategy::Smfc || s == IndexStrategy::Smfcmj;
}

inline std::string strategy_name(IndexStrategy s) {
    switch (s) {
    case IndexStrategy::Pmfc: return "PMFC";
    case IndexStrategy::Smvc: return "SMVC";
    case IndexStrategy::Smfc: return "SMFC";
    case IndexStrategy::Pmfcmj: return "PMFCmj";
    case IndexStrategy::Smfcmj: return "SMFCmj";
    }
    return "?";
}

/// Active input/output index sets per output, 1-based and ascending.
/// I(j): input nodes the jth polynomial may draw data from.
/// B(j): output nodes available before implicitness is applied.
/// O(j): output nodes after the implicitness rule.
struct ActiveIndexSets {
    std::vector<std::vector<int>> I, B, O;
};

/// Outputs already completed when output j starts, for a serial sweep that
/// finishes one conjugate group (a pair, or the real node) before the next.
/// Equals chi_in(j) - 1 for both sweeping orderings. Keeping whole groups on
/// each side is what admits conjugate output polynomials.
inline int completed_outputs_before(int j, int q, NodeOrdering ordering) {
    if (ordering == NodeOrdering::Inward) return (j % 2 == 1) ? j - 1 : j - 2;
    // Outward: the real node leads the sweep when q is odd.
    if (q % 2 == 1) return (j % 2 == 0) ? j - 1 : std::max(0, j - 2);
    return (j % 2 == 1) ? j - 1 : j - 2;
}

inline ActiveIndexSets active_index_sets(IndexStrategy strategy, int q, NodeOrdering ordering,
                                         Implicitness implicitness) {
    if (is_serial(strategy) && ordering == NodeOrdering::Classical)
        throw ConfigError(strategy_name(strategy) +
                          " requires an inward or outward node ordering");

    ActiveIndexSets sets;
    sets.I.resize(q);
    sets.B.resize(q);
    sets.O.resize(q);

    for (int j = 1; j <= q; ++j) {
        const int avail = is_serial(strategy) ? completed_outputs_before(j, q, ordering) : 0;
        std::vector<int>& inputs = sets.I[j - 1];
        std::vector<int>& before = sets.B[j - 1];

        switch (strategy) {
        case IndexStrategy::Pmfc:
            for (int k = 1; k <= q; ++k) inputs.push_back(k);
            break;
        case IndexStrategy::Pmfcmj:
            for (int k = 1; k <= q; ++k)
                if (k != j) inputs.push_back(k);
            break;
        case IndexStrategy::Smvc:
            for (int k = 1; k <= q; ++k) inputs.push_back(k);
            for (int k = 1; k <= avail; ++k) before.push_back(k);
            break;
        case IndexStrategy::Smfc:
            for (int k = avail + 1; k <= q; ++k) inputs.push_back(k);
            for (int k = 1; k <= avail; ++k) before.push_back(k);
            break;
        case IndexStrategy::Smfcmj:
            for (int k = avail + 1; k <= q; ++k)
                if (k != j) inputs.push_back(k);
            for (int k = 1; k <= avail; ++k) before.push_back(k);
            break;
        }

        std::vector<int>& outputs = sets.O[j - 1];
        switch (implicitness) {
        case Implicitness::Explicit:
            outputs = before;
            break;
        case Implicitness::DiagonallyImplicit:
            outputs = before;
            outputs.push_back(j);
            std::sort(outputs.begin(), outputs.end());
            break;
        case Implicitness::FullyImplicit:
            for (int k = 1; k <= q; ++k) outputs.push_back(k);
            break;
        }
    }
    return sets;
}

} // namespace pbm
