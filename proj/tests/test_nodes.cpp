#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "pbm/nodes.hpp"

using namespace pbm;
using Catch::Approx;

namespace {

bool near(cplx a, cplx b, double tol = 1e-14) { return std::abs(a - b) <= tol; }

void require_nodeset_invariants(const NodeSet& nodes) {
    for (const auto& z : nodes.values) REQUIRE(std::abs(z.real()) <= 1e-14);
    for (int j = 0; j < nodes.q; ++j)
        for (int k = j + 1; k < nodes.q; ++k)
            REQUIRE(std::abs(nodes.values[j] - nodes.values[k]) > 1e-14);
    for (const auto& z : nodes.values) {
        bool has_conj = false;
        for (const auto& w : nodes.values)
            if (near(w, std::conj(z))) has_conj = true;
        REQUIRE(has_conj);
    }
    for (int j = 0; j + 1 < nodes.q; ++j) {
        const cplx a = nodes.values[j], b = nodes.values[j + 1];
        switch (nodes.ordering) {
        case NodeOrdering::Classical:
            REQUIRE(a.imag() > b.imag());
            break;
        case NodeOrdering::Inward:
            if (std::abs(std::abs(a) - std::abs(b)) > 1e-14) REQUIRE(std::abs(a) > std::abs(b));
            else REQUIRE(a.imag() > b.imag());
            break;
        case NodeOrdering::Outward:
            if (std::abs(std::abs(a) - std::abs(b)) > 1e-14) REQUIRE(std::abs(a) < std::abs(b));
            else REQUIRE(a.imag() > b.imag());
            break;
        }
    }
}

} // namespace

TEST_CASE("equispaced classical q=4 reproduces the figure nodes", "[nodes]") {
    const NodeSet n = generate_nodes(NodeFamily::ImaginaryEquispaced, 4, NodeOrdering::Classical);
    REQUIRE(near(n.values[0], cplx(0, 1)));
    REQUIRE(near(n.values[1], cplx(0, 1.0 / 3.0), 1e-15));
    REQUIRE(near(n.values[2], cplx(0, -1.0 / 3.0), 1e-15));
    REQUIRE(near(n.values[3], cplx(0, -1)));
}

TEST_CASE("chebyshev classical q=3", "[nodes]") {
    const NodeSet n = generate_nodes(NodeFamily::ImaginaryChebyshev, 3, NodeOrdering::Classical);
    REQUIRE(near(n.values[0], cplx(0, 1)));
    REQUIRE(near(n.values[1], cplx(0, 0)));
    REQUIRE(near(n.values[2], cplx(0, -1)));
}

TEST_CASE("equispaced inward q=5 sweeps upper-first", "[nodes]") {
    const NodeSet n = generate_nodes(NodeFamily::ImaginaryEquispaced, 5, NodeOrdering::Inward);
    REQUIRE(near(n.values[0], cplx(0, 1)));
    REQUIRE(near(n.values[1], cplx(0, -1)));
    REQUIRE(near(n.values[2], cplx(0, 0.5)));
    REQUIRE(near(n.values[3], cplx(0, -0.5)));
    REQUIRE(near(n.values[4], cplx(0, 0)));
}

TEST_CASE("generate_nodes rejects bad input", "[nodes]") {
    REQUIRE_THROWS_AS(generate_nodes(NodeFamily::ImaginaryEquispaced, 1, NodeOrdering::Classical),
                      ConfigError);
    REQUIRE_THROWS_AS(generate_nodes(NodeFamily::Custom, 4, NodeOrdering::Classical), ConfigError);
}

TEST_CASE("all orderings are permutations of each other and hold invariants", "[nodes]") {
    for (NodeFamily fam : {NodeFamily::ImaginaryEquispaced, NodeFamily::ImaginaryChebyshev}) {
        for (int q = 2; q <= 12; ++q) {
            std::vector<cvector> sorted_values;
            for (NodeOrdering ord :
                 {NodeOrdering::Classical, NodeOrdering::Inward, NodeOrdering::Outward}) {
                const NodeSet n = generate_nodes(fam, q, ord);
                REQUIRE(n.q == q);
                require_nodeset_invariants(n);
                cvector v = n.values;
                std::sort(v.begin(), v.end(),
                          [](cplx a, cplx b) { return a.imag() < b.imag(); });
                sorted_values.push_back(v);
            }
            for (std::size_t i = 1; i < sorted_values.size(); ++i)
                for (int k = 0; k < q; ++k)
                    REQUIRE(near(sorted_values[0][k], sorted_values[i][k]));
        }
    }
}

TEST_CASE("chi matches the printed piecewise table", "[nodes]") {
    REQUIRE(chi(ChiDirection::In, 4, 4, NodeOrdering::Inward) == 3);
    REQUIRE(chi(ChiDirection::In, 1, 5, NodeOrdering::Inward) == 1);
    REQUIRE(chi(ChiDirection::In, 3, 5, NodeOrdering::Outward) == 2);
    REQUIRE(chi(ChiDirection::Out, 3, 5, NodeOrdering::Inward) == 1);
    REQUIRE(chi(ChiDirection::Out, 4, 6, NodeOrdering::Inward) == 2);
    REQUIRE_THROWS_AS(chi(ChiDirection::In, 1, 4, NodeOrdering::Classical), ConfigError);
}

TEST_CASE("chi stays within bounds on every sweeping case", "[nodes]") {
    for (int q = 2; q <= 12; ++q)
        for (int j = 1; j <= q; ++j)
            for (NodeOrdering ord : {NodeOrdering::Inward, NodeOrdering::Outward}) {
                const int in = chi(ChiDirection::In, j, q, ord);
                const int out = chi(ChiDirection::Out, j, q, ord);
                REQUIRE(in >= 1);
                REQUIRE(in <= q);
                REQUIRE(out >= 1);
                REQUIRE(out <= q);
                if (ord == NodeOrdering::Inward) {
                    REQUIRE(in <= j);
                    REQUIRE(out <= 2);
                }
            }
}

TEST_CASE("conjugate pairing of classical q=4", "[nodes]") {
    const NodeSet n = generate_nodes(NodeFamily::ImaginaryEquispaced, 4, NodeOrdering::Classical);
    const ConjugatePairing p = conjugate_pairing(n);
    REQUIRE(p.pairs == std::vector<std::pair<int, int>>{{1, 4}, {2, 3}});
    REQUIRE(p.self_conjugate.empty());
}

TEST_CASE("conjugate pairing with a zero node", "[nodes]") {
    const NodeSet n = make_custom_node_set({cplx(0, 1), cplx(0, -1), cplx(0, 0)},
                                           NodeOrdering::Classical);
    const ConjugatePairing p = conjugate_pairing(n);
    REQUIRE(p.pairs == std::vector<std::pair<int, int>>{{1, 3}});
    REQUIRE(p.self_conjugate == std::vector<int>{2});
}

TEST_CASE("conjugate pairing of inward q=5", "[nodes]") {
    const NodeSet n = generate_nodes(NodeFamily::ImaginaryEquispaced, 5, NodeOrdering::Inward);
    const ConjugatePairing p = conjugate_pairing(n);
    REQUIRE(p.pairs == std::vector<std::pair<int, int>>{{1, 2}, {3, 4}});
    REQUIRE(p.self_conjugate == std::vector<int>{5});
}

TEST_CASE("custom sets must be conjugate closed", "[nodes]") {
    REQUIRE_THROWS_AS(make_custom_node_set({cplx(0, 1), cplx(0, 0.5)}, NodeOrdering::Classical),
                      StructureError);
    REQUIRE_THROWS_AS(make_custom_node_set({cplx(0.2, 1), cplx(0.2, -1)}, NodeOrdering::Classical),
                      StructureError);
}

TEST_CASE("group availability matches chi_in - 1 on sweeping orderings", "[nodes]") {
    for (NodeFamily fam : {NodeFamily::ImaginaryEquispaced, NodeFamily::ImaginaryChebyshev})
        for (int q = 2; q <= 8; ++q)
            for (NodeOrdering ord : {NodeOrdering::Inward, NodeOrdering::Outward}) {
                const NodeSet n = generate_nodes(fam, q, ord);
                const std::vector<int> avail = outputs_available_before(n);
                for (int j = 1; j <= q; ++j)
                    REQUIRE(avail[j] == chi(ChiDirection::In, j, q, ord) - 1);
            }
}
