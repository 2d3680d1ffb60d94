#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pbm/builder.hpp"
#include "pbm/errors.hpp"
#include "pbm/serialize.hpp"

namespace pbm {

/// Wire form of a method recipe. Parses either the compact inline grammar
///   family:strategy:nodes:ordering:q=N:a=X[:ep=vi|fi|sweep][:l=L][:imp=di|ex|fi]
/// (e.g. "bdf:smfc:iequi:inward:q=4:a=0.5") or a JSON object with the same
/// fields. "bdf:K" with integer K selects the classical reference method.
struct MethodDescriptor {
    int classical_bdf_order = 0;  // nonzero selects the classical reference
    std::string family, strategy, node_family, ordering;
    int q = 0;
    double alpha = 0.0;
    std::string endpoints;  // "", "vi", "fi", "sweep"
    int ell = 0;
    std::string implicitness = "di";
};

namespace detail {

inline PolynomialFamily parse_family(const std::string& s) {
    if (s == "adams") return PolynomialFamily::Adams;
    if (s == "bdf") return PolynomialFamily::Bdf;
    if (s == "gbdf") return PolynomialFamily::Gbdf;
    throw ConfigError("family: expected adams|bdf|gbdf, got '" + s + "'");
}

inline IndexStrategy parse_strategy(const std::string& s) {
    if (s == "pmfc") return IndexStrategy::Pmfc;
    if (s == "smvc") return IndexStrategy::Smvc;
    if (s == "smfc") return IndexStrategy::Smfc;
    if (s == "pmfcmj") return IndexStrategy::Pmfcmj;
    if (s == "smfcmj") return IndexStrategy::Smfcmj;
    throw ConfigError("strategy: expected pmfc|smvc|smfc|pmfcmj|smfcmj, got '" + s + "'");
}

inline NodeFamily parse_node_family(const std::string& s) {
    if (s == "iequi") return NodeFamily::ImaginaryEquispaced;
    if (s == "icheb") return NodeFamily::ImaginaryChebyshev;
    throw ConfigError("nodes: expected iequi|icheb, got '" + s + "'");
}

inline NodeOrdering parse_ordering(const std::string& s) {
    if (s == "classical") return NodeOrdering::Classical;
    if (s == "inward") return NodeOrdering::Inward;
    if (s == "outward") return NodeOrdering::Outward;
    throw ConfigError("ordering: expected classical|inward|outward, got '" + s + "'");
}

inline Implicitness parse_implicitness(const std::string& s) {
    if (s == "di") return Implicitness::DiagonallyImplicit;
    if (s == "ex") return Implicitness::Explicit;
    if (s == "fi") return Implicitness::FullyImplicit;
    throw ConfigError("imp: expected di|ex|fi, got '" + s + "'");
}

inline bool is_integer(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

} // namespace detail

inline MethodDescriptor parse_descriptor(const std::string& text) {
    std::vector<std::string> tokens;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ':')) tokens.push_back(tok);
    if (tokens.size() < 2) throw ConfigError("descriptor: expected at least 'family:...' tokens");

    MethodDescriptor d;
    if (tokens.size() == 2 && tokens[0] == "bdf" && detail::is_integer(tokens[1])) {
        d.classical_bdf_order = std::stoi(tokens[1]);
        if (d.classical_bdf_order < 2 || d.classical_bdf_order > 6)
            throw ConfigError("classical bdf order must be in 2..6");
        return d;
    }

    if (tokens.size() < 4)
        throw ConfigError("descriptor: expected family:strategy:nodes:ordering:q=N:a=X");
    d.family = tokens[0];
    d.strategy = tokens[1];
    d.node_family = tokens[2];
    d.ordering = tokens[3];
    for (std::size_t i = 4; i < tokens.size(); ++i) {
        const auto eq = tokens[i].find('=');
        if (eq == std::string::npos)
            throw ConfigError("descriptor token '" + tokens[i] + "': expected key=value");
        const std::string key = tokens[i].substr(0, eq);
        const std::string value = tokens[i].substr(eq + 1);
        try {
            if (key == "q") d.q = std::stoi(value);
            else if (key == "a") d.alpha = std::stod(value);
            else if (key == "ep") d.endpoints = value;
            else if (key == "l") d.ell = std::stoi(value);
            else if (key == "imp") d.implicitness = value;
            else throw ConfigError("descriptor: unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw ConfigError("descriptor: bad value for '" + key + "': '" + value + "'");
        }
    }
    return d;
}

inline MethodDescriptor parse_descriptor_json(const json& j) {
    MethodDescriptor d;
    if (j.contains("classical_bdf")) {
        d.classical_bdf_order = j.at("classical_bdf").get<int>();
        return d;
    }
    auto field = [&](const char* name) -> std::string {
        if (!j.contains(name)) throw ConfigError(std::string("descriptor: missing field '") + name + "'");
        return j.at(name).get<std::string>();
    };
    d.family = field("family");
    d.strategy = field("strategy");
    d.node_family = field("nodes");
    d.ordering = field("ordering");
    if (!j.contains("q")) throw ConfigError("descriptor: missing field 'q'");
    if (!j.contains("alpha")) throw ConfigError("descriptor: missing field 'alpha'");
    d.q = j.at("q").get<int>();
    d.alpha = j.at("alpha").get<double>();
    if (j.contains("endpoints")) d.endpoints = j.at("endpoints").get<std::string>();
    if (j.contains("ell")) d.ell = j.at("ell").get<int>();
    if (j.contains("implicitness")) d.implicitness = j.at("implicitness").get<std::string>();
    return d;
}

/// Validate and materialize the full MethodSpec; throws field-precise
/// ConfigErrors. Classical descriptors have no MethodSpec.
inline MethodSpec to_method_spec(const MethodDescriptor& d) {
    if (d.classical_bdf_order != 0)
        throw ConfigError("classical reference methods have no block method spec");
    MethodSpec spec;
    spec.family = detail::parse_family(d.family);
    spec.strategy = detail::parse_strategy(d.strategy);
    spec.implicitness = detail::parse_implicitness(d.implicitness);
    if (d.q < 2) throw ConfigError("q: must be at least 2");
    if (!(d.alpha > 0.0)) throw ConfigError("a: extrapolation factor must be positive");
    spec.nodes = generate_nodes(detail::parse_node_family(d.node_family), d.q,
                                detail::parse_ordering(d.ordering));
    spec.alpha = d.alpha;

    if (spec.family == PolynomialFamily::Adams) {
        if (d.endpoints.empty())
            throw ConfigError("ep: Adams methods require an endpoint strategy (vi|fi|sweep)");
        EndpointStrategy ep;
        if (d.endpoints == "vi") ep.kind = EndpointKind::VariableInput;
        else if (d.endpoints == "fi") ep.kind = EndpointKind::FixedInput;
        else if (d.endpoints == "sweep") ep.kind = EndpointKind::Sweeping;
        else throw ConfigError("ep: expected vi|fi|sweep, got '" + d.endpoints + "'");
        if (ep.kind == EndpointKind::FixedInput) {
            if (d.ell < 1 || d.ell > d.q)
                throw ConfigError("l: fixed-input index must be in 1..q");
            ep.ell = d.ell;
        }
        spec.endpoints = ep;
    } else if (!d.endpoints.empty()) {
        throw ConfigError("ep: only Adams methods take an endpoint strategy");
    }
    return spec;
}

inline json descriptor_to_json(const MethodDescriptor& d) {
    json j;
    if (d.classical_bdf_order != 0) {
        j["classical_bdf"] = d.classical_bdf_order;
        return j;
    }
    j["family"] = d.family;
    j["strategy"] = d.strategy;
    j["nodes"] = d.node_family;
    j["ordering"] = d.ordering;
    j["q"] = d.q;
    j["alpha"] = d.alpha;
    if (!d.endpoints.empty()) j["endpoints"] = d.endpoints;
    if (d.ell > 0) j["ell"] = d.ell;
    j["implicitness"] = d.implicitness;
    return j;
}

} // namespace pbm
