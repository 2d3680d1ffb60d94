#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "pbm/builder.hpp"
#include "pbm/errors.hpp"

namespace pbm {

enum class MarkerClass {
    Inactive,
    ActiveValue,
    ActiveDerivative,
    ActiveBoth,
    Interpolated,
    EvaluationPoint,
    ExpansionPoint
};

struct StencilMarker {
    cplx pos;
    MarkerClass cls;
};

struct StencilPath {
    cplx from, to;
};

/// One stencil per output; shared tau-plane extent.
struct StencilScene {
    double re_min = -1.5, re_max = 1.5, im_min = -1.5, im_max = 1.5;
    std::vector<std::vector<StencilMarker>> stencils;
    std::vector<std::vector<StencilPath>> paths;
};

namespace detail {

inline StencilScene empty_scene(const BuiltMethod& built) {
    StencilScene scene;
    scene.re_min = -1.5;
    scene.re_max = built.spec.alpha + 1.5;
    scene.im_min = -1.5;
    scene.im_max = 1.5;
    scene.stencils.resize(built.spec.nodes.q);
    scene.paths.resize(built.spec.nodes.q);
    return scene;
}

inline bool contains_index(const std::vector<int>& v, int k) {
    return std::find(v.begin(), v.end(), k) != v.end();
}

} // namespace detail

/// Node diagram scene: active markers at the I(j) input and O(j) output
/// positions, inactive markers elsewhere, a hollow ring at the evaluation
/// point z_j + alpha.
inline StencilScene node_diagram_scene(const BuiltMethod& built) {
    StencilScene scene = detail::empty_scene(built);
    const NodeSet& nodes = built.spec.nodes;
    const double alpha = built.spec.alpha;
    for (int j = 1; j <= nodes.q; ++j) {
        auto& markers = scene.stencils[j - 1];
        for (int k = 1; k <= nodes.q; ++k) {
            markers.push_back({nodes.values[k - 1],
                               detail::contains_index(built.sets.I[j - 1], k)
                                   ? MarkerClass::ActiveValue
                                   : MarkerClass::Inactive});
            markers.push_back({nodes.values[k - 1] + alpha,
                               detail::contains_index(built.sets.O[j - 1], k)
                                   ? MarkerClass::ActiveValue
                                   : MarkerClass::Inactive});
        }
        markers.push_back({nodes.values[j - 1] + alpha, MarkerClass::EvaluationPoint});
    }
    return scene;
}

/// Expansion-point scene (Adams only): gray dataset nodes, a blue marker at
/// each endpoint b_j, and the directed integration path to z_j + alpha.
inline StencilScene expansion_diagram_scene(const BuiltMethod& built) {
    if (built.spec.family != PolynomialFamily::Adams || !built.plan)
        throw ConfigError("expansion diagrams apply to Adams methods only");
    StencilScene scene = detail::empty_scene(built);
    const NodeSet& nodes = built.spec.nodes;
    const double alpha = built.spec.alpha;
    for (int j = 1; j <= nodes.q; ++j) {
        auto& markers = scene.stencils[j - 1];
        for (int k = 1; k <= nodes.q; ++k) {
            markers.push_back({nodes.values[k - 1], MarkerClass::Inactive});
            markers.push_back({nodes.values[k - 1] + alpha, MarkerClass::Inactive});
        }
        const cplx b = built.plan->b[j - 1];
        const cplx eval = nodes.values[j - 1] + alpha;
        markers.push_back({b, MarkerClass::ExpansionPoint});
        markers.push_back({eval, MarkerClass::EvaluationPoint});
        scene.paths[j - 1].push_back({b, eval});
    }
    return scene;
}

/// Polynomial scenes: the interpolation roles of every datum. BDF/GBDF need
/// one scene for H_y; Adams methods need two (L_y and L_F).
inline std::vector<StencilScene> polynomial_diagram_scenes(const BuiltMethod& built) {
    const NodeSet& nodes = built.spec.nodes;
    const double alpha = built.spec.alpha;
    const int q = nodes.q;
    const bool explicit_method = built.spec.implicitness == Implicitness::Explicit;

    if (built.spec.family == PolynomialFamily::Adams) {
        StencilScene ly = detail::empty_scene(built);
        StencilScene lf = detail::empty_scene(built);
        for (int j = 1; j <= q; ++j) {
            const DataSlot& anchor = built.plan->anchor[j - 1];
            const cplx anchor_pos = anchor.phase == SlotPhase::Input
                                        ? nodes.values[anchor.node - 1]
                                        : nodes.values[anchor.node - 1] + alpha;
            for (int k = 1; k <= q; ++k) {
                const cplx zin = nodes.values[k - 1];
                const cplx zout = zin + alpha;
                ly.stencils[j - 1].push_back(
                    {zin, anchor.phase == SlotPhase::Input && anchor.node == k
                              ? MarkerClass::ActiveValue
                              : MarkerClass::Inactive});
                ly.stencils[j - 1].push_back(
                    {zout, anchor.phase == SlotPhase::Output && anchor.node == k
                               ? MarkerClass::ActiveValue
                               : MarkerClass::Inactive});
                lf.stencils[j - 1].push_back(
                    {zin, detail::contains_index(built.sets.I[j - 1], k)
                              ? MarkerClass::ActiveDerivative
                              : MarkerClass::Inactive});
                lf.stencils[j - 1].push_back(
                    {zout, detail::contains_index(built.sets.O[j - 1], k)
                               ? MarkerClass::ActiveDerivative
                               : MarkerClass::Inactive});
            }
            (void)anchor_pos;
            lf.stencils[j - 1].push_back({nodes.values[j - 1] + alpha, MarkerClass::EvaluationPoint});
        }
        return {ly, lf};
    }

    StencilScene hy = detail::empty_scene(built);
    for (int j = 1; j <= q; ++j) {
        const auto& I = built.sets.I[j - 1];
        const auto& B = built.sets.B[j - 1];
        const cplx eval = nodes.values[j - 1] + alpha;
        for (int k = 1; k <= q; ++k) {
            const cplx zin = nodes.values[k - 1];
            hy.stencils[j - 1].push_back({zin, detail::contains_index(I, k)
                                                   ? MarkerClass::ActiveValue
                                                   : MarkerClass::Inactive});
        }
        for (int k = 1; k <= q; ++k) {
            const cplx zout = nodes.values[k - 1] + alpha;
            MarkerClass cls = MarkerClass::Inactive;
            const bool value_cond = built.spec.family == PolynomialFamily::Bdf &&
                                    detail::contains_index(B, k);
            const bool deriv_cond =
                !explicit_method &&
                ((built.spec.family == PolynomialFamily::Bdf && k == j) ||
                 (built.spec.family == PolynomialFamily::Gbdf &&
                  detail::contains_index(built.sets.O[j - 1], k)));
            const bool gbdf_explicit_deriv = built.spec.family == PolynomialFamily::Gbdf &&
                                             explicit_method && detail::contains_index(B, k);
            if (value_cond && (deriv_cond || gbdf_explicit_deriv)) cls = MarkerClass::ActiveBoth;
            else if (value_cond) cls = MarkerClass::ActiveValue;
            else if (deriv_cond || gbdf_explicit_deriv) cls = MarkerClass::ActiveDerivative;
            hy.stencils[j - 1].push_back({zout, cls});
        }
        if (explicit_method) hy.stencils[j - 1].push_back({eval, MarkerClass::Interpolated});
        hy.stencils[j - 1].push_back({eval, MarkerClass::EvaluationPoint});
    }
    return {hy};
}

namespace detail {

inline void render_marker(std::string& out, double x, double y, MarkerClass cls) {
    char buf[256];
    switch (cls) {
    case MarkerClass::Inactive:
        std::snprintf(buf, sizeof buf,
                      "<circle class=\"inactive\" cx=\"%.2f\" cy=\"%.2f\" r=\"4\" fill=\"#b3b3b3\"/>\n",
                      x, y);
        break;
    case MarkerClass::ActiveValue:
        std::snprintf(buf, sizeof buf,
                      "<circle class=\"value\" cx=\"%.2f\" cy=\"%.2f\" r=\"5.5\" fill=\"#000\"/>\n",
                      x, y);
        break;
    case MarkerClass::ActiveDerivative:
        std::snprintf(buf, sizeof buf,
                      "<rect class=\"derivative\" x=\"%.2f\" y=\"%.2f\" width=\"10\" height=\"10\" "
                      "fill=\"#000\"/>\n",
                      x - 5.0, y - 5.0);
        break;
    case MarkerClass::ActiveBoth:
        std::snprintf(buf, sizeof buf,
                      "<rect class=\"both\" x=\"%.2f\" y=\"%.2f\" width=\"10\" height=\"10\" "
                      "fill=\"#000\" transform=\"rotate(45 %.2f %.2f)\"/>\n",
                      x - 5.0, y - 5.0, x, y);
        break;
    case MarkerClass::Interpolated:
        std::snprintf(buf, sizeof buf,
                      "<rect class=\"interpolated\" x=\"%.2f\" y=\"%.2f\" width=\"10\" height=\"10\" "
                      "fill=\"#fff\" stroke=\"#000\" stroke-dasharray=\"2,2\"/>\n",
                      x - 5.0, y - 5.0);
        break;
    case MarkerClass::EvaluationPoint:
        std::snprintf(buf, sizeof buf,
                      "<circle class=\"evaluation\" cx=\"%.2f\" cy=\"%.2f\" r=\"8.5\" fill=\"none\" "
                      "stroke=\"#000\" stroke-width=\"1.5\"/>\n",
                      x, y);
        break;
    case MarkerClass::ExpansionPoint:
        std::snprintf(buf, sizeof buf,
                      "<circle class=\"expansion\" cx=\"%.2f\" cy=\"%.2f\" r=\"5.5\" "
                      "fill=\"#1f77b4\"/>\n",
                      x, y);
        break;
    }
    out += buf;
}

} // namespace detail

/// Render a scene as standalone SVG 1.1 text, one sub-stencil per output,
/// byte deterministic for a fixed scene.
inline std::string render_svg(const StencilScene& scene) {
    const double unit = 40.0;  // pixels per tau unit
    const double pad = 12.0;
    const double w = (scene.re_max - scene.re_min) * unit;
    const double h = (scene.im_max - scene.im_min) * unit;
    const int count = static_cast<int>(scene.stencils.size());
    const double total_w = count * (w + pad) + pad;
    const double total_h = h + 2 * pad;

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    char head[256];
    std::snprintf(head, sizeof head,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%.0f\" "
                  "height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                  total_w, total_h, total_w, total_h);
    out += head;
    out += "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" "
           "markerWidth=\"7\" markerHeight=\"7\" orient=\"auto-start-reverse\">"
           "<path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#1f77b4\"/></marker></defs>\n";

    for (int s = 0; s < count; ++s) {
        const double ox = pad + s * (w + pad);
        char open[128];
        std::snprintf(open, sizeof open, "<g transform=\"translate(%.2f,%.2f)\">\n", ox, pad);
        out += open;

        auto px = [&](cplx z) { return (z.real() - scene.re_min) * unit; };
        auto py = [&](cplx z) { return (scene.im_max - z.imag()) * unit; };

        // frame and axes
        char frame[384];
        std::snprintf(frame, sizeof frame,
                      "<rect x=\"0\" y=\"0\" width=\"%.2f\" height=\"%.2f\" fill=\"none\" "
                      "stroke=\"#ddd\"/>\n"
                      "<line x1=\"%.2f\" y1=\"0\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#eee\"/>\n"
                      "<line x1=\"0\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#eee\"/>\n",
                      w, h, px(cplx{}), px(cplx{}), h, py(cplx{}), w, py(cplx{}));
        out += frame;

        for (const auto& path : scene.paths[s]) {
            char line[256];
            std::snprintf(line, sizeof line,
                          "<line class=\"path\" x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                          "stroke=\"#1f77b4\" stroke-width=\"1.5\" marker-end=\"url(#arrow)\"/>\n",
                          px(path.from), py(path.from), px(path.to), py(path.to));
            out += line;
        }
        for (const auto& marker : scene.stencils[s])
            detail::render_marker(out, px(marker.pos), py(marker.pos), marker.cls);
        out += "</g>\n";
    }
    out += "</svg>\n";
    return out;
}

inline std::string node_diagram(const BuiltMethod& built) {
    return render_svg(node_diagram_scene(built));
}

inline std::string expansion_diagram(const BuiltMethod& built) {
    return render_svg(expansion_diagram_scene(built));
}

/// One SVG for BDF/GBDF (H_y), two for Adams (L_y then L_F).
inline std::vector<std::string> polynomial_diagram(const BuiltMethod& built) {
    std::vector<std::string> out;
    for (const auto& scene : polynomial_diagram_scenes(built)) out.push_back(render_svg(scene));
    return out;
}

} // namespace pbm
