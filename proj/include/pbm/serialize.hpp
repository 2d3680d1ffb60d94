#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pbm/builder.hpp"
#include "pbm/convergence.hpp"
#include "pbm/integrator.hpp"
#include "pbm/nodes.hpp"
#include "pbm/stability.hpp"

namespace pbm {

using json = nlohmann::json;

inline std::string node_family_name(NodeFamily f) {
    switch (f) {
    case NodeFamily::ImaginaryEquispaced: return "iequi";
    case NodeFamily::ImaginaryChebyshev: return "icheb";
    case NodeFamily::Custom: return "custom";
    }
    return "?";
}

inline std::string ordering_name(NodeOrdering o) {
    switch (o) {
    case NodeOrdering::Classical: return "classical";
    case NodeOrdering::Inward: return "inward";
    case NodeOrdering::Outward: return "outward";
    }
    return "?";
}

inline std::string implicitness_name(Implicitness i) {
    switch (i) {
    case Implicitness::Explicit: return "explicit";
    case Implicitness::DiagonallyImplicit: return "diagonally-implicit";
    case Implicitness::FullyImplicit: return "fully-implicit";
    }
    return "?";
}

inline json to_json(const NodeSet& nodes) {
    json j;
    j["family"] = node_family_name(nodes.family);
    j["ordering"] = ordering_name(nodes.ordering);
    j["q"] = nodes.q;
    std::vector<double> re, im;
    for (const auto& z : nodes.values) {
        re.push_back(z.real());
        im.push_back(z.imag());
    }
    j["re"] = re;
    j["im"] = im;
    return j;
}

inline json matrix_to_json(const CMatrix& m) {
    std::vector<double> re, im;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t k = 0; k < m.cols(); ++k) {
            re.push_back(m(i, k).real());
            im.push_back(m(i, k).imag());
        }
    return json{{"re", re}, {"im", im}};
}

inline json to_json(const BlockMatrices& m, double alpha) {
    json j;
    j["q"] = m.q;
    j["alpha"] = alpha;
    j["A"] = matrix_to_json(m.A);
    j["B"] = matrix_to_json(m.B);
    j["C"] = matrix_to_json(m.C);
    j["D"] = matrix_to_json(m.D);
    return j;
}

inline json to_json(const StabilityReport& r) {
    json j;
    j["angle_deg"] = r.angle_deg;
    j["a90"] = r.a90;
    j["root_stable"] = r.root_stable;
    j["max_spectral_radius"] = r.max_spectral_radius_sampled;
    j["samples"] = r.samples;
    return j;
}

inline json to_json(const AlphaSweep& s) {
    json j;
    j["alphas"] = s.alphas;
    j["theta_deg"] = s.theta_deg;
    j["root_stable"] = std::vector<bool>(s.root_stable.begin(), s.root_stable.end());
    json intervals = json::array();
    for (const auto& [lo, hi] : s.root_stable_intervals) intervals.push_back({lo, hi});
    j["root_stable_intervals"] = intervals;
    return j;
}

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

/// One CSV per matrix: q rows, complex entries as paired re/im columns.
inline std::string matrix_to_csv(const CMatrix& m) {
    std::string out;
    for (std::size_t k = 0; k < m.cols(); ++k) {
        if (k) out += ",";
        out += "c" + std::to_string(k + 1) + "_re,c" + std::to_string(k + 1) + "_im";
    }
    out += "\n";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t k = 0; k < m.cols(); ++k) {
            if (k) out += ",";
            out += detail::fmt_double(m(i, k).real()) + "," + detail::fmt_double(m(i, k).imag());
        }
        out += "\n";
    }
    return out;
}

inline std::string region_to_csv(const RegionGrid& grid) {
    std::string out = "zeta_re,zeta_im,stable\n";
    for (std::size_t iy = 0; iy < grid.im.size(); ++iy)
        for (std::size_t ix = 0; ix < grid.re.size(); ++ix)
            out += detail::fmt_double(grid.re[ix]) + "," + detail::fmt_double(grid.im[iy]) + "," +
                   (grid.stable[iy][ix] ? "1" : "0") + "\n";
    return out;
}

inline std::string sweep_to_csv(const AlphaSweep& s) {
    std::string out = "alpha,theta_deg,root_stable\n";
    for (std::size_t i = 0; i < s.alphas.size(); ++i)
        out += detail::fmt_double(s.alphas[i]) + "," + detail::fmt_double(s.theta_deg[i]) + "," +
               (s.root_stable[i] ? "1" : "0") + "\n";
    return out;
}

inline std::string precision_to_csv(const ConvergenceRun& run) {
    std::string out = "h,error,newton_total\n";
    for (std::size_t i = 0; i < run.hs.size(); ++i)
        out += detail::fmt_double(run.hs[i]) + "," + detail::fmt_double(run.errors[i]) + "," +
               std::to_string(run.newton_totals[i]) + "\n";
    return out;
}

inline std::string trajectory_to_csv(const std::vector<TrajectoryRow>& rows) {
    std::string out = "step,t_re,t_im,node";
    if (!rows.empty())
        for (std::size_t c = 0; c < rows.front().components.size(); ++c)
            out += ",y" + std::to_string(c) + "_re,y" + std::to_string(c) + "_im";
    out += "\n";
    for (const auto& row : rows) {
        out += std::to_string(row.step) + "," + detail::fmt_double(row.t.real()) + "," +
               detail::fmt_double(row.t.imag()) + "," + std::to_string(row.node);
        for (const auto& c : row.components)
            out += "," + detail::fmt_double(c.real()) + "," + detail::fmt_double(c.imag());
        out += "\n";
    }
    return out;
}

inline json to_json(const NewtonStats& stats) {
    json j;
    j["solves"] = stats.solves;
    j["total_iterations"] = stats.total_iterations;
    j["max_iterations_in_solve"] = stats.max_iterations_in_solve;
    return j;
}

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << contents;
}

} // namespace pbm
