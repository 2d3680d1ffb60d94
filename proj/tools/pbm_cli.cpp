// pbm: construct polynomial block methods with imaginary nodes, analyze their
// linear stability, run stiff test-problem experiments, and emit stencil
// diagrams. Outputs are machine readable (JSON / CSV / SVG).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pbm/classical_bdf.hpp"
#include "pbm/convergence.hpp"
#include "pbm/descriptor.hpp"
#include "pbm/diagrams.hpp"
#include "pbm/problems.hpp"
#include "pbm/serialize.hpp"
#include "pbm/stability.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitConstruction = 3;
constexpr int kExitRuntime = 4;

constexpr const char* kDescriptorHelp =
    "Method descriptor: inline 'family:strategy:nodes:ordering:q=N:a=X"
    "[:ep=vi|fi|sweep][:l=L][:imp=di|ex|fi]' (e.g. bdf:smfc:iequi:inward:q=4:a=0.5, "
    "adams:smvc:icheb:inward:q=3:a=0.9:ep=fi:l=2), or 'bdf:K' for the classical "
    "reference method of order K.";

pbm::MethodDescriptor load_descriptor(const std::string& inline_text,
                                      const std::string& spec_file) {
    if (!inline_text.empty() && !spec_file.empty())
        throw pbm::ConfigError("give either --method or --spec, not both");
    if (!inline_text.empty()) return pbm::parse_descriptor(inline_text);
    if (!spec_file.empty()) {
        std::ifstream in(spec_file);
        if (!in) throw pbm::ConfigError("cannot read descriptor file: " + spec_file);
        pbm::json j;
        in >> j;
        return pbm::parse_descriptor_json(j);
    }
    throw pbm::ConfigError("a method descriptor is required (--method or --spec)");
}

/// Map-reduce over grid indices with --jobs workers. Tasks share only
/// immutable state.
template <typename Fn>
void parallel_for(int count, int jobs, Fn&& fn) {
    if (jobs <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::future<void>> futures;
    std::atomic<int> next{0};
    for (int w = 0; w < jobs; ++w)
        futures.push_back(std::async(std::launch::async, [&] {
            for (int i = next++; i < count; i = next++) fn(i);
        }));
    for (auto& f : futures) f.get();
}

int cmd_coeffs(const pbm::MethodDescriptor& desc, const std::string& format,
               const std::string& out) {
    const pbm::MethodSpec spec = pbm::to_method_spec(desc);
    const pbm::BuiltMethod built = pbm::build_method(spec);
    const pbm::BlockMatrices& m = built.matrices;

    double consistency = 0.0;
    for (int j = 0; j < m.q; ++j) {
        pbm::cplx s{};
        for (int k = 0; k < m.q; ++k) s += m.A(j, k) + m.C(j, k);
        consistency = std::max(consistency, std::abs(s - 1.0));
    }

    if (format == "json") {
        pbm::json j = pbm::to_json(m, spec.alpha);
        j["method"] = pbm::descriptor_to_json(desc);
        j["nodes"] = pbm::to_json(spec.nodes);
        j["consistency_residual"] = consistency;
        const std::string text = j.dump(2) + "\n";
        if (out.empty()) std::cout << text;
        else pbm::write_file(out, text);
    } else if (format == "csv") {
        const std::string dir = out.empty() ? "." : out;
        std::filesystem::create_directories(dir);
        pbm::write_file(dir + "/A.csv", pbm::matrix_to_csv(m.A));
        pbm::write_file(dir + "/B.csv", pbm::matrix_to_csv(m.B));
        pbm::write_file(dir + "/C.csv", pbm::matrix_to_csv(m.C));
        pbm::write_file(dir + "/D.csv", pbm::matrix_to_csv(m.D));
    } else {
        throw pbm::ConfigError("format: expected json|csv");
    }
    std::fprintf(stderr, "consistency (A+C)*1 = 1 residual: %.3e\n", consistency);
    return 0;
}

pbm::BlockMatrices matrices_for_stability(const pbm::MethodDescriptor& desc, double& alpha) {
    if (desc.classical_bdf_order != 0) {
        alpha = 1.0;
        return pbm::classical_bdf(desc.classical_bdf_order).block;
    }
    const pbm::MethodSpec spec = pbm::to_method_spec(desc);
    alpha = spec.alpha;
    return pbm::build_method(spec).matrices;
}

int cmd_stability(const pbm::MethodDescriptor& desc, bool angle,
                  const std::vector<double>& region, const std::vector<double>& sweep,
                  int samples, double bisect_tol, int jobs, const std::string& out) {
    if (angle) {
        double alpha = 1.0;
        const pbm::BlockMatrices m = matrices_for_stability(desc, alpha);
        const pbm::StabilityReport rep = pbm::stability_angle(m, alpha, samples, bisect_tol);
        pbm::json j = pbm::to_json(rep);
        j["method"] = pbm::descriptor_to_json(desc);
        const std::string text = j.dump(2) + "\n";
        if (out.empty()) std::cout << text;
        else pbm::write_file(out, text);
        return 0;
    }
    if (!region.empty()) {
        double alpha = 1.0;
        const pbm::BlockMatrices m = matrices_for_stability(desc, alpha);
        const int nx = static_cast<int>(region[4]);
        const int ny = static_cast<int>(region[5]);
        if (nx < 2 || ny < 2) throw pbm::ConfigError("region resolution must be at least 2");
        pbm::RegionGrid grid;
        for (int i = 0; i < nx; ++i)
            grid.re.push_back(region[0] + (region[1] - region[0]) * i / (nx - 1));
        for (int i = 0; i < ny; ++i)
            grid.im.push_back(region[2] + (region[3] - region[2]) * i / (ny - 1));
        grid.stable.assign(ny, std::vector<bool>(nx, false));
        parallel_for(nx * ny, jobs, [&](int idx) {
            const int iy = idx / nx, ix = idx % nx;
            grid.stable[iy][ix] =
                pbm::detail::stable_at(m, pbm::cplx(grid.re[ix], grid.im[iy]) / alpha);
        });
        const std::string text = pbm::region_to_csv(grid);
        if (out.empty()) std::cout << text;
        else pbm::write_file(out, text);
        return 0;
    }
    if (!sweep.empty()) {
        if (desc.classical_bdf_order != 0)
            throw pbm::ConfigError("alpha sweeps apply to block methods, not classical references");
        const pbm::MethodSpec spec_template = pbm::to_method_spec(desc);
        const double a0 = sweep[0], a1 = sweep[1];
        const int n = static_cast<int>(sweep[2]);
        if (n < 1 || !(a0 > 0) || a1 < a0)
            throw pbm::ConfigError("sweep: expected 0 < alpha0 <= alpha1 and n >= 1");
        std::vector<double> alphas;
        for (int i = 0; i < n; ++i)
            alphas.push_back(n == 1 ? a0 : a0 + (a1 - a0) * i / (n - 1.0));
        pbm::AlphaSweep result;
        result.alphas = alphas;
        result.theta_deg.resize(n);
        result.root_stable.resize(n);
        parallel_for(n, jobs, [&](int i) {
            pbm::MethodSpec s = spec_template;
            s.alpha = alphas[i];
            const pbm::BuiltMethod built = pbm::build_method(s);
            result.theta_deg[i] =
                pbm::stability_angle(built.matrices, alphas[i], samples, bisect_tol).angle_deg;
            result.root_stable[i] = pbm::root_stable_at_alpha(built.matrices, alphas[i]);
        });
        for (std::size_t i = 0; i < result.root_stable.size();) {
            if (!result.root_stable[i]) { ++i; continue; }
            std::size_t j = i;
            while (j + 1 < result.root_stable.size() && result.root_stable[j + 1]) ++j;
            result.root_stable_intervals.emplace_back(alphas[i], alphas[j]);
            i = j + 1;
        }
        const std::string text = pbm::sweep_to_csv(result);
        if (out.empty()) std::cout << text;
        else pbm::write_file(out, text);
        return 0;
    }
    throw pbm::ConfigError("choose one of --angle, --region, --sweep");
}

struct ExperimentSetup {
    pbm::Problem problem;
    pbm::cvector y0;
    double t0 = 0.0, t_end = 1.0;
    pbm::ReferencePolicy policy = pbm::ReferencePolicy::Exact;
};

ExperimentSetup make_experiment(const std::string& name, double lambda, int grid_points,
                                double nu, double t_end) {
    ExperimentSetup setup;
    if (name == "dahlquist") {
        setup.problem = pbm::dahlquist_problem(pbm::cplx(lambda, 0.0));
        setup.y0 = setup.problem.exact(0.0);
        setup.t_end = t_end > 0 ? t_end : 1.0;
    } else if (name == "prothero") {
        setup.problem = pbm::prothero_robinson_problem(lambda);
        setup.y0 = setup.problem.exact(0.0);
        setup.t_end = t_end > 0 ? t_end : 1.0;
    } else if (name == "burgers") {
        pbm::BurgersConfig cfg;
        if (grid_points > 0) cfg.interior_points = grid_points;
        if (nu > 0) cfg.nu = nu;
        setup.problem = pbm::burgers_problem(cfg);
        setup.y0 = pbm::burgers_initial_condition(cfg);
        setup.t_end = t_end > 0 ? t_end : 1.0;
        setup.policy = pbm::ReferencePolicy::SelfBdf6;
    } else if (name == "nls") {
        pbm::NlsConfig cfg;
        if (grid_points > 0) cfg.modes = grid_points;
        setup.problem = pbm::nls_problem(cfg);
        setup.y0 = pbm::nls_initial_condition(cfg);
        setup.t_end = t_end > 0 ? t_end : 1.0;  // desk-scale default horizon
        setup.policy = pbm::ReferencePolicy::SelfSameMethod;
    } else {
        throw pbm::ConfigError("experiment: expected burgers|nls|prothero|dahlquist");
    }
    return setup;
}

int cmd_experiment(const std::string& name, const pbm::MethodDescriptor& desc,
                   std::vector<int> steps, const std::vector<double>& hs, double lambda,
                   int grid_points, double nu, double t_end, bool trajectory,
                   const std::string& out_dir) {
    ExperimentSetup setup = make_experiment(name, lambda, grid_points, nu, t_end);

    if (steps.empty() && hs.empty()) throw pbm::ConfigError("give --steps or --hs");
    for (double h : hs) {
        const double raw = (setup.t_end - setup.t0) / h;
        const int n = static_cast<int>(std::lround(raw));
        if (n < 1 || std::abs(raw - n) > 1e-9 * std::max(1.0, raw))
            throw pbm::ConfigError("stepsize " + std::to_string(h) +
                                   " does not divide the time interval exactly");
        steps.push_back(n);
    }

    pbm::MethodUnderTest method;
    if (desc.classical_bdf_order != 0) method.classical_bdf_order = desc.classical_bdf_order;
    else method.pbm = pbm::to_method_spec(desc);

    const pbm::ConvergenceRun run = pbm::convergence_study(
        setup.problem, method, setup.t0, setup.y0, setup.t_end, steps, setup.policy);

    std::filesystem::create_directories(out_dir);
    pbm::write_file(out_dir + "/precision.csv", pbm::precision_to_csv(run));

    pbm::json manifest;
    manifest["problem"] = name;
    manifest["method"] = pbm::descriptor_to_json(desc);
    manifest["t_span"] = {setup.t0, setup.t_end};
    manifest["hs"] = run.hs;
    manifest["errors"] = run.errors;
    if (run.observed_order) manifest["observed_order"] = *run.observed_order;
    else manifest["observed_order"] = nullptr;
    pbm::write_file(out_dir + "/manifest.json", manifest.dump(2) + "\n");

    if (trajectory && method.pbm) {
        const pbm::BuiltMethod built = pbm::build_method(*method.pbm);
        const int n = steps.back();
        const pbm::IntegrationResult r =
            pbm::integrate_from(setup.problem, built, setup.t0, setup.y0, setup.t_end, n, {},
                                false, 64, {0});
        pbm::write_file(out_dir + "/trajectory.csv", pbm::trajectory_to_csv(r.trajectory));
        pbm::write_file(out_dir + "/newton.json", pbm::to_json(r.newton).dump(2) + "\n");
    }

    if (run.observed_order)
        std::fprintf(stderr, "observed order: %.3f\n", *run.observed_order);
    else
        std::fprintf(stderr, "observed order: inconclusive\n");
    return 0;
}

int cmd_diagram(const pbm::MethodDescriptor& desc, const std::string& kind,
                const std::string& out) {
    const pbm::MethodSpec spec = pbm::to_method_spec(desc);
    const pbm::BuiltMethod built = pbm::build_method(spec);
    auto emit = [&](const std::string& text, const std::string& path) {
        if (path.empty()) std::cout << text;
        else pbm::write_file(path, text);
    };
    if (kind == "node") {
        emit(pbm::node_diagram(built), out);
    } else if (kind == "expansion") {
        emit(pbm::expansion_diagram(built), out);
    } else if (kind == "polynomial") {
        const std::vector<std::string> svgs = pbm::polynomial_diagram(built);
        if (svgs.size() == 1 || out.empty()) {
            for (const auto& svg : svgs) emit(svg, out);
        } else {
            const auto dot = out.rfind('.');
            const std::string base = dot == std::string::npos ? out : out.substr(0, dot);
            const std::string ext = dot == std::string::npos ? ".svg" : out.substr(dot);
            emit(svgs[0], base + "_Ly" + ext);
            emit(svgs[1], base + "_LF" + ext);
        }
    } else {
        throw pbm::ConfigError("kind: expected node|expansion|polynomial");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"polynomial block methods with imaginary nodes"};
    app.require_subcommand(1);

    std::string method_text, spec_file, out, format = "json", kind = "node", experiment_name;
    bool angle = false, trajectory = false;
    std::vector<double> region, sweep, hs;
    std::vector<int> steps;
    int samples = 400, jobs = 1, grid_points = 0;
    double bisect_tol = 0.1, lambda = -50.0, nu = 0.0, t_end = 0.0;

    auto add_method_options = [&](CLI::App* cmd) {
        cmd->add_option("--method", method_text, kDescriptorHelp);
        cmd->add_option("--spec", spec_file, "JSON file with the same descriptor fields");
    };

    CLI::App* coeffs = app.add_subcommand("coeffs", "emit the block matrices A, B, C, D");
    add_method_options(coeffs);
    coeffs->add_option("--format", format, "output format: json|csv");
    coeffs->add_option("--out", out, "output file (json) or directory (csv); default stdout");

    CLI::App* stability = app.add_subcommand("stability", "linear stability analysis");
    add_method_options(stability);
    stability->add_flag("--angle", angle, "measure the stability angle");
    stability->add_option("--region", region,
                          "root-stability grid: re0 re1 im0 im1 nx ny (zeta in h-units)")
        ->expected(6);
    stability->add_option("--sweep", sweep, "theta(alpha) sweep: alpha0 alpha1 n")->expected(3);
    stability->add_option("--samples", samples, "ray samples per angle test");
    stability->add_option("--bisect-tol", bisect_tol, "angle bisection resolution in degrees");
    stability->add_option("--jobs", jobs, "parallel workers for sweeps and regions");
    stability->add_option("--out", out, "output file; default stdout");

    CLI::App* experiment =
        app.add_subcommand("experiment", "convergence experiment on a test problem");
    experiment->add_option("name", experiment_name, "burgers|nls|prothero|dahlquist")->required();
    add_method_options(experiment);
    experiment->add_option("--steps", steps, "list of step counts");
    experiment->add_option("--hs", hs, "list of stepsizes (must divide the interval)");
    experiment->add_option("--lambda", lambda, "stiffness parameter for prothero/dahlquist");
    experiment->add_option("--grid", grid_points, "spatial points (burgers interior / nls modes)");
    experiment->add_option("--nu", nu, "Burgers viscosity");
    experiment->add_option("--tend", t_end, "final time");
    experiment->add_flag("--trajectory", trajectory,
                         "also dump a trajectory CSV and Newton stats for the finest run");
    experiment->add_option("--out", out, "output directory")->required();

    CLI::App* diagram = app.add_subcommand("diagram", "emit SVG stencil diagrams");
    add_method_options(diagram);
    diagram->add_option("--kind", kind, "node|expansion|polynomial");
    diagram->add_option("--out", out, "output SVG path; default stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        const pbm::MethodDescriptor desc = load_descriptor(method_text, spec_file);
        if (coeffs->parsed()) return cmd_coeffs(desc, format, out);
        if (stability->parsed())
            return cmd_stability(desc, angle, region, sweep, samples, bisect_tol, jobs, out);
        if (experiment->parsed())
            return cmd_experiment(experiment_name, desc, steps, hs, lambda, grid_points, nu,
                                  t_end, trajectory, out);
        if (diagram->parsed()) return cmd_diagram(desc, kind, out);
    } catch (const pbm::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const pbm::SingularFitError& e) {
        std::fprintf(stderr, "construction error: %s\n", e.what());
        return kExitConstruction;
    } catch (const pbm::StructureError& e) {
        std::fprintf(stderr, "construction error: %s\n", e.what());
        return kExitConstruction;
    } catch (const pbm::BlowUpError& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return kExitRuntime;
    } catch (const pbm::NewtonError& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return 0;
}
