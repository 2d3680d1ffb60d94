#include <catch2/catch_amalgamated.hpp>

#include "pbm/classical_bdf.hpp"
#include "pbm/convergence.hpp"
#include "pbm/problems.hpp"
#include "test_helpers.hpp"

using namespace pbm;

namespace {

/// Central finite-difference check of a problem's Jacobian at a random state.
double jacobian_fd_deviation(const Problem& p, const cvector& y, cplx t) {
    const CMatrix jac = p.jacobian(t, y);
    const std::size_t n = y.size();
    double worst = 0.0;
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int probe = 0; probe < 3; ++probe) {
        cvector dir(n);
        double norm = 0.0;
        for (auto& d : dir) {
            d = cplx(unit(testutil::rng()), unit(testutil::rng()));
            norm = std::max(norm, std::abs(d));
        }
        for (auto& d : dir) d /= norm;
        double ynorm = 0.0;
        for (const auto& v : y) ynorm = std::max(ynorm, std::abs(v));
        const double h = 1e-6 * (1.0 + ynorm);
        cvector yp(n), ym(n);
        for (std::size_t i = 0; i < n; ++i) {
            yp[i] = y[i] + h * dir[i];
            ym[i] = y[i] - h * dir[i];
        }
        const cvector fp = p.rhs(t, yp), fm = p.rhs(t, ym);
        const cvector jd = jac * dir;
        double scale = 1.0;
        for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(jd[i]));
        for (std::size_t i = 0; i < n; ++i)
            worst = std::max(worst, std::abs((fp[i] - fm[i]) / (2.0 * h) - jd[i]) / scale);
    }
    return worst;
}

cvector random_state(int n) {
    cvector y(n);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (auto& v : y) v = cplx(unit(testutil::rng()), 0.0);
    return y;
}

} // namespace

TEST_CASE("Burgers right-hand side", "[bench]") {
    BurgersConfig cfg;
    cfg.interior_points = 16;
    const Problem p = burgers_problem(cfg);
    SECTION("zero state is a fixed point") {
        const cvector rhs = p.rhs(cplx{}, cvector(16, cplx{}));
        for (const auto& v : rhs) REQUIRE(std::abs(v) == 0.0);
    }
    SECTION("unit bump matches the hand stencil") {
        const int n = 16, k = 7;
        const double dx = 1.0 / (n + 1), nu = cfg.nu;
        cvector u(n, cplx{});
        u[k] = 1.0;
        const cvector rhs = p.rhs(cplx{}, u);
        // Row k: diffusion -2 nu/dx^2; convection u_k (u_{k+1}-u_{k-1})/2dx = 0.
        REQUIRE(std::abs(rhs[k] - cplx(-2.0 * nu / (dx * dx), 0)) < 1e-12);
        // Rows k-1 and k+1: diffusion nu/dx^2, convection -u_j (±1)/(2 dx) with u_j = 0.
        REQUIRE(std::abs(rhs[k - 1] - cplx(nu / (dx * dx), 0)) < 1e-12);
        REQUIRE(std::abs(rhs[k + 1] - cplx(nu / (dx * dx), 0)) < 1e-12);
        for (int i = 0; i < n; ++i)
            if (std::abs(i - k) > 1) REQUIRE(std::abs(rhs[i]) == 0.0);
    }
}

TEST_CASE("Burgers Jacobian matches finite differences", "[bench]") {
    BurgersConfig cfg;
    cfg.interior_points = 24;
    const Problem p = burgers_problem(cfg);
    for (int trial = 0; trial < 10; ++trial)
        REQUIRE(jacobian_fd_deviation(p, random_state(24), cplx{}) < 1e-5);
}

TEST_CASE("Burgers diffusion operator is dissipative", "[bench]") {
    BurgersConfig cfg;
    cfg.interior_points = 24;
    const double dx = 1.0 / 25.0;
    for (int trial = 0; trial < 20; ++trial) {
        const cvector u = random_state(24);
        // u^T D2 u with the second-difference operator and zero boundaries
        double quad = 0.0;
        for (int i = 0; i < 24; ++i) {
            const double um = i > 0 ? u[i - 1].real() : 0.0;
            const double up = i < 23 ? u[i + 1].real() : 0.0;
            quad += u[i].real() * (um - 2.0 * u[i].real() + up) / (dx * dx);
        }
        REQUIRE(quad <= 1e-12);
    }
}

TEST_CASE("NLS right-hand side", "[bench]") {
    NlsConfig cfg;
    cfg.modes = 16;
    const Problem p = nls_problem(cfg);
    SECTION("zero state is a fixed point") {
        const cvector rhs = p.rhs(cplx{}, cvector(32, cplx{}));
        for (const auto& v : rhs) REQUIRE(std::abs(v) < 1e-12);
    }
    SECTION("constant plane wave rotates: (a,b)=(1,0) gives rhs (0,1)") {
        cvector s(32, cplx{});
        for (int i = 0; i < 16; ++i) s[i] = 1.0;
        const cvector rhs = p.rhs(cplx{}, s);
        for (int i = 0; i < 16; ++i) {
            REQUIRE(std::abs(rhs[i]) < 1e-10);
            REQUIRE(std::abs(rhs[16 + i] - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("NLS spectral operator is symmetric negative semidefinite", "[bench]") {
    const int n = 16;
    const CMatrix d2 = nls_spectral_d2(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            REQUIRE(std::abs(d2(i, j).imag()) < 1e-12);
            REQUIRE(std::abs(d2(i, j) - d2(j, i)) < 1e-12);
        }
    for (int trial = 0; trial < 10; ++trial) {
        const cvector u = random_state(n);
        cplx quad{};
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) quad += u[i] * d2(i, j) * u[j];
        REQUIRE(quad.real() <= 1e-10);
    }
}

TEST_CASE("NLS Jacobian matches finite differences at the modulated plane wave", "[bench]") {
    NlsConfig cfg;
    cfg.modes = 16;
    const Problem p = nls_problem(cfg);
    REQUIRE(jacobian_fd_deviation(p, nls_initial_condition(cfg), cplx{}) < 1e-6);
    for (int trial = 0; trial < 5; ++trial)
        REQUIRE(jacobian_fd_deviation(p, random_state(32), cplx{}) < 1e-5);
}

TEST_CASE("NLS plane wave integrates to (cos t, sin t)", "[bench]") {
    NlsConfig cfg;
    cfg.modes = 8;
    Problem p = nls_problem(cfg);
    p.exact = [&cfg](double t) {
        cvector s(2 * cfg.modes);
        for (int i = 0; i < cfg.modes; ++i) {
            s[i] = std::cos(t);
            s[cfg.modes + i] = std::sin(t);
        }
        return s;
    };
    MethodSpec spec;
    spec.family = PolynomialFamily::Bdf;
    spec.strategy = IndexStrategy::Smvc;
    spec.implicitness = Implicitness::DiagonallyImplicit;
    spec.nodes = generate_nodes(NodeFamily::ImaginaryEquispaced, 3, NodeOrdering::Inward);
    spec.alpha = 0.75;
    const BuiltMethod built = build_method(spec);
    std::vector<double> errors;
    for (int steps : {16, 32, 64})
        errors.push_back(*integrate(p, built, 0.0, 1.0, steps).error_inf);
    REQUIRE(errors[2] < 1e-6);
    REQUIRE(std::log2(errors[0] / errors[1]) > 2.2);
    REQUIRE(std::log2(errors[1] / errors[2]) > 2.4);
}

TEST_CASE("classical BDF2 coefficients regenerate the textbook values", "[bench]") {
    const ClassicalBdf b2 = classical_bdf(2);
    REQUIRE(b2.history_weights.size() == 2);
    REQUIRE(b2.history_weights[0] == Catch::Approx(-1.0 / 3.0).margin(1e-13));
    REQUIRE(b2.history_weights[1] == Catch::Approx(4.0 / 3.0).margin(1e-13));
    REQUIRE(b2.derivative_weight == Catch::Approx(2.0 / 3.0).margin(1e-13));
}

TEST_CASE("classical BDF-k reproduces polynomials of degree k", "[bench]") {
    for (int k = 2; k <= 6; ++k) {
        const ClassicalBdf bdf = classical_bdf(k);
        // data from y(t) = t^k on the stencil tau = -k+1..0, f = y'
        for (int deg = 0; deg <= k; ++deg) {
            cplx predicted{};
            for (int m = 0; m < k; ++m)
                predicted += bdf.history_weights[m] * ipow(cplx(m - k + 1.0, 0), deg);
            predicted += bdf.derivative_weight *
                         (deg == 0 ? cplx{} : cplx(static_cast<double>(deg)) * ipow(cplx(1, 0), deg - 1));
            REQUIRE(std::abs(predicted - ipow(cplx(1, 0), deg)) < 1e-11);
        }
    }
}

TEST_CASE("classical BDF integration converges at order k", "[bench]") {
    const Problem p = prothero_robinson_problem(-20.0);
    for (int k : {2, 3}) {
        std::vector<double> errors;
        for (int steps : {20, 40, 80}) {
            const IntegrationResult r =
                integrate_classical_bdf(p, k, 0.0, p.exact(0.0), 1.0, steps);
            errors.push_back(*r.error_inf);
        }
        const double order = std::log2(errors[1] / errors[2]);
        REQUIRE(order > k - 0.6);
        REQUIRE(order < k + 0.8);
    }
}

TEST_CASE("convergence study on y'=0 reports zero errors and no order", "[bench]") {
    Problem p;
    p.dimension = 1;
    p.name = "zero";
    p.real_analytic = true;
    p.rhs = [](cplx, const cvector&) { return cvector{cplx{}}; };
    p.jacobian = [](cplx, const cvector&) { return CMatrix(1, 1); };
    p.exact = [](double) { return cvector{cplx(1, 0)}; };
    MethodUnderTest m;
    MethodSpec spec;
    spec.family = PolynomialFamily::Bdf;
    spec.strategy = IndexStrategy::Smvc;
    spec.implicitness = Implicitness::DiagonallyImplicit;
    spec.nodes = generate_nodes(NodeFamily::ImaginaryEquispaced, 2, NodeOrdering::Inward);
    spec.alpha = 0.5;
    m.pbm = spec;
    const ConvergenceRun run =
        convergence_study(p, m, 0.0, {cplx(1, 0)}, 1.0, {4, 8, 16}, ReferencePolicy::Exact);
    for (double e : run.errors) REQUIRE(e < 1e-13);
    REQUIRE_FALSE(run.observed_order.has_value());
}

TEST_CASE("convergence study measures Prothero-Robinson orders", "[bench]") {
    const Problem p = prothero_robinson_problem(-50.0);
    SECTION("Adams-SMVC iCheb FI l=2 q=3 reaches order about 5") {
        MethodSpec spec;
        spec.family = PolynomialFamily::Adams;
        spec.strategy = IndexStrategy::Smvc;
        spec.implicitness = Implicitness::DiagonallyImplicit;
        spec.nodes = generate_nodes(NodeFamily::ImaginaryChebyshev, 3, NodeOrdering::Inward);
        spec.alpha = 0.9;
        spec.endpoints = EndpointStrategy{EndpointKind::FixedInput, 2};
        MethodUnderTest m;
        m.pbm = spec;
        const ConvergenceRun run = convergence_study(p, m, 0.0, p.exact(0.0), 1.0,
                                                     {20, 28, 40, 56, 80, 113, 160},
                                                     ReferencePolicy::Exact);
        REQUIRE(run.observed_order.has_value());
        REQUIRE(*run.observed_order > 4.5);
        REQUIRE(*run.observed_order < 5.5);
    }
    SECTION("BDF-SMFC q=4 reaches order about 4") {
        MethodSpec spec;
        spec.family = PolynomialFamily::Bdf;
        spec.strategy = IndexStrategy::Smfc;
        spec.implicitness = Implicitness::DiagonallyImplicit;
        spec.nodes = generate_nodes(NodeFamily::ImaginaryEquispaced, 4, NodeOrdering::Inward);
        spec.alpha = 0.5;
        MethodUnderTest m;
        m.pbm = spec;
        const ConvergenceRun run = convergence_study(p, m, 0.0, p.exact(0.0), 1.0,
                                                     {20, 28, 40, 56, 80, 113, 160},
                                                     ReferencePolicy::Exact);
        REQUIRE(run.observed_order.has_value());
        REQUIRE(*run.observed_order > 3.5);
        REQUIRE(*run.observed_order < 4.6);
    }
}

TEST_CASE("self-reference policies produce a usable reference", "[bench]") {
    BurgersConfig cfg;
    cfg.interior_points = 32;
    const Problem p = burgers_problem(cfg);
    MethodSpec spec;
    spec.family = PolynomialFamily::Bdf;
    spec.strategy = IndexStrategy::Smfc;
    spec.implicitness = Implicitness::DiagonallyImplicit;
    spec.nodes = generate_nodes(NodeFamily::ImaginaryEquispaced, 3, NodeOrdering::Inward);
    spec.alpha = 0.5;
    MethodUnderTest m;
    m.pbm = spec;
    const ConvergenceRun run = convergence_study(p, m, 0.0, burgers_initial_condition(cfg), 0.5,
                                                 {5, 8, 12, 18, 27}, ReferencePolicy::SelfBdf6);
    REQUIRE(run.observed_order.has_value());
    REQUIRE(*run.observed_order > 2.2);
}
