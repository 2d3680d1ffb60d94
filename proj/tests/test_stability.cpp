#include <catch2/catch_amalgamated.hpp>

#include "pbm/classical_bdf.hpp"
#include "pbm/stability.hpp"
#include "test_helpers.hpp"

using namespace pbm;

namespace {

MethodSpec bdf_spec(IndexStrategy s, int q, double alpha,
                    NodeOrdering ord = NodeOrdering::Inward,
                    NodeFamily nf = NodeFamily::ImaginaryEquispaced) {
    MethodSpec spec;
    spec.family = PolynomialFamily::Bdf;
    spec.strategy = s;
    spec.implicitness = Implicitness::DiagonallyImplicit;
    spec.nodes = generate_nodes(nf, q, ord);
    spec.alpha = alpha;
    return spec;
}

BlockMatrices one_step_block(double a, double b, double c, double d) {
    BlockMatrices m;
    m.q = 1;
    m.A = CMatrix(1, 1);
    m.B = CMatrix(1, 1);
    m.C = CMatrix(1, 1);
    m.D = CMatrix(1, 1);
    m.A(0, 0) = a;
    m.B(0, 0) = b;
    m.C(0, 0) = c;
    m.D(0, 0) = d;
    return m;
}

} // namespace

TEST_CASE("eigenvalues of small matrices", "[stability]") {
    CMatrix m(3, 3);
    m(0, 0) = cplx(2, 1);
    m(1, 1) = cplx(-1, 0.5);
    m(2, 2) = cplx(0.25, -3);
    m(0, 2) = cplx(5, 5);  // upper triangular: eigenvalues are the diagonal
    cvector eig = eigenvalues(m);
    std::sort(eig.begin(), eig.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
    REQUIRE(std::abs(eig[0] - cplx(-1, 0.5)) < 1e-12);
    REQUIRE(std::abs(eig[1] - cplx(0.25, -3)) < 1e-12);
    REQUIRE(std::abs(eig[2] - cplx(2, 1)) < 1e-12);
}

TEST_CASE("eigenvalues of a near-identity cluster stay accurate", "[stability]") {
    const double rho = 1e-6;
    CMatrix m = CMatrix::identity(4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) += rho * cplx(0.3 * (i + 1), 0.2 * (j - i));
    for (const auto& l : eigenvalues(m))
        REQUIRE(std::abs(l - 1.0) < 10 * rho);  // splitting is O(rho), not eps^(1/4)
}

TEST_CASE("root stability verdicts", "[stability]") {
    SECTION("contractive diagonal is stable") {
        CMatrix m = CMatrix::identity(3);
        m *= cplx(0.5, 0);
        REQUIRE(is_root_stable(m));
    }
    SECTION("defective unit eigenvalue is unstable") {
        CMatrix m = CMatrix::identity(2);
        m(0, 1) = 1.0;
        REQUIRE_FALSE(is_root_stable(m));
    }
    SECTION("simple unit-modulus eigenvalue is stable") {
        CMatrix m(2, 2);
        m(0, 0) = 1.0;
        m(1, 1) = 0.3;
        REQUIRE(is_root_stable(m));
    }
    SECTION("identity is stable despite the cluster") {
        REQUIRE(is_root_stable(CMatrix::identity(4)));
    }
    SECTION("marginally super-unit spectral radius is unstable") {
        CMatrix m(2, 2);
        m(0, 0) = 1.0 + 1e-6;
        m(1, 1) = 0.1;
        REQUIRE_FALSE(is_root_stable(m));
    }
}

TEST_CASE("amplification matrix basics", "[stability]") {
    const BuiltMethod built = build_method(bdf_spec(IndexStrategy::Pmfc, 2, 0.5,
                                                    NodeOrdering::Classical));
    SECTION("zeta = 0 preserves constants") {
        const CMatrix m0 = amplification_matrix(built.matrices, cplx{});
        for (int i = 0; i < 2; ++i) {
            cplx s{};
            for (int j = 0; j < 2; ++j) s += m0(i, j);
            REQUIRE(std::abs(s - 1.0) < 1e-13);
        }
    }
    SECTION("infinity limit matches -D^-1 B and the large-zeta matrix") {
        const auto inf = amplification_limit_at_infinity(built.matrices);
        REQUIRE(inf.has_value());
        const CMatrix big = amplification_matrix(built.matrices, cplx(-1e9, 0));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                REQUIRE(std::abs((*inf)(i, j) - big(i, j)) < 1e-6);
    }
    SECTION("BBDF q=2 amplification at zeta=-1 matches a dense solve") {
        const cplx zeta(-1, 0);
        const CMatrix got = amplification_matrix(built.matrices, zeta);
        const BlockMatrices& bm = built.matrices;
        for (int col = 0; col < 2; ++col) {
            std::vector<std::vector<cplx>> lhs(2, std::vector<cplx>(2));
            cvector rhs(2);
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j)
                    lhs[i][j] = (i == j ? cplx(1) : cplx(0)) - bm.C(i, j) - zeta * bm.D(i, j);
                rhs[i] = bm.A(i, col) + zeta * bm.B(i, col);
            }
            const cvector x = testutil::solve_dense(lhs, rhs);
            for (int i = 0; i < 2; ++i) REQUIRE(std::abs(got(i, col) - x[i]) < 1e-13);
        }
    }
}

TEST_CASE("trapezoidal rule is A(90) with marginal infinity limit", "[stability]") {
    const BlockMatrices m = one_step_block(1.0, 0.5, 0.0, 0.5);
    const auto inf = amplification_limit_at_infinity(m);
    REQUIRE(inf.has_value());
    const cvector eig = eigenvalues(*inf);
    REQUIRE(std::abs(std::abs(eig[0]) - 1.0) < 1e-13);  // boundary case: |M_inf| = 1
    const StabilityReport rep = stability_angle(m, 1.0, 100, 0.2);
    REQUIRE(rep.a90);
    REQUIRE(rep.angle_deg == 90.0);
}

TEST_CASE("backward Euler block is A(90)", "[stability]") {
    const StabilityReport rep = stability_angle(one_step_block(1, 0, 0, 1), 1.0, 100, 0.2);
    REQUIRE(rep.a90);
}

TEST_CASE("explicit Euler block has no stability angle", "[stability]") {
    const StabilityReport rep = stability_angle(one_step_block(1, 1, 0, 0), 1.0, 100, 0.2);
    REQUIRE_FALSE(rep.root_stable);
    REQUIRE(rep.angle_deg == 0.0);
}

TEST_CASE("conjugate symmetry of stability verdicts", "[stability]") {
    const BuiltMethod built = build_method(bdf_spec(IndexStrategy::Smfc, 4, 0.5));
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double re = 8.0 * unit(testutil::rng());
        const double im = 8.0 * unit(testutil::rng());
        const bool upper = detail::stable_at(built.matrices, cplx(re, im));
        const bool lower = detail::stable_at(built.matrices, cplx(re, -im));
        REQUIRE(upper == lower);
    }
}

TEST_CASE("consistency anchor: M(0) has a simple eigenvalue 1 on BDF methods", "[stability]") {
    for (int q : {2, 3, 4}) {
        const BuiltMethod built = build_method(bdf_spec(IndexStrategy::Smvc, q, 0.5));
        const CMatrix m0 = amplification_matrix(built.matrices, cplx{});
        const cvector ones(q, cplx(1, 0));
        const cvector image = m0 * ones;
        for (const auto& x : image) REQUIRE(std::abs(x - 1.0) < 1e-12);
        int near_one = 0;
        for (const auto& l : eigenvalues(m0))
            if (std::abs(l - 1.0) < 1e-6) ++near_one;
        REQUIRE(near_one == 1);
    }
}

TEST_CASE("alpha sweep basics", "[stability]") {
    MethodSpec spec = bdf_spec(IndexStrategy::Smvc, 2, 0.5);
    SECTION("degenerate single-point grid") {
        const AlphaSweep sweep = alpha_sweep(spec, {0.5}, 60, 0.5);
        REQUIRE(sweep.alphas.size() == 1);
        REQUIRE(sweep.theta_deg.size() == 1);
        for (const auto& [lo, hi] : sweep.root_stable_intervals) {
            REQUIRE(lo == 0.5);
            REQUIRE(hi == 0.5);
        }
    }
    SECTION("theta is non-increasing in alpha for a BDF family") {
        std::vector<double> grid;
        for (int i = 0; i < 8; ++i) grid.push_back(0.1 + 0.9 * i / 7.0);
        const AlphaSweep sweep = alpha_sweep(spec, grid, 80, 0.5);
        for (std::size_t i = 1; i < sweep.theta_deg.size(); ++i)
            REQUIRE(sweep.theta_deg[i] <= sweep.theta_deg[i - 1] + 1.0);
    }
}

TEST_CASE("region grid marks the left half plane stable for an A(90) method", "[stability]") {
    const BuiltMethod built = build_method(bdf_spec(IndexStrategy::Smvc, 2, 0.75));
    const RegionGrid grid = region_grid(built.matrices, 0.75, -5.0, 1.0, -3.0, 3.0, 7, 7);
    for (std::size_t iy = 0; iy < grid.im.size(); ++iy)
        for (std::size_t ix = 0; ix < grid.re.size(); ++ix)
            if (grid.re[ix] < 0) REQUIRE(grid.stable[iy][ix]);
}

TEST_CASE("angle/region coherence", "[stability]") {
    const BuiltMethod built = build_method(bdf_spec(IndexStrategy::Smfc, 4, 0.5));
    const StabilityReport rep = stability_angle(built.matrices, 0.5, 120, 0.25);
    REQUIRE(rep.angle_deg > 10.0);
    const double theta = (rep.angle_deg - 1.0) * std::numbers::pi / 180.0;
    for (double rho : {0.01, 0.1, 1.0, 10.0, 1e3, 1e6}) {
        const cplx zeta = rho * cplx(-std::cos(theta), std::sin(theta));
        REQUIRE(detail::stable_at(built.matrices, zeta / 0.5));
    }
}

TEST_CASE("classical BDF block forms reproduce known stability", "[stability]") {
    SECTION("BDF2 is A(90)") {
        const ClassicalBdf b2 = classical_bdf(2);
        const StabilityReport rep = stability_angle(b2.block, 1.0, 120, 0.2);
        REQUIRE(rep.a90);
    }
    SECTION("BDF6 angle near 17.8 degrees") {
        const ClassicalBdf b6 = classical_bdf(6);
        const StabilityReport rep = stability_angle(b6.block, 1.0, 200, 0.2);
        REQUIRE(rep.angle_deg > 17.5);
        REQUIRE(rep.angle_deg < 18.1);
        REQUIRE_FALSE(rep.a90);
    }
}

TEST_CASE("pole of the resolvent raises and is treated as unstable", "[stability]") {
    // Backward-Euler block: resolvent singular at zeta_r = 1.
    const BlockMatrices m = one_step_block(1, 0, 0, 1);
    REQUIRE_THROWS_AS(amplification_matrix(m, cplx(1.0, 0.0)), StructureError);
    REQUIRE_FALSE(detail::stable_at(m, cplx(1.0, 0.0)));
}
