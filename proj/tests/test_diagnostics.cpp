#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "qclab/diagnostics.hpp"
#include "qclab/schottky.hpp"
#include "support.hpp"

using namespace qclab;
using Catch::Matchers::WithinAbs;

namespace {
VecX v2(double x, double y) {
    VecX v(2);
    v[0] = x;
    v[1] = y;
    return v;
}

MatX diag21() {
    MatX m = MatX::Zero(2, 2);
    m(0, 0) = 2.0;
    m(1, 1) = 1.0;
    return m;
}
}  // namespace

TEST_CASE("direction probes of the stretch ratio", "[diagnostics]") {
    SECTION("a diagonal linear map reports its exact ratio at every radius") {
        const MatX A = diag21();
        auto f = [&](const VecX& x) -> VecX { return A * x; };
        const DilatationProfile prof = local_dilatation(f, v2(0.3, -0.7), {1e-1, 1e-2, 1e-3}, 64);
        REQUIRE(prof.gaps.empty());
        for (double h : prof.H) REQUIRE_THAT(h, WithinAbs(2.0, 1e-9));
        REQUIRE_THAT(prof.k_estimate, WithinAbs(2.0, 1e-9));
    }

    SECTION("the identity is flat at 1") {
        auto f = [](const VecX& x) -> VecX { return x; };
        const DilatationProfile prof = local_dilatation(f, v2(0.0, 0.0), {1e-2, 1e-4}, 32);
        for (double h : prof.H) REQUIRE_THAT(h, WithinAbs(1.0, 1e-12));
    }

    SECTION("sphere inversions look conformal at small radii") {
        const Sphere unit = Sphere::round(VecX::Zero(2), 1.0);
        auto f = [&](const VecX& x) -> VecX { return invert(unit, x).coords; };
        const DilatationProfile prof = local_dilatation(f, v2(2.0, 0.0), {1e-2, 1e-3, 1e-4}, 64);
        REQUIRE(prof.gaps.empty());
        REQUIRE(std::abs(prof.H.back() - 1.0) <= 1e-3);
        REQUIRE(std::abs(prof.k_estimate - 1.0) <= 1e-3);
    }

    SECTION("failed rungs leave gaps without spoiling the estimate") {
        auto f = [](const VecX& x) -> VecX {
            if (x.norm() > 0.05) throw EvaluationError("outside the patch");
            return 3.0 * x;
        };
        const DilatationProfile prof = local_dilatation(f, v2(0.0, 0.0), {1.0, 1e-2, 1e-3}, 16);
        REQUIRE(prof.gaps.size() == 1);
        REQUIRE(prof.gaps[0] == 0);
        REQUIRE(std::isnan(prof.H[0]));
        REQUIRE_THAT(prof.k_estimate, WithinAbs(1.0, 1e-9));  // conformal scaling
    }
}

TEST_CASE("triple-ratio distortion sampling", "[diagnostics]") {
    std::mt19937_64 rng(0x7123ull);
    std::vector<std::array<VecX, 3>> triples;
    for (int i = 0; i < 200; ++i) {
        std::array<VecX, 3> tr = {testing::random_point(rng, 2), testing::random_point(rng, 2),
                                  testing::random_point(rng, 2)};
        triples.push_back(tr);
    }

    SECTION("the identity keeps the ratio equal to t") {
        auto f = [](const VecX& x) -> VecX { return x; };
        const QsReport rep = quasisymmetry_samples(f, triples);
        REQUIRE(rep.samples.size() + rep.skipped == triples.size());
        for (const QsSample& s : rep.samples) REQUIRE_THAT(s.ratio, WithinAbs(s.t, 1e-12));
    }

    SECTION("similarities keep the ratio equal to t") {
        auto f = [](const VecX& x) -> VecX { return 3.0 * x + VecX::Ones(x.size()); };
        const QsReport rep = quasisymmetry_samples(f, triples);
        for (const QsSample& s : rep.samples)
            REQUIRE(std::abs(s.ratio - s.t) <= 1e-9 * std::max(1.0, s.t));
    }

    SECTION("degenerate triples are skipped, not crashed on") {
        std::vector<std::array<VecX, 3>> bad = {{v2(1.0, 0.0), v2(0.5, 0.0), v2(1.0, 0.0)}};
        auto f = [](const VecX& x) -> VecX { return x; };
        const QsReport rep = quasisymmetry_samples(f, bad);
        REQUIRE(rep.skipped == 1);
        REQUIRE(rep.samples.empty());
    }
}

TEST_CASE("sphere fitting", "[diagnostics]") {
    SECTION("an exact circle is recovered to machine precision") {
        std::vector<VecX> pts;
        for (int i = 0; i < 64; ++i) {
            const double th = 2.0 * std::numbers::pi * i / 64.0;
            pts.push_back(v2(0.3 + 1.7 * std::cos(th), -0.2 + 1.7 * std::sin(th)));
        }
        const RoundnessReport rep = roundness(pts);
        REQUIRE_FALSE(rep.degenerate);
        REQUIRE(rep.residual < 1e-12);
        REQUIRE_THAT(rep.center[0], WithinAbs(0.3, 1e-10));
        REQUIRE_THAT(rep.center[1], WithinAbs(-0.2, 1e-10));
        REQUIRE_THAT(rep.radius, WithinAbs(1.7, 1e-10));
    }

    SECTION("an exact 3-d sphere is recovered") {
        std::vector<VecX> pts;
        VecX c(3);
        c[0] = 1.0;
        c[1] = 2.0;
        c[2] = -0.5;
        for (const VecX& w : direction_grid(3, 80)) pts.push_back(c + 0.8 * w);
        const RoundnessReport rep = roundness(pts);
        REQUIRE(rep.residual < 1e-10);
        REQUIRE_THAT(rep.radius, WithinAbs(0.8, 1e-8));
    }

    SECTION("a 2:1 ellipse leaves a stable residual plateau") {
        std::vector<VecX> pts;
        for (int i = 0; i < 256; ++i) {
            const double th = 2.0 * std::numbers::pi * i / 256.0;
            pts.push_back(v2(2.0 * std::cos(th), std::sin(th)));
        }
        const RoundnessReport rep = roundness(pts);
        REQUIRE_FALSE(rep.degenerate);
        REQUIRE(rep.residual >= 0.30);
        REQUIRE(rep.residual <= 0.36);
        REQUIRE_THAT(rep.radius, WithinAbs(1.5419, 0.05));
    }

    SECTION("collinear data is flagged degenerate") {
        std::vector<VecX> pts;
        for (int i = 0; i < 16; ++i) pts.push_back(v2(0.1 * i, 0.2 * i));
        REQUIRE(roundness(pts).degenerate);
    }

    SECTION("too few points are rejected") {
        REQUIRE_THROWS_AS(roundness({v2(0, 0), v2(1, 0), v2(0, 1)}), ConfigError);
    }
}

TEST_CASE("jacobian estimation", "[diagnostics]") {
    SECTION("linear maps are recovered exactly") {
        const MatX A = diag21();
        auto f = [&](const VecX& x) -> VecX { return A * x; };
        const MatX J = central_difference_jacobian(f, v2(0.4, 0.1), 1e-5);
        REQUIRE((J - A).norm() < 1e-9);
    }

    SECTION("smooth maps show second-order convergence") {
        auto f = [](const VecX& x) -> VecX {
            VecX y(2);
            y[0] = std::sin(x[0]) + x[1] * x[1] * x[1];
            y[1] = std::cos(x[1]) + x[0] * x[0];
            return y;
        };
        const VecX p = v2(0.3, 0.7);
        const JacobianEstimate est = estimate_jacobian(f, p, 1e-2);
        REQUIRE(est.observed_order >= 1.7);
        MatX expect(2, 2);
        expect(0, 0) = std::cos(0.3);
        expect(0, 1) = 3.0 * 0.7 * 0.7;
        expect(1, 0) = 2.0 * 0.3;
        expect(1, 1) = -std::sin(0.7);
        const JacobianEstimate fine = estimate_jacobian(f, p);
        REQUIRE((fine.matrix - expect).norm() < 1e-6);
        REQUIRE_FALSE(fine.summary.degenerate);
    }
}

TEST_CASE("shrinking-ball conformality dichotomy", "[diagnostics]") {
    std::vector<Ball> balls;
    const VecX p = v2(1.5, 0.5);
    for (int k = 0; k < 10; ++k) balls.push_back(Ball::round(p, 0.25 * std::pow(2.0, -k)));

    SECTION("sphere inversions are conformal") {
        const Sphere unit = Sphere::round(VecX::Zero(2), 1.0);
        auto f = [&](const VecX& x) -> VecX { return invert(unit, x).coords; };
        const NestedBallReport rep = nested_ball_conformality_test(f, p, balls);
        REQUIRE(rep.verdict == ConformalityVerdict::Conformal);
        REQUIRE(rep.residuals.back() <= 1e-6);
        REQUIRE(rep.jacobian.summary.dilatation <= 1.01);
    }

    SECTION("a genuine stretch is rejected with the ellipse plateau") {
        const MatX A = diag21();
        auto f = [&](const VecX& x) -> VecX { return A * x; };
        const NestedBallReport rep = nested_ball_conformality_test(f, p, balls);
        REQUIRE(rep.verdict == ConformalityVerdict::NonConformal);
        for (double r : rep.residuals) {
            REQUIRE(r >= 0.30);
            REQUIRE(r <= 0.36);
        }
    }

    SECTION("rank-collapsing maps are reported degenerate") {
        auto f = [](const VecX& x) -> VecX { return v2(x[0], 0.0); };
        const NestedBallReport rep = nested_ball_conformality_test(f, p, balls);
        REQUIRE(rep.verdict == ConformalityVerdict::Degenerate);
    }

    SECTION("balls must contain the base point") {
        REQUIRE_THROWS_AS(nested_ball_conformality_test([](const VecX& x) { return x; }, v2(9.0, 9.0), balls),
                          ConfigError);
    }

    SECTION("verdict names") {
        REQUIRE(std::string(to_string(ConformalityVerdict::Conformal)) == "CONFORMAL");
        REQUIRE(std::string(to_string(ConformalityVerdict::NonConformal)) == "NON_CONFORMAL");
        REQUIRE(std::string(to_string(ConformalityVerdict::Degenerate)) == "DEGENERATE");
    }
}

TEST_CASE("uniform differentiability modulus", "[diagnostics]") {
    std::vector<VecX> base;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) base.push_back(v2(i / 8.0, j / 8.0));
    const std::vector<double> scales = {0.2, 0.1, 0.05, 0.025, 0.0125};

    SECTION("a smooth periodic perturbation decays at the curvature rate") {
        const double amp = 0.1;
        const double two_pi = 2.0 * std::numbers::pi;
        auto f = [&](const VecX& x) -> VecX {
            return v2(x[0] + amp * std::sin(two_pi * x[0]), x[1] + amp * std::sin(two_pi * x[1]));
        };
        const ModulusTable tab = differentiability_modulus(f, base, scales, 16);
        for (std::size_t i = 1; i < tab.modulus.size(); ++i) REQUIRE(tab.modulus[i] < tab.modulus[i - 1]);
        // curvature bound: amp (2 pi)^2 / 2 per unit scale
        const double bound = amp * two_pi * two_pi / 2.0;
        const double slope = tab.modulus.back() / tab.scales.back();
        REQUIRE(slope >= 0.8 * bound);
        REQUIRE(slope <= 1.2 * bound);
    }

    SECTION("a corner never becomes differentiable") {
        auto f = [](const VecX& x) -> VecX { return v2(std::abs(x[0]), x[1]); };
        const ModulusTable tab = differentiability_modulus(f, base, scales, 16);
        for (double m : tab.modulus) REQUIRE(m >= 0.9);  // stuck near 1, no decay
    }
}

TEST_CASE("complement density probe", "[diagnostics]") {
    SchottkySet set;
    set.n = 2;
    set.removed.push_back(Ball::round(v2(0.0, 0.0), 0.2));
    set.removed.push_back(Ball::round(v2(1.0, 0.0), 0.2));
    set.removed.push_back(Ball::round(v2(0.0, 1.0), 0.2));

    SECTION("interior points are fully surrounded by complement") {
        const DensityTable tab = density_probe(set, v2(0.5, 0.5), {0.05, 0.01}, 64, 0);
        for (double fr : tab.fraction) REQUIRE(fr >= 0.9);
    }

    SECTION("points on a peripheral sphere see about half complement without reflecting") {
        const DensityTable tab = density_probe(set, v2(0.2, 0.0), {0.01}, 256, 0);
        REQUIRE_THAT(tab.fraction[0], WithinAbs(0.5, 0.1));
    }

    SECTION("with reflections allowed everything lands") {
        const DensityTable tab = density_probe(set, v2(0.2, 0.0), {0.01}, 64, 20);
        REQUIRE_THAT(tab.fraction[0], WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("rescaled views", "[diagnostics]") {
    const MatX A = diag21();
    auto f = [&](const VecX& x) -> VecX { return A * x + VecX::Ones(2); };
    auto g = rescaled_map(f, v2(0.2, 0.9), 1e-3);
    REQUIRE(g(VecX::Zero(2)).norm() == 0.0);
    const VecX probe = v2(0.6, -0.4);
    REQUIRE((g(probe) - A * probe).norm() < 1e-9);
    REQUIRE_THROWS_AS(rescaled_map(f, v2(0, 0), 0.0), ConfigError);
}
