#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "qclab/denjoy.hpp"
#include "support.hpp"

using namespace qclab;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kGolden = 0.61803398874989484820;  // (sqrt 5 - 1) / 2
constexpr double kRootTwoFrac = 0.41421356237309504880;  // sqrt 2 - 1

VecX rho2() {
    VecX r(2);
    r << kGolden, kRootTwoFrac;
    return r;
}

}  // namespace

TEST_CASE("circle arithmetic", "[denjoy]") {
    REQUIRE(wrap_unit(0.25) == 0.25);
    REQUIRE(wrap_unit(1.0) == 0.0);
    REQUIRE(wrap_unit(-0.25) == 0.75);
    REQUIRE_THAT(wrap_unit(2.75), WithinAbs(0.75, 1e-15));
    REQUIRE_THAT(circle_distance(0.1, 0.9), WithinAbs(0.2, 1e-15));
    REQUIRE_THAT(circle_distance(0.9, 0.1), WithinAbs(0.2, 1e-15));
    REQUIRE(circle_distance(0.3, 0.3) == 0.0);
    REQUIRE_THAT(circle_distance(0.0, 0.5), WithinAbs(0.5, 1e-15));

    TorusChart chart{2};
    VecX v(2);
    v << 1.25, -0.25;
    const VecX w = chart.wrap(v);
    REQUIRE_THAT(w[0], WithinAbs(0.25, 1e-15));
    REQUIRE_THAT(w[1], WithinAbs(0.75, 1e-15));
    VecX bad(3);
    bad << 0.0, 0.0, 0.0;
    REQUIRE_THROWS_AS(chart.wrap(bad), ConfigError);
}

TEST_CASE("continued fractions classify rotation numbers", "[denjoy]") {
    SECTION("simple rationals are pinned with their lowest terms") {
        const IrrationalityCheck half = irrationality_check(0.5);
        REQUIRE(half.rational);
        REQUIRE(half.p == 1);
        REQUIRE(half.q == 2);

        const IrrationalityCheck third = irrationality_check(1.0 / 3.0);
        REQUIRE(third.rational);
        REQUIRE(third.p == 1);
        REQUIRE(third.q == 3);

        const IrrationalityCheck odd = irrationality_check(16.0 / 113.0);
        REQUIRE(odd.rational);
        REQUIRE(odd.p == 16);
        REQUIRE(odd.q == 113);
    }

    SECTION("the golden rotation is not rational within the search budget") {
        const IrrationalityCheck g = irrationality_check(kGolden);
        REQUIRE_FALSE(g.rational);
        REQUIRE(g.q >= 1);
        REQUIRE(g.error > 1e-14);
    }
}

TEST_CASE("minimality surrogate screens translation vectors", "[denjoy]") {
    REQUIRE(check_minimality(rho2()).minimal);

    VecX with_half(2);
    with_half << 0.5, kRootTwoFrac;
    const MinimalityReport r1 = check_minimality(with_half);
    REQUIRE_FALSE(r1.minimal);
    REQUIRE_FALSE(r1.failures.empty());

    VecX repeated(2);
    repeated << kGolden, kGolden;  // the difference of coordinates is 0
    REQUIRE_FALSE(check_minimality(repeated).minimal);
}

TEST_CASE("insertion weights follow their rules", "[denjoy]") {
    REQUIRE(weight_of(WeightRule::Dyadic, 0.3, 0) == 0.3);
    REQUIRE_THAT(weight_of(WeightRule::Dyadic, 0.3, 3), WithinAbs(0.3 / 8.0, 1e-17));
    REQUIRE(weight_of(WeightRule::Dyadic, 0.3, -3) == weight_of(WeightRule::Dyadic, 0.3, 3));
    REQUIRE_THAT(weight_of(WeightRule::InverseSquare, 0.4, 0), WithinAbs(0.1, 1e-17));
    REQUIRE_THAT(weight_of(WeightRule::InverseSquare, 0.4, 2), WithinAbs(0.025, 1e-17));
    REQUIRE(std::string(to_string(WeightRule::Dyadic)) == "dyadic");
    REQUIRE(std::string(to_string(WeightRule::InverseSquare)) == "inverse_square");
}

TEST_CASE("blown-up circles carry the rotation structure", "[denjoy]") {
    const int N = 20;
    const DenjoyCircle dc = build_denjoy_circle(kGolden, WeightRule::Dyadic, 0.3, N);

    SECTION("lengths, survival constant, and slopes") {
        REQUIRE_FALSE(dc.trivial);
        double total = 0.0;
        for (int k = -N; k <= N; ++k) total += dc.length_of(k);
        REQUIRE_THAT(dc.c, WithinAbs(1.0 - total, 1e-15));
        REQUIRE(dc.c > 0.0996);
        REQUIRE(dc.c < 0.1005);
        REQUIRE_THAT(dc.slope(0), WithinAbs(0.5, 1e-15));
        REQUIRE_THAT(dc.slope(-1), WithinAbs(2.0, 1e-15));
        REQUIRE_THROWS_AS(dc.slope(N), ConfigError);
        REQUIRE_THROWS_AS(dc.slope(-N - 1), ConfigError);
    }

    SECTION("inserted intervals are disjoint and ordered along the circle") {
        for (std::size_t i = 0; i + 1 < dc.slots.size(); ++i) {
            REQUIRE(dc.slots[i].a < dc.slots[i].b);
            REQUIRE(dc.slots[i].b < dc.slots[i + 1].a);
        }
        REQUIRE(dc.slots.back().b < 1.0);
    }

    SECTION("the collapse map flattens each interval onto its orbit point") {
        for (int k : {-15, -4, 0, 3, 18}) {
            const auto [a, b] = dc.interval(k);
            const double x = wrap_unit(static_cast<double>(k) * kGolden);
            REQUIRE_THAT(dc.h(a), WithinAbs(x, 1e-12));
            REQUIRE_THAT(dc.h(b), WithinAbs(x, 1e-12));
            REQUIRE_THAT(dc.h(0.5 * (a + b)), WithinAbs(x, 1e-12));
        }
    }

    SECTION("f sends interval endpoints to the successor interval") {
        for (int k : {-5, -1, 0, 1, 5}) {
            REQUIRE_THAT(dc.f(dc.interval_a(k)), WithinAbs(dc.interval_a(k + 1), 1e-12));
            REQUIRE_THAT(dc.f(dc.interval_b(k)), WithinAbs(dc.interval_b(k + 1), 1e-12));
        }
    }

    SECTION("semiconjugacy defect is numerically zero off the truncation patch") {
        REQUIRE(dc.artifacts.size() == 4);
        const DefectReport rep = semiconjugacy_defect(dc, 10000);
        REQUIRE(rep.grid == 10000);
        REQUIRE(rep.excluded >= 1);
        REQUIRE(rep.max_off_artifact <= 1e-9);
        REQUIRE(rep.max_defect >= rep.max_off_artifact);
    }

    SECTION("a corrupted interval map is caught by the defect scan") {
        DenjoyCircle bad = dc;
        for (double& v : bad.img) v = wrap_unit(v + 0.005);
        const DefectReport rep = semiconjugacy_defect(bad, 10000);
        REQUIRE(rep.max_off_artifact >= 1e-3);
    }

    SECTION("the base interval wanders") {
        const WanderingReport rep = wandering_check(dc, 2 * N);
        REQUIRE(rep.pass);
        REQUIRE(rep.first_return == -1);
        REQUIRE(rep.checked == 2 * N);
    }
}

TEST_CASE("zero insertion degenerates to the pure rotation", "[denjoy]") {
    const DenjoyCircle dc = build_denjoy_circle(kGolden, WeightRule::Dyadic, 0.0, 5);
    REQUIRE(dc.trivial);
    REQUIRE(dc.c == 1.0);
    REQUIRE(dc.f(0.3) == wrap_unit(0.3 + kGolden));
    REQUIRE(dc.h(0.3) == 0.3);
    const DefectReport rep = semiconjugacy_defect(dc, 10000);
    REQUIRE(rep.max_defect == 0.0);  // bitwise: both sides reduce to the same expression
    REQUIRE(rep.excluded == 0);
    REQUIRE_THROWS_AS(wandering_check(dc, 10), ConfigError);
    REQUIRE_THROWS_AS(dc.slope(0), ConfigError);
}

TEST_CASE("degenerate circle requests are rejected", "[denjoy]") {
    REQUIRE_THROWS_AS(build_denjoy_circle(0.25, WeightRule::Dyadic, 0.1, 5), ConfigError);
    REQUIRE_THROWS_MATCHES(build_denjoy_circle(0.25, WeightRule::Dyadic, 0.1, 5), ConfigError,
                           Catch::Matchers::MessageMatches(ContainsSubstring("rational")));
    REQUIRE_THROWS_AS(build_denjoy_circle(kGolden, WeightRule::Dyadic, 0.1, -1), ConfigError);
    REQUIRE_THROWS_AS(build_denjoy_circle(kGolden, WeightRule::Dyadic, -0.1, 5), ConfigError);
    // 0.4 * (3 - 2^-19) > 1: the inserted lengths cannot fit
    REQUIRE_THROWS_AS(build_denjoy_circle(kGolden, WeightRule::Dyadic, 0.4, 20), ConfigError);
    REQUIRE_THROWS_AS(semiconjugacy_defect(build_denjoy_circle(kGolden, WeightRule::Dyadic, 0.1, 2), 0),
                      ConfigError);
}

TEST_CASE("round torus scenes pack shrunken balls along the orbit", "[denjoy]") {
    SECTION("area precheck fires before any placement") {
        REQUIRE_THROWS_MATCHES(
            build_round_scene(rho2(), VecX::Zero(2), 50, RadiusRule::Constant, 0.08), ConfigError,
            Catch::Matchers::MessageMatches(ContainsSubstring("volume")));
    }

    SECTION("harmonic radii produce a disjoint packing") {
        const RoundDomainScene sc = build_round_scene(rho2(), VecX::Zero(2), 50, RadiusRule::Harmonic, 0.05);
        REQUIRE(sc.count == 50);
        REQUIRE(sc.radii[0] <= 0.025 + 1e-15);
        for (int k = 0; k < sc.count; ++k) {
            REQUIRE(sc.radii[static_cast<std::size_t>(k)] > 0.0);
            const VecX lift = static_cast<double>(k) * rho2();
            REQUIRE((sc.lift_centers[static_cast<std::size_t>(k)] - lift).norm() < 1e-12);
            for (int i = 0; i < 2; ++i) {
                REQUIRE(sc.centers[static_cast<std::size_t>(k)][i] >= 0.0);
                REQUIRE(sc.centers[static_cast<std::size_t>(k)][i] < 1.0);
            }
        }
        for (int i = 0; i < sc.count; ++i)
            for (int j = i + 1; j < sc.count; ++j) {
                const double d = torus_center_distance(sc.centers[static_cast<std::size_t>(i)],
                                                       sc.centers[static_cast<std::size_t>(j)], true);
                REQUIRE(d > sc.radii[static_cast<std::size_t>(i)] + sc.radii[static_cast<std::size_t>(j)]);
            }
    }

    SECTION("non-minimal translations are rejected") {
        VecX rho(2);
        rho << 0.5, kRootTwoFrac;
        REQUIRE_THROWS_AS(build_round_scene(rho, VecX::Zero(2), 10, RadiusRule::Harmonic, 0.05), ConfigError);
    }
}

TEST_CASE("similarity fits recover exact similarities", "[denjoy]") {
    std::mt19937_64 rng(0x51f7ull);
    std::uniform_real_distribution<double> uc(-2.0, 2.0), ur(0.2, 1.0);
    const double lambda = 1.7, theta = 0.4;
    Eigen::Matrix2d R;
    R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    VecX a(2);
    a << 0.3, -0.2;

    std::vector<VecX> src, dst;
    std::vector<double> sr, dr;
    for (int i = 0; i < 6; ++i) {
        VecX c(2);
        c << uc(rng), uc(rng);
        const double r = ur(rng);
        src.push_back(c);
        sr.push_back(r);
        dst.push_back(lambda * (R * c) + a);
        dr.push_back(lambda * r);
    }
    const SimilarityFit fit = fit_similarity(src, sr, dst, dr);
    REQUIRE(fit.ok);
    REQUIRE_THAT(fit.lambda, WithinAbs(lambda, 1e-12));
    REQUIRE((fit.T - R).norm() < 1e-9);
    REQUIRE((fit.a - a).norm() < 1e-11);
    REQUIRE(fit.residual <= 1e-11);

    REQUIRE_THROWS_AS(fit_similarity({src[0]}, {sr[0]}, {dst[0]}, {dr[0]}), ConfigError);
}

TEST_CASE("consecutive-ball fits witness the rigidity dichotomy", "[denjoy]") {
    VecX step(2);
    step << 0.3, 0.17;

    SECTION("equal radii along a translation orbit admit an isometry") {
        std::vector<VecX> centers;
        std::vector<double> radii;
        for (int k = 0; k <= 10; ++k) {
            centers.push_back(static_cast<double>(k) * step);
            radii.push_back(0.05);
        }
        const IsometryForcingReport rep = isometry_forcing_check(centers, radii);
        REQUIRE(rep.verdict == ObstructionVerdict::SimilarityFits);
        REQUIRE(rep.isometry);
        REQUIRE_THAT(rep.fit.lambda, WithinAbs(1.0, 1e-12));
        REQUIRE(rep.fit.residual <= 1e-12);
        REQUIRE(std::string(to_string(rep.verdict)) == "SIMILARITY_FITS");
    }

    SECTION("strictly decreasing radii force a visible residual") {
        std::vector<VecX> centers;
        std::vector<double> radii;
        for (int k = 0; k < 50; ++k) {
            centers.push_back(static_cast<double>(k) * step);
            radii.push_back(0.05 / (static_cast<double>(k) + 2.0));
        }
        const IsometryForcingReport rep = isometry_forcing_check(centers, radii);
        REQUIRE(rep.verdict == ObstructionVerdict::TheoremWitness);
        REQUIRE_FALSE(rep.isometry);
        REQUIRE(rep.fit.residual >= 1e-3);
        REQUIRE(rep.fit.residual <= 0.05);
        REQUIRE(std::string(to_string(rep.verdict)) == "THEOREM_WITNESS");
    }

    SECTION("geometric shrinking is a similarity but not an isometry") {
        std::vector<VecX> centers;
        std::vector<double> radii;
        VecX c0(2);
        c0 << 1.0, 0.3;
        const double s = 0.8;
        for (int k = 0; k < 8; ++k) {
            centers.push_back(std::pow(s, k) * c0);
            radii.push_back(0.04 * std::pow(s, k));
        }
        const IsometryForcingReport rep = isometry_forcing_check(centers, radii);
        REQUIRE(rep.verdict == ObstructionVerdict::SimilarityFits);
        REQUIRE_FALSE(rep.isometry);
        REQUIRE_THAT(rep.fit.lambda, WithinAbs(s, 1e-9));
    }

    SECTION("fewer than three balls are rejected") {
        std::vector<VecX> centers = {VecX::Zero(2), step};
        std::vector<double> radii = {0.1, 0.1};
        REQUIRE_THROWS_AS(isometry_forcing_check(centers, radii), ConfigError);
    }

    SECTION("a packed scene feeds the check through its lifted centers") {
        const RoundDomainScene sc = build_round_scene(rho2(), VecX::Zero(2), 12, RadiusRule::Harmonic, 0.05);
        const IsometryForcingReport rep = isometry_forcing_check(sc);
        REQUIRE(rep.verdict == ObstructionVerdict::TheoremWitness);
    }
}

TEST_CASE("volume counts cap the number of disjoint balls", "[denjoy]") {
    REQUIRE_THAT(unit_ball_volume(1), WithinAbs(2.0, 1e-12));
    REQUIRE_THAT(unit_ball_volume(2), WithinAbs(std::numbers::pi, 1e-12));
    REQUIRE_THAT(unit_ball_volume(3), WithinAbs(4.0 * std::numbers::pi / 3.0, 1e-12));

    const VolumeVerdict flat = volume_obstruction(2, 0.05, 1.0);
    REQUIRE(flat.finite);
    REQUIRE_THAT(flat.capacity, WithinAbs(127.32395447351626, 1e-8));
    REQUIRE(flat.n_max == 127);
    REQUIRE_FALSE(flat.contradiction);

    const VolumeVerdict solid = volume_obstruction(3, 0.1, 1.0);
    REQUIRE(solid.n_max == 238);

    REQUIRE_FALSE(volume_obstruction(2, 0.05, 1.0, 127).contradiction);
    REQUIRE(volume_obstruction(2, 0.05, 1.0, 128).contradiction);
    REQUIRE(volume_obstruction(3, 0.1, 1.0, 239).contradiction);

    const VolumeVerdict degenerate = volume_obstruction(2, 0.0, 1.0, 1000000);
    REQUIRE_FALSE(degenerate.finite);
    REQUIRE_FALSE(degenerate.contradiction);

    REQUIRE_THROWS_AS(volume_obstruction(0, 0.1, 1.0), ConfigError);
    REQUIRE_THROWS_AS(volume_obstruction(2, 0.1, 0.0), ConfigError);
    REQUIRE_THROWS_AS(volume_obstruction(2, -0.1, 1.0), ConfigError);
}

TEST_CASE("star discrepancy separates uniform from clustered orbits", "[denjoy]") {
    VecX g1(1);
    g1 << kGolden;
    const double uniform = star_discrepancy(g1, 10000);
    REQUIRE(uniform > 0.0);
    REQUIRE(uniform <= 0.01);

    VecX half(1);
    half << 0.5;
    REQUIRE(star_discrepancy(half, 1000) >= 0.4);

    const double pair = star_discrepancy(rho2(), 10000);
    REQUIRE(pair > 0.0);
    REQUIRE(pair <= 0.02);

    VecX four(4);
    four << kGolden, kRootTwoFrac, 0.267949192431122706, 0.236067977499789696;
    const double high_dim = star_discrepancy(four, 2000);
    REQUIRE(high_dim >= 0.0);
    REQUIRE(high_dim <= 1.0);

    REQUIRE_THROWS_AS(star_discrepancy(g1, 0), ConfigError);
}
