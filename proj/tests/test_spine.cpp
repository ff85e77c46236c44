#include "jamlink/spine.hpp"

#include "jamlink/error.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace jamlink;
using spine::SpineDesign;

TEST_CASE("central gap of the reference spine") {
    const SpineDesign s; // B=9, Ds=32.5, Gc=0, w=8
    const double gap = spine::central_gap_mm(s);
    CHECK(gap == doctest::Approx(16.25 - std::sqrt(65.0)).epsilon(1e-12)); // 8.1877...
    CHECK(std::abs(gap - 8.2) < 0.05);
}

TEST_CASE("central gap special and derived cases") {
    SUBCASE("root term vanishes when B equals Gc + w/2") {
        SpineDesign s;
        s.ligament_beam_B_mm = 4.0; // = 0 + 8/2
        CHECK(spine::central_gap_mm(s) == 16.25);
    }
    SUBCASE("longer beam shrinks the gap") {
        SpineDesign s;
        s.ligament_beam_B_mm = 9.6;
        CHECK(spine::central_gap_mm(s) == doctest::Approx(7.5230).epsilon(1e-4));
    }
    SUBCASE("imaginary root is an infeasibility error naming the operands") {
        SpineDesign s;
        s.ligament_beam_B_mm = 3.0;
        CHECK_THROWS_WITH_AS(spine::central_gap_mm(s), doctest::Contains("Gc + w/2"), Error);
        try {
            spine::central_gap_mm(s);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::Infeasible);
        }
    }
}

TEST_CASE("max beam length inverts the central gap") {
    const SpineDesign s;
    SUBCASE("reference bound at 7.5mm gap") {
        const double beam = spine::max_beam_length_mm(s, 7.5);
        CHECK(beam == doctest::Approx(9.6209).epsilon(1e-4));
        CHECK(std::abs(beam - 9.6) < 0.05);
    }
    SUBCASE("narrower segment") {
        SpineDesign narrow = s;
        narrow.segment_diameter_Ds_mm = 30.0;
        CHECK(spine::max_beam_length_mm(narrow, 7.5) == 8.5); // sqrt(72.25) is exact
    }
    SUBCASE("gap at the segment radius is infeasible") {
        CHECK_THROWS_AS(spine::max_beam_length_mm(s, 16.25), Error);
    }
}

TEST_CASE("beam length / central gap round trip") {
    std::mt19937 rng(2024);
    for (int i = 0; i < 500; ++i) {
        SpineDesign s;
        s.segment_diameter_Ds_mm = std::uniform_real_distribution<double>(10.0, 60.0)(rng);
        s.segment_height_w_mm = std::uniform_real_distribution<double>(2.0, 12.0)(rng);
        s.compressed_gap_Gc_mm = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
        s.neutral_gap_Gn_mm = s.compressed_gap_Gc_mm + 1.0;
        s.extended_gap_Ge_mm = s.neutral_gap_Gn_mm + 1.0;
        const double target_gap =
            std::uniform_real_distribution<double>(0.01, 0.95)(rng) * s.segment_diameter_Ds_mm / 2.0;
        s.ligament_beam_B_mm = spine::max_beam_length_mm(s, target_gap);
        CHECK(spine::central_gap_mm(s) == doctest::Approx(target_gap).epsilon(1e-12));
    }
}

TEST_CASE("central gap is antitone in B and monotone in Ds") {
    std::mt19937 rng(99);
    for (int i = 0; i < 300; ++i) {
        SpineDesign s;
        s.segment_diameter_Ds_mm = std::uniform_real_distribution<double>(20.0, 60.0)(rng);
        s.ligament_beam_B_mm = std::uniform_real_distribution<double>(4.5, 12.0)(rng);
        const double gap = spine::central_gap_mm(s);

        SpineDesign longer = s;
        longer.ligament_beam_B_mm += 0.5;
        CHECK(spine::central_gap_mm(longer) < gap);

        SpineDesign wider = s;
        wider.segment_diameter_Ds_mm += 1.0;
        CHECK(spine::central_gap_mm(wider) > gap);
    }
}

TEST_CASE("spine envelope of the reference design") {
    const auto env = spine::spine_envelope(SpineDesign{});
    CHECK(env.rigid_length_mm == 132.0);
    CHECK(env.compressed_length_mm == 132.0);
    CHECK(env.extended_length_mm == 297.0);
    CHECK(env.neutral_length_mm == doctest::Approx(199.95).epsilon(1e-12));
    CHECK(std::abs(env.neutral_length_mm - 202.0) <= 3.0);
    CHECK(env.flexible_travel_mm == 165.0);
}

TEST_CASE("spine envelope properties") {
    SUBCASE("zero gaps leave only the rigid chain") {
        SpineDesign s;
        s.compressed_gap_Gc_mm = s.neutral_gap_Gn_mm = s.extended_gap_Ge_mm = 0.0;
        const auto env = spine::spine_envelope(s);
        CHECK(env.compressed_length_mm == env.rigid_length_mm);
        CHECK(env.neutral_length_mm == env.rigid_length_mm);
        CHECK(env.extended_length_mm == env.rigid_length_mm);
    }
    SUBCASE("lengths are affine in each gap with slope gap_count") {
        SpineDesign s;
        const double delta = 0.37;
        SpineDesign shifted = s;
        shifted.neutral_gap_Gn_mm += delta;
        const double diff = spine::spine_envelope(shifted).neutral_length_mm -
                            spine::spine_envelope(s).neutral_length_mm;
        CHECK(diff == doctest::Approx(s.gap_count * delta).epsilon(1e-12));
    }
    SUBCASE("default gap count follows the chain rule") {
        CHECK(spine::default_gap_count(SpineDesign{}) == 15);
    }
}

TEST_CASE("sheath compatibility") {
    const auto sheath_env = sheath::derive_lengths(sheath::FlapPattern{});
    SUBCASE("reference spine passes against the reference sheath") {
        const auto report = spine::check_compatibility(spine::spine_envelope(SpineDesign{}), sheath_env);
        CHECK(report.pass);
        CHECK(report.verdict == "PASS");
        CHECK(report.spine_rigid_flexible_ratio == doctest::Approx(132.0 / 165.0));
        CHECK(report.sheath_rigid_flexible_ratio == doctest::Approx(139.0 / 124.0));
        CHECK(report.ratio_ok);
    }
    SUBCASE("boundary equality is admitted") {
        spine::SpineEnvelope env;
        env.compressed_length_mm = sheath_env.l_min_mm;
        env.extended_length_mm = sheath_env.l_max_mm;
        env.rigid_length_mm = 100.0;
        CHECK(spine::check_compatibility(env, sheath_env).pass);
    }
    SUBCASE("a stiff spine limits compression") {
        spine::SpineEnvelope env;
        env.compressed_length_mm = 150.0;
        env.extended_length_mm = 300.0;
        env.rigid_length_mm = 150.0;
        const auto report = spine::check_compatibility(env, sheath_env);
        CHECK_FALSE(report.pass);
        CHECK(report.verdict == "FAIL: spine limits compression");
    }
    SUBCASE("PASS implies the restated flexible-travel inequalities") {
        const SpineDesign s;
        const auto env = spine::spine_envelope(s);
        const auto report = spine::check_compatibility(env, sheath_env);
        REQUIRE(report.pass);
        CHECK(s.gap_count * s.extended_gap_Ge_mm >= sheath_env.l_max_mm - env.rigid_length_mm);
        CHECK(env.rigid_length_mm + s.gap_count * s.compressed_gap_Gc_mm <= sheath_env.l_min_mm);
    }
}

TEST_CASE("spine validation") {
    SUBCASE("reference design is valid") { CHECK(spine::validate_spine(SpineDesign{}).ok()); }
    SUBCASE("gap ordering enforced") {
        SpineDesign s;
        s.neutral_gap_Gn_mm = 12.0; // above Ge=11
        CHECK_FALSE(spine::validate_spine(s).ok());
    }
}
