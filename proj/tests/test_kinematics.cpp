#include "jamlink/kinematics.hpp"

#include "jamlink/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace jamlink;

TEST_CASE("arc pose closed forms") {
    SUBCASE("straight link") {
        const auto pose = kin::arc_pose({220.0, 0.0, 0.0});
        CHECK(pose.tip_x_mm == 0.0);
        CHECK(pose.tip_y_mm == 220.0);
        CHECK(pose.tip_tangent_deg == 0.0);
    }
    SUBCASE("semicircle") {
        const auto pose = kin::arc_pose({220.0, 180.0, 0.0});
        CHECK(pose.tip_x_mm == doctest::Approx(440.0 / std::numbers::pi).epsilon(1e-12)); // 140.056...
        CHECK(pose.tip_y_mm == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
        CHECK(pose.tip_tangent_deg == 180.0);
    }
    SUBCASE("quarter turn at default length") {
        const auto pose = kin::arc_pose({201.0, 90.0, 0.0});
        const double radius = 402.0 / std::numbers::pi; // 127.9606...
        CHECK(pose.tip_x_mm == doctest::Approx(radius).epsilon(1e-12));
        CHECK(pose.tip_y_mm == doctest::Approx(radius).epsilon(1e-12));
        CHECK(radius == doctest::Approx(127.96).epsilon(1e-4));
    }
    SUBCASE("continuous at zero bend") {
        const auto tiny = kin::arc_pose({220.0, 1e-10, 0.0});
        CHECK(std::abs(tiny.tip_x_mm - 0.0) < 1e-9);
        CHECK(std::abs(tiny.tip_y_mm - 220.0) < 1e-9);
    }
    SUBCASE("invalid arc length") {
        CHECK_THROWS_AS(kin::arc_pose({0.0, 10.0, 0.0}), Error);
    }
}

TEST_CASE("slot profile under uniform curvature") {
    const sheath::FlapPattern pattern;
    const double theta_max = sheath::max_bend_angle_deg(pattern);

    SUBCASE("no bend, no extension") {
        const auto profile = kin::slot_profile(pattern, {201.0, 0.0, 0.0});
        CHECK(profile.intervals.size() == 31);
        for (const auto& interval : profile.intervals) {
            CHECK(interval.outer_extension_mm == 0.0);
            CHECK(interval.inner_extension_mm == 0.0);
        }
    }
    SUBCASE("slots saturate at exactly D/2 at the maximum bend") {
        const auto profile = kin::slot_profile(pattern, {201.0, theta_max, 0.0});
        for (const auto& interval : profile.intervals) {
            CHECK(interval.outer_extension_mm == doctest::Approx(pattern.slot_length_D_mm / 2.0).epsilon(1e-12));
            CHECK(interval.inner_extension_mm == doctest::Approx(-pattern.slot_length_D_mm / 2.0).epsilon(1e-12));
        }
    }
    SUBCASE("half the maximum bend uses about half the slot") {
        const auto profile = kin::slot_profile(pattern, {201.0, theta_max / 2.0, 0.0});
        CHECK(profile.intervals.front().outer_extension_mm == doctest::Approx(1.0).epsilon(0.01));
    }
    SUBCASE("interval angles sum back to the commanded bend") {
        const double bend = 123.4;
        const auto profile = kin::slot_profile(pattern, {201.0, bend, 0.0});
        double sum = 0.0;
        for (std::size_t i = 0; i < profile.intervals.size(); ++i) sum += profile.interval_angle_deg;
        CHECK(sum == doctest::Approx(bend).epsilon(1e-12));
    }
    SUBCASE("bend beyond the maximum names the limit") {
        CHECK_THROWS_WITH_AS(kin::slot_profile(pattern, {201.0, 200.0, 0.0}), doctest::Contains("187"),
                             Error);
        try {
            kin::slot_profile(pattern, {201.0, 200.0, 0.0});
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::KinematicDomain);
        }
    }
    SUBCASE("extensions stay within the slot for any reachable bend") {
        for (double bend = 0.0; bend <= theta_max; bend += theta_max / 16.0) {
            const auto profile = kin::slot_profile(pattern, {201.0, bend, 0.0});
            for (const auto& interval : profile.intervals) {
                CHECK(interval.outer_extension_mm <= pattern.slot_length_D_mm / 2.0 + 1e-12);
                CHECK(interval.inner_extension_mm >= -pattern.slot_length_D_mm / 2.0 - 1e-12);
            }
        }
    }
}
