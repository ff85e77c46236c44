#include "jamlink/stiffness.hpp"

#include "jamlink/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace jamlink;
using stiffness::CalibrationTarget;
using stiffness::LinkVariant;
using stiffness::StiffnessModelParams;
using stiffness::VariantKind;

namespace {

const sheath::JammingState kEvacuated{};
const sheath::FlapPattern kPattern{};
const spine::SpineDesign kSpine{};

std::vector<CalibrationTarget> reference_targets() {
    const auto layer = stiffness::layer_variant(kPattern);
    const auto with_spine = stiffness::layer_with_spine_variant(kPattern, kSpine);
    const auto granular = stiffness::granular_variant();
    return {
        {layer, 0.0, 11.41},      {layer, 90.0, 15.92},      {layer, 180.0, 10.33},
        {with_spine, 0.0, 5.12},  {with_spine, 90.0, 16.02}, {with_spine, 180.0, 31.33},
        {granular, 0.0, 2.76},    {granular, 90.0, 7.14},    {granular, 180.0, 11.55},
    };
}

} // namespace

TEST_CASE("unjammed link reduces to a linear spring") {
    StiffnessModelParams params;
    params.bend_gain_per_rad2 = 0.0;
    const double f = stiffness::predict_max_force_N(stiffness::layer_variant(kPattern), 0.0, {0.0, 101.9}, params);
    CHECK(f == params.unjammed_stiffness_N_per_mm * stiffness::kReferenceDeflectionMm);
}

TEST_CASE("granular variant needs its empirical override") {
    CHECK_THROWS_WITH_AS(
        stiffness::predict_max_force_N(stiffness::granular_variant(), 0.0, kEvacuated, StiffnessModelParams{}),
        doctest::Contains("granular variant has no predictive model"), Error);

    StiffnessModelParams params;
    params.granular_stiffness_N_per_mm = 0.276;
    params.granular_bend_gain_per_rad = 1.0;
    const double f0 = stiffness::predict_max_force_N(stiffness::granular_variant(), 0.0, kEvacuated, params);
    CHECK(f0 == doctest::Approx(2.76));
    const double f180 = stiffness::predict_max_force_N(stiffness::granular_variant(), 180.0, kEvacuated, params);
    CHECK(f180 == doctest::Approx(2.76 * (1.0 + std::numbers::pi)));
}

TEST_CASE("buckling criterion") {
    const StiffnessModelParams params;
    const auto layer = stiffness::layer_variant(kPattern);
    const auto with_spine = stiffness::layer_with_spine_variant(kPattern, kSpine);
    const auto granular = stiffness::granular_variant();

    CHECK(stiffness::buckled(layer, 180.0, params));       // ratio 0.745 < 0.8
    CHECK_FALSE(stiffness::buckled(layer, 90.0, params));  // ratio 0.873 >= 0.8
    CHECK_FALSE(stiffness::buckled(layer, 0.0, params));
    CHECK_FALSE(stiffness::buckled(with_spine, 180.0, params)); // spine prevents it
    CHECK_FALSE(stiffness::buckled(granular, 180.0, params));   // ratio 0.929 stays high

    SUBCASE("layer crosses the threshold strictly between 90 and 180 degrees") {
        bool crossed = false;
        for (double bend = 90.0; bend <= 180.0; bend += 1.0) {
            if (stiffness::buckled(layer, bend, params)) {
                crossed = true;
                CHECK(bend > 90.0);
                break;
            }
        }
        CHECK(crossed);
    }
}

TEST_CASE("ovalization rate fitting") {
    CHECK(stiffness::fit_ovalization_rate({{180.0, 0.745}}) ==
          doctest::Approx((1.0 - 0.745) / std::numbers::pi).epsilon(1e-12));
    const double rate = stiffness::fit_ovalization_rate({{90.0, 0.96}, {180.0, 0.92}});
    CHECK(rate > 0.0);
    CHECK(rate < 0.1);
}

TEST_CASE("calibration on the nine reference maxima") {
    const auto result = stiffness::calibrate(reference_targets(), kEvacuated);
    CHECK(result.max_abs_relative_residual <= 0.15);

    const auto& params = result.params;
    const auto layer = stiffness::layer_variant(kPattern);
    const auto with_spine = stiffness::layer_with_spine_variant(kPattern, kSpine);

    const double layer180 = stiffness::predict_max_force_N(layer, 180.0, kEvacuated, params);
    const double spine0 = stiffness::predict_max_force_N(with_spine, 0.0, kEvacuated, params);
    const double spine90 = stiffness::predict_max_force_N(with_spine, 90.0, kEvacuated, params);
    const double spine180 = stiffness::predict_max_force_N(with_spine, 180.0, kEvacuated, params);

    SUBCASE("qualitative orderings survive the fit") {
        CHECK(spine180 > layer180);
        CHECK(spine180 > spine90);
        CHECK(spine90 > spine0);
    }
    SUBCASE("bend ratio matches the measured 1.956 within 15%") {
        CHECK(spine180 / spine90 == doctest::Approx(31.33 / 16.02).epsilon(0.15));
    }
    SUBCASE("granular fit is monotone in bend angle") {
        const auto granular = stiffness::granular_variant();
        const double g0 = stiffness::predict_max_force_N(granular, 0.0, kEvacuated, params);
        const double g90 = stiffness::predict_max_force_N(granular, 90.0, kEvacuated, params);
        const double g180 = stiffness::predict_max_force_N(granular, 180.0, kEvacuated, params);
        CHECK(g0 < g90);
        CHECK(g90 < g180);
    }
}

TEST_CASE("degenerate calibrations") {
    SUBCASE("single granular target fits exactly") {
        const std::vector<CalibrationTarget> targets = {{stiffness::granular_variant(), 0.0, 5.0}};
        const auto result = stiffness::calibrate(targets, kEvacuated);
        CHECK(result.max_abs_relative_residual <= 1e-6);
    }
    SUBCASE("single layer target fits exactly") {
        const std::vector<CalibrationTarget> targets = {{stiffness::layer_variant(kPattern), 0.0, 11.41}};
        const auto result = stiffness::calibrate(targets, kEvacuated);
        CHECK(result.max_abs_relative_residual <= 1e-6);
    }
    SUBCASE("empty target set is an error") {
        CHECK_THROWS_AS(stiffness::calibrate({}, kEvacuated), Error);
    }
}

TEST_CASE("parallel and serial calibration agree bit for bit") {
    const auto a = stiffness::calibrate(reference_targets(), kEvacuated);
    const auto b = stiffness::calibrate_serial(reference_targets(), kEvacuated);
    CHECK(a.params.jam_stiffness_scale == b.params.jam_stiffness_scale);
    CHECK(a.params.bend_gain_per_rad2 == b.params.bend_gain_per_rad2);
    CHECK(a.params.buckling_force_knockdown == b.params.buckling_force_knockdown);
    CHECK(a.params.weak_end_factor == b.params.weak_end_factor);
    CHECK(a.params.granular_stiffness_N_per_mm == b.params.granular_stiffness_N_per_mm);
    CHECK(a.params.granular_bend_gain_per_rad == b.params.granular_bend_gain_per_rad);
    CHECK(a.max_abs_relative_residual == b.max_abs_relative_residual);
}

TEST_CASE("prediction is monotone in pressure and bend") {
    const auto result = stiffness::calibrate(reference_targets(), kEvacuated);
    const auto& params = result.params;
    const auto layer = stiffness::layer_variant(kPattern);
    const auto with_spine = stiffness::layer_with_spine_variant(kPattern, kSpine);

    SUBCASE("pressure") {
        double previous = -1.0;
        for (double gauge = 0.0; gauge <= 90.0; gauge += 10.0) {
            const double f =
                stiffness::predict_max_force_N(layer, 0.0, {-gauge, 101.9}, params);
            CHECK(f >= previous);
            previous = f;
        }
    }
    SUBCASE("bend angle, non-buckling variant") {
        double previous = -1.0;
        for (double bend = 0.0; bend <= 180.0; bend += 5.0) {
            const double f = stiffness::predict_max_force_N(with_spine, bend, kEvacuated, params);
            CHECK(f >= previous);
            previous = f;
        }
    }
}

TEST_CASE("synthesized traces") {
    const auto result = stiffness::calibrate(reference_targets(), kEvacuated);
    StiffnessModelParams params = result.params;
    const auto layer = stiffness::layer_variant(kPattern);

    SUBCASE("peak equals the prediction exactly") {
        const auto trace = stiffness::synthesize_trace(layer, 0.0, kEvacuated, params);
        CHECK(trace.max_loading_force_N() ==
              stiffness::predict_max_force_N(layer, 0.0, kEvacuated, params));
        CHECK(trace.max_displacement_mm() == 10.0);
        CHECK(trace.samples.front().displacement_mm == 0.0);
        CHECK(trace.samples.back().displacement_mm == 0.0);
    }
    SUBCASE("force is non-negative and peaks on the loading stroke") {
        const auto trace = stiffness::synthesize_trace(layer, 90.0, kEvacuated, params);
        double best = -1.0;
        std::size_t best_index = 0;
        for (std::size_t i = 0; i < trace.samples.size(); ++i) {
            CHECK(trace.samples[i].force_N >= 0.0);
            if (trace.samples[i].force_N > best) {
                best = trace.samples[i].force_N;
                best_index = i;
            }
        }
        CHECK(trace.samples[best_index].phase == Phase::Loading);
        CHECK(trace.samples[best_index].displacement_mm == 10.0);
    }
    SUBCASE("no hysteresis means the strokes coincide") {
        params.hysteresis_fraction = 0.0;
        const auto trace = stiffness::synthesize_trace(layer, 0.0, kEvacuated, params);
        for (const auto& s : trace.samples) {
            if (s.phase != Phase::Unloading) continue;
            for (const auto& l : trace.samples) {
                if (l.phase == Phase::Loading && l.displacement_mm == s.displacement_mm) {
                    CHECK(s.force_N == doctest::Approx(l.force_N).epsilon(1e-12));
                    break;
                }
            }
        }
    }
    SUBCASE("full hysteresis drops the force at the peak") {
        params.hysteresis_fraction = 1.0;
        const auto trace = stiffness::synthesize_trace(layer, 0.0, kEvacuated, params);
        for (const auto& s : trace.samples)
            if (s.phase == Phase::Unloading) CHECK(s.force_N == 0.0);
    }
}

TEST_CASE("variant structural validation") {
    CHECK_THROWS_AS(stiffness::validate_variant({VariantKind::Layer, std::nullopt, std::nullopt}), Error);

    spine::SpineDesign stubby = kSpine;
    stubby.extended_gap_Ge_mm = 5.0; // cannot reach the sheath's l_max
    stubby.neutral_gap_Gn_mm = 4.0;
    CHECK_THROWS_AS(stiffness::validate_variant(stiffness::layer_with_spine_variant(kPattern, stubby)), Error);
    CHECK_NOTHROW(stiffness::validate_variant(stiffness::layer_with_spine_variant(kPattern, kSpine)));
}
