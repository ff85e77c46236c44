#include "jamlink/design_io.hpp"

#include "jamlink/error.hpp"
#include "jamlink/stiffness.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace jamlink;

#ifndef TEST_DATA_DIR
#define TEST_DATA_DIR "data"
#endif

namespace {
const std::string kDataDir = TEST_DATA_DIR;
}

TEST_CASE("design JSON round trip") {
    LinkDesign design;
    design.name = "round-trip";
    design.spine = spine::SpineDesign{};
    design.stiffness_model = stiffness::StiffnessModelParams{};
    design.jamming.vacuum_gauge_pressure_kPa = -42.5;

    const auto doc = io::design_to_json(design);
    const auto parsed = io::design_from_json(io::json::parse(doc.dump()));
    CHECK(io::design_to_json(parsed).dump() == doc.dump());
    CHECK(parsed.name == "round-trip");
    CHECK(parsed.jamming.vacuum_gauge_pressure_kPa == -42.5);
    REQUIRE(parsed.spine.has_value());
    CHECK(parsed.spine->gap_count == 15);
}

TEST_CASE("schema violations carry field paths") {
    SUBCASE("missing pattern") {
        CHECK_THROWS_WITH_AS(io::design_from_json(io::json::parse("{\"name\":\"x\"}")),
                             doctest::Contains("pattern"), Error);
    }
    SUBCASE("wrong type inside pattern") {
        io::json doc = io::json::parse(io::design_to_json(LinkDesign{}).dump());
        doc["pattern"]["loop_count_N"] = "many";
        CHECK_THROWS_WITH_AS(io::design_from_json(doc), doctest::Contains("pattern.loop_count_N"), Error);
    }
    SUBCASE("schema errors map to exit code 2") {
        try {
            io::design_from_json(io::json::parse("[]"));
            FAIL("expected a schema error");
        } catch (const Error& e) {
            CHECK(e.exit_code() == 2);
        }
    }
}

TEST_CASE("shipped reference design loads") {
    const auto design = io::load_design(kDataDir + "/reference-link.json");
    CHECK(design.pattern.loop_count_N == 32);
    REQUIRE(design.spine.has_value());
    CHECK(design.spine->segment_count == 14);
    CHECK_FALSE(design.stiffness_model.has_value());
}

TEST_CASE("trace CSV round trip") {
    const auto layer = stiffness::layer_variant(sheath::FlapPattern{});
    const auto trace = stiffness::synthesize_trace(layer, 45.0, sheath::JammingState{},
                                                   stiffness::StiffnessModelParams{});
    std::ostringstream os;
    io::write_trace_csv(trace, os);
    std::istringstream is(os.str());
    const auto parsed = io::read_trace_csv(is);
    REQUIRE(parsed.samples.size() == trace.samples.size());
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        CHECK(parsed.samples[i].displacement_mm == doctest::Approx(trace.samples[i].displacement_mm).epsilon(1e-6));
        CHECK(parsed.samples[i].force_N == doctest::Approx(trace.samples[i].force_N).epsilon(1e-6));
        CHECK(parsed.samples[i].phase == trace.samples[i].phase);
    }
}

TEST_CASE("trace CSV rejects malformed input") {
    std::istringstream bad_header("displacement,force\n1,2\n");
    CHECK_THROWS_AS(io::read_trace_csv(bad_header), Error);
    std::istringstream bad_field("time_s,displacement_mm,force_N,phase\n0,abc,1,loading\n");
    CHECK_THROWS_AS(io::read_trace_csv(bad_field), Error);
    std::istringstream bad_phase("time_s,displacement_mm,force_N,phase\n0,1,1,sideways\n");
    CHECK_THROWS_AS(io::read_trace_csv(bad_phase), Error);
}

TEST_CASE("trial filename convention") {
    const auto info = io::parse_trial_filename("layer_90deg_trial3.csv");
    CHECK(info.recognized);
    CHECK(info.variant == "layer");
    CHECK(info.angle_deg == 90.0);
    CHECK(info.trial == 3);

    const auto spined = io::parse_trial_filename("layer_with_spine_180deg_trial10.csv");
    CHECK(spined.recognized);
    CHECK(spined.variant == "layer_with_spine");
    CHECK(spined.angle_deg == 180.0);

    CHECK_FALSE(io::parse_trial_filename("notes.csv").recognized);
    CHECK_FALSE(io::parse_trial_filename("layer_90deg.csv").recognized);
}

TEST_CASE("shipped calibration maxima load against the reference design") {
    const auto design = io::load_design(kDataDir + "/reference-link.json");
    const auto targets = io::load_calibration_targets_csv(kDataDir + "/reference-maxima.csv", design);
    REQUIRE(targets.size() == 9);
    CHECK(targets[0].variant.kind == stiffness::VariantKind::Layer);
    CHECK(targets[0].measured_max_force_N == 11.41);
    CHECK(targets[5].variant.kind == stiffness::VariantKind::LayerWithSpine);
    CHECK(targets[5].measured_max_force_N == 31.33);
    CHECK(targets[8].variant.kind == stiffness::VariantKind::Granular);
}

TEST_CASE("diameter CSV loads") {
    const auto dir = std::filesystem::temp_directory_path() / "jamlink_io_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "layer_diameters.csv").string();
    io::write_text_file(path, "angle_deg,diameter_mm\n0,38.0\n90,35.5\n180,28.31\n");
    const auto series = io::load_diameter_csv(path);
    REQUIRE(series.points.size() == 3);
    CHECK(series.points[2].second == 28.31);
    std::filesystem::remove_all(dir);
}

TEST_CASE("targets and bounds documents") {
    const auto targets = io::targets_from_json(io::json::parse(R"({
        "min_bend_angle_deg": 187,
        "min_central_gap_mm": 7.5,
        "length_range": {"l_min_at_most_mm": 139, "l_max_at_least_mm": 263},
        "sheath_diameter_mm": {"min": 30, "max": 45},
        "weights": {"force_per_diameter": 1.0, "central_gap": 0.1}
    })"));
    CHECK(targets.min_bend_angle_deg == 187.0);
    CHECK(targets.length_l_min_at_most_mm == 139.0);
    CHECK(targets.sheath_diameter_hi_mm == 45.0);
    CHECK(targets.weight_central_gap == 0.1);

    const auto box = io::bounds_from_json(io::json::parse(R"({
        "phi": {"min": 30, "max": 45, "steps": 4},
        "N": {"min": 24, "max": 40, "steps": 5}
    })"));
    CHECK(box.ranges.size() == 2);
    CHECK(box.ranges.at("phi").steps == 4);
    CHECK(box.base.spine.has_value()); // default base carries the reference spine
}

TEST_CASE("io failures surface as exit-code-4 errors") {
    try {
        io::load_design("/nonexistent/path/design.json");
        FAIL("expected an io error");
    } catch (const Error& e) {
        CHECK(e.exit_code() == 4);
    }
}
