#include "jamlink/analyze.hpp"
#include "jamlink/design_io.hpp"
#include "jamlink/error.hpp"
#include "jamlink/kinematics.hpp"
#include "jamlink/optimize.hpp"
#include "jamlink/pattern.hpp"
#include "jamlink/stiffness.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace jamlink;

namespace {

struct GlobalOptions {
    std::string config_path;
    long seed = 0; // reserved; current pipelines are grid-deterministic
    bool quiet = false;
};

io::ToolConfig resolve_config(const GlobalOptions& global) {
    if (!global.config_path.empty()) return io::load_config(global.config_path);
    if (const char* env = std::getenv("JAMLINK_CONFIG"); env && *env) return io::load_config(env);
    return {};
}

std::string fmt(double v, int decimals = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

// ---------------------------------------------------------------- report

int cmd_report(const GlobalOptions& global, const std::string& design_path, const std::string& out_path) {
    const io::ToolConfig config = resolve_config(global);
    const LinkDesign design = io::load_design(design_path);

    io::ordered_json report;
    report["name"] = design.name;
    bool valid = true;

    const auto pattern_report = sheath::validate_pattern(design.pattern);
    report["pattern_valid"] = pattern_report.ok();
    if (!pattern_report.ok()) {
        valid = false;
        io::ordered_json violations = io::ordered_json::array();
        for (const auto& v : pattern_report.violations) violations.push_back(v.message());
        report["pattern_violations"] = violations;
        if (!global.quiet) {
            std::cout << "design: " << design.name << "\n";
            std::cout << "pattern: INVALID (" << pattern_report.summary() << ")\n";
        }
        if (!out_path.empty()) io::write_text_file(out_path, report.dump(2) + "\n");
        return 3;
    }

    const auto env = sheath::derive_lengths(design.pattern);
    const double theta_max = sheath::max_bend_angle_deg(design.pattern, config.angle_kernel);
    const double holding = sheath::jamming_holding_force_N(design.pattern, design.jamming);

    report["length_envelope_mm"] = {{"l_max", env.l_max_mm}, {"l_min", env.l_min_mm}, {"l_default", env.l_default_mm}};
    report["max_bend_angle_deg"] = theta_max;
    report["angle_kernel"] = sheath::to_string(config.angle_kernel);
    report["holding_force_N"] = holding;
    report["gauge_pressure_kPa"] = design.jamming.vacuum_gauge_pressure_kPa;
    report["absolute_pressure_kPa"] = sheath::absolute_pressure_kPa(design.jamming);

    if (!global.quiet) {
        std::cout << "design: " << design.name << "\n";
        std::cout << "pattern: valid\n";
        std::cout << "length envelope: l_max " << fmt(env.l_max_mm) << " mm, l_min " << fmt(env.l_min_mm)
                  << " mm, default " << fmt(env.l_default_mm) << " mm\n";
        std::cout << "max bend angle: " << fmt(theta_max) << " deg (" << sheath::to_string(config.angle_kernel)
                  << " kernel)\n";
        std::cout << "holding force: " << fmt(holding) << " N at " << fmt(design.jamming.vacuum_gauge_pressure_kPa, 1)
                  << " kPa gauge (" << fmt(sheath::absolute_pressure_kPa(design.jamming), 1) << " kPa absolute)\n";
    }

    if (design.spine) {
        const auto spine_report = spine::validate_spine(*design.spine);
        if (!spine_report.ok()) {
            valid = false;
            report["spine_valid"] = false;
            report["spine_violations"] = spine_report.summary();
            if (!global.quiet) std::cout << "spine: INVALID (" << spine_report.summary() << ")\n";
        } else {
            const double gap = spine::central_gap_mm(*design.spine); // throws exit-3 error when imaginary
            const auto spine_env = spine::spine_envelope(*design.spine);
            const auto compat = spine::check_compatibility(spine_env, env);
            report["spine_valid"] = true;
            report["central_gap_mm"] = gap;
            report["spine_envelope_mm"] = {{"compressed", spine_env.compressed_length_mm},
                                           {"neutral", spine_env.neutral_length_mm},
                                           {"extended", spine_env.extended_length_mm},
                                           {"rigid", spine_env.rigid_length_mm}};
            report["compatibility"] = {{"verdict", compat.verdict},
                                       {"pass", compat.pass},
                                       {"spine_rigid_flexible_ratio", compat.spine_rigid_flexible_ratio},
                                       {"sheath_rigid_flexible_ratio", compat.sheath_rigid_flexible_ratio},
                                       {"ratio_ok", compat.ratio_ok}};
            if (!global.quiet) {
                std::cout << "spine: central gap " << fmt(gap) << " mm" << (gap < 0.0 ? " (infeasible)" : "")
                          << "\n";
                std::cout << "spine envelope: compressed " << fmt(spine_env.compressed_length_mm) << " mm, neutral "
                          << fmt(spine_env.neutral_length_mm) << " mm, extended " << fmt(spine_env.extended_length_mm)
                          << " mm (rigid " << fmt(spine_env.rigid_length_mm) << " mm)\n";
                std::cout << "compatibility: " << compat.verdict << " (spine rigid:flexible "
                          << fmt(compat.spine_rigid_flexible_ratio) << " vs sheath "
                          << fmt(compat.sheath_rigid_flexible_ratio) << ")\n";
            }
            if (gap < 0.0 || !compat.pass) valid = false;
        }
    }

    if (!out_path.empty()) io::write_text_file(out_path, report.dump(2) + "\n");
    return valid ? 0 : 3;
}

// ---------------------------------------------------------------- pattern

int cmd_pattern(const GlobalOptions& global, const std::string& design_path, const std::string& out_path,
                double scale) {
    const LinkDesign design = io::load_design(design_path);
    const auto cut = pattern::generate_cut_pattern(design.pattern);
    io::write_text_file(out_path, pattern::export_svg(cut, scale));
    if (!global.quiet)
        std::cout << "wrote " << out_path << ": " << cut.loop_count << " loops, " << cut.holes.size() << " holes, "
                  << cut.slots.size() << " slots, " << cut.flaps.size() << " flaps\n";
    return 0;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const GlobalOptions& global, const std::string& design_path, double angle_deg,
                 std::optional<double> pressure_kPa, const std::string& out_path, const std::string& variant_name,
                 bool default_model) {
    const io::ToolConfig config = resolve_config(global);
    const LinkDesign design = io::load_design(design_path);

    sheath::JammingState state = design.jamming;
    if (pressure_kPa) state.vacuum_gauge_pressure_kPa = *pressure_kPa;

    if (!design.stiffness_model && !default_model)
        throw Error(ErrorCode::MissingModel,
                    "design has no stiffness_model; pass --default-model to use built-in defaults");
    const stiffness::StiffnessModelParams params =
        design.stiffness_model ? *design.stiffness_model : stiffness::StiffnessModelParams{};

    stiffness::LinkVariant variant;
    std::string kind = variant_name;
    if (kind.empty()) kind = design.spine ? "layer_with_spine" : "layer";
    switch (stiffness::variant_kind_from_string(kind)) {
        case stiffness::VariantKind::Granular:
            variant = stiffness::granular_variant();
            break;
        case stiffness::VariantKind::Layer:
            variant = stiffness::layer_variant(design.pattern);
            break;
        case stiffness::VariantKind::LayerWithSpine:
            if (!design.spine)
                throw Error(ErrorCode::Schema, "variant layer_with_spine requires a spine in the design file");
            variant = stiffness::layer_with_spine_variant(design.pattern, *design.spine);
            break;
    }

    // Reachability gate: a commanded bend past the pattern's limit is a
    // kinematic domain error, not a model extrapolation.
    if (variant.kind != stiffness::VariantKind::Granular) {
        const auto env = sheath::derive_lengths(design.pattern);
        kin::slot_profile(design.pattern, {env.l_default_mm, angle_deg, 0.0}, config.angle_kernel);
    }

    auto trace = stiffness::synthesize_trace(variant, angle_deg, state, params);
    io::save_trace_csv(trace, out_path);
    if (!global.quiet)
        std::cout << "wrote " << out_path << ": peak " << fmt(trace.max_loading_force_N()) << " N at "
                  << fmt(stiffness::kReferenceDeflectionMm, 1) << " mm, " << trace.samples.size() << " samples\n";
    return 0;
}

// ---------------------------------------------------------------- calibrate

int cmd_calibrate(const GlobalOptions& global, const std::string& design_path, const std::string& targets_path,
                  std::string out_path) {
    LinkDesign design = io::load_design(design_path);
    const auto targets = io::load_calibration_targets_csv(targets_path, design);
    const stiffness::StiffnessModelParams initial =
        design.stiffness_model ? *design.stiffness_model : stiffness::StiffnessModelParams{};

    const auto result = stiffness::calibrate(targets, design.jamming, initial);
    design.stiffness_model = result.params;
    if (out_path.empty()) out_path = design_path;
    io::save_design(design, out_path);

    if (!global.quiet) {
        std::cout << "calibrated " << targets.size() << " targets; max relative residual "
                  << fmt(100.0 * result.max_abs_relative_residual, 2) << "%\n";
        for (std::size_t i = 0; i < targets.size(); ++i) {
            std::cout << "  " << stiffness::to_string(targets[i].variant.kind) << " @"
                      << fmt(targets[i].bend_angle_deg, 0) << " deg: measured "
                      << fmt(targets[i].measured_max_force_N, 2) << " N, residual "
                      << fmt(100.0 * result.relative_residuals[i], 2) << "%\n";
        }
        std::cout << "wrote " << out_path << "\n";
    }
    if (result.max_abs_relative_residual > 0.15)
        std::cerr << "warning: fit residual exceeds 15%\n";
    return 0;
}

// ---------------------------------------------------------------- optimize

int cmd_optimize(const GlobalOptions& global, const std::string& targets_path, const std::string& bounds_path,
                 std::size_t budget, const std::string& out_path, const std::string& csv_path, int top) {
    const io::ToolConfig config = resolve_config(global);
    const auto targets = io::load_targets(targets_path);
    const auto box = io::load_bounds(bounds_path);

    const auto result = optimize::search_designs(targets, box, budget, 5, 3, config.angle_kernel);

    io::ordered_json doc;
    doc["feasible"] = result.feasible;
    doc["evaluations"] = result.evaluations;
    if (!result.feasible) {
        doc["binding_constraint"] = result.binding_constraint;
        doc["binding_margin"] = result.binding_margin;
    }
    io::ordered_json designs = io::ordered_json::array();
    const int count = std::min<std::size_t>(static_cast<std::size_t>(std::max(top, 0)), result.designs.size());
    for (int i = 0; i < count; ++i) {
        const auto& ranked = result.designs[static_cast<std::size_t>(i)];
        io::ordered_json entry;
        entry["rank"] = i + 1;
        entry["objective"] = ranked.objective;
        io::ordered_json margins = io::ordered_json::array();
        for (const auto& m : ranked.margins) margins.push_back({{"name", m.name}, {"margin", m.margin_value}});
        entry["margins"] = margins;
        entry["design"] = io::design_to_json(ranked.link);
        designs.push_back(entry);
    }
    doc["designs"] = designs;

    const std::string payload = doc.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << payload;
    } else {
        io::write_text_file(out_path, payload);
        if (!global.quiet) {
            if (result.feasible)
                std::cout << "feasible: " << result.designs.size() << " designs (" << result.evaluations
                          << " evaluations); wrote " << out_path << "\n";
            else
                std::cout << "infeasible: binding constraint '" << result.binding_constraint << "' (best margin "
                          << fmt(result.binding_margin) << "); wrote " << out_path << "\n";
        }
    }

    if (!csv_path.empty()) {
        std::ostringstream csv;
        csv << "rank,objective,W_mm,L_mm,d_mm,D_mm,phi_mm,N,central_gap_mm,holding_force_N\n";
        for (int i = 0; i < count; ++i) {
            const auto& ranked = result.designs[static_cast<std::size_t>(i)];
            const auto& p = ranked.link.pattern;
            double gap = 0.0;
            if (ranked.link.spine) gap = spine::central_gap_mm(*ranked.link.spine);
            csv << (i + 1) << ',' << fmt(ranked.objective, 6) << ',' << fmt(p.flap_width_W_mm, 6) << ','
                << fmt(p.flap_length_L_mm, 6) << ',' << fmt(p.guide_hole_distance_d_mm, 6) << ','
                << fmt(p.slot_length_D_mm, 6) << ',' << fmt(p.sheath_diameter_phi_mm, 6) << ',' << p.loop_count_N
                << ',' << fmt(gap, 6) << ','
                << fmt(sheath::jamming_holding_force_N(p, ranked.link.jamming), 6) << '\n';
        }
        io::write_text_file(csv_path, csv.str());
    }

    return result.feasible ? 0 : 3;
}

// ---------------------------------------------------------------- analyze

io::ordered_json analyze_trial_groups(const GlobalOptions& global, const io::ToolConfig& config,
                                      const std::string& dir, double step_mm, const std::string& series_dir,
                                      bool align_onset) {
    std::vector<std::pair<std::string, io::TrialFileInfo>> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto info = io::parse_trial_filename(entry.path().filename().string());
        if (info.recognized) files.emplace_back(entry.path().string(), info);
    }
    std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    if (files.empty())
        throw Error(ErrorCode::Io, "no trial files matching '<variant>_<angle>deg_trial<k>.csv' in " + dir);

    std::map<std::pair<std::string, double>, analyze::TrialSet> groups;
    for (const auto& [path, info] : files) {
        auto trace = io::load_trace_csv(path);
        if (align_onset) trace = analyze::align_contact_onset(trace, config.contact_onset_threshold_N);
        groups[{info.variant, info.angle_deg}].trials.push_back(std::move(trace));
    }

    io::ordered_json out = io::ordered_json::array();
    for (const auto& [key, set] : groups) {
        const auto& [variant, angle] = key;
        const auto stats = analyze::max_resisting_force(set);
        io::ordered_json group;
        group["variant"] = variant;
        group["bend_angle_deg"] = angle;
        group["trials"] = stats.trial_count;
        group["max_force"] = {{"mean_N", stats.mean_N}, {"std_N", stats.std_N}};

        std::vector<double> residuals;
        for (const auto& trial : set.trials)
            if (trial.has_unloading())
                residuals.push_back(analyze::hysteresis_residual_mm(trial, config.zero_force_threshold_N));
        if (!residuals.empty()) {
            double sum = 0.0;
            for (double r : residuals) sum += r;
            group["hysteresis_mm"] = {{"mean", sum / static_cast<double>(residuals.size())},
                                      {"per_trial", residuals}};
        }

        const auto bands = analyze::band_series(set, step_mm);
        group["band_points"] = {{"loading", bands.loading.size()}, {"unloading", bands.unloading.size()}};
        if (!series_dir.empty()) {
            fs::create_directories(series_dir);
            std::ostringstream base;
            base << variant << '_' << fmt(angle, 0) << "deg";
            for (const auto& [phase_name, series] :
                 {std::pair{std::string("loading"), bands.loading}, {std::string("unloading"), bands.unloading}}) {
                if (series.empty()) continue;
                std::ostringstream os;
                io::write_band_csv(series, os);
                const std::string path = series_dir + "/" + base.str() + "_" + phase_name + "_band.csv";
                io::write_text_file(path, os.str());
                if (!global.quiet) std::cout << "wrote " << path << "\n";
            }
        }
        out.push_back(group);
    }
    return out;
}

int cmd_analyze(const GlobalOptions& global, const std::string& input, const std::string& out_path, double step_mm,
                const std::string& series_dir, bool align_onset) {
    const io::ToolConfig config = resolve_config(global);
    io::ordered_json report;

    if (fs::is_directory(input)) {
        report["trial_groups"] = analyze_trial_groups(global, config, input, step_mm, series_dir, align_onset);
    } else {
        const std::string text = io::read_text_file(input);
        if (text.rfind("angle_deg,diameter_mm", 0) == 0) {
            auto series = io::load_diameter_csv(input);
            series.variant = fs::path(input).stem().string();
            const auto ratios = analyze::diameter_ratio(series);
            const auto [min_angle, min_ratio] = analyze::summarize_min_ratio(series);
            io::ordered_json ratio_rows = io::ordered_json::array();
            for (const auto& [angle, ratio] : ratios) ratio_rows.push_back({{"angle_deg", angle}, {"ratio", ratio}});
            report["diameter"] = {{"variant", series.variant},
                                  {"ratios", ratio_rows},
                                  {"min_ratio", {{"angle_deg", min_angle}, {"ratio", min_ratio}}}};
        } else {
            auto trace = io::load_trace_csv(input);
            if (align_onset) trace = analyze::align_contact_onset(trace, config.contact_onset_threshold_N);
            io::ordered_json single;
            single["variant"] = trace.meta.variant;
            single["max_loading_force_N"] = trace.max_loading_force_N();
            if (trace.has_unloading())
                single["hysteresis_mm"] = analyze::hysteresis_residual_mm(trace, config.zero_force_threshold_N);
            report["trace"] = single;
        }
    }

    const std::string payload = report.dump(2) + "\n";
    if (out_path.empty())
        std::cout << payload;
    else {
        io::write_text_file(out_path, payload);
        if (!global.quiet) std::cout << "wrote " << out_path << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"jamlink: design, simulate and analyze variable-stiffness layer-jamming links"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    GlobalOptions global;
    app.add_option("--config", global.config_path, "tool config JSON (fallback: JAMLINK_CONFIG env var)");
    app.add_option("--seed", global.seed, "random seed (reserved; all pipelines are deterministic)");
    app.add_flag("--quiet", global.quiet, "suppress informational output");

    std::string design_path, out_path, targets_path, bounds_path, csv_path, series_dir, input_path, variant_name;
    double angle_deg = 0.0, scale = 1.0, step_mm = 1.0;
    std::optional<double> pressure_kPa;
    std::size_t budget = 100000;
    int top = 10;
    bool default_model = false, align_onset = false;

    auto* report = app.add_subcommand("report", "validate a design file and print derived quantities");
    report->add_option("design", design_path, "design JSON file")->required();
    report->add_option("--out", out_path, "write the report as JSON");

    auto* pattern_cmd = app.add_subcommand("pattern", "generate the flat cut pattern as SVG");
    pattern_cmd->add_option("design", design_path, "design JSON file")->required();
    pattern_cmd->add_option("--out", out_path, "output SVG path")->required();
    pattern_cmd->add_option("--scale", scale, "millimetres per SVG user unit (default 1)");

    auto* simulate = app.add_subcommand("simulate", "synthesize a deflect-and-return force trace");
    simulate->add_option("design", design_path, "design JSON file")->required();
    simulate->add_option("--angle", angle_deg, "bend angle in degrees")->required();
    simulate->add_option("--pressure", pressure_kPa, "gauge pressure kPa (overrides the design file)");
    simulate->add_option("--out", out_path, "output trace CSV path")->required();
    simulate->add_option("--variant", variant_name, "granular|layer|layer_with_spine (default from design)");
    simulate->add_flag("--default-model", default_model, "use built-in model params when the design has none");

    auto* calibrate = app.add_subcommand("calibrate", "fit stiffness model params to measured maxima");
    calibrate->add_option("design", design_path, "design JSON file")->required();
    calibrate->add_option("targets", targets_path, "targets CSV: variant,bend_angle_deg,max_force_N")->required();
    calibrate->add_option("--out", out_path, "output design JSON (default: update in place)");

    auto* optimize_cmd = app.add_subcommand("optimize", "search the design space against targets");
    optimize_cmd->add_option("targets", targets_path, "targets JSON file")->required();
    optimize_cmd->add_option("bounds", bounds_path, "bounds JSON file")->required();
    optimize_cmd->add_option("--budget", budget, "maximum number of design evaluations");
    optimize_cmd->add_option("--out", out_path, "ranked designs JSON (default: stdout)");
    optimize_cmd->add_option("--csv", csv_path, "also write a CSV summary table");
    optimize_cmd->add_option("--top", top, "number of ranked designs to emit (default 10)");

    auto* analyze_cmd = app.add_subcommand("analyze", "compute metrics from trial logs or diameter series");
    analyze_cmd->add_option("input", input_path, "trial directory, trace CSV, or diameter CSV")->required();
    analyze_cmd->add_option("--out", out_path, "metrics report JSON (default: stdout)");
    analyze_cmd->add_option("--step", step_mm, "band grid step in mm (default 1)");
    analyze_cmd->add_option("--series-dir", series_dir, "write plot-ready band CSVs into this directory");
    analyze_cmd->add_flag("--align-onset", align_onset, "shift traces so contact sits at 0mm");

    CLI11_PARSE(app, argc, argv);

    try {
        if (report->parsed()) return cmd_report(global, design_path, out_path);
        if (pattern_cmd->parsed()) return cmd_pattern(global, design_path, out_path, scale);
        if (simulate->parsed())
            return cmd_simulate(global, design_path, angle_deg, pressure_kPa, out_path, variant_name, default_model);
        if (calibrate->parsed()) return cmd_calibrate(global, design_path, targets_path, out_path);
        if (optimize_cmd->parsed())
            return cmd_optimize(global, targets_path, bounds_path, budget, out_path, csv_path, top);
        if (analyze_cmd->parsed())
            return cmd_analyze(global, input_path, out_path, step_mm, series_dir, align_onset);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
