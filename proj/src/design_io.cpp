#include "jamlink/design_io.hpp"

#include "jamlink/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

namespace jamlink::io {

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
    throw Error(ErrorCode::Schema, path + ": " + what);
}

const json& require_object(const json& doc, const std::string& path) {
    if (!doc.is_object()) schema_error(path, "expected an object");
    return doc;
}

double get_number(const json& obj, const std::string& key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) schema_error(path + "." + key, "missing required number");
    if (!it->is_number()) schema_error(path + "." + key, "expected a number");
    return it->get<double>();
}

double get_number_or(const json& obj, const std::string& key, const std::string& path, double fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number()) schema_error(path + "." + key, "expected a number");
    return it->get<double>();
}

int get_int_or(const json& obj, const std::string& key, const std::string& path, int fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number_integer()) schema_error(path + "." + key, "expected an integer");
    return it->get<int>();
}

std::string get_string_or(const json& obj, const std::string& key, const std::string& path,
                          const std::string& fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_string()) schema_error(path + "." + key, "expected a string");
    return it->get<std::string>();
}

json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "' for reading");
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded())
        throw Error(ErrorCode::Schema, path + ": invalid JSON");
    return doc;
}

} // namespace

ToolConfig config_from_json(const json& doc) {
    require_object(doc, "config");
    ToolConfig cfg;
    cfg.angle_kernel = sheath::angle_kernel_from_string(get_string_or(doc, "angle_kernel", "config", "asin"));
    cfg.zero_force_threshold_N = get_number_or(doc, "zero_force_threshold_N", "config", 0.05);
    cfg.contact_onset_threshold_N = get_number_or(doc, "contact_onset_threshold_N", "config", 0.05);
    return cfg;
}

ToolConfig load_config(const std::string& path) { return config_from_json(parse_json_file(path)); }

namespace {

sheath::FlapPattern pattern_from_json(const json& obj, const std::string& path) {
    require_object(obj, path);
    sheath::FlapPattern p;
    p.flap_width_W_mm = get_number(obj, "flap_width_W_mm", path);
    p.flap_length_L_mm = get_number(obj, "flap_length_L_mm", path);
    p.mid_length_h_mm = get_number(obj, "mid_length_h_mm", path);
    p.guide_hole_distance_d_mm = get_number(obj, "guide_hole_distance_d_mm", path);
    p.slot_length_D_mm = get_number(obj, "slot_length_D_mm", path);
    p.sheath_diameter_phi_mm = get_number(obj, "sheath_diameter_phi_mm", path);
    p.loop_count_N = get_int_or(obj, "loop_count_N", path, -1);
    if (p.loop_count_N < 0) schema_error(path + ".loop_count_N", "missing required integer");
    p.flaps_per_section = get_int_or(obj, "flaps_per_section", path, 12);
    p.contact_surfaces_n = get_int_or(obj, "contact_surfaces_n", path, 1);
    p.friction_coefficient_mu = get_number(obj, "friction_coefficient_mu", path);
    p.inclination_angle_deg = get_number_or(obj, "inclination_angle_deg", path, 30.0);
    return p;
}

ordered_json pattern_to_json(const sheath::FlapPattern& p) {
    ordered_json obj;
    obj["flap_width_W_mm"] = p.flap_width_W_mm;
    obj["flap_length_L_mm"] = p.flap_length_L_mm;
    obj["mid_length_h_mm"] = p.mid_length_h_mm;
    obj["guide_hole_distance_d_mm"] = p.guide_hole_distance_d_mm;
    obj["slot_length_D_mm"] = p.slot_length_D_mm;
    obj["sheath_diameter_phi_mm"] = p.sheath_diameter_phi_mm;
    obj["loop_count_N"] = p.loop_count_N;
    obj["flaps_per_section"] = p.flaps_per_section;
    obj["contact_surfaces_n"] = p.contact_surfaces_n;
    obj["friction_coefficient_mu"] = p.friction_coefficient_mu;
    obj["inclination_angle_deg"] = p.inclination_angle_deg;
    return obj;
}

spine::SpineDesign spine_from_json(const json& obj, const std::string& path) {
    require_object(obj, path);
    spine::SpineDesign s;
    s.segment_height_w_mm = get_number(obj, "segment_height_w_mm", path);
    s.segment_diameter_Ds_mm = get_number(obj, "segment_diameter_Ds_mm", path);
    s.ligament_beam_B_mm = get_number(obj, "ligament_beam_B_mm", path);
    s.ligament_neutral_angle_deg = get_number_or(obj, "ligament_neutral_angle_deg", path, 45.0);
    s.neutral_gap_Gn_mm = get_number(obj, "neutral_gap_Gn_mm", path);
    s.compressed_gap_Gc_mm = get_number(obj, "compressed_gap_Gc_mm", path);
    s.extended_gap_Ge_mm = get_number(obj, "extended_gap_Ge_mm", path);
    s.segment_count = get_int_or(obj, "segment_count", path, -1);
    if (s.segment_count < 0) schema_error(path + ".segment_count", "missing required integer");
    s.end_count = get_int_or(obj, "end_count", path, 2);
    s.end_support_each_mm = get_number_or(obj, "end_support_each_mm", path, 10.0);
    s.gap_count = get_int_or(obj, "gap_count", path, spine::default_gap_count(s));
    return s;
}

ordered_json spine_to_json(const spine::SpineDesign& s) {
    ordered_json obj;
    obj["segment_height_w_mm"] = s.segment_height_w_mm;
    obj["segment_diameter_Ds_mm"] = s.segment_diameter_Ds_mm;
    obj["ligament_beam_B_mm"] = s.ligament_beam_B_mm;
    obj["ligament_neutral_angle_deg"] = s.ligament_neutral_angle_deg;
    obj["neutral_gap_Gn_mm"] = s.neutral_gap_Gn_mm;
    obj["compressed_gap_Gc_mm"] = s.compressed_gap_Gc_mm;
    obj["extended_gap_Ge_mm"] = s.extended_gap_Ge_mm;
    obj["segment_count"] = s.segment_count;
    obj["end_count"] = s.end_count;
    obj["end_support_each_mm"] = s.end_support_each_mm;
    obj["gap_count"] = s.gap_count;
    return obj;
}

sheath::JammingState jamming_from_json(const json& obj, const std::string& path) {
    require_object(obj, path);
    sheath::JammingState s;
    s.vacuum_gauge_pressure_kPa = get_number(obj, "vacuum_gauge_pressure_kPa", path);
    s.ambient_pressure_kPa = get_number_or(obj, "ambient_pressure_kPa", path, 101.9);
    return s;
}

stiffness::StiffnessModelParams model_from_json(const json& obj, const std::string& path) {
    require_object(obj, path);
    stiffness::StiffnessModelParams m;
    m.unjammed_stiffness_N_per_mm = get_number_or(obj, "unjammed_stiffness_N_per_mm", path, m.unjammed_stiffness_N_per_mm);
    m.jam_stiffness_scale = get_number_or(obj, "jam_stiffness_scale", path, m.jam_stiffness_scale);
    m.post_slip_slope_N_per_mm = get_number_or(obj, "post_slip_slope_N_per_mm", path, m.post_slip_slope_N_per_mm);
    m.bend_gain_per_rad2 = get_number_or(obj, "bend_gain_per_rad2", path, m.bend_gain_per_rad2);
    m.buckling_ratio_threshold = get_number_or(obj, "buckling_ratio_threshold", path, m.buckling_ratio_threshold);
    m.buckling_force_knockdown = get_number_or(obj, "buckling_force_knockdown", path, m.buckling_force_knockdown);
    m.hysteresis_fraction = get_number_or(obj, "hysteresis_fraction", path, m.hysteresis_fraction);
    m.weak_end_factor = get_number_or(obj, "weak_end_factor", path, m.weak_end_factor);
    m.granular_stiffness_N_per_mm = get_number_or(obj, "granular_stiffness_N_per_mm", path, m.granular_stiffness_N_per_mm);
    m.granular_bend_gain_per_rad = get_number_or(obj, "granular_bend_gain_per_rad", path, m.granular_bend_gain_per_rad);
    m.ovalization_rate_granular_per_rad =
        get_number_or(obj, "ovalization_rate_granular_per_rad", path, m.ovalization_rate_granular_per_rad);
    m.ovalization_rate_layer_per_rad =
        get_number_or(obj, "ovalization_rate_layer_per_rad", path, m.ovalization_rate_layer_per_rad);
    m.ovalization_rate_spine_per_rad =
        get_number_or(obj, "ovalization_rate_spine_per_rad", path, m.ovalization_rate_spine_per_rad);
    m.preload_force_at_180_N = get_number_or(obj, "preload_force_at_180_N", path, m.preload_force_at_180_N);
    return m;
}

ordered_json model_to_json(const stiffness::StiffnessModelParams& m) {
    ordered_json obj;
    obj["unjammed_stiffness_N_per_mm"] = m.unjammed_stiffness_N_per_mm;
    obj["jam_stiffness_scale"] = m.jam_stiffness_scale;
    obj["post_slip_slope_N_per_mm"] = m.post_slip_slope_N_per_mm;
    obj["bend_gain_per_rad2"] = m.bend_gain_per_rad2;
    obj["buckling_ratio_threshold"] = m.buckling_ratio_threshold;
    obj["buckling_force_knockdown"] = m.buckling_force_knockdown;
    obj["hysteresis_fraction"] = m.hysteresis_fraction;
    obj["weak_end_factor"] = m.weak_end_factor;
    obj["granular_stiffness_N_per_mm"] = m.granular_stiffness_N_per_mm;
    obj["granular_bend_gain_per_rad"] = m.granular_bend_gain_per_rad;
    obj["ovalization_rate_granular_per_rad"] = m.ovalization_rate_granular_per_rad;
    obj["ovalization_rate_layer_per_rad"] = m.ovalization_rate_layer_per_rad;
    obj["ovalization_rate_spine_per_rad"] = m.ovalization_rate_spine_per_rad;
    obj["preload_force_at_180_N"] = m.preload_force_at_180_N;
    return obj;
}

} // namespace

LinkDesign design_from_json(const json& doc) {
    require_object(doc, "design");
    if (!doc.contains("pattern")) schema_error("pattern", "missing required object");
    LinkDesign design;
    design.name = get_string_or(doc, "name", "design", "link");
    design.pattern = pattern_from_json(doc.at("pattern"), "pattern");
    if (doc.contains("spine")) design.spine = spine_from_json(doc.at("spine"), "spine");
    if (doc.contains("jamming")) design.jamming = jamming_from_json(doc.at("jamming"), "jamming");
    if (doc.contains("stiffness_model"))
        design.stiffness_model = model_from_json(doc.at("stiffness_model"), "stiffness_model");
    return design;
}

ordered_json design_to_json(const LinkDesign& design) {
    ordered_json doc;
    doc["name"] = design.name;
    doc["pattern"] = pattern_to_json(design.pattern);
    if (design.spine) doc["spine"] = spine_to_json(*design.spine);
    ordered_json jam;
    jam["vacuum_gauge_pressure_kPa"] = design.jamming.vacuum_gauge_pressure_kPa;
    jam["ambient_pressure_kPa"] = design.jamming.ambient_pressure_kPa;
    doc["jamming"] = jam;
    if (design.stiffness_model) doc["stiffness_model"] = model_to_json(*design.stiffness_model);
    return doc;
}

LinkDesign load_design(const std::string& path) { return design_from_json(parse_json_file(path)); }

void save_design(const LinkDesign& design, const std::string& path) {
    write_text_file(path, design_to_json(design).dump(2) + "\n");
}

optimize::DesignTargets targets_from_json(const json& doc) {
    require_object(doc, "targets");
    optimize::DesignTargets t;
    t.min_bend_angle_deg = get_number_or(doc, "min_bend_angle_deg", "targets", 0.0);
    t.min_central_gap_mm = get_number_or(doc, "min_central_gap_mm", "targets", 0.0);
    t.min_holding_force_N = get_number_or(doc, "min_holding_force_N", "targets", 0.0);
    if (doc.contains("length_range")) {
        const auto& r = require_object(doc.at("length_range"), "targets.length_range");
        if (r.contains("l_min_at_most_mm"))
            t.length_l_min_at_most_mm = get_number(r, "l_min_at_most_mm", "targets.length_range");
        if (r.contains("l_max_at_least_mm"))
            t.length_l_max_at_least_mm = get_number(r, "l_max_at_least_mm", "targets.length_range");
    }
    if (doc.contains("sheath_diameter_mm")) {
        const auto& r = require_object(doc.at("sheath_diameter_mm"), "targets.sheath_diameter_mm");
        if (r.contains("min")) t.sheath_diameter_lo_mm = get_number(r, "min", "targets.sheath_diameter_mm");
        if (r.contains("max")) t.sheath_diameter_hi_mm = get_number(r, "max", "targets.sheath_diameter_mm");
    }
    if (doc.contains("weights")) {
        const auto& w = require_object(doc.at("weights"), "targets.weights");
        t.weight_force_per_diameter = get_number_or(w, "force_per_diameter", "targets.weights", 1.0);
        t.weight_central_gap = get_number_or(w, "central_gap", "targets.weights", 0.0);
    }
    return t;
}

optimize::DesignTargets load_targets(const std::string& path) { return targets_from_json(parse_json_file(path)); }

optimize::SearchBox bounds_from_json(const json& doc) {
    require_object(doc, "bounds");
    optimize::SearchBox box;
    if (doc.contains("base")) {
        box.base = design_from_json(doc.at("base"));
    } else {
        box.base.spine = spine::SpineDesign{};
    }
    for (const auto& [key, value] : doc.items()) {
        if (key == "base") continue;
        require_object(value, "bounds." + key);
        optimize::ParameterRange range;
        range.lo = get_number(value, "min", "bounds." + key);
        range.hi = get_number(value, "max", "bounds." + key);
        range.steps = get_int_or(value, "steps", "bounds." + key, 1);
        box.ranges[key] = range;
    }
    return box;
}

optimize::SearchBox load_bounds(const std::string& path) { return bounds_from_json(parse_json_file(path)); }

namespace {
std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}
} // namespace

void write_trace_csv(const ForceDisplacementTrace& trace, std::ostream& out) {
    out << "time_s,displacement_mm,force_N,phase\n";
    for (const auto& s : trace.samples)
        out << fmt6(s.time_s) << ',' << fmt6(s.displacement_mm) << ',' << fmt6(s.force_N) << ','
            << to_string(s.phase) << '\n';
}

void save_trace_csv(const ForceDisplacementTrace& trace, const std::string& path) {
    std::ostringstream os;
    write_trace_csv(trace, os);
    write_text_file(path, os.str());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) fields.push_back(field);
    return fields;
}

double parse_double(const std::string& text, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::Schema, context + ": expected a number, got '" + text + "'");
    }
}

} // namespace

ForceDisplacementTrace read_trace_csv(std::istream& in, const std::string& source_name) {
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorCode::Schema, source_name + ": empty trace file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "time_s,displacement_mm,force_N,phase")
        throw Error(ErrorCode::Schema, source_name + ": expected header 'time_s,displacement_mm,force_N,phase'");

    ForceDisplacementTrace trace;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 4)
            throw Error(ErrorCode::Schema, source_name + ":" + std::to_string(line_no) + ": expected 4 fields");
        const std::string context = source_name + ":" + std::to_string(line_no);
        TraceSample sample;
        sample.time_s = parse_double(fields[0], context);
        sample.displacement_mm = parse_double(fields[1], context);
        sample.force_N = parse_double(fields[2], context);
        sample.phase = phase_from_string(fields[3]);
        trace.samples.push_back(sample);
    }
    if (trace.samples.empty())
        throw Error(ErrorCode::Schema, source_name + ": trace has no samples");
    return trace;
}

ForceDisplacementTrace load_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "' for reading");
    auto trace = read_trace_csv(in, path);
    const auto info = parse_trial_filename(path.substr(path.find_last_of("/\\") + 1));
    if (info.recognized) {
        trace.meta.variant = info.variant;
        trace.meta.bend_angle_deg = info.angle_deg;
        trace.meta.trial_id = info.trial;
    }
    return trace;
}

TrialFileInfo parse_trial_filename(const std::string& filename) {
    static const std::regex pattern(R"(^([A-Za-z0-9_]+?)_([0-9]+(?:\.[0-9]+)?)deg_trial([0-9]+)\.csv$)");
    std::smatch match;
    TrialFileInfo info;
    if (!std::regex_match(filename, match, pattern)) return info;
    info.recognized = true;
    info.variant = match[1];
    info.angle_deg = std::stod(match[2]);
    info.trial = std::stoi(match[3]);
    return info;
}

analyze::DiameterSeries load_diameter_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorCode::Schema, path + ": empty diameter file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "angle_deg,diameter_mm")
        throw Error(ErrorCode::Schema, path + ": expected header 'angle_deg,diameter_mm'");

    analyze::DiameterSeries series;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 2)
            throw Error(ErrorCode::Schema, path + ":" + std::to_string(line_no) + ": expected 2 fields");
        const std::string context = path + ":" + std::to_string(line_no);
        series.points.emplace_back(parse_double(fields[0], context), parse_double(fields[1], context));
    }
    return series;
}

std::vector<stiffness::CalibrationTarget> load_calibration_targets_csv(const std::string& path,
                                                                       const LinkDesign& design) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorCode::Schema, path + ": empty targets file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "variant,bend_angle_deg,max_force_N")
        throw Error(ErrorCode::Schema, path + ": expected header 'variant,bend_angle_deg,max_force_N'");

    std::vector<stiffness::CalibrationTarget> targets;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 3)
            throw Error(ErrorCode::Schema, path + ":" + std::to_string(line_no) + ": expected 3 fields");
        const std::string context = path + ":" + std::to_string(line_no);

        stiffness::CalibrationTarget target;
        const auto kind = stiffness::variant_kind_from_string(fields[0]);
        switch (kind) {
            case stiffness::VariantKind::Granular:
                target.variant = stiffness::granular_variant();
                break;
            case stiffness::VariantKind::Layer:
                target.variant = stiffness::layer_variant(design.pattern);
                break;
            case stiffness::VariantKind::LayerWithSpine:
                if (!design.spine)
                    throw Error(ErrorCode::Schema,
                                context + ": layer_with_spine target but the design has no spine");
                target.variant = stiffness::layer_with_spine_variant(design.pattern, *design.spine);
                break;
        }
        target.bend_angle_deg = parse_double(fields[1], context);
        target.measured_max_force_N = parse_double(fields[2], context);
        targets.push_back(target);
    }
    return targets;
}

void write_band_csv(const std::vector<analyze::BandPoint>& series, std::ostream& out) {
    out << "displacement_mm,mean_N,std_N\n";
    for (const auto& p : series)
        out << fmt6(p.displacement_mm) << ',' << fmt6(p.mean_N) << ',' << fmt6(p.std_N) << '\n';
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "' for reading");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw Error(ErrorCode::Io, "failed writing '" + path + "'");
}

} // namespace jamlink::io
