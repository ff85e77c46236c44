#pragma once

#include "jamlink/analyze.hpp"
#include "jamlink/link.hpp"
#include "jamlink/optimize.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace jamlink::io {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

/// Tool-wide settings (the --config file / JAMLINK_CONFIG document).
struct ToolConfig {
    sheath::AngleKernel angle_kernel = sheath::AngleKernel::Asin;
    double zero_force_threshold_N = 0.05;
    double contact_onset_threshold_N = 0.05;
};

ToolConfig config_from_json(const json& doc);
ToolConfig load_config(const std::string& path);

LinkDesign design_from_json(const json& doc);
ordered_json design_to_json(const LinkDesign& design);
LinkDesign load_design(const std::string& path);
void save_design(const LinkDesign& design, const std::string& path);

optimize::DesignTargets targets_from_json(const json& doc);
optimize::DesignTargets load_targets(const std::string& path);

/// Bounds document: {"phi": {"min":30,"max":45,"steps":4}, ...} plus an
/// optional "base" design; absent base = reference link with spine.
optimize::SearchBox bounds_from_json(const json& doc);
optimize::SearchBox load_bounds(const std::string& path);

// --- CSV formats ---

void write_trace_csv(const ForceDisplacementTrace& trace, std::ostream& out);
void save_trace_csv(const ForceDisplacementTrace& trace, const std::string& path);
ForceDisplacementTrace read_trace_csv(std::istream& in, const std::string& source_name = "trace");
ForceDisplacementTrace load_trace_csv(const std::string& path);

struct TrialFileInfo {
    bool recognized = false;
    std::string variant;
    double angle_deg = 0.0;
    int trial = 0;
};

/// Parses "<variant>_<angle>deg_trial<k>.csv".
TrialFileInfo parse_trial_filename(const std::string& filename);

analyze::DiameterSeries load_diameter_csv(const std::string& path);
std::vector<stiffness::CalibrationTarget> load_calibration_targets_csv(const std::string& path,
                                                                       const LinkDesign& design);

void write_band_csv(const std::vector<analyze::BandPoint>& series, std::ostream& out);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace jamlink::io
