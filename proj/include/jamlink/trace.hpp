#pragma once

#include <string>
#include <vector>

namespace jamlink {

enum class Phase { Loading, Unloading };

std::string to_string(Phase phase);
Phase phase_from_string(const std::string& name);

struct TraceSample {
    double time_s = 0.0;
    double displacement_mm = 0.0;
    double force_N = 0.0;
    Phase phase = Phase::Loading;
};

struct TraceMeta {
    std::string variant;        // "granular" | "layer" | "layer_with_spine"
    double bend_angle_deg = 0.0;
    double pressure_kPa = 0.0;  // gauge
    int trial_id = 1;
};

/// One deflect-and-return trial: displacement runs 0 -> max -> 0,
/// loading samples before unloading samples.
struct ForceDisplacementTrace {
    std::vector<TraceSample> samples;
    TraceMeta meta;

    double max_loading_force_N() const;
    double max_displacement_mm() const;
    bool has_unloading() const;
};

} // namespace jamlink
