#pragma once

#include "jamlink/trace.hpp"

#include <string>
#include <utility>
#include <vector>

namespace jamlink::analyze {

/// Repeated trials of one (variant, bend angle, pressure) condition.
struct TrialSet {
    std::vector<ForceDisplacementTrace> trials;
};

struct MaxForceStats {
    double mean_N = 0.0;
    double std_N = 0.0; // sample standard deviation (n-1)
    int trial_count = 0;
};

struct BandPoint {
    double displacement_mm = 0.0;
    double mean_N = 0.0;
    double std_N = 0.0;
};

struct BandSeries {
    std::vector<BandPoint> loading;
    std::vector<BandPoint> unloading;
};

struct DiameterSeries {
    std::string variant;
    std::vector<std::pair<double, double>> points; // (bend angle deg, central diameter mm), angles increasing
};

/// Mean/std of the per-trial peak loading force.
MaxForceStats max_resisting_force(const TrialSet& set);

/// Per-phase aggregation on a common displacement grid (linear interpolation
/// of each trial). Results are invariant under trial permutations.
BandSeries band_series(const TrialSet& set, double step_mm);

/// Residual deflection where the unloading force first drops to the zero
/// threshold; 0mm for a fully elastic return.
double hysteresis_residual_mm(const ForceDisplacementTrace& trace, double zero_threshold_N = 0.05);

/// Shifts displacement so contact (first force above threshold) sits at 0mm,
/// dropping pre-contact samples. Opt-in; raw traces are analyzed as-is.
ForceDisplacementTrace align_contact_onset(const ForceDisplacementTrace& trace, double threshold_N = 0.05);

/// ratio(theta) = diameter(theta) / diameter(0); requires a 0-degree entry.
std::vector<std::pair<double, double>> diameter_ratio(const DiameterSeries& series);

/// Minimum diameter ratio and the angle where it occurs (ties -> smaller angle).
std::pair<double, double> summarize_min_ratio(const DiameterSeries& series);

} // namespace jamlink::analyze
