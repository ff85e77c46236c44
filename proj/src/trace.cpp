#include "jamlink/trace.hpp"

#include "jamlink/error.hpp"

#include <algorithm>

namespace jamlink {

std::string to_string(Phase phase) {
    return phase == Phase::Loading ? "loading" : "unloading";
}

Phase phase_from_string(const std::string& name) {
    if (name == "loading") return Phase::Loading;
    if (name == "unloading") return Phase::Unloading;
    throw Error(ErrorCode::Schema, "unknown phase '" + name + "' (expected loading|unloading)");
}

double ForceDisplacementTrace::max_loading_force_N() const {
    double best = 0.0;
    for (const auto& s : samples)
        if (s.phase == Phase::Loading) best = std::max(best, s.force_N);
    return best;
}

double ForceDisplacementTrace::max_displacement_mm() const {
    double best = 0.0;
    for (const auto& s : samples) best = std::max(best, s.displacement_mm);
    return best;
}

bool ForceDisplacementTrace::has_unloading() const {
    return std::any_of(samples.begin(), samples.end(),
                       [](const TraceSample& s) { return s.phase == Phase::Unloading; });
}

} // namespace jamlink
