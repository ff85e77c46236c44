#include "jamlink/kinematics.hpp"

#include "jamlink/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace jamlink::kin {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

sheath::ValidationReport validate_bend(const BendState& state) {
    sheath::ValidationReport report;
    if (!(state.arc_length_mm > 0.0))
        report.violations.push_back({"arc_length > 0", state.arc_length_mm});
    if (!(state.bend_angle_deg >= 0.0 && state.bend_angle_deg <= 360.0))
        report.violations.push_back({"0 <= bend_angle <= 360", state.bend_angle_deg});
    return report;
}

ArcPose arc_pose(const BendState& state) {
    const auto report = validate_bend(state);
    if (!report.ok())
        throw Error(ErrorCode::Validation, "invalid bend state: " + report.summary());

    const double theta = state.bend_angle_deg * kDegToRad;
    ArcPose pose;
    pose.tip_tangent_deg = state.bend_angle_deg;
    if (theta < 1e-8) {
        // series form; the closed form loses precision as theta -> 0
        pose.tip_x_mm = state.arc_length_mm * theta / 2.0;
        pose.tip_y_mm = state.arc_length_mm * (1.0 - theta * theta / 6.0);
        return pose;
    }
    const double radius = state.arc_length_mm / theta;
    pose.tip_x_mm = radius * (1.0 - std::cos(theta));
    pose.tip_y_mm = radius * std::sin(theta);
    return pose;
}

SlotProfile slot_profile(const sheath::FlapPattern& pattern, const BendState& state, sheath::AngleKernel kernel) {
    if (!(state.bend_angle_deg >= 0.0))
        throw Error(ErrorCode::Validation, "bend angle must be non-negative");

    const double theta_max = sheath::max_bend_angle_deg(pattern, kernel);
    if (state.bend_angle_deg > theta_max + 1e-9) {
        std::ostringstream os;
        os << "bend angle " << state.bend_angle_deg << " deg exceeds the pattern's maximum "
           << theta_max << " deg (slots saturated)";
        throw Error(ErrorCode::KinematicDomain, os.str());
    }

    const int intervals = pattern.loop_count_N - 1;
    SlotProfile profile;
    profile.interval_angle_deg = state.bend_angle_deg / static_cast<double>(intervals);
    const double half_phi = pattern.sheath_diameter_phi_mm / 2.0;
    const double extension = half_phi * std::sin(profile.interval_angle_deg * kDegToRad);
    profile.intervals.assign(static_cast<std::size_t>(intervals), {extension, -extension});
    return profile;
}

} // namespace jamlink::kin
