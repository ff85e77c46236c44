#pragma once

#include "jamlink/sheath.hpp"

#include <vector>

namespace jamlink::kin {

/// Constant-curvature bend of the whole link. plane_azimuth is carried for
/// report completeness; computations are in-plane.
struct BendState {
    double arc_length_mm = 0.0;
    double bend_angle_deg = 0.0;
    double plane_azimuth_deg = 0.0;
};

struct ArcPose {
    double tip_x_mm = 0.0;
    double tip_y_mm = 0.0;
    double tip_tangent_deg = 0.0;
};

struct SlotInterval {
    double outer_extension_mm = 0.0;
    double inner_extension_mm = 0.0;
};

struct SlotProfile {
    std::vector<SlotInterval> intervals; // one per inter-loop interval (N-1)
    double interval_angle_deg = 0.0;     // bend shared uniformly across intervals
};

sheath::ValidationReport validate_bend(const BendState& state);

/// Tip of a circular arc of the given length bent by bend_angle.
/// Straight case: tip = (0, arc_length), tangent 0.
ArcPose arc_pose(const BendState& state);

/// Uniform-curvature slot usage: each of the N-1 intervals takes
/// bend/(N-1); outer/inner slot extension is the chord +-(phi/2)*sin(theta_i),
/// which saturates at exactly +-D/2 when the bend reaches max_bend_angle.
SlotProfile slot_profile(const sheath::FlapPattern& pattern, const BendState& state,
                         sheath::AngleKernel kernel = sheath::AngleKernel::Asin);

} // namespace jamlink::kin
