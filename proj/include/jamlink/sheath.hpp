#pragma once

#include <string>
#include <vector>

namespace jamlink::sheath {

/// Double-sided flap pattern of the layer-jamming sheath. Defaults are the
/// reference design used throughout the test suite and shipped design file.
struct FlapPattern {
    double flap_width_W_mm = 10.0;
    double flap_length_L_mm = 30.0;
    double mid_length_h_mm = 15.0;
    double guide_hole_distance_d_mm = 6.0;
    double slot_length_D_mm = 4.0;
    double sheath_diameter_phi_mm = 38.0;
    int loop_count_N = 32;
    int flaps_per_section = 12;
    int contact_surfaces_n = 7; // measured, not derived; see validate_pattern
    double friction_coefficient_mu = 0.40;
    double inclination_angle_deg = 30.0; // flap lean in the cut pattern
};

/// Vacuum state of the sealed membrane volume. Gauge pressure is stored
/// signed (evacuated = negative); force computations use its magnitude.
struct JammingState {
    double vacuum_gauge_pressure_kPa = -60.0;
    double ambient_pressure_kPa = 101.9;
};

struct LengthEnvelope {
    double l_max_mm = 0.0;
    double l_min_mm = 0.0;
    double l_default_mm = 0.0;
};

/// Kernel for the max-bend-angle formula. Asin is canonical; Sinh and Linear
/// are retained for reproduction studies (all agree within 0.5 deg at
/// reference values).
enum class AngleKernel { Asin, Sinh, Linear };

AngleKernel angle_kernel_from_string(const std::string& name);
std::string to_string(AngleKernel kernel);

struct Violation {
    std::string constraint; // e.g. "loop_count_N >= 2"
    double offending_value = 0.0;
    std::string message() const;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const noexcept { return violations.empty(); }
    std::string summary() const; // "" when ok
};

/// Checks every pattern invariant; never throws. slot_length_D may be zero
/// (zero slot collapses the envelope); all other lengths must be positive.
ValidationReport validate_pattern(const FlapPattern& pattern);
ValidationReport validate_state(const JammingState& state);

double absolute_pressure_kPa(const JammingState& state);

/// l_max, l_min = (N-1)(d +- D/2) + h; l_default = (N-1)d + h.
LengthEnvelope derive_lengths(const FlapPattern& pattern);

/// theta = (N-1) * kernel(D/phi), degrees. Requires D < phi.
double max_bend_angle_deg(const FlapPattern& pattern, AngleKernel kernel = AngleKernel::Asin);

/// F = mu * n * |P| * W * L, converted to newtons (lengths mm, pressure kPa).
double jamming_holding_force_N(const FlapPattern& pattern, const JammingState& state);

} // namespace jamlink::sheath
