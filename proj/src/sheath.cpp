#include "jamlink/sheath.hpp"

#include "jamlink/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace jamlink::sheath {

namespace {
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
}

AngleKernel angle_kernel_from_string(const std::string& name) {
    if (name == "asin") return AngleKernel::Asin;
    if (name == "sinh") return AngleKernel::Sinh;
    if (name == "linear") return AngleKernel::Linear;
    throw Error(ErrorCode::Schema, "unknown angle kernel '" + name + "' (expected asin|sinh|linear)");
}

std::string to_string(AngleKernel kernel) {
    switch (kernel) {
        case AngleKernel::Asin: return "asin";
        case AngleKernel::Sinh: return "sinh";
        case AngleKernel::Linear: return "linear";
    }
    return "asin";
}

std::string Violation::message() const {
    std::ostringstream os;
    os << constraint << " (got " << offending_value << ")";
    return os.str();
}

std::string ValidationReport::summary() const {
    std::string s;
    for (const auto& v : violations) {
        if (!s.empty()) s += "; ";
        s += v.message();
    }
    return s;
}

ValidationReport validate_pattern(const FlapPattern& p) {
    ValidationReport report;
    auto flag = [&](const std::string& constraint, double value) {
        report.violations.push_back({constraint, value});
    };

    if (!(p.flap_width_W_mm > 0.0)) flag("flap_width_W > 0", p.flap_width_W_mm);
    if (!(p.flap_length_L_mm > 0.0)) flag("flap_length_L > 0", p.flap_length_L_mm);
    if (!(p.mid_length_h_mm > 0.0)) flag("mid_length_h > 0", p.mid_length_h_mm);
    if (!(p.guide_hole_distance_d_mm > 0.0)) flag("guide_hole_distance_d > 0", p.guide_hole_distance_d_mm);
    if (!(p.slot_length_D_mm >= 0.0)) flag("slot_length_D >= 0", p.slot_length_D_mm);
    if (!(p.sheath_diameter_phi_mm > 0.0)) flag("sheath_diameter_phi > 0", p.sheath_diameter_phi_mm);
    if (p.loop_count_N < 2) flag("loop_count_N >= 2", p.loop_count_N);
    if (p.flaps_per_section < 1) flag("flaps_per_section >= 1", p.flaps_per_section);
    if (p.contact_surfaces_n < 1) flag("contact_surfaces_n >= 1", p.contact_surfaces_n);
    if (!(p.friction_coefficient_mu > 0.0 && p.friction_coefficient_mu < 2.0))
        flag("0 < friction_coefficient_mu < 2", p.friction_coefficient_mu);
    if (!(p.slot_length_D_mm < 2.0 * p.guide_hole_distance_d_mm))
        flag("slot merging: D >= 2d", p.slot_length_D_mm);
    if (!(p.slot_length_D_mm < p.sheath_diameter_phi_mm))
        flag("slot_length_D < sheath_diameter_phi", p.slot_length_D_mm);
    if (!(p.inclination_angle_deg >= 0.0 && p.inclination_angle_deg < 90.0))
        flag("0 <= inclination_angle < 90", p.inclination_angle_deg);
    return report;
}

ValidationReport validate_state(const JammingState& s) {
    ValidationReport report;
    const double absolute = s.ambient_pressure_kPa + s.vacuum_gauge_pressure_kPa;
    if (!(absolute >= 0.0))
        report.violations.push_back({"ambient + gauge pressure >= 0", absolute});
    return report;
}

double absolute_pressure_kPa(const JammingState& state) {
    return state.ambient_pressure_kPa + state.vacuum_gauge_pressure_kPa;
}

namespace {
void require_valid(const FlapPattern& pattern) {
    const ValidationReport report = validate_pattern(pattern);
    if (!report.ok())
        throw Error(ErrorCode::Validation, "invalid pattern: " + report.summary());
}
} // namespace

LengthEnvelope derive_lengths(const FlapPattern& p) {
    require_valid(p);
    const double n1 = static_cast<double>(p.loop_count_N - 1);
    LengthEnvelope env;
    env.l_max_mm = n1 * (p.guide_hole_distance_d_mm + p.slot_length_D_mm / 2.0) + p.mid_length_h_mm;
    env.l_min_mm = n1 * (p.guide_hole_distance_d_mm - p.slot_length_D_mm / 2.0) + p.mid_length_h_mm;
    env.l_default_mm = n1 * p.guide_hole_distance_d_mm + p.mid_length_h_mm;
    return env;
}

double max_bend_angle_deg(const FlapPattern& p, AngleKernel kernel) {
    require_valid(p);
    const double ratio = p.slot_length_D_mm / p.sheath_diameter_phi_mm;
    if (!(ratio < 1.0))
        throw Error(ErrorCode::Validation,
                    "slot length must be smaller than sheath diameter (D/phi = " + std::to_string(ratio) + ")");
    double per_interval_rad = 0.0;
    switch (kernel) {
        case AngleKernel::Asin: per_interval_rad = std::asin(ratio); break;
        case AngleKernel::Sinh: per_interval_rad = std::sinh(ratio); break;
        case AngleKernel::Linear: per_interval_rad = ratio; break;
    }
    return static_cast<double>(p.loop_count_N - 1) * per_interval_rad * kRadToDeg;
}

double jamming_holding_force_N(const FlapPattern& p, const JammingState& s) {
    require_valid(p);
    const ValidationReport state_report = validate_state(s);
    if (!state_report.ok())
        throw Error(ErrorCode::Validation, "invalid jamming state: " + state_report.summary());
    const double pressure_Pa = std::abs(s.vacuum_gauge_pressure_kPa) * 1000.0;
    const double width_m = p.flap_width_W_mm * 1e-3;
    const double length_m = p.flap_length_L_mm * 1e-3;
    return p.friction_coefficient_mu * static_cast<double>(p.contact_surfaces_n) * pressure_Pa * width_m * length_m;
}

} // namespace jamlink::sheath
