#include "jamlink/spine.hpp"

#include "jamlink/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace jamlink::spine {

sheath::ValidationReport validate_spine(const SpineDesign& s) {
    sheath::ValidationReport report;
    auto flag = [&](const std::string& constraint, double value) {
        report.violations.push_back({constraint, value});
    };

    if (!(s.segment_height_w_mm > 0.0)) flag("segment_height_w > 0", s.segment_height_w_mm);
    if (!(s.segment_diameter_Ds_mm > 0.0)) flag("segment_diameter_Ds > 0", s.segment_diameter_Ds_mm);
    if (!(s.ligament_beam_B_mm > 0.0)) flag("ligament_beam_B > 0", s.ligament_beam_B_mm);
    if (!(s.compressed_gap_Gc_mm >= 0.0)) flag("compressed_gap_Gc >= 0", s.compressed_gap_Gc_mm);
    if (!(s.compressed_gap_Gc_mm <= s.neutral_gap_Gn_mm)) flag("Gc <= Gn", s.neutral_gap_Gn_mm);
    if (!(s.neutral_gap_Gn_mm <= s.extended_gap_Ge_mm)) flag("Gn <= Ge", s.extended_gap_Ge_mm);
    if (s.segment_count < 1) flag("segment_count >= 1", s.segment_count);
    if (s.end_count < 0) flag("end_count >= 0", s.end_count);
    if (s.end_count > 0 && !(s.end_support_each_mm > 0.0)) flag("end_support_each > 0", s.end_support_each_mm);
    if (s.gap_count < 1) flag("gap_count >= 1", s.gap_count);
    return report;
}

namespace {
void require_valid(const SpineDesign& design) {
    const auto report = validate_spine(design);
    if (!report.ok())
        throw Error(ErrorCode::Validation, "invalid spine: " + report.summary());
}
} // namespace

double central_gap_mm(const SpineDesign& s) {
    require_valid(s);
    const double reach = s.compressed_gap_Gc_mm + s.segment_height_w_mm / 2.0;
    const double under_root = s.ligament_beam_B_mm * s.ligament_beam_B_mm - reach * reach;
    if (under_root < 0.0) {
        std::ostringstream os;
        os << "central gap is imaginary: ligament beam B = " << s.ligament_beam_B_mm
           << "mm is shorter than Gc + w/2 = " << reach << "mm";
        throw Error(ErrorCode::Infeasible, os.str());
    }
    return s.segment_diameter_Ds_mm / 2.0 - std::sqrt(under_root);
}

double max_beam_length_mm(const SpineDesign& s, double min_gap_mm) {
    require_valid(s);
    const double radius = s.segment_diameter_Ds_mm / 2.0;
    if (!(min_gap_mm < radius)) {
        std::ostringstream os;
        os << "required central gap " << min_gap_mm << "mm cannot reach the segment radius "
           << radius << "mm";
        throw Error(ErrorCode::Infeasible, os.str());
    }
    const double radial = radius - min_gap_mm;
    const double reach = s.compressed_gap_Gc_mm + s.segment_height_w_mm / 2.0;
    return std::sqrt(radial * radial + reach * reach);
}

SpineEnvelope spine_envelope(const SpineDesign& s) {
    require_valid(s);
    SpineEnvelope env;
    const double gaps = static_cast<double>(s.gap_count);
    env.rigid_length_mm = static_cast<double>(s.segment_count) * s.segment_height_w_mm +
                          static_cast<double>(s.end_count) * s.end_support_each_mm;
    env.compressed_length_mm = env.rigid_length_mm + gaps * s.compressed_gap_Gc_mm;
    env.neutral_length_mm = env.rigid_length_mm + gaps * s.neutral_gap_Gn_mm;
    env.extended_length_mm = env.rigid_length_mm + gaps * s.extended_gap_Ge_mm;
    env.flexible_travel_mm = env.extended_length_mm - env.compressed_length_mm;
    return env;
}

CompatibilityReport check_compatibility(const SpineEnvelope& spine_env, const sheath::LengthEnvelope& sheath_env) {
    CompatibilityReport report;
    report.compression_ok = spine_env.compressed_length_mm <= sheath_env.l_min_mm;
    report.extension_ok = spine_env.extended_length_mm >= sheath_env.l_max_mm;
    report.pass = report.compression_ok && report.extension_ok;

    const double spine_flexible = spine_env.extended_length_mm - spine_env.rigid_length_mm;
    const double sheath_flexible = sheath_env.l_max_mm - sheath_env.l_min_mm;
    report.spine_rigid_flexible_ratio =
        spine_flexible > 0.0 ? spine_env.rigid_length_mm / spine_flexible : std::numeric_limits<double>::infinity();
    report.sheath_rigid_flexible_ratio =
        sheath_flexible > 0.0 ? sheath_env.l_min_mm / sheath_flexible : std::numeric_limits<double>::infinity();
    report.ratio_ok = report.spine_rigid_flexible_ratio <= report.sheath_rigid_flexible_ratio;

    if (report.pass) {
        report.verdict = "PASS";
    } else if (!report.compression_ok) {
        report.verdict = "FAIL: spine limits compression";
    } else {
        report.verdict = "FAIL: spine limits extension";
    }
    return report;
}

} // namespace jamlink::spine
