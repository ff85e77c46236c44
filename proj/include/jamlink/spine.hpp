#pragma once

#include "jamlink/sheath.hpp"

#include <string>

namespace jamlink::spine {

/// Multi-segment flexible spine. Defaults are the reference design: 14 rigid
/// segments joined by ligaments, chained between two link ends.
struct SpineDesign {
    double segment_height_w_mm = 8.0;
    double segment_diameter_Ds_mm = 32.5;
    double ligament_beam_B_mm = 9.0;
    double ligament_neutral_angle_deg = 45.0; // carried parameter, enters no computation
    double neutral_gap_Gn_mm = 4.53;
    double compressed_gap_Gc_mm = 0.0;
    double extended_gap_Ge_mm = 11.0;
    int segment_count = 14;
    int end_count = 2;
    double end_support_each_mm = 10.0;
    int gap_count = 15; // defaults to segment_count + end_count - 1 for a single chain
};

inline int default_gap_count(const SpineDesign& s) { return s.segment_count + s.end_count - 1; }

struct SpineEnvelope {
    double neutral_length_mm = 0.0;
    double compressed_length_mm = 0.0;
    double extended_length_mm = 0.0;
    double rigid_length_mm = 0.0;
    double flexible_travel_mm = 0.0; // extended - compressed
};

struct CompatibilityReport {
    bool pass = false;
    bool compression_ok = false; // spine compresses at least as far as the sheath's l_min
    bool extension_ok = false;   // spine extends at least as far as the sheath's l_max
    double spine_rigid_flexible_ratio = 0.0;  // rigid / (extended - rigid)
    double sheath_rigid_flexible_ratio = 0.0; // l_min / (l_max - l_min)
    bool ratio_ok = false;                    // spine ratio <= sheath ratio (informational)
    std::string verdict;                      // "PASS" or "FAIL: ..."
};

sheath::ValidationReport validate_spine(const SpineDesign& design);

/// Central pass-through gap at full compression:
/// g = Ds/2 - sqrt(B^2 - (Gc + w/2)^2). May be negative (infeasible but
/// reported raw so a search can penalize it smoothly). Throws when the root
/// is imaginary.
double central_gap_mm(const SpineDesign& design);

/// Inverse of central_gap for the beam length:
/// B_max = sqrt((Ds/2 - min_gap)^2 + (Gc + w/2)^2). Requires min_gap < Ds/2.
double max_beam_length_mm(const SpineDesign& design, double min_gap_mm);

SpineEnvelope spine_envelope(const SpineDesign& design);

/// PASS iff the spine compresses to at most the sheath's l_min and extends to
/// at least its l_max, so the spine never limits the sheath.
CompatibilityReport check_compatibility(const SpineEnvelope& spine_env, const sheath::LengthEnvelope& sheath_env);

} // namespace jamlink::spine
