#pragma once

#include "jamlink/sheath.hpp"

#include <array>
#include <string>
#include <vector>

namespace jamlink::pattern {

struct PatternOptions {
    double hole_diameter_mm = 0.5;
    double slot_width_mm = 0.5; // slots are elongated holes for sliding thread
    double band_height_mm = 6.0;
    double hole_row_offset_mm = 1.5;  // holes sit above the band centerline
    double slot_row_offset_mm = -1.5; // slots below, clear of the hole row
    double flap_base_fraction = 0.8;  // flap base width as a fraction of hole pitch
    double flap_tip_fraction = 0.5;
    int connection_hole_stride = 4; // a sewn connection every this many holes
};

struct Point {
    double x_mm = 0.0;
    double y_mm = 0.0;
};

struct Polyline {
    std::vector<Point> points; // closed: last vertex joins back to the first
};

struct Circle {
    double cx_mm = 0.0;
    double cy_mm = 0.0;
    double diameter_mm = 0.0;
};

/// Slot: a stadium (rounded-end rectangle), long axis along x.
struct Stadium {
    double cx_mm = 0.0;
    double cy_mm = 0.0;
    double length_mm = 0.0; // tip-to-tip, = slot length D
    double width_mm = 0.0;
};

struct FlapQuad {
    int loop_index = 0;
    int hole_index_in_loop = 0;
    int side = +1; // +1 up, -1 down
    std::array<Point, 4> corners; // base-left, base-right, tip-right, tip-left
};

struct ConnectionMarker {
    int loop_index = 0;
    int hole_index_in_loop = 0;
    double x_mm = 0.0;
    double angle_deg = 0.0; // position around the wrapped loop
};

struct CutPattern {
    std::vector<Polyline> outlines; // cut contours; first is the strip silhouette
    std::vector<Circle> holes;
    std::vector<Stadium> slots;
    std::vector<FlapQuad> flaps;
    std::vector<ConnectionMarker> connection_markers;
    std::vector<int> loop_start_hole_indices; // sewing annotation: a full loop every flaps_per_section holes
    int loop_count = 0;
    int holes_per_loop = 0;
};

/// Flat-strip cut layout: one guide-hole row at pitch d, double-sided leaning
/// flaps (one up + one down per hole), slot row at the sewn-connection
/// stations, and the strip silhouette traced around band + flaps.
CutPattern generate_cut_pattern(const sheath::FlapPattern& pattern, const PatternOptions& options = {});

/// Re-derives the sheath length envelope from generated geometry alone
/// (hole counts and pitch, slot length, strip margins).
sheath::LengthEnvelope implied_length_envelope(const CutPattern& cut);

/// SVG 1.1, millimetre units, a stroke-only "cuts" layer and an engraved
/// "annotations" layer. Byte-deterministic for fixed inputs.
std::string export_svg(const CutPattern& cut, double scale_mm_per_unit = 1.0);

} // namespace jamlink::pattern
