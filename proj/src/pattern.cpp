#include "jamlink/pattern.hpp"

#include "jamlink/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

namespace jamlink::pattern {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

void require(bool condition, const std::string& message) {
    if (!condition) throw Error(ErrorCode::Validation, "layout error: " + message);
}

} // namespace

CutPattern generate_cut_pattern(const sheath::FlapPattern& p, const PatternOptions& opt) {
    const auto report = sheath::validate_pattern(p);
    if (!report.ok())
        throw Error(ErrorCode::Validation, "invalid pattern: " + report.summary());

    require(opt.hole_diameter_mm > 0.0, "hole diameter must be positive");
    require(opt.slot_width_mm > 0.0, "slot width must be positive");
    require(opt.band_height_mm > 0.0, "band height must be positive");
    require(opt.flap_base_fraction > 0.0 && opt.flap_base_fraction < 1.0,
            "flap base fraction must lie in (0,1) so adjacent flaps stay disjoint");
    require(opt.flap_tip_fraction > 0.0 && opt.flap_tip_fraction <= 1.0, "flap tip fraction must lie in (0,1]");
    require(opt.connection_hole_stride >= 1, "connection hole stride must be >= 1");

    const double half_band = opt.band_height_mm / 2.0;
    require(std::abs(opt.hole_row_offset_mm) + opt.hole_diameter_mm / 2.0 < half_band,
            "hole row does not fit inside the band");
    require(std::abs(opt.slot_row_offset_mm) + opt.slot_width_mm / 2.0 < half_band,
            "slot row does not fit inside the band");

    const double d = p.guide_hole_distance_d_mm;
    const int fps = p.flaps_per_section;
    const int loops = p.loop_count_N;
    const int total_holes = loops * fps;
    const double loop_span = static_cast<double>(fps) * d;

    const double base_width = std::min(p.flap_width_W_mm, opt.flap_base_fraction * d);
    const double tip_width = opt.flap_tip_fraction * base_width;
    const double lean_rad = p.inclination_angle_deg * kDegToRad;
    const double lean_dx = p.flap_length_L_mm * std::sin(lean_rad);
    const double flap_rise = p.flap_length_L_mm * std::cos(lean_rad);

    {
        std::ostringstream os;
        os << "flap length L = " << p.flap_length_L_mm << "mm exceeds the loop span d*" << fps << " = "
           << loop_span << "mm";
        require(p.flap_length_L_mm <= loop_span, os.str());
    }
    {
        std::ostringstream os;
        os << "leaned flap reach " << (lean_dx + tip_width / 2.0 + base_width / 2.0)
           << "mm exceeds the loop span " << loop_span << "mm";
        require(lean_dx + tip_width / 2.0 + base_width / 2.0 <= loop_span, os.str());
    }
    {
        std::ostringstream os;
        os << "strip end margin h/2 = " << p.mid_length_h_mm / 2.0 << "mm is smaller than half the flap base "
           << base_width / 2.0 << "mm";
        require(base_width / 2.0 <= p.mid_length_h_mm / 2.0, os.str());
    }

    const double x_lo = -p.mid_length_h_mm / 2.0;
    const double x_hi = static_cast<double>(total_holes - 1) * d + p.mid_length_h_mm / 2.0;

    CutPattern cut;
    cut.loop_count = loops;
    cut.holes_per_loop = fps;

    for (int i = 0; i < total_holes; ++i)
        cut.holes.push_back({static_cast<double>(i) * d, opt.hole_row_offset_mm, opt.hole_diameter_mm});

    for (int k = 0; k < loops; ++k) {
        cut.loop_start_hole_indices.push_back(k * fps);
        for (int j = 0; j < fps; j += opt.connection_hole_stride) {
            const double x = static_cast<double>(k * fps + j) * d;
            if (p.slot_length_D_mm > 0.0) {
                std::ostringstream os;
                os << "slot at loop " << k << " hole " << j << " crosses the strip boundary";
                require(x - p.slot_length_D_mm / 2.0 >= x_lo && x + p.slot_length_D_mm / 2.0 <= x_hi, os.str());
                cut.slots.push_back({x, opt.slot_row_offset_mm, p.slot_length_D_mm, opt.slot_width_mm});
            }
            cut.connection_markers.push_back(
                {k, j, x, static_cast<double>(j) * 360.0 / static_cast<double>(fps)});
        }
    }

    for (int i = 0; i < total_holes; ++i) {
        const double x = static_cast<double>(i) * d;
        for (int side : {+1, -1}) {
            FlapQuad flap;
            flap.loop_index = i / fps;
            flap.hole_index_in_loop = i % fps;
            flap.side = side;
            const double y_base = side * half_band;
            const double y_tip = side * (half_band + flap_rise);
            flap.corners = {Point{x - base_width / 2.0, y_base}, Point{x + base_width / 2.0, y_base},
                            Point{x + lean_dx + tip_width / 2.0, y_tip},
                            Point{x + lean_dx - tip_width / 2.0, y_tip}};
            cut.flaps.push_back(flap);
        }
    }

    // Strip silhouette: band rectangle with a detour around every flap. Flap
    // bases are disjoint (base fraction < 1), so the walk stays simple.
    Polyline outline;
    outline.points.push_back({x_lo, half_band});
    for (const auto& flap : cut.flaps) {
        if (flap.side != +1) continue;
        outline.points.push_back(flap.corners[0]); // base-left
        outline.points.push_back(flap.corners[3]); // tip-left
        outline.points.push_back(flap.corners[2]); // tip-right
        outline.points.push_back(flap.corners[1]); // base-right
    }
    outline.points.push_back({x_hi, half_band});
    outline.points.push_back({x_hi, -half_band});
    for (auto it = cut.flaps.rbegin(); it != cut.flaps.rend(); ++it) {
        if (it->side != -1) continue;
        outline.points.push_back(it->corners[1]); // base-right (walking -x)
        outline.points.push_back(it->corners[2]); // tip-right
        outline.points.push_back(it->corners[3]); // tip-left
        outline.points.push_back(it->corners[0]); // base-left
    }
    outline.points.push_back({x_lo, -half_band});
    cut.outlines.push_back(std::move(outline));

    return cut;
}

sheath::LengthEnvelope implied_length_envelope(const CutPattern& cut) {
    if (cut.holes.size() < 2 || cut.loop_start_hole_indices.size() < 2 || cut.outlines.empty())
        throw Error(ErrorCode::Validation, "cut pattern too small to imply a length envelope");

    const int fps = cut.loop_start_hole_indices[1] - cut.loop_start_hole_indices[0];
    const int loops = static_cast<int>(cut.holes.size()) / fps;
    const double d = cut.holes[1].cx_mm - cut.holes[0].cx_mm;
    const double slot_length = cut.slots.empty() ? 0.0 : cut.slots.front().length_mm;

    double min_x = std::numeric_limits<double>::infinity();
    for (const auto& pt : cut.outlines.front().points) min_x = std::min(min_x, pt.x_mm);
    const double h = 2.0 * (cut.holes.front().cx_mm - min_x);

    const double n1 = static_cast<double>(loops - 1);
    sheath::LengthEnvelope env;
    env.l_max_mm = n1 * (d + slot_length / 2.0) + h;
    env.l_min_mm = n1 * (d - slot_length / 2.0) + h;
    env.l_default_mm = n1 * d + h;
    return env;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

struct Bounds {
    double min_x = std::numeric_limits<double>::infinity();
    double min_y = std::numeric_limits<double>::infinity();
    double max_x = -std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();
    void grow(double x, double y) {
        min_x = std::min(min_x, x);
        min_y = std::min(min_y, y);
        max_x = std::max(max_x, x);
        max_y = std::max(max_y, y);
    }
    bool empty() const { return !(min_x <= max_x); }
};

} // namespace

std::string export_svg(const CutPattern& cut, double scale_mm_per_unit) {
    if (!(scale_mm_per_unit > 0.0))
        throw Error(ErrorCode::Validation, "svg scale must be positive");

    constexpr double kMarkerHalf = 0.4;
    Bounds box;
    for (const auto& line : cut.outlines)
        for (const auto& pt : line.points) box.grow(pt.x_mm, pt.y_mm);
    for (const auto& hole : cut.holes) {
        box.grow(hole.cx_mm - hole.diameter_mm / 2.0, hole.cy_mm - hole.diameter_mm / 2.0);
        box.grow(hole.cx_mm + hole.diameter_mm / 2.0, hole.cy_mm + hole.diameter_mm / 2.0);
    }
    for (const auto& slot : cut.slots) {
        box.grow(slot.cx_mm - slot.length_mm / 2.0, slot.cy_mm - slot.width_mm / 2.0);
        box.grow(slot.cx_mm + slot.length_mm / 2.0, slot.cy_mm + slot.width_mm / 2.0);
    }
    for (const auto& m : cut.connection_markers) {
        box.grow(m.x_mm - kMarkerHalf, -kMarkerHalf);
        box.grow(m.x_mm + kMarkerHalf, kMarkerHalf);
    }
    if (box.empty()) box = {0.0, 0.0, 1.0, 1.0};

    const double width_mm = box.max_x - box.min_x;
    const double height_mm = box.max_y - box.min_y;
    auto ux = [&](double x) { return fmt((x - box.min_x) / scale_mm_per_unit); };
    auto uy = [&](double y) { return fmt((y - box.min_y) / scale_mm_per_unit); };
    auto ul = [&](double len) { return fmt(len / scale_mm_per_unit); };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(width_mm)
        << "mm\" height=\"" << fmt(height_mm) << "mm\" viewBox=\"0 0 " << ul(width_mm) << ' ' << ul(height_mm)
        << "\">\n";

    svg << "  <g id=\"cuts\" fill=\"none\" stroke=\"#000000\" stroke-width=\"0.2\">\n";
    for (const auto& line : cut.outlines) {
        if (line.points.empty()) continue;
        svg << "    <path d=\"M " << ux(line.points[0].x_mm) << ' ' << uy(line.points[0].y_mm);
        for (std::size_t i = 1; i < line.points.size(); ++i)
            svg << " L " << ux(line.points[i].x_mm) << ' ' << uy(line.points[i].y_mm);
        svg << " Z\"/>\n";
    }
    for (const auto& hole : cut.holes)
        svg << "    <circle cx=\"" << ux(hole.cx_mm) << "\" cy=\"" << uy(hole.cy_mm) << "\" r=\""
            << ul(hole.diameter_mm / 2.0) << "\"/>\n";
    for (const auto& slot : cut.slots)
        svg << "    <rect x=\"" << ux(slot.cx_mm - slot.length_mm / 2.0) << "\" y=\""
            << uy(slot.cy_mm - slot.width_mm / 2.0) << "\" width=\"" << ul(slot.length_mm) << "\" height=\""
            << ul(slot.width_mm) << "\" rx=\"" << ul(slot.width_mm / 2.0) << "\" ry=\"" << ul(slot.width_mm / 2.0)
            << "\"/>\n";
    svg << "  </g>\n";

    svg << "  <g id=\"annotations\" fill=\"none\" stroke=\"#888888\" stroke-width=\"0.1\">\n";
    for (const auto& m : cut.connection_markers) {
        svg << "    <path d=\"M " << ux(m.x_mm - kMarkerHalf) << ' ' << uy(0.0) << " L " << ux(m.x_mm + kMarkerHalf)
            << ' ' << uy(0.0) << " M " << ux(m.x_mm) << ' ' << uy(-kMarkerHalf) << " L " << ux(m.x_mm) << ' '
            << uy(kMarkerHalf) << "\"/>\n";
    }
    svg << "  </g>\n";
    svg << "</svg>\n";
    return svg.str();
}

} // namespace jamlink::pattern
