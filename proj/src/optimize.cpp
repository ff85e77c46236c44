#include "jamlink/optimize.hpp"

#include "jamlink/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace jamlink::optimize {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

const std::vector<std::string> kSheathParams = {"W", "L", "d", "D", "phi", "N"};
const std::vector<std::string> kSpineParams = {"B", "Ds", "w", "Gc", "Gn", "Ge"};

void apply_parameter(LinkDesign& link, const std::string& name, double value) {
    auto& p = link.pattern;
    if (name == "W") { p.flap_width_W_mm = value; return; }
    if (name == "L") { p.flap_length_L_mm = value; return; }
    if (name == "d") { p.guide_hole_distance_d_mm = value; return; }
    if (name == "D") { p.slot_length_D_mm = value; return; }
    if (name == "phi") { p.sheath_diameter_phi_mm = value; return; }
    if (name == "N") { p.loop_count_N = static_cast<int>(std::lround(value)); return; }
    if (!link.spine)
        throw Error(ErrorCode::Schema, "search parameter '" + name + "' needs a spine in the base design");
    auto& s = *link.spine;
    if (name == "B") { s.ligament_beam_B_mm = value; return; }
    if (name == "Ds") { s.segment_diameter_Ds_mm = value; return; }
    if (name == "w") { s.segment_height_w_mm = value; return; }
    if (name == "Gc") { s.compressed_gap_Gc_mm = value; return; }
    if (name == "Gn") { s.neutral_gap_Gn_mm = value; return; }
    if (name == "Ge") { s.extended_gap_Ge_mm = value; return; }
    throw Error(ErrorCode::Schema, "unknown search parameter '" + name + "'");
}

double range_value(const ParameterRange& r, int i) {
    if (r.steps < 2) return r.lo;
    return r.lo + (r.hi - r.lo) * static_cast<double>(i) / static_cast<double>(r.steps - 1);
}

struct Enumeration {
    std::vector<std::string> names;
    std::vector<ParameterRange> ranges;
    std::size_t total = 1;

    LinkDesign candidate(const LinkDesign& base, std::size_t index) const {
        LinkDesign link = base;
        for (std::size_t dim = names.size(); dim-- > 0;) {
            const int steps = ranges[dim].steps;
            const int i = static_cast<int>(index % static_cast<std::size_t>(steps));
            index /= static_cast<std::size_t>(steps);
            apply_parameter(link, names[dim], range_value(ranges[dim], i));
        }
        return link;
    }
};

Enumeration make_enumeration(const SearchBox& box) {
    Enumeration en;
    for (const auto& [name, range] : box.ranges) {
        if (range.steps < 1)
            throw Error(ErrorCode::Schema, "parameter '" + name + "' needs at least one grid step");
        if (range.hi < range.lo)
            throw Error(ErrorCode::Schema, "parameter '" + name + "' has hi < lo");
        en.names.push_back(name);
        en.ranges.push_back(range);
        if (en.total > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(range.steps))
            throw Error(ErrorCode::Infeasible, "search grid size overflows");
        en.total *= static_cast<std::size_t>(range.steps);
    }
    return en;
}

} // namespace

std::vector<double> canonical_parameter_tuple(const LinkDesign& link) {
    const auto& p = link.pattern;
    std::vector<double> tuple = {p.flap_width_W_mm,
                                 p.flap_length_L_mm,
                                 p.guide_hole_distance_d_mm,
                                 p.slot_length_D_mm,
                                 p.sheath_diameter_phi_mm,
                                 static_cast<double>(p.loop_count_N)};
    if (link.spine) {
        const auto& s = *link.spine;
        tuple.insert(tuple.end(), {s.ligament_beam_B_mm, s.segment_diameter_Ds_mm, s.segment_height_w_mm,
                                   s.compressed_gap_Gc_mm, s.neutral_gap_Gn_mm, s.extended_gap_Ge_mm});
    }
    return tuple;
}

RankedDesign evaluate_design(const LinkDesign& link, const DesignTargets& targets, sheath::AngleKernel kernel) {
    RankedDesign result;
    result.link = link;

    const bool pattern_ok = sheath::validate_pattern(link.pattern).ok();
    bool spine_ok = true;
    bool gap_real = true;
    double gap = 0.0;
    if (link.spine) {
        spine_ok = spine::validate_spine(*link.spine).ok();
        if (spine_ok) {
            try {
                gap = spine::central_gap_mm(*link.spine);
            } catch (const Error&) {
                gap_real = false;
            }
        } else {
            gap_real = false;
        }
    }
    result.structurally_valid = pattern_ok && spine_ok && gap_real;

    double theta_max = kNegInf;
    double holding = kNegInf;
    sheath::LengthEnvelope env{kNegInf, kNegInf, kNegInf};
    if (pattern_ok) {
        env = sheath::derive_lengths(link.pattern);
        holding = sheath::jamming_holding_force_N(link.pattern, link.jamming);
        if (link.pattern.slot_length_D_mm < link.pattern.sheath_diameter_phi_mm)
            theta_max = sheath::max_bend_angle_deg(link.pattern, kernel);
    }

    // margin names stay within the small-string buffer: the search kernel
    // builds these per candidate across threads
    result.margins.reserve(9);
    auto margin = [&](const char* name, double value) { result.margins.push_back({name, value}); };
    margin("bend_angle", theta_max == kNegInf ? kNegInf : theta_max - targets.min_bend_angle_deg);
    margin("central_gap", link.spine && !gap_real ? kNegInf
                                                  : (link.spine ? gap : 0.0) - targets.min_central_gap_mm);
    margin("holding_force", holding == kNegInf ? kNegInf : holding - targets.min_holding_force_N);
    if (targets.length_l_min_at_most_mm)
        margin("l_min", env.l_min_mm == kNegInf ? kNegInf : *targets.length_l_min_at_most_mm - env.l_min_mm);
    if (targets.length_l_max_at_least_mm)
        margin("l_max", env.l_max_mm == kNegInf ? kNegInf : env.l_max_mm - *targets.length_l_max_at_least_mm);
    if (targets.sheath_diameter_lo_mm)
        margin("diameter_lo", link.pattern.sheath_diameter_phi_mm - *targets.sheath_diameter_lo_mm);
    if (targets.sheath_diameter_hi_mm)
        margin("diameter_hi", *targets.sheath_diameter_hi_mm - link.pattern.sheath_diameter_phi_mm);
    if (link.spine) {
        if (result.structurally_valid && pattern_ok) {
            const auto spine_env = spine::spine_envelope(*link.spine);
            margin("compression", env.l_min_mm - spine_env.compressed_length_mm);
            margin("extension", spine_env.extended_length_mm - env.l_max_mm);
        } else {
            margin("compression", kNegInf);
            margin("extension", kNegInf);
        }
    }

    bool all_non_negative = true;
    for (const auto& m : result.margins) all_non_negative = all_non_negative && m.margin_value >= 0.0;
    result.feasible = result.structurally_valid && all_non_negative;

    if (result.structurally_valid) {
        result.objective = targets.weight_force_per_diameter * (holding / link.pattern.sheath_diameter_phi_mm) +
                           targets.weight_central_gap * (link.spine ? gap : 0.0);
    } else {
        result.objective = kNegInf;
    }
    return result;
}

namespace {

double spine_gap_for_ranking(const LinkDesign& link) {
    if (!link.spine) return 0.0;
    try {
        return spine::central_gap_mm(*link.spine);
    } catch (const Error&) {
        return kNegInf;
    }
}

// allocation-free canonical ordering (the tuple helper mirrors this order)
int compare_parameters(const LinkDesign& a, const LinkDesign& b) {
    auto cmp = [](double x, double y) { return x < y ? -1 : (x > y ? 1 : 0); };
    const auto& pa = a.pattern;
    const auto& pb = b.pattern;
    if (int c = cmp(pa.flap_width_W_mm, pb.flap_width_W_mm)) return c;
    if (int c = cmp(pa.flap_length_L_mm, pb.flap_length_L_mm)) return c;
    if (int c = cmp(pa.guide_hole_distance_d_mm, pb.guide_hole_distance_d_mm)) return c;
    if (int c = cmp(pa.slot_length_D_mm, pb.slot_length_D_mm)) return c;
    if (int c = cmp(pa.sheath_diameter_phi_mm, pb.sheath_diameter_phi_mm)) return c;
    if (int c = cmp(pa.loop_count_N, pb.loop_count_N)) return c;
    if (a.spine.has_value() != b.spine.has_value()) return a.spine.has_value() ? 1 : -1;
    if (!a.spine) return 0;
    const auto& sa = *a.spine;
    const auto& sb = *b.spine;
    if (int c = cmp(sa.ligament_beam_B_mm, sb.ligament_beam_B_mm)) return c;
    if (int c = cmp(sa.segment_diameter_Ds_mm, sb.segment_diameter_Ds_mm)) return c;
    if (int c = cmp(sa.segment_height_w_mm, sb.segment_height_w_mm)) return c;
    if (int c = cmp(sa.compressed_gap_Gc_mm, sb.compressed_gap_Gc_mm)) return c;
    if (int c = cmp(sa.neutral_gap_Gn_mm, sb.neutral_gap_Gn_mm)) return c;
    return cmp(sa.extended_gap_Ge_mm, sb.extended_gap_Ge_mm);
}

bool rank_less(const RankedDesign& a, const RankedDesign& b) {
    if (a.objective != b.objective) return a.objective > b.objective;
    const double ga = spine_gap_for_ranking(a.link);
    const double gb = spine_gap_for_ranking(b.link);
    if (ga != gb) return ga > gb;
    return compare_parameters(a.link, b.link) < 0;
}

SearchResult search_impl(const DesignTargets& targets, const SearchBox& box, std::size_t budget, int refine_best_k,
                         int refine_rounds, sheath::AngleKernel kernel, bool parallel) {
    if (budget < 1)
        throw Error(ErrorCode::Validation, "evaluation budget must be >= 1");
    const Enumeration en = make_enumeration(box);
    if (en.total > budget)
        throw Error(ErrorCode::Infeasible, "search grid has " + std::to_string(en.total) +
                                               " candidates, exceeding the evaluation budget of " +
                                               std::to_string(budget) + "; coarsen the bounds");

    std::vector<RankedDesign> evaluated(en.total);
    const long long total = static_cast<long long>(en.total);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
    for (long long i = 0; i < total; ++i) {
        const LinkDesign candidate = en.candidate(box.base, static_cast<std::size_t>(i));
        evaluated[static_cast<std::size_t>(i)] = evaluate_design(candidate, targets, kernel);
    }
    (void)parallel;

    SearchResult result;
    result.evaluations = en.total;

    for (auto& r : evaluated)
        if (r.feasible) result.grid_feasible.push_back(r);
    std::stable_sort(result.grid_feasible.begin(), result.grid_feasible.end(), rank_less);

    if (result.grid_feasible.empty()) {
        result.feasible = false;
        // Report the constraint that stays furthest from satisfiable across
        // the whole grid.
        if (!evaluated.empty()) {
            std::map<std::string, double> best_margin;
            for (const auto& r : evaluated)
                for (const auto& m : r.margins) {
                    auto [it, inserted] = best_margin.try_emplace(m.name, m.margin_value);
                    if (!inserted) it->second = std::max(it->second, m.margin_value);
                }
            result.binding_margin = std::numeric_limits<double>::infinity();
            for (const auto& [name, margin] : best_margin) {
                if (margin < result.binding_margin) {
                    result.binding_margin = margin;
                    result.binding_constraint = name;
                }
            }
        }
        return result;
    }

    result.feasible = true;
    result.designs = result.grid_feasible;

    // Local refinement of the best K on the continuous searched parameters.
    std::size_t evals_left = budget > en.total ? budget - en.total : 0;
    const int k_limit = std::min<std::size_t>(static_cast<std::size_t>(std::max(refine_best_k, 0)),
                                              result.designs.size());
    for (int rank = 0; rank < k_limit; ++rank) {
        RankedDesign current = result.designs[static_cast<std::size_t>(rank)];
        for (int round = 0; round < refine_rounds; ++round) {
            for (std::size_t dim = 0; dim < en.names.size(); ++dim) {
                const auto& range = en.ranges[dim];
                if (en.names[dim] == "N" || range.steps < 2) continue;
                const double grid_step = (range.hi - range.lo) / static_cast<double>(range.steps - 1);
                const double step = grid_step * std::pow(0.5, round + 1);
                for (const double direction : {-1.0, +1.0}) {
                    if (evals_left == 0) break;
                    LinkDesign trial = current.link;
                    const std::string& name = en.names[dim];
                    const double value = [&]() {
                        const auto& p = trial.pattern;
                        if (name == "W") return p.flap_width_W_mm;
                        if (name == "L") return p.flap_length_L_mm;
                        if (name == "d") return p.guide_hole_distance_d_mm;
                        if (name == "D") return p.slot_length_D_mm;
                        if (name == "phi") return p.sheath_diameter_phi_mm;
                        const auto& s = *trial.spine;
                        if (name == "B") return s.ligament_beam_B_mm;
                        if (name == "Ds") return s.segment_diameter_Ds_mm;
                        if (name == "w") return s.segment_height_w_mm;
                        if (name == "Gc") return s.compressed_gap_Gc_mm;
                        if (name == "Gn") return s.neutral_gap_Gn_mm;
                        return s.extended_gap_Ge_mm;
                    }();
                    const double proposed = std::clamp(value + direction * step, range.lo, range.hi);
                    if (proposed == value) continue;
                    apply_parameter(trial, name, proposed);
                    RankedDesign scored = evaluate_design(trial, targets, kernel);
                    --evals_left;
                    ++result.evaluations;
                    if (scored.feasible && scored.objective > current.objective) current = std::move(scored);
                }
            }
        }
        result.designs[static_cast<std::size_t>(rank)] = std::move(current);
    }
    std::stable_sort(result.designs.begin(), result.designs.end(), rank_less);
    return result;
}

} // namespace

SearchResult search_designs(const DesignTargets& targets, const SearchBox& box, std::size_t budget,
                            int refine_best_k, int refine_rounds, sheath::AngleKernel kernel) {
    return search_impl(targets, box, budget, refine_best_k, refine_rounds, kernel, true);
}

SearchResult search_designs_serial(const DesignTargets& targets, const SearchBox& box, std::size_t budget,
                                   int refine_best_k, int refine_rounds, sheath::AngleKernel kernel) {
    return search_impl(targets, box, budget, refine_best_k, refine_rounds, kernel, false);
}

} // namespace jamlink::optimize
