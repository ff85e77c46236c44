#pragma once

#include "jamlink/link.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace jamlink::optimize {

/// User requirements a candidate design must meet, plus ranking weights.
/// All minima default to zero (no requirement); optional bounds are off
/// unless set.
struct DesignTargets {
    double min_bend_angle_deg = 0.0;
    double min_central_gap_mm = 0.0;
    double min_holding_force_N = 0.0;
    std::optional<double> length_l_min_at_most_mm; // design l_min must be <= this
    std::optional<double> length_l_max_at_least_mm; // design l_max must be >= this
    std::optional<double> sheath_diameter_lo_mm;
    std::optional<double> sheath_diameter_hi_mm;
    double weight_force_per_diameter = 1.0;
    double weight_central_gap = 0.0;
};

struct ConstraintMargin {
    std::string name;
    double margin_value = 0.0; // >= 0 means satisfied
};

struct RankedDesign {
    LinkDesign link;
    double objective = 0.0;
    std::vector<ConstraintMargin> margins;
    bool structurally_valid = false; // pattern/spine valid and spine-sheath compatible
    bool feasible = false;           // structurally valid and all margins >= 0
};

/// Searchable parameters: "W", "L", "d", "D", "phi" (sheath), and "B", "Ds",
/// "w", "Gc", "Gn", "Ge" (spine, when the base design has one); integer "N".
struct ParameterRange {
    double lo = 0.0;
    double hi = 0.0;
    int steps = 1; // grid points across [lo, hi]
};

struct SearchBox {
    LinkDesign base;                              // supplies every non-searched parameter
    std::map<std::string, ParameterRange> ranges; // ordered: deterministic enumeration
};

struct SearchResult {
    std::vector<RankedDesign> designs;       // refined, ranked best-first
    std::vector<RankedDesign> grid_feasible; // raw grid feasible set, ranked (reference surface)
    bool feasible = false;
    std::string binding_constraint; // set when infeasible: smallest best-achievable margin
    double binding_margin = 0.0;
    std::size_t evaluations = 0;
};

/// Pure composition of the sheath/spine closed forms; never throws —
/// infeasibility shows up as negative margins (or -inf when a formula's
/// domain is violated).
RankedDesign evaluate_design(const LinkDesign& link, const DesignTargets& targets,
                             sheath::AngleKernel kernel = sheath::AngleKernel::Asin);

/// Deterministic coarse grid (parallel evaluation) + coordinate-descent
/// refinement of the best K feasible designs.
SearchResult search_designs(const DesignTargets& targets, const SearchBox& box, std::size_t budget,
                            int refine_best_k = 5, int refine_rounds = 3,
                            sheath::AngleKernel kernel = sheath::AngleKernel::Asin);

/// Serial brute-force reference of the same grid enumeration, kept for
/// testing the parallel path (identical results required).
SearchResult search_designs_serial(const DesignTargets& targets, const SearchBox& box, std::size_t budget,
                                   int refine_best_k = 5, int refine_rounds = 3,
                                   sheath::AngleKernel kernel = sheath::AngleKernel::Asin);

/// Canonical ordering key used for ranking ties.
std::vector<double> canonical_parameter_tuple(const LinkDesign& link);

} // namespace jamlink::optimize
