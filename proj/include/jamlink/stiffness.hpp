#pragma once

#include "jamlink/sheath.hpp"
#include "jamlink/spine.hpp"
#include "jamlink/trace.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace jamlink::stiffness {

enum class VariantKind { Granular, Layer, LayerWithSpine };

std::string to_string(VariantKind kind);
VariantKind variant_kind_from_string(const std::string& name);

struct LinkVariant {
    VariantKind kind = VariantKind::Layer;
    std::optional<sheath::FlapPattern> pattern; // absent for granular
    std::optional<spine::SpineDesign> spine;    // present only for layer_with_spine
};

LinkVariant granular_variant();
LinkVariant layer_variant(const sheath::FlapPattern& pattern);
LinkVariant layer_with_spine_variant(const sheath::FlapPattern& pattern, const spine::SpineDesign& spine);

/// Throws when the variant is structurally inconsistent (missing pattern,
/// missing spine, or a spine that fails compatibility against the sheath).
void validate_variant(const LinkVariant& variant);

/// Calibration container for the quasi-static resisting-force model.
///
/// Layer-family force at the canonical 10mm deflection:
///   F = (unjammed_stiffness*10mm + jam_stiffness_scale*F_hold)
///       * (1 + bend_gain*theta_rad^2)           geometric amplification
///       * weak-end fade (layer_with_spine only, vanishes by 90 deg)
///       * buckling_force_knockdown when buckled.
/// Granular links have no first-principles model; granular_stiffness and
/// granular_bend_gain are a purely empirical override (linear in theta).
struct StiffnessModelParams {
    double unjammed_stiffness_N_per_mm = 0.1;
    double jam_stiffness_scale = 0.2;
    double post_slip_slope_N_per_mm = 0.05;
    double bend_gain_per_rad2 = 0.18;
    double buckling_ratio_threshold = 0.8;
    double buckling_force_knockdown = 0.33;
    double hysteresis_fraction = 0.35;
    double weak_end_factor = 1.0; // <1 suppresses the spine variant's base force at 0 bend
    double granular_stiffness_N_per_mm = 0.0; // 0 = no granular model available
    double granular_bend_gain_per_rad = 0.0;
    // Central-diameter ovalization slopes, ratio(theta) = 1 - rate*theta_rad.
    // Defaults reproduce the measured 180-degree ratios 0.929 / 0.745 / 0.979.
    double ovalization_rate_granular_per_rad = 0.0226;
    double ovalization_rate_layer_per_rad = 0.0812;
    double ovalization_rate_spine_per_rad = 0.0067;
    double preload_force_at_180_N = 0.0; // residual contact force artifact, off by default
};

sheath::ValidationReport validate_params(const StiffnessModelParams& params);

/// Canonical test deflection of the evaluation protocol.
inline constexpr double kReferenceDeflectionMm = 10.0;

double ovalization_rate(const StiffnessModelParams& params, VariantKind kind);

/// Least-squares slope of (theta_rad, 1 - ratio) through the origin.
double fit_ovalization_rate(const std::vector<std::pair<double, double>>& angle_deg_ratio);

/// Central-diameter buckling criterion: only spineless variants buckle, and
/// only once the predicted diameter ratio drops below the threshold.
bool buckled(const LinkVariant& variant, double bend_angle_deg, const StiffnessModelParams& params);

/// Peak resisting force at the canonical 10mm deflection.
double predict_max_force_N(const LinkVariant& variant, double bend_angle_deg, const sheath::JammingState& state,
                           const StiffnessModelParams& params);

/// Piecewise-linear deflect-and-return trace at 0.1mm resolution whose peak
/// equals predict_max_force_N exactly.
ForceDisplacementTrace synthesize_trace(const LinkVariant& variant, double bend_angle_deg,
                                        const sheath::JammingState& state, const StiffnessModelParams& params);

struct CalibrationTarget {
    LinkVariant variant;
    double bend_angle_deg = 0.0;
    double measured_max_force_N = 0.0;
};

struct CalibrationResult {
    StiffnessModelParams params;
    std::vector<double> relative_residuals; // per target, (pred - measured)/measured
    double max_abs_relative_residual = 0.0;
};

/// Grid seed + coordinate-descent refinement, minimizing summed squared
/// relative error. Deterministic: fixed grids, no RNG. unjammed_stiffness is
/// held at its incoming value (the base force k0*10mm + scale*F_hold has a
/// single identifiable degree of freedom when all targets share one pressure).
CalibrationResult calibrate(const std::vector<CalibrationTarget>& targets, const sheath::JammingState& state,
                            const StiffnessModelParams& initial = {});

/// Serial reference of the same fit, kept for testing the parallel path.
CalibrationResult calibrate_serial(const std::vector<CalibrationTarget>& targets, const sheath::JammingState& state,
                                   const StiffnessModelParams& initial = {});

} // namespace jamlink::stiffness
