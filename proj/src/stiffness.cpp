#include "jamlink/stiffness.hpp"

#include "jamlink/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace jamlink::stiffness {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kWeakEndFadeDeg = 90.0; // weak-end effect is gone once force can't concentrate on the end
}

std::string to_string(VariantKind kind) {
    switch (kind) {
        case VariantKind::Granular: return "granular";
        case VariantKind::Layer: return "layer";
        case VariantKind::LayerWithSpine: return "layer_with_spine";
    }
    return "layer";
}

VariantKind variant_kind_from_string(const std::string& name) {
    if (name == "granular") return VariantKind::Granular;
    if (name == "layer") return VariantKind::Layer;
    if (name == "layer_with_spine") return VariantKind::LayerWithSpine;
    throw Error(ErrorCode::Schema, "unknown variant '" + name + "' (expected granular|layer|layer_with_spine)");
}

LinkVariant granular_variant() { return {VariantKind::Granular, std::nullopt, std::nullopt}; }

LinkVariant layer_variant(const sheath::FlapPattern& pattern) {
    return {VariantKind::Layer, pattern, std::nullopt};
}

LinkVariant layer_with_spine_variant(const sheath::FlapPattern& pattern, const spine::SpineDesign& spine) {
    return {VariantKind::LayerWithSpine, pattern, spine};
}

void validate_variant(const LinkVariant& variant) {
    if (variant.kind == VariantKind::Granular) return;
    if (!variant.pattern)
        throw Error(ErrorCode::Validation, to_string(variant.kind) + " variant requires a flap pattern");
    const auto pattern_report = sheath::validate_pattern(*variant.pattern);
    if (!pattern_report.ok())
        throw Error(ErrorCode::Validation, "invalid pattern: " + pattern_report.summary());
    if (variant.kind == VariantKind::LayerWithSpine) {
        if (!variant.spine)
            throw Error(ErrorCode::Validation, "layer_with_spine variant requires a spine design");
        const auto compat = spine::check_compatibility(spine::spine_envelope(*variant.spine),
                                                       sheath::derive_lengths(*variant.pattern));
        if (!compat.pass)
            throw Error(ErrorCode::Infeasible, "spine incompatible with sheath: " + compat.verdict);
    }
}

sheath::ValidationReport validate_params(const StiffnessModelParams& p) {
    sheath::ValidationReport report;
    auto flag = [&](const std::string& constraint, double value) {
        report.violations.push_back({constraint, value});
    };
    if (!(p.unjammed_stiffness_N_per_mm >= 0.0)) flag("unjammed_stiffness >= 0", p.unjammed_stiffness_N_per_mm);
    if (!(p.jam_stiffness_scale >= 0.0)) flag("jam_stiffness_scale >= 0", p.jam_stiffness_scale);
    if (!(p.post_slip_slope_N_per_mm >= 0.0)) flag("post_slip_slope >= 0", p.post_slip_slope_N_per_mm);
    if (!(p.bend_gain_per_rad2 >= 0.0)) flag("bend_gain >= 0", p.bend_gain_per_rad2);
    if (!(p.buckling_ratio_threshold > 0.0 && p.buckling_ratio_threshold < 1.0))
        flag("0 < buckling_ratio_threshold < 1", p.buckling_ratio_threshold);
    if (!(p.buckling_force_knockdown >= 0.0)) flag("buckling_force_knockdown >= 0", p.buckling_force_knockdown);
    if (!(p.hysteresis_fraction >= 0.0 && p.hysteresis_fraction <= 1.0))
        flag("0 <= hysteresis_fraction <= 1", p.hysteresis_fraction);
    if (!(p.weak_end_factor > 0.0 && p.weak_end_factor <= 1.0)) flag("0 < weak_end_factor <= 1", p.weak_end_factor);
    if (!(p.granular_stiffness_N_per_mm >= 0.0)) flag("granular_stiffness >= 0", p.granular_stiffness_N_per_mm);
    if (!(p.granular_bend_gain_per_rad >= 0.0)) flag("granular_bend_gain >= 0", p.granular_bend_gain_per_rad);
    return report;
}

double ovalization_rate(const StiffnessModelParams& params, VariantKind kind) {
    switch (kind) {
        case VariantKind::Granular: return params.ovalization_rate_granular_per_rad;
        case VariantKind::Layer: return params.ovalization_rate_layer_per_rad;
        case VariantKind::LayerWithSpine: return params.ovalization_rate_spine_per_rad;
    }
    return params.ovalization_rate_layer_per_rad;
}

double fit_ovalization_rate(const std::vector<std::pair<double, double>>& angle_deg_ratio) {
    double num = 0.0, den = 0.0;
    for (const auto& [angle_deg, ratio] : angle_deg_ratio) {
        const double theta = angle_deg * kDegToRad;
        num += theta * (1.0 - ratio);
        den += theta * theta;
    }
    if (den <= 0.0)
        throw Error(ErrorCode::Infeasible, "ovalization fit needs at least one non-zero bend angle");
    return num / den;
}

bool buckled(const LinkVariant& variant, double bend_angle_deg, const StiffnessModelParams& params) {
    if (variant.kind == VariantKind::LayerWithSpine) return false;
    if (bend_angle_deg <= 0.0) return false;
    const double ratio = 1.0 - ovalization_rate(params, variant.kind) * bend_angle_deg * kDegToRad;
    return ratio < params.buckling_ratio_threshold;
}

namespace {

double weak_end_multiplier(const StiffnessModelParams& params, VariantKind kind, double bend_angle_deg) {
    if (kind != VariantKind::LayerWithSpine) return 1.0;
    const double fade = std::max(0.0, 1.0 - bend_angle_deg / kWeakEndFadeDeg);
    return 1.0 - (1.0 - params.weak_end_factor) * fade;
}

double bend_amplification(const StiffnessModelParams& params, double bend_angle_deg) {
    const double theta = bend_angle_deg * kDegToRad;
    return 1.0 + params.bend_gain_per_rad2 * theta * theta;
}

double layer_base_force_N(const LinkVariant& variant, const sheath::JammingState& state,
                          const StiffnessModelParams& params) {
    const double holding = sheath::jamming_holding_force_N(*variant.pattern, state);
    return params.unjammed_stiffness_N_per_mm * kReferenceDeflectionMm + params.jam_stiffness_scale * holding;
}

} // namespace

double predict_max_force_N(const LinkVariant& variant, double bend_angle_deg, const sheath::JammingState& state,
                           const StiffnessModelParams& params) {
    if (!(bend_angle_deg >= 0.0))
        throw Error(ErrorCode::Validation, "bend angle must be non-negative");
    const auto param_report = validate_params(params);
    if (!param_report.ok())
        throw Error(ErrorCode::Validation, "invalid model params: " + param_report.summary());

    double force = 0.0;
    if (variant.kind == VariantKind::Granular) {
        if (!(params.granular_stiffness_N_per_mm > 0.0))
            throw Error(ErrorCode::MissingModel,
                        "granular variant has no predictive model (set granular_stiffness override)");
        const double theta = bend_angle_deg * kDegToRad;
        force = params.granular_stiffness_N_per_mm * kReferenceDeflectionMm *
                (1.0 + params.granular_bend_gain_per_rad * theta);
    } else {
        validate_variant(variant);
        force = layer_base_force_N(variant, state, params) * bend_amplification(params, bend_angle_deg) *
                weak_end_multiplier(params, variant.kind, bend_angle_deg);
    }
    if (buckled(variant, bend_angle_deg, params)) force *= params.buckling_force_knockdown;
    if (bend_angle_deg >= 180.0 - 1e-9) force += params.preload_force_at_180_N;
    return force;
}

ForceDisplacementTrace synthesize_trace(const LinkVariant& variant, double bend_angle_deg,
                                        const sheath::JammingState& state, const StiffnessModelParams& params) {
    const double f_max = predict_max_force_N(variant, bend_angle_deg, state, params);

    // Stick-slip loading shape: steep rise to the slip knee at 0.5mm, then a
    // shallow post-slip segment ending exactly at (10mm, f_max). Collapses to
    // a single linear segment when the jam contribution is too small.
    constexpr double kKneeMm = 0.5;
    const double post_slope = params.unjammed_stiffness_N_per_mm + params.post_slip_slope_N_per_mm;
    double f_knee = f_max - post_slope * (kReferenceDeflectionMm - kKneeMm);
    const bool two_segment = f_knee > 0.0 && f_knee / kKneeMm >= post_slope;
    auto load_force = [&](double x) {
        if (!two_segment) return f_max * x / kReferenceDeflectionMm;
        if (x <= kKneeMm) return f_knee / kKneeMm * x;
        return f_knee + post_slope * (x - kKneeMm);
    };

    constexpr double kStepMm = 0.1;
    const int steps = static_cast<int>(std::lround(kReferenceDeflectionMm / kStepMm));

    ForceDisplacementTrace trace;
    trace.meta.variant = to_string(variant.kind);
    trace.meta.bend_angle_deg = bend_angle_deg;
    trace.meta.pressure_kPa = state.vacuum_gauge_pressure_kPa;
    trace.meta.trial_id = 1;
    trace.samples.reserve(2 * (steps + 1));

    int tick = 0;
    for (int i = 0; i <= steps; ++i, ++tick) {
        const double x = i * kStepMm;
        const double f = i == steps ? f_max : load_force(x); // peak equals the prediction exactly
        trace.samples.push_back({tick * 0.1, x, f, Phase::Loading});
    }

    // Unloading retraces the loading curve compressed into [x_res, 10mm]; the
    // link keeps a residual deflection of hysteresis_fraction*10mm.
    const double x_res = params.hysteresis_fraction * kReferenceDeflectionMm;
    const double span = kReferenceDeflectionMm - x_res;
    for (int i = steps; i >= 0; --i, ++tick) {
        const double x = i * kStepMm;
        double f = 0.0;
        if (span > 1e-12 && x > x_res) {
            const double mapped = (x - x_res) * kReferenceDeflectionMm / span;
            f = mapped >= kReferenceDeflectionMm ? f_max : load_force(mapped);
        }
        trace.samples.push_back({tick * 0.1, x, f, Phase::Unloading});
    }
    return trace;
}

namespace {

struct GridSpec {
    double lo = 0.0, hi = 0.0;
    int steps = 1;
    double at(int i) const { return steps < 2 ? lo : lo + (hi - lo) * i / static_cast<double>(steps - 1); }
};

// Minimizes objective(a, b) over the grid (parallel when asked), then refines
// with deterministic pattern search. Ties in the grid pass go to the lowest
// flattened index, keeping serial and parallel variants bit-identical.
template <typename F>
std::pair<double, double> fit_two(const F& objective, GridSpec ga, GridSpec gb, bool parallel) {
    const int total = ga.steps * gb.steps;
    std::vector<double> values(static_cast<std::size_t>(total));
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
    for (int idx = 0; idx < total; ++idx) {
        const double a = ga.at(idx / gb.steps);
        const double b = gb.at(idx % gb.steps);
        values[static_cast<std::size_t>(idx)] = objective(a, b);
    }
    (void)parallel;
    int best = 0;
    for (int idx = 1; idx < total; ++idx)
        if (values[static_cast<std::size_t>(idx)] < values[static_cast<std::size_t>(best)]) best = idx;

    double a = ga.at(best / gb.steps);
    double b = gb.at(best % gb.steps);
    double fa = values[static_cast<std::size_t>(best)];
    double step_a = ga.steps < 2 ? std::max(1e-3, std::abs(ga.lo)) : (ga.hi - ga.lo) / (ga.steps - 1);
    double step_b = gb.steps < 2 ? std::max(1e-3, std::abs(gb.lo)) : (gb.hi - gb.lo) / (gb.steps - 1);
    for (int round = 0; round < 200 && (step_a > 1e-12 || step_b > 1e-12); ++round) {
        bool improved = false;
        for (const double ca : {a - step_a, a + step_a}) {
            const double v = objective(ca, b);
            if (v < fa) { fa = v; a = ca; improved = true; }
        }
        for (const double cb : {std::max(0.0, b - step_b), b + step_b}) {
            const double v = objective(a, cb);
            if (v < fa) { fa = v; b = cb; improved = true; }
        }
        if (!improved) {
            step_a *= 0.5;
            step_b *= 0.5;
        }
    }
    return {a, b};
}

CalibrationResult calibrate_impl(const std::vector<CalibrationTarget>& targets, const sheath::JammingState& state,
                                 const StiffnessModelParams& initial, bool parallel) {
    if (targets.empty())
        throw Error(ErrorCode::Infeasible, "calibration target set is empty");
    for (const auto& t : targets) {
        if (!(t.measured_max_force_N > 0.0))
            throw Error(ErrorCode::Validation, "calibration targets require positive measured forces");
        if (!(t.bend_angle_deg >= 0.0))
            throw Error(ErrorCode::Validation, "calibration targets require non-negative bend angles");
    }

    StiffnessModelParams params = initial;

    std::vector<const CalibrationTarget*> granular, joint, buckled_layer, weak_spine;
    const sheath::FlapPattern* pattern = nullptr;
    for (const auto& t : targets) {
        if (t.variant.kind == VariantKind::Granular) {
            granular.push_back(&t);
            continue;
        }
        if (!t.variant.pattern)
            throw Error(ErrorCode::Validation, "layer-family calibration targets require a flap pattern");
        if (!pattern) pattern = &*t.variant.pattern;
        if (t.variant.kind == VariantKind::Layer && buckled(t.variant, t.bend_angle_deg, initial))
            buckled_layer.push_back(&t);
        else if (t.variant.kind == VariantKind::LayerWithSpine && t.bend_angle_deg < kWeakEndFadeDeg)
            weak_spine.push_back(&t);
        else
            joint.push_back(&t);
    }

    const bool has_layer_family = pattern != nullptr;
    if (has_layer_family) {
        // Stage 1: shared base force and bend gain on targets free of
        // buckling and weak-end effects.
        double t_lo = 1e300, t_hi = 0.0;
        for (const auto* t : joint) {
            t_lo = std::min(t_lo, t->measured_max_force_N);
            t_hi = std::max(t_hi, t->measured_max_force_N);
        }
        double base = 0.0, gain = 0.0;
        if (!joint.empty()) {
            auto objective = [&](double b, double g) {
                if (b <= 0.0 || g < 0.0) return 1e300;
                double sum = 0.0;
                for (const auto* t : joint) {
                    const double theta = t->bend_angle_deg * kDegToRad;
                    const double rel = (b * (1.0 + g * theta * theta) - t->measured_max_force_N) /
                                       t->measured_max_force_N;
                    sum += rel * rel;
                }
                return sum;
            };
            std::tie(base, gain) = fit_two(objective, {0.25 * t_lo, 1.25 * t_hi, 97}, {0.0, 2.0, 129}, parallel);
        } else {
            // All layer-family targets are knocked down or end-weakened; fall
            // back to their mean as the base and no bend gain.
            double sum = 0.0;
            int count = 0;
            for (const auto* lists : {&buckled_layer, &weak_spine})
                for (const auto* t : *lists) { sum += t->measured_max_force_N; ++count; }
            base = sum / count;
        }
        params.bend_gain_per_rad2 = gain;

        const double holding = sheath::jamming_holding_force_N(*pattern, state);
        if (holding > 0.0) {
            params.jam_stiffness_scale =
                std::max(0.0, (base - params.unjammed_stiffness_N_per_mm * kReferenceDeflectionMm) / holding);
        } else {
            params.unjammed_stiffness_N_per_mm = base / kReferenceDeflectionMm;
            params.jam_stiffness_scale = 0.0;
        }

        if (!buckled_layer.empty()) {
            double sum = 0.0;
            for (const auto* t : buckled_layer)
                sum += t->measured_max_force_N / (base * bend_amplification(params, t->bend_angle_deg));
            params.buckling_force_knockdown = std::clamp(sum / buckled_layer.size(), 0.0, 1.0);
        }
        if (!weak_spine.empty()) {
            double sum = 0.0;
            for (const auto* t : weak_spine) {
                const double required =
                    t->measured_max_force_N / (base * bend_amplification(params, t->bend_angle_deg));
                const double fade = 1.0 - t->bend_angle_deg / kWeakEndFadeDeg;
                sum += 1.0 - (1.0 - required) / fade;
            }
            params.weak_end_factor = std::clamp(sum / weak_spine.size(), 1e-6, 1.0);
        }
    }

    if (!granular.empty()) {
        double t_lo = 1e300, t_hi = 0.0;
        for (const auto* t : granular) {
            t_lo = std::min(t_lo, t->measured_max_force_N);
            t_hi = std::max(t_hi, t->measured_max_force_N);
        }
        auto objective = [&](double b, double g) {
            if (b <= 0.0 || g < 0.0) return 1e300;
            double sum = 0.0;
            for (const auto* t : granular) {
                const double theta = t->bend_angle_deg * kDegToRad;
                const double rel =
                    (b * (1.0 + g * theta) - t->measured_max_force_N) / t->measured_max_force_N;
                sum += rel * rel;
            }
            return sum;
        };
        auto [base, gain] = fit_two(objective, {0.25 * t_lo, 1.25 * t_hi, 97}, {0.0, 4.0, 129}, parallel);
        params.granular_stiffness_N_per_mm = base / kReferenceDeflectionMm;
        params.granular_bend_gain_per_rad = gain;
    }

    CalibrationResult result;
    result.params = params;
    result.relative_residuals.reserve(targets.size());
    for (const auto& t : targets) {
        const double predicted = predict_max_force_N(t.variant, t.bend_angle_deg, state, params);
        const double rel = (predicted - t.measured_max_force_N) / t.measured_max_force_N;
        result.relative_residuals.push_back(rel);
        result.max_abs_relative_residual = std::max(result.max_abs_relative_residual, std::abs(rel));
    }
    return result;
}

} // namespace

CalibrationResult calibrate(const std::vector<CalibrationTarget>& targets, const sheath::JammingState& state,
                            const StiffnessModelParams& initial) {
    return calibrate_impl(targets, state, initial, true);
}

CalibrationResult calibrate_serial(const std::vector<CalibrationTarget>& targets, const sheath::JammingState& state,
                                   const StiffnessModelParams& initial) {
    return calibrate_impl(targets, state, initial, false);
}

} // namespace jamlink::stiffness
