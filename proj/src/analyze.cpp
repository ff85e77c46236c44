#include "jamlink/analyze.hpp"

#include "jamlink/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace jamlink::analyze {

namespace {

// Mean/std over values sorted first, so aggregation is bit-identical under
// any permutation of the producing trials.
std::pair<double, double> sorted_mean_std(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

std::vector<TraceSample> phase_samples(const ForceDisplacementTrace& trace, Phase phase) {
    std::vector<TraceSample> out;
    for (const auto& s : trace.samples)
        if (s.phase == phase) out.push_back(s);
    return out;
}

// Linear interpolation over samples ordered by displacement; clamps outside.
double interpolate_force(std::vector<TraceSample> samples, double x) {
    std::stable_sort(samples.begin(), samples.end(),
                     [](const TraceSample& a, const TraceSample& b) { return a.displacement_mm < b.displacement_mm; });
    if (x <= samples.front().displacement_mm) return samples.front().force_N;
    if (x >= samples.back().displacement_mm) return samples.back().force_N;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (samples[i].displacement_mm >= x) {
            const auto& a = samples[i - 1];
            const auto& b = samples[i];
            const double span = b.displacement_mm - a.displacement_mm;
            if (span <= 0.0) return a.force_N;
            const double t = (x - a.displacement_mm) / span;
            return a.force_N + t * (b.force_N - a.force_N);
        }
    }
    return samples.back().force_N;
}

} // namespace

MaxForceStats max_resisting_force(const TrialSet& set) {
    if (set.trials.empty())
        throw Error(ErrorCode::Validation, "trial set is empty");
    std::vector<double> peaks;
    peaks.reserve(set.trials.size());
    for (const auto& trial : set.trials) peaks.push_back(trial.max_loading_force_N());
    const auto [mean, std] = sorted_mean_std(std::move(peaks));
    return {mean, std, static_cast<int>(set.trials.size())};
}

BandSeries band_series(const TrialSet& set, double step_mm) {
    if (set.trials.empty())
        throw Error(ErrorCode::Validation, "trial set is empty");
    if (!(step_mm > 0.0))
        throw Error(ErrorCode::Validation, "grid step must be positive");

    double span = 0.0;
    for (const auto& trial : set.trials) span = std::max(span, trial.max_displacement_mm());
    if (step_mm > span)
        throw Error(ErrorCode::Validation, "grid step exceeds the displacement span of the trials");

    const int points = static_cast<int>(std::floor(span / step_mm + 1e-9)) + 1;
    BandSeries series;
    for (Phase phase : {Phase::Loading, Phase::Unloading}) {
        std::vector<std::vector<TraceSample>> per_trial;
        for (const auto& trial : set.trials) {
            auto samples = phase_samples(trial, phase);
            if (!samples.empty()) per_trial.push_back(std::move(samples));
        }
        if (per_trial.empty()) continue;
        auto& out = phase == Phase::Loading ? series.loading : series.unloading;
        for (int i = 0; i < points; ++i) {
            const double x = static_cast<double>(i) * step_mm;
            std::vector<double> forces;
            forces.reserve(per_trial.size());
            for (const auto& samples : per_trial) forces.push_back(interpolate_force(samples, x));
            const auto [mean, std] = sorted_mean_std(std::move(forces));
            out.push_back({x, mean, std});
        }
    }
    return series;
}

double hysteresis_residual_mm(const ForceDisplacementTrace& trace, double zero_threshold_N) {
    if (!trace.has_unloading())
        throw Error(ErrorCode::Validation, "trace has no unloading phase");
    // Walk the return stroke from peak back toward the origin.
    auto unloading = phase_samples(trace, Phase::Unloading);
    std::stable_sort(unloading.begin(), unloading.end(),
                     [](const TraceSample& a, const TraceSample& b) { return a.displacement_mm > b.displacement_mm; });
    for (const auto& s : unloading)
        if (s.force_N <= zero_threshold_N) return s.displacement_mm;
    return 0.0;
}

ForceDisplacementTrace align_contact_onset(const ForceDisplacementTrace& trace, double threshold_N) {
    std::size_t onset = trace.samples.size();
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        if (trace.samples[i].phase == Phase::Loading && trace.samples[i].force_N > threshold_N) {
            onset = i;
            break;
        }
    }
    if (onset == trace.samples.size() || onset == 0) return trace;

    // Contact sits at the last below-threshold sample before force rises.
    const double shift = trace.samples[onset - 1].displacement_mm;
    ForceDisplacementTrace aligned;
    aligned.meta = trace.meta;
    for (std::size_t i = onset - 1; i < trace.samples.size(); ++i) {
        TraceSample s = trace.samples[i];
        s.displacement_mm -= shift;
        if (s.phase == Phase::Unloading && s.displacement_mm < 0.0) continue;
        aligned.samples.push_back(s);
    }
    return aligned;
}

std::vector<std::pair<double, double>> diameter_ratio(const DiameterSeries& series) {
    for (std::size_t i = 0; i < series.points.size(); ++i) {
        const auto& [angle, diameter] = series.points[i];
        if (!(angle >= 0.0 && angle <= 180.0))
            throw Error(ErrorCode::Validation, "diameter series angles must lie in [0, 180] degrees");
        if (!(diameter > 0.0))
            throw Error(ErrorCode::Validation, "diameters must be positive");
        if (i > 0 && !(angle > series.points[i - 1].first))
            throw Error(ErrorCode::Validation, "diameter series angles must be strictly increasing");
    }
    const double* baseline = nullptr;
    for (const auto& [angle, diameter] : series.points) {
        if (std::abs(angle) < 1e-9) {
            baseline = &diameter;
            break;
        }
    }
    if (!baseline)
        throw Error(ErrorCode::Validation, "diameter series has no 0-degree baseline entry");
    if (!(*baseline > 0.0))
        throw Error(ErrorCode::Validation, "baseline diameter must be positive");

    std::vector<std::pair<double, double>> ratios;
    ratios.reserve(series.points.size());
    for (const auto& [angle, diameter] : series.points) ratios.emplace_back(angle, diameter / *baseline);
    return ratios;
}

std::pair<double, double> summarize_min_ratio(const DiameterSeries& series) {
    const auto ratios = diameter_ratio(series);
    std::pair<double, double> best = ratios.front();
    for (const auto& r : ratios)
        if (r.second < best.second) best = r; // strict: ties keep the smaller angle
    return best;
}

} // namespace jamlink::analyze
