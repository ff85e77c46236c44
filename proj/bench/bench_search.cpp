// Compares the OpenMP-parallel search/calibration kernels against their
// serial reference implementations: identical results required, wall time
// reported. Build target only; not part of the test suite.
//
//   bench_search [grid-steps-per-dim]

#include "jamlink/optimize.hpp"
#include "jamlink/stiffness.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace jamlink;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

} // namespace

int main(int argc, char** argv) {
    int steps = 12;
    if (argc > 1) steps = std::max(2, std::atoi(argv[1]));

#ifdef _OPENMP
    std::cout << "openmp threads: " << omp_get_max_threads() << "\n";
#else
    std::cout << "openmp: disabled at build time (both paths run serially)\n";
#endif

    optimize::SearchBox box;
    box.base.spine = spine::SpineDesign{};
    box.ranges["W"] = {6.0, 14.0, steps};
    box.ranges["L"] = {20.0, 40.0, steps};
    box.ranges["D"] = {2.0, 6.0, steps};
    box.ranges["phi"] = {30.0, 45.0, steps};
    box.ranges["B"] = {7.5, 10.5, steps};

    optimize::DesignTargets targets;
    targets.min_bend_angle_deg = 180.0;
    targets.min_central_gap_mm = 7.5;
    targets.min_holding_force_N = 20.0;
    targets.sheath_diameter_lo_mm = 30.0;
    targets.sheath_diameter_hi_mm = 45.0;

    const std::size_t budget = 200000000;
    std::cout << "search grid: " << steps << "^5 = " << static_cast<long long>(steps) * steps * steps * steps * steps
              << " candidates\n";

    auto start = Clock::now();
    const auto serial = optimize::search_designs_serial(targets, box, budget);
    const double serial_s = seconds_since(start);
    std::cout << "search serial   : " << serial_s << " s (" << serial.grid_feasible.size() << " feasible)\n";

    start = Clock::now();
    const auto parallel = optimize::search_designs(targets, box, budget);
    const double parallel_s = seconds_since(start);
    std::cout << "search parallel : " << parallel_s << " s (" << parallel.grid_feasible.size() << " feasible)\n";

    bool identical = serial.grid_feasible.size() == parallel.grid_feasible.size() &&
                     serial.designs.size() == parallel.designs.size();
    for (std::size_t i = 0; identical && i < serial.designs.size(); ++i) {
        identical = serial.designs[i].objective == parallel.designs[i].objective &&
                    optimize::canonical_parameter_tuple(serial.designs[i].link) ==
                        optimize::canonical_parameter_tuple(parallel.designs[i].link);
    }
    std::cout << "search results  : " << (identical ? "identical" : "MISMATCH") << ", speedup "
              << (parallel_s > 0.0 ? serial_s / parallel_s : 0.0) << "x\n";

    // Calibration grid kernel on the shipped maxima.
    const sheath::FlapPattern pattern;
    const spine::SpineDesign spine_design;
    const auto layer = stiffness::layer_variant(pattern);
    const auto with_spine = stiffness::layer_with_spine_variant(pattern, spine_design);
    const auto granular = stiffness::granular_variant();
    const std::vector<stiffness::CalibrationTarget> maxima = {
        {layer, 0.0, 11.41},      {layer, 90.0, 15.92},      {layer, 180.0, 10.33},
        {with_spine, 0.0, 5.12},  {with_spine, 90.0, 16.02}, {with_spine, 180.0, 31.33},
        {granular, 0.0, 2.76},    {granular, 90.0, 7.14},    {granular, 180.0, 11.55},
    };
    const sheath::JammingState state;
    const int repeats = 200;

    start = Clock::now();
    stiffness::CalibrationResult cal_serial;
    for (int i = 0; i < repeats; ++i) cal_serial = stiffness::calibrate_serial(maxima, state);
    const double cal_serial_s = seconds_since(start);
    std::cout << "calibrate serial   (" << repeats << "x): " << cal_serial_s << " s\n";

    start = Clock::now();
    stiffness::CalibrationResult cal_parallel;
    for (int i = 0; i < repeats; ++i) cal_parallel = stiffness::calibrate(maxima, state);
    const double cal_parallel_s = seconds_since(start);
    std::cout << "calibrate parallel (" << repeats << "x): " << cal_parallel_s << " s\n";

    const bool cal_identical =
        cal_serial.params.jam_stiffness_scale == cal_parallel.params.jam_stiffness_scale &&
        cal_serial.params.bend_gain_per_rad2 == cal_parallel.params.bend_gain_per_rad2 &&
        cal_serial.params.granular_stiffness_N_per_mm == cal_parallel.params.granular_stiffness_N_per_mm &&
        cal_serial.max_abs_relative_residual == cal_parallel.max_abs_relative_residual;
    std::cout << "calibrate results  : " << (cal_identical ? "identical" : "MISMATCH") << ", speedup "
              << (cal_parallel_s > 0.0 ? cal_serial_s / cal_parallel_s : 0.0) << "x\n";

    return identical && cal_identical ? 0 : 1;
}
