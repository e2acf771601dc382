#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gslms/config.hpp"
#include "gslms/signal.hpp"

namespace gslms {

/// Run-averaged learning curve of one algorithm. Index i holds iteration i+1.
struct LearningCurve {
    std::string name;
    bool variable = false;
    std::vector<double> msd;     ///< mean ||w_n - w*_n||^2 before the n-th update
    std::vector<double> mu;      ///< mean applied mu_n (variable-parameter runs only)
    std::vector<double> lambda;  ///< mean rho_n / mu_n (0 when mu_n = 0)
    std::vector<double> rho;     ///< mean applied rho_n; kept in memory, not written out
    std::size_t runs_used = 0;
    std::size_t diverged = 0;
    std::int64_t fallback_steps = 0;  ///< VP iterations that used the LMS-only fallback
    std::int64_t vp_steps = 0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<LearningCurve> curves;
    double measured_input_power = 0.0;  ///< mean x_n^2 over all runs and samples
};

/// Builds the plant schedule configured for `cfg`.
PlantSchedule make_schedule(const ExperimentConfig& cfg);

/// Monte-Carlo ensemble: every algorithm sees the identical (u_n, d_n) stream
/// of each run. Runs whose weights diverge are excluded per algorithm.
/// Output is independent of `workers`.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t workers = 0);

/// Curves of the single Monte-Carlo run `run` (same seeds as inside
/// run_experiment). Diverged algorithms come back with runs_used = 0.
std::vector<LearningCurve> run_single(const ExperimentConfig& cfg, std::size_t run);

double to_db(double linear);

/// Mean MSD over the last `window` iterations of plant segment `segment`.
double steady_state_msd(const LearningCurve& curve, const PlantSchedule& schedule, std::size_t segment,
                        std::int64_t window = 1000);

/// Mean of trace[first..last] with 1-based inclusive iteration bounds.
double window_mean(const std::vector<double>& trace, std::int64_t first, std::int64_t last);
double window_max(const std::vector<double>& trace, std::int64_t first, std::int64_t last);

const LearningCurve& find_curve(const ExperimentResult& result, const std::string& name);

} // namespace gslms
