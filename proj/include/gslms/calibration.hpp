#pragma once

#include <string>
#include <vector>

#include "gslms/config.hpp"

namespace gslms {

/// Calibrated fixed-parameter algorithm and the variable-parameter curve it was matched to.
struct CalibrationEntry {
    std::string name;
    std::string reference;
    double mu = 0.0;
    double rho = 0.0;
    double lambda = 0.0;       ///< rho / mu
    double target_db = 0.0;    ///< reference mean MSD over the matching window
    double achieved_db = 0.0;
    double steady_db = 0.0;    ///< first-stage steady-state MSD at the chosen (mu, rho)
};

struct CalibrationOptions {
    std::size_t runs = 20;
    std::int64_t window_first = 451;  ///< matching window, 1-based inclusive
    std::int64_t window_last = 500;
    double mu_lo = 1e-4;
    double mu_hi = 0.025;
    int bisection_steps = 30;
    double match_tolerance_db = 0.25;
    std::vector<double> lambda_grid{0.0, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2};
    std::size_t workers = 0;
};

/// Chooses mu for every fixed-parameter algorithm in `cfg` so that its mean MSD
/// (dB) over the matching window equals that of its variable-parameter
/// counterpart (same attractor type; plain LMS is matched to the GRZA one).
/// For attractor algorithms every lambda = rho / mu in `lambda_grid` is tried,
/// mu is matched for each, and the pair with the lowest first-stage
/// steady-state MSD is kept. Plain LMS keeps rho = 0.
std::vector<CalibrationEntry> calibrate_fixed_parameters(const ExperimentConfig& cfg,
                                                         const CalibrationOptions& options = {});

/// Copy of `cfg` with calibrated values applied.
ExperimentConfig apply_calibration(ExperimentConfig cfg, const std::vector<CalibrationEntry>& entries);

} // namespace gslms
