#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gslms/filter.hpp"
#include "gslms/signal.hpp"
#include "gslms/vp_engine.hpp"

namespace gslms::oracle {

struct Box {
    double mu_lo = 0.0;
    double mu_hi = 1.0;
    double rho_lo = 0.0;
    double rho_hi = 1.0;
};

struct GridMinimum {
    double mu = 0.0;
    double rho = 0.0;
    double value = 0.0;  ///< xi_{n+1} - xi_n at the grid argmin
    double mu_cell = 0.0;
    double rho_cell = 0.0;
};

/// Exhaustive search of the MSD quadratic over a resolution x resolution grid
/// spanning `box` (edges included). Requires resolution >= 2.
GridMinimum grid_minimize_quadratic(const MomentEstimates& m, const Box& box, std::size_t resolution);

/// Central-difference gradient of the l1,2 norm. Throws DomainError unless
/// every group norm exceeds 10 * step.
Vector finite_diff_subgradient(const VectorView& w, const GroupPartition& p, double step = 1e-6);

/// Ensemble setup for moment estimation: `filter` runs with its fixed (mu, rho)
/// on a known constant `plant`.
struct EnsembleSetup {
    Vector plant;
    InputProcess input = InputProcess::white(1.0);
    double sigma_z2 = 0.01;
    FilterConfig filter{GroupPartition::singletons(1), std::nullopt};
    std::optional<Vector> w0;  ///< defaults to zeros
    std::uint64_t seed = 1;
    std::size_t workers = 0;
};

struct EnsembleMoments {
    MomentEstimates mean;
    MomentEstimates stderr_;
    double zeta = 0.0;  ///< sigma_u^2 * mean ||w~||^2
    double zeta_stderr = 0.0;
    double msd = 0.0;   ///< mean ||w~||^2
    std::size_t ensemble = 0;
};

/// Sample means of the recursion moments at iteration n (0-based, i.e. before
/// the (n+1)-th update), using the true weight error w_n - w*.
/// Requires ensemble >= 2.
EnsembleMoments ensemble_moments(const EnsembleSetup& setup, std::size_t n, std::size_t ensemble);

struct RecursionPoint {
    std::size_t n = 0;
    double msd = 0.0;              ///< ensemble mean ||w~_n||^2
    double increment = 0.0;        ///< ensemble msd_{n+1} - msd_n
    double model_increment = 0.0;  ///< recursion evaluated with ensemble moments
    double relative_deviation = 0.0;
    MomentEstimates moments;
};

struct RecursionReport {
    std::vector<RecursionPoint> points;
    double max_relative_deviation = 0.0;
    std::size_t ensemble = 0;
    std::size_t horizon = 0;
};

/// Compares the ensemble MSD increment with the one-step recursion evaluated
/// with ensemble moments for n = 0 .. horizon-1. White input only.
RecursionReport validate_model_recursion(const EnsembleSetup& setup, std::size_t horizon, std::size_t ensemble);

} // namespace gslms::oracle

namespace gslms::oracle {

/// Random positive-definite moment tuple whose unconstrained optimum is
/// (mu_star, rho_star), both in [0.05, 1].
struct RandomTuple {
    MomentEstimates m;
    double mu_star = 0.0;
    double rho_star = 0.0;
};
RandomTuple random_pd_tuple(std::uint64_t seed);

struct ValidationOptions {
    std::size_t ensemble = 5000;
    std::size_t horizon = 50;
    double mu = 0.005;
    double rho_grza = 1e-4;
    double tolerance = 0.05;
    std::size_t tuples = 1000;
    std::size_t grid = 401;
    std::size_t fd_points = 100;
    std::size_t anchor_ensemble = 20000;
    std::uint64_t seed = 7;
    std::size_t workers = 0;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;      ///< measured statistic
    double threshold = 0.0;  ///< bound it is compared against
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    RecursionReport lms_recursion;
    RecursionReport grza_recursion;
    bool all_passed() const;
};

/// Recursion fidelity (plain LMS and GRZA), closed form vs grid search,
/// analytic vs finite-difference subgradient, and the zero-EMSE anchor of g.
ValidationReport run_validation(const ValidationOptions& options);

} // namespace gslms::oracle
