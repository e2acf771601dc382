#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>

#include "gslms/filter.hpp"
#include "gslms/partition.hpp"

namespace gslms {

/// Statistics of the one-step MSD recursion
///   xi_{n+1} = xi_n + mu^2 g + rho^2 h + 2 mu rho ell - 2 mu r1 - 2 rho r2.
struct MomentEstimates {
    double g = 0.0;
    double h = 0.0;
    double ell = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
};

/// Right-hand side of the MSD recursion for given (mu, rho).
double msd_quadratic(const MomentEstimates& m, double xi, double mu, double rho);

/// Hyperparameters of the variable-parameter engine.
struct VpConfig {
    std::size_t length = 1;
    double sigma_z2 = 0.01;  ///< measurement noise variance, assumed known
    double sigma_u2 = 1.0;   ///< input power
    double gamma = 0.5;      ///< error smoothing
    double gamma_prime = 0.95;  ///< parameter smoothing
    double mu_max = std::numeric_limits<double>::infinity();
    double det_tol = 1e-10;

    /// 2 / (3 sigma_u^2 L).
    static double default_mu_max(double sigma_u2, std::size_t length);

    /// Throws ParameterError on out-of-range values.
    void validate() const;
};

/// Memory carried between iterations.
struct VpState {
    VpConfig config;
    double e_smooth = 0.0;  ///< smoothed a-priori error
    double xi_model = 0.0;  ///< model-propagated MSD; starts at 0
    double zeta_min = 0.0;  ///< EMSE lower bound, sigma_u^2 * xi_model
    double mu_prev = 0.0;
    double rho_prev = 0.0;

    /// Validates `config` and returns the zero-initialised state.
    static VpState initial(const VpConfig& config);
};

struct EmseEstimate {
    VpState state;
    double zeta_hat = 0.0;
};

/// Smooths the error and returns max(e_smooth^2 - sigma_z^2, zeta_min).
EmseEstimate estimate_emse(VpState vp, double e_n);

/// sigma_z^2 sigma_u^2 L + (2 + L) sigma_u^2 zeta_hat.
double compute_g(const VpConfig& config, double zeta_hat);

/// r1 equals the EMSE estimate itself.
inline double compute_r1(double zeta_hat) { return zeta_hat; }

struct PlantEstimate {
    Vector w_star_hat;
    Vector w_tilde_hat;
};

/// One gradient step from w_n towards the plant: w*_hat = w_n - p with
/// p = -(r1/g) e_n u_n. Throws ModelError when g <= 0.
PlantEstimate one_step_plant_estimate(const VectorView& w_n, double e_n, const VectorView& u_n, double r1,
                                      double g);

struct InstantaneousMoments {
    double h = 0.0;
    double ell = 0.0;
    double r2 = 0.0;
};

/// Instantaneous h, ell and r2 from the estimated weight error and beta o s.
InstantaneousMoments compute_instantaneous_moments(const VectorView& w_tilde_hat, const VectorView& u_n,
                                                   const VectorView& beta_s);

struct OptimalParams {
    double mu = 0.0;
    double rho = 0.0;
    bool closed_form = false;  ///< false when the LMS-only fallback was used
    double mu_unclamped = 0.0;
    double rho_unclamped = 0.0;
};

/// Minimiser of the MSD quadratic. Uses H^{-1}[r1 r2]^T when
/// gh - ell^2 > det_tol * g * max(h, tiny), otherwise (r1/g, 0). Both results are
/// clamped at zero. Throws ModelError on non-finite moments or g <= 0.
OptimalParams solve_optimal_params(const MomentEstimates& m, double det_tol);

/// Advances the model MSD with the parameters actually applied and refreshes zeta_min.
VpState propagate_model_msd(VpState vp, const MomentEstimates& m, double mu_n, double rho_n);

struct SmoothedParams {
    VpState state;
    double mu = 0.0;
    double rho = 0.0;
};

/// Exponential smoothing of (mu*, rho*) with mu capped at mu_max.
SmoothedParams smooth_and_clamp(VpState vp, double mu_star, double rho_star);

struct VpStepResult {
    VpState state;
    double mu = 0.0;
    double rho = 0.0;
    double zeta_hat = 0.0;
    MomentEstimates moments;
    OptimalParams optimum;
};

/// Full per-iteration chain: EMSE estimate, g and r1, one-step plant estimate,
/// instantaneous moments, closed-form optimum, smoothing, model propagation.
/// Returns the (mu_n, rho_n) the filter must apply at this iteration.
VpStepResult vp_iteration(const VpState& vp, const FilterState& filter, const FilterConfig& cfg,
                          const VectorView& u_n, double e_n);

/// ParameterSource adapter so run_sequence can drive a variable-parameter filter.
class VariableParameters final : public ParameterSource {
public:
    VariableParameters(const VpConfig& config, const FilterConfig& filter);

    StepParameters next(const FilterState& state, const VectorView& u, double error) override;

    const VpState& state() const noexcept { return state_; }
    const VpStepResult& last() const noexcept { return last_; }
    std::int64_t fallback_count() const noexcept { return fallbacks_; }
    std::int64_t iterations() const noexcept { return iterations_; }

private:
    const FilterConfig& filter_;
    VpState state_;
    VpStepResult last_;
    std::int64_t fallbacks_ = 0;
    std::int64_t iterations_ = 0;
};

/// Running exponential estimate of ||u_n||^2 / L for streaming use.
class InputPowerEstimator {
public:
    explicit InputPowerEstimator(double forgetting = 0.999, double initial = 0.0);
    double update(const VectorView& u);
    double value() const noexcept { return value_; }

private:
    double forgetting_;
    double value_;
};

/// Optional noise-variance pre-estimate: runs plain LMS with a small step
/// `warmup_mu` over `samples` and returns the sample variance of the a-priori
/// error over the second half of the stream.
double estimate_noise_variance(std::span<const Sample> samples, double warmup_mu);

} // namespace gslms
