#include "gslms/vp_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gslms/errors.hpp"

namespace gslms {

double msd_quadratic(const MomentEstimates& m, double xi, double mu, double rho) {
    return xi + mu * mu * m.g + rho * rho * m.h + 2.0 * mu * rho * m.ell - 2.0 * mu * m.r1 - 2.0 * rho * m.r2;
}

double VpConfig::default_mu_max(double sigma_u2, std::size_t length) {
    return 2.0 / (3.0 * sigma_u2 * static_cast<double>(length));
}

void VpConfig::validate() const {
    if (length == 0) {
        throw ParameterError("vp: filter length must be at least 1");
    }
    if (!(sigma_z2 > 0.0) || !std::isfinite(sigma_z2)) {
        throw ParameterError("vp: noise variance must be finite and > 0");
    }
    if (!(sigma_u2 > 0.0) || !std::isfinite(sigma_u2)) {
        throw ParameterError("vp: input power must be finite and > 0");
    }
    if (!(gamma >= 0.0 && gamma < 1.0)) {
        throw ParameterError("vp: gamma must lie in [0, 1)");
    }
    if (!(gamma_prime >= 0.0 && gamma_prime < 1.0)) {
        throw ParameterError("vp: gamma_prime must lie in [0, 1)");
    }
    if (!(mu_max > 0.0)) {
        throw ParameterError("vp: mu_max must be > 0");
    }
    if (!(det_tol > 0.0) || !std::isfinite(det_tol)) {
        throw ParameterError("vp: det_tol must be finite and > 0");
    }
}

VpState VpState::initial(const VpConfig& config) {
    config.validate();
    VpState vp;
    vp.config = config;
    return vp;
}

EmseEstimate estimate_emse(VpState vp, double e_n) {
    vp.e_smooth = (1.0 - vp.config.gamma) * e_n + vp.config.gamma * vp.e_smooth;
    const double zeta = std::max(vp.e_smooth * vp.e_smooth - vp.config.sigma_z2, vp.zeta_min);
    return {vp, zeta};
}

double compute_g(const VpConfig& config, double zeta_hat) {
    const double L = static_cast<double>(config.length);
    return config.sigma_z2 * config.sigma_u2 * L + (2.0 + L) * config.sigma_u2 * zeta_hat;
}

PlantEstimate one_step_plant_estimate(const VectorView& w_n, double e_n, const VectorView& u_n, double r1,
                                      double g) {
    if (!(g > 0.0)) {
        throw ModelError("one-step plant estimate: g must be > 0, got " + std::to_string(g));
    }
    if (w_n.size() != u_n.size()) {
        throw DimensionError("one-step plant estimate: w and u lengths differ");
    }
    PlantEstimate out;
    out.w_tilde_hat = (-(r1 / g) * e_n) * u_n;
    out.w_star_hat = w_n - out.w_tilde_hat;
    return out;
}

InstantaneousMoments compute_instantaneous_moments(const VectorView& w_tilde_hat, const VectorView& u_n,
                                                   const VectorView& beta_s) {
    if (w_tilde_hat.size() != u_n.size() || beta_s.size() != u_n.size()) {
        throw DimensionError("instantaneous moments: vector lengths differ");
    }
    InstantaneousMoments m;
    m.h = beta_s.squaredNorm();
    m.ell = w_tilde_hat.dot(u_n) * u_n.dot(beta_s);
    m.r2 = beta_s.dot(w_tilde_hat);
    return m;
}

OptimalParams solve_optimal_params(const MomentEstimates& m, double det_tol) {
    if (!std::isfinite(m.g) || !std::isfinite(m.h) || !std::isfinite(m.ell) || !std::isfinite(m.r1) ||
        !std::isfinite(m.r2)) {
        throw ModelError("optimal parameters: non-finite moment estimate");
    }
    if (!(m.g > 0.0)) {
        throw ModelError("optimal parameters: g must be > 0");
    }
    OptimalParams out;
    const double det = m.g * m.h - m.ell * m.ell;
    if (det > det_tol * m.g * std::max(m.h, std::numeric_limits<double>::min())) {
        out.mu_unclamped = (m.h * m.r1 - m.ell * m.r2) / det;
        out.rho_unclamped = (m.g * m.r2 - m.ell * m.r1) / det;
        out.closed_form = true;
    } else {
        out.mu_unclamped = m.r1 / m.g;
        out.rho_unclamped = 0.0;
    }
    out.mu = std::max(out.mu_unclamped, 0.0);
    out.rho = std::max(out.rho_unclamped, 0.0);
    return out;
}

VpState propagate_model_msd(VpState vp, const MomentEstimates& m, double mu_n, double rho_n) {
    vp.xi_model = std::max(msd_quadratic(m, vp.xi_model, mu_n, rho_n), 0.0);
    vp.zeta_min = vp.config.sigma_u2 * vp.xi_model;
    return vp;
}

SmoothedParams smooth_and_clamp(VpState vp, double mu_star, double rho_star) {
    const double gp = vp.config.gamma_prime;
    SmoothedParams out;
    out.mu = std::min(gp * vp.mu_prev + (1.0 - gp) * mu_star, vp.config.mu_max);
    out.rho = gp * vp.rho_prev + (1.0 - gp) * rho_star;
    vp.mu_prev = out.mu;
    vp.rho_prev = out.rho;
    out.state = vp;
    return out;
}

VpStepResult vp_iteration(const VpState& vp, const FilterState& filter, const FilterConfig& cfg,
                          const VectorView& u_n, double e_n) {
    if (static_cast<std::size_t>(u_n.size()) != vp.config.length ||
        static_cast<std::size_t>(filter.w.size()) != vp.config.length || cfg.length() != vp.config.length) {
        throw DimensionError("vp iteration: inconsistent filter length");
    }

    VpStepResult out;
    const EmseEstimate emse = estimate_emse(vp, e_n);
    out.zeta_hat = emse.zeta_hat;
    if (!(out.zeta_hat >= emse.state.zeta_min) || !(emse.state.zeta_min >= 0.0)) {
        throw ModelError("vp iteration: EMSE estimate below its lower bound");
    }

    MomentEstimates& m = out.moments;
    m.g = compute_g(vp.config, out.zeta_hat);
    m.r1 = compute_r1(out.zeta_hat);

    const PlantEstimate plant = one_step_plant_estimate(filter.w, e_n, u_n, m.r1, m.g);
    const Vector beta_s = cfg.attractor ? weighted_attractor(filter.w, cfg.partition, *cfg.attractor)
                                        : Vector(Vector::Zero(filter.w.size()));
    const InstantaneousMoments inst = compute_instantaneous_moments(plant.w_tilde_hat, u_n, beta_s);
    m.h = inst.h;
    m.ell = inst.ell;
    m.r2 = inst.r2;

    out.optimum = solve_optimal_params(m, vp.config.det_tol);
    const SmoothedParams smoothed = smooth_and_clamp(emse.state, out.optimum.mu, out.optimum.rho);
    out.mu = smoothed.mu;
    out.rho = smoothed.rho;
    out.state = propagate_model_msd(smoothed.state, m, out.mu, out.rho);
    return out;
}

VariableParameters::VariableParameters(const VpConfig& config, const FilterConfig& filter)
    : filter_(filter), state_(VpState::initial(config)) {}

StepParameters VariableParameters::next(const FilterState& state, const VectorView& u, double error) {
    last_ = vp_iteration(state_, state, filter_, u, error);
    state_ = last_.state;
    ++iterations_;
    if (!last_.optimum.closed_form) {
        ++fallbacks_;
    }
    return {last_.mu, last_.rho};
}

InputPowerEstimator::InputPowerEstimator(double forgetting, double initial)
    : forgetting_(forgetting), value_(initial) {
    if (!(forgetting >= 0.0 && forgetting < 1.0)) {
        throw ParameterError("input power estimator: forgetting factor must lie in [0, 1)");
    }
}

double InputPowerEstimator::update(const VectorView& u) {
    if (u.size() == 0) {
        throw DimensionError("input power estimator: empty regressor");
    }
    value_ = forgetting_ * value_ + (1.0 - forgetting_) * u.squaredNorm() / static_cast<double>(u.size());
    return value_;
}

double estimate_noise_variance(std::span<const Sample> samples, double warmup_mu) {
    if (samples.size() < 4) {
        throw ParameterError("noise variance estimate: need at least 4 samples");
    }
    if (!(warmup_mu >= 0.0)) {
        throw ParameterError("noise variance estimate: warmup mu must be >= 0");
    }
    const auto length = static_cast<std::size_t>(samples.front().u.size());
    const FilterConfig cfg{GroupPartition::singletons(length), std::nullopt, warmup_mu, 0.0, false};
    FixedParameters fixed(warmup_mu, 0.0);
    const auto trajectory = run_sequence(cfg, samples, fixed);

    const std::size_t first = samples.size() / 2;
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t count = 0;
    for (std::size_t i = first; i < samples.size(); ++i) {
        const double e = trajectory[i + 1].last_error;
        ++count;
        const double delta = e - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (e - mean);
    }
    return m2 / static_cast<double>(count - 1);
}

} // namespace gslms
