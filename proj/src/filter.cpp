#include "gslms/filter.hpp"

#include <cmath>
#include <string>

#include "gslms/errors.hpp"

namespace gslms {

namespace {

void check_inputs(const FilterState& state, const FilterConfig& cfg, const VectorView& u) {
    if (static_cast<std::size_t>(state.w.size()) != cfg.length() ||
        static_cast<std::size_t>(u.size()) != cfg.length()) {
        throw DimensionError("filter step: expected length " + std::to_string(cfg.length()) + ", got w=" +
                             std::to_string(state.w.size()) + " u=" + std::to_string(u.size()));
    }
}

void check_step_params(double mu_n, double rho_n) {
    if (!(mu_n >= 0.0) || !(rho_n >= 0.0) || !std::isfinite(mu_n) || !std::isfinite(rho_n)) {
        throw ParameterError("filter step: mu and rho must be finite and non-negative");
    }
}

void check_finite(const FilterState& next) {
    if (!std::isfinite(next.last_error) || !next.w.allFinite()) {
        throw DivergenceError(next.n, "filter weights became non-finite");
    }
}

} // namespace

void FilterConfig::validate() const {
    if (!(mu >= 0.0) || !std::isfinite(mu)) {
        throw ParameterError("filter config: mu must be finite and >= 0");
    }
    if (!(rho >= 0.0) || !std::isfinite(rho)) {
        throw ParameterError("filter config: rho must be finite and >= 0");
    }
    if (attractor && attractor->kind == AttractorMode::Kind::GRZA && !(attractor->epsilon > 0.0)) {
        throw ParameterError("filter config: GRZA epsilon must be > 0");
    }
}

double predict(const FilterState& state, const VectorView& u) {
    if (state.w.size() != u.size()) {
        throw DimensionError("predict: weight length " + std::to_string(state.w.size()) +
                             " does not match regressor length " + std::to_string(u.size()));
    }
    return state.w.dot(u);
}

FilterState step_weighted(const FilterState& state, const GroupPartition& partition, const VectorView& beta,
                          const VectorView& u, double d, double mu_n, double rho_n) {
    if (static_cast<std::size_t>(state.w.size()) != partition.length() ||
        static_cast<std::size_t>(u.size()) != partition.length()) {
        throw DimensionError("filter step: expected length " + std::to_string(partition.length()) + ", got w=" +
                             std::to_string(state.w.size()) + " u=" + std::to_string(u.size()));
    }
    check_step_params(mu_n, rho_n);

    FilterState next;
    next.n = state.n + 1;
    next.last_error = d - state.w.dot(u);
    next.w = state.w + (mu_n * next.last_error) * u;
    if (beta.size() != 0 && rho_n != 0.0) {
        const Vector b = expand_group_vector(beta, partition).cwiseProduct(attractor_direction(state.w, partition));
        next.w -= rho_n * b;
    }
    check_finite(next);
    return next;
}

FilterState step(const FilterState& state, const FilterConfig& cfg, const VectorView& u, double d,
                 double mu_n, double rho_n) {
    check_inputs(state, cfg, u);
    if (!cfg.attractor) {
        return step_weighted(state, cfg.partition, Vector(), u, d, mu_n, rho_n);
    }
    return step_weighted(state, cfg.partition, beta_weights(state.w, cfg.partition, *cfg.attractor), u, d, mu_n,
                         rho_n);
}

FilterState step_groupwise(const FilterState& state, const FilterConfig& cfg, const VectorView& u, double d,
                           double mu_n, double rho_n) {
    check_inputs(state, cfg, u);
    check_step_params(mu_n, rho_n);

    FilterState next;
    next.n = state.n + 1;
    next.last_error = d - state.w.dot(u);
    next.w.resize(state.w.size());
    for (const auto& g : cfg.partition.groups()) {
        const auto w_g = state.w.segment(g.begin, g.size());
        auto out = next.w.segment(g.begin, g.size());
        out = w_g + (mu_n * next.last_error) * u.segment(g.begin, g.size());
        if (!cfg.attractor || rho_n == 0.0) {
            continue;
        }
        const double norm = w_g.norm();
        if (norm < kZeroGroupThreshold) {
            continue;
        }
        const double beta =
            cfg.attractor->kind == AttractorMode::Kind::GRZA ? 1.0 / (norm + cfg.attractor->epsilon) : 1.0;
        out -= (rho_n * beta) * (w_g / norm);
    }
    check_finite(next);
    return next;
}

std::vector<FilterState> run_sequence(const FilterConfig& cfg, std::span<const Sample> inputs,
                                      ParameterSource& source, FilterState initial) {
    cfg.validate();
    std::vector<FilterState> trajectory;
    trajectory.reserve(inputs.size() + 1);
    trajectory.push_back(std::move(initial));
    for (const auto& sample : inputs) {
        const FilterState& current = trajectory.back();
        const double error = sample.d - predict(current, sample.u);
        const StepParameters p = source.next(current, sample.u, error);
        trajectory.push_back(step(current, cfg, sample.u, sample.d, p.mu, p.rho));
    }
    return trajectory;
}

std::vector<FilterState> run_sequence(const FilterConfig& cfg, std::span<const Sample> inputs,
                                      ParameterSource& source) {
    return run_sequence(cfg, inputs, source, FilterState::zeros(cfg.length()));
}

} // namespace gslms
