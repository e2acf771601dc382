#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gslms/partition.hpp"

namespace gslms {

/// Static description of one adaptive filter. An empty `attractor` means plain LMS.
/// `mu` and `rho` are only consulted by fixed-parameter runs.
struct FilterConfig {
    GroupPartition partition;
    std::optional<AttractorMode> attractor;
    double mu = 0.0;
    double rho = 0.0;
    bool variable_params = false;

    std::size_t length() const noexcept { return partition.length(); }

    /// Throws ParameterError when mu or rho is negative or not finite.
    void validate() const;
};

struct FilterState {
    Vector w;
    std::int64_t n = 0;
    double last_error = 0.0;

    static FilterState zeros(std::size_t length) { return {Vector::Zero(length), 0, 0.0}; }
};

struct Sample {
    Vector u;
    double d = 0.0;
};

/// w_n^T u.
double predict(const FilterState& state, const VectorView& u);

/// One update w_{n+1} = w_n + mu e u - rho (beta o s), with e = d - w_n^T u
/// recorded in the returned state. Throws DivergenceError on non-finite output.
FilterState step(const FilterState& state, const FilterConfig& cfg, const VectorView& u, double d,
                 double mu_n, double rho_n);

/// Unified update with caller-supplied per-group weights beta (length J).
/// An empty `beta` disables the attractor term (plain LMS).
FilterState step_weighted(const FilterState& state, const GroupPartition& partition, const VectorView& beta,
                          const VectorView& u, double d, double mu_n, double rho_n);

/// Same update evaluated group by group on sub-vectors; kept as an independent
/// reference for the vector form above.
FilterState step_groupwise(const FilterState& state, const FilterConfig& cfg, const VectorView& u, double d,
                           double mu_n, double rho_n);

struct StepParameters {
    double mu = 0.0;
    double rho = 0.0;
};

/// Supplies (mu_n, rho_n) for the coming update. Called with the state before
/// the update, the current regressor and the a-priori error.
class ParameterSource {
public:
    virtual ~ParameterSource() = default;
    virtual StepParameters next(const FilterState& state, const VectorView& u, double error) = 0;
};

class FixedParameters final : public ParameterSource {
public:
    FixedParameters(double mu, double rho) : params_{mu, rho} {}
    StepParameters next(const FilterState&, const VectorView&, double) override { return params_; }

private:
    StepParameters params_;
};

/// Folds `step` over the stream. The returned trajectory starts with `initial`
/// and holds one state per sample after that.
std::vector<FilterState> run_sequence(const FilterConfig& cfg, std::span<const Sample> inputs,
                                      ParameterSource& source, FilterState initial);

/// Convenience overload starting from w_0 = 0.
std::vector<FilterState> run_sequence(const FilterConfig& cfg, std::span<const Sample> inputs,
                                      ParameterSource& source);

} // namespace gslms
