#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "gslms/partition.hpp"

namespace gslms {

/// Independent 64-bit seed for (master, run, stream).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run, std::uint64_t stream);

/// Scalar input process feeding the tapped-delay line.
struct InputProcess {
    enum class Kind { WhiteGaussian, AR1GaussianMixture };

    Kind kind = Kind::WhiteGaussian;
    double sigma_u2 = 1.0;  ///< white input variance
    double alpha = 0.5;     ///< AR(1) coefficient
    double a = 1.5;         ///< mixture component offset, in units of sigma_v
    double sigma_v2 = 4.0 / 13.0;

    static InputProcess white(double sigma_u2);
    static InputProcess ar1_mixture(double alpha, double a, double sigma_v2);

    /// Throws ParameterError on sigma_u2 <= 0, |alpha| >= 1 or sigma_v2 <= 0.
    void validate() const;
    friend bool operator==(const InputProcess&, const InputProcess&) = default;

    /// Stationary variance of the scalar process.
    double stationary_variance() const;
};

inline constexpr std::size_t kAr1BurnIn = 1000;

/// Stateful scalar sample source for one InputProcess.
class InputGenerator {
public:
    InputGenerator(const InputProcess& process, std::uint64_t seed);
    double next();

private:
    double mixture_draw();

    InputProcess process_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::bernoulli_distribution coin_{0.5};
    double previous_ = 0.0;
};

/// i.i.d. N(0, sigma_u2).
std::vector<double> gen_white_gaussian(std::size_t n, double sigma_u2, std::uint64_t seed);

/// i.i.d. draws from 0.5 N(a sigma_v, sigma_v^2) + 0.5 N(-a sigma_v, sigma_v^2).
std::vector<double> gen_gaussian_mixture(std::size_t n, double a, double sigma_v2, std::uint64_t seed);

/// u_n = alpha u_{n-1} + v_n with mixture innovations, u_0 = 0 and a
/// kAr1BurnIn-sample burn-in discarded.
std::vector<double> gen_ar1_mixture(std::size_t n, double alpha, double a, double sigma_v2, std::uint64_t seed);

/// Piecewise-constant plant. Segment starts are 1-based iteration indices.
class PlantSchedule {
public:
    struct Segment {
        std::int64_t start = 1;
        Vector w_star;
    };

    /// Throws ParameterError unless starts strictly increase from 1 and all
    /// vectors share one non-zero length.
    PlantSchedule(std::vector<Segment> segments, std::int64_t total_iterations);

    const std::vector<Segment>& segments() const noexcept { return segments_; }
    std::int64_t total_iterations() const noexcept { return total_; }
    std::size_t length() const noexcept { return static_cast<std::size_t>(segments_.front().w_star.size()); }

    /// Index of the segment active at iteration n (n >= 1).
    std::size_t segment_at(std::int64_t n) const;
    const Vector& w_star_at(std::int64_t n) const { return segments_[segment_at(n)].w_star; }
    /// Last iteration (inclusive) of segment k.
    std::int64_t segment_end(std::size_t k) const;

private:
    std::vector<Segment> segments_;
    std::int64_t total_;
};

/// The three 35-tap plants of the reference experiments: group-sparse,
/// dense, group-sparse.
std::array<Vector, 3> paper_plants();

/// Plants switched at n = 1, stage_length, 2 stage_length over 3 stage_length iterations.
PlantSchedule paper_schedule(std::int64_t stage_length);
PlantSchedule paper_schedule(std::int64_t stage_length, std::int64_t total_iterations);

struct PlantSample {
    Vector u;  ///< regressor [x_n, x_{n-1}, ..., x_{n-L+1}]
    double d = 0.0;
    std::size_t segment = 0;
};

/// Tapped-delay-line plant d_n = u_n^T w*_n + z_n with zero pre-padding and
/// noise drawn from its own RNG stream.
class PlantSimulator {
public:
    PlantSimulator(const PlantSchedule& schedule, double sigma_z2, std::uint64_t noise_seed);

    /// Feeds scalar input x_n and returns the sample for iteration n.
    const PlantSample& push(double x);
    std::int64_t iteration() const noexcept { return n_; }

private:
    const PlantSchedule& schedule_;
    double sigma_z_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    PlantSample current_;
    std::int64_t n_ = 0;
};

/// Batch form of PlantSimulator over a given scalar input sequence.
std::vector<PlantSample> simulate_plant(const PlantSchedule& schedule, const std::vector<double>& input,
                                        double sigma_z2, std::uint64_t noise_seed);

/// CSV with columns tap,w1,w2,... for inspection.
void write_plants_csv(const std::filesystem::path& path, const std::vector<Vector>& plants);

} // namespace gslms
