#include "gslms/signal.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include <fmt/format.h>

#include "gslms/errors.hpp"

namespace gslms {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(run),    static_cast<std::uint32_t>(run >> 32),
                      static_cast<std::uint32_t>(stream), 0x9e3779b9u};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

InputProcess InputProcess::white(double sigma_u2) {
    InputProcess p;
    p.kind = Kind::WhiteGaussian;
    p.sigma_u2 = sigma_u2;
    p.validate();
    return p;
}

InputProcess InputProcess::ar1_mixture(double alpha, double a, double sigma_v2) {
    InputProcess p;
    p.kind = Kind::AR1GaussianMixture;
    p.alpha = alpha;
    p.a = a;
    p.sigma_v2 = sigma_v2;
    p.validate();
    return p;
}

void InputProcess::validate() const {
    if (kind == Kind::WhiteGaussian) {
        if (!(sigma_u2 > 0.0)) {
            throw ParameterError("white input: variance must be > 0");
        }
        return;
    }
    if (!(std::abs(alpha) < 1.0)) {
        throw ParameterError("AR(1) input: |alpha| must be < 1");
    }
    if (!(sigma_v2 > 0.0)) {
        throw ParameterError("AR(1) input: innovation variance must be > 0");
    }
    if (!std::isfinite(a)) {
        throw ParameterError("AR(1) input: mixture offset must be finite");
    }
}

double InputProcess::stationary_variance() const {
    if (kind == Kind::WhiteGaussian) {
        return sigma_u2;
    }
    // Var(v) = sigma_v^2 (1 + a^2)
    return sigma_v2 * (1.0 + a * a) / (1.0 - alpha * alpha);
}

InputGenerator::InputGenerator(const InputProcess& process, std::uint64_t seed) : process_(process), rng_(seed) {
    process_.validate();
    if (process_.kind == InputProcess::Kind::AR1GaussianMixture) {
        for (std::size_t i = 0; i < kAr1BurnIn; ++i) {
            next();
        }
    }
}

double InputGenerator::mixture_draw() {
    const double sigma_v = std::sqrt(process_.sigma_v2);
    const double centre = coin_(rng_) ? process_.a * sigma_v : -process_.a * sigma_v;
    return centre + sigma_v * normal_(rng_);
}

double InputGenerator::next() {
    if (process_.kind == InputProcess::Kind::WhiteGaussian) {
        return std::sqrt(process_.sigma_u2) * normal_(rng_);
    }
    previous_ = process_.alpha * previous_ + mixture_draw();
    return previous_;
}

std::vector<double> gen_white_gaussian(std::size_t n, double sigma_u2, std::uint64_t seed) {
    InputGenerator gen(InputProcess::white(sigma_u2), seed);
    std::vector<double> out(n);
    for (auto& x : out) {
        x = gen.next();
    }
    return out;
}

std::vector<double> gen_gaussian_mixture(std::size_t n, double a, double sigma_v2, std::uint64_t seed) {
    if (!(sigma_v2 > 0.0)) {
        throw ParameterError("mixture: variance must be > 0");
    }
    // alpha = 0 and no history turns the AR recursion into the bare innovation.
    InputGenerator gen(InputProcess::ar1_mixture(0.0, a, sigma_v2), seed);
    std::vector<double> out(n);
    for (auto& x : out) {
        x = gen.next();
    }
    return out;
}

std::vector<double> gen_ar1_mixture(std::size_t n, double alpha, double a, double sigma_v2, std::uint64_t seed) {
    InputGenerator gen(InputProcess::ar1_mixture(alpha, a, sigma_v2), seed);
    std::vector<double> out(n);
    for (auto& x : out) {
        x = gen.next();
    }
    return out;
}

PlantSchedule::PlantSchedule(std::vector<Segment> segments, std::int64_t total_iterations)
    : segments_(std::move(segments)), total_(total_iterations) {
    if (segments_.empty()) {
        throw ParameterError("plant schedule: at least one segment is required");
    }
    if (segments_.front().start != 1) {
        throw ParameterError("plant schedule: first segment must start at iteration 1");
    }
    if (total_ < 0) {
        throw ParameterError("plant schedule: negative iteration count");
    }
    const auto length = segments_.front().w_star.size();
    if (length == 0) {
        throw ParameterError("plant schedule: empty plant vector");
    }
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        if (segments_[k].w_star.size() != length) {
            throw ParameterError("plant schedule: plant vectors differ in length");
        }
        if (k > 0 && segments_[k].start <= segments_[k - 1].start) {
            throw ParameterError("plant schedule: segment starts must strictly increase");
        }
    }
}

std::size_t PlantSchedule::segment_at(std::int64_t n) const {
    std::size_t k = 0;
    while (k + 1 < segments_.size() && segments_[k + 1].start <= n) {
        ++k;
    }
    return k;
}

std::int64_t PlantSchedule::segment_end(std::size_t k) const {
    if (k + 1 < segments_.size()) {
        return std::min(segments_[k + 1].start - 1, total_);
    }
    return total_;
}

std::array<Vector, 3> paper_plants() {
    constexpr std::array<double, 35> w1{0.8,  0.5,  0.3,  0.2,  0.1,  0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
                                        0.0,  0.0,  0.0,  0.0,  0.0,  0.0, 0.0, 0.0, -0.05, -0.1, -0.2, -0.3,
                                        -0.5, 0.0,  0.0,  0.0,  0.0,  0.0, 0.5, 0.25, 0.5, -0.25, -0.5};
    constexpr std::array<double, 35> w2{0.9,  0.8,  0.7,  0.6,  0.5,  0.4,  0.3,  0.2,  0.1,  1.0,  1.0,  1.0,
                                        1.0,  1.0,  1.0,  1.0,  1.0,  1.0,  1.0,  1.0,  1.0,  1.0,  1.0,  1.0,
                                        1.0,  1.0,  -0.1, -0.2, -0.3, -0.4, -0.5, -0.6, -0.7, -0.8, -0.9};
    constexpr std::array<double, 35> w3{1.2,  0.9,  0.8,  0.7,  0.6,  0.5,  0.4,  0.2,  0.5,  0.4,  0.0,  0.0,
                                        0.0,  0.0,  0.0,  0.0,  0.0,  0.0,  0.0,  0.0,  0.0,  0.0,  0.0,  0.0,
                                        0.0,  -0.4, -0.5, -0.2, -0.4, -0.5, -0.6, -0.7, -0.8, -0.9, -1.2};
    const auto to_vector = [](const std::array<double, 35>& a) {
        return Vector(Eigen::Map<const Vector>(a.data(), static_cast<Eigen::Index>(a.size())));
    };
    return {to_vector(w1), to_vector(w2), to_vector(w3)};
}

PlantSchedule paper_schedule(std::int64_t stage_length) { return paper_schedule(stage_length, 3 * stage_length); }

PlantSchedule paper_schedule(std::int64_t stage_length, std::int64_t total_iterations) {
    if (stage_length < 2) {
        throw ParameterError("plant schedule: stage length must be at least 2");
    }
    auto plants = paper_plants();
    std::vector<PlantSchedule::Segment> segments{
        {1, plants[0]}, {stage_length, plants[1]}, {2 * stage_length, plants[2]}};
    return PlantSchedule(std::move(segments), total_iterations);
}

PlantSimulator::PlantSimulator(const PlantSchedule& schedule, double sigma_z2, std::uint64_t noise_seed)
    : schedule_(schedule), sigma_z_(std::sqrt(sigma_z2)), rng_(noise_seed) {
    if (!(sigma_z2 >= 0.0)) {
        throw ParameterError("plant: noise variance must be >= 0");
    }
    current_.u = Vector::Zero(static_cast<Eigen::Index>(schedule.length()));
}

const PlantSample& PlantSimulator::push(double x) {
    ++n_;
    auto& u = current_.u;
    const Eigen::Index L = u.size();
    for (Eigen::Index i = L - 1; i > 0; --i) {
        u[i] = u[i - 1];
    }
    u[0] = x;
    current_.segment = schedule_.segment_at(n_);
    const double noise = sigma_z_ * normal_(rng_);
    current_.d = u.dot(schedule_.segments()[current_.segment].w_star) + noise;
    return current_;
}

std::vector<PlantSample> simulate_plant(const PlantSchedule& schedule, const std::vector<double>& input,
                                        double sigma_z2, std::uint64_t noise_seed) {
    PlantSimulator sim(schedule, sigma_z2, noise_seed);
    std::vector<PlantSample> out;
    out.reserve(input.size());
    for (double x : input) {
        out.push_back(sim.push(x));
    }
    return out;
}

void write_plants_csv(const std::filesystem::path& path, const std::vector<Vector>& plants) {
    if (plants.empty()) {
        throw ParameterError("write_plants_csv: no plants given");
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << "tap";
    for (std::size_t k = 0; k < plants.size(); ++k) {
        out << ",w" << (k + 1);
    }
    out << '\n';
    for (Eigen::Index i = 0; i < plants.front().size(); ++i) {
        out << (i + 1);
        for (const auto& w : plants) {
            out << ',' << fmt::format("{:.17g}", w[i]);
        }
        out << '\n';
    }
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

} // namespace gslms
