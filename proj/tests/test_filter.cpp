#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "gslms/errors.hpp"
#include "gslms/filter.hpp"
#include "gslms/signal.hpp"
#include "support.hpp"

using namespace gslms;
using testing::random_vector;
using testing::same_bits;
using testing::vec;

namespace {

FilterConfig lms(std::size_t L) { return {GroupPartition::uniform(L, 5), std::nullopt}; }
FilterConfig gza(std::size_t L, std::size_t group = 5) {
    return {GroupPartition::uniform(L, group), AttractorMode::gza()};
}
FilterConfig grza(std::size_t L) { return {GroupPartition::uniform(L, 5), AttractorMode::grza(0.1)}; }

// random stream from a sparse-ish plant
std::vector<Sample> make_stream(std::size_t n, std::size_t L, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Vector w_star = Vector::Zero(static_cast<Eigen::Index>(L));
    w_star.head(std::min<std::size_t>(5, L)).setConstant(1.0);
    std::normal_distribution<double> nd;
    std::vector<Sample> out;
    for (std::size_t i = 0; i < n; ++i) {
        Vector u = random_vector(rng, L);
        const double d = u.dot(w_star) + 0.1 * nd(rng);
        out.push_back({std::move(u), d});
    }
    return out;
}

// plain elementwise zero-attracting LMS, written without any library code
std::vector<double> za_lms(const std::vector<Sample>& xs, double mu, double rho, std::size_t L) {
    std::vector<double> w(L, 0.0);
    for (const auto& s : xs) {
        double y = 0.0;
        for (std::size_t i = 0; i < L; ++i) {
            y += w[i] * s.u[static_cast<Eigen::Index>(i)];
        }
        const double e = s.d - y;
        for (std::size_t i = 0; i < L; ++i) {
            const double sgn = (w[i] > 0) - (w[i] < 0);
            w[i] = w[i] + mu * e * s.u[static_cast<Eigen::Index>(i)] - rho * sgn;
        }
    }
    return w;
}

} // namespace

TEST_CASE("predict examples") {
    FilterState s{vec({1, 2}), 0, 0.0};
    CHECK(predict(s, vec({3, 4})) == 11.0);
    CHECK(predict(FilterState::zeros(3), vec({5, -1, 2})) == 0.0);
    const Vector u = vec({0.3, -7.5, 2.25});
    for (Eigen::Index k = 0; k < 3; ++k) {
        FilterState e{Vector::Unit(3, k), 0, 0.0};
        CHECK(predict(e, u) == u[k]);
    }
}

TEST_CASE("step: hand-evaluated LMS update") {
    FilterConfig cfg{GroupPartition::singletons(2), std::nullopt};
    FilterState s{vec({1, 0}), 0, 0.0};
    const FilterState next = step(s, cfg, vec({1, 1}), 2.0, 0.1, 0.0);
    CHECK(next.last_error == 1.0);
    CHECK(next.w[0] == doctest::Approx(1.1).epsilon(1e-15));
    CHECK(next.w[1] == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(next.n == 1);
}

TEST_CASE("step: attractor-only GZA update") {
    FilterConfig cfg{GroupPartition(2, {{0, 2}}), AttractorMode::gza()};
    FilterState s{vec({3, 4}), 0, 0.0};
    const FilterState next = step(s, cfg, Vector::Zero(2), 0.0, 0.37, 0.5);
    CHECK(next.w[0] == doctest::Approx(2.7).epsilon(1e-15));
    CHECK(next.w[1] == doctest::Approx(3.6).epsilon(1e-15));
}

TEST_CASE("step: input validation") {
    const FilterConfig cfg = gza(10);
    const FilterState s = FilterState::zeros(10);
    CHECK_THROWS_AS(step(s, cfg, Vector::Ones(9), 1.0, 0.1, 0.0), DimensionError);
    CHECK_THROWS_AS(step(s, cfg, Vector::Ones(10), 1.0, -0.1, 0.0), ParameterError);
    CHECK_THROWS_AS(step(s, cfg, Vector::Ones(10), 1.0, 0.1, -1e-9), ParameterError);
    CHECK_THROWS_AS(predict(s, Vector::Ones(3)), DimensionError);
}

TEST_CASE("step: non-finite weights raise divergence with the iteration") {
    const FilterConfig cfg = lms(5);
    FilterState s = FilterState::zeros(5);
    s.n = 41;
    try {
        (void)step(s, cfg, Vector::Constant(5, 1e200), 1e200, 1e200, 0.0);
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.iteration() == 42);
    }
}

TEST_CASE("rho = 0 reduces GZA and GRZA to plain LMS bitwise") {
    const auto xs = make_stream(3000, 35, 17);
    FixedParameters params(0.01, 0.0);
    const auto ref = run_sequence(lms(35), xs, params);
    const auto a = run_sequence(gza(35), xs, params);
    const auto b = run_sequence(grza(35), xs, params);
    REQUIRE(ref.size() == xs.size() + 1);
    for (std::size_t i = 0; i < ref.size(); ++i) {
        CHECK(same_bits(ref[i].w, a[i].w));
        CHECK(same_bits(ref[i].w, b[i].w));
    }
}

TEST_CASE("GRZA with unit beta equals GZA bitwise") {
    const auto xs = make_stream(3000, 35, 23);
    const FilterConfig cfg = gza(35);
    const Vector ones = Vector::Ones(static_cast<Eigen::Index>(cfg.partition.group_count()));
    FilterState a = FilterState::zeros(35);
    FilterState b = a;
    for (const auto& s : xs) {
        a = step(a, cfg, s.u, s.d, 0.01, 1e-3);
        b = step_weighted(b, cfg.partition, ones, s.u, s.d, 0.01, 1e-3);
        REQUIRE(same_bits(a.w, b.w));
    }
}

TEST_CASE("singleton GZA matches an elementwise zero-attracting LMS") {
    const std::size_t L = 16;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto xs = make_stream(2000, L, seed);
        FixedParameters params(0.01, 5e-4);
        const auto traj = run_sequence(gza(L, 1), xs, params);
        const std::vector<double> ref = za_lms(xs, 0.01, 5e-4, L);
        const Vector& w = traj.back().w;
        for (std::size_t i = 0; i < L; ++i) {
            CHECK(std::abs(w[static_cast<Eigen::Index>(i)] - ref[i]) <= 1e-12);
        }
    }
}

TEST_CASE("vector form equals the group-by-group form") {
    std::mt19937_64 rng(31);
    for (const FilterConfig& cfg : {lms(35), gza(35), grza(35), gza(37, 4)}) {
        FilterState s{random_vector(rng, cfg.length()), 0, 0.0};
        s.w.head(5).setZero();  // one zero group
        for (int k = 0; k < 50; ++k) {
            const Vector u = random_vector(rng, cfg.length());
            const FilterState a = step(s, cfg, u, 0.3, 0.02, 0.01);
            const FilterState b = step_groupwise(s, cfg, u, 0.3, 0.02, 0.01);
            CHECK((a.w - b.w).lpNorm<Eigen::Infinity>() <= 1e-15);
            CHECK(a.last_error == b.last_error);
            s = a;
        }
    }
}

TEST_CASE("step is a pure function") {
    std::mt19937_64 rng(4);
    const FilterConfig cfg = grza(35);
    const FilterState s{random_vector(rng, 35), 7, 0.5};
    const Vector u = random_vector(rng, 35);
    const FilterState a = step(s, cfg, u, 1.25, 0.01, 1e-3);
    const FilterState b = step(s, cfg, u, 1.25, 0.01, 1e-3);
    CHECK(same_bits(a.w, b.w));
    CHECK(a.n == b.n);
    CHECK(a.last_error == b.last_error);
}

TEST_CASE("run_sequence edge cases") {
    FixedParameters params(0.1, 0.0);
    const FilterConfig cfg = lms(5);
    FilterState init{Vector::Constant(5, 0.25), 3, 0.0};
    const auto traj = run_sequence(cfg, std::span<const Sample>{}, params, init);
    REQUIRE(traj.size() == 1);
    CHECK(same_bits(traj[0].w, init.w));
    CHECK(traj[0].n == 3);

    std::vector<Sample> bad{{Vector::Ones(4), 1.0}};
    CHECK_THROWS_AS(run_sequence(cfg, bad, params), DimensionError);
}

TEST_CASE("LMS steady state stays within the small-step bound") {
    // constant plant, white unit-power tapped-delay input, sigma_z^2 = 0.01
    const std::size_t L = 35;
    const double mu = 0.005;
    const double sigma_z2 = 0.01;
    const auto plants = paper_plants();
    PlantSchedule sched({{1, plants[0]}}, 10000);
    const auto x = gen_white_gaussian(10000, 1.0, 99);
    const auto samples = simulate_plant(sched, x, sigma_z2, 100);
    std::vector<Sample> xs;
    for (const auto& s : samples) {
        xs.push_back({s.u, s.d});
    }
    FixedParameters params(mu, 0.0);
    const auto traj = run_sequence(lms(L), xs, params);
    double msd = 0.0;
    for (std::size_t i = traj.size() - 1000; i < traj.size(); ++i) {
        msd += (traj[i].w - plants[0]).squaredNorm() / 1000.0;
    }
    const double theory = sigma_z2 * mu * static_cast<double>(L) / 2.0;
    CHECK(msd < 10.0 * theory);
    CHECK(msd > 0.1 * theory);
}
