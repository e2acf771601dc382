#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "gslms/errors.hpp"
#include "gslms/oracle.hpp"
#include "gslms/signal.hpp"
#include "gslms/vp_engine.hpp"
#include "support.hpp"

using namespace gslms;
using testing::random_vector;
using testing::vec;

namespace {

VpConfig default_vp(double gamma = 0.5, double gamma_prime = 0.95) {
    VpConfig c;
    c.length = 35;
    c.sigma_z2 = 0.01;
    c.sigma_u2 = 1.0;
    c.gamma = gamma;
    c.gamma_prime = gamma_prime;
    return c;
}

} // namespace

TEST_CASE("estimate_emse examples") {
    VpState vp = VpState::initial(default_vp(0.0));
    auto r = estimate_emse(vp, 0.5);
    CHECK(r.zeta_hat == doctest::Approx(0.24).epsilon(1e-15));
    CHECK(r.state.e_smooth == 0.5);

    vp.zeta_min = 0.05;
    CHECK(estimate_emse(vp, 0.05).zeta_hat == 0.05);

    VpState quiet = VpState::initial(default_vp());
    for (int i = 0; i < 100; ++i) {
        auto q = estimate_emse(quiet, 0.0);
        CHECK(q.zeta_hat == 0.0);
        quiet = q.state;
    }

    // smoothing: e_hat = (1 - gamma) e + gamma e_prev
    VpState s = VpState::initial(default_vp(0.5));
    s.e_smooth = 0.2;
    CHECK(estimate_emse(s, 1.0).state.e_smooth == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("compute_g and compute_r1 examples") {
    const VpConfig c = default_vp();
    CHECK(compute_g(c, 0.0) == doctest::Approx(0.35).epsilon(1e-15));
    CHECK(compute_g(c, 0.1) == doctest::Approx(4.05).epsilon(1e-15));
    CHECK(compute_r1(0.0) == 0.0);
    CHECK(compute_r1(0.24) == 0.24);
    CHECK(compute_r1(1e6) == 1e6);

    VpConfig zero = c;
    zero.length = 0;
    CHECK_THROWS_AS(zero.validate(), ParameterError);
}

TEST_CASE("config validation") {
    VpConfig c = default_vp();
    CHECK_NOTHROW(c.validate());
    for (double g : {-0.1, 1.0, 1.5}) {
        VpConfig bad = c;
        bad.gamma = g;
        CHECK_THROWS_AS(bad.validate(), ParameterError);
        bad = c;
        bad.gamma_prime = g;
        CHECK_THROWS_AS(bad.validate(), ParameterError);
    }
    VpConfig bad = c;
    bad.sigma_z2 = 0.0;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    bad = c;
    bad.mu_max = 0.0;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    CHECK(VpConfig::default_mu_max(1.0, 35) == doctest::Approx(2.0 / 105.0).epsilon(1e-15));
}

TEST_CASE("one_step_plant_estimate examples") {
    const Vector w = vec({0.3, -1.2});
    auto a = one_step_plant_estimate(w, 1.7, vec({1, 2}), 0.0, 3.0);
    CHECK(a.w_star_hat == w);
    CHECK(a.w_tilde_hat.isZero(0.0));

    auto b = one_step_plant_estimate(w, 0.0, vec({1, 2}), 0.4, 3.0);
    CHECK(b.w_tilde_hat.isZero(0.0));

    auto c = one_step_plant_estimate(w, 2.0, vec({1, -1}), 0.1, 1.0);
    CHECK(c.w_tilde_hat[0] == doctest::Approx(-0.2).epsilon(1e-15));
    CHECK(c.w_tilde_hat[1] == doctest::Approx(0.2).epsilon(1e-15));
    CHECK((c.w_star_hat - (w - c.w_tilde_hat)).isZero(0.0));

    CHECK_THROWS_AS(one_step_plant_estimate(w, 1.0, vec({1, 1}), 0.1, 0.0), ModelError);
    CHECK_THROWS_AS(one_step_plant_estimate(w, 1.0, vec({1, 1}), 0.1, -2.0), ModelError);
}

TEST_CASE("compute_instantaneous_moments examples") {
    const auto z = compute_instantaneous_moments(vec({1, 2}), vec({3, 4}), Vector::Zero(2));
    CHECK(z.h == 0.0);
    CHECK(z.ell == 0.0);
    CHECK(z.r2 == 0.0);

    const auto m = compute_instantaneous_moments(vec({0.6, 0.8}), Vector::Zero(2), vec({0.6, 0.8}));
    CHECK(m.h == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.ell == 0.0);
    CHECK(m.r2 == doctest::Approx(1.0).epsilon(1e-15));

    std::mt19937_64 rng(2);
    for (int k = 0; k < 20; ++k) {
        const Vector wt = random_vector(rng, 35);
        const Vector u = random_vector(rng, 35);
        const Vector bs = random_vector(rng, 35);
        const auto r = compute_instantaneous_moments(wt, u, bs);
        CHECK(r.h == doctest::Approx(bs.squaredNorm()).epsilon(1e-14));
        CHECK(r.h >= 0.0);
        CHECK(r.ell == doctest::Approx(wt.dot(u) * u.dot(bs)).epsilon(1e-12));
        CHECK(r.r2 == doctest::Approx(bs.dot(wt)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(compute_instantaneous_moments(vec({1}), vec({1, 2}), vec({1, 2})), DimensionError);
}

TEST_CASE("solve_optimal_params examples") {
    const auto diag = solve_optimal_params({2, 1, 0, 1, 1}, 1e-10);
    CHECK(diag.closed_form);
    CHECK(diag.mu == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(diag.rho == doctest::Approx(1.0).epsilon(1e-15));

    const auto fb = solve_optimal_params({2, 0, 0, 0.6, 0.3}, 1e-10);
    CHECK_FALSE(fb.closed_form);
    CHECK(fb.mu == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(fb.rho == 0.0);

    // negative closed-form rho is clamped
    const auto neg = solve_optimal_params({2, 1, 0, 1, -1}, 1e-10);
    CHECK(neg.rho_unclamped == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(neg.rho == 0.0);
    CHECK(neg.mu == doctest::Approx(0.5).epsilon(1e-15));

    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(solve_optimal_params({2, 1, 0, nan, 1}, 1e-10), ModelError);
    CHECK_THROWS_AS(solve_optimal_params({0, 1, 0, 1, 1}, 1e-10), ModelError);
}

TEST_CASE("closed form satisfies stationarity and beats a grid") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto t = oracle::random_pd_tuple(seed);
        const auto& m = t.m;
        const auto opt = solve_optimal_params(m, 1e-10);
        REQUIRE(opt.closed_form);
        const double mu = opt.mu_unclamped;
        const double rho = opt.rho_unclamped;
        const double res1 = m.g * mu + m.ell * rho - m.r1;
        const double res2 = m.ell * mu + m.h * rho - m.r2;
        const double scale = std::hypot(m.r1, m.r2);
        CHECK(std::hypot(res1, res2) <= 1e-10 * scale);

        const double best = msd_quadratic(m, 0.0, mu, rho);
        const int n = 200;
        double grid_min = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double a = 2.0 * mu * i / (n - 1);
                const double b = 2.0 * rho * j / (n - 1);
                grid_min = std::min(grid_min, msd_quadratic(m, 0.0, a, b));
            }
        }
        CHECK(best <= grid_min + 1e-12 * (std::abs(m.r1 * mu) + std::abs(m.r2 * rho)));
        // never worse than doing nothing
        CHECK(best <= 0.0);
    }
}

TEST_CASE("propagate_model_msd examples") {
    VpState vp = VpState::initial(default_vp());
    vp.xi_model = 2.0;
    const MomentEstimates m{1, 1, 0, 1, 0};
    CHECK(propagate_model_msd(vp, m, 0.0, 0.0).xi_model == 2.0);
    const VpState next = propagate_model_msd(vp, m, 1.0, 0.0);
    CHECK(next.xi_model == 1.0);
    CHECK(next.zeta_min == 1.0);

    VpConfig c2 = default_vp();
    c2.sigma_u2 = 2.0;
    VpState v2 = VpState::initial(c2);
    v2.xi_model = 2.0;
    CHECK(propagate_model_msd(v2, m, 1.0, 0.0).zeta_min == 2.0);

    // floored at zero
    CHECK(propagate_model_msd(vp, {1, 1, 0, 5, 0}, 1.0, 0.0).xi_model == 0.0);

    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto t = oracle::random_pd_tuple(seed);
        VpState s = VpState::initial(default_vp());
        s.xi_model = 3.0;
        const auto opt = solve_optimal_params(t.m, 1e-10);
        CHECK(propagate_model_msd(s, t.m, opt.mu_unclamped, opt.rho_unclamped).xi_model <= 3.0);
    }
}

TEST_CASE("smooth_and_clamp examples") {
    VpConfig c = default_vp(0.5, 0.9);
    c.mu_max = 0.15;
    VpState vp = VpState::initial(c);
    vp.mu_prev = 0.1;
    const auto a = smooth_and_clamp(vp, 0.2, 0.0);
    CHECK(a.mu == doctest::Approx(0.11).epsilon(1e-15));
    CHECK(a.state.mu_prev == a.mu);

    const auto b = smooth_and_clamp(vp, 1e9, 0.0);
    CHECK(b.mu == 0.15);

    VpConfig c0 = default_vp(0.5, 0.0);
    c0.mu_max = 0.15;
    VpState v0 = VpState::initial(c0);
    v0.mu_prev = 0.7;
    v0.rho_prev = 0.3;
    const auto d = smooth_and_clamp(v0, 0.05, 0.02);
    CHECK(d.mu == 0.05);
    CHECK(d.rho == 0.02);
    CHECK(smooth_and_clamp(v0, 0.4, 0.02).mu == 0.15);

    VpState r = VpState::initial(default_vp(0.5, 0.9));
    r.rho_prev = 0.5;
    const auto e = smooth_and_clamp(r, 0.0, 1.0);
    CHECK(e.rho == doctest::Approx(0.55).epsilon(1e-15));
    CHECK(e.state.rho_prev == e.rho);
}

TEST_CASE("vp_iteration: first scalar iteration traced by hand") {
    // L = 1, w_0 = 0, gamma = 0: e_hat = d, zeta = d^2 - sz2, g = sz2 + 3 zeta,
    // the attractor is zero so the fallback gives mu* = zeta / g.
    const FilterConfig fc{GroupPartition::singletons(1), AttractorMode::grza(0.1)};
    const FilterState w0 = FilterState::zeros(1);
    VpConfig c;
    c.length = 1;
    c.sigma_z2 = 0.01;
    c.gamma = 0.0;
    c.gamma_prime = 0.95;
    const VpState vp = VpState::initial(c);

    const auto r = vp_iteration(vp, w0, fc, vec({1.0}), 1.0);
    const double zeta = 0.99;
    const double g = 0.01 + 3.0 * zeta;
    CHECK(r.zeta_hat == doctest::Approx(zeta).epsilon(1e-15));
    CHECK(r.moments.g == doctest::Approx(g).epsilon(1e-15));
    CHECK_FALSE(r.optimum.closed_form);
    CHECK(r.mu == doctest::Approx(0.05 * zeta / g).epsilon(1e-14));
    CHECK(r.rho == 0.0);

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> ud(-5.0, 5.0);
    for (int k = 0; k < 200; ++k) {
        double d = ud(rng);
        if (d * d <= c.sigma_z2) {
            continue;
        }
        const auto q = vp_iteration(vp, w0, fc, vec({ud(rng)}), d);
        CHECK(std::isfinite(q.mu));
        CHECK(q.mu > 0.0);
    }
}

TEST_CASE("vp_iteration: zero input stays finite and decays") {
    const FilterConfig fc{GroupPartition::uniform(35, 5), AttractorMode::grza(0.1)};
    FilterState fs{Vector::Constant(35, 0.3), 0, 0.0};
    VpState vp = VpState::initial(default_vp());
    const Vector u = Vector::Zero(35);
    double rho_prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 2000; ++i) {
        const auto r = vp_iteration(vp, fs, fc, u, 0.0);
        vp = r.state;
        REQUIRE(std::isfinite(r.mu));
        REQUIRE(std::isfinite(r.rho));
        CHECK(r.mu >= 0.0);
        CHECK(r.rho <= rho_prev);
        rho_prev = r.rho;
    }
    CHECK(vp.rho_prev < 1e-12);
}

TEST_CASE("vp_iteration invariants on a simulated run") {
    const auto plants = paper_plants();
    PlantSchedule sched({{1, plants[0]}}, 3000);
    const auto x = gen_white_gaussian(3000, 1.0, 5);
    const auto samples = simulate_plant(sched, x, 0.01, 6);
    const FilterConfig fc{GroupPartition::uniform(35, 5), AttractorMode::grza(0.1)};
    VpConfig c = default_vp();
    c.mu_max = VpConfig::default_mu_max(1.0, 35);
    VpState vp = VpState::initial(c);
    FilterState fs = FilterState::zeros(35);
    const double g_floor = c.sigma_z2 * c.sigma_u2 * 35.0;
    std::vector<double> mus;
    for (const auto& s : samples) {
        const double zeta_min = vp.zeta_min;
        const double e = s.d - predict(fs, s.u);
        const auto r = vp_iteration(vp, fs, fc, s.u, e);
        CHECK(zeta_min >= 0.0);
        CHECK(r.zeta_hat >= zeta_min);
        CHECK(r.moments.g >= g_floor * (1 - 1e-15));
        CHECK(r.moments.h >= 0.0);
        CHECK(r.mu <= c.mu_max);
        CHECK(r.state.xi_model >= 0.0);
        if (r.optimum.closed_form) {
            const auto& m = r.moments;
            const double r1 = m.g * r.optimum.mu_unclamped + m.ell * r.optimum.rho_unclamped - m.r1;
            const double r2 = m.ell * r.optimum.mu_unclamped + m.h * r.optimum.rho_unclamped - m.r2;
            CHECK(std::hypot(r1, r2) <= 1e-10 * std::max(std::hypot(m.r1, m.r2), 1e-300));
        }
        mus.push_back(r.mu);
        vp = r.state;
        fs = step(fs, fc, s.u, s.d, r.mu, r.rho);
    }
    // step size rises during the transient, then settles lower
    double early = 0.0;
    for (std::size_t i = 0; i < 300; ++i) {
        early = std::max(early, mus[i]);
    }
    double late = 0.0;
    for (std::size_t i = 2000; i < 3000; ++i) {
        late += mus[i] / 1000.0;
    }
    CHECK(late > 0.0);
    CHECK(early > 3.0 * late);
}

TEST_CASE("VariableParameters drives run_sequence") {
    const auto plants = paper_plants();
    PlantSchedule sched({{1, plants[0]}}, 500);
    const auto samples = simulate_plant(sched, gen_white_gaussian(500, 1.0, 1), 0.01, 2);
    std::vector<Sample> xs;
    for (const auto& s : samples) {
        xs.push_back({s.u, s.d});
    }
    const FilterConfig fc{GroupPartition::uniform(35, 5), AttractorMode::gza(), 0.0, 0.0, true};
    VpConfig c = default_vp();
    c.mu_max = VpConfig::default_mu_max(1.0, 35);
    VariableParameters source(c, fc);
    const auto traj = run_sequence(fc, xs, source);
    CHECK(traj.size() == 501);
    CHECK(source.iterations() == 500);
    CHECK(source.fallback_count() >= 1);  // w_0 = 0 has no attractor direction
    CHECK((traj.back().w - plants[0]).squaredNorm() < plants[0].squaredNorm());
}

TEST_CASE("noise variance pre-estimate and input power estimate") {
    const auto plants = paper_plants();
    PlantSchedule sched({{1, plants[1]}}, 20000);
    const auto samples = simulate_plant(sched, gen_white_gaussian(20000, 1.0, 3), 0.01, 4);
    std::vector<Sample> xs;
    InputPowerEstimator power(0.999);
    for (const auto& s : samples) {
        xs.push_back({s.u, s.d});
        power.update(s.u);
    }
    const double est = estimate_noise_variance(xs, 0.002);
    CHECK(est == doctest::Approx(0.01).epsilon(0.1));
    CHECK(power.value() == doctest::Approx(1.0).epsilon(0.1));
    CHECK_THROWS_AS(InputPowerEstimator(1.0), ParameterError);
}
