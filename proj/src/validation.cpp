#include <cmath>
#include <random>

#include <fmt/format.h>

#include "gslms/oracle.hpp"

namespace gslms::oracle {

RandomTuple random_pd_tuple(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> scale(0.5, 5.0);
    std::uniform_real_distribution<double> corr(-0.8, 0.8);
    std::uniform_real_distribution<double> target(0.05, 1.0);
    RandomTuple t;
    t.m.g = scale(rng);
    t.m.h = scale(rng);
    t.m.ell = corr(rng) * std::sqrt(t.m.g * t.m.h);
    t.mu_star = target(rng);
    t.rho_star = target(rng);
    t.m.r1 = t.m.g * t.mu_star + t.m.ell * t.rho_star;
    t.m.r2 = t.m.ell * t.mu_star + t.m.h * t.rho_star;
    return t;
}

bool ValidationReport::all_passed() const {
    for (const auto& c : checks) {
        if (!c.passed) {
            return false;
        }
    }
    return !checks.empty();
}

ValidationReport run_validation(const ValidationOptions& o) {
    ValidationReport report;
    const Vector plant = paper_plants()[0];
    const auto L = static_cast<std::size_t>(plant.size());
    const GroupPartition partition = GroupPartition::uniform(L, 5);

    EnsembleSetup setup;
    setup.plant = plant;
    setup.input = InputProcess::white(1.0);
    setup.sigma_z2 = 0.01;
    setup.seed = o.seed;
    setup.workers = o.workers;

    setup.filter = FilterConfig{partition, std::nullopt, o.mu, 0.0, false};
    report.lms_recursion = validate_model_recursion(setup, o.horizon, o.ensemble);
    report.checks.push_back({"recursion_lms", report.lms_recursion.max_relative_deviation <= o.tolerance,
                             report.lms_recursion.max_relative_deviation, o.tolerance,
                             fmt::format("plain LMS, mu={}, ensemble {}, horizon {}", o.mu, o.ensemble, o.horizon)});

    setup.filter = FilterConfig{partition, AttractorMode::grza(0.1), o.mu, o.rho_grza, false};
    setup.seed = o.seed + 1;
    report.grza_recursion = validate_model_recursion(setup, o.horizon, o.ensemble);
    report.checks.push_back({"recursion_grza", report.grza_recursion.max_relative_deviation <= o.tolerance,
                             report.grza_recursion.max_relative_deviation, o.tolerance,
                             fmt::format("GRZA, mu={}, rho={}, ensemble {}, horizon {}", o.mu, o.rho_grza,
                                         o.ensemble, o.horizon)});

    // Closed form against exhaustive grid search.
    std::size_t grid_failures = 0;
    double worst_residual = 0.0;
    for (std::size_t k = 0; k < o.tuples; ++k) {
        const RandomTuple t = random_pd_tuple(o.seed * 1000003ULL + k);
        const OptimalParams opt = solve_optimal_params(t.m, 1e-10);
        const GridMinimum grid =
            grid_minimize_quadratic(t.m, {0.0, 2.0 * opt.mu, 0.0, 2.0 * opt.rho}, o.grid);
        // Rounding slack for the value comparison, relative to the size of the linear terms.
        const double slack = 1e-12 * (std::abs(t.m.r1 * opt.mu) + std::abs(t.m.r2 * opt.rho));
        const bool in_cell = opt.closed_form && std::abs(grid.mu - opt.mu) <= grid.mu_cell &&
                             std::abs(grid.rho - opt.rho) <= grid.rho_cell &&
                             msd_quadratic(t.m, 0.0, opt.mu, opt.rho) <= grid.value + slack;
        if (!in_cell) {
            ++grid_failures;
        }
        const double res_mu = t.m.g * opt.mu_unclamped + t.m.ell * opt.rho_unclamped - t.m.r1;
        const double res_rho = t.m.ell * opt.mu_unclamped + t.m.h * opt.rho_unclamped - t.m.r2;
        worst_residual = std::max(worst_residual, std::hypot(res_mu, res_rho) / std::hypot(t.m.r1, t.m.r2));
    }
    report.checks.push_back({"closed_form_vs_grid", grid_failures == 0, static_cast<double>(grid_failures), 0.0,
                             fmt::format("{} tuples, {}x{} grid; mismatches counted", o.tuples, o.grid, o.grid)});
    report.checks.push_back({"stationarity_residual", worst_residual <= 1e-10, worst_residual, 1e-10,
                             "max relative |H x - r| over the same tuples"});

    // Finite differences on points well away from zero groups.
    std::mt19937_64 rng(o.seed + 2);
    std::normal_distribution<double> normal(0.0, 1.0);
    double worst_fd = 0.0;
    for (std::size_t k = 0; k < o.fd_points; ++k) {
        Vector w(L);
        for (auto& x : w) {
            x = normal(rng);
        }
        const Vector fd = finite_diff_subgradient(w, partition, 1e-6);
        const Vector s = attractor_direction(w, partition);
        worst_fd = std::max(worst_fd, (fd - s).norm() / s.norm());
    }
    report.checks.push_back({"finite_difference_subgradient", worst_fd <= 1e-6, worst_fd, 1e-6,
                             fmt::format("{} random points, central differences, step 1e-6", o.fd_points)});

    // g at zero weight error equals sigma_z^2 sigma_u^2 L.
    setup.filter = FilterConfig{partition, std::nullopt, o.mu, 0.0, false};
    setup.w0 = plant;
    setup.seed = o.seed + 3;
    const EnsembleMoments anchor = ensemble_moments(setup, 0, o.anchor_ensemble);
    const double expected_g = setup.sigma_z2 * 1.0 * static_cast<double>(L);
    const double z = std::abs(anchor.mean.g - expected_g) / anchor.stderr_.g;
    report.checks.push_back({"g_zero_emse_anchor", z <= 3.0, z, 3.0,
                             fmt::format("sample g = {:.6g} vs {:.6g} (standard errors shown as value)",
                                         anchor.mean.g, expected_g)});
    return report;
}

} // namespace gslms::oracle
