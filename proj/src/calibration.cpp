#include "gslms/calibration.hpp"

#include <cmath>
#include <optional>

#include "gslms/errors.hpp"
#include "gslms/experiment.hpp"

namespace gslms {

namespace {

const AlgorithmSpec* counterpart(const ExperimentConfig& cfg, AlgorithmSpec::Kind kind) {
    const AlgorithmSpec::Kind wanted = kind == AlgorithmSpec::Kind::LMS ? AlgorithmSpec::Kind::GRZA : kind;
    for (const auto& a : cfg.algorithms) {
        if (a.variable && a.kind == wanted) {
            return &a;
        }
    }
    return nullptr;
}

ExperimentConfig short_config(const ExperimentConfig& cfg, const CalibrationOptions& o) {
    ExperimentConfig c = cfg;
    c.runs = o.runs;
    c.iterations = o.window_last;
    return c;
}

} // namespace

std::vector<CalibrationEntry> calibrate_fixed_parameters(const ExperimentConfig& cfg,
                                                         const CalibrationOptions& o) {
    if (o.window_first < 1 || o.window_last < o.window_first || o.window_last >= cfg.stage_length) {
        throw ParameterError("calibration: matching window must lie inside the first stage");
    }
    if (!(o.mu_lo > 0.0) || !(o.mu_hi > o.mu_lo)) {
        throw ParameterError("calibration: invalid mu bracket");
    }

    // Reference curves from the variable-parameter algorithms only.
    ExperimentConfig ref_cfg = short_config(cfg, o);
    ref_cfg.algorithms.clear();
    for (const auto& a : cfg.algorithms) {
        if (a.variable) {
            ref_cfg.algorithms.push_back(a);
        }
    }
    if (ref_cfg.algorithms.empty()) {
        throw ParameterError("calibration: no variable-parameter algorithm to match against");
    }
    const ExperimentResult ref = run_experiment(ref_cfg, o.workers);

    std::vector<CalibrationEntry> entries;
    for (const auto& a : cfg.algorithms) {
        if (a.variable) {
            continue;
        }
        const AlgorithmSpec* vp = counterpart(cfg, a.kind);
        if (vp == nullptr) {
            throw ParameterError("calibration: no variable-parameter counterpart for '" + a.name + "'");
        }
        const LearningCurve& target = find_curve(ref, vp->name);
        const double target_db = to_db(window_mean(target.msd, o.window_first, o.window_last));

        const auto run_trial = [&](double mu, double lambda, std::int64_t iterations) {
            ExperimentConfig c = short_config(cfg, o);
            c.iterations = iterations;
            AlgorithmSpec trial = a;
            trial.mu = mu;
            trial.rho = mu * lambda;
            c.algorithms = {trial};
            return run_experiment(c, o.workers).curves.front();
        };
        const auto level_db = [&](double mu, double lambda) {
            return to_db(window_mean(run_trial(mu, lambda, o.window_last).msd, o.window_first, o.window_last));
        };

        std::optional<CalibrationEntry> best;
        const std::vector<double> lambdas =
            a.kind == AlgorithmSpec::Kind::LMS ? std::vector<double>{0.0} : o.lambda_grid;
        for (const double lambda : lambdas) {
            // MSD after a fixed number of iterations falls monotonically with mu in this bracket.
            double lo = std::log(o.mu_lo);
            double hi = std::log(o.mu_hi);
            for (int i = 0; i < o.bisection_steps; ++i) {
                const double mid = 0.5 * (lo + hi);
                if (level_db(std::exp(mid), lambda) > target_db) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            CalibrationEntry entry;
            entry.name = a.name;
            entry.reference = vp->name;
            entry.lambda = lambda;
            entry.mu = std::exp(0.5 * (lo + hi));
            entry.rho = entry.mu * lambda;
            entry.target_db = target_db;
            entry.achieved_db = level_db(entry.mu, lambda);
            if (std::abs(entry.achieved_db - target_db) > o.match_tolerance_db) {
                continue;
            }
            const std::int64_t stage_end = cfg.stage_length - 1;
            entry.steady_db =
                to_db(window_mean(run_trial(entry.mu, lambda, stage_end).msd, std::max<std::int64_t>(1, stage_end - 999),
                                  stage_end));
            if (!best || entry.steady_db < best->steady_db) {
                best = entry;
            }
        }
        if (!best) {
            throw ParameterError("calibration: could not match the initial slope for '" + a.name + "'");
        }
        const CalibrationEntry& entry = *best;
        entries.push_back(entry);
    }
    return entries;
}

ExperimentConfig apply_calibration(ExperimentConfig cfg, const std::vector<CalibrationEntry>& entries) {
    for (const auto& e : entries) {
        bool found = false;
        for (auto& a : cfg.algorithms) {
            if (a.name == e.name) {
                a.mu = e.mu;
                a.rho = e.rho;
                found = true;
            }
        }
        if (!found) {
            throw ParameterError("apply_calibration: unknown algorithm '" + e.name + "'");
        }
    }
    return cfg;
}

} // namespace gslms
