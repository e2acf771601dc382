#include "gslms/experiment.hpp"

#include <cmath>
#include <optional>

#include "gslms/errors.hpp"
#include "gslms/filter.hpp"
#include "gslms/parallel.hpp"
#include "gslms/vp_engine.hpp"

namespace gslms {

namespace {

// Runs merged per batch; fixed so the summation order never depends on workers.
constexpr std::size_t kRunBatch = 8;

struct RunTrace {
    bool ok = true;
    std::vector<double> msd;
    std::vector<double> mu;
    std::vector<double> lambda;
    std::vector<double> rho;
    std::int64_t fallbacks = 0;
    std::int64_t vp_steps = 0;
};

struct RunResult {
    std::vector<RunTrace> algorithms;
    double input_power_sum = 0.0;
};

struct Runner {
    FilterConfig filter;
    std::optional<VpState> vp;
    FilterState state;
};

std::vector<Runner> make_runners(const ExperimentConfig& cfg, const GroupPartition& partition) {
    std::vector<Runner> runners;
    for (const auto& a : cfg.algorithms) {
        Runner r{FilterConfig{partition, std::nullopt, a.mu, a.rho, a.variable}, std::nullopt,
                 FilterState::zeros(cfg.length)};
        if (a.kind == AlgorithmSpec::Kind::GZA) {
            r.filter.attractor = AttractorMode::gza();
        } else if (a.kind == AlgorithmSpec::Kind::GRZA) {
            r.filter.attractor = AttractorMode::grza(cfg.epsilon);
        }
        if (a.variable) {
            VpConfig vc;
            vc.length = cfg.length;
            vc.sigma_z2 = cfg.sigma_z2;
            vc.sigma_u2 = cfg.vp_sigma_u2;
            vc.gamma = a.gamma;
            vc.gamma_prime = a.gamma_prime;
            vc.mu_max = a.mu_max ? *a.mu_max : VpConfig::default_mu_max(cfg.vp_sigma_u2, cfg.length);
            vc.det_tol = cfg.det_tol;
            r.vp = VpState::initial(vc);
        }
        runners.push_back(std::move(r));
    }
    return runners;
}

RunResult simulate_run(const ExperimentConfig& cfg, const PlantSchedule& schedule, const GroupPartition& partition,
                       std::size_t run) {
    const auto N = static_cast<std::size_t>(cfg.iterations);
    InputGenerator input(cfg.input, derive_seed(cfg.master_seed, run, 0));
    PlantSimulator plant(schedule, cfg.sigma_z2, derive_seed(cfg.master_seed, run, 1));
    std::vector<Runner> runners = make_runners(cfg, partition);

    RunResult out;
    out.algorithms.resize(runners.size());
    for (std::size_t k = 0; k < runners.size(); ++k) {
        out.algorithms[k].msd.resize(N);
        if (runners[k].vp) {
            out.algorithms[k].mu.resize(N);
            out.algorithms[k].lambda.resize(N);
            out.algorithms[k].rho.resize(N);
        }
    }

    for (std::size_t i = 0; i < N; ++i) {
        const double x = input.next();
        out.input_power_sum += x * x;
        const PlantSample& s = plant.push(x);
        const Vector& w_star = schedule.segments()[s.segment].w_star;
        for (std::size_t k = 0; k < runners.size(); ++k) {
            RunTrace& trace = out.algorithms[k];
            if (!trace.ok) {
                continue;
            }
            Runner& r = runners[k];
            trace.msd[i] = (r.state.w - w_star).squaredNorm();
            try {
                double mu = r.filter.mu;
                double rho = r.filter.rho;
                if (r.vp) {
                    const double e = s.d - predict(r.state, s.u);
                    const VpStepResult vr = vp_iteration(*r.vp, r.state, r.filter, s.u, e);
                    r.vp = vr.state;
                    mu = vr.mu;
                    rho = vr.rho;
                    trace.mu[i] = mu;
                    trace.lambda[i] = mu > 0.0 ? rho / mu : 0.0;
                    trace.rho[i] = rho;
                    ++trace.vp_steps;
                    if (!vr.optimum.closed_form) {
                        ++trace.fallbacks;
                    }
                }
                r.state = step(r.state, r.filter, s.u, s.d, mu, rho);
            } catch (const DivergenceError&) {
                trace.ok = false;
            } catch (const ModelError&) {
                trace.ok = false;
            }
        }
    }
    return out;
}

void accumulate(std::vector<double>& total, const std::vector<double>& part) {
    for (std::size_t i = 0; i < part.size(); ++i) {
        total[i] += part[i];
    }
}

} // namespace

PlantSchedule make_schedule(const ExperimentConfig& cfg) {
    return paper_schedule(cfg.stage_length, cfg.iterations);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t workers) {
    cfg.validate();
    const PlantSchedule schedule = make_schedule(cfg);
    const GroupPartition partition = GroupPartition::uniform(cfg.length, cfg.group_size);
    const auto N = static_cast<std::size_t>(cfg.iterations);

    ExperimentResult result;
    result.config = cfg;
    for (const auto& a : cfg.algorithms) {
        LearningCurve c;
        c.name = a.name;
        c.variable = a.variable;
        c.msd.assign(N, 0.0);
        if (a.variable) {
            c.mu.assign(N, 0.0);
            c.lambda.assign(N, 0.0);
            c.rho.assign(N, 0.0);
        }
        result.curves.push_back(std::move(c));
    }

    double power_sum = 0.0;
    for (std::size_t first = 0; first < cfg.runs; first += kRunBatch) {
        const std::size_t count = std::min(kRunBatch, cfg.runs - first);
        std::vector<RunResult> batch(count);
        parallel_for(count, workers,
                     [&](std::size_t i) { batch[i] = simulate_run(cfg, schedule, partition, first + i); });
        for (const RunResult& run : batch) {
            power_sum += run.input_power_sum;
            for (std::size_t k = 0; k < run.algorithms.size(); ++k) {
                const RunTrace& t = run.algorithms[k];
                LearningCurve& c = result.curves[k];
                if (!t.ok) {
                    ++c.diverged;
                    continue;
                }
                ++c.runs_used;
                accumulate(c.msd, t.msd);
                accumulate(c.mu, t.mu);
                accumulate(c.lambda, t.lambda);
                accumulate(c.rho, t.rho);
                c.fallback_steps += t.fallbacks;
                c.vp_steps += t.vp_steps;
            }
        }
    }

    for (LearningCurve& c : result.curves) {
        if (c.runs_used == 0) {
            continue;
        }
        const double inv = 1.0 / static_cast<double>(c.runs_used);
        for (auto* v : {&c.msd, &c.mu, &c.lambda, &c.rho}) {
            for (double& x : *v) {
                x *= inv;
            }
        }
    }
    if (N > 0) {
        result.measured_input_power = power_sum / (static_cast<double>(N) * static_cast<double>(cfg.runs));
    }
    return result;
}

std::vector<LearningCurve> run_single(const ExperimentConfig& cfg, std::size_t run) {
    cfg.validate();
    const PlantSchedule schedule = make_schedule(cfg);
    const GroupPartition partition = GroupPartition::uniform(cfg.length, cfg.group_size);
    RunResult r = simulate_run(cfg, schedule, partition, run);
    std::vector<LearningCurve> out;
    for (std::size_t k = 0; k < cfg.algorithms.size(); ++k) {
        RunTrace& t = r.algorithms[k];
        LearningCurve c;
        c.name = cfg.algorithms[k].name;
        c.variable = cfg.algorithms[k].variable;
        c.runs_used = t.ok ? 1 : 0;
        c.diverged = t.ok ? 0 : 1;
        c.msd = std::move(t.msd);
        c.mu = std::move(t.mu);
        c.lambda = std::move(t.lambda);
        c.rho = std::move(t.rho);
        c.fallback_steps = t.fallbacks;
        c.vp_steps = t.vp_steps;
        out.push_back(std::move(c));
    }
    return out;
}

double to_db(double linear) { return 10.0 * std::log10(linear); }

double window_mean(const std::vector<double>& trace, std::int64_t first, std::int64_t last) {
    if (first < 1 || last < first || static_cast<std::size_t>(last) > trace.size()) {
        throw ParameterError("window_mean: window outside the trace");
    }
    double sum = 0.0;
    for (std::int64_t n = first; n <= last; ++n) {
        sum += trace[static_cast<std::size_t>(n - 1)];
    }
    return sum / static_cast<double>(last - first + 1);
}

double window_max(const std::vector<double>& trace, std::int64_t first, std::int64_t last) {
    if (first < 1 || last < first || static_cast<std::size_t>(last) > trace.size()) {
        throw ParameterError("window_max: window outside the trace");
    }
    double best = trace[static_cast<std::size_t>(first - 1)];
    for (std::int64_t n = first; n <= last; ++n) {
        best = std::max(best, trace[static_cast<std::size_t>(n - 1)]);
    }
    return best;
}

double steady_state_msd(const LearningCurve& curve, const PlantSchedule& schedule, std::size_t segment,
                        std::int64_t window) {
    const std::int64_t last = schedule.segment_end(segment);
    const std::int64_t first = std::max(schedule.segments().at(segment).start, last - window + 1);
    return window_mean(curve.msd, first, last);
}

const LearningCurve& find_curve(const ExperimentResult& result, const std::string& name) {
    for (const auto& c : result.curves) {
        if (c.name == name) {
            return c;
        }
    }
    throw ParameterError("no learning curve named '" + name + "'");
}

} // namespace gslms
