#include "gslms/cli.hpp"

#include <chrono>
#include <iostream>
#include <optional>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "gslms/calibration.hpp"
#include "gslms/config.hpp"
#include "gslms/errors.hpp"
#include "gslms/experiment.hpp"
#include "gslms/oracle.hpp"
#include "gslms/output.hpp"
#include "gslms/version.hpp"

namespace gslms {

namespace {

struct Overrides {
    std::optional<std::size_t> runs;
    std::optional<std::int64_t> iterations;
    std::optional<std::int64_t> stage_length;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output;
    std::optional<std::string> format;
    std::size_t workers = 0;

    void attach(CLI::App* app, bool with_output = true) {
        app->add_option("--runs", runs, "Monte-Carlo runs");
        app->add_option("--iterations", iterations, "iterations per run");
        app->add_option("--stage-length", stage_length, "iterations between plant switches");
        app->add_option("--seed", seed, "master seed");
        if (with_output) {
            app->add_option("--output,-o", output, "output directory (overrides $GSLMS_OUTPUT_DIR)");
            app->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        }
        app->add_option("--workers,-j", workers, "worker threads (0 = all cores)");
    }

    void apply(ExperimentConfig& cfg) const {
        if (runs) {
            cfg.runs = *runs;
        }
        if (iterations) {
            cfg.iterations = *iterations;
        }
        if (stage_length) {
            cfg.stage_length = *stage_length;
            if (!iterations) {
                cfg.iterations = 3 * *stage_length;
            }
        }
        if (seed) {
            cfg.master_seed = *seed;
        }
        if (output) {
            cfg.output_dir = *output;
        }
        if (format) {
            cfg.format = *format;
        }
        cfg.validate();
    }
};

ExperimentConfig config_from_source(const std::string& source) {
    if (source == "paper-exp1") {
        return paper_exp1_config();
    }
    if (source == "paper-exp2") {
        return paper_exp2_config();
    }
    return load_config(source);
}

int execute(const ExperimentConfig& cfg, std::size_t workers, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const ExperimentResult result = run_experiment(cfg, workers);
    const auto dir = resolve_output_dir(cfg);
    const auto files = emit_curves(result, dir, cfg.format);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    out << fmt::format("{}: {} runs x {} iterations in {:.1f} s, measured input power {:.4f}\n", cfg.experiment,
                       cfg.runs, cfg.iterations, seconds, result.measured_input_power);
    const PlantSchedule schedule = make_schedule(cfg);
    out << fmt::format("{:<14} {:>8}", "algorithm", "diverged");
    for (std::size_t k = 0; k < schedule.segments().size(); ++k) {
        if (schedule.segments()[k].start <= cfg.iterations) {
            out << fmt::format(" {:>12}", fmt::format("stage{} [dB]", k + 1));
        }
    }
    out << '\n';
    for (const auto& c : result.curves) {
        out << fmt::format("{:<14} {:>8}", c.name, c.diverged);
        for (std::size_t k = 0; k < schedule.segments().size(); ++k) {
            if (schedule.segments()[k].start <= cfg.iterations) {
                out << fmt::format(" {:>12.2f}", c.runs_used ? to_db(steady_state_msd(c, schedule, k)) : 0.0);
            }
        }
        out << '\n';
    }
    out << fmt::format("wrote {} files to {}\n", files.size(), dir.string());
    return 0;
}

void print_validation(const oracle::ValidationReport& report, bool as_json, std::ostream& out) {
    if (as_json) {
        nlohmann::json j;
        for (const auto& c : report.checks) {
            j["checks"].push_back(
                {{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold},
                 {"detail", c.detail}});
        }
        for (const auto* rec : {&report.lms_recursion, &report.grza_recursion}) {
            nlohmann::json pts = nlohmann::json::array();
            for (const auto& p : rec->points) {
                pts.push_back({{"n", p.n},
                               {"msd", p.msd},
                               {"increment", p.increment},
                               {"model_increment", p.model_increment},
                               {"relative_deviation", p.relative_deviation}});
            }
            j[rec == &report.lms_recursion ? "lms_recursion" : "grza_recursion"] = pts;
        }
        j["all_passed"] = report.all_passed();
        out << j.dump(1) << '\n';
        return;
    }
    for (const auto& c : report.checks) {
        out << fmt::format("[{}] {:<30} value={:.4g} bound={:.4g}  {}\n", c.passed ? "PASS" : "FAIL", c.name,
                           c.value, c.threshold, c.detail);
    }
    out << (report.all_passed() ? "all model checks passed\n" : "model validation FAILED\n");
}

} // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Group-sparse zero-attracting LMS with variable parameters: simulator and model checks", "gslms"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    Overrides run_ov;
    std::string config_path;
    auto* run = app.add_subcommand("run", "run the experiment described by a config file");
    run->add_option("config", config_path, "config file")->required();
    run_ov.attach(run);

    Overrides exp1_ov;
    auto* exp1 = app.add_subcommand("paper-exp1", "white Gaussian input, three-stage plant");
    exp1_ov.attach(exp1);
    Overrides exp2_ov;
    auto* exp2 = app.add_subcommand("paper-exp2", "AR(1) Gaussian-mixture input, three-stage plant");
    exp2_ov.attach(exp2);

    Overrides show_ov;
    std::string show_source = "paper-exp1";
    auto* show = app.add_subcommand("show-config", "print the fully resolved config");
    show->add_option("source", show_source, "paper-exp1, paper-exp2 or a config file");
    show_ov.attach(show);

    oracle::ValidationOptions vopt;
    std::string vformat = "text";
    auto* validate = app.add_subcommand("validate-model", "oracle checks of the transient model");
    validate->add_option("--ensemble", vopt.ensemble, "ensemble size for the recursion check");
    validate->add_option("--horizon", vopt.horizon, "iterations checked");
    validate->add_option("--mu", vopt.mu, "fixed step size");
    validate->add_option("--rho", vopt.rho_grza, "fixed shrinkage for the GRZA check");
    validate->add_option("--tolerance", vopt.tolerance, "max relative deviation");
    validate->add_option("--tuples", vopt.tuples, "random tuples for the grid check");
    validate->add_option("--grid", vopt.grid, "grid points per axis");
    validate->add_option("--seed", vopt.seed, "seed");
    validate->add_option("--workers,-j", vopt.workers, "worker threads (0 = all cores)");
    validate->add_option("--format", vformat, "text or json")->check(CLI::IsMember({"text", "json"}));

    Overrides cal_ov;
    std::string cal_source = "paper-exp1";
    CalibrationOptions cal_opt;
    auto* calibrate = app.add_subcommand("calibrate", "match fixed-parameter step sizes to the VP initial slope");
    calibrate->add_option("source", cal_source, "paper-exp1, paper-exp2 or a config file");
    calibrate->add_option("--calibration-runs", cal_opt.runs, "runs used for matching");
    cal_ov.attach(calibrate, false);

    std::string plants_path;
    auto* plants = app.add_subcommand("export-plants", "write the three plant vectors as CSV");
    plants->add_option("path", plants_path, "output CSV")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "gslms: " << e.what() << '\n' << "run 'gslms --help' for usage\n";
        return 2;
    }

    try {
        if (*run) {
            ExperimentConfig cfg = load_config(config_path);
            run_ov.apply(cfg);
            return execute(cfg, run_ov.workers, out);
        }
        if (*exp1) {
            ExperimentConfig cfg = paper_exp1_config();
            exp1_ov.apply(cfg);
            return execute(cfg, exp1_ov.workers, out);
        }
        if (*exp2) {
            ExperimentConfig cfg = paper_exp2_config();
            exp2_ov.apply(cfg);
            return execute(cfg, exp2_ov.workers, out);
        }
        if (*show) {
            ExperimentConfig cfg = config_from_source(show_source);
            show_ov.apply(cfg);
            out << to_config_text(cfg);
            return 0;
        }
        if (*validate) {
            const auto report = oracle::run_validation(vopt);
            print_validation(report, vformat == "json", out);
            return report.all_passed() ? 0 : 1;
        }
        if (*calibrate) {
            ExperimentConfig cfg = config_from_source(cal_source);
            cal_ov.apply(cfg);
            cal_opt.workers = cal_ov.workers;
            const auto entries = calibrate_fixed_parameters(cfg, cal_opt);
            for (const auto& e : entries) {
                out << fmt::format("# {}: matched to {} over iterations {}-{}: target {:.3f} dB, achieved {:.3f} dB, "
                                   "lambda {}, stage-1 steady state {:.2f} dB\n",
                                   e.name, e.reference, cal_opt.window_first, cal_opt.window_last, e.target_db,
                                   e.achieved_db, e.lambda, e.steady_db);
            }
            out << to_config_text(apply_calibration(cfg, entries));
            return 0;
        }
        if (*plants) {
            const auto p = paper_plants();
            write_plants_csv(plants_path, {p[0], p[1], p[2]});
            out << "wrote " << plants_path << '\n';
            return 0;
        }
    } catch (const ConfigError& e) {
        err << "gslms: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "gslms: error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return cli_main(args, std::cout, std::cerr);
}

} // namespace gslms
