#include "gslms/output.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include "json.hpp"

#include "gslms/errors.hpp"
#include "gslms/signal.hpp"
#include "gslms/version.hpp"
#include "gslms/vp_engine.hpp"

namespace gslms {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_for_write(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    return out;
}

void finish(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) {
        throw std::runtime_error("write failed for '" + path.string() + "'");
    }
}

// Output must not depend on where it is written.
ExperimentConfig portable(ExperimentConfig cfg) {
    cfg.output_dir.clear();
    return cfg;
}

json curve_metadata(const ExperimentResult& result, const LearningCurve& c) {
    const ExperimentConfig cfg = portable(result.config);
    json meta = {
        {"experiment", cfg.experiment},
        {"config_hash", config_hash(cfg)},
        {"master_seed", cfg.master_seed},
        {"measured_input_power", result.measured_input_power},
        {"runs_used", c.runs_used},
        {"diverged", c.diverged},
        {"variable", c.variable},
    };
    for (const auto& a : cfg.algorithms) {
        if (a.name != c.name) {
            continue;
        }
        meta["type"] = to_string(a.kind);
        if (a.variable) {
            meta["gamma"] = a.gamma;
            meta["gamma_prime"] = a.gamma_prime;
            meta["mu_max"] = a.mu_max ? *a.mu_max : VpConfig::default_mu_max(cfg.vp_sigma_u2, cfg.length);
            meta["fallback_steps"] = c.fallback_steps;
            meta["vp_steps"] = c.vp_steps;
        } else {
            meta["mu"] = a.mu;
            meta["rho"] = a.rho;
        }
    }
    return meta;
}

void write_csv(const fs::path& path, const LearningCurve& c) {
    auto out = open_for_write(path);
    const bool vp = !c.mu.empty();
    std::string buf = vp ? "iter,msd_linear,msd_db,mu,lambda\n" : "iter,msd_linear,msd_db\n";
    for (std::size_t i = 0; i < c.msd.size(); ++i) {
        if (vp) {
            buf += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g}\n", i + 1, c.msd[i], to_db(c.msd[i]), c.mu[i],
                               c.lambda[i]);
        } else {
            buf += fmt::format("{},{:.17g},{:.17g}\n", i + 1, c.msd[i], to_db(c.msd[i]));
        }
    }
    out << buf;
    finish(out, path);
}

void write_json(const fs::path& path, const ExperimentResult& result, const LearningCurve& c) {
    json j;
    j["name"] = c.name;
    j["metadata"] = curve_metadata(result, c);
    std::vector<std::size_t> iter(c.msd.size());
    std::vector<double> db(c.msd.size());
    for (std::size_t i = 0; i < c.msd.size(); ++i) {
        iter[i] = i + 1;
        db[i] = to_db(c.msd[i]);
    }
    j["iter"] = iter;
    j["msd_linear"] = c.msd;
    j["msd_db"] = db;
    if (!c.mu.empty()) {
        j["mu"] = c.mu;
        j["lambda"] = c.lambda;
    }
    auto out = open_for_write(path);
    out << j.dump(1) << '\n';
    finish(out, path);
}

double parse_field(const std::string& field, const fs::path& path, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        if (used != field.size()) {
            throw std::invalid_argument(field);
        }
        return v;
    } catch (const std::out_of_range&) {
        // std::stod rejects denormals; the text is still a valid number.
        return std::strtod(field.c_str(), nullptr);
    } catch (const std::invalid_argument&) {
        throw std::runtime_error(fmt::format("{}:{}: bad number '{}'", path.string(), line, field));
    }
}

} // namespace

std::string manifest_json(const ExperimentResult& result) {
    const ExperimentConfig cfg = portable(result.config);
    json m;
    m["software"] = {{"name", "gslms"}, {"version", kVersion}};
    m["experiment"] = cfg.experiment;
    m["config_hash"] = config_hash(cfg);
    m["config_text"] = to_config_text(cfg);
    m["master_seed"] = cfg.master_seed;
    m["seed_derivation"] = "derive_seed(master_seed, run, stream); stream 0 = input, stream 1 = noise";
    json seeds = json::array();
    for (std::size_t r = 0; r < cfg.runs; ++r) {
        seeds.push_back({{"run", r},
                         {"input_seed", derive_seed(cfg.master_seed, r, 0)},
                         {"noise_seed", derive_seed(cfg.master_seed, r, 1)}});
    }
    m["run_seeds"] = seeds;
    m["measured_input_power"] = result.measured_input_power;
    m["input_stationary_variance"] = cfg.input.stationary_variance();
    json curves = json::array();
    const PlantSchedule schedule = make_schedule(cfg);
    for (const auto& c : result.curves) {
        json entry = curve_metadata(result, c);
        entry["name"] = c.name;
        json ss = json::array();
        if (c.runs_used > 0) {
            for (std::size_t k = 0; k < schedule.segments().size(); ++k) {
                if (schedule.segments()[k].start <= cfg.iterations) {
                    ss.push_back(to_db(steady_state_msd(c, schedule, k)));
                }
            }
        }
        entry["steady_state_msd_db"] = ss;
        curves.push_back(entry);
    }
    m["curves"] = curves;
    return m.dump(1);
}

std::vector<fs::path> emit_curves(const ExperimentResult& result, const fs::path& dir, const std::string& format) {
    if (result.curves.empty()) {
        throw ParameterError("emit_curves: no curves to write");
    }
    if (format != "csv" && format != "json") {
        throw ParameterError("emit_curves: format must be csv or json");
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
    }
    std::vector<fs::path> written;
    for (const auto& c : result.curves) {
        const fs::path path = dir / (c.name + "." + format);
        if (format == "csv") {
            write_csv(path, c);
        } else {
            write_json(path, result, c);
        }
        written.push_back(path);
    }
    const fs::path manifest = dir / "manifest.json";
    {
        auto out = open_for_write(manifest);
        out << manifest_json(result) << '\n';
        finish(out, manifest);
    }
    written.push_back(manifest);

    const fs::path plants = dir / "plants.csv";
    std::vector<Vector> vectors;
    const PlantSchedule schedule = make_schedule(result.config);
    for (const auto& s : schedule.segments()) {
        vectors.push_back(s.w_star);
    }
    write_plants_csv(plants, vectors);
    written.push_back(plants);
    return written;
}

LearningCurve read_curve_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() + "'");
    }
    LearningCurve c;
    c.name = path.stem().string();
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error(path.string() + ": empty file");
    }
    bool vp = false;
    if (line == "iter,msd_linear,msd_db,mu,lambda") {
        vp = true;
    } else if (line != "iter,msd_linear,msd_db") {
        throw std::runtime_error(path.string() + ": unexpected header '" + line + "'");
    }
    c.variable = vp;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) {
            fields.push_back(f);
        }
        if (fields.size() != (vp ? 5u : 3u)) {
            throw std::runtime_error(fmt::format("{}:{}: expected {} fields", path.string(), lineno, vp ? 5 : 3));
        }
        c.msd.push_back(parse_field(fields[1], path, lineno));
        if (vp) {
            c.mu.push_back(parse_field(fields[3], path, lineno));
            c.lambda.push_back(parse_field(fields[4], path, lineno));
        }
    }
    return c;
}

} // namespace gslms
