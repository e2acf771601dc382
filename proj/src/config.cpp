#include "gslms/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "gslms/errors.hpp"

namespace gslms {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return fmt::format("{:.17g}", v);
}

class Parser {
public:
    explicit Parser(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(std::size_t line, const std::string& msg) const {
        throw ConfigError(fmt::format("{}:{}: {}", source_, line, msg));
    }

    double to_double(std::size_t line, const std::string& key, const std::string& v) const {
        if (v == "inf") {
            return std::numeric_limits<double>::infinity();
        }
        errno = 0;
        char* end = nullptr;
        const double d = std::strtod(v.c_str(), &end);
        if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
            fail(line, fmt::format("key '{}': '{}' is not a number", key, v));
        }
        return d;
    }

    std::uint64_t to_uint(std::size_t line, const std::string& key, const std::string& v) const {
        errno = 0;
        char* end = nullptr;
        if (v.empty() || v.front() == '-') {
            fail(line, fmt::format("key '{}': '{}' is not a non-negative integer", key, v));
        }
        const unsigned long long u = std::strtoull(v.c_str(), &end, 10);
        if (end != v.c_str() + v.size() || errno == ERANGE) {
            fail(line, fmt::format("key '{}': '{}' is not a non-negative integer", key, v));
        }
        return u;
    }

    bool to_bool(std::size_t line, const std::string& key, const std::string& v) const {
        if (v == "true") {
            return true;
        }
        if (v == "false") {
            return false;
        }
        fail(line, fmt::format("key '{}': expected true or false, got '{}'", key, v));
    }

private:
    std::string source_;
};

void apply_global(const Parser& p, std::size_t line, const std::string& key, const std::string& v,
                  ExperimentConfig& cfg) {
    if (key == "experiment") {
        cfg.experiment = v;
    } else if (key == "runs") {
        cfg.runs = p.to_uint(line, key, v);
    } else if (key == "iterations") {
        cfg.iterations = static_cast<std::int64_t>(p.to_uint(line, key, v));
    } else if (key == "stage_length") {
        cfg.stage_length = static_cast<std::int64_t>(p.to_uint(line, key, v));
    } else if (key == "filter_length") {
        cfg.length = p.to_uint(line, key, v);
    } else if (key == "group_size") {
        cfg.group_size = p.to_uint(line, key, v);
    } else if (key == "epsilon") {
        cfg.epsilon = p.to_double(line, key, v);
    } else if (key == "noise_variance") {
        cfg.sigma_z2 = p.to_double(line, key, v);
    } else if (key == "input") {
        if (v == "white") {
            cfg.input.kind = InputProcess::Kind::WhiteGaussian;
        } else if (v == "ar1-mixture") {
            cfg.input.kind = InputProcess::Kind::AR1GaussianMixture;
        } else {
            p.fail(line, fmt::format("key 'input': expected white or ar1-mixture, got '{}'", v));
        }
    } else if (key == "input_variance") {
        cfg.input.sigma_u2 = p.to_double(line, key, v);
    } else if (key == "ar_alpha") {
        cfg.input.alpha = p.to_double(line, key, v);
    } else if (key == "ar_a") {
        cfg.input.a = p.to_double(line, key, v);
    } else if (key == "ar_sigma_v2") {
        cfg.input.sigma_v2 = p.to_double(line, key, v);
    } else if (key == "vp_input_power") {
        cfg.vp_sigma_u2 = p.to_double(line, key, v);
    } else if (key == "det_tol") {
        cfg.det_tol = p.to_double(line, key, v);
    } else if (key == "master_seed") {
        cfg.master_seed = p.to_uint(line, key, v);
    } else if (key == "output_dir") {
        cfg.output_dir = v;
    } else if (key == "format") {
        cfg.format = v;
    } else {
        p.fail(line, fmt::format("unknown key '{}'", key));
    }
}

void apply_algorithm(const Parser& p, std::size_t line, const std::string& key, const std::string& v,
                     AlgorithmSpec& alg) {
    if (key == "type") {
        if (v == "lms") {
            alg.kind = AlgorithmSpec::Kind::LMS;
        } else if (v == "gza") {
            alg.kind = AlgorithmSpec::Kind::GZA;
        } else if (v == "grza") {
            alg.kind = AlgorithmSpec::Kind::GRZA;
        } else {
            p.fail(line, fmt::format("key 'type': expected lms, gza or grza, got '{}'", v));
        }
    } else if (key == "variable") {
        alg.variable = p.to_bool(line, key, v);
    } else if (key == "mu") {
        alg.mu = p.to_double(line, key, v);
    } else if (key == "rho") {
        alg.rho = p.to_double(line, key, v);
    } else if (key == "gamma") {
        alg.gamma = p.to_double(line, key, v);
    } else if (key == "gamma_prime") {
        alg.gamma_prime = p.to_double(line, key, v);
    } else if (key == "mu_max") {
        if (v == "auto") {
            alg.mu_max.reset();
        } else {
            alg.mu_max = p.to_double(line, key, v);
        }
    } else {
        p.fail(line, fmt::format("unknown algorithm key '{}'", key));
    }
}

} // namespace

const char* to_string(AlgorithmSpec::Kind kind) {
    switch (kind) {
    case AlgorithmSpec::Kind::LMS:
        return "lms";
    case AlgorithmSpec::Kind::GZA:
        return "gza";
    case AlgorithmSpec::Kind::GRZA:
        return "grza";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    const auto fail = [](const std::string& msg) { throw ConfigError("invalid config: " + msg); };
    if (runs < 1) {
        fail("runs must be >= 1");
    }
    if (iterations < 0) {
        fail("iterations must be >= 0");
    }
    if (stage_length < 2) {
        fail("stage_length must be >= 2");
    }
    if (length != 35) {
        fail("filter_length must be 35 (the built-in plant schedule has 35 taps)");
    }
    if (group_size < 1 || group_size > length) {
        fail("group_size must lie in [1, filter_length]");
    }
    if (!(epsilon > 0.0)) {
        fail("epsilon must be > 0");
    }
    if (!(sigma_z2 > 0.0)) {
        fail("noise_variance must be > 0");
    }
    if (!(vp_sigma_u2 > 0.0)) {
        fail("vp_input_power must be > 0");
    }
    if (!(det_tol > 0.0)) {
        fail("det_tol must be > 0");
    }
    if (format != "csv" && format != "json") {
        fail("format must be csv or json");
    }
    try {
        input.validate();
    } catch (const ParameterError& e) {
        fail(e.what());
    }
    if (algorithms.empty()) {
        fail("at least one [algorithm] section is required");
    }
    std::set<std::string> names;
    for (const auto& a : algorithms) {
        if (a.name.empty() || a.name.find_first_of("/\\ \t") != std::string::npos) {
            fail("algorithm names must be non-empty and contain no spaces or slashes");
        }
        if (!names.insert(a.name).second) {
            fail("duplicate algorithm name '" + a.name + "'");
        }
        if (!(a.mu >= 0.0) || !(a.rho >= 0.0)) {
            fail("algorithm '" + a.name + "': mu and rho must be >= 0");
        }
        if (!(a.gamma >= 0.0 && a.gamma < 1.0) || !(a.gamma_prime >= 0.0 && a.gamma_prime < 1.0)) {
            fail("algorithm '" + a.name + "': gamma and gamma_prime must lie in [0, 1)");
        }
        if (a.mu_max && !(*a.mu_max > 0.0)) {
            fail("algorithm '" + a.name + "': mu_max must be > 0");
        }
    }
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    Parser p(source);
    ExperimentConfig cfg;
    cfg.algorithms.clear();
    std::set<std::string> seen_global;
    std::set<std::string> seen_alg;
    AlgorithmSpec* current = nullptr;

    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) {
            continue;
        }
        if (s.front() == '[') {
            if (s.back() != ']') {
                p.fail(line, "unterminated section header");
            }
            const std::string inner = trim(s.substr(1, s.size() - 2));
            const std::string tag = "algorithm";
            if (inner.compare(0, tag.size(), tag) != 0) {
                p.fail(line, fmt::format("unknown section '{}'", inner));
            }
            const std::string name = trim(inner.substr(tag.size()));
            if (name.empty() || inner.size() == tag.size() || !std::isspace(static_cast<unsigned char>(inner[tag.size()]))) {
                p.fail(line, "section header must read [algorithm NAME]");
            }
            cfg.algorithms.push_back(AlgorithmSpec{});
            current = &cfg.algorithms.back();
            current->name = name;
            seen_alg.clear();
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            p.fail(line, fmt::format("expected 'key = value', got '{}'", s));
        }
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) {
            p.fail(line, "missing key");
        }
        if (current == nullptr) {
            if (!seen_global.insert(key).second) {
                p.fail(line, fmt::format("duplicate key '{}'", key));
            }
            apply_global(p, line, key, value, cfg);
        } else {
            if (!seen_alg.insert(key).second) {
                p.fail(line, fmt::format("duplicate key '{}' in [algorithm {}]", key, current->name));
            }
            apply_algorithm(p, line, key, value, *current);
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path.string() + "': file not found or unreadable");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

std::string to_config_text(const ExperimentConfig& cfg) {
    std::string out;
    const auto kv = [&out](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
    kv("experiment", cfg.experiment);
    kv("runs", std::to_string(cfg.runs));
    kv("iterations", std::to_string(cfg.iterations));
    kv("stage_length", std::to_string(cfg.stage_length));
    kv("filter_length", std::to_string(cfg.length));
    kv("group_size", std::to_string(cfg.group_size));
    kv("epsilon", fmt_double(cfg.epsilon));
    kv("noise_variance", fmt_double(cfg.sigma_z2));
    kv("input", cfg.input.kind == InputProcess::Kind::WhiteGaussian ? "white" : "ar1-mixture");
    kv("input_variance", fmt_double(cfg.input.sigma_u2));
    kv("ar_alpha", fmt_double(cfg.input.alpha));
    kv("ar_a", fmt_double(cfg.input.a));
    kv("ar_sigma_v2", fmt_double(cfg.input.sigma_v2));
    kv("vp_input_power", fmt_double(cfg.vp_sigma_u2));
    kv("det_tol", fmt_double(cfg.det_tol));
    kv("master_seed", std::to_string(cfg.master_seed));
    if (!cfg.output_dir.empty()) {
        kv("output_dir", cfg.output_dir);
    }
    kv("format", cfg.format);
    for (const auto& a : cfg.algorithms) {
        out += "\n[algorithm " + a.name + "]\n";
        kv("type", to_string(a.kind));
        kv("variable", a.variable ? "true" : "false");
        kv("mu", fmt_double(a.mu));
        kv("rho", fmt_double(a.rho));
        kv("gamma", fmt_double(a.gamma));
        kv("gamma_prime", fmt_double(a.gamma_prime));
        kv("mu_max", a.mu_max ? fmt_double(*a.mu_max) : "auto");
    }
    return out;
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg) {
    if (!cfg.output_dir.empty()) {
        return cfg.output_dir;
    }
    if (const char* env = std::getenv("GSLMS_OUTPUT_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return "results";
}

std::string config_hash(const ExperimentConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : to_config_text(cfg)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

} // namespace gslms
