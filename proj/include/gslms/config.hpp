#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gslms/signal.hpp"

namespace gslms {

/// One algorithm in an experiment. Fixed-parameter runs use (mu, rho);
/// variable-parameter runs use the smoothing/clamp settings instead.
struct AlgorithmSpec {
    enum class Kind { LMS, GZA, GRZA };

    std::string name;
    Kind kind = Kind::LMS;
    bool variable = false;
    double mu = 0.01;
    double rho = 0.0;
    double gamma = 0.5;
    double gamma_prime = 0.95;
    std::optional<double> mu_max;  ///< empty: 2 / (3 sigma_u^2 L)

    friend bool operator==(const AlgorithmSpec&, const AlgorithmSpec&) = default;
};

const char* to_string(AlgorithmSpec::Kind kind);

struct ExperimentConfig {
    std::string experiment = "custom";
    std::size_t runs = 100;
    std::int64_t iterations = 24000;
    std::int64_t stage_length = 8000;
    std::size_t length = 35;
    std::size_t group_size = 5;
    double epsilon = 0.1;
    double sigma_z2 = 0.01;
    InputProcess input = InputProcess::white(1.0);
    double vp_sigma_u2 = 1.0;  ///< input power handed to the variable-parameter engine
    double det_tol = 1e-10;
    std::uint64_t master_seed = 1;
    std::string output_dir;  ///< empty: $GSLMS_OUTPUT_DIR, then "results"
    std::string format = "csv";
    std::vector<AlgorithmSpec> algorithms;

    /// Throws ConfigError describing the first violated constraint.
    void validate() const;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses the key = value format (see configs/). Unknown or repeated keys are
/// errors; every key not present keeps its default.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Serialises every field so that parse_config(to_config_text(c)) == c.
std::string to_config_text(const ExperimentConfig& cfg);

/// Built-in reproductions of the two reference experiments.
ExperimentConfig paper_exp1_config();
ExperimentConfig paper_exp2_config();

/// Output directory after applying the config value and $GSLMS_OUTPUT_DIR.
std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg);

/// FNV-1a of the canonical config text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

} // namespace gslms
