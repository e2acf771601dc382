#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gslms/experiment.hpp"

namespace gslms {

/// Writes one file per algorithm (`<name>.csv` or `<name>.json`), plus
/// `manifest.json` and `plants.csv`, into `dir`. Returns the written paths.
/// CSV columns: iter,msd_linear,msd_db[,mu,lambda].
std::vector<std::filesystem::path> emit_curves(const ExperimentResult& result, const std::filesystem::path& dir,
                                               const std::string& format);

/// Parses a curve CSV written by emit_curves. The curve name is the file stem.
LearningCurve read_curve_csv(const std::filesystem::path& path);

/// Manifest text (JSON) for `result`; independent of the output directory.
std::string manifest_json(const ExperimentResult& result);

} // namespace gslms
