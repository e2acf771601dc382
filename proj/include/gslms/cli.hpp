#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gslms {

/// Entry point of the `gslms` tool. Subcommands: run, paper-exp1, paper-exp2,
/// validate-model, show-config, calibrate, export-plants.
int cli_main(int argc, char** argv);

/// Same, with explicit arguments (excluding the program name) and streams.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace gslms
