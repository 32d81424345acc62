#pragma once

#include <string>
#include <vector>

#include "istab/config.hpp"

namespace istab::cli {

// Subcommand drivers shared by the CLI and the tests. Each writes its report
// files under cfg.out_dir (atomically: temp file + rename) and returns the
// paths written.
std::vector<std::string> run_simulate(const RunConfig& cfg);
std::vector<std::string> run_check(const RunConfig& cfg);
std::vector<std::string> run_decay(const RunConfig& cfg);
std::vector<std::string> run_interp(const RunConfig& cfg);
std::vector<std::string> run_compat(const RunConfig& cfg);
std::vector<std::string> run_gallery(const RunConfig& cfg);
std::vector<std::string> run_nostab(const RunConfig& cfg);

}  // namespace istab::cli
