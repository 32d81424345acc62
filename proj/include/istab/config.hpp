#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace istab {

// Run parameters: file values first, command-line flags win.
struct RunConfig {
    std::string preset = "is";
    int n = 0;                // 0: preset default
    double t_end = 0.0;       // 0: preset default
    double alpha_frac = 0.0;  // 0: preset default
    int smoothness = -1;      // -1: preset default
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";

    void validate() const;  // n in [8,512], T in (0,1e4], alpha_frac in (0,1)
};

// Flat `key = value` format; `[section]` headers group keys but do not change
// their meaning. '#' starts a comment. Throws with the offending line number.
std::map<std::string, std::string> parse_config_file(const std::string& path);

// Applies recognized keys (preset, n, T, alpha-frac, m, seed, out) to `cfg`.
void apply_config_values(const std::map<std::string, std::string>& values, RunConfig& cfg);

}  // namespace istab
