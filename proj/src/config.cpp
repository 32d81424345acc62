#include "istab/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace istab {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail_line(const std::string& path, int line, const std::string& what) {
    std::ostringstream msg;
    msg << path << ":" << line << ": " << what;
    throw std::invalid_argument(msg.str());
}

}  // namespace

void RunConfig::validate() const {
    if (n != 0 && (n < 8 || n > 512))
        throw std::invalid_argument("config: n must lie in [8, 512]");
    if (t_end != 0.0 && !(t_end > 0.0 && t_end <= 1e4))
        throw std::invalid_argument("config: T must lie in (0, 1e4]");
    if (alpha_frac != 0.0 && !(alpha_frac > 0.0 && alpha_frac < 1.0))
        throw std::invalid_argument(
            "config: alpha-frac must lie in (0, 1), otherwise (H3) fails");
    if (smoothness < -1 || smoothness > 64)
        throw std::invalid_argument("config: m must lie in [0, 64]");
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::map<std::string, std::string> values;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail_line(path, lineno, "unterminated section header");
            continue;  // sections only group keys
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail_line(path, lineno, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) fail_line(path, lineno, "empty key or value");
        values[key] = value;
    }
    return values;
}

namespace {

template <class F>
auto parse_or_fail(const F& f, const std::string& key, const std::string& value) {
    try {
        return f(value);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad value for key '" + key + "': " + value);
    }
}

}  // namespace

void apply_config_values(const std::map<std::string, std::string>& values, RunConfig& cfg) {
    auto to_int = [](const std::string& v) { return std::stoi(v); };
    auto to_double = [](const std::string& v) { return std::stod(v); };
    auto to_u64 = [](const std::string& v) { return std::stoull(v); };
    for (const auto& [key, value] : values) {
        if (key == "preset") {
            cfg.preset = value;
        } else if (key == "n") {
            cfg.n = parse_or_fail(to_int, key, value);
        } else if (key == "T" || key == "t") {
            cfg.t_end = parse_or_fail(to_double, key, value);
        } else if (key == "alpha-frac" || key == "alpha_frac") {
            cfg.alpha_frac = parse_or_fail(to_double, key, value);
        } else if (key == "m") {
            cfg.smoothness = parse_or_fail(to_int, key, value);
        } else if (key == "seed") {
            cfg.seed = parse_or_fail(to_u64, key, value);
        } else if (key == "out") {
            cfg.out_dir = value;
        } else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
}

}  // namespace istab
