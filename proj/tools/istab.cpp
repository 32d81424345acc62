#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "istab/config.hpp"
#include "istab/presets.hpp"
#include "istab/runner.hpp"

namespace {

struct Flags {
    std::string preset;
    std::string config_path;
    std::string out;
    int n = 0;
    double t_end = 0.0;
    double alpha_frac = 0.0;
    int m = -1;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--preset", f.preset, "preset id (see `istab list`)");
    sub->add_option("--n", f.n, "grid points per component, 8..512");
    sub->add_option("--T", f.t_end, "time horizon");
    sub->add_option("--alpha-frac", f.alpha_frac,
                    "coupling strength as a fraction of alpha_max, in (0,1)");
    sub->add_option("--m", f.m, "smoothness of the prepared initial data");
    sub->add_option("--seed", f.seed, "random seed");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--config", f.config_path, "config file (key = value, flags win)");
}

istab::RunConfig make_config(const CLI::App* sub, const Flags& f) {
    istab::RunConfig cfg;
    if (sub->count("--config") > 0)
        istab::apply_config_values(istab::parse_config_file(f.config_path), cfg);
    if (sub->count("--preset") > 0) cfg.preset = f.preset;
    if (sub->count("--n") > 0) cfg.n = f.n;
    if (sub->count("--T") > 0) cfg.t_end = f.t_end;
    if (sub->count("--alpha-frac") > 0) cfg.alpha_frac = f.alpha_frac;
    if (sub->count("--m") > 0) cfg.smoothness = f.m;
    if (sub->count("--seed") > 0) cfg.seed = f.seed;
    if (sub->count("--out") > 0) cfg.out_dir = f.out;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coupled damped evolution systems: simulation and verification"};
    app.require_subcommand(1);

    Flags flags;
    using Runner = std::vector<std::string> (*)(const istab::RunConfig&);
    struct Sub {
        const char* name;
        const char* help;
        Runner runner;
    };
    const Sub subs[] = {
        {"simulate", "evolve a preset and write the energy trace CSV", istab::cli::run_simulate},
        {"check", "hypotheses report for a preset", istab::cli::run_check},
        {"decay", "decay-rate fit, bound constants and the integral-inequality curve",
         istab::cli::run_decay},
        {"interp", "interpolation-norm identities for the preset operators",
         istab::cli::run_interp},
        {"compat", "compatibility-norm ladder over grid sizes", istab::cli::run_compat},
        {"gallery", "run every preset and write a summary table", istab::cli::run_gallery},
        {"nostab", "conservation probe for the one-way-coupling preset",
         istab::cli::run_nostab},
    };
    for (const Sub& s : subs) add_common(app.add_subcommand(s.name, s.help), flags);

    CLI::App* list = app.add_subcommand("list", "list available presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const istab::Preset& p : istab::preset_catalog())
                std::cout << p.id << "  -  " << p.title << "\n";
            return 0;
        }
        for (const Sub& s : subs) {
            CLI::App* sub = app.get_subcommand(s.name);
            if (sub->parsed()) {
                const istab::RunConfig cfg = make_config(sub, flags);
                const std::vector<std::string> files = s.runner(cfg);
                for (const std::string& f : files) std::cout << "wrote " << f << "\n";
                return 0;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
