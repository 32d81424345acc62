#include "istab/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "istab/analysis.hpp"
#include "istab/evolution.hpp"
#include "istab/presets.hpp"
#include "istab/random.hpp"

namespace istab::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Resolved {
    Preset preset;
    int n = 0;
    double t_end = 0.0;
    double alpha_frac = 0.0;
    int m = 0;
    std::uint64_t seed = 0;
    fs::path out;
};

Resolved resolve(const RunConfig& cfg) {
    cfg.validate();
    Resolved r;
    r.preset = preset_by_id(cfg.preset);
    r.n = cfg.n != 0 ? cfg.n : r.preset.default_n;
    r.t_end = cfg.t_end != 0.0 ? cfg.t_end : r.preset.default_t;
    r.alpha_frac = cfg.alpha_frac != 0.0 ? cfg.alpha_frac : r.preset.default_alpha_frac;
    r.m = cfg.smoothness >= 0 ? cfg.smoothness : r.preset.default_m;
    r.seed = cfg.seed.value_or(r.preset.default_seed);
    r.out = cfg.out_dir;
    fs::create_directories(r.out);
    return r;
}

void atomic_write(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + tmp.string());
        os << content;
    }
    fs::rename(tmp, path);
}

json run_meta(const Resolved& r) {
    return json{{"preset", r.preset.id},       {"title", r.preset.title},
                {"n", r.n},                    {"T", r.t_end},
                {"alpha_frac", r.alpha_frac},  {"m", r.m},
                {"seed", r.seed},              {"diagnostic", r.preset.one_way},
                {"approximate_realization", r.preset.approximate}};
}

json hypotheses_json(const HypothesesReport& rep) {
    json j{{"omega1", rep.omega1},
           {"omega2", rep.omega2},
           {"beta", rep.beta},
           {"alpha1", rep.alpha1},
           {"alpha2", rep.alpha2},
           {"alpha_ok", rep.alpha_ok},
           {"alpha_margin", rep.alpha_margin},
           {"nu_alpha", rep.nu_alpha},
           {"kappa_half", rep.kappa_half}};
    json kj = json::object();
    for (const auto& [k, v] : rep.kappa_j) kj[std::to_string(k)] = v;
    j["kappa_j"] = kj;
    if (!rep.ladder.empty()) {
        json ladder = json::object();
        for (const KappaRow& row : rep.ladder) {
            json jr{{"kappa_half", row.kappa_half}};
            for (const auto& [k, v] : row.kappa_j) jr["kappa_" + std::to_string(k)] = v;
            ladder[std::to_string(row.n)] = jr;
        }
        j["ladder"] = ladder;
        j["thetab_bounded"] = rep.thetab_bounded;
        j["theta2a_violated"] = rep.theta2a_violated;
        j["classification"] = rep.classification;
    }
    return j;
}

std::string kappa_csv(const HypothesesReport& rep) {
    std::ostringstream os;
    os << "n,kappa_half,kappa_2,kappa_3,kappa_4\n";
    char line[256];
    for (const KappaRow& row : rep.ladder) {
        std::snprintf(line, sizeof(line), "%d,%.17g,%.17g,%.17g,%.17g\n", row.n,
                      row.kappa_half, row.kappa_j.at(2), row.kappa_j.at(3),
                      row.kappa_j.at(4));
        os << line;
    }
    return os.str();
}

json instance_bound_json(const Preset& preset, int n, double alpha_max) {
    json j{{"enforced_alpha_max", alpha_max}};
    if (preset.bound != InstanceBound::None) {
        j["paper_form"] = instance_bound_formula(preset.bound);
        j["paper_value"] = instance_bound_value(preset, n);
    }
    return j;
}

// probe data for the one-way preset: u-data in the first eigenspace, v-data a
// seeded mix of the next eigenvectors
State one_way_probe_state(const SelfAdjointOperator& a, std::uint64_t seed) {
    const int n = a.dim();
    NormalGen gen(seed);
    State s = State::zero(n);
    const Matrix& vecs = a.eigenvectors();
    const double cu = gen(), cp = gen();
    for (int i = 0; i < n; ++i) {
        s.u[i] = cu * vecs(i, 0);
        s.p[i] = cp * vecs(i, 0);
    }
    for (int k = 1; k <= std::min(4, n - 1); ++k) {
        const double cv = gen(), cq = gen();
        for (int i = 0; i < n; ++i) {
            s.v[i] += cv * vecs(i, k);
            s.q[i] += cq * vecs(i, k);
        }
    }
    return s;
}

struct GalleryRow {
    std::string preset;
    int n = 0;
    double alpha = 0.0;
    std::string kappa_class;
    double residual = 0.0;
    double fit_r = 0.0;
    double bound_c = 0.0;
};

GalleryRow gallery_row(const Preset& preset, int n, double t_end) {
    GalleryRow row;
    row.preset = preset.id;
    row.n = n;

    const std::vector<int> ladder = {32, 64, 128};
    const ops1d::OperatorSpec s1 = ops1d::spec_from_name(preset.a1, n, preset.a1_shift);
    const ops1d::OperatorSpec s2 = ops1d::spec_from_name(preset.a2, n, preset.a2_shift);
    const HypothesesReport kappa = kappa_ladder(s1, s2, ladder);
    row.kappa_class = kappa.classification;

    CoupledSystem sys = build_system(preset, n, preset.default_alpha_frac);
    row.alpha = sys.alpha1();

    if (preset.one_way) {
        const State probe_state = one_way_probe_state(sys.a2(), preset.default_seed);
        const ConservationProbe probe = conservation_probe(
            sys.a2(), preset.beta, sys.alpha2(), probe_state,
            uniform_times(t_end, 200));
        row.alpha = sys.alpha2();
        row.residual = probe.drift;
        return row;
    }

    const State u0 = sys.prepared_state(preset.default_m, preset.default_seed);
    const Trajectory traj = evolve_exact(sys, u0, decay_times(t_end, 200, 48));
    const EnergyTrace trace = energy_trace(sys, traj);
    for (double r : trace.residual) row.residual = std::max(row.residual, r);
    row.fit_r = analysis::fit_decay_rate(trace, t_end / 10.0, t_end).exponent;
    row.bound_c = analysis::decay_bound_constant(
        trace, analysis::initial_norm_sq(sys, u0, analysis::DecayNorm::GraphDomain, 1, 0.5),
        preset.predicted_r);
    return row;
}

}  // namespace

std::vector<std::string> run_simulate(const RunConfig& cfg) {
    const Resolved r = resolve(cfg);
    CoupledSystem sys = build_system(r.preset, r.n, r.alpha_frac);
    const State u0 = sys.prepared_state(r.m, r.seed);
    const Trajectory traj = evolve_exact(sys, u0, uniform_times(r.t_end, 400));
    const EnergyTrace trace = energy_trace(sys, traj);

    std::ostringstream csv;
    trace.write_csv(csv);
    const fs::path trace_path = r.out / "trace.csv";
    atomic_write(trace_path, csv.str());

    double max_residual = 0.0;
    for (double v : trace.residual) max_residual = std::max(max_residual, v);
    json j{{"run", run_meta(r)},
           {"hypotheses", hypotheses_json(sys.hypotheses())},
           {"initial_energy", trace.e_total.front()},
           {"final_energy", trace.e_total.back()},
           {"max_identity_residual", max_residual}};
    const fs::path report_path = r.out / "report.json";
    atomic_write(report_path, j.dump(2) + "\n");
    return {trace_path.string(), report_path.string()};
}

std::vector<std::string> run_check(const RunConfig& cfg) {
    const Resolved r = resolve(cfg);
    CoupledSystem sys = build_system(r.preset, r.n, r.alpha_frac);
    const double alpha_max = std::sqrt(sys.a1().omega() * sys.a2().omega());
    json j{{"run", run_meta(r)},
           {"hypotheses", hypotheses_json(sys.hypotheses())},
           {"coupling_bound", instance_bound_json(r.preset, r.n, alpha_max)}};
    const fs::path report_path = r.out / "report.json";
    atomic_write(report_path, j.dump(2) + "\n");
    return {report_path.string()};
}

std::vector<std::string> run_decay(const RunConfig& cfg) {
    const Resolved r = resolve(cfg);
    CoupledSystem sys = build_system(r.preset, r.n, r.alpha_frac);
    const State u0 = sys.prepared_state(r.m, r.seed);
    const Trajectory traj = evolve_exact(sys, u0, decay_times(r.t_end));
    const EnergyTrace trace = energy_trace(sys, traj);

    const analysis::DecayFit fit =
        analysis::fit_decay_rate(trace, r.t_end / 10.0, r.t_end);
    const double r_pred = r.preset.predicted_r;

    // bound constants over the grid ladder, smoothness 1 data (D(A) norm)
    json ladder_json = json::object();
    std::vector<int> ladder;
    for (int n : {r.n / 2, r.n, 2 * r.n})
        if (n >= 8 && n <= 512) ladder.push_back(n);
    for (int n : ladder) {
        CoupledSystem sys_n = build_system(r.preset, n, r.alpha_frac);
        const State u1 = sys_n.prepared_state(1, r.seed);
        const Trajectory traj_n = evolve_exact(sys_n, u1, decay_times(r.t_end, 200, 48));
        const EnergyTrace trace_n = energy_trace(sys_n, traj_n);
        const double norm_sq = analysis::initial_norm_sq(
            sys_n, u1, analysis::DecayNorm::GraphDomain, 1, 0.5);
        ladder_json[std::to_string(n)] =
            analysis::decay_bound_constant(trace_n, norm_sq, r_pred);
    }

    // integral-inequality constant with smoothness-4 data
    const State u4 = sys.prepared_state(4, r.seed);
    const SemigroupSolver solver(sys);
    std::vector<double> t_grid;
    for (double t = r.t_end / 16.0; t <= r.t_end * 1.0001; t *= 2.0) t_grid.push_back(t);
    const analysis::C1Curve c1 =
        analysis::integral_inequality_constant(sys, solver, u4, t_grid);

    std::ostringstream c1_csv;
    c1_csv << "T,c1\n";
    char line[128];
    for (std::size_t i = 0; i < c1.t_grid.size(); ++i) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g\n", c1.t_grid[i], c1.c1[i]);
        c1_csv << line;
    }
    const fs::path c1_path = r.out / "c1_curve.csv";
    atomic_write(c1_path, c1_csv.str());

    json j{{"run", run_meta(r)},
           {"fitted_exponent", fit.exponent},
           {"fit_residual", fit.residual},
           {"fit_window", {r.t_end / 10.0, r.t_end}},
           {"predicted_exponent", r_pred},
           {"bound_constant_r", r_pred},
           {"bound_constant_norm", "D(A^1)"},
           {"n_ladder", ladder_json},
           {"c1_saturation", c1.saturation},
           {"c1_denominator", c1.denominator}};
    const fs::path report_path = r.out / "report.json";
    atomic_write(report_path, j.dump(2) + "\n");
    return {c1_path.string(), report_path.string()};
}

std::vector<std::string> run_interp(const RunConfig& cfg) {
    const Resolved r = resolve(cfg);
    CoupledSystem sys = build_system(r.preset, r.n, r.alpha_frac);
    json rows = json::array();
    const struct {
        const char* name;
        const SelfAdjointOperator* op;
    } ops[] = {{"A1", &sys.a1()}, {"A2", &sys.a2()}};
    for (const auto& [name, op] : ops) {
        NormalGen gen(r.seed);
        for (int vec = 0; vec < 3; ++vec) {
            Vector x(op->dim());
            for (double& xi : x) xi = gen();
            for (double theta : {0.25, 0.5, 0.75})
                for (double beta : {0.5, 1.0}) {
                    const analysis::InterpNorm norm = analysis::interp_norm(*op, beta, theta, x);
                    rows.push_back(json{{"operator", name},
                                        {"vector", vec},
                                        {"theta", theta},
                                        {"beta", beta},
                                        {"value_quadrature", norm.value_quadrature},
                                        {"value_closed_form", norm.value_closed_form},
                                        {"value_fracpower", norm.value_fracpower},
                                        {"expected_ratio",
                                         std::sqrt(M_PI / (2.0 * std::sin(M_PI * theta)))}});
                }
        }
    }
    json j{{"run", run_meta(r)}, {"interp_norms", rows}};
    const fs::path report_path = r.out / "report.json";
    atomic_write(report_path, j.dump(2) + "\n");
    return {report_path.string()};
}

std::vector<std::string> run_compat(const RunConfig& cfg) {
    const Resolved r = resolve(cfg);
    const std::vector<int> ladder = {32, 64, 128, 256};
    const ops1d::OperatorSpec s1 = ops1d::spec_from_name(r.preset.a1, r.n, r.preset.a1_shift);
    const ops1d::OperatorSpec s2 = ops1d::spec_from_name(r.preset.a2, r.n, r.preset.a2_shift);
    const HypothesesReport rep = analysis::compat_scaling_study(s1, s2, ladder);

    const fs::path csv_path = r.out / "kappa.csv";
    atomic_write(csv_path, kappa_csv(rep));
    json j{{"run", run_meta(r)}, {"compat", hypotheses_json(rep)}};
    const fs::path report_path = r.out / "report.json";
    atomic_write(report_path, j.dump(2) + "\n");
    return {csv_path.string(), report_path.string()};
}

std::vector<std::string> run_gallery(const RunConfig& cfg) {
    const Resolved r = resolve(cfg);
    const std::vector<Preset>& presets = preset_catalog();
    std::vector<GalleryRow> rows(presets.size());
    std::exception_ptr first_error;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < presets.size(); ++i) {
        try {
            rows[i] = gallery_row(presets[i], r.n, r.t_end);
        } catch (...) {
#pragma omp critical
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);

    std::ostringstream os;
    os << "preset,n,alpha,kappa_class,residual,fit_r,bound_c\n";
    char line[512];
    for (const GalleryRow& row : rows) {
        std::snprintf(line, sizeof(line), "%s,%d,%.17g,%s,%.17g,%.17g,%.17g\n",
                      row.preset.c_str(), row.n, row.alpha, row.kappa_class.c_str(),
                      row.residual, row.fit_r, row.bound_c);
        os << line;
    }
    const fs::path summary_path = r.out / "summary.csv";
    atomic_write(summary_path, os.str());
    return {summary_path.string()};
}

std::vector<std::string> run_nostab(const RunConfig& cfg) {
    const Resolved r = resolve(cfg);
    if (!r.preset.one_way)
        throw std::invalid_argument("nostab requires the one-way-coupling preset (remark-ii)");
    CoupledSystem sys = build_system(r.preset, r.n, r.alpha_frac);
    const State u0 = one_way_probe_state(sys.a2(), r.seed);
    const std::vector<double> times = uniform_times(r.t_end, 400);
    const ConservationProbe probe =
        conservation_probe(sys.a2(), r.preset.beta, sys.alpha2(), u0, times);

    std::ostringstream csv;
    csv << "t,E_v2,E_total\n";
    char line[160];
    for (std::size_t i = 0; i < probe.times.size(); ++i) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", probe.times[i],
                      probe.e_v2[i], probe.e_total[i]);
        csv << line;
    }
    const fs::path csv_path = r.out / "nostab.csv";
    atomic_write(csv_path, csv.str());

    json j{{"run", run_meta(r)},
           {"e_v2_initial", probe.e_v2.front()},
           {"e_v2_final", probe.e_v2.back()},
           {"e_v2_relative_drift", probe.drift},
           {"e_total_final", probe.e_total.back()},
           {"stabilized", probe.e_total.back() < 0.9 * probe.e_v2.front()}};
    const fs::path report_path = r.out / "report.json";
    atomic_write(report_path, j.dump(2) + "\n");
    return {csv_path.string(), report_path.string()};
}

}  // namespace istab::cli
