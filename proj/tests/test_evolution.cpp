#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "istab/evolution.hpp"
#include "istab/presets.hpp"
#include "istab/random.hpp"

using namespace istab;

namespace {

double state_diff_norm(const CoupledSystem& sys, const State& a, const State& b) {
    State d = a;
    d *= -1.0;
    d += b;
    return std::sqrt(sys.scalar_product(d, d));
}

}  // namespace

TEST_CASE("t = 0 reproduces the initial state") {
    CoupledSystem sys = build_system(preset_by_id("ex53"), 24, 0.5);
    const State u0 = sys.prepared_state(1, 3);
    const std::vector<double> times = {0.0, 0.5};
    Trajectory traj = evolve_exact(sys, u0, times);
    CHECK(state_diff_norm(sys, traj.states[0], u0) <=
          1e-12 * std::sqrt(sys.scalar_product(u0, u0)));
}

TEST_CASE("undamped diagnostic run conserves the energy") {
    const int n = 24;
    SelfAdjointOperator a1 = make_operator(ops1d::robin_laplacian(n));
    SelfAdjointOperator a2 = make_operator(ops1d::dirichlet_laplacian(n));
    const double alpha = 0.5 * std::sqrt(a1.omega() * a2.omega());
    CoupledSystem sys = CoupledSystem::assemble_diagnostic(a1, a2, DampingOperator::zero(),
                                                           alpha, alpha);
    const State u0 = sys.prepared_state(1, 5);
    Trajectory traj = evolve_exact(sys, u0, uniform_times(100.0, 101));
    const double e0 = sys.energy(traj.states.front()).total;
    for (const State& s : traj.states)
        CHECK(std::abs(sys.energy(s).total - e0) <= 1e-9 * e0);
}

TEST_CASE("dissipation identity audit on the hybrid preset") {
    CoupledSystem sys = build_system(preset_by_id("ex53"), 64, 0.5);
    const State u0 = sys.prepared_state(2, 42);
    Trajectory traj = evolve_exact(sys, u0, uniform_times(100.0, 400));
    const EnergyTrace trace = energy_trace(sys, traj);
    const double e0 = trace.e_total.front();
    for (double r : trace.residual) CHECK(r <= 1e-8 * e0);
}

TEST_CASE("closed-form dissipation integral agrees with refined trapezoid quadrature") {
    CoupledSystem sys = build_system(preset_by_id("is"), 16, 0.5);
    const State u0 = sys.prepared_state(2, 11);
    const SemigroupSolver solver(sys);
    const SemigroupSolver::Modal modal = solver.prepare(u0);

    const double t_end = 5.0;
    const double exact = solver.dissipation_integral(modal, t_end);
    const int steps = 20000;
    double trap = 0.0;
    double prev = solver.dissipation_from_y(solver.sample_y(modal, 0.0));
    for (int k = 1; k <= steps; ++k) {
        const double t = t_end * k / steps;
        const double cur = solver.dissipation_from_y(solver.sample_y(modal, t));
        trap += 0.5 * (prev + cur) * (t_end / steps);
        prev = cur;
    }
    CHECK(exact == doctest::Approx(trap).epsilon(1e-6));
}

TEST_CASE("semigroup property") {
    CoupledSystem sys = build_system(preset_by_id("ex51a"), 20, 0.5);
    const State u0 = sys.prepared_state(1, 7);
    const double s = 3.0, t = 7.0;
    std::vector<double> grid = {0.0, s, s + t};
    Trajectory direct = evolve_exact(sys, u0, grid);
    std::vector<double> second = {0.0, t};
    Trajectory restarted = evolve_exact(sys, direct.states[1], second);
    const double rel = state_diff_norm(sys, restarted.states[1], direct.states[2]) /
                       std::sqrt(sys.scalar_product(direct.states[2], direct.states[2]));
    CHECK(rel <= 1e-8);
}

TEST_CASE("linearity of the flow") {
    CoupledSystem sys = build_system(preset_by_id("ww"), 16, 0.5);
    const State x = sys.prepared_state(0, 21);
    const State y = sys.prepared_state(0, 22);
    State combo = x;
    combo *= 2.0;
    State y3 = y;
    y3 *= -3.0;
    combo += y3;

    const std::vector<double> times = {0.0, 4.0};
    Trajectory tx = evolve_exact(sys, x, times);
    Trajectory ty = evolve_exact(sys, y, times);
    Trajectory tc = evolve_exact(sys, combo, times);
    State expect = tx.states[1];
    expect *= 2.0;
    State yy = ty.states[1];
    yy *= -3.0;
    expect += yy;
    const double rel = state_diff_norm(sys, tc.states[1], expect) /
                       std::sqrt(sys.scalar_product(expect, expect));
    CHECK(rel <= 1e-9);
}

TEST_CASE("contraction and strong stability on every non-diagnostic preset") {
    for (const Preset& preset : preset_catalog()) {
        if (preset.one_way) continue;
        CoupledSystem sys = build_system(preset, 24, 0.5);
        const State u0 = sys.prepared_state(2, 13);
        Trajectory traj = evolve_exact(sys, u0, uniform_times(50.0, 101));
        const EnergyTrace trace = energy_trace(sys, traj);
        const double e0 = trace.e_total.front();
        for (std::size_t i = 1; i < trace.e_total.size(); ++i)
            CHECK(trace.e_total[i] <= trace.e_total[i - 1] + 1e-10 * e0);
        CHECK(trace.e_total.back() < e0);
    }
}

TEST_CASE("implicit midpoint basics") {
    CoupledSystem sys = build_system(preset_by_id("is"), 16, 0.5);

    Trajectory z = evolve_midpoint(sys, State::zero(16), 0.1, 1.0);
    for (const State& s : z.states) CHECK(sys.energy(s).total == 0.0);

    const State u0 = sys.prepared_state(1, 17);
    Trajectory traj = evolve_midpoint(sys, u0, 0.05, 5.0);
    double prev = sys.energy(traj.states.front()).total;
    for (std::size_t i = 1; i < traj.states.size(); ++i) {
        const double e = sys.energy(traj.states[i]).total;
        CHECK(e <= prev * (1.0 + 1e-9));
        prev = e;
    }
    CHECK(traj.step == doctest::Approx(0.05));
    CHECK(traj.integrator == Trajectory::Integrator::ImplicitMidpoint);

    CHECK_THROWS_AS(static_cast<void>(evolve_midpoint(sys, u0, 0.0, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("midpoint converges to the exact flow at second order") {
    CoupledSystem sys = build_system(preset_by_id("is"), 32, 0.5);
    const State u0 = sys.prepared_state(2, 42);
    const double t_end = 2.0;
    const std::vector<double> times = {0.0, t_end};
    Trajectory exact = evolve_exact(sys, u0, times);

    double errs[2];
    int idx = 0;
    for (double dt : {0.02, 0.01}) {
        Trajectory mid = evolve_midpoint(sys, u0, dt, t_end);
        errs[idx++] = state_diff_norm(sys, mid.states.back(), exact.states.back());
    }
    const double ratio = errs[0] / errs[1];
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
}

TEST_CASE("energy trace on a single sample and the CSV schema") {
    CoupledSystem sys = build_system(preset_by_id("is"), 12, 0.5);
    const State u0 = sys.prepared_state(0, 2);
    const std::vector<double> one = {0.7};
    Trajectory traj = evolve_exact(sys, u0, one);
    const EnergyTrace trace = energy_trace(sys, traj);
    CHECK(trace.dissipated[0] == 0.0);
    CHECK(trace.residual[0] == 0.0);

    std::ostringstream os;
    trace.write_csv(os);
    CHECK(os.str().rfind("t,E_total,E1,E2,dissipated,residual\n", 0) == 0);
}

TEST_CASE("asymmetric dissipation identity uses the alpha2 weight") {
    CoupledSystem sys = build_system(preset_by_id("asym"), 48, 0.5);
    const State u0 = sys.prepared_state(2, 42);
    Trajectory traj = evolve_exact(sys, u0, uniform_times(100.0, 400));
    const EnergyTrace trace = energy_trace(sys, traj);
    const double e0 = trace.e_total.front();
    for (double r : trace.residual) CHECK(r <= 1e-8 * e0);
    CHECK(sys.dissipation_weight() == doctest::Approx(sys.alpha2()));
}

TEST_CASE("time grids are validated") {
    CoupledSystem sys = build_system(preset_by_id("is"), 12, 0.5);
    const State u0 = sys.prepared_state(0, 2);
    std::vector<double> bad = {0.0, 2.0, 1.0};
    CHECK_THROWS_AS(static_cast<void>(evolve_exact(sys, u0, bad)), std::invalid_argument);
    std::vector<double> empty;
    CHECK_THROWS_AS(static_cast<void>(evolve_exact(sys, u0, empty)), std::invalid_argument);
}

TEST_CASE("conservation probe: oscillator oracle and the no-stabilization bound") {
    const int n = 32;
    SelfAdjointOperator a = make_operator(ops1d::dirichlet_laplacian(n));
    const double beta = 1.0, alpha2 = 0.5 * a.omega();

    // v0 = second eigenvector, v1 = 0, u-data in the first eigenspace
    State u0 = State::zero(n);
    for (int i = 0; i < n; ++i) {
        u0.u[i] = 0.8 * a.eigenvectors()(i, 0);
        u0.p[i] = -0.3 * a.eigenvectors()(i, 0);
        u0.v[i] = a.eigenvectors()(i, 1);
    }
    const std::vector<double> times = uniform_times(100.0, 401);
    const ConservationProbe probe = conservation_probe(a, beta, alpha2, u0, times);

    CHECK(probe.drift <= 1e-8);
    CHECK(probe.e_total.back() >= 0.9 * probe.e_v2.front());
    const double mu2 = a.eigenvalues()[1];
    CHECK(probe.e_v2.front() == doctest::Approx(0.5 * mu2).epsilon(1e-10));

    // zero v-data stays identically zero
    State uz = State::zero(n);
    for (int i = 0; i < n; ++i) uz.u[i] = a.eigenvectors()(i, 0);
    const ConservationProbe zero_probe = conservation_probe(a, beta, alpha2, uz, times);
    for (double e : zero_probe.e_v2) CHECK(e <= 1e-18);

    // non-orthogonal v-data is rejected
    State bad = u0;
    for (int i = 0; i < n; ++i) bad.v[i] += 1e-3 * a.eigenvectors()(i, 0);
    CHECK_THROWS_AS(static_cast<void>(conservation_probe(a, beta, alpha2, bad, times)),
                    std::invalid_argument);
}

TEST_CASE("conserved component follows the scalar oscillator phase") {
    // v2'' + mu2 v2 = 0 decouples exactly; check the phase of the trajectory
    const int n = 24;
    SelfAdjointOperator a = make_operator(ops1d::dirichlet_laplacian(n));
    CoupledSystem sys = CoupledSystem::assemble_diagnostic(
        a, a, DampingOperator::scalar(1.0), 0.0, 0.4 * a.omega());
    State u0 = State::zero(n);
    for (int i = 0; i < n; ++i) {
        u0.u[i] = a.eigenvectors()(i, 0);
        u0.v[i] = a.eigenvectors()(i, 1);
    }
    const double mu2 = a.eigenvalues()[1];
    const std::vector<double> times = {0.0, 1.3, 4.7, 25.0};
    Trajectory traj = evolve_exact(sys, u0, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double expected = std::cos(std::sqrt(mu2) * times[k]);
        double proj = 0.0;
        for (int i = 0; i < n; ++i) proj += traj.states[k].v[i] * a.eigenvectors()(i, 1);
        proj *= a.space().weight;
        CHECK(proj == doctest::Approx(expected).epsilon(1e-8));
    }
}
