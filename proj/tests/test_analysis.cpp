#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "istab/analysis.hpp"
#include "istab/evolution.hpp"
#include "istab/presets.hpp"
#include "istab/random.hpp"

using namespace istab;
using namespace istab::analysis;

namespace {

EnergyTrace synthetic_trace(double t_lo, double t_hi, int count,
                            double (*law)(double)) {
    EnergyTrace tr;
    for (int i = 0; i < count; ++i) {
        const double t = t_lo + (t_hi - t_lo) * i / (count - 1);
        tr.times.push_back(t);
        tr.e_total.push_back(law(t));
        tr.e1.push_back(0.0);
        tr.e2.push_back(0.0);
        tr.dissipated.push_back(0.0);
        tr.residual.push_back(0.0);
    }
    return tr;
}

// Exact l1-form K-functional oracle on small instances: the minimizer lies on
// the path b(mu) = (I + mu C^2)^{-1} x, so scan mu and refine by golden
// section.
double k_exact_oracle(std::span<const double> mu, double beta,
                      std::span<const double> coeff, double t) {
    const int n = int(mu.size());
    auto value = [&](double m) {
        double a2 = 0.0, b2 = 0.0;
        for (int k = 0; k < n; ++k) {
            const double sigma = std::pow(mu[k], 2.0 * beta);
            const double denom = 1.0 + m * sigma;
            a2 += coeff[k] * coeff[k] * m * m * sigma * sigma / (denom * denom);
            b2 += coeff[k] * coeff[k] * sigma / (denom * denom);
        }
        return std::sqrt(a2) + t * std::sqrt(b2);
    };
    double best_mu = 0.0, best = value(0.0);
    for (int i = -1200; i <= 1200; ++i) {
        const double m = std::pow(10.0, i / 50.0);
        const double v = value(m);
        if (v < best) {
            best = v;
            best_mu = m;
        }
    }
    // golden-section polish around the grid minimum
    double lo = best_mu / 1.2, hi = best_mu * 1.2;
    if (best_mu == 0.0) return best;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = value(x1), f2 = value(x2);
    for (int it = 0; it < 200; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = value(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = value(x2);
        }
    }
    return std::min({best, f1, f2});
}

}  // namespace

TEST_CASE("decay fit recovers synthetic power laws") {
    const EnergyTrace quad =
        synthetic_trace(1.0, 100.0, 200, [](double t) { return 1.0 / (t * t); });
    const DecayFit f2 = fit_decay_rate(quad, 1.0, 100.0);
    CHECK(f2.exponent == doctest::Approx(-2.0).epsilon(1e-6));
    CHECK(f2.residual <= 1e-8);

    const EnergyTrace flat =
        synthetic_trace(1.0, 100.0, 50, [](double) { return 5.0; });
    CHECK(fit_decay_rate(flat, 1.0, 100.0).exponent == doctest::Approx(0.0));

    const EnergyTrace short_trace =
        synthetic_trace(1.0, 2.0, 5, [](double) { return 1.0; });
    CHECK_THROWS_AS(static_cast<void>(fit_decay_rate(short_trace, 1.0, 2.0)),
                    std::invalid_argument);
}

TEST_CASE("decay bound constant") {
    const EnergyTrace zero = synthetic_trace(0.5, 10.0, 40, [](double) { return 0.0; });
    CHECK(decay_bound_constant(zero, 3.0, 0.25) == 0.0);
    CHECK_THROWS_AS(static_cast<void>(decay_bound_constant(zero, 0.0, 0.25)),
                    std::invalid_argument);

    // E = 1/t exactly: t^{0.5} E / 1 maximized at the smallest t >= 1
    const EnergyTrace inv =
        synthetic_trace(1.0, 100.0, 1000, [](double t) { return 1.0 / t; });
    CHECK(decay_bound_constant(inv, 1.0, 0.5) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("c1 curve: consistency with graph energies and saturation") {
    CoupledSystem sys = build_system(preset_by_id("ex51a"), 32, 0.5);
    const State u0 = sys.prepared_state(4, 42);
    const SemigroupSolver solver(sys);
    const std::vector<double> grid = {25.0, 50.0, 100.0, 200.0, 400.0};
    const C1Curve curve = integral_inequality_constant(sys, solver, u0, grid);

    // denominator equals half the D(A^4) graph norm
    const double graph4 = sys.graph_norms(u0, 4, 0.5).graph_sq;
    CHECK(curve.denominator == doctest::Approx(0.5 * graph4).epsilon(1e-10));

    // nondecreasing in T, saturating
    for (std::size_t i = 1; i < curve.c1.size(); ++i) CHECK(curve.c1[i] >= curve.c1[i - 1]);
    CHECK(curve.saturation <= 1.1);
    CHECK(curve.saturation >= 1.0);

    // the exact modal integral agrees with a trapezoid cross-check
    const SemigroupSolver::Modal modal = solver.prepare(u0);
    const double t_end = 25.0;
    Trajectory traj = evolve_exact(sys, u0, uniform_times(t_end, 4001));
    double trap = 0.0;
    for (std::size_t i = 1; i < traj.times.size(); ++i)
        trap += 0.5 *
                (sys.energy(traj.states[i - 1]).total + sys.energy(traj.states[i]).total) *
                (traj.times[i] - traj.times[i - 1]);
    CHECK(solver.energy_integral(modal, t_end) == doctest::Approx(trap).epsilon(1e-6));

    CHECK_THROWS_AS(static_cast<void>(
                        integral_inequality_constant(sys, solver, State::zero(32), grid)),
                    std::invalid_argument);
}

TEST_CASE("theorem 2.8 check: holds with the measured constant, fails when perturbed") {
    CoupledSystem sys = build_system(preset_by_id("ex53"), 32, 0.5);
    const State u0 = sys.prepared_state(4, 42);
    const SemigroupSolver solver(sys);
    const std::vector<double> grid = {25.0, 50.0, 100.0, 200.0, 400.0};
    const C1Curve curve = integral_inequality_constant(sys, solver, u0, grid);
    const double c = curve.c1.back();

    Trajectory traj = evolve_exact(sys, u0, decay_times(400.0, 200, 64));
    const EnergyTrace trace = energy_trace(sys, traj);
    std::vector<double> ts, es;
    for (std::size_t i = 0; i < trace.times.size(); ++i)
        if (trace.times[i] >= 1.0) {
            ts.push_back(trace.times[i]);
            es.push_back(trace.e_total[i]);
        }
    const double sum = curve.denominator;

    const Theorem28Result ok = theorem_2_8_check(ts, es, c, 4, 1, sum);
    CHECK(ok.holds);
    CHECK(ok.min_slack >= 0.0);

    const Theorem28Result halved = theorem_2_8_check(ts, es, 0.5 * c, 4, 1, sum);
    CHECK_FALSE(halved.holds);

    // conservative system beats any 1/t bound eventually
    SelfAdjointOperator a = make_operator(ops1d::dirichlet_laplacian(24));
    CoupledSystem cons = CoupledSystem::assemble_diagnostic(
        a, a, DampingOperator::zero(), 0.3 * a.omega(), 0.3 * a.omega());
    const State v0 = cons.prepared_state(4, 7);
    Trajectory ctraj = evolve_exact(cons, v0, decay_times(400.0, 100, 32));
    const EnergyTrace ctrace = energy_trace(cons, ctraj);
    std::vector<double> cts, ces;
    for (std::size_t i = 0; i < ctrace.times.size(); ++i)
        if (ctrace.times[i] >= 1.0) {
            cts.push_back(ctrace.times[i]);
            ces.push_back(ctrace.e_total[i]);
        }
    State w = v0;
    double csum = cons.energy(w).total;
    for (int k = 1; k <= 4; ++k) {
        w = cons.apply_generator(w);
        csum += cons.energy(w).total;
    }
    const Theorem28Result conserved = theorem_2_8_check(cts, ces, c, 4, 1, csum);
    CHECK_FALSE(conserved.holds);
}

TEST_CASE("quadratic K-functional closed forms") {
    const int n = 16;
    SelfAdjointOperator op = make_operator(ops1d::dirichlet_laplacian(n));

    // single eigenvector: K2 = |x| t mu^beta / sqrt(1 + t^2 mu^{2 beta})
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = op.eigenvectors()(i, 2);
    const double mu = op.eigenvalues()[2];
    for (double beta : {0.5, 1.0})
        for (double t : {0.01, 1.0, 7.3}) {
            const double sig = std::pow(mu, beta);
            const double expected = t * sig / std::sqrt(1.0 + t * t * sig * sig);
            CHECK(k_functional_quadratic(op, beta, x, t) ==
                  doctest::Approx(expected).epsilon(1e-12));
        }

    // t -> infinity limit: K2 -> |x|
    NormalGen gen(5);
    Vector y(n);
    for (double& v : y) v = gen();
    const double ynorm = weighted_norm(op.space(), y);
    CHECK(k_functional_quadratic(op, 1.0, y, 1e9) == doctest::Approx(ynorm).epsilon(1e-8));

    CHECK_THROWS_AS(static_cast<void>(k_functional_quadratic(op, 1.0, y, 0.0)),
                    std::invalid_argument);
}

TEST_CASE("K sandwich against the convex-minimization oracle on small instances") {
    NormalGen gen(31);
    for (int trial = 0; trial < 200; ++trial) {
        const int dim = 2 + trial % 5;  // dims <= 6
        Vector mu(dim), coeff(dim);
        for (int k = 0; k < dim; ++k) {
            mu[k] = 0.5 + std::abs(gen()) * 20.0;
            coeff[k] = gen();
        }
        const double beta = (trial % 2 == 0) ? 0.5 : 1.0;
        const double t = std::pow(10.0, -2.0 + 4.0 * (trial % 17) / 16.0);

        double k2_sq = 0.0;
        for (int k = 0; k < dim; ++k) {
            const double sig = std::pow(mu[k], 2.0 * beta);
            k2_sq += coeff[k] * coeff[k] * t * t * sig / (1.0 + t * t * sig);
        }
        const double k2 = std::sqrt(k2_sq);
        const double kx = k_exact_oracle(mu, beta, coeff, t);
        CHECK(k2 <= kx + 1e-12);
        CHECK(kx <= std::sqrt(2.0) * k2 + 1e-8);
    }
}

TEST_CASE("interpolation norm identity across the operator catalog") {
    for (const std::string& name : ops1d::catalog_names()) {
        const double shift =
            (name == "neumann_shift_laplacian" || name == "free_shift_bilaplacian") ? 1.0
                                                                                    : 0.0;
        SelfAdjointOperator op = make_operator(ops1d::spec_from_name(name, 24, shift));
        NormalGen gen(17);
        for (int vec = 0; vec < 3; ++vec) {
            Vector x(24);
            for (double& v : x) v = gen();
            for (double theta : {0.25, 0.5, 0.75})
                for (double beta : {0.5, 1.0}) {
                    const InterpNorm norm = interp_norm(op, beta, theta, x);
                    CHECK(norm.value_quadrature ==
                          doctest::Approx(norm.value_closed_form).epsilon(1e-6));
                    const double expected =
                        std::sqrt(M_PI / (2.0 * std::sin(M_PI * theta)));
                    CHECK(norm.value_quadrature / norm.value_fracpower ==
                          doctest::Approx(expected).epsilon(1e-6));
                }
        }
    }
}

TEST_CASE("interp norm analytic example and edge cases") {
    // eigenvector with mu = 1: closed form sqrt(pi/2) |x| at theta = 1/2
    Matrix eye = Matrix::identity(3);
    SelfAdjointOperator op = eig_sym(eye, {3, 1.0});
    Vector x = {1.0, 0.0, 0.0};
    const InterpNorm norm = interp_norm(op, 1.0, 0.5, x);
    CHECK(norm.value_closed_form == doctest::Approx(std::sqrt(M_PI / 2.0)).epsilon(1e-12));
    CHECK(norm.value_quadrature == doctest::Approx(std::sqrt(M_PI / 2.0)).epsilon(1e-8));

    const Vector zero(3, 0.0);
    const InterpNorm zn = interp_norm(op, 1.0, 0.3, zero);
    CHECK(zn.value_quadrature == 0.0);
    CHECK(zn.value_closed_form == 0.0);
    CHECK(zn.value_fracpower == 0.0);

    CHECK_THROWS_AS(static_cast<void>(interp_norm(op, 1.0, 0.0, x)), std::invalid_argument);
    CHECK_THROWS_AS(static_cast<void>(interp_norm(op, 1.0, 1.0, x)), std::invalid_argument);
}

TEST_CASE("compat scaling study classifications") {
    const std::vector<int> ladder = {16, 32, 64};

    const HypothesesReport same = compat_scaling_study(
        ops1d::dirichlet_laplacian(16), ops1d::dirichlet_laplacian(16), ladder);
    CHECK(same.thetab_bounded);
    CHECK(same.theta2a_violated.empty());
    for (const KappaRow& row : same.ladder) {
        CHECK(row.kappa_half == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(row.kappa_j.at(2) == doctest::Approx(1.0).epsilon(1e-8));
    }

    const HypothesesReport square = compat_scaling_study(
        ops1d::navier_bilaplacian(16), ops1d::dirichlet_laplacian(16), ladder);
    for (const KappaRow& row : square.ladder) {
        CHECK(row.kappa_j.at(4) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(row.kappa_half == doctest::Approx(1.0).epsilon(1e-8));
    }

    const std::vector<int> big_ladder = {32, 64, 128, 256};
    const HypothesesReport hybrid = compat_scaling_study(
        ops1d::robin_laplacian(16), ops1d::dirichlet_laplacian(16), big_ladder);
    CHECK(hybrid.thetab_bounded);
    CHECK(!hybrid.theta2a_violated.empty());
}
