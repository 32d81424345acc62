#pragma once

#include <span>
#include <vector>

#include "istab/coupled.hpp"
#include "istab/evolution.hpp"

namespace istab::analysis {

struct DecayFit {
    double exponent = 0.0;   // slope of log E vs log t
    double residual = 0.0;   // rms residual of the fit
    int samples = 0;
};

// Least-squares fit on the window [t_lo, t_hi]; requires at least 8 samples
// with t > 0 and E > 0.
DecayFit fit_decay_rate(const EnergyTrace& trace, double t_lo, double t_hi);

enum class DecayNorm {
    GraphDomain,      // ||U0||^2_{D(A^k)}
    ComponentInterp,  // ||U0||^2_{H_{k,theta}} (practical surrogate for the
                      // interpolation norm of the non-self-adjoint generator)
};

double initial_norm_sq(const CoupledSystem& sys, const State& u0, DecayNorm norm, int k,
                       double theta);

// sup over sampled t in [1, t_max] of t^r * E(t) / norm_sq.
double decay_bound_constant(const EnergyTrace& trace, double norm_sq, double r);

struct C1Curve {
    std::vector<double> t_grid;
    std::vector<double> c1;
    double saturation = 0.0;   // c1(T_max) / c1(T_max / 2)
    double denominator = 0.0;  // sum_{k<=4} E(A^k U0)
};

// Ratio of the energy time-integral to the first four graph energies,
// evaluated exactly through the modal representation.
C1Curve integral_inequality_constant(const CoupledSystem& sys, const SemigroupSolver& solver,
                                     const State& u0, std::span<const double> t_grid);

struct Theorem28Result {
    bool holds = false;
    double min_slack = 0.0;  // min over samples of (rhs - E) / rhs
    double worst_t = 0.0;
};

// E(t) <= c^n (1+K)^{n-1} n! / t^n * graph_energy_sum at every sampled t > 0.
Theorem28Result theorem_2_8_check(std::span<const double> times,
                                  std::span<const double> energies, double c, int big_k,
                                  int n, double graph_energy_sum);

// Quadratic K-functional between H and D(A^beta), mode-separable:
// K2(t,x)^2 = sum_k c_k^2 t^2 mu_k^{2 beta} / (1 + t^2 mu_k^{2 beta}).
double k_functional_quadratic(const SelfAdjointOperator& op, double beta,
                              std::span<const double> x, double t);

struct InterpNorm {
    double theta = 0.0;
    double beta = 0.0;
    double value_quadrature = 0.0;
    double value_closed_form = 0.0;
    double value_fracpower = 0.0;
};

// |x|_{theta,2} between H and D(A^beta): adaptive quadrature of the
// K2-integrand, the closed form sqrt(pi / (2 sin pi theta)) |A^{beta theta} x|,
// and the bare fractional-power norm.
InterpNorm interp_norm(const SelfAdjointOperator& op, double beta, double theta,
                       std::span<const double> x);

// Kappa tables over a grid ladder with the classification flags.
HypothesesReport compat_scaling_study(const ops1d::OperatorSpec& s1,
                                      const ops1d::OperatorSpec& s2,
                                      std::span<const int> grid_sizes);

}  // namespace istab::analysis
