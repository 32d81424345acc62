#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "istab/coupled.hpp"

namespace istab {

// Exact propagator for U' = G U built on the full eigendecomposition of the
// generator. The decomposition is done in energy coordinates Y = L^T z
// (L L^T = Gram matrix of the scalar product), where the generator is
// balanced: its norm is set by the frequencies, not by ||A_i||, so the modal
// arithmetic stays accurate for stiff operators, and E(U) = |Y|^2 / 2.
class SemigroupSolver {
public:
    explicit SemigroupSolver(const CoupledSystem& sys);

    struct Modal {
        CVector w;  // coefficients of U0 in the balanced eigenbasis
    };

    bool defective() const { return defective_; }
    double eigvec_condition() const { return cond_; }
    int phase_dim() const { return 4 * n_; }
    const CVector& eigenvalues() const { return lambda_; }

    Modal prepare(const State& u0) const;

    Vector balanced(const State& s) const;          // Y = L^T z
    State state_from_y(std::span<const double> y) const;
    Vector sample_y(const Modal& m, double t) const;
    Matrix sample_y_many(const Modal& m, std::span<const double> times) const;

    static double energy_from_y(std::span<const double> y) { return 0.5 * dot(y, y); }
    // <B p(t), p(t)> in the system space, directly from balanced coordinates
    double dissipation_from_y(std::span<const double> y) const;

    // closed-form integrals over [0, t] via the modal Gram matrices
    double energy_integral(const Modal& m, double t) const;
    double dissipation_integral(const Modal& m, double t) const;
    Vector dissipation_integrals(const Modal& m, std::span<const double> times) const;

private:
    Vector pair_integrals(const CMatrix& gram, const Modal& m,
                          std::span<const double> times) const;
    void ensure_energy_gram() const;

    int n_ = 0;
    double weight_ = 1.0;
    DampingOperator b_;
    double c1_ = 1.0, c2_ = 1.0;  // momentum weights of the scalar product
    Matrix ls_;                   // Cholesky factor of the position Gram block
    double sqrt_j1_ = 1.0, sqrt_j2_ = 1.0;
    CMatrix x_;
    CVector lambda_;
    std::unique_ptr<la::ComplexLuFactors> xlu_;
    double cond_ = 0.0;
    bool defective_ = false;
    CMatrix diss_gram_;  // X^H Q X for the damping quadratic form
    mutable CMatrix energy_gram_;  // X^H X, built on first use
    mutable bool have_energy_gram_ = false;
};

struct Trajectory {
    enum class Integrator { Exact, ImplicitMidpoint };

    std::vector<double> times;
    std::vector<State> states;
    Integrator integrator = Integrator::Exact;
    double step = 0.0;  // dt of the stepping integrator

    // set for exact trajectories; enables closed-form dissipation bookkeeping
    std::shared_ptr<const SemigroupSolver> solver;
    std::shared_ptr<const SemigroupSolver::Modal> modal;
};

Trajectory evolve_exact(const CoupledSystem& sys, const State& u0,
                        std::span<const double> times);
Trajectory evolve_midpoint(const CoupledSystem& sys, const State& u0, double dt, double t_end);

struct EnergyTrace {
    std::vector<double> times;
    std::vector<double> e_total, e1, e2;
    std::vector<double> dissipated;  // running integral of |B^{1/2} u'|^2
    std::vector<double> residual;    // |E(t) - E(0) + w_d * dissipated(t)|

    void write_csv(std::ostream& os) const;
};

EnergyTrace energy_trace(const CoupledSystem& sys, const Trajectory& traj);

// 400 uniform samples on [0, T] plus a geometric tail grid for decay fitting.
std::vector<double> uniform_times(double t_end, int count);
std::vector<double> decay_times(double t_end, int uniform_count = 400, int log_count = 64);

struct ConservationProbe {
    std::vector<double> times;
    std::vector<double> e_v2;     // energy of the v-component orthogonal to Z1
    std::vector<double> e_total;  // E1 + E2
    double drift = 0.0;           // max relative drift of e_v2
};

// One-way coupling probe (alpha1 = 0): the energy of the v-data orthogonal to
// the first eigenspace of A must stay constant along the flow. Rejects v-data
// with a nonzero Z1 projection.
ConservationProbe conservation_probe(const SelfAdjointOperator& a, double beta,
                                     double alpha2, const State& u0,
                                     std::span<const double> times);

}  // namespace istab
