#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "istab/lapack.hpp"
#include "istab/operators1d.hpp"
#include "istab/spectral.hpp"

namespace istab {

// Bounded coercive damping operator; default form is beta * I.
class DampingOperator {
public:
    static DampingOperator scalar(double beta);
    static DampingOperator zero();  // diagnostics only (undamped runs)
    static DampingOperator general(Matrix b, const DiscreteHilbert& space);

    double beta() const { return beta_; }
    bool is_scalar() const { return !matrix_.has_value(); }
    const std::optional<Matrix>& matrix() const { return matrix_; }

    Vector apply(std::span<const double> x) const;
    // p^T B p (unweighted; callers supply the quadrature weight)
    double quad(std::span<const double> p) const;

private:
    std::optional<Matrix> matrix_;
    double beta_ = 0.0;
};

// Phase-space point U = (u, p, v, q).
struct State {
    Vector u, p, v, q;

    static State zero(int n) { return State{Vector(n), Vector(n), Vector(n), Vector(n)}; }
    int dim() const { return int(u.size()); }

    Vector flatten() const;                 // (u, p, v, q) blocks
    static State unflatten(std::span<const double> x);

    State& operator+=(const State& o);
    State& operator*=(double a);
};

State random_state(int n, std::uint64_t seed);

struct KappaRow {
    int n = 0;
    double kappa_half = 0.0;
    std::map<int, double> kappa_j;  // j in {2, 3, 4}
};

struct HypothesesReport {
    double omega1 = 0.0, omega2 = 0.0, beta = 0.0;
    double alpha1 = 0.0, alpha2 = 0.0;
    bool alpha_ok = false;
    double alpha_margin = 0.0;  // sqrt(omega1*omega2) - sqrt(alpha1*alpha2)
    double nu_alpha = 0.0;
    double kappa_half = 0.0;
    std::map<int, double> kappa_j;

    // grid-size ladder (filled by check_hypotheses)
    std::vector<KappaRow> ladder;
    bool thetab_bounded = false;
    std::vector<int> theta2a_violated;
    std::string classification;
};

struct Energies {
    double total = 0.0;
    double e1 = 0.0;
    double e2 = 0.0;
};

struct GraphNorms {
    double graph_sq = 0.0;      // ||U||^2_{D(A^k)}
    double component_sq = 0.0;  // ||U||^2_{H_{k,theta}}
};

// The assembled coupled system: operators, damping, coupling coefficients,
// the energy scalar product, the generator and its inverse.
class CoupledSystem {
public:
    enum class EnergyForm { Symmetric, Asymmetric, PlainSum };

    // Symmetric coupling, enforces (H1)-(H3).
    static CoupledSystem assemble(SelfAdjointOperator a1, SelfAdjointOperator a2,
                                  DampingOperator b, double alpha);
    // Independent coefficients, enforces (H3').
    static CoupledSystem assemble(SelfAdjointOperator a1, SelfAdjointOperator a2,
                                  DampingOperator b, double alpha1, double alpha2);
    // Bypasses the coupling/damping hypotheses; used for the undamped and
    // one-way-coupling probes. alpha1 == 0 selects the plain-sum energy.
    static CoupledSystem assemble_diagnostic(SelfAdjointOperator a1,
                                             SelfAdjointOperator a2, DampingOperator b,
                                             double alpha1, double alpha2);

    const SelfAdjointOperator& a1() const { return a1_; }
    const SelfAdjointOperator& a2() const { return a2_; }
    const DampingOperator& damping() const { return b_; }
    double alpha1() const { return alpha1_; }
    double alpha2() const { return alpha2_; }
    EnergyForm form() const { return form_; }
    bool diagnostic() const { return diagnostic_; }
    const DiscreteHilbert& space() const { return space_; }
    int dim() const { return space_.dim; }
    const HypothesesReport& hypotheses() const { return report_; }

    Energies energy(const State& s) const;
    double scalar_product(const State& x, const State& y) const;  // (X|Y) = 2E polarization
    // nu(alpha) * (E1 + E2) (weighted appropriately for asymmetric coupling)
    double coercivity_floor(const State& s) const;

    State apply_generator(const State& s) const;
    State apply_inverse(const State& s) const;

    // <B p, p> in the system space
    double dissipation_quad(const State& s) const;
    // multiplier in dE/dt = -w * <B u', u'> (alpha2 for asymmetric coupling)
    double dissipation_weight() const;

    // U0 = (A^-1)^m R, R pseudo-random unit-norm, scaled so E(U0) = 1.
    State prepared_state(int smoothness, std::uint64_t seed) const;

    GraphNorms graph_norms(const State& s, int k, double theta) const;

    // |A_i^s x|^2 measured in the system space
    double component_power_norm_sq(int which, double s, std::span<const double> x) const;

    Matrix dense_generator() const;  // 4n x 4n, (u, p, v, q) block order

    // operator specs used to build a1/a2, when catalog-built
    void set_provenance(ops1d::OperatorSpec s1, ops1d::OperatorSpec s2);
    const std::optional<std::pair<ops1d::OperatorSpec, ops1d::OperatorSpec>>& provenance() const {
        return provenance_;
    }

private:
    CoupledSystem(SelfAdjointOperator a1, SelfAdjointOperator a2, DampingOperator b,
                  double alpha1, double alpha2, EnergyForm form, bool diagnostic);

    SelfAdjointOperator a1_, a2_;
    DampingOperator b_;
    double alpha1_ = 0.0, alpha2_ = 0.0;
    EnergyForm form_ = EnergyForm::Symmetric;
    bool diagnostic_ = false;
    DiscreteHilbert space_;
    HypothesesReport report_;
    std::optional<la::LuFactors> schur_;  // I - a1 a2 A1^-1 A2^-1
    std::optional<std::pair<ops1d::OperatorSpec, ops1d::OperatorSpec>> provenance_;
};

// Compatibility norms for a single operator pair.
KappaRow compatibility_norms(const SelfAdjointOperator& a1, const SelfAdjointOperator& a2);

// Ladder study over grid sizes; thresholds: kappa_half bounded when its
// variation stays within factor 1.5, theta2a-violated(j) when kappa_j grows
// monotonically by at least factor 2 end-to-end.
HypothesesReport check_hypotheses(const CoupledSystem& sys, std::span<const int> grid_sizes);
HypothesesReport kappa_ladder(const ops1d::OperatorSpec& s1, const ops1d::OperatorSpec& s2,
                              std::span<const int> grid_sizes);

}  // namespace istab
