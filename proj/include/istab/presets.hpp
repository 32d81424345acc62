#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "istab/coupled.hpp"

namespace istab {

// Informational coupling bounds reported next to the enforced sqrt(w1 w2).
enum class InstanceBound {
    None,
    SqrtPoincareShifted,  // sqrt(C (C + lambda))
    ShiftTimesPoincare,   // sqrt(lambda C)
    PoincarePlusKappa,    // C + kappa
    PoincareThreeHalves,  // C^{3/2}
};

struct Preset {
    std::string id;
    std::string title;
    std::string a1;  // operator catalog name
    double a1_shift = 0.0;
    std::string a2;
    double a2_shift = 0.0;
    double beta = 1.0;
    double alpha_ratio = 1.0;  // alpha1 / alpha2
    bool one_way = false;      // alpha1 = 0 (diagnostic, not stabilizable)
    bool approximate = false;  // flagged approximate operator realization
    double predicted_r = 0.25;
    InstanceBound bound = InstanceBound::None;
    int default_n = 64;
    double default_t = 100.0;
    int default_m = 2;
    std::uint64_t default_seed = 42;
    double default_alpha_frac = 0.5;
};

const std::vector<Preset>& preset_catalog();
const Preset& preset_by_id(const std::string& id);

// alpha_frac fixes sqrt(alpha1 alpha2) / sqrt(omega1 omega2); the preset's
// coefficient ratio is preserved, so nu(alpha) = 1 - alpha_frac everywhere.
CoupledSystem build_system(const Preset& preset, int n, double alpha_frac);

// Value of the paper-style coupling bound for display; 0 when not defined.
double instance_bound_value(const Preset& preset, int n);
std::string instance_bound_formula(InstanceBound bound);

}  // namespace istab
