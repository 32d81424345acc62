#include "istab/presets.hpp"

#include <cmath>
#include <stdexcept>

namespace istab {

const std::vector<Preset>& preset_catalog() {
    static const std::vector<Preset> presets = [] {
        std::vector<Preset> v;
        Preset p;

        p = {};
        p.id = "is";
        p.title = "two Dirichlet wave equations, damping on the first";
        p.a1 = "dirichlet_laplacian";
        p.a2 = "dirichlet_laplacian";
        v.push_back(p);

        p = {};
        p.id = "is1";
        p.title = "Robin wave coupled to a Dirichlet wave (hybrid)";
        p.a1 = "robin_laplacian";
        p.a2 = "dirichlet_laplacian";
        v.push_back(p);

        p = {};
        p.id = "ex51a";
        p.title = "Neumann-with-shift wave coupled to a Dirichlet wave";
        p.a1 = "neumann_shift_laplacian";
        p.a1_shift = 1.0;
        p.a2 = "dirichlet_laplacian";
        p.bound = InstanceBound::SqrtPoincareShifted;
        v.push_back(p);

        p = {};
        p.id = "ex51b";
        p.title = "mixed Dirichlet/Neumann wave coupled to a Dirichlet wave";
        p.a1 = "mixed_dirichlet_neumann_laplacian";
        p.a2 = "dirichlet_laplacian";
        v.push_back(p);

        p = {};
        p.id = "ex52";
        p.title = "free bi-Laplacian with shift coupled to a Dirichlet wave";
        p.a1 = "free_shift_bilaplacian";
        p.a1_shift = 1.0;
        p.a2 = "dirichlet_laplacian";
        p.approximate = true;  // form-level realization of the free plate conditions
        p.bound = InstanceBound::ShiftTimesPoincare;
        v.push_back(p);

        p = {};
        p.id = "ex53";
        p.title = "Robin wave coupled to a Dirichlet wave";
        p.a1 = "robin_laplacian";
        p.a2 = "dirichlet_laplacian";
        v.push_back(p);

        p = {};
        p.id = "ex54a";
        p.title = "Robin wave coupled to a hinged plate";
        p.a1 = "robin_laplacian";
        p.a2 = "navier_bilaplacian";
        p.bound = InstanceBound::PoincareThreeHalves;
        v.push_back(p);

        p = {};
        p.id = "ex54b";
        p.title = "Robin wave coupled to a clamped plate";
        p.a1 = "robin_laplacian";
        p.a2 = "clamped_bilaplacian";
        v.push_back(p);

        p = {};
        p.id = "ww";
        p.title = "identical shifted Dirichlet waves (A1 = A2)";
        p.a1 = "dirichlet_laplacian";
        p.a1_shift = 1.0;
        p.a2 = "dirichlet_laplacian";
        p.a2_shift = 1.0;
        p.predicted_r = 0.5;
        p.bound = InstanceBound::PoincarePlusKappa;
        v.push_back(p);

        p = {};
        p.id = "ww2";
        p.title = "hinged plate coupled to a Dirichlet wave (A1 = A2^2)";
        p.a1 = "navier_bilaplacian";
        p.a2 = "dirichlet_laplacian";
        p.predicted_r = 0.25;
        p.bound = InstanceBound::PoincareThreeHalves;
        v.push_back(p);

        p = {};
        p.id = "asym";
        p.title = "independent coupling coefficients (alpha1 = 2 alpha2)";
        p.a1 = "dirichlet_laplacian";
        p.a2 = "dirichlet_laplacian";
        p.alpha_ratio = 2.0;
        v.push_back(p);

        p = {};
        p.id = "remark-ii";
        p.title = "one-way coupling (alpha1 = 0), not stabilizable";
        p.a1 = "dirichlet_laplacian";
        p.a2 = "dirichlet_laplacian";
        p.one_way = true;
        v.push_back(p);

        return v;
    }();
    return presets;
}

const Preset& preset_by_id(const std::string& id) {
    for (const Preset& p : preset_catalog())
        if (p.id == id) return p;
    throw std::invalid_argument("unknown preset: " + id);
}

CoupledSystem build_system(const Preset& preset, int n, double alpha_frac) {
    using ops1d::make_operator;
    using ops1d::spec_from_name;
    const ops1d::OperatorSpec s1 = spec_from_name(preset.a1, n, preset.a1_shift);
    const ops1d::OperatorSpec s2 = spec_from_name(preset.a2, n, preset.a2_shift);
    SelfAdjointOperator a1 = make_operator(s1);
    SelfAdjointOperator a2 = make_operator(s2);
    const double alpha_max = std::sqrt(a1.omega() * a2.omega());
    DampingOperator b = preset.beta > 0.0 ? DampingOperator::scalar(preset.beta)
                                          : DampingOperator::zero();

    CoupledSystem sys = [&] {
        if (preset.one_way) {
            return CoupledSystem::assemble_diagnostic(std::move(a1), std::move(a2),
                                                      std::move(b), 0.0,
                                                      alpha_frac * alpha_max);
        }
        if (preset.alpha_ratio != 1.0) {
            const double root = std::sqrt(preset.alpha_ratio);
            return CoupledSystem::assemble(std::move(a1), std::move(a2), std::move(b),
                                           alpha_frac * root * alpha_max,
                                           alpha_frac / root * alpha_max);
        }
        return CoupledSystem::assemble(std::move(a1), std::move(a2), std::move(b),
                                       alpha_frac * alpha_max);
    }();
    sys.set_provenance(s1, s2);
    return sys;
}

double instance_bound_value(const Preset& preset, int n) {
    if (preset.bound == InstanceBound::None) return 0.0;
    const double c = ops1d::poincare_constant(ops1d::dirichlet_laplacian(n));
    switch (preset.bound) {
        case InstanceBound::SqrtPoincareShifted:
            return std::sqrt(c * (c + preset.a1_shift));
        case InstanceBound::ShiftTimesPoincare:
            return std::sqrt(preset.a1_shift * c);
        case InstanceBound::PoincarePlusKappa:
            return c + preset.a1_shift;
        case InstanceBound::PoincareThreeHalves:
            return std::pow(c, 1.5);
        case InstanceBound::None:
            break;
    }
    return 0.0;
}

std::string instance_bound_formula(InstanceBound bound) {
    switch (bound) {
        case InstanceBound::SqrtPoincareShifted:
            return "sqrt(C*(C+lambda))";
        case InstanceBound::ShiftTimesPoincare:
            return "sqrt(lambda*C)";
        case InstanceBound::PoincarePlusKappa:
            return "C+kappa";
        case InstanceBound::PoincareThreeHalves:
            return "C^(3/2)";
        case InstanceBound::None:
            break;
    }
    return "";
}

}  // namespace istab
