#pragma once

#include <string>
#include <utility>

#include "istab/spectral.hpp"

namespace istab::ops1d {

enum class Symbol { Laplacian, Bilaplacian };

// Endpoint condition kinds. Navier/Clamped/Free apply to the bilaplacian.
enum class BC { Dirichlet, Neumann, Robin, Navier, Clamped, Free };

struct BoundaryCondition {
    BC left = BC::Dirichlet;
    BC right = BC::Dirichlet;
};

// Discrete elliptic operator on (0,1). Dirichlet-type layouts use n interior
// vertex nodes with spacing 1/(n+1); Neumann/Robin-type layouts use n
// cell-centered nodes with spacing 1/n and ghost-cell elimination.
struct OperatorSpec {
    Symbol symbol = Symbol::Laplacian;
    BoundaryCondition bc;
    double shift = 0.0;  // lambda >= 0
    int n = 64;
};

// Catalog entries addressable by string identifier.
OperatorSpec dirichlet_laplacian(int n, double shift = 0.0);
OperatorSpec neumann_shift_laplacian(int n, double shift);
OperatorSpec robin_laplacian(int n, double shift = 0.0);
OperatorSpec mixed_dirichlet_neumann_laplacian(int n, double shift = 0.0);
OperatorSpec navier_bilaplacian(int n, double shift = 0.0);
OperatorSpec clamped_bilaplacian(int n, double shift = 0.0);
OperatorSpec free_shift_bilaplacian(int n, double shift);

OperatorSpec spec_from_name(const std::string& name, int n, double shift);
std::string catalog_name(const OperatorSpec& spec);
const std::vector<std::string>& catalog_names();

SelfAdjointOperator make_operator(const OperatorSpec& spec);

// Discrete best constant of the associated quadratic form (the smallest
// eigenvalue of the operator).
double poincare_constant(const OperatorSpec& spec);

// alpha_max = sqrt(omega1 * omega2); both operators must be coercive.
double alpha_max(const OperatorSpec& a1, const OperatorSpec& a2);

}  // namespace istab::ops1d
