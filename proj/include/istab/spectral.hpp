#pragma once

#include <span>

#include "istab/matrix.hpp"

namespace istab {

// Discrete Hilbert space with uniform quadrature weight:
// <x,y> = weight * sum_i x_i y_i.
struct DiscreteHilbert {
    int dim = 0;
    double weight = 1.0;
};

inline bool same_space(const DiscreteHilbert& a, const DiscreteHilbert& b) {
    return a.dim == b.dim && a.weight == b.weight;
}

double weighted_dot(const DiscreteHilbert& h, std::span<const double> x,
                    std::span<const double> y);
double weighted_norm(const DiscreteHilbert& h, std::span<const double> x);

// Self-adjoint operator on a DiscreteHilbert, stored together with its full
// eigendecomposition. With a uniform weight, Euclidean symmetry of the matrix
// is the same as weighted self-adjointness; the eigenvector basis is kept
// orthonormal in the weighted product.
class SelfAdjointOperator {
public:
    const DiscreteHilbert& space() const { return space_; }
    const Matrix& matrix() const { return matrix_; }
    const Vector& eigenvalues() const { return eigenvalues_; }  // ascending
    const Matrix& eigenvectors() const { return eigenvectors_; }  // columns
    double omega() const { return eigenvalues_.front(); }  // coercivity constant
    double spectral_norm() const;
    int dim() const { return space_.dim; }

    bool coercive() const;

    Vector apply(std::span<const double> x) const;  // M x

    // Spectral calculus: coefficients of x in the weighted eigenbasis,
    // application of A^s, and |A^s x|^2 without forming dense powers.
    Vector eigen_coefficients(std::span<const double> x) const;
    Vector apply_power(double s, std::span<const double> x) const;
    double power_norm_sq(double s, std::span<const double> x) const;

    friend SelfAdjointOperator eig_sym(Matrix m, DiscreteHilbert space);

private:
    DiscreteHilbert space_;
    Matrix matrix_;
    Vector eigenvalues_;
    Matrix eigenvectors_;
};

// Builds a SelfAdjointOperator from a symmetric matrix. Rejects non-symmetric
// input (symmetry defect reported) and verifies the eigen residuals.
SelfAdjointOperator eig_sym(Matrix m, DiscreteHilbert space);

// A^s as a dense symmetric matrix. Requires a strictly positive spectrum when
// s is negative or non-integer.
Matrix frac_power(const SelfAdjointOperator& op, double s);

// Largest singular value of M measured between the weighted spaces.
double op_norm(const Matrix& m, const DiscreteHilbert& from, const DiscreteHilbert& to);

// M^{-1} rhs through the eigendecomposition; rejects singular operators
// (omega <= 1e-12 * ||M||).
Vector solve(const SelfAdjointOperator& op, std::span<const double> rhs);

}  // namespace istab
