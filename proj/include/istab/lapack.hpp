#pragma once

#include <vector>

#include "istab/matrix.hpp"

namespace istab::la {

// Symmetric eigendecomposition, eigenvalues ascending, eigenvectors in the
// columns of `vectors` (Euclidean-orthonormal).
void sym_eig(const Matrix& a, Vector& values, Matrix& vectors);

struct RealEig {
    CVector values;
    CMatrix vectors;  // right eigenvectors in columns
};
// Eigendecomposition of a general real square matrix.
RealEig real_eig(const Matrix& a);

// Lower-triangular Cholesky factor of an SPD matrix.
Matrix cholesky(const Matrix& s);

// Solve L^T X = B (or L X = B) for lower-triangular L, B overwritten column-wise.
void tri_solve(const Matrix& l, bool transpose, Matrix& b);
void tri_solve(const Matrix& l, bool transpose, std::span<double> b);

// LU factorization with partial pivoting plus solves.
class LuFactors {
public:
    explicit LuFactors(Matrix a);
    void solve(std::span<double> b) const;      // in place, one rhs
    void solve_many(Matrix& b) const;           // in place, rhs in columns
    int dim() const { return lu_.rows; }

private:
    Matrix lu_;
    std::vector<int> piv_;
};

class ComplexLuFactors {
public:
    explicit ComplexLuFactors(CMatrix a);
    void solve(CVector& b) const;
    // 1-norm condition estimate of the factored matrix.
    double condition() const { return cond_; }

private:
    CMatrix lu_;
    std::vector<int> piv_;
    double cond_ = 0.0;
};

}  // namespace istab::la
