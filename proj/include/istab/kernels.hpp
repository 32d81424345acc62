#pragma once

#include <span>

#include "istab/matrix.hpp"

namespace istab::kernels {

// Production kernels parallelize over independent output rows, so results are
// bitwise identical for any thread count and for the serial fallback.
bool parallel_enabled();
void set_parallel(bool on);

// C = A * B
void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c);
// C = A * B^T
void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c);
// C = A^T * B
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c);
// y = M x
void gemv(const Matrix& m, std::span<const double> x, std::span<double> y);
// y = M^T x
void gemv_t(const Matrix& m, std::span<const double> x, std::span<double> y);

// out(k, i) = Re sum_j X(i,j) * exp(lambda_j * t_k) * w_j
void propagate_modes(const CMatrix& x, const CVector& lambda, const CVector& w,
                     std::span<const double> times, Matrix& out);
// Single-time variant of propagate_modes.
void propagate_one(const CMatrix& x, const CVector& lambda, const CVector& w,
                   double t, std::span<double> out);

// G = X^H X
void gram_ch(const CMatrix& x, CMatrix& g);

// Naive reference implementations with independent loop orders; used by the
// unit tests to cross-check the production kernels and by the benchmark
// target as the serial baseline.
namespace serial {
void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c);
void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c);
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c);
void gemv(const Matrix& m, std::span<const double> x, std::span<double> y);
void gemv_t(const Matrix& m, std::span<const double> x, std::span<double> y);
void propagate_modes(const CMatrix& x, const CVector& lambda, const CVector& w,
                     std::span<const double> times, Matrix& out);
void gram_ch(const CMatrix& x, CMatrix& g);
}  // namespace serial

}  // namespace istab::kernels
