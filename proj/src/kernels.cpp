#include "istab/kernels.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

namespace istab::kernels {

namespace {

std::atomic<bool> g_parallel{true};

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// One output row of C = A * B, accumulated in k-then-j order.
inline void gemm_nn_row(const Matrix& a, const Matrix& b, Matrix& c, int i) {
    double* ci = c.row(i);
    for (int j = 0; j < c.cols; ++j) ci[j] = 0.0;
    const double* ai = a.row(i);
    for (int k = 0; k < a.cols; ++k) {
        const double aik = ai[k];
        const double* bk = b.row(k);
        for (int j = 0; j < c.cols; ++j) ci[j] += aik * bk[j];
    }
}

inline void gemm_nt_row(const Matrix& a, const Matrix& b, Matrix& c, int i) {
    const double* ai = a.row(i);
    double* ci = c.row(i);
    for (int j = 0; j < c.cols; ++j) {
        const double* bj = b.row(j);
        double s = 0.0;
        for (int k = 0; k < a.cols; ++k) s += ai[k] * bj[k];
        ci[j] = s;
    }
}

inline void gemm_tn_row(const Matrix& a, const Matrix& b, Matrix& c, int i) {
    double* ci = c.row(i);
    for (int j = 0; j < c.cols; ++j) ci[j] = 0.0;
    for (int k = 0; k < a.rows; ++k) {
        const double aki = a(k, i);
        const double* bk = b.row(k);
        for (int j = 0; j < c.cols; ++j) ci[j] += aki * bk[j];
    }
}

inline void propagate_row(const CMatrix& x, const CVector& lambda, const CVector& w,
                          double t, double* out) {
    const int dim = x.rows;
    CVector s(dim);
    for (int j = 0; j < dim; ++j) s[j] = std::exp(lambda[j] * t) * w[j];
    for (int i = 0; i < dim; ++i) {
        Complex acc{0.0, 0.0};
        const Complex* xi = &x.data[std::size_t(i) * dim];
        for (int j = 0; j < dim; ++j) acc += xi[j] * s[j];
        out[i] = acc.real();
    }
}

inline void gram_row(const CMatrix& x, CMatrix& g, int i) {
    const int n = x.cols;
    for (int j = 0; j < n; ++j) {
        Complex acc{0.0, 0.0};
        for (int k = 0; k < x.rows; ++k) acc += std::conj(x(k, i)) * x(k, j);
        g(i, j) = acc;
    }
}

}  // namespace

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }
void set_parallel(bool on) { g_parallel.store(on, std::memory_order_relaxed); }

void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c) {
    require(a.cols == b.rows, "gemm_nn: inner dimension mismatch");
    c = Matrix(a.rows, b.cols);
    if (parallel_enabled()) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < a.rows; ++i) gemm_nn_row(a, b, c, i);
    } else {
        for (int i = 0; i < a.rows; ++i) gemm_nn_row(a, b, c, i);
    }
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c) {
    require(a.cols == b.cols, "gemm_nt: inner dimension mismatch");
    c = Matrix(a.rows, b.rows);
    if (parallel_enabled()) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < a.rows; ++i) gemm_nt_row(a, b, c, i);
    } else {
        for (int i = 0; i < a.rows; ++i) gemm_nt_row(a, b, c, i);
    }
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c) {
    require(a.rows == b.rows, "gemm_tn: inner dimension mismatch");
    c = Matrix(a.cols, b.cols);
    if (parallel_enabled()) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < a.cols; ++i) gemm_tn_row(a, b, c, i);
    } else {
        for (int i = 0; i < a.cols; ++i) gemm_tn_row(a, b, c, i);
    }
}

void gemv(const Matrix& m, std::span<const double> x, std::span<double> y) {
    require(int(x.size()) == m.cols && int(y.size()) == m.rows, "gemv: shape mismatch");
    for (int i = 0; i < m.rows; ++i) {
        const double* mi = m.row(i);
        double s = 0.0;
        for (int j = 0; j < m.cols; ++j) s += mi[j] * x[j];
        y[i] = s;
    }
}

void gemv_t(const Matrix& m, std::span<const double> x, std::span<double> y) {
    require(int(x.size()) == m.rows && int(y.size()) == m.cols, "gemv_t: shape mismatch");
    for (int j = 0; j < m.cols; ++j) y[j] = 0.0;
    for (int i = 0; i < m.rows; ++i) {
        const double* mi = m.row(i);
        const double xi = x[i];
        for (int j = 0; j < m.cols; ++j) y[j] += xi * mi[j];
    }
}

void propagate_modes(const CMatrix& x, const CVector& lambda, const CVector& w,
                     std::span<const double> times, Matrix& out) {
    require(x.rows == x.cols, "propagate_modes: X must be square");
    require(int(lambda.size()) == x.rows && int(w.size()) == x.rows,
            "propagate_modes: mode count mismatch");
    const int nt = int(times.size());
    out = Matrix(nt, x.rows);
    if (parallel_enabled()) {
#pragma omp parallel for schedule(static)
        for (int k = 0; k < nt; ++k) propagate_row(x, lambda, w, times[k], out.row(k));
    } else {
        for (int k = 0; k < nt; ++k) propagate_row(x, lambda, w, times[k], out.row(k));
    }
}

void propagate_one(const CMatrix& x, const CVector& lambda, const CVector& w,
                   double t, std::span<double> out) {
    require(int(out.size()) == x.rows, "propagate_one: output size mismatch");
    propagate_row(x, lambda, w, t, out.data());
}

void gram_ch(const CMatrix& x, CMatrix& g) {
    g = CMatrix(x.cols, x.cols);
    if (parallel_enabled()) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < x.cols; ++i) gram_row(x, g, i);
    } else {
        for (int i = 0; i < x.cols; ++i) gram_row(x, g, i);
    }
}

namespace serial {

void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c) {
    require(a.cols == b.rows, "gemm_nn: inner dimension mismatch");
    c = Matrix(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < b.cols; ++j) {
            double s = 0.0;
            for (int k = 0; k < a.cols; ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c) {
    require(a.cols == b.cols, "gemm_nt: inner dimension mismatch");
    c = Matrix(a.rows, b.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < b.rows; ++j) {
            double s = 0.0;
            for (int k = 0; k < a.cols; ++k) s += a(i, k) * b(j, k);
            c(i, j) = s;
        }
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c) {
    require(a.rows == b.rows, "gemm_tn: inner dimension mismatch");
    c = Matrix(a.cols, b.cols);
    for (int i = 0; i < a.cols; ++i)
        for (int j = 0; j < b.cols; ++j) {
            double s = 0.0;
            for (int k = 0; k < a.rows; ++k) s += a(k, i) * b(k, j);
            c(i, j) = s;
        }
}

void gemv(const Matrix& m, std::span<const double> x, std::span<double> y) {
    require(int(x.size()) == m.cols && int(y.size()) == m.rows, "gemv: shape mismatch");
    for (int i = 0; i < m.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < m.cols; ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
}

void gemv_t(const Matrix& m, std::span<const double> x, std::span<double> y) {
    require(int(x.size()) == m.rows && int(y.size()) == m.cols, "gemv_t: shape mismatch");
    for (int j = 0; j < m.cols; ++j) {
        double s = 0.0;
        for (int i = 0; i < m.rows; ++i) s += m(i, j) * x[i];
        y[j] = s;
    }
}

void propagate_modes(const CMatrix& x, const CVector& lambda, const CVector& w,
                     std::span<const double> times, Matrix& out) {
    const int nt = int(times.size());
    out = Matrix(nt, x.rows);
    for (int k = 0; k < nt; ++k) {
        for (int i = 0; i < x.rows; ++i) {
            Complex acc{0.0, 0.0};
            for (int j = 0; j < x.cols; ++j)
                acc += x(i, j) * std::exp(lambda[j] * times[k]) * w[j];
            out(k, i) = acc.real();
        }
    }
}

void gram_ch(const CMatrix& x, CMatrix& g) {
    g = CMatrix(x.cols, x.cols);
    for (int i = 0; i < x.cols; ++i)
        for (int j = 0; j < x.cols; ++j) {
            Complex acc{0.0, 0.0};
            for (int k = 0; k < x.rows; ++k) acc += std::conj(x(k, i)) * x(k, j);
            g(i, j) = acc;
        }
}

}  // namespace serial

}  // namespace istab::kernels
