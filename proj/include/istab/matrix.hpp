#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace istab {

using Vector = std::vector<double>;
using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

// Dense row-major matrix.
struct Matrix {
    int rows = 0, cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c)
        : rows(r), cols(c), data(std::size_t(r) * std::size_t(c), 0.0) {}

    double& operator()(int i, int j) { return data[std::size_t(i) * cols + j]; }
    const double& operator()(int i, int j) const { return data[std::size_t(i) * cols + j]; }

    double* row(int i) { return data.data() + std::size_t(i) * cols; }
    const double* row(int i) const { return data.data() + std::size_t(i) * cols; }

    bool square() const { return rows == cols; }

    static Matrix identity(int n) {
        Matrix eye(n, n);
        for (int i = 0; i < n; ++i) eye(i, i) = 1.0;
        return eye;
    }

    Matrix transposed() const {
        Matrix t(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
        return t;
    }
};

// Dense row-major complex matrix.
struct CMatrix {
    int rows = 0, cols = 0;
    CVector data;

    CMatrix() = default;
    CMatrix(int r, int c) : rows(r), cols(c), data(std::size_t(r) * std::size_t(c)) {}

    Complex& operator()(int i, int j) { return data[std::size_t(i) * cols + j]; }
    const Complex& operator()(int i, int j) const { return data[std::size_t(i) * cols + j]; }
};

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);
void scale(double a, std::span<double> x);

double frobenius_norm(const Matrix& m);
double max_abs(const Matrix& m);
// ||A - B||_F
double frobenius_diff(const Matrix& a, const Matrix& b);

}  // namespace istab
