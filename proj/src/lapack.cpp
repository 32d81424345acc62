#include "istab/lapack.hpp"

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace istab::la {

namespace {

void check_info(int info, const char* routine) {
    if (info != 0)
        throw std::runtime_error(std::string(routine) + " failed, info = " + std::to_string(info));
}

double one_norm(const CMatrix& a) {
    double best = 0.0;
    for (int j = 0; j < a.cols; ++j) {
        double s = 0.0;
        for (int i = 0; i < a.rows; ++i) s += std::abs(a(i, j));
        best = std::max(best, s);
    }
    return best;
}

}  // namespace

void sym_eig(const Matrix& a, Vector& values, Matrix& vectors) {
    if (!a.square()) throw std::invalid_argument("sym_eig: matrix must be square");
    const int n = a.rows;
    vectors = a;
    values.assign(n, 0.0);
    int info = LAPACKE_dsyev(LAPACK_ROW_MAJOR, 'V', 'U', n, vectors.data.data(), n,
                             values.data());
    check_info(info, "dsyev");
    // eigenvectors come back in the columns
}

RealEig real_eig(const Matrix& a) {
    if (!a.square()) throw std::invalid_argument("real_eig: matrix must be square");
    const int n = a.rows;
    Matrix work = a;
    Vector wr(n), wi(n), vr(std::size_t(n) * n);
    int info = LAPACKE_dgeev(LAPACK_ROW_MAJOR, 'N', 'V', n, work.data.data(), n,
                             wr.data(), wi.data(), nullptr, n, vr.data(), n);
    check_info(info, "dgeev");

    RealEig out;
    out.values.resize(n);
    out.vectors = CMatrix(n, n);
    int j = 0;
    while (j < n) {
        if (wi[j] == 0.0) {
            out.values[j] = Complex(wr[j], 0.0);
            for (int i = 0; i < n; ++i)
                out.vectors(i, j) = Complex(vr[std::size_t(i) * n + j], 0.0);
            ++j;
        } else {
            // conjugate pair packed in columns j, j+1
            out.values[j] = Complex(wr[j], wi[j]);
            out.values[j + 1] = Complex(wr[j + 1], wi[j + 1]);
            for (int i = 0; i < n; ++i) {
                const double re = vr[std::size_t(i) * n + j];
                const double im = vr[std::size_t(i) * n + j + 1];
                out.vectors(i, j) = Complex(re, im);
                out.vectors(i, j + 1) = Complex(re, -im);
            }
            j += 2;
        }
    }
    return out;
}

Matrix cholesky(const Matrix& s) {
    if (!s.square()) throw std::invalid_argument("cholesky: matrix must be square");
    Matrix l = s;
    int info = LAPACKE_dpotrf(LAPACK_ROW_MAJOR, 'L', s.rows, l.data.data(), s.cols);
    check_info(info, "dpotrf");
    for (int i = 0; i < l.rows; ++i)
        for (int j = i + 1; j < l.cols; ++j) l(i, j) = 0.0;
    return l;
}

void tri_solve(const Matrix& l, bool transpose, Matrix& b) {
    if (l.rows != b.rows) throw std::invalid_argument("tri_solve: shape mismatch");
    int info = LAPACKE_dtrtrs(LAPACK_ROW_MAJOR, 'L', transpose ? 'T' : 'N', 'N',
                              l.rows, b.cols, l.data.data(), l.cols,
                              b.data.data(), b.cols);
    check_info(info, "dtrtrs");
}

void tri_solve(const Matrix& l, bool transpose, std::span<double> b) {
    if (l.rows != int(b.size())) throw std::invalid_argument("tri_solve: shape mismatch");
    int info = LAPACKE_dtrtrs(LAPACK_ROW_MAJOR, 'L', transpose ? 'T' : 'N', 'N',
                              l.rows, 1, l.data.data(), l.cols, b.data(), 1);
    check_info(info, "dtrtrs");
}

LuFactors::LuFactors(Matrix a) : lu_(std::move(a)), piv_(lu_.rows) {
    if (!lu_.square()) throw std::invalid_argument("LuFactors: matrix must be square");
    int info = LAPACKE_dgetrf(LAPACK_ROW_MAJOR, lu_.rows, lu_.cols, lu_.data.data(),
                              lu_.cols, piv_.data());
    check_info(info, "dgetrf");
}

void LuFactors::solve(std::span<double> b) const {
    if (int(b.size()) != lu_.rows) throw std::invalid_argument("LuFactors::solve: size mismatch");
    int info = LAPACKE_dgetrs(LAPACK_ROW_MAJOR, 'N', lu_.rows, 1, lu_.data.data(),
                              lu_.cols, piv_.data(), b.data(), 1);
    check_info(info, "dgetrs");
}

void LuFactors::solve_many(Matrix& b) const {
    if (b.rows != lu_.rows) throw std::invalid_argument("LuFactors::solve_many: size mismatch");
    int info = LAPACKE_dgetrs(LAPACK_ROW_MAJOR, 'N', lu_.rows, b.cols, lu_.data.data(),
                              lu_.cols, piv_.data(), b.data.data(), b.cols);
    check_info(info, "dgetrs");
}

ComplexLuFactors::ComplexLuFactors(CMatrix a) : lu_(std::move(a)), piv_(lu_.rows) {
    if (lu_.rows != lu_.cols)
        throw std::invalid_argument("ComplexLuFactors: matrix must be square");
    const double anorm = one_norm(lu_);
    int info = LAPACKE_zgetrf(LAPACK_ROW_MAJOR, lu_.rows, lu_.cols, lu_.data.data(),
                              lu_.cols, piv_.data());
    check_info(info, "zgetrf");
    double rcond = 0.0;
    info = LAPACKE_zgecon(LAPACK_ROW_MAJOR, '1', lu_.rows, lu_.data.data(), lu_.cols,
                          anorm, &rcond);
    check_info(info, "zgecon");
    cond_ = (rcond > 0.0) ? 1.0 / rcond : std::numeric_limits<double>::infinity();
}

void ComplexLuFactors::solve(CVector& b) const {
    if (int(b.size()) != lu_.rows)
        throw std::invalid_argument("ComplexLuFactors::solve: size mismatch");
    int info = LAPACKE_zgetrs(LAPACK_ROW_MAJOR, 'N', lu_.rows, 1, lu_.data.data(),
                              lu_.cols, piv_.data(), b.data(), 1);
    check_info(info, "zgetrs");
}

}  // namespace istab::la
