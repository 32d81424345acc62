#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "istab/kernels.hpp"
#include "istab/random.hpp"
#include "istab/spectral.hpp"

using namespace istab;

namespace {

Matrix fd_dirichlet(int n) {
    const double h = 1.0 / (n + 1);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = 2.0 / (h * h);
        if (i > 0) m(i, i - 1) = -1.0 / (h * h);
        if (i + 1 < n) m(i, i + 1) = -1.0 / (h * h);
    }
    return m;
}

Matrix random_sym(int n, std::uint64_t seed) {
    NormalGen gen(seed);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            const double v = gen();
            m(i, j) = v;
            m(j, i) = v;
        }
    return m;
}

// power iteration on the weighted normal operator, independent of op_norm
double op_norm_power_iteration(const Matrix& m, const DiscreteHilbert& from,
                               const DiscreteHilbert& to, std::uint64_t seed) {
    NormalGen gen(seed);
    Vector x(from.dim);
    for (double& v : x) v = gen();
    double sigma = 0.0;
    Vector y(to.dim), z(from.dim);
    for (int it = 0; it < 2000; ++it) {
        kernels::gemv(m, x, y);
        kernels::gemv_t(m, y, z);
        const double f = to.weight / from.weight;
        for (double& v : z) v *= f;
        const double nz = norm2(z);
        if (nz == 0.0) return 0.0;
        sigma = std::sqrt(dot(x, z) / dot(x, x));
        for (std::size_t i = 0; i < z.size(); ++i) x[i] = z[i] / nz;
    }
    return sigma;
}

}  // namespace

TEST_CASE("diagonal and identity cases") {
    Matrix d(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 5.0;
    const SelfAdjointOperator op = eig_sym(d, {2, 1.0});
    CHECK(op.eigenvalues()[0] == doctest::Approx(2.0));
    CHECK(op.eigenvalues()[1] == doctest::Approx(5.0));
    CHECK(std::abs(op.eigenvectors()(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(op.eigenvectors()(1, 1)) == doctest::Approx(1.0));
    CHECK(op.eigenvectors()(1, 0) == doctest::Approx(0.0));

    const SelfAdjointOperator id3 = eig_sym(Matrix::identity(3), {3, 1.0});
    for (double mu : id3.eigenvalues()) CHECK(mu == doctest::Approx(1.0));
}

TEST_CASE("FD Dirichlet Laplacian eigenvalues match the closed form") {
    const int n = 8;
    const double h = 1.0 / 9.0;
    const SelfAdjointOperator op = eig_sym(fd_dirichlet(n), {n, h});
    for (int k = 1; k <= n; ++k) {
        const double mu = 4.0 / (h * h) * std::pow(std::sin(k * M_PI * h / 2.0), 2);
        CHECK(op.eigenvalues()[k - 1] == doctest::Approx(mu).epsilon(1e-12));
    }
}

TEST_CASE("eigen residual and weighted orthonormality invariants") {
    const int n = 24;
    const double h = 1.0 / (n + 1);
    const SelfAdjointOperator op = eig_sym(fd_dirichlet(n), {n, h});

    // strict per-pair residual (Laplacian-scale spectrum)
    Matrix mv;
    kernels::gemm_nn(op.matrix(), op.eigenvectors(), mv);
    for (int k = 0; k < n; ++k) {
        double res = 0.0, vn = 0.0;
        for (int i = 0; i < n; ++i) {
            const double r = mv(i, k) - op.eigenvalues()[k] * op.eigenvectors()(i, k);
            res += r * r;
            vn += op.eigenvectors()(i, k) * op.eigenvectors()(i, k);
        }
        CHECK(std::sqrt(res) <= 1e-9 * std::abs(op.eigenvalues()[k]) * std::sqrt(vn));
    }

    // V^T (h I) V = I
    Matrix vtv;
    kernels::gemm_tn(op.eigenvectors(), op.eigenvectors(), vtv);
    for (double& v : vtv.data) v *= h;
    CHECK(frobenius_diff(vtv, Matrix::identity(n)) < 1e-9);

    // reconstruction M = V diag(mu) V^T w
    Matrix scaled = op.eigenvectors();
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) scaled(i, j) *= op.eigenvalues()[j];
    Matrix recon;
    kernels::gemm_nt(scaled, op.eigenvectors(), recon);
    for (double& v : recon.data) v *= h;
    CHECK(frobenius_diff(recon, op.matrix()) <= 1e-9 * frobenius_norm(op.matrix()));
}

TEST_CASE("non-symmetric input is rejected with the defect reported") {
    Matrix m(3, 3);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0 + 1e-6;
    m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
    CHECK_THROWS_WITH_AS(static_cast<void>(eig_sym(m, {3, 1.0})),
                         doctest::Contains("not symmetric"), std::invalid_argument);
}

TEST_CASE("frac_power basics") {
    const int n = 12;
    const double h = 1.0 / (n + 1);
    const SelfAdjointOperator op = eig_sym(fd_dirichlet(n), {n, h});

    const Matrix p0 = frac_power(op, 0.0);
    CHECK(frobenius_diff(p0, Matrix::identity(n)) < 1e-10);

    Matrix half = frac_power(op, 0.5);
    Matrix sq;
    kernels::gemm_nn(half, half, sq);
    CHECK(frobenius_diff(sq, op.matrix()) <= 1e-9 * frobenius_norm(op.matrix()));

    Matrix inv = frac_power(op, -1.0);
    Matrix prod;
    kernels::gemm_nn(op.matrix(), inv, prod);
    CHECK(frobenius_diff(prod, Matrix::identity(n)) < 1e-10);

    for (int i = 0; i < half.rows; ++i)
        for (int j = 0; j < i; ++j) CHECK(half(i, j) == half(j, i));
}

TEST_CASE("frac_power domain errors") {
    Matrix m(2, 2);
    m(0, 0) = -1.0;
    m(1, 1) = 2.0;
    const SelfAdjointOperator op = eig_sym(m, {2, 1.0});
    CHECK_THROWS_AS(static_cast<void>(frac_power(op, 0.5)), std::domain_error);
    CHECK_THROWS_AS(static_cast<void>(frac_power(op, -1.0)), std::domain_error);
    CHECK_NOTHROW(static_cast<void>(frac_power(op, 2.0)));
}

TEST_CASE("spectral calculus group property") {
    const int n = 16;
    const double h = 1.0 / (n + 1);
    const SelfAdjointOperator op = eig_sym(fd_dirichlet(n), {n, h});
    const double exps[] = {-1.0, -0.5, 0.5, 1.0, 2.0};
    for (double a : exps)
        for (double b : exps) {
            Matrix pa = frac_power(op, a);
            Matrix pb = frac_power(op, b);
            Matrix prod;
            kernels::gemm_nn(pa, pb, prod);
            Matrix pab = frac_power(op, a + b);
            CHECK(frobenius_diff(prod, pab) <= 1e-8 * std::max(frobenius_norm(pab), 1.0));
        }
}

TEST_CASE("op_norm basics and power-iteration oracle") {
    const DiscreteHilbert s2{2, 1.0};
    CHECK(op_norm(Matrix::identity(2), s2, s2) == doctest::Approx(1.0));

    Matrix d(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    CHECK(op_norm(d, s2, s2) == doctest::Approx(3.0));

    // identity between different weights picks up the norm ratio
    const DiscreteHilbert from{2, 0.5}, to{2, 2.0};
    CHECK(op_norm(Matrix::identity(2), from, to) == doctest::Approx(2.0));

    const int n = 20;
    const Matrix m = random_sym(n, 3);
    const DiscreteHilbert sp{n, 1.0 / n};
    const double direct = op_norm(m, sp, sp);
    const double power = op_norm_power_iteration(m, sp, sp, 4);
    CHECK(direct == doctest::Approx(power).epsilon(1e-8));

    CHECK_THROWS_AS(static_cast<void>(op_norm(Matrix(2, 3), s2, s2)), std::invalid_argument);
}

TEST_CASE("op_norm is submultiplicative on random compatible pairs") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const int n = 10;
        const DiscreteHilbert sp{n, 0.1};
        const Matrix a = random_sym(n, seed);
        const Matrix b = random_sym(n, seed + 100);
        Matrix ab;
        kernels::gemm_nn(a, b, ab);
        CHECK(op_norm(ab, sp, sp) <=
              op_norm(a, sp, sp) * op_norm(b, sp, sp) * (1.0 + 1e-12));
    }
}

TEST_CASE("solve") {
    const int n = 10;
    const double h = 1.0 / (n + 1);
    const SelfAdjointOperator op = eig_sym(fd_dirichlet(n), {n, h});

    const Vector zero(n, 0.0);
    const Vector x0 = solve(op, zero);
    CHECK(norm2(x0) == 0.0);

    Matrix two = Matrix::identity(4);
    for (double& v : two.data) v *= 2.0;
    const SelfAdjointOperator op2 = eig_sym(two, {4, 1.0});
    Vector b(4, 3.0);
    const Vector x = solve(op2, b);
    for (double v : x) CHECK(v == doctest::Approx(1.5));

    // rhs = first eigenvector -> eigenvector / mu_1
    Vector v1(n);
    for (int i = 0; i < n; ++i) v1[i] = op.eigenvectors()(i, 0);
    const Vector sol = solve(op, v1);
    for (int i = 0; i < n; ++i)
        CHECK(sol[i] == doctest::Approx(v1[i] / op.eigenvalues()[0]).epsilon(1e-10));

    // residual check ||M x - rhs|| <= 1e-10 ||rhs||
    NormalGen gen(12);
    Vector rhs(n);
    for (double& v : rhs) v = gen();
    const Vector y = solve(op, rhs);
    const Vector my = op.apply(y);
    double res = 0.0;
    for (int i = 0; i < n; ++i) res += (my[i] - rhs[i]) * (my[i] - rhs[i]);
    CHECK(std::sqrt(res) <= 1e-10 * norm2(rhs));

    // singular operator rejected
    Matrix sing(2, 2);
    sing(0, 0) = 1.0;
    const SelfAdjointOperator ops = eig_sym(sing, {2, 1.0});
    CHECK_THROWS_AS(static_cast<void>(solve(ops, Vector(2, 1.0))), std::domain_error);
}
