#include "istab/operators1d.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "istab/kernels.hpp"

namespace istab::ops1d {

namespace {

// Interior-node (Dirichlet-type) layout: h = 1/(n+1), boundary values
// eliminated. Cell-centered (Neumann/Robin-type) layout: h = 1/n, boundary
// conditions folded into the stencil by ghost-cell elimination.

Matrix laplacian_dirichlet(int n) {
    const double h = 1.0 / (n + 1);
    const double s = 1.0 / (h * h);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = 2.0 * s;
        if (i > 0) m(i, i - 1) = -s;
        if (i + 1 < n) m(i, i + 1) = -s;
    }
    return m;
}

Matrix laplacian_neumann(int n) {
    const double h = 1.0 / n;
    const double s = 1.0 / (h * h);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = 2.0 * s;
        if (i > 0) m(i, i - 1) = -s;
        if (i + 1 < n) m(i, i + 1) = -s;
    }
    // reflected ghost cells remove one difference at each end
    m(0, 0) = s;
    m(n - 1, n - 1) = s;
    return m;
}

Matrix laplacian_robin(int n) {
    // Robin condition with coefficient 1 on the outward normal:
    // -u'(0) + u(0) = 0 and u'(1) + u(1) = 0, ghost value
    // u_{-1} = u_0 (2-h)/(2+h).
    const double h = 1.0 / n;
    const double s = 1.0 / (h * h);
    Matrix m = laplacian_neumann(n);
    const double edge = s * 2.0 * h / (2.0 + h);
    m(0, 0) += edge;
    m(n - 1, n - 1) += edge;
    return m;
}

Matrix laplacian_mixed(int n) {
    // Dirichlet at x=0 (ghost u_{-1} = -u_0), Neumann at x=1.
    const double h = 1.0 / n;
    const double s = 1.0 / (h * h);
    Matrix m = laplacian_neumann(n);
    m(0, 0) = 3.0 * s;
    return m;
}

Matrix bilaplacian_clamped(int n) {
    // u = u' = 0 at both ends: boundary node value vanishes, ghost reflects.
    const double h = 1.0 / (n + 1);
    const double s = 1.0 / (h * h * h * h);
    Matrix m(n, n);
    auto add = [&](int i, int j, double c) {
        if (j >= 0 && j < n) m(i, j) += c * s;
    };
    for (int i = 0; i < n; ++i) {
        add(i, i - 2, 1.0);
        add(i, i - 1, -4.0);
        add(i, i, 6.0);
        add(i, i + 1, -4.0);
        add(i, i + 2, 1.0);
    }
    m(0, 0) += s;          // ghost u(-h) = u(h)
    m(n - 1, n - 1) += s;  // mirrored at the right end
    return m;
}

void add_shift(Matrix& m, double shift) {
    for (int i = 0; i < m.rows; ++i) m(i, i) += shift;
}

struct Layout {
    Matrix matrix;
    double h;
};

Layout build(const OperatorSpec& spec) {
    const int n = spec.n;
    if (spec.symbol == Symbol::Laplacian) {
        if (spec.bc.left == BC::Dirichlet && spec.bc.right == BC::Dirichlet)
            return {laplacian_dirichlet(n), 1.0 / (n + 1)};
        if (spec.bc.left == BC::Neumann && spec.bc.right == BC::Neumann) {
            if (spec.shift <= 0.0)
                throw std::invalid_argument(
                    "make_operator: pure Neumann Laplacian without shift is not coercive");
            return {laplacian_neumann(n), 1.0 / n};
        }
        if (spec.bc.left == BC::Robin && spec.bc.right == BC::Robin)
            return {laplacian_robin(n), 1.0 / n};
        if (spec.bc.left == BC::Dirichlet && spec.bc.right == BC::Neumann)
            return {laplacian_mixed(n), 1.0 / n};
    } else {
        if (spec.bc.left == BC::Navier && spec.bc.right == BC::Navier) {
            // matrix square of the Dirichlet Laplacian, same construction path
            const Matrix d = laplacian_dirichlet(n);
            Matrix sq;
            kernels::gemm_nn(d, d, sq);
            return {std::move(sq), 1.0 / (n + 1)};
        }
        if (spec.bc.left == BC::Clamped && spec.bc.right == BC::Clamped)
            return {bilaplacian_clamped(n), 1.0 / (n + 1)};
        if (spec.bc.left == BC::Free && spec.bc.right == BC::Free) {
            if (spec.shift <= 0.0)
                throw std::invalid_argument(
                    "make_operator: free bi-Laplacian requires a positive shift");
            const Matrix nn = laplacian_neumann(n);
            Matrix sq;
            kernels::gemm_nn(nn, nn, sq);
            return {std::move(sq), 1.0 / n};
        }
    }
    throw std::invalid_argument("make_operator: unsupported boundary condition combination");
}

}  // namespace

OperatorSpec dirichlet_laplacian(int n, double shift) {
    return {Symbol::Laplacian, {BC::Dirichlet, BC::Dirichlet}, shift, n};
}
OperatorSpec neumann_shift_laplacian(int n, double shift) {
    return {Symbol::Laplacian, {BC::Neumann, BC::Neumann}, shift, n};
}
OperatorSpec robin_laplacian(int n, double shift) {
    return {Symbol::Laplacian, {BC::Robin, BC::Robin}, shift, n};
}
OperatorSpec mixed_dirichlet_neumann_laplacian(int n, double shift) {
    return {Symbol::Laplacian, {BC::Dirichlet, BC::Neumann}, shift, n};
}
OperatorSpec navier_bilaplacian(int n, double shift) {
    return {Symbol::Bilaplacian, {BC::Navier, BC::Navier}, shift, n};
}
OperatorSpec clamped_bilaplacian(int n, double shift) {
    return {Symbol::Bilaplacian, {BC::Clamped, BC::Clamped}, shift, n};
}
OperatorSpec free_shift_bilaplacian(int n, double shift) {
    return {Symbol::Bilaplacian, {BC::Free, BC::Free}, shift, n};
}

const std::vector<std::string>& catalog_names() {
    static const std::vector<std::string> names = {
        "dirichlet_laplacian",
        "neumann_shift_laplacian",
        "robin_laplacian",
        "mixed_dirichlet_neumann_laplacian",
        "navier_bilaplacian",
        "clamped_bilaplacian",
        "free_shift_bilaplacian",
    };
    return names;
}

OperatorSpec spec_from_name(const std::string& name, int n, double shift) {
    if (name == "dirichlet_laplacian") return dirichlet_laplacian(n, shift);
    if (name == "neumann_shift_laplacian") return neumann_shift_laplacian(n, shift);
    if (name == "robin_laplacian") return robin_laplacian(n, shift);
    if (name == "mixed_dirichlet_neumann_laplacian")
        return mixed_dirichlet_neumann_laplacian(n, shift);
    if (name == "navier_bilaplacian") return navier_bilaplacian(n, shift);
    if (name == "clamped_bilaplacian") return clamped_bilaplacian(n, shift);
    if (name == "free_shift_bilaplacian") return free_shift_bilaplacian(n, shift);
    throw std::invalid_argument("unknown operator catalog entry: " + name);
}

std::string catalog_name(const OperatorSpec& spec) {
    if (spec.symbol == Symbol::Laplacian) {
        if (spec.bc.left == BC::Dirichlet && spec.bc.right == BC::Dirichlet)
            return "dirichlet_laplacian";
        if (spec.bc.left == BC::Neumann) return "neumann_shift_laplacian";
        if (spec.bc.left == BC::Robin) return "robin_laplacian";
        if (spec.bc.left == BC::Dirichlet && spec.bc.right == BC::Neumann)
            return "mixed_dirichlet_neumann_laplacian";
    } else {
        if (spec.bc.left == BC::Navier) return "navier_bilaplacian";
        if (spec.bc.left == BC::Clamped) return "clamped_bilaplacian";
        if (spec.bc.left == BC::Free) return "free_shift_bilaplacian";
    }
    return "unknown";
}

SelfAdjointOperator make_operator(const OperatorSpec& spec) {
    if (spec.n < 4) throw std::invalid_argument("make_operator: n must be at least 4");
    if (spec.shift < 0.0) throw std::invalid_argument("make_operator: shift must be >= 0");
    Layout layout = build(spec);
    add_shift(layout.matrix, spec.shift);
    SelfAdjointOperator op =
        eig_sym(std::move(layout.matrix), DiscreteHilbert{spec.n, layout.h});
    if (!op.coercive())
        throw std::invalid_argument("make_operator: resulting operator is not coercive");
    return op;
}

double poincare_constant(const OperatorSpec& spec) {
    return make_operator(spec).omega();
}

double alpha_max(const OperatorSpec& a1, const OperatorSpec& a2) {
    const SelfAdjointOperator op1 = make_operator(a1);
    const SelfAdjointOperator op2 = make_operator(a2);
    if (!op1.coercive() || !op2.coercive())
        throw std::invalid_argument("alpha_max: operators must be coercive");
    return std::sqrt(op1.omega() * op2.omega());
}

}  // namespace istab::ops1d
