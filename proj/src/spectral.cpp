#include "istab/spectral.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "istab/kernels.hpp"
#include "istab/lapack.hpp"

namespace istab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool is_integer(double s) { return s == std::floor(s); }

}  // namespace

double weighted_dot(const DiscreteHilbert& h, std::span<const double> x,
                    std::span<const double> y) {
    if (int(x.size()) != h.dim || int(y.size()) != h.dim)
        throw std::invalid_argument("weighted_dot: dimension mismatch");
    return h.weight * dot(x, y);
}

double weighted_norm(const DiscreteHilbert& h, std::span<const double> x) {
    return std::sqrt(weighted_dot(h, x, x));
}

double SelfAdjointOperator::spectral_norm() const {
    return std::max(std::abs(eigenvalues_.front()), std::abs(eigenvalues_.back()));
}

bool SelfAdjointOperator::coercive() const {
    return omega() > 1e-12 * spectral_norm();
}

Vector SelfAdjointOperator::apply(std::span<const double> x) const {
    Vector y(space_.dim);
    kernels::gemv(matrix_, x, y);
    return y;
}

Vector SelfAdjointOperator::eigen_coefficients(std::span<const double> x) const {
    // c_k = <x, v_k>_w = weight * v_k . x
    Vector c(space_.dim);
    kernels::gemv_t(eigenvectors_, x, c);
    scale(space_.weight, c);
    return c;
}

Vector SelfAdjointOperator::apply_power(double s, std::span<const double> x) const {
    if (s < 0.0 || !is_integer(s)) {
        if (omega() <= 0.0)
            throw std::domain_error(
                "apply_power: nonpositive eigenvalue with fractional/negative exponent");
    }
    Vector c = eigen_coefficients(x);
    for (int k = 0; k < space_.dim; ++k) c[k] *= std::pow(eigenvalues_[k], s);
    Vector y(space_.dim);
    kernels::gemv(eigenvectors_, c, y);
    return y;
}

double SelfAdjointOperator::power_norm_sq(double s, std::span<const double> x) const {
    if (s < 0.0 || !is_integer(s)) {
        if (omega() <= 0.0)
            throw std::domain_error(
                "power_norm_sq: nonpositive eigenvalue with fractional/negative exponent");
    }
    Vector c = eigen_coefficients(x);
    double sum = 0.0;
    for (int k = 0; k < space_.dim; ++k)
        sum += std::pow(eigenvalues_[k], 2.0 * s) * c[k] * c[k];
    // coefficients are w.r.t. the weighted-orthonormal basis, so |y|^2_w = sum c^2
    return sum;
}

SelfAdjointOperator eig_sym(Matrix m, DiscreteHilbert space) {
    if (!m.square() || m.rows != space.dim)
        throw std::invalid_argument("eig_sym: matrix/space dimension mismatch");
    if (space.weight <= 0.0) throw std::invalid_argument("eig_sym: weight must be positive");

    const double scale_norm = frobenius_norm(m);
    double defect = 0.0;
    for (int i = 0; i < m.rows; ++i)
        for (int j = i + 1; j < m.cols; ++j) {
            const double d = m(i, j) - m(j, i);
            defect += 2.0 * d * d;
        }
    defect = std::sqrt(defect);
    if (defect > 1e-12 * std::max(scale_norm, kEps)) {
        std::ostringstream msg;
        msg << "eig_sym: matrix not symmetric, defect " << defect << " vs norm "
            << scale_norm;
        throw std::invalid_argument(msg.str());
    }

    SelfAdjointOperator op;
    op.space_ = space;
    op.matrix_ = std::move(m);
    la::sym_eig(op.matrix_, op.eigenvalues_, op.eigenvectors_);
    // renormalize against the weighted product
    const double inv_sqrt_w = 1.0 / std::sqrt(space.weight);
    for (double& v : op.eigenvectors_.data) v *= inv_sqrt_w;
    // deterministic sign convention (first significant component positive), so
    // bases are comparable across grid sizes and across operators sharing
    // eigenvectors
    for (int k = 0; k < space.dim; ++k) {
        double peak = 0.0;
        for (int i = 0; i < space.dim; ++i)
            peak = std::max(peak, std::abs(op.eigenvectors_(i, k)));
        for (int i = 0; i < space.dim; ++i) {
            const double v = op.eigenvectors_(i, k);
            if (std::abs(v) > 1e-8 * peak) {
                if (v < 0.0)
                    for (int j = 0; j < space.dim; ++j) op.eigenvectors_(j, k) *= -1.0;
                break;
            }
        }
    }

    // residual check per pair, with a machine floor for stiff spectra
    Matrix mv;
    kernels::gemm_nn(op.matrix_, op.eigenvectors_, mv);
    const double norm_m = std::max(std::abs(op.eigenvalues_.front()),
                                   std::abs(op.eigenvalues_.back()));
    for (int k = 0; k < space.dim; ++k) {
        double res = 0.0, vn = 0.0;
        for (int i = 0; i < space.dim; ++i) {
            const double r = mv(i, k) - op.eigenvalues_[k] * op.eigenvectors_(i, k);
            res += r * r;
            vn += op.eigenvectors_(i, k) * op.eigenvectors_(i, k);
        }
        res = std::sqrt(res);
        vn = std::sqrt(vn);
        const double tol = 1e-9 * std::abs(op.eigenvalues_[k]) * vn +
                           512.0 * kEps * norm_m * vn;
        if (res > tol) {
            std::ostringstream msg;
            msg << "eig_sym: eigen residual " << res << " exceeds tolerance " << tol
                << " for eigenvalue " << op.eigenvalues_[k];
            throw std::runtime_error(msg.str());
        }
    }
    return op;
}

Matrix frac_power(const SelfAdjointOperator& op, double s) {
    const int n = op.dim();
    if (s < 0.0 || !is_integer(s)) {
        if (op.omega() <= 0.0)
            throw std::domain_error(
                "frac_power: nonpositive eigenvalue with fractional/negative exponent");
    }
    // A^s = V diag(mu^s) (w V^T)
    Matrix scaled = op.eigenvectors();
    for (int j = 0; j < n; ++j) {
        const double f = std::pow(op.eigenvalues()[j], s);
        for (int i = 0; i < n; ++i) scaled(i, j) *= f;
    }
    Matrix result;
    kernels::gemm_nt(scaled, op.eigenvectors(), result);
    const double w = op.space().weight;
    for (double& v : result.data) v *= w;
    // symmetrize away rounding noise
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double m = 0.5 * (result(i, j) + result(j, i));
            result(i, j) = m;
            result(j, i) = m;
        }
    return result;
}

double op_norm(const Matrix& m, const DiscreteHilbert& from, const DiscreteHilbert& to) {
    if (m.cols != from.dim || m.rows != to.dim)
        throw std::invalid_argument("op_norm: dimension mismatch");
    Matrix gram;
    kernels::gemm_tn(m, m, gram);
    Vector values;
    Matrix vectors;
    la::sym_eig(gram, values, vectors);
    const double lmax = std::max(values.back(), 0.0);
    return std::sqrt(lmax * to.weight / from.weight);
}

Vector solve(const SelfAdjointOperator& op, std::span<const double> rhs) {
    if (int(rhs.size()) != op.dim()) throw std::invalid_argument("solve: dimension mismatch");
    if (op.omega() <= 1e-12 * op.spectral_norm())
        throw std::domain_error("solve: operator is singular within tolerance");
    return op.apply_power(-1.0, rhs);
}

}  // namespace istab
