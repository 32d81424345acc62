#include "istab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <ostream>
#include <stdexcept>

#include "istab/kernels.hpp"

namespace istab {

namespace {

constexpr double kDefectiveCondition = 1e12;

// (e^{sigma t} - 1) / sigma with the sigma -> 0 limit
Complex phi(Complex sigma, double t) {
    if (std::abs(sigma) * t < 1e-8) return t * (1.0 + 0.5 * sigma * t);
    return (std::exp(sigma * t) - 1.0) / sigma;
}

}  // namespace

SemigroupSolver::SemigroupSolver(const CoupledSystem& sys)
    : n_(sys.dim()), weight_(sys.space().weight), b_(sys.damping()) {
    using Form = CoupledSystem::EnergyForm;
    const int n = n_;
    const double h = weight_;
    const double a1 = sys.alpha1(), a2 = sys.alpha2();

    double cross = 0.0;
    switch (sys.form()) {
        case Form::Symmetric:
            c1_ = 1.0;
            c2_ = 1.0;
            cross = a1;
            break;
        case Form::Asymmetric:
            c1_ = a2;
            c2_ = a1;
            cross = a1 * a2;
            break;
        case Form::PlainSum:
            c1_ = 1.0;
            c2_ = 1.0;
            cross = 0.0;
            break;
    }
    sqrt_j1_ = std::sqrt(h * c1_);
    sqrt_j2_ = std::sqrt(h * c2_);

    // position Gram block S = h [[c1 A1, cross I], [cross I, c2 A2]]
    Matrix s(2 * n, 2 * n);
    const Matrix& m1 = sys.a1().matrix();
    const Matrix& m2 = sys.a2().matrix();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            s(i, j) = h * c1_ * m1(i, j);
            s(n + i, n + j) = h * c2_ * m2(i, j);
        }
        s(i, n + i) = h * cross;
        s(n + i, i) = h * cross;
    }
    ls_ = la::cholesky(s);

    // stiffness block K = [[-A1, -a1 I], [-a2 I, -A2]]
    Matrix k(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            k(i, j) = -m1(i, j);
            k(n + i, n + j) = -m2(i, j);
        }
        k(i, n + i) -= a1;
        k(n + i, i) -= a2;
    }

    // balanced generator: [[0, Ls^T J^{-1/2}], [J^{1/2} K Ls^{-T}, D]]
    Matrix kt = k.transposed();
    la::tri_solve(ls_, false, kt);  // kt = Ls^{-1} K^T, so kt^T = K Ls^{-T}
    Matrix ghat(4 * n, 4 * n);
    for (int i = 0; i < 2 * n; ++i) {
        const double ji = (i < n) ? sqrt_j1_ : sqrt_j2_;
        for (int j = 0; j < 2 * n; ++j) {
            const double jj = (j < n) ? sqrt_j1_ : sqrt_j2_;
            // top-right: (Ls^T)_{ij} / j-scale; Ls^T is upper triangular
            ghat(i, 2 * n + j) = ls_(j, i) / jj;
            // bottom-left: j-scale * (K Ls^{-T})_{ij}
            ghat(2 * n + i, j) = ji * kt(j, i);
        }
    }
    if (b_.is_scalar()) {
        for (int i = 0; i < n; ++i) ghat(2 * n + i, 2 * n + i) -= b_.beta();
    } else {
        const Matrix& bm = *b_.matrix();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) ghat(2 * n + i, 2 * n + j) -= bm(i, j);
    }

    la::RealEig eig = la::real_eig(ghat);
    lambda_ = std::move(eig.values);
    x_ = std::move(eig.vectors);
    // All systems built here are contractions or marginally stable; rounding
    // can push eigenvalues across the imaginary axis, which would manufacture
    // growth over long horizons.
    for (Complex& l : lambda_)
        if (l.real() > 0.0) l = Complex(0.0, l.imag());

    xlu_ = std::make_unique<la::ComplexLuFactors>(x_);
    cond_ = xlu_->condition();
    defective_ = !(cond_ < kDefectiveCondition);

    // Gram of the damping form: Q = (1/c1) diag(0, 0, B, 0) on balanced coords
    if (b_.beta() > 0.0 || !b_.is_scalar()) {
        CMatrix xp(n, 4 * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < 4 * n; ++j) xp(i, j) = x_(2 * n + i, j);
        if (!b_.is_scalar()) {
            // scale rows by B^{1/2}: form X_p^H B X_p via B X_p
            const Matrix& bm = *b_.matrix();
            CMatrix bxp(n, 4 * n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < 4 * n; ++j) {
                    Complex acc{0.0, 0.0};
                    for (int l = 0; l < n; ++l) acc += bm(i, l) * xp(l, j);
                    bxp(i, j) = acc;
                }
            diss_gram_ = CMatrix(4 * n, 4 * n);
            for (int i = 0; i < 4 * n; ++i)
                for (int j = 0; j < 4 * n; ++j) {
                    Complex acc{0.0, 0.0};
                    for (int l = 0; l < n; ++l) acc += std::conj(xp(l, i)) * bxp(l, j);
                    diss_gram_(i, j) = acc / c1_;
                }
        } else {
            kernels::gram_ch(xp, diss_gram_);
            const double f = b_.beta() / c1_;
            for (Complex& v : diss_gram_.data) v *= f;
        }
    }
}

Vector SemigroupSolver::balanced(const State& s) const {
    const int n = n_;
    Vector y(std::size_t(4) * n);
    Vector pos(std::size_t(2) * n);
    for (int i = 0; i < n; ++i) {
        pos[i] = s.u[i];
        pos[n + i] = s.v[i];
    }
    Vector ypos(std::size_t(2) * n);
    kernels::gemv_t(ls_, pos, ypos);  // Ls^T pos
    for (int i = 0; i < 2 * n; ++i) y[i] = ypos[i];
    for (int i = 0; i < n; ++i) {
        y[2 * n + i] = sqrt_j1_ * s.p[i];
        y[3 * n + i] = sqrt_j2_ * s.q[i];
    }
    return y;
}

State SemigroupSolver::state_from_y(std::span<const double> y) const {
    const int n = n_;
    State s = State::zero(n);
    Vector pos(y.begin(), y.begin() + 2 * n);
    la::tri_solve(ls_, true, pos);  // Ls^{-T} y_pos
    for (int i = 0; i < n; ++i) {
        s.u[i] = pos[i];
        s.v[i] = pos[n + i];
        s.p[i] = y[2 * n + i] / sqrt_j1_;
        s.q[i] = y[3 * n + i] / sqrt_j2_;
    }
    return s;
}

SemigroupSolver::Modal SemigroupSolver::prepare(const State& u0) const {
    Vector y = balanced(u0);
    Modal m;
    m.w.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) m.w[i] = Complex(y[i], 0.0);
    xlu_->solve(m.w);
    return m;
}

Vector SemigroupSolver::sample_y(const Modal& m, double t) const {
    Vector y(std::size_t(4) * n_);
    kernels::propagate_one(x_, lambda_, m.w, t, y);
    return y;
}

Matrix SemigroupSolver::sample_y_many(const Modal& m, std::span<const double> times) const {
    Matrix out;
    kernels::propagate_modes(x_, lambda_, m.w, times, out);
    return out;
}

double SemigroupSolver::dissipation_from_y(std::span<const double> y) const {
    Vector p(n_);
    for (int i = 0; i < n_; ++i) p[i] = y[2 * n_ + i] / sqrt_j1_;
    return weight_ * b_.quad(p);
}

void SemigroupSolver::ensure_energy_gram() const {
    if (have_energy_gram_) return;
    kernels::gram_ch(x_, energy_gram_);
    have_energy_gram_ = true;
}

Vector SemigroupSolver::pair_integrals(const CMatrix& gram, const Modal& m,
                                       std::span<const double> times) const {
    const int dim = 4 * n_;
    // C_{jk} = conj(w_j) G_{jk} w_k; integral(t) = sum_jk C_{jk} phi(conj(l_j)+l_k, t)
    CMatrix c(dim, dim);
    for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k)
            c(j, k) = std::conj(m.w[j]) * gram(j, k) * m.w[k];
    Vector out(times.size());
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        const double t = times[ti];
        Vector row_sums(dim);
        if (kernels::parallel_enabled()) {
#pragma omp parallel for schedule(static)
            for (int j = 0; j < dim; ++j) {
                Complex acc{0.0, 0.0};
                for (int k = 0; k < dim; ++k)
                    acc += c(j, k) * phi(std::conj(lambda_[j]) + lambda_[k], t);
                row_sums[j] = acc.real();
            }
        } else {
            for (int j = 0; j < dim; ++j) {
                Complex acc{0.0, 0.0};
                for (int k = 0; k < dim; ++k)
                    acc += c(j, k) * phi(std::conj(lambda_[j]) + lambda_[k], t);
                row_sums[j] = acc.real();
            }
        }
        double total = 0.0;
        for (double v : row_sums) total += v;
        out[ti] = total;
    }
    return out;
}

double SemigroupSolver::energy_integral(const Modal& m, double t) const {
    ensure_energy_gram();
    const double v = pair_integrals(energy_gram_, m, std::span<const double>(&t, 1))[0];
    return 0.5 * v;
}

double SemigroupSolver::dissipation_integral(const Modal& m, double t) const {
    if (diss_gram_.rows == 0) return 0.0;
    return pair_integrals(diss_gram_, m, std::span<const double>(&t, 1))[0];
}

Vector SemigroupSolver::dissipation_integrals(const Modal& m,
                                              std::span<const double> times) const {
    if (diss_gram_.rows == 0) return Vector(times.size(), 0.0);
    return pair_integrals(diss_gram_, m, times);
}

namespace {

Trajectory midpoint_on_grid(const CoupledSystem& sys, const State& u0,
                            std::span<const double> times, double dt_target);

}  // namespace

Trajectory evolve_exact(const CoupledSystem& sys, const State& u0,
                        std::span<const double> times) {
    if (times.empty()) throw std::invalid_argument("evolve_exact: empty time grid");
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        if (!(times[i] < times[i + 1]))
            throw std::invalid_argument("evolve_exact: times must be strictly ascending");
    if (times.front() < 0.0) throw std::invalid_argument("evolve_exact: times must be >= 0");

    auto solver = std::make_shared<SemigroupSolver>(sys);
    if (solver->defective()) {
        std::cerr << "evolve_exact: eigenvector condition " << solver->eigvec_condition()
                  << " exceeds 1e12, falling back to implicit midpoint\n";
        const double span = times.back() - times.front();
        const double dt = std::max(span, 1e-6) / 4000.0;
        return midpoint_on_grid(sys, u0, times, dt);
    }

    Trajectory traj;
    traj.integrator = Trajectory::Integrator::Exact;
    traj.times.assign(times.begin(), times.end());
    traj.solver = solver;
    traj.modal = std::make_shared<SemigroupSolver::Modal>(solver->prepare(u0));

    const Matrix ys = solver->sample_y_many(*traj.modal, times);
    traj.states.reserve(times.size());
    for (int k = 0; k < ys.rows; ++k)
        traj.states.push_back(solver->state_from_y(
            std::span<const double>(ys.row(k), std::size_t(ys.cols))));
    return traj;
}

Trajectory evolve_midpoint(const CoupledSystem& sys, const State& u0, double dt,
                           double t_end) {
    if (!(dt > 0.0)) throw std::invalid_argument("evolve_midpoint: dt must be positive");
    if (!(t_end >= 0.0)) throw std::invalid_argument("evolve_midpoint: t_end must be >= 0");
    const int steps = int(std::llround(t_end / dt));

    const int dim = 4 * sys.dim();
    const Matrix g = sys.dense_generator();
    Matrix minus(dim, dim), plus(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            const double gij = 0.5 * dt * g(i, j);
            minus(i, j) = (i == j ? 1.0 : 0.0) - gij;
            plus(i, j) = (i == j ? 1.0 : 0.0) + gij;
        }
    la::LuFactors lu(std::move(minus));

    Trajectory traj;
    traj.integrator = Trajectory::Integrator::ImplicitMidpoint;
    traj.step = dt;
    Vector x = u0.flatten();
    traj.times.push_back(0.0);
    traj.states.push_back(u0);
    Vector y(dim);
    for (int k = 1; k <= steps; ++k) {
        kernels::gemv(plus, x, y);
        lu.solve(y);
        x = y;
        traj.times.push_back(k * dt);
        traj.states.push_back(State::unflatten(x));
    }
    return traj;
}

namespace {

// Fallback for a defective spectrum: implicit midpoint stepped through the
// requested sample times.
Trajectory midpoint_on_grid(const CoupledSystem& sys, const State& u0,
                            std::span<const double> times, double dt_target) {
    const int dim = 4 * sys.dim();
    const Matrix g = sys.dense_generator();

    Trajectory traj;
    traj.integrator = Trajectory::Integrator::ImplicitMidpoint;
    traj.step = dt_target;
    Vector x = u0.flatten();
    double t = 0.0;
    Vector y(dim);
    for (double target : times) {
        const double span = target - t;
        if (span > 0.0) {
            const int steps = std::max(1, int(std::ceil(span / dt_target)));
            const double dt = span / steps;
            Matrix minus(dim, dim), plus(dim, dim);
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) {
                    const double gij = 0.5 * dt * g(i, j);
                    minus(i, j) = (i == j ? 1.0 : 0.0) - gij;
                    plus(i, j) = (i == j ? 1.0 : 0.0) + gij;
                }
            la::LuFactors lu(std::move(minus));
            for (int k = 0; k < steps; ++k) {
                kernels::gemv(plus, x, y);
                lu.solve(y);
                x = y;
            }
            t = target;
        }
        traj.times.push_back(target);
        traj.states.push_back(State::unflatten(x));
    }
    return traj;
}

}  // namespace

EnergyTrace energy_trace(const CoupledSystem& sys, const Trajectory& traj) {
    if (traj.times.empty()) throw std::invalid_argument("energy_trace: empty trajectory");
    EnergyTrace tr;
    tr.times = traj.times;
    const std::size_t m = traj.times.size();
    tr.e_total.resize(m);
    tr.e1.resize(m);
    tr.e2.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const Energies e = sys.energy(traj.states[i]);
        tr.e_total[i] = e.total;
        tr.e1[i] = e.e1;
        tr.e2[i] = e.e2;
    }

    tr.dissipated.assign(m, 0.0);
    if (traj.solver && traj.modal) {
        // exact per-mode-pair integral, relative to t = times[0]
        const Vector ints = traj.solver->dissipation_integrals(*traj.modal, traj.times);
        for (std::size_t i = 0; i < m; ++i) tr.dissipated[i] = ints[i] - ints[0];
    } else {
        for (std::size_t i = 1; i < m; ++i) {
            const double fa = sys.dissipation_quad(traj.states[i - 1]);
            const double fb = sys.dissipation_quad(traj.states[i]);
            tr.dissipated[i] = tr.dissipated[i - 1] +
                               0.5 * (fa + fb) * (traj.times[i] - traj.times[i - 1]);
        }
    }

    const double wd = sys.dissipation_weight();
    tr.residual.resize(m);
    for (std::size_t i = 0; i < m; ++i)
        tr.residual[i] = std::abs(tr.e_total[i] - tr.e_total[0] + wd * tr.dissipated[i]);
    return tr;
}

void EnergyTrace::write_csv(std::ostream& os) const {
    os << "t,E_total,E1,E2,dissipated,residual\n";
    char line[256];
    for (std::size_t i = 0; i < times.size(); ++i) {
        std::snprintf(line, sizeof(line),
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", times[i], e_total[i],
                      e1[i], e2[i], dissipated[i], residual[i]);
        os << line;
    }
}

std::vector<double> uniform_times(double t_end, int count) {
    if (count < 2) throw std::invalid_argument("uniform_times: need at least 2 samples");
    std::vector<double> t(count);
    for (int i = 0; i < count; ++i) t[i] = t_end * double(i) / (count - 1);
    return t;
}

std::vector<double> decay_times(double t_end, int uniform_count, int log_count) {
    std::vector<double> t = uniform_times(t_end, uniform_count);
    const double lo = std::max(t_end * 1e-3, 1e-3);
    for (int i = 0; i < log_count; ++i) {
        const double f = double(i) / (log_count - 1);
        t.push_back(lo * std::pow(t_end / lo, f));
    }
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-12; }),
            t.end());
    return t;
}

ConservationProbe conservation_probe(const SelfAdjointOperator& a, double beta,
                                     double alpha2, const State& u0,
                                     std::span<const double> times) {
    const int n = a.dim();
    if (u0.dim() != n) throw std::invalid_argument("conservation_probe: dimension mismatch");

    // first eigenspace of A (grouped by eigenvalue, simple in 1D)
    const double mu1 = a.eigenvalues().front();
    std::vector<int> z1;
    for (int k = 0; k < n; ++k)
        if (a.eigenvalues()[k] <= mu1 + 1e-10 * std::abs(mu1)) z1.push_back(k);

    auto project_z1_norm = [&](std::span<const double> x) {
        const Vector c = a.eigen_coefficients(x);
        double s = 0.0;
        for (int k : z1) s += c[k] * c[k];
        return std::sqrt(s);
    };
    auto z1_complement_energy = [&](std::span<const double> v, std::span<const double> q) {
        Vector cv = a.eigen_coefficients(v);
        Vector cq = a.eigen_coefficients(q);
        for (int k : z1) {
            cv[k] = 0.0;
            cq[k] = 0.0;
        }
        double e = 0.0;
        for (int k = 0; k < n; ++k)
            e += 0.5 * (a.eigenvalues()[k] * cv[k] * cv[k] + cq[k] * cq[k]);
        return e;
    };

    const double vnorm = weighted_norm(a.space(), u0.v) + weighted_norm(a.space(), u0.q);
    const double proj = project_z1_norm(u0.v) + project_z1_norm(u0.q);
    if (proj > 1e-10 * std::max(vnorm, 1e-300))
        throw std::invalid_argument(
            "conservation_probe: v-data is not orthogonal to the first eigenspace "
            "(projection norm " +
            std::to_string(proj) + ")");

    DampingOperator b = beta > 0.0 ? DampingOperator::scalar(beta) : DampingOperator::zero();
    CoupledSystem sys = CoupledSystem::assemble_diagnostic(a, a, std::move(b), 0.0, alpha2);
    Trajectory traj = evolve_exact(sys, u0, times);

    ConservationProbe probe;
    probe.times.assign(times.begin(), times.end());
    probe.e_v2.reserve(times.size());
    probe.e_total.reserve(times.size());
    for (const State& s : traj.states) {
        probe.e_v2.push_back(z1_complement_energy(s.v, s.q));
        probe.e_total.push_back(sys.energy(s).total);
    }
    const double e0 = probe.e_v2.front();
    double drift = 0.0;
    for (double e : probe.e_v2) drift = std::max(drift, std::abs(e - e0));
    probe.drift = e0 > 0.0 ? drift / e0 : drift;
    return probe;
}

}  // namespace istab
