#include "istab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace istab::analysis {

namespace {

double simpson(double fa, double fm, double fb, double h6) { return h6 * (fa + 4.0 * fm + fb); }

template <class F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(fa, flm, fm, (m - a) / 6.0);
    const double right = simpson(fm, frm, fb, (b - m) / 6.0);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(const F& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = simpson(fa, fm, fb, (b - a) / 6.0);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace

DecayFit fit_decay_rate(const EnergyTrace& trace, double t_lo, double t_hi) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        const double t = trace.times[i], e = trace.e_total[i];
        if (t >= t_lo && t <= t_hi && t > 0.0 && e > 0.0) {
            xs.push_back(std::log(t));
            ys.push_back(std::log(e));
        }
    }
    if (xs.size() < 8)
        throw std::invalid_argument("fit_decay_rate: fewer than 8 usable samples in window");
    const std::size_t m = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= double(m);
    my /= double(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    DecayFit fit;
    fit.exponent = sxy / sxx;
    fit.samples = int(m);
    const double b0 = my - fit.exponent * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = ys[i] - (b0 + fit.exponent * xs[i]);
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / double(m));
    return fit;
}

double initial_norm_sq(const CoupledSystem& sys, const State& u0, DecayNorm norm, int k,
                       double theta) {
    const GraphNorms g = sys.graph_norms(u0, k, theta);
    return norm == DecayNorm::GraphDomain ? g.graph_sq : g.component_sq;
}

double decay_bound_constant(const EnergyTrace& trace, double norm_sq, double r) {
    if (!(norm_sq > 0.0)) throw std::invalid_argument("decay_bound_constant: zero norm");
    double best = 0.0;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        const double t = trace.times[i];
        if (t < 1.0) continue;
        best = std::max(best, std::pow(t, r) * trace.e_total[i] / norm_sq);
    }
    return best;
}

C1Curve integral_inequality_constant(const CoupledSystem& sys, const SemigroupSolver& solver,
                                     const State& u0, std::span<const double> t_grid) {
    if (t_grid.empty())
        throw std::invalid_argument("integral_inequality_constant: empty T grid");
    C1Curve curve;
    curve.t_grid.assign(t_grid.begin(), t_grid.end());

    State w = u0;
    curve.denominator = sys.energy(w).total;
    for (int k = 1; k <= 4; ++k) {
        w = sys.apply_generator(w);
        curve.denominator += sys.energy(w).total;
    }
    if (!(curve.denominator > 0.0))
        throw std::invalid_argument("integral_inequality_constant: degenerate denominator");

    const SemigroupSolver::Modal modal = solver.prepare(u0);
    curve.c1.reserve(t_grid.size());
    for (double t : t_grid)
        curve.c1.push_back(solver.energy_integral(modal, t) / curve.denominator);

    const double t_max = curve.t_grid.back();
    const double full = solver.energy_integral(modal, t_max) / curve.denominator;
    const double half = solver.energy_integral(modal, 0.5 * t_max) / curve.denominator;
    curve.saturation = full / half;
    return curve;
}

Theorem28Result theorem_2_8_check(std::span<const double> times,
                                  std::span<const double> energies, double c, int big_k,
                                  int n, double graph_energy_sum) {
    if (times.size() != energies.size())
        throw std::invalid_argument("theorem_2_8_check: size mismatch");
    double factorial = 1.0;
    for (int i = 2; i <= n; ++i) factorial *= i;
    const double front =
        std::pow(c, n) * std::pow(1.0 + big_k, n - 1) * factorial * graph_energy_sum;
    Theorem28Result res;
    res.holds = true;
    res.min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        if (!(t > 0.0)) continue;
        const double rhs = front / std::pow(t, n);
        const double slack = (rhs - energies[i]) / rhs;
        if (slack < res.min_slack) {
            res.min_slack = slack;
            res.worst_t = t;
        }
        if (energies[i] > rhs) res.holds = false;
    }
    return res;
}

double k_functional_quadratic(const SelfAdjointOperator& op, double beta,
                              std::span<const double> x, double t) {
    if (!op.coercive())
        throw std::invalid_argument("k_functional_quadratic: operator must be coercive");
    if (!(t > 0.0)) throw std::invalid_argument("k_functional_quadratic: t must be positive");
    const Vector c = op.eigen_coefficients(x);
    double sum = 0.0;
    for (int k = 0; k < op.dim(); ++k) {
        const double sigma = std::pow(op.eigenvalues()[k], 2.0 * beta);
        const double t2s = t * t * sigma;
        sum += c[k] * c[k] * t2s / (1.0 + t2s);
    }
    return std::sqrt(sum);
}

InterpNorm interp_norm(const SelfAdjointOperator& op, double beta, double theta,
                       std::span<const double> x) {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::invalid_argument("interp_norm: theta must lie in (0,1)");
    if (!op.coercive()) throw std::invalid_argument("interp_norm: operator must be coercive");

    InterpNorm out;
    out.theta = theta;
    out.beta = beta;

    const Vector c = op.eigen_coefficients(x);
    const int n = op.dim();
    Vector c2(n), sigma(n);
    double x_sq = 0.0, sig_weighted = 0.0, frac_sq = 0.0;
    for (int k = 0; k < n; ++k) {
        c2[k] = c[k] * c[k];
        sigma[k] = std::pow(op.eigenvalues()[k], 2.0 * beta);
        x_sq += c2[k];
        sig_weighted += c2[k] * sigma[k];
        frac_sq += c2[k] * std::pow(op.eigenvalues()[k], 2.0 * beta * theta);
    }
    out.value_fracpower = std::sqrt(frac_sq);
    out.value_closed_form = std::sqrt(M_PI / (2.0 * std::sin(M_PI * theta))) * out.value_fracpower;

    if (x_sq == 0.0) {
        out.value_quadrature = 0.0;
        return out;
    }

    // integral over t of t^{-2 theta - 1} K2(t,x)^2, in log coordinates
    const double sig_min = sigma.front();
    const double sig_max = sigma.back();
    const double s_lo = 0.5 * std::log(1e-12 / sig_max);
    const double s_hi = 0.5 * std::log(1e12 / sig_min);
    auto integrand = [&](double s) {
        const double t2 = std::exp(2.0 * s);
        double k2 = 0.0;
        for (int k = 0; k < n; ++k) {
            const double t2s = t2 * sigma[k];
            k2 += c2[k] * t2s / (1.0 + t2s);
        }
        return std::exp(-2.0 * theta * s) * k2;
    };
    const double mid = integrate(integrand, s_lo, s_hi, 1e-10 * x_sq);
    // analytic tails: K2^2 ~ |x|^2 above, ~ t^2 sum c^2 sigma below
    const double tail_hi = x_sq * std::exp(-2.0 * theta * s_hi) / (2.0 * theta);
    const double tail_lo =
        sig_weighted * std::exp((2.0 - 2.0 * theta) * s_lo) / (2.0 - 2.0 * theta);
    out.value_quadrature = std::sqrt(mid + tail_hi + tail_lo);
    return out;
}

HypothesesReport compat_scaling_study(const ops1d::OperatorSpec& s1,
                                      const ops1d::OperatorSpec& s2,
                                      std::span<const int> grid_sizes) {
    return kappa_ladder(s1, s2, grid_sizes);
}

}  // namespace istab::analysis
