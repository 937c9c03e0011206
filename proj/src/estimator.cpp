#include "homodyne/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "homodyne/errors.hpp"
#include "homodyne/quadrature.hpp"

namespace homodyne {

namespace {
constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;

struct KernelGrid {
    double T;
    double h;
    std::size_t intervals;          // even, on [0, T]
    std::vector<double> q;          // simpson weight * t * e^{a t^2}, ascending t
};

void validate_cfg(const EstimatorConfig& cfg) {
    if (!(cfg.eta > 0.0 && cfg.eta < 1.0)) throw ConfigError("estimator requires eta in (0, 1)");
    if (!(cfg.delta > 0.0)) throw ConfigError("estimator requires delta > 0");
}

double truncation(const EstimatorConfig& cfg) {
    return 1.0 / (cfg.delta * std::sqrt(cfg.eta));
}

double nyquist_dt(std::span<const HomodyneSample> samples, const EstimatorConfig& cfg) {
    if (cfg.dt_override > 0.0) return cfg.dt_override;
    double ymax = 0.0;
    for (const auto& s : samples) ymax = std::max(ymax, std::abs(s.y));
    return std::min(0.05, kPi / (4.0 * (ymax + 1.0)));
}

KernelGrid make_grid(double T, double dt, double a) {
    if (a * T * T > 700.0)
        throw UnstableKernel("kernel weight e^{aT^2} overflows working precision");
    KernelGrid g;
    g.T = T;
    g.intervals = even_intervals(T / dt);
    g.h = T / static_cast<double>(g.intervals);
    const auto w = simpson_weights(g.intervals, g.h);
    g.q.resize(g.intervals + 1);
    for (std::size_t j = 0; j <= g.intervals; ++j) {
        const double t = g.h * static_cast<double>(j);
        g.q[j] = w[j] * t * std::exp(a * t * t);
    }
    return g;
}
} // namespace

EstimateResult estimate_quadratic_functional(std::span<const HomodyneSample> samples,
                                             const EstimatorConfig& cfg) {
    validate_cfg(cfg);
    const auto n = samples.size();
    if (n < 2) throw TooFewSamples("estimator requires n >= 2");
    for (const auto& s : samples)
        if (!std::isfinite(s.y)) throw ConfigError("estimator requires finite samples");

    const double a = (1.0 - cfg.eta) / 2.0;
    const double T = truncation(cfg);
    const auto grid = make_grid(T, nyquist_dt(samples, cfg), a);
    const std::size_t m = grid.intervals;

    // S(t_j) = sum_k e^{i t_j Y_k}, advanced by one rotation per node with a
    // periodic direct re-evaluation to stop drift.
    std::vector<cplx> S(m + 1, cplx(0.0, 0.0));
    for (const auto& s : samples) {
        const cplx rot = std::exp(cplx(0.0, grid.h * s.y));
        cplx z(1.0, 0.0);
        for (std::size_t j = 0; j <= m; ++j) {
            if (j % 64 == 0) z = std::exp(cplx(0.0, grid.h * static_cast<double>(j) * s.y));
            S[j] += z;
            z *= rot;
        }
    }

    const double dn = static_cast<double>(n);
    double integral = 0.0;
    for (std::size_t j = 0; j <= m; ++j) integral += grid.q[j] * (std::norm(S[j]) - dn);

    EstimateResult res;
    res.d2_hat = cfg.eta / (4.0 * kPi * dn * (dn - 1.0)) * 2.0 * integral;
    res.delta = cfg.delta;
    res.t_max = T;
    res.nodes = static_cast<int>(2 * m + 1);
    res.kernel_mass = cfg.eta / (4.0 * kPi) * std::expm1(a * T * T) / a;
    return res;
}

double estimate_pairwise_oracle(std::span<const HomodyneSample> samples,
                                const EstimatorConfig& cfg) {
    validate_cfg(cfg);
    const auto n = samples.size();
    if (n < 2) throw TooFewSamples("pairwise oracle requires n >= 2");
    if (n > 2000) throw TooManySamples("pairwise oracle guarded to n <= 2000");

    const double a = (1.0 - cfg.eta) / 2.0;
    const auto grid = make_grid(truncation(cfg), nyquist_dt(samples, cfg), a);

    auto g_grid = [&](double y) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= grid.intervals; ++j)
            acc += grid.q[j] * std::cos(grid.h * static_cast<double>(j) * y);
        return 2.0 * acc;
    };

    double sum = 0.0;  // over unordered pairs; g is even so ordered pairs double it
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = k + 1; l < n; ++l) sum += g_grid(samples[k].y - samples[l].y);
    const double dn = static_cast<double>(n);
    return cfg.eta / (4.0 * kPi * dn * (dn - 1.0)) * 2.0 * sum;
}

double kernel_g(double y, double t_max, double eta) {
    if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("kernel_g requires eta in (0, 1)");
    const double a = (1.0 - eta) / 2.0;
    if (a * t_max * t_max > 700.0)
        throw UnstableKernel("kernel weight e^{aT^2} overflows working precision");
    const auto n = even_intervals(t_max / std::min(0.005, kPi / (16.0 * (std::abs(y) + 1.0))));
    return 2.0 * simpson(
                     [&](double t) { return t * std::exp(a * t * t) * std::cos(t * y); }, 0.0,
                     t_max, std::min<std::size_t>(n, 1u << 21));
}

double solve_delta_opt(const SmoothnessClass& cls, double eta, long n) {
    if (!(cls.r > 0.0 && cls.r < 2.0)) throw ConfigError("solve_delta_opt requires r in (0, 2)");
    if (!(cls.alpha > 0.0)) throw ConfigError("solve_delta_opt requires alpha > 0");
    if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("solve_delta_opt requires eta in (0, 1)");
    const double logn = std::log(static_cast<double>(n));
    const double rhs = logn - std::pow(std::log(logn), 2);
    if (!(n >= 8) || !(rhs > 0.0)) throw SampleTooSmall("solve_delta_opt: log n - (log log n)^2 <= 0");

    const double c1 = (1.0 - eta) / (2.0 * eta);
    auto lhs = [&](double x) { return c1 * x * x + 2.0 * cls.alpha * std::pow(x, cls.r); };

    double lo = 1e-6, hi = 1.0;
    while (lhs(hi) <= rhs) hi *= 2.0;  // lhs strictly increasing: unique bracket
    for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (lhs(mid) < rhs ? lo : hi) = mid;
    }
    const double x = 0.5 * (lo + hi);
    if (std::abs(lhs(x) - rhs) >= 1e-9)
        throw NumericError("solve_delta_opt: bisection failed to meet residual tolerance");
    return 1.0 / x;
}

RateRegime regime_r2(double alpha, double eta) {
    const double gap = (1.0 - eta) / (2.0 * eta) - 2.0 * alpha;
    if (std::abs(gap) < 1e-12)
        throw DegenerateBoundary("(1-eta)/(2 eta) = 2 alpha boundary case is not covered");
    return gap > 0.0 ? RateRegime::r2_slow : RateRegime::r2_parametric;
}

std::pair<double, RateRegime> delta_star(double alpha, double eta, long n) {
    if (n < 2) throw SampleTooSmall("delta_star requires n >= 2");
    if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("delta_star requires eta in (0, 1)");
    const double logn = std::log(static_cast<double>(n));
    const auto regime = regime_r2(alpha, eta);
    if (regime == RateRegime::r2_slow) {
        const double c1 = (1.0 - eta) / (2.0 * eta);
        return {std::pow(logn / (c1 + 2.0 * alpha), -0.5), regime};
    }
    return {std::pow(eta * logn / (1.0 - eta), -0.5), regime};
}

double delta_adaptive(int variant, double eta, long n, double A) {
    if (variant != 1 && variant != 2) throw ConfigError("delta_adaptive variant must be 1 or 2");
    if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("delta_adaptive requires eta in (0, 1)");
    if (n < 2) throw SampleTooSmall("delta_adaptive requires n >= 2");
    const double q = 2.0 * eta * std::log(static_cast<double>(n)) / (1.0 - eta);
    double inner;
    if (variant == 1) {
        inner = q - std::sqrt(q);
    } else {
        if (!(A > 0.0)) throw ConfigError("delta_adaptive variant 2 requires A > 0");
        inner = q - 4.0 * A * eta / (1.0 - eta) * std::sqrt(q);
    }
    if (!(inner > 0.0)) throw SampleTooSmall("delta_adaptive: n too small for this eta/A");
    return std::pow(inner, -0.5);
}

double delta_iterative(const SmoothnessClass& cls, double eta, long n, int k) {
    if (!(cls.r > 0.0 && cls.r < 2.0)) throw ConfigError("delta_iterative requires r in (0, 2)");
    if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("delta_iterative requires eta in (0, 1)");
    const double a = (1.0 - eta) / (4.0 * eta);
    const double logn = std::log(static_cast<double>(n));
    const double sn = (logn - std::pow(std::log(logn), 2)) / (2.0 * a);
    if (!(sn > 0.0)) throw SampleTooSmall("delta_iterative: s_n <= 0");
    if (k <= 0) k = std::max(1, static_cast<int>(std::ceil(cls.r / (2.0 - cls.r))));

    double delta = std::pow(sn, -0.5);
    for (int i = 1; i <= k; ++i) {
        const double inner = sn - cls.alpha / a * std::pow(delta, -cls.r);
        if (!(inner > 0.0)) throw IterateCollapse("delta_iterative: inner expression <= 0");
        delta = std::pow(inner, -0.5);
    }
    return delta;
}

double theoretical_rate(const SmoothnessClass& cls, double eta, long n, RateSide side) {
    if (cls.r < 2.0) {
        const double delta = solve_delta_opt(cls, eta, n);
        return cls.L * cls.L * std::exp(-4.0 * cls.alpha * std::pow(delta, -cls.r));
    }
    const auto regime = regime_r2(cls.alpha, eta);
    const double dn = static_cast<double>(n);
    if (regime == RateRegime::r2_parametric) return 1.0 / dn;
    const double c1 = (1.0 - eta) / (2.0 * eta);
    const double expo = -4.0 * cls.alpha / (c1 + 2.0 * cls.alpha);
    return side == RateSide::upper ? std::pow(dn, expo) : std::pow(dn * std::log(dn), expo);
}

RiskBounds risk_bounds(const SmoothnessClass& cls, double eta, double delta, long n) {
    if (!(delta > 0.0)) throw ConfigError("risk_bounds requires delta > 0");
    const double dn = static_cast<double>(n);
    const double c1 = (1.0 - eta) / (2.0 * eta);
    const double inv_d2 = 1.0 / (delta * delta);

    RiskBounds rb;
    rb.bias_bound_sq = cls.L * cls.L * std::exp(-4.0 * cls.alpha * std::pow(delta, -cls.r));
    const double first = 8.0 * eta * eta / ((1.0 - eta) * (1.0 - eta)) / (kPi * kPi * dn * dn) *
                         std::exp(2.0 * c1 * inv_d2);
    if (cls.r < 2.0) {
        rb.regime = RateRegime::r_lt_2;
        rb.var_bound = first + 8.0 * cls.L / (dn * kPi) * eta / (1.0 - eta) *
                                   std::exp(c1 * inv_d2 - 2.0 * cls.alpha * std::pow(delta, -cls.r));
    } else {
        rb.regime = regime_r2(cls.alpha, eta);
        if (rb.regime == RateRegime::r2_slow) {
            rb.var_bound = first + 8.0 * cls.L / (dn * kPi) * eta /
                                       (1.0 - eta - 4.0 * cls.alpha * eta) *
                                       std::exp((c1 - 2.0 * cls.alpha) * inv_d2);
        } else {
            rb.var_bound =
                first + 8.0 * eta * cls.L / (4.0 * cls.alpha * eta - 1.0 + eta) / dn;
        }
    }
    return rb;
}

double asymptotic_variance(const StateModel& state, double eta, double t_max, int nodes) {
    if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("asymptotic_variance requires eta in (0, 1)");
    const double b = (1.0 - eta) / (2.0 * eta);
    // Gaussian-tailed catalog states need the joint exponent negative definite.
    if (b >= 1.5) throw NonIntegrable("asymptotic_variance requires (1-eta)/(2 eta) < 3/2");

    std::size_t M = even_intervals(static_cast<double>(nodes));
    if (M % 4 != 0) M += 2;  // keep t = 0 on a Simpson panel boundary
    const double h = 2.0 * t_max / static_cast<double>(M);
    const auto w = simpson_weights(M, h);

    // Marginal characteristic function on the sum grid [-2 t_max, 2 t_max].
    std::vector<cplx> psi(2 * M + 1);
    for (std::size_t j = 0; j <= 2 * M; ++j)
        psi[j] = marginal_char_fn(state, -2.0 * t_max + h * static_cast<double>(j));

    const std::size_t off = M / 2;  // t grid index j maps to sum-grid index j + off
    double sum = 0.0, peak = 0.0, edge = 0.0;
    for (std::size_t j = 0; j <= M; ++j) {
        const double t1 = -t_max + h * static_cast<double>(j);
        for (std::size_t k = 0; k <= M; ++k) {
            const double t2 = -t_max + h * static_cast<double>(k);
            const double val = std::abs(t1) * std::abs(t2) * std::exp(b * t1 * t2) *
                               (psi[j + off] * psi[k + off] * std::conj(psi[j + k])).real();
            sum += w[j] * w[k] * val;
            const double mag = std::abs(val);
            peak = std::max(peak, mag);
            if (j == 0 || j == M || k == 0 || k == M) edge = std::max(edge, mag);
        }
    }
    if (edge > 1e-10 * peak)
        throw TailNotNegligible("asymptotic_variance: integrand not negligible at t_max");

    const double d2 = true_purity(state);
    const double W = sum / (4.0 * kPi * kPi) - 4.0 * d2 * d2;
    if (W < -1e-6) throw NegativeVariance("asymptotic_variance: quadrature gave W < -1e-6");
    return W;
}

} // namespace homodyne
