#include "homodyne/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "homodyne/errors.hpp"
#include "homodyne/tomography.hpp"

namespace homodyne {

namespace {
constexpr double kPi = std::numbers::pi;

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}
} // namespace

std::string rule_name(BandwidthRule rule) {
    switch (rule) {
        case BandwidthRule::Fixed: return "fixed";
        case BandwidthRule::DeltaOpt: return "delta_opt";
        case BandwidthRule::DeltaStar: return "delta_star";
        case BandwidthRule::Adaptive1: return "adaptive1";
        case BandwidthRule::Adaptive2: return "adaptive2";
        case BandwidthRule::Iterative: return "iterative";
    }
    return "?";
}

BandwidthRule rule_from_name(const std::string& name) {
    if (name == "fixed") return BandwidthRule::Fixed;
    if (name == "delta_opt") return BandwidthRule::DeltaOpt;
    if (name == "delta_star") return BandwidthRule::DeltaStar;
    if (name == "adaptive1") return BandwidthRule::Adaptive1;
    if (name == "adaptive2") return BandwidthRule::Adaptive2;
    if (name == "iterative") return BandwidthRule::Iterative;
    throw ConfigError("unknown bandwidth rule: " + name);
}

double resolve_delta(const ExperimentPlan& plan, long n) {
    switch (plan.rule) {
        case BandwidthRule::Fixed:
            if (!(plan.fixed_delta > 0.0)) throw ConfigError("fixed rule requires delta > 0");
            return plan.fixed_delta;
        case BandwidthRule::DeltaOpt:
            return solve_delta_opt(plan.cls, plan.eta, n);
        case BandwidthRule::DeltaStar:
            return delta_star(plan.cls.alpha, plan.eta, n).first;
        case BandwidthRule::Adaptive1:
            return delta_adaptive(1, plan.eta, n);
        case BandwidthRule::Adaptive2:
            return delta_adaptive(2, plan.eta, n, plan.adaptive_A);
        case BandwidthRule::Iterative:
            return delta_iterative(plan.cls, plan.eta, n, plan.iterative_k);
    }
    throw ConfigError("unknown bandwidth rule");
}

namespace {

std::vector<double> replicate_estimates(const StateModel& state, double eta, long n, double delta,
                                        int replicates, std::uint64_t seed,
                                        std::uint64_t n_index) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(replicates));
    const EstimatorConfig cfg{eta, delta, 0.0};
    const NoiseConfig noise{eta};
    for (int rep = 0; rep < replicates; ++rep) {
        const std::uint64_t idx = (n_index << 32) + static_cast<std::uint64_t>(rep);
        auto rng_ideal = make_stream(seed, StreamTag::Ideal, idx);
        auto rng_noise = make_stream(seed, StreamTag::Noise, idx);
        const auto ideal = sample_ideal(state, n, rng_ideal);
        const auto samples = apply_noise(ideal, noise, rng_noise);
        out.push_back(estimate_quadratic_functional(samples, cfg).d2_hat);
    }
    return out;
}

} // namespace

McSummary run_mse_experiment(const ExperimentPlan& plan) {
    if (plan.replicates < 2) throw ConfigError("experiment requires replicates >= 2");
    if (plan.n_grid.empty()) throw ConfigError("experiment requires a nonempty n grid");
    for (std::size_t i = 1; i < plan.n_grid.size(); ++i)
        if (plan.n_grid[i] <= plan.n_grid[i - 1])
            throw ConfigError("n grid must be strictly increasing");

    const double d2 = true_purity(plan.state);
    McSummary summary;
    for (std::size_t ni = 0; ni < plan.n_grid.size(); ++ni) {
        const long n = plan.n_grid[ni];
        const double delta = resolve_delta(plan, n);
        const auto est = replicate_estimates(plan.state, plan.eta, n, delta, plan.replicates,
                                             plan.seed, ni);

        const double mean = mean_of(est);
        double var = 0.0, mse = 0.0, mse2 = 0.0;
        for (double e : est) {
            var += (e - mean) * (e - mean);
            const double sq = (e - d2) * (e - d2);
            mse += sq;
            mse2 += sq * sq;
        }
        const double R = static_cast<double>(est.size());
        var /= R;   // population variance so mse = bias^2 + var holds exactly
        mse /= R;
        const double mse_sd = std::sqrt(std::max(0.0, mse2 / R - mse * mse));

        McRow row;
        row.n = n;
        row.delta = delta;
        row.mean_estimate = mean;
        row.empirical_bias = mean - d2;
        row.empirical_variance = var;
        row.empirical_mse = mse;
        row.mse_stderr = mse_sd / std::sqrt(R);
        row.theoretical_rate = theoretical_rate(plan.cls, plan.eta, n, RateSide::upper);
        const auto rb = risk_bounds(plan.cls, plan.eta, delta, n);
        row.bias_bound_sq = rb.bias_bound_sq;
        row.var_bound = rb.var_bound;
        summary.rows.push_back(row);
    }
    return summary;
}

double rate_regression(const McSummary& summary) {
    std::vector<double> lx, ly;
    for (const auto& row : summary.rows) {
        if (row.empirical_mse > 0.0) {
            lx.push_back(std::log(static_cast<double>(row.n)));
            ly.push_back(std::log(row.empirical_mse));
        }
    }
    if (lx.size() < 3) throw InsufficientPoints("rate_regression needs >= 3 positive-mse points");
    const double mx = mean_of(lx), my = mean_of(ly);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    return sxy / sxx;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

NormalityResult normality_statistics(std::vector<double> residuals) {
    const double R = static_cast<double>(residuals.size());
    const double mean = mean_of(residuals);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double z : residuals) {
        const double d = z - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= R;
    m3 /= R;
    m4 /= R;

    std::vector<double> sorted = residuals;
    std::sort(sorted.begin(), sorted.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = normal_cdf(sorted[i]);
        ks = std::max(ks, std::abs(f - static_cast<double>(i) / R));
        ks = std::max(ks, std::abs(static_cast<double>(i + 1) / R - f));
    }

    NormalityResult res;
    res.ks_distance = ks;
    res.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    res.excess_kurtosis = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
    res.asymptotic_var = 0.0;
    res.residuals = std::move(residuals);
    return res;
}

NormalityResult run_normality_check(const StateModel& state, double eta, long n, int replicates,
                                    double delta, std::uint64_t seed) {
    const double d2 = true_purity(state);
    const double W = asymptotic_variance(state, eta);
    const auto est = replicate_estimates(state, eta, n, delta, replicates, seed, 0);
    std::vector<double> residuals;
    residuals.reserve(est.size());
    const double scale = std::sqrt(static_cast<double>(n) / W);
    for (double e : est) residuals.push_back(scale * (e - d2));
    auto res = normality_statistics(std::move(residuals));
    res.asymptotic_var = W;
    return res;
}

PurityVerdict purity_classify(double d2_hat, double tau) {
    if (!(tau > 0.0)) throw ConfigError("purity_classify requires tau > 0");
    const double dist = std::abs(d2_hat - 1.0 / (2.0 * kPi));
    return {dist < tau, dist - tau};
}

} // namespace homodyne
