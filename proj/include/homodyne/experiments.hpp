#ifndef HOMODYNE_EXPERIMENTS_HPP
#define HOMODYNE_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "homodyne/estimator.hpp"
#include "homodyne/states.hpp"

namespace homodyne {

enum class BandwidthRule { Fixed, DeltaOpt, DeltaStar, Adaptive1, Adaptive2, Iterative };

std::string rule_name(BandwidthRule rule);
BandwidthRule rule_from_name(const std::string& name);

struct ExperimentPlan {
    StateModel state;
    double eta = 0.9;
    std::vector<long> n_grid;
    int replicates = 2;
    BandwidthRule rule = BandwidthRule::DeltaStar;
    double fixed_delta = 0.0;  // for Fixed
    double adaptive_A = 0.0;   // for Adaptive2
    int iterative_k = 0;       // for Iterative; <= 0 means auto
    SmoothnessClass cls{0.2, 2.0, 1.0};
    std::uint64_t seed = 0;
};

struct McRow {
    long n;
    double delta;
    double mean_estimate;
    double empirical_bias;
    double empirical_variance;
    double empirical_mse;
    double mse_stderr;
    double theoretical_rate;
    double bias_bound_sq;
    double var_bound;
};

struct McSummary {
    std::vector<McRow> rows;
};

// Resolve the plan's bandwidth rule at sample size n.
double resolve_delta(const ExperimentPlan& plan, long n);

// Replicated simulate -> estimate pipeline; one row per n; deterministic
// given the plan seed.
McSummary run_mse_experiment(const ExperimentPlan& plan);

// Least-squares slope of log empirical_mse against log n.
double rate_regression(const McSummary& summary);

struct NormalityResult {
    double ks_distance;
    double skewness;
    double excess_kurtosis;
    double asymptotic_var;  // the W quadrature used for standardization
    std::vector<double> residuals;
};

// Residuals sqrt(n)(d2_i - d2)/sqrt(W) over replicates, with the exact
// one-sample KS distance against the standard normal CDF.
NormalityResult run_normality_check(const StateModel& state, double eta, long n, int replicates,
                                    double delta, std::uint64_t seed);

// KS/shape statistics of an arbitrary residual sample (testing hook).
NormalityResult normality_statistics(std::vector<double> residuals);

struct PurityVerdict {
    bool pure;
    double margin;  // |d2_hat - 1/(2 pi)| - tau; negative means pure
};

// Threshold classifier: pure iff |d2_hat - 1/(2 pi)| < tau (strict).
PurityVerdict purity_classify(double d2_hat, double tau);

// Standard normal CDF via erfc.
double normal_cdf(double z);

} // namespace homodyne

#endif
