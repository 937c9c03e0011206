#ifndef HOMODYNE_ESTIMATOR_HPP
#define HOMODYNE_ESTIMATOR_HPP

#include <span>
#include <utility>

#include "homodyne/states.hpp"
#include "homodyne/tomography.hpp"

namespace homodyne {

struct EstimatorConfig {
    double eta;              // detection efficiency, in (0, 1)
    double delta;            // bandwidth, > 0; truncation T = 1/(delta sqrt(eta))
    double dt_override = 0;  // quadrature spacing; <= 0 uses the Nyquist-style default
};

struct EstimateResult {
    double d2_hat;
    double delta;
    double t_max;        // truncation T
    int nodes;           // quadrature node count on [-T, T]
    double kernel_mass;  // (eta/4pi) \int_{|t|<=T} |t| e^{t^2(1-eta)/2} dt, conditioning diagnostic
};

enum class RateRegime { r_lt_2, r2_slow, r2_parametric };
enum class RateSide { upper, lower };

struct RiskBounds {
    double bias_bound_sq;
    double var_bound;
    RateRegime regime;
};

// The order-2 U-statistic estimate of d^2 in its aggregated form
//   d2 = eta/(4 pi n(n-1)) \int_{|t|<=T} |t| e^{t^2(1-eta)/2} (|S(t)|^2 - n) dt,
// S(t) = sum_k e^{i t Y_k}; the phi integral contributes the exact factor pi.
// O(n m) over the composite-Simpson t grid.
EstimateResult estimate_quadratic_functional(std::span<const HomodyneSample> samples,
                                             const EstimatorConfig& cfg);

// Literal double sum over ordered pairs, same t grid; O(n^2) testing oracle,
// guarded to n <= 2000.
double estimate_pairwise_oracle(std::span<const HomodyneSample> samples,
                                const EstimatorConfig& cfg);

// g(y) = \int_{|t|<=T} |t| e^{t^2(1-eta)/2} e^{ity} dt = 2 \int_0^T t e^{at^2} cos(ty) dt.
double kernel_g(double y, double t_max, double eta);

// Bandwidth solving (1-eta)/(2 eta) delta^-2 + 2 alpha delta^-r
//   = log n - (log log n)^2, by bisection in 1/delta; r in (0, 2).
double solve_delta_opt(const SmoothnessClass& cls, double eta, long n);

// Closed-form r = 2 bandwidth and its regime.
std::pair<double, RateRegime> delta_star(double alpha, double eta, long n);

// Adaptive bandwidths that do not use the class parameters; variant 2 takes
// the majorant A of alpha.
double delta_adaptive(int variant, double eta, long n, double A = 0.0);

// Iterative refinement delta_k; k <= 0 selects k = max(1, ceil(r/(2-r))).
double delta_iterative(const SmoothnessClass& cls, double eta, long n, int k = 0);

// Minimax rate phi_n^2 for the class/regime; side matters only in the r = 2
// slow regime (upper n^-..., lower (n log n)^-...).
double theoretical_rate(const SmoothnessClass& cls, double eta, long n, RateSide side);

// Right-hand sides of the theoretical bias and variance bounds.
RiskBounds risk_bounds(const SmoothnessClass& cls, double eta, double delta, long n);

// Asymptotic variance of sqrt(n)(d2_n - d^2) in the parametric regime, by
// 2-D tensor quadrature of the limit integral minus 4 (d^2)^2.
double asymptotic_variance(const StateModel& state, double eta, double t_max = 10.0,
                           int nodes = 400);

RateRegime regime_r2(double alpha, double eta);

} // namespace homodyne

#endif
