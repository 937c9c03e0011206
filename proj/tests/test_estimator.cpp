#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"

#include "homodyne/errors.hpp"
#include "homodyne/estimator.hpp"
#include "homodyne/rng.hpp"
#include "homodyne/states.hpp"
#include "homodyne/tomography.hpp"

using namespace homodyne;

namespace {
constexpr double kPi = std::numbers::pi;
} // namespace

TEST_CASE("two equal samples give the closed-form estimate") {
    // With Y1 = Y2, |S(t)|^2 - 2 = 2 for all t, so
    // d2 = eta (e^{aT^2} - 1) / (4 pi a), a = (1-eta)/2.
    const double eta = 0.9, delta = 0.4;
    const double a = (1.0 - eta) / 2.0;
    const double T = 1.0 / (delta * std::sqrt(eta));
    const double expected = eta * std::expm1(a * T * T) / (4.0 * kPi * a);
    const std::vector<HomodyneSample> samples = {{0.7, 0.3}, {0.7, 2.1}};
    const auto res = estimate_quadratic_functional(samples, {eta, delta, 0.001});
    CHECK(res.d2_hat == doctest::Approx(expected).epsilon(1e-9));
    CHECK(res.t_max == doctest::Approx(T));
    CHECK(res.delta == delta);
    CHECK(res.kernel_mass == doctest::Approx(eta * std::expm1(a * T * T) / (4.0 * kPi * a)));
}

TEST_CASE("three samples match the hand-expanded pair sum") {
    // Y = (0, 1, -1): ordered pair differences are +-1 (x4) and +-2 (x2),
    // so the pair sum is 4 g(1) + 2 g(2) with the exact kernel g.
    const double eta = 0.8, delta = 0.5;
    const double T = 1.0 / (delta * std::sqrt(eta));
    const std::vector<HomodyneSample> samples = {{0.0, 0.1}, {1.0, 1.7}, {-1.0, 2.9}};
    const double expected =
        eta / (4.0 * kPi * 3.0 * 2.0) * (4.0 * kernel_g(1.0, T, eta) + 2.0 * kernel_g(2.0, T, eta));
    const auto res = estimate_quadratic_functional(samples, {eta, delta, 0.0005});
    CHECK(res.d2_hat == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("fast path equals the pairwise oracle on random instances") {
    std::mt19937_64 gen(20240817);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int inst = 0; inst < 30; ++inst) {
        const std::size_t n = 2 + static_cast<std::size_t>(u01(gen) * 58.0);
        const double eta = 0.5 + 0.49 * u01(gen);
        const double delta = 0.3 + 0.7 * u01(gen);
        std::normal_distribution<double> normal(0.0, 1.0 + u01(gen));
        std::vector<HomodyneSample> samples;
        for (std::size_t k = 0; k < n; ++k) samples.push_back({normal(gen), kPi * u01(gen)});
        const EstimatorConfig cfg{eta, delta, 0.0};
        const double fast = estimate_quadratic_functional(samples, cfg).d2_hat;
        const double oracle = estimate_pairwise_oracle(samples, cfg);
        CHECK(fast == doctest::Approx(oracle).epsilon(1e-8));
    }
}

TEST_CASE("kernel g is even with the closed-form value at zero") {
    const double eta = 0.9, T = 2.0;
    const double a = (1.0 - eta) / 2.0;
    CHECK(kernel_g(0.0, T, eta) == doctest::Approx(std::expm1(a * T * T) / a).epsilon(1e-10));
    CHECK(kernel_g(0.0, 2.0, 0.9) == doctest::Approx((std::exp(0.2) - 1.0) / 0.05).epsilon(1e-10));
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 20; ++i) {
        const double y = u(gen);
        CHECK(kernel_g(y, 3.0, 0.8) == doctest::Approx(kernel_g(-y, 3.0, 0.8)).epsilon(1e-12));
    }
}

TEST_CASE("estimator input validation") {
    const std::vector<HomodyneSample> one = {{0.0, 0.0}};
    CHECK_THROWS_AS(estimate_quadratic_functional(one, {0.9, 0.4, 0.0}), TooFewSamples);
    const std::vector<HomodyneSample> two = {{0.0, 0.0}, {1.0, 1.0}};
    CHECK_THROWS_AS(estimate_quadratic_functional(two, {1.0, 0.4, 0.0}), ConfigError);
    CHECK_THROWS_AS(estimate_quadratic_functional(two, {0.9, 0.0, 0.0}), ConfigError);
    // a T^2 = 0.25 / (0.0001 * 0.5) = 5000 overflows the kernel weight.
    CHECK_THROWS_AS(estimate_quadratic_functional(two, {0.5, 0.01, 0.0}), UnstableKernel);
    std::vector<HomodyneSample> big(2001, HomodyneSample{0.0, 0.0});
    CHECK_THROWS_AS(estimate_pairwise_oracle(big, {0.9, 0.4, 0.0}), TooManySamples);
}

TEST_CASE("solve_delta_opt meets the defining equation") {
    const SmoothnessClass cls{0.5, 1.0, 1.0};
    const double eta = 0.9;
    const long n = 100000;
    const double delta = solve_delta_opt(cls, eta, n);
    const double logn = std::log(static_cast<double>(n));
    const double rhs = logn - std::pow(std::log(logn), 2);
    const double c1 = (1.0 - eta) / (2.0 * eta);
    const double x = 1.0 / delta;
    CHECK(c1 * x * x + 2.0 * cls.alpha * std::pow(x, cls.r) == doctest::Approx(rhs).epsilon(1e-9));

    // Independent quadratic-formula oracle at r = 1:
    //   c1 x^2 + 2 alpha x = rhs  =>  x = (-alpha + sqrt(alpha^2 + c1 rhs)) / c1.
    const double x_oracle =
        (-cls.alpha + std::sqrt(cls.alpha * cls.alpha + c1 * rhs)) / c1;
    CHECK(delta == doctest::Approx(1.0 / x_oracle).epsilon(1e-9));

    CHECK_THROWS_AS(solve_delta_opt(cls, eta, 3), SampleTooSmall);
    CHECK_THROWS_AS(solve_delta_opt(SmoothnessClass{0.5, 2.0, 1.0}, eta, n), ConfigError);
}

TEST_CASE("bandwidth rules shrink with n and stay in (0, 1)") {
    const SmoothnessClass cls{0.5, 1.0, 1.0};
    const SmoothnessClass cls_it{0.1, 1.0, 1.0};
    double prev_opt = 1e9, prev_star = 1e9, prev_a1 = 1e9, prev_it = 1e9;
    for (long n : {100L, 1000L, 10000L, 100000L, 1000000L}) {
        const double d_opt = solve_delta_opt(cls, 0.9, n);
        const double d_star = delta_star(0.3, 0.9, n).first;
        const double d_a1 = delta_adaptive(1, 0.9, n);
        const double d_it = delta_iterative(cls_it, 0.9, n);
        for (double d : {d_opt, d_star, d_a1, d_it}) {
            CHECK(d > 0.0);
            CHECK(d < 1.0);
        }
        CHECK(d_opt <= prev_opt);
        CHECK(d_star <= prev_star);
        CHECK(d_a1 <= prev_a1);
        CHECK(d_it <= prev_it);
        prev_opt = d_opt;
        prev_star = d_star;
        prev_a1 = d_a1;
        prev_it = d_it;
    }
}

TEST_CASE("delta_star selects the correct r = 2 regime") {
    const long n = 10000;
    const double logn = std::log(static_cast<double>(n));
    {
        // eta = 0.9: c1 = 1/18; alpha = 0.2 > c1/2 => parametric.
        const auto [delta, regime] = delta_star(0.2, 0.9, n);
        CHECK(regime == RateRegime::r2_parametric);
        CHECK(delta == doctest::Approx(std::pow(0.9 * logn / 0.1, -0.5)).epsilon(1e-12));
    }
    {
        // eta = 0.5: c1 = 0.5; alpha = 0.1 < c1/2 => slow regime.
        const auto [delta, regime] = delta_star(0.1, 0.5, n);
        CHECK(regime == RateRegime::r2_slow);
        CHECK(delta == doctest::Approx(std::pow(logn / (0.5 + 0.2), -0.5)).epsilon(1e-12));
    }
    // Boundary (1-eta)/(2 eta) = 2 alpha: eta = 0.5, alpha = 0.25.
    CHECK_THROWS_AS(delta_star(0.25, 0.5, n), DegenerateBoundary);
}

TEST_CASE("adaptive bandwidths match direct arithmetic") {
    const double eta = 0.9;
    const long n = 1000000;
    const double q = 2.0 * eta * std::log(static_cast<double>(n)) / (1.0 - eta);
    CHECK(delta_adaptive(1, eta, n) ==
          doctest::Approx(std::pow(q - std::sqrt(q), -0.5)).epsilon(1e-12));
    // Variant 2 reduces to variant 1 when 4 A eta / (1 - eta) = 1.
    const double A = (1.0 - eta) / (4.0 * eta);
    CHECK(delta_adaptive(2, eta, n, A) == doctest::Approx(delta_adaptive(1, eta, n)).epsilon(1e-14));
    // Larger A subtracts more, so the bandwidth grows with A.
    CHECK(delta_adaptive(2, eta, n, 0.05) < delta_adaptive(2, eta, n, 0.1));
    CHECK_THROWS_AS(delta_adaptive(1, 0.01, 2), SampleTooSmall);
    CHECK_THROWS_AS(delta_adaptive(2, eta, n, 0.0), ConfigError);
    CHECK_THROWS_AS(delta_adaptive(3, eta, n), ConfigError);
}

TEST_CASE("iterative bandwidth follows the recursion") {
    const double eta = 0.9;
    const long n = 100000;
    const double a = (1.0 - eta) / (4.0 * eta);
    const double logn = std::log(static_cast<double>(n));
    const double sn = (logn - std::pow(std::log(logn), 2)) / (2.0 * a);

    // r <= 1 picks k = 1 automatically.
    const SmoothnessClass cls1{0.1, 1.0, 1.0};
    const double d0 = std::pow(sn, -0.5);
    const double d1 = std::pow(sn - cls1.alpha / a * std::pow(d0, -cls1.r), -0.5);
    CHECK(delta_iterative(cls1, eta, n) == doctest::Approx(d1).epsilon(1e-12));
    CHECK(delta_iterative(cls1, eta, n, 1) == doctest::Approx(d1).epsilon(1e-12));

    // alpha -> 0 collapses to delta_0.
    CHECK(delta_iterative(SmoothnessClass{1e-14, 1.0, 1.0}, eta, n) ==
          doctest::Approx(d0).epsilon(1e-10));

    // r = 1.2 needs k = ceil(1.2/0.8) = 2 refinements.
    const SmoothnessClass cls2{0.1, 1.2, 1.0};
    CHECK(delta_iterative(cls2, eta, n) == doctest::Approx(delta_iterative(cls2, eta, n, 2)));
    CHECK(delta_iterative(cls2, eta, n) != doctest::Approx(delta_iterative(cls2, eta, n, 1)));
}

TEST_CASE("theoretical rates per regime") {
    const long n = 100000;
    const double dn = static_cast<double>(n);
    // r = 2 parametric: exactly 1/n, both sides.
    const SmoothnessClass par{0.2, 2.0, 1.0};
    CHECK(theoretical_rate(par, 0.9, n, RateSide::upper) == doctest::Approx(1.0 / dn));
    CHECK(theoretical_rate(par, 0.9, n, RateSide::lower) == doctest::Approx(1.0 / dn));
    // r = 2 slow: upper n^e, lower (n log n)^e, e = -4a/(c1+2a).
    const SmoothnessClass slow{0.1, 2.0, 1.0};
    const double c1 = 0.5;  // eta = 0.5
    const double e = -4.0 * 0.1 / (c1 + 0.2);
    CHECK(theoretical_rate(slow, 0.5, n, RateSide::upper) == doctest::Approx(std::pow(dn, e)));
    CHECK(theoretical_rate(slow, 0.5, n, RateSide::lower) ==
          doctest::Approx(std::pow(dn * std::log(dn), e)));
    CHECK(theoretical_rate(slow, 0.5, n, RateSide::upper) >
          theoretical_rate(slow, 0.5, n, RateSide::lower));
    // r < 2: L^2 e^{-4 alpha delta_opt^{-r}}, side-independent.
    const SmoothnessClass sub{0.5, 1.0, 2.0};
    const double delta = solve_delta_opt(sub, 0.9, n);
    const double expect = 4.0 * std::exp(-4.0 * 0.5 / delta);
    CHECK(theoretical_rate(sub, 0.9, n, RateSide::upper) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(theoretical_rate(sub, 0.9, n, RateSide::lower) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("risk bounds evaluate the theoretical right-hand sides") {
    const double eta = 0.9, delta = 0.4;
    const long n = 10000;
    const double dn = static_cast<double>(n);
    const double c1 = (1.0 - eta) / (2.0 * eta);
    const double first = 8.0 * eta * eta / ((1.0 - eta) * (1.0 - eta)) / (kPi * kPi * dn * dn) *
                         std::exp(2.0 * c1 / (delta * delta));

    const SmoothnessClass sub{0.5, 1.0, 2.0};
    const auto rb1 = risk_bounds(sub, eta, delta, n);
    CHECK(rb1.regime == RateRegime::r_lt_2);
    CHECK(rb1.bias_bound_sq == doctest::Approx(4.0 * std::exp(-4.0 * 0.5 / delta)).epsilon(1e-12));
    CHECK(rb1.var_bound ==
          doctest::Approx(first + 8.0 * 2.0 / (dn * kPi) * eta / (1.0 - eta) *
                                      std::exp(c1 / (delta * delta) - 2.0 * 0.5 / delta))
              .epsilon(1e-12));

    const SmoothnessClass par{0.2, 2.0, 1.0};
    const auto rb2 = risk_bounds(par, eta, delta, n);
    CHECK(rb2.regime == RateRegime::r2_parametric);
    CHECK(rb2.var_bound ==
          doctest::Approx(first + 8.0 * eta * 1.0 / (4.0 * 0.2 * eta - 1.0 + eta) / dn)
              .epsilon(1e-12));

    const SmoothnessClass slow{0.02, 2.0, 1.0};
    const auto rb3 = risk_bounds(slow, eta, delta, n);
    CHECK(rb3.regime == RateRegime::r2_slow);
    CHECK(rb3.var_bound ==
          doctest::Approx(first + 8.0 * 1.0 / (dn * kPi) * eta / (1.0 - eta - 4.0 * 0.02 * eta) *
                                      std::exp((c1 - 2.0 * 0.02) / (delta * delta)))
              .epsilon(1e-12));

    // Bias bound tends to L^2 as delta grows.
    CHECK(risk_bounds(sub, eta, 1e6, n).bias_bound_sq == doctest::Approx(4.0).epsilon(1e-5));
}

TEST_CASE("asymptotic variance of the vacuum matches an independent Riemann sum") {
    const double eta = 0.9;
    const double W = asymptotic_variance(StateModel::vacuum(), eta);
    CHECK(W > 0.0);

    // Independent oracle: psi(t) = e^{-t^2/4}; plain midpoint rule.
    const double b = (1.0 - eta) / (2.0 * eta);
    const double tmax = 9.0;
    const int N = 900;
    const double h = 2.0 * tmax / N;
    double sum = 0.0;
    for (int j = 0; j < N; ++j) {
        const double t1 = -tmax + h * (j + 0.5);
        for (int k = 0; k < N; ++k) {
            const double t2 = -tmax + h * (k + 0.5);
            sum += std::abs(t1) * std::abs(t2) * std::exp(b * t1 * t2) *
                   std::exp(-(t1 * t1 + t2 * t2 + (t1 + t2) * (t1 + t2)) / 4.0);
        }
    }
    sum *= h * h;
    const double oracle = sum / (4.0 * kPi * kPi) - 1.0 / (kPi * kPi);
    CHECK(W == doctest::Approx(oracle).epsilon(1e-4));

    // Quadrature refinement stability.
    CHECK(asymptotic_variance(StateModel::vacuum(), eta, 10.0, 480) ==
          doctest::Approx(W).epsilon(1e-8));

    // b = (1-eta)/(2 eta) >= 3/2 diverges.
    CHECK_THROWS_AS(asymptotic_variance(StateModel::vacuum(), 0.2), NonIntegrable);
    CHECK_THROWS_AS(asymptotic_variance(StateModel::vacuum(), 0.9, 2.0), TailNotNegligible);
}

TEST_CASE("Monte Carlo mean respects the bias bound (vacuum)") {
    const double eta = 0.9;
    const long n = 400;
    const int reps = 300;
    const StateModel state = StateModel::vacuum();
    const double L = class_norm(state, 0.2, 2.0);
    for (double delta : {0.3, 0.5}) {
        std::vector<double> est;
        const NoiseConfig noise{eta};
        for (int rep = 0; rep < reps; ++rep) {
            auto rng_x = make_stream(2024, StreamTag::Ideal, static_cast<std::uint64_t>(rep));
            auto rng_n = make_stream(2024, StreamTag::Noise, static_cast<std::uint64_t>(rep));
            const auto noisy = apply_noise(sample_ideal(state, n, rng_x), noise, rng_n);
            est.push_back(estimate_quadratic_functional(noisy, {eta, delta, 0.0}).d2_hat);
        }
        double mean = 0.0;
        for (double e : est) mean += e;
        mean /= reps;
        double var = 0.0;
        for (double e : est) var += (e - mean) * (e - mean);
        var /= (reps - 1);
        const double se = std::sqrt(var / reps);
        const double bias_bound = L * std::exp(-2.0 * 0.2 / (delta * delta));
        CHECK(std::abs(mean - true_purity(state)) <= bias_bound + 3.0 * se);
    }
}

TEST_CASE("vacuum estimator is unbiased for the truncated ball functional") {
    // E[d2_n] = (1/2pi)(1 - e^{-1/(2 delta^2)}) for the vacuum: the kernel
    // integrates |W~|^2 exactly over {|t| <= T sqrt(eta)} = {|t| <= 1/delta}.
    const double eta = 0.9, delta = 0.4;
    const long n = 500;
    const int reps = 400;
    std::vector<double> est;
    for (int rep = 0; rep < reps; ++rep) {
        auto rng_x = make_stream(555, StreamTag::Ideal, static_cast<std::uint64_t>(rep));
        auto rng_n = make_stream(555, StreamTag::Noise, static_cast<std::uint64_t>(rep));
        const auto noisy =
            apply_noise(sample_ideal(StateModel::vacuum(), n, rng_x), NoiseConfig{eta}, rng_n);
        est.push_back(estimate_quadratic_functional(noisy, {eta, delta, 0.0}).d2_hat);
    }
    double mean = 0.0;
    for (double e : est) mean += e;
    mean /= reps;
    double var = 0.0;
    for (double e : est) var += (e - mean) * (e - mean);
    var /= (reps - 1);
    const double target = (1.0 - std::exp(-1.0 / (2.0 * delta * delta))) / (2.0 * kPi);
    CHECK(std::abs(mean - target) <= 4.0 * std::sqrt(var / reps));
}
