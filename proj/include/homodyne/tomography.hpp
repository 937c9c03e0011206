#ifndef HOMODYNE_TOMOGRAPHY_HPP
#define HOMODYNE_TOMOGRAPHY_HPP

#include <span>
#include <string>
#include <vector>

#include "homodyne/rng.hpp"
#include "homodyne/states.hpp"

namespace homodyne {

// One noisy observation (Y, Phi) of the tomographic model
// Y = sqrt(eta) X + sqrt((1-eta)/2) xi.
struct HomodyneSample {
    double y;
    double phi;  // in [0, pi)
};

struct IdealSample {
    double x;
    double phi;
};

struct NoiseConfig {
    double eta;  // detection efficiency, in (0, 1)
};

// Tabulated conditional density p(x | phi) with its CDF; values are
// clamped of quadrature ripple and renormalized to unit trapezoid mass.
struct DensityTable {
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<double> cdf;

    // Monotone piecewise-linear inverse of the CDF; ties break left.
    double inverse_cdf(double u) const;
    double trapezoid_mass() const;
};

// p(x|phi) by numeric inverse Fourier of W~ along the ray at angle phi,
// on m+1 uniform abscissae over [-x_max, x_max]. x_max <= 0 picks the
// state-dependent default 8 (1 + scale).
DensityTable conditional_density(const StateModel& state, double phi, double x_max = 0.0,
                                 int m = 2048);

// Standard-deviation-like width of p(.|phi), worst case over phi.
double state_scale(const StateModel& state);

// n i.i.d. ideal pairs, Phi ~ Uniform[0, pi], X | Phi by the state's exact
// sampler (Gaussian, Gamma or mixture-rejection path).
std::vector<IdealSample> sample_ideal(const StateModel& state, long n, RngStream& rng);

// Exact draw of X given Phi = phi (the fast path used by sample_ideal).
double sample_x_given_phi(const StateModel& state, double phi, RngStream& rng);

// Generic inverse-CDF draws from a density table; cross-check path.
std::vector<double> sample_generic(const DensityTable& table, long n, RngStream& rng);

// Apply the Gaussian detection-noise channel; phi values pass through.
std::vector<HomodyneSample> apply_noise(std::span<const IdealSample> ideal,
                                        const NoiseConfig& cfg, RngStream& rng);

// CSV round trip, header "y,phi", shortest round-trip decimals, LF endings.
void write_samples(std::span<const HomodyneSample> samples, const std::string& path);
std::vector<HomodyneSample> read_samples(const std::string& path);

} // namespace homodyne

#endif
