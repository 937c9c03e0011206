#include "homodyne/states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "homodyne/errors.hpp"
#include "homodyne/quadrature.hpp"

namespace homodyne {

namespace {
constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;
} // namespace

StateModel StateModel::vacuum() { return {StateKind::Vacuum}; }

StateModel StateModel::single_photon() { return {StateKind::SinglePhoton}; }

StateModel StateModel::cat(double x0) {
    if (!(x0 > 0.0)) throw ConfigError("cat state requires x0 > 0");
    StateModel s{StateKind::Cat};
    s.x0 = x0;
    return s;
}

StateModel StateModel::coherent(double nbar) {
    if (!(nbar >= 0.0)) throw ConfigError("coherent state requires nbar >= 0");
    StateModel s{StateKind::Coherent};
    s.nbar = nbar;
    return s;
}

StateModel StateModel::squeezed(double xi, double disp) {
    if (!std::isfinite(xi) || !std::isfinite(disp))
        throw ConfigError("squeezed state requires finite xi and disp");
    StateModel s{StateKind::Squeezed};
    s.xi = xi;
    s.disp = disp;
    return s;
}

StateModel StateModel::thermal(double beta) {
    if (!(beta > 0.0)) throw ConfigError("thermal state requires beta > 0");
    StateModel s{StateKind::Thermal};
    s.beta = beta;
    return s;
}

bool StateModel::rotation_invariant() const {
    return kind == StateKind::Vacuum || kind == StateKind::SinglePhoton ||
           kind == StateKind::Thermal;
}

std::string StateModel::name() const {
    switch (kind) {
        case StateKind::Vacuum: return "vacuum";
        case StateKind::SinglePhoton: return "single_photon";
        case StateKind::Cat: return "cat";
        case StateKind::Coherent: return "coherent";
        case StateKind::Squeezed: return "squeezed";
        case StateKind::Thermal: return "thermal";
    }
    return "?";
}

std::complex<double> char_fn(const StateModel& state, double u, double v) {
    const double s2 = u * u + v * v;
    switch (state.kind) {
        case StateKind::Vacuum:
            return cplx(std::exp(-s2 / 4.0), 0.0);
        case StateKind::SinglePhoton:
            return cplx((1.0 - s2 / 2.0) * std::exp(-s2 / 4.0), 0.0);
        case StateKind::Cat: {
            // Superposition of displacements +-x0 with vacuum variance 1/2:
            //   e^{-s/4} (cos(u x0) + e^{-x0^2} cosh(x0 v)) / (1 + e^{-x0^2}),
            // normalized so W~(0,0) = 1 and the Plancherel purity is 1/(2 pi).
            const double a = state.x0;
            const double ov = std::exp(-a * a);
            const double val =
                std::exp(-s2 / 4.0) * (std::cos(u * a) + ov * std::cosh(a * v)) / (1.0 + ov);
            return cplx(val, 0.0);
        }
        case StateKind::Coherent:
            return std::exp(cplx(-s2 / 4.0, std::sqrt(state.nbar) * v));
        case StateKind::Squeezed:
            return std::exp(cplx(
                -u * u / 4.0 * std::exp(2.0 * state.xi) - v * v / 4.0 * std::exp(-2.0 * state.xi),
                v * state.disp));
        case StateKind::Thermal:
            // Exponent uses tanh(beta/2) unsquared so that Tr rho^2 =
            // tanh(beta/2) and the purity equals tanh(beta/2)/(2 pi).
            return cplx(std::exp(-s2 / (4.0 * std::tanh(state.beta / 2.0))), 0.0);
    }
    return cplx(0.0, 0.0);
}

std::complex<double> char_fn_radial(const StateModel& state, double t, double phi) {
    // Bypass the trigonometry for isotropic states so the value is
    // bit-identical across phi.
    if (state.rotation_invariant()) return char_fn(state, t, 0.0);
    return char_fn(state, t * std::cos(phi), t * std::sin(phi));
}

double true_purity(const StateModel& state) {
    if (state.kind == StateKind::Thermal) return std::tanh(state.beta / 2.0) / (2.0 * kPi);
    return 1.0 / (2.0 * kPi);
}

double default_t_max(const StateModel& state) {
    switch (state.kind) {
        case StateKind::Cat:
            // The cosh term shifts the Gaussian envelope out to |v| ~ 2 x0.
            return 14.0 + 2.0 * state.x0;
        case StateKind::Squeezed:
            return 14.0 * std::exp(std::abs(state.xi));
        default:
            return 14.0;
    }
}

namespace {

// Largest |W~(t_max cos phi, t_max sin phi)| over a phi sweep.
double boundary_modulus(const StateModel& state, double t_max) {
    if (state.rotation_invariant()) return std::abs(char_fn_radial(state, t_max, 0.0));
    double m = 0.0;
    for (int j = 0; j <= 64; ++j) {
        const double phi = kPi * static_cast<double>(j) / 64.0;
        m = std::max(m, std::abs(char_fn_radial(state, t_max, phi)));
        m = std::max(m, std::abs(char_fn_radial(state, -t_max, phi)));
    }
    return m;
}

// (1/4 pi^2) \int_0^pi \int_{-t_max}^{t_max} |t| |W~|^2 g(|t|) dt dphi,
// the shared core of purity_by_plancherel and class_norm. g is a radial
// weight (identically one for the purity).
template <typename G>
double radial_plane_integral(const StateModel& state, double t_max, int nodes, G&& weight) {
    if (state.rotation_invariant()) {
        const auto n = even_intervals(static_cast<double>(nodes));
        const double integral = simpson(
            [&](double t) {
                const double w = std::abs(char_fn_radial(state, t, 0.0));
                return t * w * w * weight(t);
            },
            0.0, t_max, n);
        // phi contributes pi, the t-axis symmetry a factor 2.
        return 2.0 * kPi * integral / (4.0 * kPi * kPi);
    }
    auto nt = even_intervals(static_cast<double>(nodes));
    if (nt % 4 != 0) nt += 2;  // keep the |t| kink at t = 0 on a panel boundary
    const std::size_t nphi = 1024;
    const double integral = simpson(
        [&](double phi) {
            return simpson(
                [&](double t) {
                    const double w = std::abs(char_fn_radial(state, t, phi));
                    return std::abs(t) * w * w * weight(std::abs(t));
                },
                -t_max, t_max, nt);
        },
        0.0, kPi, nphi);
    return integral / (4.0 * kPi * kPi);
}

} // namespace

double purity_by_plancherel(const StateModel& state, double t_max, int nodes) {
    if (t_max <= 0.0) t_max = default_t_max(state);
    if (nodes < 64) throw ConfigError("purity_by_plancherel requires nodes >= 64");
    const double edge = boundary_modulus(state, t_max);
    if (edge * edge * t_max >= 1e-12)
        throw TailNotNegligible("purity_by_plancherel: |W~(t_max)|^2 t_max >= 1e-12");
    return radial_plane_integral(state, t_max, nodes, [](double) { return 1.0; });
}

double class_norm(const StateModel& state, double alpha, double r) {
    if (!(alpha > 0.0) || !(r > 0.0) || !(r > 0.0 && r <= 2.0))
        throw ConfigError("class_norm requires alpha > 0 and r in (0, 2]");

    auto weighted_edge = [&](double t) {
        const double w = boundary_modulus(state, t);
        return t * w * w * std::exp(2.0 * alpha * std::pow(t, r));
    };

    // Grow the truncation until the weighted integrand has a negligible,
    // decreasing tail; a tail that keeps growing means the weight beats the
    // Gaussian decay and the class norm is infinite.
    double t_max = default_t_max(state);
    const double cap = 512.0;
    while (true) {
        const double f_end = weighted_edge(t_max);
        const double f_mid = weighted_edge(0.75 * t_max);
        if (f_end < 1e-14 && f_end <= f_mid) break;
        if (f_end > f_mid && f_end > 1.0) throw Divergent("class_norm: weighted integrand grows");
        t_max *= 2.0;
        if (t_max > cap) throw Divergent("class_norm: weighted tail does not vanish");
    }

    const int nodes = std::max(2048, static_cast<int>(t_max * 64.0));
    return radial_plane_integral(state, t_max, nodes,
                                 [&](double t) { return std::exp(2.0 * alpha * std::pow(t, r)); });
}

double alpha_threshold_r2(const StateModel& state) {
    switch (state.kind) {
        case StateKind::Squeezed:
            // Slowest decay direction of the anisotropic Gaussian.
            return std::exp(-2.0 * std::abs(state.xi)) / 4.0;
        case StateKind::Thermal:
            return 1.0 / (4.0 * std::tanh(state.beta / 2.0));
        default:
            return 0.25;
    }
}

std::complex<double> marginal_char_fn(const StateModel& state, double t, int phi_nodes) {
    if (state.rotation_invariant()) return char_fn_radial(state, t, 0.0);
    const auto n = even_intervals(std::max(256.0, static_cast<double>(phi_nodes)));
    const double h = kPi / static_cast<double>(n);
    std::vector<cplx> vals(n + 1);
    for (std::size_t j = 0; j <= n; ++j)
        vals[j] = char_fn_radial(state, t, h * static_cast<double>(j));
    return simpson_sum(std::span<const cplx>(vals), h) / kPi;
}

} // namespace homodyne
