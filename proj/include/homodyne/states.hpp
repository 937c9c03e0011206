#ifndef HOMODYNE_STATES_HPP
#define HOMODYNE_STATES_HPP

#include <complex>
#include <string>

namespace homodyne {

enum class StateKind { Vacuum, SinglePhoton, Cat, Coherent, Squeezed, Thermal };

// Catalog entry: a quantum state described by the closed form of the
// 2-D Fourier transform of its Wigner function,
//   W~(u,v) = \int\int W(p,q) e^{i(up+vq)} dp dq.
struct StateModel {
    StateKind kind = StateKind::Vacuum;
    double x0 = 0.0;    // cat displacement, > 0
    double nbar = 0.0;  // coherent mean photon number, >= 0
    double xi = 0.0;    // squeezing parameter
    double disp = 0.0;  // squeezed-state displacement
    double beta = 0.0;  // thermal inverse temperature, > 0

    static StateModel vacuum();
    static StateModel single_photon();
    static StateModel cat(double x0);
    static StateModel coherent(double nbar);
    static StateModel squeezed(double xi, double disp);
    static StateModel thermal(double beta);

    // True for states whose W~ depends on (u,v) only through the norm.
    bool rotation_invariant() const;
    std::string name() const;
};

// Smoothness class A(alpha, r, L): Wigner functions with
// \int |W~|^2 e^{2 alpha ||w||^r} <= (2 pi)^2 L.
struct SmoothnessClass {
    double alpha;  // > 0
    double r;      // in (0, 2]
    double L;      // > 0
};

// W~ evaluated at a point of the plane.
std::complex<double> char_fn(const StateModel& state, double u, double v);

// W~(t cos phi, t sin phi) = E[e^{itX} | Phi = phi]; modulus <= 1.
std::complex<double> char_fn_radial(const StateModel& state, double t, double phi);

// Exact purity: 1/(2 pi) for the pure catalog states, tanh(beta/2)/(2 pi)
// for the thermal state.
double true_purity(const StateModel& state);

// d^2 = (1/4 pi^2) \int\int |W~|^2 by radial quadrature. t_max <= 0 picks a
// state-dependent default. Throws TailNotNegligible if |W~(t_max,.)|^2 t_max
// is not below 1e-12.
double purity_by_plancherel(const StateModel& state, double t_max = 0.0, int nodes = 2048);

// Smallest L such that state is in A(alpha, r, L); throws Divergent when the
// weighted integral has no finite tail (e.g. alpha >= 1/4 for the vacuum at
// r = 2).
double class_norm(const StateModel& state, double alpha, double r);

// Membership threshold on alpha at r = 2 for this state's Gaussian tail.
double alpha_threshold_r2(const StateModel& state);

// E[e^{itX}] with Phi ~ Uniform[0, pi]: the phi-average of char_fn_radial.
std::complex<double> marginal_char_fn(const StateModel& state, double t, int phi_nodes = 512);

// Default radial truncation for quadratures over |W~|^2.
double default_t_max(const StateModel& state);

} // namespace homodyne

#endif
