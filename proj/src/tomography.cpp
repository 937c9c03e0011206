#include "homodyne/tomography.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>

#include "homodyne/errors.hpp"
#include "homodyne/quadrature.hpp"

namespace homodyne {

namespace {
constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;
} // namespace

double DensityTable::trapezoid_mass() const {
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        m += 0.5 * (values[i] + values[i + 1]) * (grid[i + 1] - grid[i]);
    return m;
}

double DensityTable::inverse_cdf(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    // Generalized inverse inf{x : F(x) >= u}: flat CDF stretches resolve to
    // their left edge.
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.begin()) return grid.front();
    const std::size_t k = static_cast<std::size_t>(it - cdf.begin());
    const double c0 = cdf[k - 1], c1 = cdf[k];
    const double f = (u - c0) / (c1 - c0);  // c0 < u <= c1 by construction
    return grid[k - 1] + f * (grid[k] - grid[k - 1]);
}

double state_scale(const StateModel& state) {
    switch (state.kind) {
        case StateKind::Cat: return state.x0;
        case StateKind::Coherent: return std::sqrt(state.nbar);
        case StateKind::Squeezed: return std::exp(std::abs(state.xi)) + std::abs(state.disp);
        case StateKind::Thermal: return std::sqrt(1.0 / (2.0 * std::tanh(state.beta / 2.0)));
        default: return 0.0;
    }
}

DensityTable conditional_density(const StateModel& state, double phi, double x_max, int m) {
    if (m < 512) throw ConfigError("conditional_density requires m >= 512");
    if (m % 2 != 0) ++m;
    if (x_max <= 0.0) x_max = 8.0 * (1.0 + state_scale(state));

    const double t_max = default_t_max(state);
    const double dt_target = std::min(0.05, kPi / (8.0 * x_max));
    const auto nt = even_intervals(2.0 * t_max / dt_target);
    const double ht = 2.0 * t_max / static_cast<double>(nt);
    const auto wt = simpson_weights(nt, ht);

    std::vector<cplx> ray(nt + 1);
    for (std::size_t j = 0; j <= nt; ++j)
        ray[j] = wt[j] * char_fn_radial(state, -t_max + ht * static_cast<double>(j), phi);

    DensityTable table;
    table.grid.resize(m + 1);
    table.values.resize(m + 1);
    const double hx = 2.0 * x_max / static_cast<double>(m);

    double worst_imag = 0.0;
    for (int i = 0; i <= m; ++i) {
        const double x = -x_max + hx * static_cast<double>(i);
        // e^{-i t_j x} advanced by a rotation per node.
        const cplx step = std::exp(cplx(0.0, -ht * x));
        cplx z = std::exp(cplx(0.0, t_max * x));
        cplx acc(0.0, 0.0);
        for (std::size_t j = 0; j <= nt; ++j) {
            acc += ray[j] * z;
            z *= step;
        }
        acc /= 2.0 * kPi;
        worst_imag = std::max(worst_imag, std::abs(acc.imag()));
        table.grid[i] = x;
        table.values[i] = acc.real();
    }
    if (worst_imag >= 1e-9)
        throw NumericError("conditional_density: imaginary residue >= 1e-9");

    for (double& v : table.values) {
        if (v < -1e-8) throw NegativeDensity("conditional_density: value below -1e-8");
        if (v < 0.0) v = 0.0;
    }
    const double mass = table.trapezoid_mass();
    if (std::abs(mass - 1.0) > 1e-6)
        throw MassDeficit("conditional_density: trapezoid mass off by > 1e-6");
    for (double& v : table.values) v /= mass;

    table.cdf.resize(m + 1);
    table.cdf[0] = 0.0;
    for (int i = 1; i <= m; ++i)
        table.cdf[i] =
            table.cdf[i - 1] + 0.5 * (table.values[i - 1] + table.values[i]) * hx;
    const double total = table.cdf[m];
    for (double& c : table.cdf) c /= total;
    table.cdf[m] = 1.0;
    return table;
}

namespace {

// Cat conditional density has the closed form
//   [ (g(x-c) + g(x+c))/2 + e^{-x0^2 cos^2 phi} g(x) cos(2 k x) ] / (1 + e^{-x0^2})
// with g the N(0, 1/2) density, c = x0 cos phi, k = x0 sin phi. The signed
// interference term is dominated by the same mixture with cos replaced by 1,
// so rejection from that three-component envelope is exact.
double sample_cat(double x0, double phi, RngStream& rng) {
    const double c = x0 * std::cos(phi);
    const double k = x0 * std::sin(phi);
    const double w3 = std::exp(-c * c);
    const double sd = 1.0 / std::sqrt(2.0);
    std::normal_distribution<double> normal(0.0, sd);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto g = [](double x) { return std::exp(-x * x) / std::sqrt(kPi); };
    for (;;) {
        const double pick = unif(rng) * (1.0 + w3);
        double x;
        if (pick < 0.5) x = c + normal(rng);
        else if (pick < 1.0) x = -c + normal(rng);
        else x = normal(rng);
        const double env = 0.5 * (g(x - c) + g(x + c)) + w3 * g(x);
        const double p = 0.5 * (g(x - c) + g(x + c)) + w3 * g(x) * std::cos(2.0 * k * x);
        if (unif(rng) * env <= p) return x;
    }
}

} // namespace

double sample_x_given_phi(const StateModel& state, double phi, RngStream& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    switch (state.kind) {
        case StateKind::Vacuum:
            return std::sqrt(0.5) * normal(rng);
        case StateKind::SinglePhoton: {
            // |X| = sqrt(G), G ~ Gamma(3/2, 1); uniform sign.
            std::gamma_distribution<double> gamma(1.5, 1.0);
            const double g = gamma(rng);
            const bool neg = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
            return (neg ? -1.0 : 1.0) * std::sqrt(g);
        }
        case StateKind::Coherent:
            return std::sqrt(state.nbar) * std::sin(phi) + std::sqrt(0.5) * normal(rng);
        case StateKind::Squeezed: {
            const double cp = std::cos(phi), sp = std::sin(phi);
            const double var =
                0.5 * (cp * cp * std::exp(2.0 * state.xi) + sp * sp * std::exp(-2.0 * state.xi));
            return state.disp * sp + std::sqrt(var) * normal(rng);
        }
        case StateKind::Thermal:
            return std::sqrt(0.5 / std::tanh(state.beta / 2.0)) * normal(rng);
        case StateKind::Cat:
            return sample_cat(state.x0, phi, rng);
    }
    throw ConfigError("unknown state kind");
}

std::vector<IdealSample> sample_ideal(const StateModel& state, long n, RngStream& rng) {
    if (n < 1) throw ConfigError("sample_ideal requires n >= 1");
    std::uniform_real_distribution<double> phase(0.0, kPi);
    std::vector<IdealSample> out;
    out.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        const double phi = phase(rng);
        out.push_back({sample_x_given_phi(state, phi, rng), phi});
    }
    return out;
}

std::vector<double> sample_generic(const DensityTable& table, long n, RngStream& rng) {
    if (n < 1) throw ConfigError("sample_generic requires n >= 1");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) out.push_back(table.inverse_cdf(unif(rng)));
    return out;
}

std::vector<HomodyneSample> apply_noise(std::span<const IdealSample> ideal,
                                        const NoiseConfig& cfg, RngStream& rng) {
    if (!(cfg.eta > 0.0 && cfg.eta < 1.0))
        throw ConfigError("apply_noise requires eta in (0, 1)");
    const double se = std::sqrt(cfg.eta);
    const double sn = std::sqrt((1.0 - cfg.eta) / 2.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<HomodyneSample> out;
    out.reserve(ideal.size());
    for (const auto& s : ideal) out.push_back({se * s.x + sn * normal(rng), s.phi});
    return out;
}

namespace {
void append_double(std::string& buf, double v) {
    char tmp[32];
    const auto res = std::to_chars(tmp, tmp + sizeof(tmp), v);
    buf.append(tmp, res.ptr);
}

double parse_double(std::string_view field, const std::string& path) {
    double v;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size() || !std::isfinite(v))
        throw MalformedRow(path + ": bad numeric field '" + std::string(field) + "'");
    return v;
}
} // namespace

void write_samples(std::span<const HomodyneSample> samples, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    std::string buf = "y,phi\n";
    for (const auto& s : samples) {
        append_double(buf, s.y);
        buf.push_back(',');
        append_double(buf, s.phi);
        buf.push_back('\n');
    }
    out << buf;
    if (!out) throw IoError("write failed: " + path);
}

std::vector<HomodyneSample> read_samples(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "y,phi")
        throw MalformedRow(path + ": missing 'y,phi' header");
    std::vector<HomodyneSample> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw MalformedRow(path + ": expected exactly two columns");
        out.push_back({parse_double(std::string_view(line).substr(0, comma), path),
                       parse_double(std::string_view(line).substr(comma + 1), path)});
    }
    return out;
}

} // namespace homodyne
