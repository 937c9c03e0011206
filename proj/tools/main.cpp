// Command-line front end: simulate noisy homodyne data, estimate the
// purity functional, and run Monte Carlo experiments against the
// theoretical rates.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "homodyne/errors.hpp"
#include "homodyne/experiments.hpp"

using json = nlohmann::ordered_json;
using namespace homodyne;

namespace {

struct RunConfig {
    std::string state_kind = "vacuum";
    double x0 = 1.5;
    double nbar = 1.0;
    double xi = 0.5;
    double disp = 0.5;
    double beta = 1.0;
    double eta = 0.9;
    long n = 10000;
    std::vector<long> n_grid = {1000, 4000, 16000};
    int replicates = 50;
    std::string rule = "delta_star";
    double delta = 0.4;
    double A = 0.0;
    int k = 0;
    double alpha = 0.2;
    double r = 2.0;
    double L = 1.0;
    double tau = 0.02;
    std::uint64_t seed = 1;
    std::string out = ".";
    std::string samples;
    int threads = 1;
};

const std::vector<std::string> kConfigKeys = {
    "state", "eta",   "n",     "n_grid", "replicates", "rule", "delta",   "A",       "k",
    "alpha", "r",     "L",     "tau",    "seed",       "out",  "samples", "threads"};
const std::vector<std::string> kStateKeys = {"kind", "x0", "nbar", "xi", "disp", "beta"};

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown config key '" + key + "' in " + where);
    }
}

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
    reject_unknown_keys(doc, kConfigKeys, "config root");
    if (doc.contains("state")) {
        const auto& st = doc["state"];
        if (!st.is_object()) throw ConfigError("config 'state' must be an object");
        reject_unknown_keys(st, kStateKeys, "state");
        if (st.contains("kind")) cfg.state_kind = st["kind"].get<std::string>();
        if (st.contains("x0")) cfg.x0 = st["x0"].get<double>();
        if (st.contains("nbar")) cfg.nbar = st["nbar"].get<double>();
        if (st.contains("xi")) cfg.xi = st["xi"].get<double>();
        if (st.contains("disp")) cfg.disp = st["disp"].get<double>();
        if (st.contains("beta")) cfg.beta = st["beta"].get<double>();
    }
    if (doc.contains("eta")) cfg.eta = doc["eta"].get<double>();
    if (doc.contains("n")) cfg.n = doc["n"].get<long>();
    if (doc.contains("n_grid")) cfg.n_grid = doc["n_grid"].get<std::vector<long>>();
    if (doc.contains("replicates")) cfg.replicates = doc["replicates"].get<int>();
    if (doc.contains("rule")) cfg.rule = doc["rule"].get<std::string>();
    if (doc.contains("delta")) cfg.delta = doc["delta"].get<double>();
    if (doc.contains("A")) cfg.A = doc["A"].get<double>();
    if (doc.contains("k")) cfg.k = doc["k"].get<int>();
    if (doc.contains("alpha")) cfg.alpha = doc["alpha"].get<double>();
    if (doc.contains("r")) cfg.r = doc["r"].get<double>();
    if (doc.contains("L")) cfg.L = doc["L"].get<double>();
    if (doc.contains("tau")) cfg.tau = doc["tau"].get<double>();
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("out")) cfg.out = doc["out"].get<std::string>();
    if (doc.contains("samples")) cfg.samples = doc["samples"].get<std::string>();
    if (doc.contains("threads")) cfg.threads = doc["threads"].get<int>();
}

StateModel make_state(const RunConfig& cfg) {
    if (cfg.state_kind == "vacuum") return StateModel::vacuum();
    if (cfg.state_kind == "single_photon") return StateModel::single_photon();
    if (cfg.state_kind == "cat") return StateModel::cat(cfg.x0);
    if (cfg.state_kind == "coherent") return StateModel::coherent(cfg.nbar);
    if (cfg.state_kind == "squeezed") return StateModel::squeezed(cfg.xi, cfg.disp);
    if (cfg.state_kind == "thermal") return StateModel::thermal(cfg.beta);
    throw ConfigError("unknown state kind: " + cfg.state_kind);
}

void validate_common(const RunConfig& cfg) {
    if (!(cfg.eta > 0.0 && cfg.eta < 1.0)) throw ConfigError("eta must lie in the open interval (0, 1)");
    if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
}

json state_json(const RunConfig& cfg) {
    json st;
    st["kind"] = cfg.state_kind;
    if (cfg.state_kind == "cat") st["x0"] = cfg.x0;
    if (cfg.state_kind == "coherent") st["nbar"] = cfg.nbar;
    if (cfg.state_kind == "squeezed") {
        st["xi"] = cfg.xi;
        st["disp"] = cfg.disp;
    }
    if (cfg.state_kind == "thermal") st["beta"] = cfg.beta;
    return st;
}

json effective_config(const RunConfig& cfg) {
    json doc;
    doc["state"] = state_json(cfg);
    doc["eta"] = cfg.eta;
    doc["n"] = cfg.n;
    doc["n_grid"] = cfg.n_grid;
    doc["replicates"] = cfg.replicates;
    doc["rule"] = cfg.rule;
    doc["delta"] = cfg.delta;
    doc["A"] = cfg.A;
    doc["k"] = cfg.k;
    doc["alpha"] = cfg.alpha;
    doc["r"] = cfg.r;
    doc["L"] = cfg.L;
    doc["tau"] = cfg.tau;
    doc["seed"] = cfg.seed;
    doc["out"] = cfg.out;
    doc["threads"] = cfg.threads;
    return doc;
}

ExperimentPlan make_plan(const RunConfig& cfg) {
    ExperimentPlan plan;
    plan.state = make_state(cfg);
    plan.eta = cfg.eta;
    plan.n_grid = cfg.n_grid;
    plan.replicates = cfg.replicates;
    plan.rule = rule_from_name(cfg.rule);
    plan.fixed_delta = cfg.delta;
    plan.adaptive_A = cfg.A > 0.0 ? cfg.A : cfg.alpha;
    plan.iterative_k = cfg.k;
    plan.cls = SmoothnessClass{cfg.alpha, cfg.r, cfg.L};
    plan.seed = cfg.seed;
    return plan;
}

std::string fmt(double v) {
    char tmp[32];
    const auto res = std::to_chars(tmp, tmp + sizeof(tmp), v);
    return std::string(tmp, res.ptr);
}

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for checksum: " + path);
    std::uint64_t h = 14695981039346656037ULL;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

int cmd_states(const RunConfig& cfg) {
    std::vector<StateModel> rows = {StateModel::vacuum(),
                                    StateModel::single_photon(),
                                    StateModel::cat(cfg.x0),
                                    StateModel::coherent(cfg.nbar),
                                    StateModel::squeezed(cfg.xi, cfg.disp),
                                    StateModel::thermal(cfg.beta)};
    std::cout << "state          parameters                purity       class membership (r=2)\n";
    for (const auto& s : rows) {
        std::ostringstream params;
        switch (s.kind) {
            case StateKind::Cat: params << "x0=" << s.x0; break;
            case StateKind::Coherent: params << "nbar=" << s.nbar; break;
            case StateKind::Squeezed: params << "xi=" << s.xi << " disp=" << s.disp; break;
            case StateKind::Thermal: params << "beta=" << s.beta; break;
            default: params << "-"; break;
        }
        std::ostringstream line;
        line.setf(std::ios::left);
        line.width(15);
        line << s.name();
        line.width(26);
        line << params.str();
        std::ostringstream purity;
        purity.precision(7);
        purity << true_purity(s);
        line.width(13);
        line << purity.str();
        line << "alpha < " << fmt(alpha_threshold_r2(s));
        std::cout << line.str() << "\n";
    }
    return 0;
}

int cmd_simulate(const RunConfig& cfg) {
    validate_common(cfg);
    if (cfg.n < 1) throw ConfigError("simulate requires n >= 1");
    const auto state = make_state(cfg);
    auto rng_ideal = make_stream(cfg.seed, StreamTag::Ideal, 0);
    auto rng_noise = make_stream(cfg.seed, StreamTag::Noise, 0);
    const auto ideal = sample_ideal(state, cfg.n, rng_ideal);
    const auto samples = apply_noise(ideal, NoiseConfig{cfg.eta}, rng_noise);

    std::filesystem::create_directories(cfg.out);
    const auto path = (std::filesystem::path(cfg.out) / "samples.csv").string();
    write_samples(samples, path);

    json doc;
    doc["path"] = path;
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a_file(path)));
    doc["checksum"] = std::string(hex);
    doc["n"] = cfg.n;
    doc["config"] = effective_config(cfg);
    std::cout << doc.dump(2) << "\n";
    return 0;
}

double resolve_cli_delta(const RunConfig& cfg, long n) {
    auto plan = make_plan(cfg);
    return resolve_delta(plan, n);
}

int cmd_estimate(const RunConfig& cfg) {
    validate_common(cfg);
    if (cfg.samples.empty()) throw ConfigError("estimate requires --samples <csv>");
    const auto samples = read_samples(cfg.samples);
    const long n = static_cast<long>(samples.size());
    const double delta = resolve_cli_delta(cfg, n);
    const auto res = estimate_quadratic_functional(samples, EstimatorConfig{cfg.eta, delta, 0.0});

    json doc;
    doc["d2_hat"] = res.d2_hat;
    doc["delta"] = res.delta;
    doc["rule"] = cfg.rule;
    doc["t_max"] = res.t_max;
    doc["nodes"] = res.nodes;
    doc["kernel_mass"] = res.kernel_mass;
    doc["eta"] = cfg.eta;
    doc["n"] = n;
    if (!cfg.state_kind.empty() && cfg.state_kind != "none") {
        const double truth = true_purity(make_state(cfg));
        doc["true_purity"] = truth;
        doc["abs_error"] = std::abs(res.d2_hat - truth);
    }
    doc["config"] = effective_config(cfg);
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_experiment(const RunConfig& cfg) {
    validate_common(cfg);
    const auto plan = make_plan(cfg);
    const auto summary = run_mse_experiment(plan);

    std::filesystem::create_directories(cfg.out);
    const auto mse_path = (std::filesystem::path(cfg.out) / "mse.csv").string();
    {
        std::ofstream out(mse_path, std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + mse_path);
        out << "n,mean_estimate,bias,variance,mse,mse_stderr,theoretical_rate,bias_bound_sq,"
               "var_bound\n";
        for (const auto& row : summary.rows) {
            out << row.n << ',' << fmt(row.mean_estimate) << ',' << fmt(row.empirical_bias) << ','
                << fmt(row.empirical_variance) << ',' << fmt(row.empirical_mse) << ','
                << fmt(row.mse_stderr) << ',' << fmt(row.theoretical_rate) << ','
                << fmt(row.bias_bound_sq) << ',' << fmt(row.var_bound) << '\n';
        }
    }

    const long n_norm = plan.n_grid.back();
    const auto norm = run_normality_check(plan.state, plan.eta, n_norm, plan.replicates,
                                          resolve_delta(plan, n_norm), plan.seed + 1);
    const auto norm_path = (std::filesystem::path(cfg.out) / "normality.csv").string();
    {
        std::ofstream out(norm_path, std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + norm_path);
        out << "replicate,residual\n";
        for (std::size_t i = 0; i < norm.residuals.size(); ++i)
            out << i << ',' << fmt(norm.residuals[i]) << '\n';
    }

    json doc;
    doc["mse_csv"] = mse_path;
    doc["normality_csv"] = norm_path;
    doc["ks_distance"] = norm.ks_distance;
    doc["skewness"] = norm.skewness;
    doc["excess_kurtosis"] = norm.excess_kurtosis;
    doc["asymptotic_var"] = norm.asymptotic_var;
    if (summary.rows.size() >= 3) doc["mse_slope"] = rate_regression(summary);
    doc["config"] = effective_config(cfg);
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_rates(const RunConfig& cfg) {
    validate_common(cfg);
    const SmoothnessClass cls{cfg.alpha, cfg.r, cfg.L};
    const double A = cfg.A > 0.0 ? cfg.A : cfg.alpha;
    std::cout << "rule          delta          rate phi_n^2\n";
    auto row = [&](const std::string& name, double delta, double rate) {
        std::ostringstream line;
        line.setf(std::ios::left);
        line.width(14);
        line << name;
        line.width(15);
        line << fmt(delta);
        line << fmt(rate);
        std::cout << line.str() << "\n";
    };
    if (cfg.r < 2.0) {
        row("delta_opt", solve_delta_opt(cls, cfg.eta, cfg.n),
            theoretical_rate(cls, cfg.eta, cfg.n, RateSide::upper));
        row("iterative", delta_iterative(cls, cfg.eta, cfg.n, cfg.k),
            theoretical_rate(cls, cfg.eta, cfg.n, RateSide::upper));
        row("adaptive1", delta_adaptive(1, cfg.eta, cfg.n),
            theoretical_rate(cls, cfg.eta, cfg.n, RateSide::upper));
        row("adaptive2", delta_adaptive(2, cfg.eta, cfg.n, A),
            theoretical_rate(cls, cfg.eta, cfg.n, RateSide::upper));
    } else {
        const auto [delta, regime] = delta_star(cfg.alpha, cfg.eta, cfg.n);
        const double upper = theoretical_rate(cls, cfg.eta, cfg.n, RateSide::upper);
        if (regime == RateRegime::r2_parametric) {
            row("delta_star (parametric)", delta, upper);
        } else {
            row("delta_star (slow, upper)", delta, upper);
            row("delta_star (slow, lower)", delta,
                theoretical_rate(cls, cfg.eta, cfg.n, RateSide::lower));
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    std::string config_path;

    CLI::App app{"Purity estimation from noisy quantum homodyne tomography data"};
    app.require_subcommand(1);
    app.add_option("--config", config_path, "JSON config file (flags override file values)");
    app.add_option("--seed", cfg.seed, "RNG seed");
    app.add_option("--out", cfg.out, "output directory");
    app.add_option("--threads", cfg.threads, "worker thread cap");
    app.add_option("--state", cfg.state_kind,
                   "state kind: vacuum|single_photon|cat|coherent|squeezed|thermal");
    app.add_option("--x0", cfg.x0, "cat displacement");
    app.add_option("--nbar", cfg.nbar, "coherent mean photon number");
    app.add_option("--xi", cfg.xi, "squeezing parameter");
    app.add_option("--disp", cfg.disp, "squeezed displacement");
    app.add_option("--beta", cfg.beta, "thermal inverse temperature");
    app.add_option("--eta", cfg.eta, "detection efficiency in (0, 1)");
    app.add_option("--n", cfg.n, "sample size");
    app.add_option("--n-grid", cfg.n_grid, "experiment sample sizes")->delimiter(',');
    app.add_option("--replicates", cfg.replicates, "Monte Carlo replicates");
    app.add_option("--rule", cfg.rule,
                   "bandwidth rule: fixed|delta_opt|delta_star|adaptive1|adaptive2|iterative");
    app.add_option("--delta", cfg.delta, "bandwidth for the fixed rule");
    app.add_option("--A", cfg.A, "adaptive2 majorant of alpha");
    app.add_option("--k", cfg.k, "iterative refinement count (0 = auto)");
    app.add_option("--alpha", cfg.alpha, "smoothness alpha");
    app.add_option("--r", cfg.r, "smoothness exponent r in (0, 2]");
    app.add_option("--L", cfg.L, "smoothness radius L");
    app.add_option("--tau", cfg.tau, "purity classifier threshold");
    app.add_option("--samples", cfg.samples, "input sample CSV for estimate");

    auto* sub_states = app.add_subcommand("states", "list the state catalog");
    auto* sub_sim = app.add_subcommand("simulate", "write a noisy sample CSV");
    auto* sub_est = app.add_subcommand("estimate", "estimate d^2 from a sample CSV");
    auto* sub_exp = app.add_subcommand("experiment", "Monte Carlo MSE + normality run");
    auto* sub_rates = app.add_subcommand("rates", "bandwidths and rates for a class");
    for (auto* sub : {sub_states, sub_sim, sub_est, sub_exp, sub_rates}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (!config_path.empty()) {
            // Re-parse so explicit flags take precedence over file values.
            load_config_file(cfg, config_path);
            app.clear();
            app.parse(argc, argv);
        }
        if (sub_states->parsed()) return cmd_states(cfg);
        if (sub_sim->parsed()) return cmd_simulate(cfg);
        if (sub_est->parsed()) return cmd_estimate(cfg);
        if (sub_exp->parsed()) return cmd_experiment(cfg);
        if (sub_rates->parsed()) return cmd_rates(cfg);
        return 2;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
