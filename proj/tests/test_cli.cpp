// End-to-end checks of the purity CLI. The binary path arrives as the last
// command-line argument, so this target carries its own doctest main.
#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string g_bin;
std::filesystem::path g_dir;

struct CmdResult {
    int code;
    std::string out;
};

CmdResult run_cli(const std::string& args) {
    const auto capture = g_dir / "capture.txt";
    const std::string cmd = g_bin + " " + args + " > " + capture.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    CmdResult res;
    res.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    std::ifstream in(capture);
    std::ostringstream buf;
    buf << in.rdbuf();
    res.out = buf.str();
    return res;
}

int count_lines(const std::filesystem::path& p) {
    std::ifstream in(p);
    int n = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++n;
    return n;
}

std::string json_field(const std::string& out, const std::string& key) {
    const auto pos = out.find("\"" + key + "\"");
    REQUIRE(pos != std::string::npos);
    auto colon = out.find(':', pos);
    auto end = out.find_first_of(",\n}", colon);
    std::string v = out.substr(colon + 1, end - colon - 1);
    const auto a = v.find_first_not_of(" \"");
    const auto b = v.find_last_not_of(" \"");
    return v.substr(a, b - a + 1);
}

} // namespace

TEST_CASE("states lists the six-state catalog") {
    const auto res = run_cli("states");
    CHECK(res.code == 0);
    CHECK(count_lines(g_dir / "capture.txt") == 7);  // header + 6 rows
    CHECK(res.out.find("vacuum") != std::string::npos);
    CHECK(res.out.find("thermal") != std::string::npos);
    CHECK(res.out.find("0.1591549") != std::string::npos);  // 1/(2 pi)
}

TEST_CASE("simulate writes a deterministic CSV") {
    const auto out1 = (g_dir / "sim1").string();
    const auto out2 = (g_dir / "sim2").string();
    const auto r1 = run_cli("simulate --state vacuum --eta 0.9 --n 1000 --seed 5 --out " + out1);
    CHECK(r1.code == 0);
    CHECK(count_lines(g_dir / "sim1" / "samples.csv") == 1001);  // header + n rows
    const auto r2 = run_cli("simulate --state vacuum --eta 0.9 --n 1000 --seed 5 --out " + out2);
    CHECK(r2.code == 0);
    CHECK(json_field(r1.out, "checksum") == json_field(r2.out, "checksum"));

    const auto r3 = run_cli("simulate --state vacuum --eta 0.9 --n 1000 --seed 6 --out " + out2);
    CHECK(r3.code == 0);
    CHECK(json_field(r1.out, "checksum") != json_field(r3.out, "checksum"));
}

TEST_CASE("invalid efficiency exits with the config code") {
    const auto res = run_cli("simulate --state vacuum --eta 1.0 --n 100 --out " +
                             (g_dir / "bad").string());
    CHECK(res.code == 2);
}

TEST_CASE("estimate on a missing file exits with the io code") {
    const auto res =
        run_cli("estimate --samples " + (g_dir / "no_such.csv").string() + " --eta 0.9");
    CHECK(res.code == 4);
}

TEST_CASE("simulate then estimate recovers the vacuum purity roughly") {
    const auto out = (g_dir / "est").string();
    const auto r1 =
        run_cli("simulate --state vacuum --eta 0.9 --n 20000 --seed 11 --out " + out);
    REQUIRE(r1.code == 0);
    const auto r2 = run_cli("estimate --samples " + out +
                            "/samples.csv --state vacuum --eta 0.9 --rule fixed --delta 0.25");
    CHECK(r2.code == 0);
    const double err = std::stod(json_field(r2.out, "abs_error"));
    CHECK(err < 0.03);
    CHECK(std::stod(json_field(r2.out, "delta")) == 0.25);
}

TEST_CASE("delta_opt rule is rejected at r = 2") {
    const auto out = (g_dir / "ropt").string();
    REQUIRE(run_cli("simulate --state vacuum --eta 0.9 --n 100 --seed 2 --out " + out).code == 0);
    const auto res = run_cli("estimate --samples " + out +
                             "/samples.csv --eta 0.9 --rule delta_opt --r 2 --alpha 0.2");
    CHECK(res.code == 2);
}

TEST_CASE("config file values are applied and unknown keys rejected") {
    const auto cfg_path = g_dir / "cfg.json";
    {
        std::ofstream cfg(cfg_path);
        cfg << R"({"state": {"kind": "vacuum"}, "eta": 0.85, "n": 500, "seed": 9})";
    }
    const auto out = (g_dir / "cfgsim").string();
    const auto r1 = run_cli("--config " + cfg_path.string() + " simulate --out " + out);
    CHECK(r1.code == 0);
    CHECK(json_field(r1.out, "eta") == "0.85");
    CHECK(count_lines(g_dir / "cfgsim" / "samples.csv") == 501);
    // Explicit flag overrides the file.
    const auto r2 =
        run_cli("--config " + cfg_path.string() + " simulate --n 200 --out " + out);
    CHECK(r2.code == 0);
    CHECK(count_lines(g_dir / "cfgsim" / "samples.csv") == 201);

    {
        std::ofstream cfg(cfg_path);
        cfg << R"({"unknown_key": 1})";
    }
    CHECK(run_cli("--config " + cfg_path.string() + " states").code == 2);
}

TEST_CASE("experiment writes mse and normality tables") {
    const auto out = (g_dir / "exp").string();
    const auto res = run_cli(
        "experiment --state vacuum --eta 0.9 --rule fixed --delta 0.4 "
        "--n-grid 50,100,200 --replicates 5 --seed 3 --out " + out);
    CHECK(res.code == 0);
    REQUIRE(std::filesystem::exists(g_dir / "exp" / "mse.csv"));
    CHECK(count_lines(g_dir / "exp" / "mse.csv") == 4);  // header + 3 rows
    {
        std::ifstream in(g_dir / "exp" / "mse.csv");
        std::string header;
        std::getline(in, header);
        CHECK(header ==
              "n,mean_estimate,bias,variance,mse,mse_stderr,theoretical_rate,bias_bound_sq,"
              "var_bound");
    }
    REQUIRE(std::filesystem::exists(g_dir / "exp" / "normality.csv"));
    CHECK(count_lines(g_dir / "exp" / "normality.csv") == 6);  // header + replicates
    CHECK(res.out.find("ks_distance") != std::string::npos);
    CHECK(res.out.find("skewness") != std::string::npos);
    CHECK(res.out.find("excess_kurtosis") != std::string::npos);
}

TEST_CASE("rates prints a row per applicable rule") {
    const auto r1 = run_cli("rates --alpha 0.1 --r 1 --L 1 --eta 0.9 --n 100000");
    CHECK(r1.code == 0);
    CHECK(r1.out.find("delta_opt") != std::string::npos);
    CHECK(r1.out.find("iterative") != std::string::npos);
    CHECK(r1.out.find("adaptive1") != std::string::npos);
    CHECK(r1.out.find("adaptive2") != std::string::npos);
    const auto r2 = run_cli("rates --alpha 0.2 --r 2 --L 1 --eta 0.9 --n 100000");
    CHECK(r2.code == 0);
    CHECK(r2.out.find("delta_star") != std::string::npos);
    CHECK(r2.out.find("parametric") != std::string::npos);
}

TEST_CASE("unknown subcommand or flag exits with the config code") {
    CHECK(run_cli("bogus_subcommand").code == 2);
    CHECK(run_cli("states --no-such-flag").code == 2);
}

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: test_cli [doctest options] <purity-binary>\n");
        return 1;
    }
    g_bin = argv[argc - 1];
    g_dir = std::filesystem::temp_directory_path() / "homodyne_cli_test";
    std::filesystem::create_directories(g_dir);
    doctest::Context ctx;
    ctx.applyCommandLine(argc - 1, argv);
    return ctx.run();
}
