#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

// env_prefix is prepended verbatim, e.g. "SUBH_THREADS=3 ".
RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    std::string cmd = env_prefix + SUBH_CLI_PATH + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string cfg(const std::string& name) {
    return std::string(SUBH_CONFIG_DIR) + "/" + name;
}

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("subh_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) parts.push_back(cur);
    return parts;
}

} // namespace

TEST_CASE("exit codes follow the documented contract") {
    CHECK(run_cli("--help").code == 0);
    CHECK(run_cli("--help").out.find("melnikov") != std::string::npos);
    CHECK(run_cli("--bogus").code == 4);
    CHECK(run_cli("frobnicate").code == 4);
    // missing required pieces
    CHECK(run_cli("melnikov").code == 4);
    CHECK(run_cli("series --config " + cfg("basic.toml")).code == 4);
    CHECK(run_cli("melnikov --config /nonexistent_subh.toml").code == 4);
    // malformed eps grids
    CHECK(run_cli("curves --config " + cfg("basic.toml") + " --eps log:0:1:5").code == 4);
    CHECK(run_cli("curves --config " + cfg("basic.toml") + " --eps weird:1:2:3").code == 4);
    CHECK(run_cli("trees --config " + cfg("basic.toml") + " --kmax 9").code == 4);
    // standing-hypothesis violation: constant frequency map
    CHECK(run_cli("melnikov --config " + cfg("isochronous.toml")).code == 2);
    // shooting failure outside the existence wedge
    CHECK(run_cli("verify --config " + cfg("basic.toml") + " --eps 0.05 --C 1.5").code == 3);
}

TEST_CASE("threshold table output") {
    RunResult r = run_cli("melnikov --config " + cfg("basic.toml") + " --t0-grid 8");
    REQUIRE(r.code == 0);
    std::vector<std::string> lines = split(r.out, '\n');
    REQUIRE(lines.size() == 9);
    CHECK(lines[0] == "t0,C0,D");
    for (int i = 0; i < 8; ++i) {
        std::vector<std::string> cols = split(lines[std::size_t(i + 1)], ',');
        REQUIRE(cols.size() == 3);
        double t0 = std::stod(cols[0]);
        CHECK(t0 == doctest::Approx(2.0 * M_PI * i / 8).epsilon(1e-12));
        CHECK(std::stod(cols[1]) == doctest::Approx(-std::sin(t0)).epsilon(1e-9));
        CHECK(std::stod(cols[2]) == doctest::Approx(-1.0).epsilon(1e-9));
    }

    SUBCASE("repeat runs are byte identical") {
        CHECK(run_cli("melnikov --config " + cfg("basic.toml") + " --t0-grid 8").out == r.out);
    }
    SUBCASE("--out writes the same bytes atomically") {
        TempDir tmp;
        std::string out = tmp.file("m.csv");
        REQUIRE(run_cli("melnikov --config " + cfg("basic.toml") + " --t0-grid 8 --out " + out)
                    .code == 0);
        CHECK(read_file(out) == r.out);
        CHECK(!fs::exists(out + ".tmp"));
    }
}

TEST_CASE("series coefficients as JSON") {
    double t0 = 0.5;
    RunResult r = run_cli("series --config " + cfg("basic_cos.toml") + " --t0 0.5 --order 2");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["mode"] == "c");
    CHECK(double(j["t0"]) == doctest::Approx(t0));
    REQUIRE(j["C"].size() == 3);
    CHECK(double(j["C"][0]) == doctest::Approx(-std::sin(t0)).epsilon(1e-12));
    CHECK(std::abs(double(j["C"][1])) <= 1e-12);
    CHECK(double(j["C"][2]) == doctest::Approx(std::sin(t0) / 4.0).epsilon(1e-11));
    REQUIRE(j["orders"].size() == 3);

    // order-one spectra carry the forced response -e^{i t0}/2 in the phase
    // and -(i/2) e^{i t0} in the action
    bool saw_alpha = false, saw_A = false;
    for (const auto& e : j["orders"][1]["alpha"]) {
        if (int(e[0]) == 1) {
            saw_alpha = true;
            CHECK(double(e[1]) == doctest::Approx(-std::cos(t0) / 2.0).epsilon(1e-10));
            CHECK(double(e[2]) == doctest::Approx(-std::sin(t0) / 2.0).epsilon(1e-10));
        }
    }
    for (const auto& e : j["orders"][1]["A"]) {
        if (int(e[0]) == 1) {
            saw_A = true;
            CHECK(double(e[1]) == doctest::Approx(std::sin(t0) / 2.0).epsilon(1e-10));
            CHECK(double(e[2]) == doctest::Approx(-std::cos(t0) / 2.0).epsilon(1e-10));
        }
    }
    CHECK(saw_alpha);
    CHECK(saw_A);

    SUBCASE("fixed-phase mode reports the phase corrections") {
        double root = M_PI + std::asin(0.3);
        std::ostringstream cmd;
        cmd.precision(17);
        cmd << "series --config " << cfg("basic.toml") << " --t0 " << root
            << " --mode fixed --fixed-C 0.3 --order 2";
        RunResult rf = run_cli(cmd.str());
        REQUIRE(rf.code == 0);
        json jf = json::parse(rf.out);
        CHECK(jf["mode"] == "fixed");
        CHECK(double(jf["C_fixed"]) == doctest::Approx(0.3));
        REQUIRE(jf["alpha_bar"].size() == 3);
        CHECK(std::abs(double(jf["alpha_bar"][0])) <= 1e-12);
    }
}

TEST_CASE("bifurcation curves and thread determinism") {
    TempDir tmp;
    std::string base = "curves --config " + cfg("basic_cos.toml") +
                       " --order 4 --eps log:1e-3:1e-1:5";
    std::string a = tmp.file("a.csv"), b = tmp.file("b.csv"), c = tmp.file("c.csv");
    REQUIRE(run_cli(base + " --threads 1 --out " + a).code == 0);
    REQUIRE(run_cli(base + " --threads 4 --out " + b).code == 0);
    REQUIRE(run_cli(base + " --out " + c, "SUBH_THREADS=3 ").code == 0);
    std::string text = read_file(a);
    CHECK(text == read_file(b));
    CHECK(text == read_file(c));

    std::vector<std::string> lines = split(text, '\n');
    REQUIRE(lines.size() == 6);
    CHECK(lines[0] == "eps,gamma1,gamma2,tau1,tau2");
    std::vector<std::string> last = split(lines[5], ',');
    REQUIRE(last.size() == 5);
    CHECK(std::stod(last[0]) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(std::stod(last[1]) == doctest::Approx(0.1 * (1.0 - 0.01 / 4.0)).epsilon(1e-4));
    CHECK(std::stod(last[2]) == doctest::Approx(-0.1 * (1.0 - 0.01 / 4.0)).epsilon(1e-4));
    // at eps = 0.1 the order-four correction moves the extremal phases by a
    // few parts in ten thousand
    CHECK(std::stod(last[3]) == doctest::Approx(3.0 * M_PI / 2.0).epsilon(1e-3));
    CHECK(std::stod(last[4]) == doctest::Approx(M_PI / 2.0).epsilon(1e-3));

    SUBCASE("two-sided grids mirror to negative eps") {
        std::string t = tmp.file("t.csv");
        REQUIRE(run_cli("curves --config " + cfg("basic.toml") +
                        " --order 2 --eps lin:0.01:0.05:3 --two-sided --out " + t)
                    .code == 0);
        std::vector<std::string> tl = split(read_file(t), '\n');
        REQUIRE(tl.size() == 7);
        std::vector<double> expect{-0.05, -0.03, -0.01, 0.01, 0.03, 0.05};
        for (std::size_t i = 0; i < 6; ++i) {
            std::vector<std::string> cols = split(tl[i + 1], ',');
            REQUIRE(cols.size() == 5);
            double eps = std::stod(cols[0]);
            CHECK(eps == doctest::Approx(expect[i]).epsilon(1e-12));
            // gamma1 tracks eps * sup C, so the branches cross at eps = 0
            CHECK(std::stod(cols[1]) == doctest::Approx(eps).epsilon(1e-10));
            CHECK(std::stod(cols[2]) == doctest::Approx(-eps).epsilon(1e-10));
        }
    }
}

TEST_CASE("count output") {
    std::string base = "count --config " + cfg("basic.toml") + " --eps 0.05";
    RunResult inside = run_cli(base + " --gamma 0");
    CHECK(inside.code == 0);
    CHECK(inside.out == "2\n");

    TempDir tmp;
    std::string out = tmp.file("count.json");
    RunResult boundary = run_cli(base + " --gamma 0.05 --out " + out);
    CHECK(boundary.code == 0);
    CHECK(boundary.out == "1\n");
    json j = json::parse(read_file(out));
    CHECK(int(j["count"]) == 1);
    CHECK(bool(j["tangent"]));
    CHECK(!bool(j["outside"]));

    RunResult outside = run_cli(base + " --gamma 0.075 --out " + out);
    CHECK(outside.code == 0);
    CHECK(outside.out == "0\n");
    j = json::parse(read_file(out));
    CHECK(int(j["count"]) == 0);
    CHECK(bool(j["outside"]));

    RunResult sub3 = run_cli("count --config " + cfg("subq3.toml") +
                             " --p 1 --q 3 --eps 0.05 --gamma 0");
    CHECK(sub3.code == 0);
    CHECK(sub3.out == "6\n");
}

TEST_CASE("tree cross-check table") {
    RunResult r = run_cli("trees --config " + cfg("basic_cos.toml") +
                          " --check --kmax 2 --t0 0.5");
    REQUIRE(r.code == 0);
    std::vector<std::string> lines = split(r.out, '\n');
    CHECK(lines[0] == "k,h,nu,tree_re,tree_im,series_re,series_im,abs_diff");
    // k=1: 2 phase rows, 3 action rows, 1 friction row; k=2: 4 + 5 + 1
    REQUIRE(lines.size() == 17);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::vector<std::string> cols = split(lines[i], ',');
        REQUIRE(cols.size() == 8);
        CHECK(std::stod(cols[7]) <= 1e-10);
    }
}

TEST_CASE("shooting verification output") {
    TempDir tmp;
    std::string out = tmp.file("v.json");
    RunResult ok = run_cli("verify --config " + cfg("basic.toml") +
                           " --eps 0.05 --C 0.3 --out " + out);
    REQUIRE(ok.code == 0);
    json j = json::parse(read_file(out));
    CHECK(bool(j["converged"]));
    CHECK(double(j["defect"]) <= 1e-10);
    CHECK(double(j["eps"]) == doctest::Approx(0.05));
    CHECK(double(j["C"]) == doctest::Approx(0.3));
    CHECK(int(j["iterations"]) <= 10);

    SUBCASE("failure still writes the report before signalling") {
        std::string fout = tmp.file("vf.json");
        RunResult bad = run_cli("verify --config " + cfg("basic.toml") +
                                " --eps 0.05 --C 1.5 --out " + fout);
        CHECK(bad.code == 3);
        json jf = json::parse(read_file(fout));
        CHECK(!bool(jf["converged"]));
    }
}

TEST_CASE("fixed-C obstruction hierarchy") {
    TempDir tmp;
    std::string out = tmp.file("h.json");
    RunResult r = run_cli("melnikov --config " + cfg("persistence.toml") +
                          " --hierarchy --fixed-C 0.3 --order 3 --out " + out);
    REQUIRE(r.code == 0);
    json j = json::parse(read_file(out));
    CHECK(double(j["C_fixed"]) == doctest::Approx(0.3));
    CHECK(int(j["K"]) == 3);
    CHECK(int(j["kstar"]) == -1);
    CHECK(bool(j["exhausted"]));
    REQUIRE(j["levels"].size() == 4);
    for (const auto& lv : j["levels"]) {
        CHECK(double(lv["max_abs"]) <= 1e-9);
        CHECK(lv["values"].size() == j["t0_grid"].size());
    }
}

TEST_CASE("empirical existence scan") {
    TempDir tmp;
    std::string out = tmp.file("s.csv");
    RunResult r = run_cli("scan --config " + cfg("basic.toml") +
                          " --eps lin:0.05:0.05:1 --out " + out);
    REQUIRE(r.code == 0);
    std::vector<std::string> lines = split(read_file(out), '\n');
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "eps,C_max_hat,C_min_hat");
    std::vector<std::string> cols = split(lines[1], ',');
    REQUIRE(cols.size() == 3);
    CHECK(std::stod(cols[0]) == doctest::Approx(0.05));
    CHECK(std::stod(cols[1]) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(std::stod(cols[2]) == doctest::Approx(-1.0).epsilon(1e-5));
}

TEST_CASE("mechanical threshold table") {
    RunResult r = run_cli("melnikov --config " + cfg("mechanical_cubic.toml") +
                          " --mechanical --t0-grid 16");
    REQUIRE(r.code == 0);
    std::vector<std::string> lines = split(r.out, '\n');
    REQUIRE(lines.size() == 17);
    CHECK(lines[0] == "t0,C0,D");
    double sum = 0.0, peak = 0.0;
    for (int i = 0; i < 16; ++i) {
        std::vector<std::string> cols = split(lines[std::size_t(i + 1)], ',');
        REQUIRE(cols.size() == 3);
        double c0 = std::stod(cols[1]);
        sum += c0;
        peak = std::max(peak, std::abs(c0));
        CHECK(std::stod(cols[2]) == doctest::Approx(-1.0));
    }
    CHECK(std::abs(sum / 16.0) <= 1e-10);
    CHECK(peak >= 0.8);
}
