#include "doctest.h"

#include "nlch/csv.hpp"
#include "nlch/kernel.hpp"
#include "nlch/conv_operator.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = NLCH_CLI_PATH;
const std::string kTmp = NLCH_TEST_TMPDIR;

int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " > " + kTmp + "/cli_stdout.txt 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string write_config(const std::string& name, const std::string& body) {
    fs::create_directories(kTmp);
    const std::string path = kTmp + "/" + name;
    std::ofstream(path) << body;
    return path;
}

}  // namespace

TEST_CASE("cli builds, caches, validates, and solves a tiny run") {
    fs::create_directories(kTmp);
    const std::string out = kTmp + "/cli_out";
    fs::remove_all(out);
    const std::string cfg = write_config("tiny.ini", R"(
[grid]
n = 8
[kernel]
kind = newt2d
eta = -20
[conv]
eps = 1e-3
alpha = 2
[initial]
kind = wave
[time]
t_end = 1e-3
output_times = 0, 1e-3
[outputs]
dir = )" + out + "\n");

    CHECK(run("--config " + cfg + " build-operator") == 0);
    CHECK(fs::exists(out + "/operator.bin"));
    const auto cached = nlch::read_operator_cache(out + "/operator.bin");
    CHECK(cached.meta.n == 8);
    CHECK(cached.meta.eta == -20.0);

    CHECK(run("--config " + cfg + " solve") == 0);
    CHECK(fs::exists(out + "/trajectory.csv"));
    CHECK(fs::exists(out + "/diagnostics.json"));
    CHECK(fs::exists(out + "/snapshots.bin"));

    // The trajectory CSV re-parses and starts at t = 0.
    const nlch::CsvTable t = nlch::read_csv(out + "/trajectory.csv");
    REQUIRE(t.header.size() == 5);
    CHECK(t.header[0] == "t");
    REQUIRE(!t.rows.empty());
    CHECK(t.rows.front()[0] == 0.0);

    // Warm cache: the solve performs zero kernel evaluations (the tool
    // reports its instrumented counter).
    CHECK(run("--config " + cfg + " solve") == 0);
    {
        std::ifstream is(kTmp + "/cli_stdout.txt");
        const std::string text((std::istreambuf_iterator<char>(is)),
                               std::istreambuf_iterator<char>());
        CHECK(text.find("operator cache: warm") != std::string::npos);
        CHECK(text.find("kernel evaluations: 0") != std::string::npos);
    }

    // Snapshot records are keyed by output time and sized by the grid.
    {
        std::ifstream snap(out + "/snapshots.bin", std::ios::binary);
        REQUIRE(snap.good());
        double prev_t = -1.0;
        int records = 0;
        while (true) {
            double t;
            std::uint64_t m;
            if (!snap.read(reinterpret_cast<char*>(&t), 8))
                break;
            REQUIRE(snap.read(reinterpret_cast<char*>(&m), 8));
            CHECK(m == 64);
            CHECK(t > prev_t);
            prev_t = t;
            snap.seekg(static_cast<std::streamoff>(16 * m), std::ios::cur);
            ++records;
        }
        CHECK(records == 2);  // t = 0 and t = 1e-3
    }
}

TEST_CASE("cli validate sweep emits the summary and swarm files") {
    const std::string out = kTmp + "/cli_val";
    fs::remove_all(out);
    const std::string cfg = write_config("val.ini", R"(
[grid]
n = 6
[outputs]
dir = )" + out + "\n");
    CHECK(run("--config " + cfg + " validate --eps-list 1e-2 --alpha-list 1,2") == 0);
    const nlch::CsvTable summary = nlch::read_csv(out + "/validate_summary.csv");
    CHECK(summary.rows.size() == 2);
    const nlch::CsvTable swarm = nlch::read_csv(out + "/validate_swarm.csv");
    CHECK(swarm.rows.size() == 2u * 36u);

    // Empty sweep: header-only files.
    const std::string out2 = kTmp + "/cli_val_empty";
    const std::string cfg2 = write_config("val2.ini", "[grid]\nn = 6\n[outputs]\ndir = " + out2 + "\n");
    CHECK(run("--config " + cfg2 + " validate") == 0);
    const nlch::CsvTable empty = nlch::read_csv(out2 + "/validate_summary.csv");
    CHECK(empty.header.size() == 6);
    CHECK(empty.rows.empty());
}

TEST_CASE("cli exit codes") {
    // Missing config file: config error.
    CHECK(run("--config " + kTmp + "/does_not_exist.ini build-operator") == 2);
    // Invalid config contents.
    const std::string bad = write_config("bad.ini", "[grid]\nn = 1\n");
    CHECK(run("--config " + bad + " build-operator") == 2);
    // Rejected sigma for the regularized check.
    const std::string ok = write_config("ok.ini", "[grid]\nn = 6\n[time]\nt_end = 1e-4\n[outputs]\ndir = " + kTmp + "/cli_reg\n");
    CHECK(run("--config " + ok + " regularized --sigma 0") == 2);
    // Resource guard: a 3D grid whose matrix would exceed 2 GiB.
    const std::string huge = write_config("huge.ini", R"(
[grid]
n = 26
[kernel]
kind = newt3d-reg
[outputs]
dir = )" + kTmp + "/cli_huge\n");
    CHECK(run("--config " + huge + " build-operator") == 4);
}

TEST_CASE("cli builds the production operator configuration") {
    const std::string out = kTmp + "/cli_prod";
    fs::remove_all(out);
    const std::string cfg = write_config("prod.ini", R"(
[grid]
n = 40
[kernel]
kind = newt2d
[conv]
eps = 1e-5
alpha = 4
[outputs]
dir = )" + out + "\n");
    CHECK(run("--config " + cfg + " build-operator") == 0);
    std::ifstream is(kTmp + "/cli_stdout.txt");
    const std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    CHECK(text.find("max e_eps") != std::string::npos);
    CHECK(fs::file_size(out + "/operator.bin") == 72u + 8u * 1600u * 1600u);
}
