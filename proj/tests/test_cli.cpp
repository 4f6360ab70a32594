#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "causent/dataset.hpp"
#include "causent/simulate.hpp"

#ifndef CAUSENT_CLI_PATH
#define CAUSENT_CLI_PATH "causent"
#endif

namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args) {
    std::string cmd = std::string(CAUSENT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("causent_cli_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("cli simulate writes the three artifacts") {
    TempDir dir;
    REQUIRE(run_cli("simulate ring4ts_tpos 300 42 " + (dir / "out")) == 0);
    CHECK(fs::exists(dir.path / "out/data.csv"));
    CHECK(fs::exists(dir.path / "out/truth.json"));
    CHECK(fs::exists(dir.path / "out/meta.json"));

    auto data = causent::TimeSeriesDataset::from_csv_file(dir / "out/data.csv");
    CHECK(data.num_series() == 4);
    CHECK(data.length() == 300);
    auto truth = nlohmann::json::parse(slurp(dir.path / "out/truth.json"));
    CHECK(truth.at("d") == 4);
    auto meta = nlohmann::json::parse(slurp(dir.path / "out/meta.json"));
    CHECK(meta.at("seed") == 42);
}

TEST_CASE("cli simulate rejects unknown structures") {
    TempDir dir;
    CHECK(run_cli("simulate bogus 300 42 " + (dir / "out")) == 2);
}

TEST_CASE("cli simulate hides the latent series") {
    TempDir dir;
    REQUIRE(run_cli("simulate seven2h_tpos 120 1 " + (dir / "out")) == 0);
    auto data = causent::TimeSeriesDataset::from_csv_file(dir / "out/data.csv");
    CHECK(data.num_series() == 7);
}

TEST_CASE("cli discover runs end to end and is deterministic") {
    TempDir dir;
    REQUIRE(run_cli("simulate fourts_tpos 300 5 " + (dir / "sim")) == 0);
    std::string input = dir / "sim/data.csv";
    REQUIRE(run_cli("discover --seed 7 --output " + (dir / "a.json") + " " + input) == 0);
    REQUIRE(run_cli("discover --seed 7 --output " + (dir / "b.json") + " " + input) == 0);
    CHECK(slurp(dir.path / "a.json") == slurp(dir.path / "b.json"));
    auto graph = nlohmann::json::parse(slurp(dir.path / "a.json"));
    CHECK(graph.at("d") == 4);

    // dot output and the test log
    REQUIRE(run_cli("discover --seed 7 --format dot --output " + (dir / "g.dot") +
                    " --testlog " + (dir / "log.csv") + " " + input) == 0);
    CHECK(slurp(dir.path / "g.dot").find("digraph") != std::string::npos);
    CHECK(slurp(dir.path / "log.csv").find("edge,level") != std::string::npos);
}

TEST_CASE("cli discover input validation") {
    TempDir dir;
    {
        std::ofstream one(dir / "one.csv");
        one << "a\n1\n2\n3\n";
    }
    CHECK(run_cli("discover " + (dir / "one.csv")) == 2);

    {
        std::ofstream bad(dir / "bad.csv");
        bad << "a,b\n1,2\n3,oops\n";
    }
    CHECK(run_cli("discover " + (dir / "bad.csv")) == 2);

    {
        std::ofstream shorty(dir / "short.csv");
        shorty << "a,b\n";
        for (int i = 0; i < 20; ++i) shorty << i << "," << i + 1 << "\n";
    }
    CHECK(run_cli("discover " + (dir / "short.csv")) == 3);

    CHECK(run_cli("discover " + (dir / "missing.csv")) == 2);
}

TEST_CASE("cli flags override config files and environment") {
    TempDir dir;
    REQUIRE(run_cli("simulate fourts_tpos 120 5 " + (dir / "sim")) == 0);
    std::string input = dir / "sim/data.csv";

    // gamma=100 makes 120 rows insufficient (needs gamma+50)
    {
        std::ofstream cfg(dir / "big_gamma.conf");
        cfg << "gamma=100\n";
    }
    CHECK(run_cli("discover --config " + (dir / "big_gamma.conf") + " " + input) == 3);
    // an explicit flag wins over the config file
    CHECK(run_cli("discover --config " + (dir / "big_gamma.conf") + " --gamma 5 --output " +
                  (dir / "g.json") + " " + input) == 0);

    ::setenv("CAUSENT_GAMMA", "100", 1);
    int env_code = run_cli("discover " + input);
    ::unsetenv("CAUSENT_GAMMA");
    CHECK(env_code == 3);
}

TEST_CASE("cli bench writes reports and validates n") {
    TempDir dir;
    CHECK(run_cli("bench --n 0 --structures fourts_tpos --out " + (dir / "r")) == 2);
    REQUIRE(run_cli("bench --n 1 --T 200 --structures fourts_tpos --seed 3 --out " +
                    (dir / "r")) == 0);
    CHECK(slurp(dir.path / "r.md").find("| structure |") != std::string::npos);
    CHECK(slurp(dir.path / "r.csv").find("structure,algorithm") != std::string::npos);
}
