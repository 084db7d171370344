// End-to-end tests that drive the installed binary the way a user would.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <catch_amalgamated.hpp>

#ifndef AGORA_CLI_PATH
#error "AGORA_CLI_PATH must point at the agora binary"
#endif

namespace {

namespace fs = std::filesystem;

struct CmdResult {
    int exit_code = -1;
    std::string output;
};

CmdResult run_cli(const std::string& args) {
    fs::path out = fs::temp_directory_path() / "agora-cli-out.txt";
    std::string cmd = std::string(AGORA_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
    int rc = std::system(cmd.c_str());
    CmdResult r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    std::ifstream f(out);
    std::stringstream ss;
    ss << f.rdbuf();
    r.output = ss.str();
    return r;
}

std::vector<std::string> lines_of(const fs::path& p) {
    std::ifstream f(p);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(f, line)) lines.push_back(line);
    return lines;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("run carpool: clean exit and 11 interval rows") {
    TempDir dir("agora-cli-carpool");
    CmdResult r = run_cli("run carpool --seed 7 --out " + dir.path.string());
    INFO(r.output);
    CHECK(r.exit_code == 0);
    std::vector<std::string> rows = lines_of(dir.path / "matches_per_interval.csv");
    REQUIRE(rows.size() == 12);  // header + 11 intervals
    CHECK(rows[0] == "interval,matched");
    CHECK(fs::exists(dir.path / "ops.jsonl"));
    CHECK(fs::exists(dir.path / "events.jsonl"));
    CHECK(fs::exists(dir.path / "report.json"));
    CHECK(fs::exists(dir.path / "state.hash"));
}

TEST_CASE("run energy: 96 totals rows and per-row conservation") {
    TempDir dir("agora-cli-energy");
    CmdResult r = run_cli("run energy --traces synthetic --seed 1 --out " + dir.path.string());
    INFO(r.output);
    CHECK(r.exit_code == 0);
    std::vector<std::string> rows = lines_of(dir.path / "totals_per_interval.csv");
    REQUIRE(rows.size() == 97);  // header + 96 intervals
    CHECK(rows[0] == "interval,produced,demanded,traded");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        std::istringstream ss(rows[i]);
        std::string interval;
        std::uint64_t produced, demanded, traded;
        char comma;
        std::getline(ss, interval, ',');
        ss >> produced >> comma >> demanded >> comma >> traded;
        CHECK(traded <= std::min(produced, demanded));
    }
}

TEST_CASE("run energy with a CSV trace file") {
    TempDir dir("agora-cli-traces");
    fs::create_directories(dir.path);
    fs::path csv = dir.path / "homes.csv";
    {
        std::ofstream f(csv);
        f << "home_id,interval,net_power_w\n";
        for (int h = 0; h < 3; ++h)
            for (int i = 0; i < 96; ++i)
                f << h << ',' << i << ',' << (h == 0 ? 800 : -500) << '\n';
    }
    CmdResult r = run_cli("run energy --traces " + csv.string() + " --out " +
                          (dir.path / "out").string());
    INFO(r.output);
    CHECK(r.exit_code == 0);
    // 1 producer at 800 W vs 2 consumers at 500 W each: 800 trades per interval
    CHECK(r.output.find("matched:    " + std::to_string(800 * 96)) != std::string::npos);
}

TEST_CASE("run with a missing config file fails without partial outputs") {
    TempDir dir("agora-cli-missing");
    CmdResult r = run_cli("run carpool --config /nonexistent/config.json --out " +
                          dir.path.string());
    CHECK(r.exit_code == 3);
    CHECK_FALSE(fs::exists(dir.path));
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("run nosuchscenario").exit_code == 2);
    CHECK(run_cli("nosuchcommand").exit_code == 2);
    CHECK(run_cli("run carpool --strategy bogus").exit_code == 2);
}

TEST_CASE("verify: clean log passes, truncated log is corrupt") {
    TempDir dir("agora-cli-verify");
    REQUIRE(run_cli("run carpool --seed 3 --out " + dir.path.string()).exit_code == 0);

    CmdResult ok = run_cli("verify " + (dir.path / "ops.jsonl").string());
    INFO(ok.output);
    CHECK(ok.exit_code == 0);
    CHECK(ok.output.find("FAIL") == std::string::npos);
    CHECK(ok.output.find("PASS  P1-progress") != std::string::npos);

    // drop the last line: the event log no longer matches
    std::vector<std::string> ops = lines_of(dir.path / "ops.jsonl");
    std::ofstream f(dir.path / "truncated.jsonl");
    for (std::size_t i = 0; i + 1 < ops.size(); ++i) f << ops[i] << '\n';
    f.close();
    CmdResult bad = run_cli("verify " + (dir.path / "truncated.jsonl").string() + " --events " +
                            (dir.path / "events.jsonl").string());
    CHECK(bad.exit_code == 1);
}

TEST_CASE("replay detects a tampered log") {
    TempDir dir("agora-cli-replay");
    REQUIRE(run_cli("run carpool --seed 4 --out " + dir.path.string()).exit_code == 0);
    CmdResult ok = run_cli("replay " + (dir.path / "ops.jsonl").string());
    INFO(ok.output);
    CHECK(ok.exit_code == 0);
    CHECK(ok.output.find("PASS  hash matches") != std::string::npos);

    // flip one digit of a quantity
    std::vector<std::string> ops = lines_of(dir.path / "ops.jsonl");
    bool flipped = false;
    for (std::string& line : ops) {
        auto pos = line.find("\"quantity\":\"");
        if (pos != std::string::npos && !flipped) {
            char& digit = line[pos + 12];
            digit = digit == '9' ? '8' : char(digit + 1);
            flipped = true;
        }
    }
    REQUIRE(flipped);
    std::ofstream f(dir.path / "ops.jsonl", std::ios::trunc);
    for (const std::string& line : ops) f << line << '\n';
    f.close();
    CmdResult bad = run_cli("replay " + (dir.path / "ops.jsonl").string());
    CHECK(bad.exit_code == 1);
}

TEST_CASE("fuzz: zero iterations exits clean; seeds reproduce") {
    CmdResult zero = run_cli("fuzz --iterations 0");
    CHECK(zero.exit_code == 0);
    CHECK(zero.output.find("sequences:        0") != std::string::npos);

    CmdResult a = run_cli("fuzz --iterations 50 --seed 12");
    CmdResult b = run_cli("fuzz --iterations 50 --seed 12");
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
}

TEST_CASE("custom scenario via config file and kill-solver flag parsing") {
    TempDir dir("agora-cli-custom");
    fs::create_directories(dir.path);
    fs::path cfg = dir.path / "market.json";
    {
        std::ofstream f(cfg);
        f << R"({
            "cycles": 2,
            "contract": {"length_receive": 50, "length_solve": 50},
            "solvers": [{"strategy": "branch_and_bound"}],
            "offers": [
                {"actor": 0, "providing": true, "lines": {"7": {"quantity": 400, "value": 5}}},
                {"actor": 1, "providing": false, "lines": {"7": {"quantity": 350, "value": 9}}}
            ]
        })";
    }
    CmdResult r = run_cli("run custom --config " + cfg.string() + " --out " +
                          (dir.path / "out").string());
    INFO(r.output);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("matched:    700 units") != std::string::npos);

    CmdResult bad = run_cli("run custom --config " + cfg.string() + " --kill-solver nonsense");
    CHECK(bad.exit_code == 2);
}
