// agora: a transactive resource-allocation market on a deterministic,
// replayable ledger. Prosumer agents post offers to a verifying contract,
// untrusted off-ledger solvers submit allocations, the contract keeps the
// best feasible candidate and finalizes each market cycle.
//
// Subcommands:
//   run <carpool|energy|custom>  simulate a scenario and write artifacts
//   verify <ops.jsonl>           replay a log and check the trace properties
//   fuzz                         randomized contract robustness testing
//   replay <ops.jsonl>           deterministic replay with hash verification
//
// Exit codes: 0 ok, 1 property/verification failure, 2 usage or config
// error, 3 I/O error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "agora/audit/fuzz.hpp"
#include "agora/audit/trace_check.hpp"
#include "agora/sim/replay.hpp"
#include "agora/sim/run.hpp"

namespace fs = std::filesystem;
using namespace agora;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case Errc::IoError:
            return kExitIo;
        case Errc::ConfigError:
        case Errc::ParseError:
        case Errc::UnknownAgent:
        case Errc::EncodingCapacity:
        case Errc::TooFewPoints:
            return kExitConfig;
        default:
            return kExitViolation;
    }
}

sim::SimConfig load_config(const std::string& scenario, const std::string& config_path) {
    sim::SimConfig config;
    config.scenario = scenario;
    if (scenario == "energy") {
        // full-day instances are far beyond the exact strategies
        config.solvers[0].strategy = solver::Strategy::GreedyLocalSearch;
        config.solvers[0].time_budget_ms = 2000;
    }
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw Error(Errc::IoError, "cannot open config: " + config_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const std::exception& e) {
            throw Error(Errc::ParseError, std::string("config: ") + e.what());
        }
        sim::from_json(j, config);
        config.scenario = scenario;  // the subcommand wins
    }
    return config;
}

sim::FaultSpec parse_kill(const std::string& spec) {
    auto at = spec.find('@');
    if (at == std::string::npos)
        throw Error(Errc::ConfigError, "--kill-solver expects ID@TICK, got " + spec);
    try {
        return sim::FaultSpec{"solver-" + spec.substr(0, at),
                              std::stoull(spec.substr(at + 1))};
    } catch (const std::exception&) {
        throw Error(Errc::ConfigError, "--kill-solver expects ID@TICK, got " + spec);
    }
}

int cmd_run(const std::string& scenario, const std::string& config_path, std::uint64_t seed,
            bool seed_set, std::string out, int solvers, const std::vector<std::string>& kills,
            const std::string& strategy, const std::string& objective, std::uint64_t cycles,
            bool cycles_set, const std::string& traces) {
    sim::SimConfig config = load_config(scenario, config_path);
    if (seed_set) config.seed = seed;
    if (cycles_set) config.cycles = cycles;
    if (!traces.empty() && traces != "synthetic") config.energy.traces_csv = traces;
    if (solvers >= 0) {
        solver::SolverConfig proto =
            config.solvers.empty() ? solver::SolverConfig{} : config.solvers[0];
        config.solvers.assign(std::size_t(solvers), proto);
        for (std::size_t i = 0; i < config.solvers.size(); ++i) config.solvers[i].seed += i;
    }
    if (!strategy.empty())
        for (auto& s : config.solvers) s.strategy = solver::strategy_from_string(strategy);
    if (!objective.empty()) {
        nlohmann::json j{{"kind", objective}};
        from_json(j, config.objective);
    }
    for (const std::string& k : kills) config.faults.push_back(parse_kill(k));

    if (out.empty()) {
        const char* env = std::getenv("AGORA_OUT");
        fs::path base = env ? fs::path(env) : fs::path("runs");
        out = (base / (scenario + "-seed" + std::to_string(config.seed))).string();
    }
    config.out_dir = out;

    sim::RunArtifacts run = sim::run_simulation(config);

    std::cout << "scenario:   " << scenario << " (seed " << config.seed << ", "
              << config.cycles << " cycle" << (config.cycles == 1 ? "" : "s") << ")\n";
    std::cout << "out dir:    " << out << "\n";
    std::cout << "prosumers:  " << run.prosumer_count << ", solvers: " << config.solvers.size()
              << "\n";
    std::cout << "matched:    " << run.report.total_matched_quantity << " units, objective "
              << run.report.total_objective << "\n";
    double worst = 0;
    for (const sim::SubmissionReport& r : run.submissions) worst = std::max(worst, r.wall_ms);
    std::cout << "solve time: " << run.total_solve_ms << " ms total, " << worst
              << " ms worst cycle\n";
    std::cout << "state hash: " << run.report.final_state_hash << "\n";
    for (const audit::PropertyResult& p : run.trace.properties)
        std::cout << (p.passed ? "PASS  " : "FAIL  ") << p.name
                  << (p.detail.empty() ? "" : "  [" + p.detail + "]") << "\n";
    std::cout << (run.conservation_ok ? "PASS" : "FAIL") << "  conservation\n";
    std::cout << (run.replay_ok ? "PASS" : "FAIL") << "  replay-determinism\n";

    return run.all_checks_passed() ? kExitOk : kExitViolation;
}

int cmd_verify(const std::string& ops_path, std::string events_path) {
    std::vector<ledger::OpRecord> ops = ledger::read_op_log(ops_path);
    audit::TraceReport report;
    if (events_path.empty()) {
        fs::path sibling = fs::path(ops_path).parent_path() / "events.jsonl";
        if (fs::exists(sibling)) events_path = sibling.string();
    }
    if (!events_path.empty()) {
        report = audit::check_trace(ops, ledger::read_event_log(events_path));
    } else {
        report = audit::check_trace(ops);
    }
    for (const audit::PropertyResult& p : report.properties)
        std::cout << (p.passed ? "PASS  " : "FAIL  ") << p.name
                  << (p.detail.empty() ? "" : "  [" + p.detail + "]") << "\n";
    return report.all_passed() ? kExitOk : kExitViolation;
}

int cmd_fuzz(std::uint64_t seed, std::uint64_t iterations, const std::string& out) {
    audit::FuzzConfig config;
    config.seed = seed;
    config.iterations = iterations;
    audit::FuzzResult result = audit::run_fuzz(config);
    std::cout << "sequences:        " << result.stats.sequences << "\n";
    std::cout << "ops:              " << result.stats.ops << " (" << result.stats.accepted
              << " accepted, " << result.stats.rejected << " rejected)\n";
    std::cout << "finalized cycles: " << result.stats.finalized_cycles << " ("
              << result.stats.nonempty_finalizes << " with assignments)\n";
    std::cout << "atomicity checks: " << result.stats.atomicity_checks << "\n";
    if (result.ok) {
        std::cout << "all sequences satisfied the trace properties\n";
        return kExitOk;
    }
    fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
    fs::create_directories(dir);
    fs::path repro = dir / "fuzz_counterexample.jsonl";
    ledger::write_op_log(repro, result.counterexample);
    std::cout << "FAIL  " << result.failed_property << "  [" << result.detail << "]\n";
    std::cout << "seed " << result.failing_seed << ", minimized reproducer: " << repro << "\n";
    return kExitViolation;
}

int cmd_replay(const std::string& ops_path, std::string hash_path) {
    sim::ReplayOutcome outcome = sim::replay(ops_path);
    std::cout << "ops applied: " << outcome.ops_applied << "\n";
    std::cout << "final hash:  " << outcome.final_hash << "\n";
    if (hash_path.empty()) {
        fs::path sibling = fs::path(ops_path).parent_path() / "state.hash";
        if (fs::exists(sibling)) hash_path = sibling.string();
    }
    if (!hash_path.empty()) {
        std::ifstream f(hash_path);
        if (!f) throw Error(Errc::IoError, "cannot open hash file: " + hash_path);
        std::string expected;
        f >> expected;
        if (expected != outcome.final_hash) {
            std::cout << "FAIL  hash mismatch against " << hash_path << "\n";
            return kExitViolation;
        }
        std::cout << "PASS  hash matches " << hash_path << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"transactive market with off-ledger solvers and a verifying ledger contract"};
    app.require_subcommand(1);

    std::string scenario, config_path, out, strategy, objective;
    std::uint64_t seed = 1, cycles = 1, iterations = 1000;
    int solvers = -1;
    std::vector<std::string> kills;
    CLI::App* run = app.add_subcommand("run", "simulate a market scenario");
    run->add_option("scenario", scenario, "carpool | energy | custom")
        ->required()
        ->check(CLI::IsMember({"carpool", "energy", "custom"}));
    auto* run_seed = run->add_option("--seed", seed, "scenario and harness seed");
    run->add_option("--config", config_path, "JSON config file");
    run->add_option("--out", out, "output directory (default $AGORA_OUT or ./runs)");
    run->add_option("--solvers", solvers, "number of solver agents");
    run->add_option("--kill-solver", kills, "fault injection, ID@TICK (repeatable)");
    run->add_option("--strategy", strategy,
                    "exact_enumeration | branch_and_bound | greedy_local_search")
        ->check(CLI::IsMember({"exact_enumeration", "branch_and_bound", "greedy_local_search"}));
    run->add_option("--objective", objective, "total_quantity | total_benefit")
        ->check(CLI::IsMember({"total_quantity", "total_benefit"}));
    auto* run_cycles = run->add_option("--cycles", cycles, "market cycles to run");
    std::string traces;
    run->add_option("--traces", traces, "energy load traces: 'synthetic' or a CSV path");

    std::string ops_path, events_path;
    CLI::App* verify = app.add_subcommand("verify", "check trace properties of an op log");
    verify->add_option("ops", ops_path, "ops.jsonl path")->required();
    verify->add_option("--events", events_path, "events.jsonl path (default: sibling)");

    std::string fuzz_out;
    CLI::App* fuzz = app.add_subcommand("fuzz", "randomized contract robustness testing");
    fuzz->add_option("--seed", seed, "fuzz seed");
    fuzz->add_option("--iterations", iterations, "number of random sequences");
    fuzz->add_option("--out", fuzz_out, "directory for counterexample reproducers");

    std::string replay_ops, replay_hash;
    CLI::App* replay = app.add_subcommand("replay", "replay an op log and verify hashes");
    replay->add_option("ops", replay_ops, "ops.jsonl path")->required();
    replay->add_option("--hash", replay_hash, "expected final state hash file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed())
            return cmd_run(scenario, config_path, seed, run_seed->count() > 0, out, solvers,
                           kills, strategy, objective, cycles, run_cycles->count() > 0, traces);
        if (verify->parsed()) return cmd_verify(ops_path, events_path);
        if (fuzz->parsed()) return cmd_fuzz(seed, iterations, fuzz_out);
        if (replay->parsed()) return cmd_replay(replay_ops, replay_hash);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitViolation;
    }
    return kExitConfig;
}
