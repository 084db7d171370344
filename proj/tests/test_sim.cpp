#include <filesystem>
#include <fstream>

#include <catch_amalgamated.hpp>

#include "agora/sim/run.hpp"

using namespace agora;
using namespace agora::sim;

namespace {

namespace fs = std::filesystem;

SimConfig tiny_market(int solver_count = 1, std::uint64_t cycles = 1) {
    SimConfig c;
    c.scenario = "custom";
    c.seed = 7;
    c.cycles = cycles;
    c.contract.length_receive = 50;
    c.contract.length_solve = 50;
    c.solvers.clear();
    for (int i = 0; i < solver_count; ++i) {
        solver::SolverConfig sc;
        sc.strategy = solver::Strategy::GreedyLocalSearch;
        c.solvers.push_back(sc);
    }
    scenario::OfferSpec prov;
    prov.actor_index = 0;
    prov.providing = true;
    prov.lines[7] = OfferLine{500, 5};
    scenario::OfferSpec cons;
    cons.actor_index = 1;
    cons.providing = false;
    cons.lines[7] = OfferLine{500, 10};
    c.custom_offers = {prov, cons};
    return c;
}

struct TempDir {
    fs::path path;
    TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("directory semantics") {
    Directory d;
    d.register_endpoint("contract", Endpoint{"contract", 0});
    d.register_endpoint("solver-0", Endpoint{"agent", 200});
    CHECK(d.lookup("solver-0").id == 200);
    CHECK_THROWS_MATCHES(d.register_endpoint("solver-0", Endpoint{"agent", 201}), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::DuplicateName; }));
    CHECK_THROWS_MATCHES(d.lookup("nobody"), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::NotFound; }));
}

TEST_CASE("single matchable market finalizes a nonzero objective") {
    RunArtifacts run = run_simulation(tiny_market());
    REQUIRE(run.report.cycles.size() == 1);
    CHECK(run.report.cycles[0].objective == 500);
    CHECK(run.report.cycles[0].winner_solver == kSolverIdBase);
    CHECK(run.report.cycles[0].matched_by_type.at(7) == 500);
    CHECK(run.trace.all_passed());
    CHECK(run.conservation_ok);
    CHECK(run.replay_ok);
    CHECK(run.all_checks_passed());
}

TEST_CASE("call-count law: n+2 per posted offer, 1+|A| per submission") {
    SimConfig config = tiny_market();
    // give the provider a second type so n
    config.custom_offers[0].lines[8] = OfferLine{100, 5};
    RunArtifacts run = run_simulation(config);
    REQUIRE(run.report.cycles.size() == 1);

    // provider posted one offer with 2 types: 1 create + 2 updates + 1 post
    std::uint64_t provider_calls = 0, consumer_calls = 0, solver_calls = 0;
    // re-derive from the op log (the audit record is the source of truth)
    // run again with an out dir to read the ops back
    TempDir dir("agora-callcount");
    config.out_dir = dir.path;
    run = run_simulation(config);
    auto ops = ledger::read_op_log(dir.path / "ops.jsonl");
    for (std::size_t i = 1; i < ops.size(); ++i)
        REQUIRE(ops[i].time > ops[i - 1].time);  // strictly monotone op clock
    for (const auto& r : ops) {
        if (!r.accepted()) continue;
        if (r.caller == kProsumerIdBase + 0) ++provider_calls;
        if (r.caller == kProsumerIdBase + 1) ++consumer_calls;
        if (r.caller == kSolverIdBase) ++solver_calls;
    }
    CHECK(provider_calls == 2 + 2);  // n=2 types
    CHECK(consumer_calls == 1 + 2);  // n=1 type
    REQUIRE(run.submissions.size() == 1);
    CHECK(solver_calls == 1 + run.submissions[0].accepted);
    CHECK(run.submissions[0].contract_calls == 1 + run.submissions[0].assignments);
}

TEST_CASE("zero solvers: every cycle finalizes empty") {
    SimConfig config = tiny_market(0, 3);
    RunArtifacts run = run_simulation(config);
    REQUIRE(run.report.cycles.size() == 3);
    for (const CycleSummary& c : run.report.cycles) {
        CHECK(c.objective == 0);
        CHECK(c.assignment_count == 0);
        CHECK(c.winner_solution == std::nullopt);
    }
    CHECK(run.all_checks_passed());
}

TEST_CASE("two solvers: candidate is the better feasible solution") {
    SimConfig config = tiny_market(2);
    config.solvers[0].strategy = solver::Strategy::GreedyLocalSearch;
    config.solvers[1].strategy = solver::Strategy::BranchAndBound;
    RunArtifacts run = run_simulation(config);
    REQUIRE(run.report.cycles.size() == 1);
    CHECK(run.report.cycles[0].objective == 500);
    // both reached the optimum; the first submitter keeps the candidate
    CHECK(run.report.cycles[0].winner_solver == kSolverIdBase);
    CHECK(run.all_checks_passed());
}

TEST_CASE("two solvers with different solutions: the higher objective wins") {
    // plain greedy walks into the trap (serves C1 from P1 and starves P2);
    // branch and bound finds the full matching
    SimConfig config = tiny_market(2);
    config.solvers[0].strategy = solver::Strategy::GreedyLocalSearch;
    config.solvers[0].time_budget_ms = 0;  // no local search, pure greedy
    config.solvers[1].strategy = solver::Strategy::BranchAndBound;
    config.custom_offers.clear();
    scenario::OfferSpec p1;
    p1.actor_index = 0;
    p1.providing = true;
    p1.lines[1] = OfferLine{4, 5};
    p1.lines[2] = OfferLine{4, 5};
    scenario::OfferSpec p2;
    p2.actor_index = 1;
    p2.providing = true;
    p2.lines[1] = OfferLine{4, 5};
    scenario::OfferSpec c1;
    c1.actor_index = 2;
    c1.providing = false;
    c1.lines[1] = OfferLine{4, 10};
    scenario::OfferSpec c2;
    c2.actor_index = 3;
    c2.providing = false;
    c2.lines[2] = OfferLine{4, 10};
    config.custom_offers = {p1, p2, c1, c2};

    RunArtifacts run = run_simulation(config);
    REQUIRE(run.report.cycles.size() == 1);
    REQUIRE(run.submissions.size() == 2);
    CHECK(run.submissions[0].objective == 4);  // greedy trap
    CHECK(run.submissions[1].objective == 8);  // exact matching
    CHECK(run.report.cycles[0].objective == 8);
    CHECK(run.report.cycles[0].winner_solver == kSolverIdBase + 1);
    CHECK(run.all_checks_passed());
}

TEST_CASE("fault injection silences a solver from its kill tick") {
    SimConfig config = tiny_market(1, 3);
    config.faults.push_back(FaultSpec{"solver-0", 120});  // during cycle 2
    TempDir dir("agora-fault");
    config.out_dir = dir.path;
    RunArtifacts run = run_simulation(config);
    REQUIRE(run.report.cycles.size() == 3);
    CHECK(run.report.cycles[0].objective == 500);
    // once dead, no create_solution ever again
    auto ops = ledger::read_op_log(dir.path / "ops.jsonl");
    Tick last_solver_op = 0;
    for (const auto& r : ops)
        if (r.caller == kSolverIdBase) last_solver_op = std::max(last_solver_op, r.time);
    CHECK(last_solver_op < 120);
    CHECK(run.report.cycles[2].objective == 0);
    CHECK(run.all_checks_passed());
}

TEST_CASE("killing the only solver pre-close matches the zero-solver baseline") {
    SimConfig with_kill = tiny_market(1, 2);
    with_kill.faults.push_back(FaultSpec{"solver-0", 1});
    RunArtifacts killed = run_simulation(with_kill);

    SimConfig baseline = tiny_market(0, 2);
    RunArtifacts none = run_simulation(baseline);

    REQUIRE(killed.report.cycles.size() == none.report.cycles.size());
    for (std::size_t i = 0; i < killed.report.cycles.size(); ++i)
        CHECK(killed.report.cycles[i].objective == none.report.cycles[i].objective);
}

TEST_CASE("fault injection validates its target") {
    SimConfig config = tiny_market();
    config.faults.push_back(FaultSpec{"solver-9", 5});
    CHECK_THROWS_MATCHES(run_simulation(config), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::UnknownAgent; }));

    // double kill of the same agent
    SimHarness h(ledger::ContractParams{4, 1000, 10, 5, 5, kDirectorId}, ObjectiveSpec{},
                 ConstraintSet{}, 1);
    Agent* director = h.add_agent(std::make_unique<DirectorAgent>(kDirectorId, "director"));
    h.inject_fault(kDirectorId, 50);
    CHECK_THROWS_MATCHES(h.inject_fault(kDirectorId, 60), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::UnknownAgent; }));

    // a closed channel refuses further contract traffic
    director->close_channel();
    CHECK_THROWS_MATCHES(h.op_create_offer(kDirectorId, true, 0), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::ChannelClosed; }));
}

TEST_CASE("prosumers are notified of their finalized trades") {
    SimConfig config = tiny_market();
    // run manually to keep agent pointers
    std::vector<scenario::OfferSpec> offers = config.custom_offers;
    ledger::ContractParams params = config.contract;
    params.director = kDirectorId;
    SimHarness h(params, config.objective, config.constraints, config.seed);
    h.set_cycles_target(1);
    h.add_agent(std::make_unique<DirectorAgent>(kDirectorId, "director"));
    h.add_agent(std::make_unique<SolverAgent>(kSolverIdBase, "solver-0", config.solvers[0]));
    auto* provider = static_cast<ProsumerAgent*>(h.add_agent(std::make_unique<ProsumerAgent>(
        kProsumerIdBase, "prosumer-0", std::vector<scenario::OfferSpec>{offers[0]})));
    auto* consumer = static_cast<ProsumerAgent*>(h.add_agent(std::make_unique<ProsumerAgent>(
        kProsumerIdBase + 1, "prosumer-1", std::vector<scenario::OfferSpec>{offers[1]})));
    h.run();
    CHECK(provider->matched_quantity() == 500);
    CHECK(consumer->matched_quantity() == 500);
}

TEST_CASE("replay reproduces the recorded run and detects tampering") {
    TempDir dir("agora-replay");
    SimConfig config = tiny_market(1, 2);
    config.out_dir = dir.path;
    RunArtifacts run = run_simulation(config);

    SECTION("clean replay matches the recorded hash") {
        ReplayOutcome replayed = replay(dir.path / "ops.jsonl");
        std::ifstream hf(dir.path / "state.hash");
        std::string recorded;
        hf >> recorded;
        CHECK(replayed.final_hash == recorded);
        CHECK(replayed.final_hash == run.report.final_state_hash);
    }

    SECTION("a deleted line is a seq gap") {
        auto ops = ledger::read_op_log(dir.path / "ops.jsonl");
        ops.erase(ops.begin() + 3);
        ledger::write_op_log(dir.path / "tampered.jsonl", ops);
        CHECK_THROWS_MATCHES(replay(dir.path / "tampered.jsonl"), Error,
                             Catch::Matchers::Predicate<Error>(
                                 [](const Error& e) { return e.code() == Errc::CorruptLog; }));
    }

    SECTION("a tampered quantity flips the checkpoint hash") {
        auto ops = ledger::read_op_log(dir.path / "ops.jsonl");
        bool tampered = false;
        for (auto& r : ops) {
            if (r.op == ledger::OpKind::UpdateOffer && r.quantity) {
                r.quantity = *r.quantity - 1;  // flip one digit
                tampered = true;
                break;
            }
        }
        REQUIRE(tampered);
        ledger::write_op_log(dir.path / "tampered.jsonl", ops);
        CHECK_THROWS_MATCHES(replay(dir.path / "tampered.jsonl"), Error,
                             Catch::Matchers::Predicate<Error>(
                                 [](const Error& e) { return e.code() == Errc::CorruptLog; }));
    }
}

TEST_CASE("determinism: same config and seed give identical artifacts") {
    RunArtifacts a = run_simulation(tiny_market(2, 2));
    RunArtifacts b = run_simulation(tiny_market(2, 2));
    CHECK(a.report.final_state_hash == b.report.final_state_hash);
    CHECK(report_to_json(a.report) == report_to_json(b.report));
}

TEST_CASE("message latency stays deterministic and tolerated") {
    SimConfig config = tiny_market(2, 2);
    config.max_latency = 7;
    RunArtifacts a = run_simulation(config);
    RunArtifacts b = run_simulation(config);
    CHECK(a.report.final_state_hash == b.report.final_state_hash);
    CHECK(a.trace.all_passed());
}

TEST_CASE("sim config JSON parsing") {
    nlohmann::json j = nlohmann::json::parse(R"({
        "scenario": "custom",
        "seed": 11,
        "cycles": 2,
        "contract": {"precision": 1000, "max_quantity": 600, "length_receive": 40, "length_solve": 40},
        "objective": {"kind": "total_benefit"},
        "solvers": [{"strategy": "branch_and_bound", "exact_size_cap": 10}],
        "faults": [{"agent": "solver-0", "at": 99}],
        "offers": [
            {"actor": 0, "providing": true, "lines": {"7": {"quantity": "400", "value": "5"}}},
            {"actor": 1, "providing": false, "lines": {"7": {"quantity": "300", "value": "9"}}}
        ]
    })");
    SimConfig c;
    from_json(j, c);
    CHECK(c.seed == 11);
    CHECK(c.cycles == 2);
    CHECK(c.contract.precision == 1000);
    CHECK(c.objective.kind == ObjectiveKind::TotalBenefit);
    REQUIRE(c.solvers.size() == 1);
    CHECK(c.solvers[0].strategy == solver::Strategy::BranchAndBound);
    REQUIRE(c.faults.size() == 1);
    CHECK(c.faults[0].at == 99);
    REQUIRE(c.custom_offers.size() == 2);
    CHECK(c.custom_offers[0].lines.at(7).quantity == 400);

    c.faults.clear();
    RunArtifacts run = run_simulation(c);
    REQUIRE(run.report.cycles.size() == 2);
    CHECK(run.report.cycles[0].objective == 300 * 4);  // benefit (9-5) x 300
}
