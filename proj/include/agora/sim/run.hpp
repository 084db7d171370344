#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "agora/audit/trace_check.hpp"
#include "agora/scenario/carpool.hpp"
#include "agora/scenario/energy.hpp"
#include "agora/sim/agents.hpp"
#include "agora/sim/harness.hpp"
#include "agora/sim/replay.hpp"
#include "agora/sim/report.hpp"

namespace agora::sim {

constexpr ActorId kDirectorId = 1;
constexpr ActorId kSolverIdBase = 200;
constexpr ActorId kProsumerIdBase = 1000;

struct FaultSpec {
    std::string agent;  // directory name, e.g. "solver-0"
    Tick at = 0;
};

struct SimConfig {
    std::string scenario = "custom";  // carpool | energy | custom
    std::uint64_t seed = 1;
    std::uint64_t cycles = 1;
    std::uint64_t max_latency = 0;
    ledger::ContractParams contract{/*num_types=*/256,
                                    /*precision=*/1'000'000,
                                    /*max_quantity=*/1'000'000,
                                    /*length_receive=*/1000,
                                    /*length_solve=*/1000,
                                    /*director=*/kDirectorId};
    ObjectiveSpec objective;
    ConstraintSet constraints;
    std::vector<solver::SolverConfig> solvers = {solver::SolverConfig{}};
    std::vector<FaultSpec> faults;
    scenario::CarpoolParams carpool;
    scenario::EnergyParams energy;
    std::vector<scenario::OfferSpec> custom_offers;
    std::filesystem::path out_dir;  // empty = keep everything in memory
};

struct RunArtifacts {
    SimulationReport report;
    audit::TraceReport trace;
    bool conservation_ok = false;
    bool replay_ok = false;
    std::vector<SubmissionReport> submissions;
    double total_solve_ms = 0.0;
    std::uint64_t prosumer_count = 0;
    std::filesystem::path out_dir;

    bool all_checks_passed() const {
        return trace.all_passed() && conservation_ok && replay_ok;
    }
};

namespace detail {

inline std::vector<scenario::OfferSpec> scenario_offers(const SimConfig& config) {
    if (config.scenario == "carpool") {
        scenario::CarpoolParams p = config.carpool;
        p.seed = config.seed;
        return generate_carpool(p).offers;
    }
    if (config.scenario == "energy") {
        scenario::EnergyParams p = config.energy;
        p.seed = config.seed;
        return scenario::energy_offers(p);
    }
    if (config.scenario == "custom") return config.custom_offers;
    throw Error(Errc::ConfigError, "unknown scenario: " + config.scenario);
}

// Interval grid for the plot-ready CSVs; each resource type maps to a row.
struct IntervalGrid {
    std::vector<std::string> labels;
    std::map<ResourceType, std::size_t> type_to_row;
};

inline IntervalGrid interval_grid(const SimConfig& config,
                                  const std::vector<ledger::Event>& events) {
    IntervalGrid grid;
    if (config.scenario == "carpool") {
        scenario::CarpoolParams p = config.carpool;
        for (int i = 0; i < p.interval_count; ++i) {
            std::uint64_t ts =
                p.start_timestamp + std::uint64_t(i) * std::uint64_t(p.interval_step_minutes) * 60;
            grid.labels.push_back(std::to_string(ts));
        }
        // every ride type with this timestamp falls into the row
        for (const ledger::Event& e : events) {
            if (!e.rtype) continue;
            std::uint64_t ts = scenario::decode_ride_type(*e.rtype).timestamp;
            for (int i = 0; i < p.interval_count; ++i) {
                std::uint64_t row_ts = p.start_timestamp +
                                       std::uint64_t(i) * std::uint64_t(p.interval_step_minutes) * 60;
                if (ts == row_ts) grid.type_to_row[*e.rtype] = std::size_t(i);
            }
        }
    } else if (config.scenario == "energy") {
        for (int i = 0; i < scenario::kIntervalsPerDay; ++i) {
            ResourceType label = scenario::interval_label(i);
            grid.labels.push_back(std::to_string(label));
            grid.type_to_row[label] = std::size_t(i);
        }
    } else {
        for (const ledger::Event& e : events) {
            if (!e.rtype) continue;
            if (!grid.type_to_row.count(*e.rtype)) {
                grid.type_to_row[*e.rtype] = 0;  // rows assigned after collection
            }
        }
        for (auto& [t, row] : grid.type_to_row) {
            row = grid.labels.size();
            grid.labels.push_back(u64_str(t));
        }
    }
    return grid;
}

inline void write_csvs(const SimConfig& config, const SimulationReport& report,
                       const std::vector<ledger::Event>& events,
                       const std::filesystem::path& dir) {
    IntervalGrid grid = interval_grid(config, events);
    std::size_t rows = grid.labels.size();
    std::vector<std::uint64_t> offered_prov(rows, 0), offered_cons(rows, 0), traded(rows, 0);
    for (const CycleSummary& c : report.cycles) {
        auto accumulate = [&](const std::map<ResourceType, std::uint64_t>& src,
                              std::vector<std::uint64_t>& dst) {
            for (const auto& [t, q] : src) {
                auto it = grid.type_to_row.find(t);
                if (it != grid.type_to_row.end()) dst[it->second] += q;
            }
        };
        accumulate(c.posted_providing_by_type, offered_prov);
        accumulate(c.posted_consuming_by_type, offered_cons);
        accumulate(c.matched_by_type, traded);
    }

    {
        std::ofstream f(dir / "offers_per_interval.csv");
        f << "interval,offered_providing,offered_consuming\n";
        for (std::size_t i = 0; i < rows; ++i)
            f << grid.labels[i] << ',' << offered_prov[i] << ',' << offered_cons[i] << '\n';
    }
    {
        std::ofstream f(dir / "matches_per_interval.csv");
        f << "interval,matched\n";
        for (std::size_t i = 0; i < rows; ++i) f << grid.labels[i] << ',' << traded[i] << '\n';
    }
    {
        std::ofstream f(dir / "totals_per_interval.csv");
        f << "interval,produced,demanded,traded\n";
        for (std::size_t i = 0; i < rows; ++i)
            f << grid.labels[i] << ',' << offered_prov[i] << ',' << offered_cons[i] << ','
              << traded[i] << '\n';
    }
}

}  // namespace detail

// Full scenario run: generate offers, wire up agents, execute every cycle,
// persist the audit artifacts, and re-verify the run (trace properties,
// conservation, replay determinism).
inline RunArtifacts run_simulation(const SimConfig& config) {
    std::vector<scenario::OfferSpec> offers = detail::scenario_offers(config);

    ledger::ContractParams params = config.contract;
    params.director = kDirectorId;
    SimHarness harness(params, config.objective, config.constraints, config.seed,
                       config.max_latency);
    harness.set_cycles_target(config.cycles);

    harness.add_agent(std::make_unique<DirectorAgent>(kDirectorId, "director"));

    std::vector<SolverAgent*> solver_agents;
    for (std::size_t i = 0; i < config.solvers.size(); ++i) {
        solver::SolverConfig sc = config.solvers[i];
        sc.objective = config.objective;      // solvers mirror the market rules
        sc.constraints = config.constraints;
        auto agent = std::make_unique<SolverAgent>(kSolverIdBase + i,
                                                   "solver-" + std::to_string(i), sc);
        solver_agents.push_back(agent.get());
        harness.add_agent(std::move(agent));
    }

    std::map<std::uint64_t, std::vector<scenario::OfferSpec>> by_actor;
    for (const scenario::OfferSpec& o : offers) by_actor[o.actor_index].push_back(o);
    std::uint64_t prosumer_count = 0;
    for (auto& [actor, specs] : by_actor) {
        harness.add_agent(std::make_unique<ProsumerAgent>(
            kProsumerIdBase + actor, "prosumer-" + std::to_string(actor), std::move(specs)));
        ++prosumer_count;
    }

    for (const FaultSpec& f : config.faults) {
        if (!harness.directory().contains(f.agent))
            throw Error(Errc::UnknownAgent, f.agent);
        harness.inject_fault(harness.directory().lookup(f.agent).id, f.at);
    }

    harness.run();

    RunArtifacts out;
    out.prosumer_count = prosumer_count;
    std::string final_hash = ledger::state_hash(harness.contract());
    out.report = build_report(harness.events(), harness.ops(), final_hash);
    for (SolverAgent* s : solver_agents) {
        for (const SubmissionReport& r : s->reports()) {
            out.submissions.push_back(r);
            out.total_solve_ms += r.wall_ms;
        }
    }

    // post-run verification
    out.trace = audit::check_trace(harness.ops(), harness.events());
    out.conservation_ok = out.report.conservation_holds();
    try {
        out.replay_ok = replay_ops(harness.ops()).final_hash == final_hash;
    } catch (const Error&) {
        out.replay_ok = false;
    }

    if (!config.out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(config.out_dir);
        out.out_dir = config.out_dir;
        ledger::write_op_log(config.out_dir / "ops.jsonl", harness.ops());
        ledger::write_event_log(config.out_dir / "events.jsonl", harness.events());
        {
            std::ofstream f(config.out_dir / "report.json");
            f << report_to_json(out.report).dump(2) << '\n';
        }
        {
            std::ofstream f(config.out_dir / "state.hash");
            f << final_hash << '\n';
        }
        {
            // wall-clock timings are real measurements; they live outside
            // report.json so the deterministic artifacts stay byte-stable
            nlohmann::ordered_json tj = nlohmann::ordered_json::array();
            for (const SubmissionReport& r : out.submissions) {
                tj.push_back({{"cycle", r.cycle},
                              {"solver", r.solver},
                              {"wall_ms", r.wall_ms},
                              {"assignments", r.assignments},
                              {"accepted", r.accepted},
                              {"rejected", r.rejected},
                              {"objective", r.objective},
                              {"error", r.error}});
            }
            std::ofstream f(config.out_dir / "timings.json");
            f << tj.dump(2) << '\n';
        }
        detail::write_csvs(config, out.report, harness.events(), config.out_dir);
    }
    return out;
}

template <typename Json>
void from_json(const Json& j, FaultSpec& f) {
    f.agent = j.at("agent").template get<std::string>();
    f.at = j.at("at").template get<Tick>();
}

template <typename Json>
void from_json(const Json& j, SimConfig& c) {
    if (j.contains("scenario")) c.scenario = j.at("scenario").template get<std::string>();
    if (j.contains("seed")) c.seed = u64_from_json(j.at("seed"));
    if (j.contains("cycles")) c.cycles = u64_from_json(j.at("cycles"));
    if (j.contains("max_latency")) c.max_latency = u64_from_json(j.at("max_latency"));
    if (j.contains("contract")) {
        const auto& cj = j.at("contract");
        if (cj.contains("num_types")) c.contract.num_types = u64_from_json(cj.at("num_types"));
        if (cj.contains("precision")) c.contract.precision = u64_from_json(cj.at("precision"));
        if (cj.contains("max_quantity"))
            c.contract.max_quantity = u64_from_json(cj.at("max_quantity"));
        if (cj.contains("length_receive"))
            c.contract.length_receive = u64_from_json(cj.at("length_receive"));
        if (cj.contains("length_solve"))
            c.contract.length_solve = u64_from_json(cj.at("length_solve"));
    }
    if (j.contains("objective")) agora::from_json(j.at("objective"), c.objective);
    if (j.contains("constraints")) agora::from_json(j.at("constraints"), c.constraints);
    if (j.contains("solvers")) {
        c.solvers.clear();
        for (const auto& sj : j.at("solvers")) {
            solver::SolverConfig sc;
            solver::from_json(sj, sc);
            c.solvers.push_back(std::move(sc));
        }
    }
    if (j.contains("faults")) {
        c.faults.clear();
        for (const auto& fj : j.at("faults")) {
            FaultSpec f;
            from_json(fj, f);
            c.faults.push_back(std::move(f));
        }
    }
    if (j.contains("carpool")) scenario::from_json(j.at("carpool"), c.carpool);
    if (j.contains("energy")) scenario::from_json(j.at("energy"), c.energy);
    if (j.contains("offers")) {
        c.custom_offers.clear();
        for (const auto& oj : j.at("offers")) {
            scenario::OfferSpec o;
            scenario::from_json(oj, o);
            c.custom_offers.push_back(std::move(o));
        }
    }
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").template get<std::string>();
}

}  // namespace agora::sim
