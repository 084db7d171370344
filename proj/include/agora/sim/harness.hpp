#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "agora/errors.hpp"
#include "agora/ledger/canonical.hpp"
#include "agora/ledger/contract.hpp"
#include "agora/ledger/oplog.hpp"
#include "agora/sim/directory.hpp"
#include "agora/sim/scheduler.hpp"

namespace agora::sim {

class SimHarness;

// A simulated actor. Agents are logically concurrent workers executed by the
// deterministic scheduler; they react to phase events (Closed,
// CycleFinalized) pushed over their channel and may read the shared event log
// the way real actors would tail contract events. A killed agent's channel
// delivers nothing and its scheduled work is dropped.
class Agent {
public:
    Agent(ActorId id, std::string name) : id_(id), name_(std::move(name)) {}
    virtual ~Agent() = default;

    ActorId id() const { return id_; }
    const std::string& name() const { return name_; }
    bool alive() const { return alive_; }
    void close_channel() { alive_ = false; }

    virtual void on_start(SimHarness&) {}
    virtual void on_event(const ledger::Event&, SimHarness&) {}

private:
    ActorId id_;
    std::string name_;
    bool alive_ = true;
};

// Per-agent operation counters, used for the call-count checks.
struct CallStats {
    std::uint64_t accepted = 0;
    std::uint64_t rejected = 0;
};

// Owns the contract, the scheduler, the operation/event logs, and the agents.
// All contract traffic flows through the op_* wrappers, which serialize
// operations, stamp strictly increasing ticks, record the operation log, and
// broadcast phase events to live agents.
class SimHarness {
public:
    SimHarness(ledger::ContractParams params, ObjectiveSpec objective, ConstraintSet constraints,
               std::uint64_t seed, std::uint64_t max_latency = 0)
        : params_(std::move(params)),
          objective_(std::move(objective)),
          constraints_(std::move(constraints)),
          latency_rng_(seed ^ 0x6c617465ull),
          max_latency_(max_latency) {
        directory_.register_endpoint("contract", Endpoint{"contract", 0});
    }

    Directory& directory() { return directory_; }
    Scheduler& scheduler() { return sched_; }
    ledger::Contract& contract() { return contract_; }
    const std::vector<ledger::OpRecord>& ops() const { return ops_; }
    const std::vector<ledger::Event>& events() const { return contract_.events(); }
    const ledger::ContractParams& params() const { return params_; }
    const ObjectiveSpec& objective() const { return objective_; }
    const ConstraintSet& constraints() const { return constraints_; }
    std::uint64_t cycles_target() const { return cycles_target_; }
    void set_cycles_target(std::uint64_t n) { cycles_target_ = n; }

    Agent* add_agent(std::unique_ptr<Agent> agent) {
        directory_.register_endpoint(agent->name(), Endpoint{"agent", agent->id()});
        agents_.push_back(std::move(agent));
        return agents_.back().get();
    }

    Agent* find_agent(ActorId id) {
        for (auto& a : agents_)
            if (a->id() == id) return a.get();
        return nullptr;
    }

    const std::vector<std::unique_ptr<Agent>>& agents() const { return agents_; }

    CallStats stats_for(ActorId id) const {
        auto it = stats_.find(id);
        return it == stats_.end() ? CallStats{} : it->second;
    }

    // Closes an agent's channel at the given tick. The agent must be alive
    // and not already scheduled for termination.
    void inject_fault(ActorId id, Tick at) {
        Agent* agent = find_agent(id);
        if (!agent || !agent->alive() || kill_scheduled_.count(id))
            throw Error(Errc::UnknownAgent, "agent " + std::to_string(id) + " not running");
        kill_scheduled_.insert(id);
        sched_.schedule(at, [this, id] {
            if (Agent* a = find_agent(id)) a->close_channel();
        });
    }

    void run() {
        for (auto& a : agents_) a->on_start(*this);
        sched_.drain();
    }

    // --- contract operations (agents call these) ---

    ledger::OpResult op_setup(ActorId caller) {
        ledger::OpRecord r;
        r.op = ledger::OpKind::Setup;
        r.caller = caller;
        r.params = params_;
        r.objective_spec = objective_;
        r.constraints = constraints_;
        return apply(std::move(r));
    }

    ledger::OpResult op_create_offer(ActorId caller, bool providing, std::uint64_t misc) {
        ledger::OpRecord r;
        r.op = ledger::OpKind::CreateOffer;
        r.caller = caller;
        r.providing = providing;
        r.misc = misc;
        return apply(std::move(r));
    }

    ledger::OpResult op_update_offer(ActorId caller, OfferId id, ResourceType t,
                                     std::uint64_t quantity, std::uint64_t value) {
        ledger::OpRecord r;
        r.op = ledger::OpKind::UpdateOffer;
        r.caller = caller;
        r.offer_id = id;
        r.rtype = t;
        r.quantity = quantity;
        r.value = value;
        return apply(std::move(r));
    }

    ledger::OpResult op_post_offer(ActorId caller, OfferId id) {
        ledger::OpRecord r;
        r.op = ledger::OpKind::PostOffer;
        r.caller = caller;
        r.offer_id = id;
        return apply(std::move(r));
    }

    ledger::OpResult op_cancel_offer(ActorId caller, OfferId id) {
        ledger::OpRecord r;
        r.op = ledger::OpKind::CancelOffer;
        r.caller = caller;
        r.offer_id = id;
        return apply(std::move(r));
    }

    ledger::OpResult op_close(ActorId caller) {
        ledger::OpRecord r;
        r.op = ledger::OpKind::Close;
        r.caller = caller;
        return apply(std::move(r));
    }

    ledger::OpResult op_create_solution(ActorId caller, std::uint64_t misc) {
        ledger::OpRecord r;
        r.op = ledger::OpKind::CreateSolution;
        r.caller = caller;
        r.misc = misc;
        return apply(std::move(r));
    }

    ledger::OpResult op_add_assignment(ActorId caller, SolutionId sid, OfferId prov, OfferId cons,
                                       ResourceType t, std::uint64_t quantity,
                                       std::uint64_t value) {
        ledger::OpRecord r;
        r.op = ledger::OpKind::AddAssignment;
        r.caller = caller;
        r.solution_id = sid;
        r.providing_offer = prov;
        r.consuming_offer = cons;
        r.rtype = t;
        r.quantity = quantity;
        r.value = value;
        return apply(std::move(r));
    }

    ledger::OpResult op_finalize(ActorId caller) {
        ledger::OpRecord r;
        r.op = ledger::OpKind::Finalize;
        r.caller = caller;
        return apply(std::move(r));
    }

private:
    ledger::OpResult apply(ledger::OpRecord r) {
        if (Agent* caller = find_agent(r.caller); caller && !caller->alive())
            throw Error(Errc::ChannelClosed,
                        "agent " + std::to_string(r.caller) + " was shut down");
        r.seq = ops_.size();
        r.time = sched_.alloc_op_tick();
        ledger::OpResult res = ledger::apply_op(contract_, r);
        r.outcome = res.outcome();
        if (res.ok()) {
            ++stats_[r.caller].accepted;
            if (r.op == ledger::OpKind::CreateOffer || r.op == ledger::OpKind::CreateSolution)
                r.result_id = res.id;
            if (r.op == ledger::OpKind::Finalize)
                r.state_hash = ledger::state_hash(contract_);
        } else {
            ++stats_[r.caller].rejected;
        }
        ops_.push_back(std::move(r));
        for (const ledger::Event& e : res.events) broadcast(e);
        return res;
    }

    // Phase notifications reach every live agent over its channel, optionally
    // after a seeded per-message latency.
    void broadcast(const ledger::Event& e) {
        if (e.kind != ledger::EventKind::Closed && e.kind != ledger::EventKind::CycleFinalized)
            return;
        for (auto& agent : agents_) {
            if (!agent->alive()) continue;
            Tick at = sched_.now();
            if (max_latency_ > 0) at += latency_rng_() % (max_latency_ + 1);
            Agent* target = agent.get();
            ledger::Event copy = e;
            sched_.schedule(at, [this, target, copy] {
                if (target->alive()) target->on_event(copy, *this);
            });
        }
    }

    ledger::ContractParams params_;
    ObjectiveSpec objective_;
    ConstraintSet constraints_;
    ledger::Contract contract_;
    Scheduler sched_;
    Directory directory_;
    std::vector<std::unique_ptr<Agent>> agents_;
    std::vector<ledger::OpRecord> ops_;
    std::map<ActorId, CallStats> stats_;
    std::set<ActorId> kill_scheduled_;
    std::mt19937_64 latency_rng_;
    std::uint64_t max_latency_ = 0;
    std::uint64_t cycles_target_ = 1;
};

}  // namespace agora::sim
