#pragma once

#include <chrono>
#include <span>
#include <string>
#include <vector>

#include "agora/scenario/offer_spec.hpp"
#include "agora/sim/harness.hpp"
#include "agora/solver/config.hpp"
#include "agora/solver/snapshot.hpp"
#include "agora/solver/strategies.hpp"

namespace agora::sim {

// Drives the market cycle: initializes the contract, then alternates close
// and finalize at the phase guard boundaries until the configured number of
// cycles has finalized.
class DirectorAgent : public Agent {
public:
    DirectorAgent(ActorId id, std::string name) : Agent(id, std::move(name)) {}

    void on_start(SimHarness& h) override {
        ledger::OpResult r = h.op_setup(id());
        if (!r.ok()) throw Error(Errc::ConfigError, "contract setup rejected: " + r.outcome());
        schedule_close(h, h.contract().state().phase_started_at);
    }

    void on_event(const ledger::Event& e, SimHarness& h) override {
        if (e.kind == ledger::EventKind::Closed) {
            Tick at = e.time + h.params().length_solve;
            h.scheduler().schedule(at, [this, &h] { h.op_finalize(id()); });
        } else if (e.kind == ledger::EventKind::CycleFinalized) {
            ++cycles_done_;
            if (cycles_done_ < h.cycles_target()) schedule_close(h, e.time);
        }
    }

    std::uint64_t cycles_done() const { return cycles_done_; }

private:
    void schedule_close(SimHarness& h, Tick phase_start) {
        Tick at = phase_start + h.params().length_receive;
        h.scheduler().schedule(at, [this, &h] { h.op_close(id()); });
    }

    std::uint64_t cycles_done_ = 0;
};

// Posts its scripted offers at the start of every cycle and tallies the
// finalized assignments that reference them.
class ProsumerAgent : public Agent {
public:
    ProsumerAgent(ActorId id, std::string name, std::vector<scenario::OfferSpec> specs)
        : Agent(id, std::move(name)), specs_(std::move(specs)) {}

    void on_start(SimHarness& h) override {
        h.scheduler().schedule(h.scheduler().now() + 1, [this, &h] { post_offers(h); });
    }

    void on_event(const ledger::Event& e, SimHarness& h) override {
        if (e.kind != ledger::EventKind::CycleFinalized) return;
        tally_notifications(h, e);
        if (e.cycle < h.cycles_target())
            h.scheduler().schedule(e.time + 1, [this, &h] { post_offers(h); });
    }

    // Offer ids this prosumer posted in the current cycle.
    const std::vector<OfferId>& posted_offers() const { return posted_; }
    std::uint64_t matched_quantity() const { return matched_quantity_; }
    std::uint64_t calls_for_last_offer() const { return calls_last_offer_; }

private:
    void post_offers(SimHarness& h) {
        posted_.clear();
        for (const scenario::OfferSpec& spec : specs_) {
            std::uint64_t calls = 0;
            ledger::OpResult created = h.op_create_offer(id(), spec.providing, spec.misc);
            if (!created.ok()) continue;
            ++calls;
            for (const auto& [t, line] : spec.lines) {
                if (h.op_update_offer(id(), created.id, t, line.quantity, line.unit_price).ok())
                    ++calls;
            }
            if (h.op_post_offer(id(), created.id).ok()) {
                ++calls;
                posted_.push_back(created.id);
            }
            calls_last_offer_ = calls;
        }
    }

    // Prosumers are notified of their trades through AssignmentFinalized
    // events; this agent reads the slice of the log for the finalized cycle.
    void tally_notifications(SimHarness& h, const ledger::Event& fin) {
        for (const ledger::Event& e : h.events()) {
            if (e.kind != ledger::EventKind::AssignmentFinalized || e.cycle != fin.cycle)
                continue;
            for (OfferId mine : posted_) {
                if (e.providing_offer == mine || e.consuming_offer == mine)
                    matched_quantity_ += e.quantity.value_or(0);
            }
        }
    }

    std::vector<scenario::OfferSpec> specs_;
    std::vector<OfferId> posted_;
    std::uint64_t matched_quantity_ = 0;
    std::uint64_t calls_last_offer_ = 0;
};

// Per-cycle submission outcome of one solver agent.
struct SubmissionReport {
    std::uint64_t cycle = 0;
    ActorId solver = 0;
    std::int64_t objective = 0;     // solver-side objective of its allocation
    std::size_t assignments = 0;
    std::size_t accepted = 0;       // accepted add_assignment calls
    std::size_t rejected = 0;
    std::uint64_t contract_calls = 0;  // create_solution + add_assignment calls
    double wall_ms = 0.0;           // off-ledger solve time (not deterministic)
    std::string error;
};

// Off-ledger solver: on every Closed event it rebuilds the market snapshot
// from the event log, solves under its configured strategy, and submits the
// allocation one assignment at a time. Individual rejections are skipped;
// the remaining prefix is still feasible.
class SolverAgent : public Agent {
public:
    SolverAgent(ActorId id, std::string name, solver::SolverConfig config)
        : Agent(id, std::move(name)), config_(std::move(config)) {}

    void on_event(const ledger::Event& e, SimHarness& h) override {
        if (e.kind != ledger::EventKind::Closed) return;
        SubmissionReport report;
        report.cycle = e.cycle;
        report.solver = id();

        // events up to and including this Closed
        std::span<const ledger::Event> upto(h.events().data(), e.seq + 1);
        Allocation alloc;
        auto t0 = std::chrono::steady_clock::now();
        try {
            solver::MarketSnapshot snap =
                solver::snapshot_from_events(upto, h.params().precision);
            alloc = solver::solve(snap, config_);
        } catch (const Error& err) {
            report.error = err.what();
            reports_.push_back(report);
            return;
        }
        report.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        report.assignments = alloc.assignments.size();

        ledger::OpResult created = h.op_create_solution(id(), e.cycle);
        ++report.contract_calls;
        if (!created.ok()) {
            report.error = created.outcome();
            reports_.push_back(report);
            return;
        }
        for (const Assignment& a : alloc.assignments) {
            ledger::OpResult r = h.op_add_assignment(id(), created.id, a.providing_offer,
                                                     a.consuming_offer, a.rtype, a.quantity,
                                                     a.unit_price);
            ++report.contract_calls;
            if (r.ok()) {
                ++report.accepted;
                report.objective += objective_increment(a, h.contract().state().offers,
                                                        h.objective());
            } else {
                ++report.rejected;
            }
        }
        reports_.push_back(report);
    }

    const std::vector<SubmissionReport>& reports() const { return reports_; }
    const solver::SolverConfig& config() const { return config_; }

private:
    solver::SolverConfig config_;
    std::vector<SubmissionReport> reports_;
};

}  // namespace agora::sim
