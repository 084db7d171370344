#pragma once

// Runtime trace properties over recorded operation and event logs. These
// restate the contract's verified guard semantics as checks any completed run
// (or fuzz sequence) must satisfy:
//
//   P1 progress        - the contract never wedges: guard-satisfied
//                        transitions are accepted, and from the final state a
//                        transition is still possible once time advances.
//   P2 no-post-cancel-in-solve - post/cancel calls during a solving phase are
//                        rejected with WrongPhase.
//   P3 post-guarded    - an offer is posted only once per cycle, only after
//                        creation, and only by its creator.
//   P4 cancel-guarded  - an offer is canceled only after being posted, only
//                        once, and only by the poster.
//   P5 solutions-only-in-solve - create_solution is accepted only in a
//                        solving phase.
//   candidate-optimality - every finalized cycle reports the maximal-objective
//                        feasible solution under the strict-improvement tie
//                        rule, with objectives recomputed from scratch.
//   finalized-feasibility - every finalized allocation passes the full
//                        feasibility check against the posted offers.
//   consistency        - replaying the operation log through a reference
//                        contract reproduces the logged outcomes and events.
//
// All shadow state is derived from the logs themselves, so a broken contract
// variant that accepted an illegal operation is caught even though its own
// bookkeeping agreed with itself.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "agora/feasibility.hpp"
#include "agora/ledger/canonical.hpp"
#include "agora/ledger/contract.hpp"
#include "agora/ledger/oplog.hpp"
#include "agora/objective.hpp"

namespace agora::audit {

struct PropertyResult {
    std::string name;
    bool passed = true;
    std::string detail;
};

struct TraceReport {
    std::vector<PropertyResult> properties;

    bool all_passed() const {
        return std::all_of(properties.begin(), properties.end(),
                           [](const PropertyResult& p) { return p.passed; });
    }

    const PropertyResult* find(const std::string& name) const {
        for (const PropertyResult& p : properties)
            if (p.name == name) return &p;
        return nullptr;
    }

    std::vector<std::string> failed_names() const {
        std::vector<std::string> out;
        for (const PropertyResult& p : properties)
            if (!p.passed) out.push_back(p.name);
        return out;
    }
};

namespace detail {

struct ShadowOffer {
    ActorId creator = 0;
    Side side = Side::Providing;
    bool posted = false;
    bool canceled = false;
    std::uint64_t misc = 0;
    std::map<ResourceType, OfferLine> lines;
};

struct ShadowSolution {
    ActorId creator = 0;
    std::vector<Assignment> assignments;
};

struct Shadow {
    ledger::Phase phase = ledger::Phase::Init;
    Tick phase_started_at = 0;
    std::uint64_t cycle = 0;
    ledger::ContractParams params;
    ObjectiveSpec objective_spec;
    ConstraintSet constraints;
    bool configured = false;
    std::map<OfferId, ShadowOffer> offers;
    std::map<SolutionId, ShadowSolution> solutions;

    OfferTable offer_table() const {
        OfferTable t;
        for (const auto& [id, so] : offers) {
            Offer o;
            o.id = id;
            o.owner = so.creator;
            o.side = so.side;
            o.lifecycle = so.canceled  ? Lifecycle::Canceled
                          : so.posted  ? Lifecycle::Posted
                                       : Lifecycle::Created;
            o.misc = so.misc;
            o.lines = so.lines;
            t.emplace(id, std::move(o));
        }
        return t;
    }
};

class Checker {
public:
    Checker(const std::vector<ledger::OpRecord>& ops, const std::vector<ledger::Event>& events)
        : ops_(ops), events_(events) {}

    TraceReport run() {
        init_properties();
        check_consistency();
        walk();
        probe_progress();
        TraceReport report;
        for (auto& [name, res] : results_) report.properties.push_back(res);
        // fixed presentation order
        std::sort(report.properties.begin(), report.properties.end(),
                  [this](const PropertyResult& a, const PropertyResult& b) {
                      return order_.at(a.name) < order_.at(b.name);
                  });
        return report;
    }

private:
    void init_properties() {
        const char* names[] = {"P1-progress",
                               "P2-no-post-cancel-in-solve",
                               "P3-post-guarded",
                               "P4-cancel-guarded",
                               "P5-solutions-only-in-solve",
                               "candidate-optimality",
                               "finalized-feasibility",
                               "consistency"};
        int i = 0;
        for (const char* n : names) {
            results_[n] = PropertyResult{n, true, ""};
            order_[n] = i++;
        }
    }

    void fail(const std::string& prop, std::uint64_t seq, const std::string& why) {
        PropertyResult& r = results_[prop];
        if (!r.passed) return;  // keep the first diagnosis
        r.passed = false;
        std::ostringstream os;
        os << "op seq " << seq << ": " << why;
        r.detail = os.str();
    }

    // Replays the raw operation arguments through a reference contract and
    // demands the recorded outcomes and the recorded event stream.
    void check_consistency() {
        ledger::Contract ref;
        std::size_t event_cursor = 0;
        for (const ledger::OpRecord& r : ops_) {
            ledger::OpResult res = ledger::apply_op(ref, r);
            if (res.outcome() != r.outcome) {
                fail("consistency", r.seq,
                     "outcome " + r.outcome + " but reference contract says " + res.outcome());
                return;
            }
            for (const ledger::Event& e : res.events) {
                if (event_cursor >= events_.size()) {
                    fail("consistency", r.seq, "reference contract emits more events than logged");
                    return;
                }
                if (!(events_[event_cursor] == e)) {
                    fail("consistency", r.seq,
                         "event seq " + std::to_string(e.seq) + " differs from log");
                    return;
                }
                ++event_cursor;
            }
        }
        if (event_cursor != events_.size())
            fail("consistency", ops_.empty() ? 0 : ops_.back().seq,
                 "log contains events the reference contract never emitted");
    }

    void walk() {
        std::size_t finalize_count = 0;
        for (const ledger::OpRecord& r : ops_) {
            switch (r.op) {
                case ledger::OpKind::Setup: on_setup(r); break;
                case ledger::OpKind::CreateOffer: on_create_offer(r); break;
                case ledger::OpKind::UpdateOffer: on_update_offer(r); break;
                case ledger::OpKind::PostOffer: on_post_offer(r); break;
                case ledger::OpKind::CancelOffer: on_cancel_offer(r); break;
                case ledger::OpKind::Close: on_close(r); break;
                case ledger::OpKind::CreateSolution: on_create_solution(r); break;
                case ledger::OpKind::AddAssignment: on_add_assignment(r); break;
                case ledger::OpKind::Finalize: on_finalize(r, finalize_count); break;
            }
        }
    }

    void on_setup(const ledger::OpRecord& r) {
        if (!r.accepted()) return;
        shadow_.params = r.params.value_or(ledger::ContractParams{});
        shadow_.objective_spec = r.objective_spec.value_or(ObjectiveSpec{});
        shadow_.constraints = r.constraints.value_or(ConstraintSet{});
        shadow_.configured = true;
        shadow_.phase = ledger::Phase::Receive;
        shadow_.phase_started_at = r.time;
        shadow_.cycle = 1;
    }

    void on_create_offer(const ledger::OpRecord& r) {
        if (!r.accepted()) return;
        ShadowOffer o;
        o.creator = r.caller;
        o.side = r.providing.value_or(true) ? Side::Providing : Side::Consuming;
        o.misc = r.misc.value_or(0);
        shadow_.offers[r.result_id.value_or(0)] = std::move(o);
        table_cache_.reset();
    }

    void on_update_offer(const ledger::OpRecord& r) {
        if (!r.accepted()) return;
        auto it = shadow_.offers.find(r.offer_id.value_or(0));
        if (it != shadow_.offers.end()) {
            it->second.lines[r.rtype.value_or(0)] =
                OfferLine{r.quantity.value_or(0), r.value.value_or(0)};
            table_cache_.reset();
        }
    }

    void on_post_offer(const ledger::OpRecord& r) {
        if (shadow_.phase == ledger::Phase::Solve && r.outcome != to_string(ledger::Reject::WrongPhase))
            fail("P2-no-post-cancel-in-solve", r.seq,
                 "post_offer in solving phase had outcome " + r.outcome);
        if (!r.accepted()) return;
        auto it = shadow_.offers.find(r.offer_id.value_or(0));
        if (it == shadow_.offers.end()) {
            fail("P3-post-guarded", r.seq, "posted an offer never created this cycle");
            return;
        }
        if (it->second.posted) {
            fail("P3-post-guarded", r.seq, "offer posted twice in one cycle");
            return;
        }
        if (it->second.creator != r.caller) {
            fail("P3-post-guarded", r.seq, "posted by a caller other than the creator");
            return;
        }
        it->second.posted = true;
        table_cache_.reset();
    }

    void on_cancel_offer(const ledger::OpRecord& r) {
        if (shadow_.phase == ledger::Phase::Solve && r.outcome != to_string(ledger::Reject::WrongPhase))
            fail("P2-no-post-cancel-in-solve", r.seq,
                 "cancel_offer in solving phase had outcome " + r.outcome);
        if (!r.accepted()) return;
        auto it = shadow_.offers.find(r.offer_id.value_or(0));
        if (it == shadow_.offers.end() || !it->second.posted || it->second.canceled) {
            fail("P4-cancel-guarded", r.seq, "canceled an offer that was not posted");
            return;
        }
        if (it->second.creator != r.caller) {
            fail("P4-cancel-guarded", r.seq, "canceled by a caller other than the poster");
            return;
        }
        it->second.canceled = true;
        table_cache_.reset();
    }

    void on_close(const ledger::OpRecord& r) {
        if (!r.accepted()) {
            // progress: an authorized close at or past the guard boundary must succeed
            if (shadow_.phase == ledger::Phase::Receive && shadow_.configured &&
                authorized(r.caller) &&
                r.time >= shadow_.phase_started_at + shadow_.params.length_receive)
                fail("P1-progress", r.seq, "guard-satisfied close rejected: " + r.outcome);
            return;
        }
        shadow_.phase = ledger::Phase::Solve;
        shadow_.phase_started_at = r.time;
    }

    void on_create_solution(const ledger::OpRecord& r) {
        if (!r.accepted()) return;
        if (shadow_.phase != ledger::Phase::Solve) {
            fail("P5-solutions-only-in-solve", r.seq,
                 "create_solution accepted outside the solving phase");
            return;
        }
        shadow_.solutions[r.result_id.value_or(0)] = ShadowSolution{r.caller, {}};
    }

    void on_add_assignment(const ledger::OpRecord& r) {
        if (!r.accepted()) return;
        auto it = shadow_.solutions.find(r.solution_id.value_or(0));
        if (it == shadow_.solutions.end()) return;  // consistency already flags this
        Assignment a{r.providing_offer.value_or(0), r.consuming_offer.value_or(0),
                     r.rtype.value_or(0), r.quantity.value_or(0), r.value.value_or(0)};
        it->second.assignments.push_back(a);
        std::int64_t inc = 0;
        try {
            inc = objective_increment(a, cached_table(), shadow_.objective_spec);
        } catch (const Error&) {
            inc = 0;  // the finalize-time from-scratch recomputation flags this
        }
        shadow_objectives_[it->first] += inc;
        std::int64_t obj = shadow_objectives_[it->first];
        // track the candidate exactly as the contract defines it: strict
        // improvement at assignment-acceptance time
        if (!shadow_candidate_ || obj > shadow_candidate_->second) {
            shadow_candidate_ = {r.solution_id.value_or(0), obj};
        } else if (shadow_candidate_->first == r.solution_id.value_or(0)) {
            shadow_candidate_->second = obj;
        }
    }

    void on_finalize(const ledger::OpRecord& r, std::size_t& finalize_count) {
        if (!r.accepted()) {
            if (shadow_.phase == ledger::Phase::Solve && shadow_.configured &&
                authorized(r.caller) &&
                r.time >= shadow_.phase_started_at + shadow_.params.length_solve)
                fail("P1-progress", r.seq, "guard-satisfied finalize rejected: " + r.outcome);
            return;
        }
        check_finalized_cycle(r, finalize_count++);
        shadow_.offers.clear();
        shadow_.solutions.clear();
        shadow_objectives_.clear();
        shadow_candidate_.reset();
        table_cache_.reset();
        shadow_.phase = ledger::Phase::Receive;
        shadow_.phase_started_at = r.time;
        shadow_.cycle += 1;
    }

    // Validates the k-th finalization against the event log: reported winner
    // and objective are optimal, and the emitted allocation is feasible.
    void check_finalized_cycle(const ledger::OpRecord& r, std::size_t k) {
        std::size_t seen = 0;
        std::size_t idx = events_.size();
        for (std::size_t i = 0; i < events_.size(); ++i) {
            if (events_[i].kind == ledger::EventKind::CycleFinalized && seen++ == k) {
                idx = i;
                break;
            }
        }
        if (idx == events_.size()) {
            fail("candidate-optimality", r.seq, "no CycleFinalized event for this finalize");
            return;
        }
        const ledger::Event& fin = events_[idx];

        // recompute every solution's objective from scratch and cross-check
        // the incremental shadow accounting drifted nowhere
        OfferTable table = cached_table();
        std::int64_t best_obj = 0;
        for (const auto& [id, sol] : shadow_.solutions) {
            std::int64_t obj = 0;
            try {
                obj = objective(Allocation{sol.assignments}, table, shadow_.objective_spec);
            } catch (const Error&) {
                fail("candidate-optimality", r.seq, "accepted assignments unscorable");
                return;
            }
            if (obj != shadow_objectives_[id]) {
                fail("candidate-optimality", r.seq,
                     "incremental objective of solution " + std::to_string(id) +
                         " diverges from the from-scratch value");
                return;
            }
            best_obj = std::max(best_obj, obj);
        }

        std::optional<SolutionId> expected_winner;
        std::int64_t expected_obj = 0;
        if (shadow_candidate_) {
            expected_winner = shadow_candidate_->first;
            expected_obj = shadow_candidate_->second;
        }
        if (expected_obj != best_obj) {
            fail("candidate-optimality", r.seq,
                 "candidate objective " + std::to_string(expected_obj) +
                     " is not the maximum " + std::to_string(best_obj));
            return;
        }
        std::int64_t reported = fin.objective.value_or(0);
        if (fin.winner != expected_winner || reported != expected_obj) {
            fail("candidate-optimality", r.seq,
                 "finalized (winner, objective) differs from the tracked candidate");
            return;
        }

        // gather the finalized assignments emitted just before CycleFinalized
        std::vector<Assignment> emitted;
        std::size_t j = idx;
        while (j > 0 && events_[j - 1].kind == ledger::EventKind::AssignmentFinalized) --j;
        for (; j < idx; ++j) emitted.push_back(events_[j].assignment());

        if (fin.winner) {
            auto it = shadow_.solutions.find(*fin.winner);
            if (it == shadow_.solutions.end()) {
                fail("finalized-feasibility", r.seq, "winner not among submitted solutions");
                return;
            }
            if (emitted != it->second.assignments) {
                fail("finalized-feasibility", r.seq,
                     "AssignmentFinalized events differ from the winning solution");
                return;
            }
        } else if (!emitted.empty()) {
            fail("finalized-feasibility", r.seq, "assignments finalized without a winner");
            return;
        }

        FeasibilityVerdict verdict = check_allocation(table, Allocation{emitted},
                                                      shadow_.constraints,
                                                      shadow_.params.precision);
        if (!verdict.feasible)
            fail("finalized-feasibility", r.seq,
                 "finalized allocation violates " +
                     std::string(to_string(verdict.violations.front().tag)));
    }

    bool authorized(ActorId caller) const {
        return !shadow_.params.director || caller == *shadow_.params.director;
    }

    const OfferTable& cached_table() {
        if (!table_cache_) table_cache_ = shadow_.offer_table();
        return *table_cache_;
    }

    // Deadlock-freedom probe: replay the full log, then check that advancing
    // logical time enables at least one accepted transition from the final
    // state.
    void probe_progress() {
        ledger::Contract ref;
        Tick max_time = 0;
        for (const ledger::OpRecord& r : ops_) {
            ledger::apply_op(ref, r);
            max_time = std::max(max_time, r.time);
        }
        const ledger::ContractState& st = ref.state();
        ActorId caller = st.params.director.value_or(1);
        Tick later = std::max(max_time, st.phase_started_at) +
                     std::max<Tick>(1, std::max(st.params.length_receive, st.params.length_solve));
        ledger::Contract probe = ref;
        bool ok = false;
        switch (st.phase) {
            case ledger::Phase::Init: {
                ledger::ContractParams p;
                p.num_types = 1;
                p.precision = 1000;
                p.max_quantity = 10;
                p.length_receive = 1;
                p.length_solve = 1;
                ok = probe.setup(caller, later, p, ObjectiveSpec{}, ConstraintSet{}).ok();
                break;
            }
            case ledger::Phase::Receive:
                ok = probe.close(caller, later).ok();
                break;
            case ledger::Phase::Solve:
                ok = probe.finalize(caller, later).ok();
                break;
        }
        if (!ok)
            fail("P1-progress", ops_.empty() ? 0 : ops_.back().seq,
                 "no transition accepted from the final state after advancing time");
    }

    const std::vector<ledger::OpRecord>& ops_;
    const std::vector<ledger::Event>& events_;
    Shadow shadow_;
    std::optional<OfferTable> table_cache_;
    std::map<SolutionId, std::int64_t> shadow_objectives_;
    std::optional<std::pair<SolutionId, std::int64_t>> shadow_candidate_;
    std::map<std::string, PropertyResult> results_;
    std::map<std::string, int> order_;
};

}  // namespace detail

inline TraceReport check_trace(const std::vector<ledger::OpRecord>& ops,
                               const std::vector<ledger::Event>& events) {
    detail::Checker checker(ops, events);
    return checker.run();
}

// Convenience overload: regenerate the event stream by replaying the ops
// through a reference contract.
inline TraceReport check_trace(const std::vector<ledger::OpRecord>& ops) {
    ledger::Contract ref;
    for (const ledger::OpRecord& r : ops) ledger::apply_op(ref, r);
    return check_trace(ops, ref.events());
}

}  // namespace agora::audit
