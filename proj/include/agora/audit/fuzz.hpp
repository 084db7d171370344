#pragma once

// Randomized operation-sequence fuzzer for the verifying contract. Each
// iteration drives a fresh contract through one or more market cycles with a
// mix of well-formed and deliberately violating operations (each feasibility
// rule has a dedicated mutation class), then checks atomicity of rejections
// and the full trace-property suite. Finalized allocations are handed to an
// optional callback so callers can apply an independent feasibility oracle.

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "agora/audit/script.hpp"
#include "agora/audit/trace_check.hpp"
#include "agora/ledger/canonical.hpp"

namespace agora::audit {

struct FinalizedCycle {
    OfferTable offers;                     // posted table at finalize time
    Allocation winner;                     // the finalized allocation
    std::vector<Allocation> solutions;     // every submitted solution
    ConstraintSet constraints;
    std::uint64_t precision = 1;
};

struct FuzzConfig {
    std::uint64_t seed = 1;
    std::uint64_t iterations = 1000;
    double atomicity_sample = 0.2;  // fraction of rejected ops hash-checked
    std::function<void(const FinalizedCycle&)> on_finalized;
};

struct FuzzStats {
    std::uint64_t sequences = 0;
    std::uint64_t ops = 0;
    std::uint64_t accepted = 0;
    std::uint64_t rejected = 0;
    std::uint64_t finalized_cycles = 0;
    std::uint64_t nonempty_finalizes = 0;
    std::uint64_t atomicity_checks = 0;
    std::map<std::string, std::uint64_t> rejects_by_code;
};

struct FuzzResult {
    bool ok = true;
    std::string failed_property;
    std::string detail;
    std::uint64_t failing_seed = 0;
    FuzzStats stats;
    std::vector<ledger::OpRecord> counterexample;  // minimized argument script
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4568bull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class ScriptGen {
public:
    explicit ScriptGen(std::uint64_t seed) : eng_(seed) {}

    std::vector<ledger::OpRecord> generate() {
        std::vector<ledger::OpRecord> script;
        params_ = random_params();
        objective_ = random_objective();
        constraints_ = random_constraints();

        if (chance(0.05)) push_junk(script);  // pre-setup noise, must reject

        ledger::OpRecord setup;
        setup.op = ledger::OpKind::Setup;
        setup.caller = director();
        setup.params = params_;
        setup.objective_spec = objective_;
        setup.constraints = constraints_;
        push(script, setup);

        int cycles = int(u64(1, 2));
        for (int c = 0; c < cycles; ++c) cycle(script);
        return script;
    }

private:
    using R = ledger::OpRecord;

    ActorId director() const { return 1; }
    ActorId prosumer() { return 100 + u64(0, 3); }
    ActorId solver() { return 200 + u64(0, 1); }

    std::uint64_t u64(std::uint64_t lo, std::uint64_t hi) { return lo + eng_() % (hi - lo + 1); }
    bool chance(double p) { return double(eng_() >> 11) / double(1ull << 53) < p; }

    ledger::ContractParams random_params() {
        ledger::ContractParams p;
        p.num_types = u64(1, 4);
        p.precision = chance(0.5) ? 1000 : 1'000'000;
        p.max_quantity = u64(1, 8);
        p.length_receive = u64(1, 3);
        p.length_solve = u64(1, 3);
        if (chance(0.5)) p.director = director();
        return p;
    }

    ObjectiveSpec random_objective() {
        ObjectiveSpec s;
        switch (u64(0, 2)) {
            case 0: s.kind = ObjectiveKind::TotalQuantity; break;
            case 1: s.kind = ObjectiveKind::TotalBenefit; break;
            default:
                s.kind = ObjectiveKind::WeightedQuantity;
                for (std::uint64_t t = 1; t <= 4; ++t)
                    if (chance(0.75)) s.weights[t] = u64(0, 5);
                if (s.weights.empty()) s.weights[1] = 1;
        }
        return s;
    }

    ConstraintSet random_constraints() {
        ConstraintSet c;
        if (chance(0.3)) {
            std::uint64_t t = u64(1, 4);
            c.price_min[t] = u64(1, 4);
            c.price_max[t] = u64(5, 10);
        }
        if (chance(0.25)) {
            std::uint64_t t = u64(1, 4);
            for (int i = 0; i < 4; ++i)
                if (chance(0.6)) c.pairwise[t].insert({100 + u64(0, 3), 100 + u64(0, 3)});
        }
        if (chance(0.3)) c.system_limit[u64(1, 4)] = u64(1, 10);
        return c;
    }

    void push(std::vector<R>& script, R r) {
        r.time = now_ += u64(1, 2);
        script.push_back(std::move(r));
    }

    void push_junk(std::vector<R>& script) {
        R r;
        switch (u64(0, 3)) {
            case 0: r.op = ledger::OpKind::CreateOffer; r.providing = chance(0.5); break;
            case 1: r.op = ledger::OpKind::CreateSolution; break;
            case 2: r.op = ledger::OpKind::Close; break;
            default: r.op = ledger::OpKind::Finalize; break;
        }
        r.caller = chance(0.5) ? prosumer() : director();
        r.misc = 0;
        push(script, r);
    }

    struct GenOffer {
        std::uint64_t id = 0;
        ActorId owner = 0;
        bool providing = true;
        bool likely_posted = false;
        bool likely_canceled = false;
        std::map<ResourceType, OfferLine> lines;  // updates that probably landed
    };

    void cycle(std::vector<R>& script) {
        int offers = int(u64(2, 6));
        std::vector<GenOffer> created;
        for (int i = 0; i < offers; ++i) {
            ActorId owner = prosumer();
            R create;
            create.op = ledger::OpKind::CreateOffer;
            create.caller = owner;
            create.providing = chance(0.5);
            create.misc = u64(0, 9);
            push(script, create);
            GenOffer g;
            g.id = next_offer_id_++;
            g.owner = owner;
            g.providing = *create.providing;

            int updates = int(u64(1, 3));
            for (int k = 0; k < updates; ++k) {
                R up;
                up.op = ledger::OpKind::UpdateOffer;
                bool right_owner = chance(0.9);
                bool sane_quantity = chance(0.9);
                up.caller = right_owner ? owner : prosumer();
                up.offer_id = chance(0.95) ? g.id : u64(0, 9);
                up.rtype = u64(1, 4);
                up.quantity = sane_quantity ? u64(1, params_.max_quantity)
                                            : params_.max_quantity + u64(1, 3);
                // providers ask low, consumers bid high, so bands often overlap
                up.value = g.providing ? u64(1, 6) : u64(5, 10);
                push(script, up);
                if (right_owner && sane_quantity && up.offer_id == g.id &&
                    g.lines.size() < params_.num_types)
                    g.lines[*up.rtype] = OfferLine{*up.quantity, *up.value};
            }
            if (chance(0.9)) {
                R post;
                post.op = ledger::OpKind::PostOffer;
                bool right_owner = chance(0.92);
                post.caller = right_owner ? owner : prosumer();
                post.offer_id = g.id;
                push(script, post);
                if (right_owner && !g.lines.empty()) g.likely_posted = true;
                if (chance(0.1)) push(script, post);  // double post attempt
            }
            if (chance(0.15)) {
                R cancel;
                cancel.op = ledger::OpKind::CancelOffer;
                bool right_owner = chance(0.9);
                cancel.caller = right_owner ? owner : prosumer();
                cancel.offer_id = chance(0.9) ? g.id : u64(0, 9);
                push(script, cancel);
                if (right_owner && cancel.offer_id == g.id && g.likely_posted)
                    g.likely_canceled = true;
            }
            created.push_back(std::move(g));
        }

        if (chance(0.15)) {  // too-early close attempt
            R early;
            early.op = ledger::OpKind::Close;
            early.caller = director();
            early.time = now_;  // same tick as the last op; guard may reject
            script.push_back(early);
        }
        R close;
        close.op = ledger::OpKind::Close;
        close.caller = chance(0.9) ? director() : prosumer();
        close.time = now_ = cycle_start_hint();
        script.push_back(close);
        if (!params_.director && close.caller != director()) {
            // without a director anyone may close; nothing to fix up
        } else if (params_.director && close.caller != *params_.director && chance(1.0)) {
            // ensure the cycle still progresses after the rejected attempt
            R retry = close;
            retry.caller = *params_.director;
            push(script, retry);
        }

        // offers posted in solve phase must be rejected; throw a few in
        if (!created.empty() && chance(0.4)) {
            R late;
            late.op = chance(0.5) ? ledger::OpKind::PostOffer : ledger::OpKind::CancelOffer;
            late.caller = created[0].owner;
            late.offer_id = created[0].id;
            push(script, late);
        }

        // matchable (provider, consumer, common type) pool for plausible adds
        struct Match {
            std::uint64_t prov, cons;
            ResourceType rtype;
            std::uint64_t prov_value, cons_value;
        };
        std::vector<Match> matches;
        for (const GenOffer& p : created) {
            if (!p.providing || !p.likely_posted || p.likely_canceled) continue;
            for (const GenOffer& c : created) {
                if (c.providing || !c.likely_posted || c.likely_canceled) continue;
                for (const auto& [t, pl] : p.lines)
                    if (auto it = c.lines.find(t); it != c.lines.end())
                        matches.push_back({p.id, c.id, t, pl.unit_price, it->second.unit_price});
            }
        }

        int solutions = int(u64(0, 3));
        for (int s = 0; s < solutions; ++s) {
            ActorId creator = solver();
            R cs;
            cs.op = ledger::OpKind::CreateSolution;
            cs.caller = creator;
            cs.misc = u64(0, 9);
            push(script, cs);
            std::uint64_t sid = next_solution_id_++;

            int adds = int(u64(1, 6));
            for (int a = 0; a < adds; ++a) {
                R add;
                add.op = ledger::OpKind::AddAssignment;
                add.caller = chance(0.9) ? creator : solver();
                add.solution_id = chance(0.95) ? sid : u64(0, 5);
                if (!matches.empty() && chance(0.7)) {
                    // plausible: a matched pair with a price inside the band
                    const Match& m = matches[u64(0, matches.size() - 1)];
                    add.providing_offer = m.prov;
                    add.consuming_offer = m.cons;
                    add.rtype = m.rtype;
                    add.quantity = u64(1, params_.max_quantity);
                    add.value = m.prov_value <= m.cons_value
                                    ? u64(m.prov_value, m.cons_value)
                                    : u64(1, 10);
                } else {
                    add.providing_offer = u64(0, std::max<std::uint64_t>(1, next_offer_id_) - 1);
                    add.consuming_offer = u64(0, std::max<std::uint64_t>(1, next_offer_id_) - 1);
                    add.rtype = u64(1, 5);
                    add.quantity = u64(1, params_.max_quantity);
                    add.value = u64(1, 10);
                }
                // mutation classes on top: quantity over the capacity
                // budget, price below the provider or above the consumer
                // reservation, price outside regulator bounds, zero quantity
                switch (u64(0, 9)) {
                    case 0: add.quantity = params_.max_quantity * u64(2, 4); break;
                    case 1: add.quantity = 0; break;
                    default: break;
                }
                switch (u64(0, 9)) {
                    case 0: add.value = 0; break;
                    case 1: add.value = u64(11, 20); break;
                    default: break;
                }
                push(script, add);
            }
        }

        if (chance(0.15)) {  // too-early finalize attempt
            R early;
            early.op = ledger::OpKind::Finalize;
            early.caller = director();
            early.time = now_;
            script.push_back(early);
        }
        R fin;
        fin.op = ledger::OpKind::Finalize;
        fin.caller = director();
        fin.time = now_ = cycle_start_hint();
        script.push_back(fin);

        next_offer_id_ = 0;
        next_solution_id_ = 0;
    }

    // A tick far enough ahead to satisfy any phase-length guard drawn above.
    Tick cycle_start_hint() { return now_ + 4 + u64(0, 2); }

    std::mt19937_64 eng_;
    ledger::ContractParams params_;
    ObjectiveSpec objective_;
    ConstraintSet constraints_;
    Tick now_ = 0;
    std::uint64_t next_offer_id_ = 0;
    std::uint64_t next_solution_id_ = 0;
};

// Extracts every finalized cycle (offer table, winner, all submitted
// solutions) from a trace for external oracle checks.
inline void for_each_finalized(const std::vector<ledger::OpRecord>& ops,
                               const std::function<void(const FinalizedCycle&)>& fn) {
    if (!fn) return;
    ledger::Contract ref;
    for (const ledger::OpRecord& r : ops) {
        FinalizedCycle cycle;
        if (r.op == ledger::OpKind::Finalize) {
            cycle.offers = ref.state().offers;
            for (const auto& [id, sol] : ref.state().solutions)
                cycle.solutions.push_back(Allocation{sol.assignments});
            cycle.constraints = ref.state().constraints;
            cycle.precision = ref.state().params.precision;
        }
        ledger::OpResult res = ledger::apply_op(ref, r);
        if (r.op == ledger::OpKind::Finalize && res.ok()) {
            for (const ledger::Event& e : res.events)
                if (e.kind == ledger::EventKind::AssignmentFinalized)
                    cycle.winner.assignments.push_back(e.assignment());
            fn(cycle);
        }
    }
}

// Greedy one-pass-at-a-time shrink: drop ops while the same property fails.
inline std::vector<ledger::OpRecord> minimize_counterexample(
    std::vector<ledger::OpRecord> script, const std::string& property,
    ledger::GuardOverrides faults = {}) {
    auto still_fails = [&](const std::vector<ledger::OpRecord>& s) {
        ScriptResult res = run_script(s, faults);
        TraceReport rep = check_trace(res.ops, res.events);
        const PropertyResult* p = rep.find(property);
        return p && !p->passed;
    };
    bool shrunk = true;
    while (shrunk) {
        shrunk = false;
        for (std::size_t i = script.size(); i-- > 0;) {
            std::vector<ledger::OpRecord> smaller = script;
            smaller.erase(smaller.begin() + i);
            if (still_fails(smaller)) {
                script = std::move(smaller);
                shrunk = true;
            }
        }
    }
    return script;
}

}  // namespace detail

inline FuzzResult run_fuzz(const FuzzConfig& config) {
    FuzzResult result;
    std::uint64_t mix = config.seed;
    for (std::uint64_t iter = 0; iter < config.iterations; ++iter) {
        std::uint64_t seq_seed = detail::splitmix64(mix);
        detail::ScriptGen gen(seq_seed);
        std::vector<ledger::OpRecord> script = gen.generate();

        // apply with atomicity spot-checks on rejected operations
        ledger::Contract contract;
        std::vector<ledger::OpRecord> ops;
        std::mt19937_64 sample_rng(seq_seed ^ 0xa70a1c17ull);
        std::uint64_t seq = 0;
        for (ledger::OpRecord r : script) {
            r.seq = seq++;
            bool check_atomicity =
                double(sample_rng() >> 11) / double(1ull << 53) < config.atomicity_sample;
            std::string before;
            if (check_atomicity) before = ledger::state_hash(contract);
            ledger::OpResult res = ledger::apply_op(contract, r);
            r.outcome = res.outcome();
            if (res.ok() && (r.op == ledger::OpKind::CreateOffer ||
                             r.op == ledger::OpKind::CreateSolution))
                r.result_id = res.id;
            ++result.stats.ops;
            if (res.ok()) {
                ++result.stats.accepted;
            } else {
                ++result.stats.rejected;
                ++result.stats.rejects_by_code[r.outcome];
            }
            if (check_atomicity && !res.ok()) {
                ++result.stats.atomicity_checks;
                if (ledger::state_hash(contract) != before) {
                    result.ok = false;
                    result.failed_property = "atomicity";
                    result.detail = "rejected op mutated state, seed " + std::to_string(seq_seed);
                }
            }
            if (res.ok() && r.op == ledger::OpKind::Finalize) {
                ++result.stats.finalized_cycles;
                if (res.events.size() > 1) ++result.stats.nonempty_finalizes;
            }
            ops.push_back(std::move(r));
            if (!result.ok) break;
        }
        ++result.stats.sequences;
        if (!result.ok) {
            result.failing_seed = seq_seed;
            result.counterexample = script;
            return result;
        }

        TraceReport report = check_trace(ops, contract.events());
        if (!report.all_passed()) {
            result.ok = false;
            result.failed_property = report.failed_names().front();
            result.detail = report.find(result.failed_property)->detail;
            result.failing_seed = seq_seed;
            result.counterexample = detail::minimize_counterexample(
                script, result.failed_property);
            return result;
        }

        detail::for_each_finalized(ops, config.on_finalized);
    }
    return result;
}

}  // namespace agora::audit
