#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agora/errors.hpp"
#include "agora/feasibility.hpp"
#include "agora/ledger/events.hpp"
#include "agora/objective.hpp"
#include "agora/types.hpp"

namespace agora::ledger {

struct ContractParams {
    std::uint64_t num_types = 0;      // max distinct resource types per offer
    std::uint64_t precision = 0;      // fixed-point scale for capacity budgets
    std::uint64_t max_quantity = 0;   // max quantity per offer line
    Tick length_receive = 0;          // min offering-phase length
    Tick length_solve = 0;            // min solving-phase length
    std::optional<ActorId> director;  // when set, only this actor may close/finalize

    bool valid() const {
        if (precision < 1 || max_quantity < 1) return false;
        if (length_receive < 1 || length_solve < 1) return false;
        // keep every quantity*precision product inside 64-bit signed range
        return uint128(precision) * uint128(max_quantity) < (uint128(1) << 63);
    }

    friend bool operator==(const ContractParams&, const ContractParams&) = default;
};

enum class Phase { Init, Receive, Solve };

inline const char* to_string(Phase p) {
    switch (p) {
        case Phase::Init: return "init";
        case Phase::Receive: return "receive";
        case Phase::Solve: return "solve";
    }
    return "?";
}

enum class Reject {
    WrongPhase,
    BadParams,
    UnknownOffer,
    NotOwner,
    AlreadyPosted,
    QuantityTooLarge,
    TooManyTypes,
    EmptyOffer,
    NotPosted,
    TooEarly,
    NotDirector,
    UnknownSolution,
    NotCreator,
    OfferNotPosted,
    WrongSide,
    TypeNotOffered,
    ZeroQuantity,
    CapacityExceeded,
    PriceBelowProviderReservation,
    PriceAboveConsumerReservation,
    PriceOutOfBounds,
    PairNotAllowed,
    SystemLimitExceeded,
    MissingWeight,
    Overflow,
};

inline const char* to_string(Reject r) {
    switch (r) {
        case Reject::WrongPhase: return "WrongPhase";
        case Reject::BadParams: return "BadParams";
        case Reject::UnknownOffer: return "UnknownOffer";
        case Reject::NotOwner: return "NotOwner";
        case Reject::AlreadyPosted: return "AlreadyPosted";
        case Reject::QuantityTooLarge: return "QuantityTooLarge";
        case Reject::TooManyTypes: return "TooManyTypes";
        case Reject::EmptyOffer: return "EmptyOffer";
        case Reject::NotPosted: return "NotPosted";
        case Reject::TooEarly: return "TooEarly";
        case Reject::NotDirector: return "NotDirector";
        case Reject::UnknownSolution: return "UnknownSolution";
        case Reject::NotCreator: return "NotCreator";
        case Reject::OfferNotPosted: return "OfferNotPosted";
        case Reject::WrongSide: return "WrongSide";
        case Reject::TypeNotOffered: return "TypeNotOffered";
        case Reject::ZeroQuantity: return "ZeroQuantity";
        case Reject::CapacityExceeded: return "CapacityExceeded";
        case Reject::PriceBelowProviderReservation: return "PriceBelowProviderReservation";
        case Reject::PriceAboveConsumerReservation: return "PriceAboveConsumerReservation";
        case Reject::PriceOutOfBounds: return "PriceOutOfBounds";
        case Reject::PairNotAllowed: return "PairNotAllowed";
        case Reject::SystemLimitExceeded: return "SystemLimitExceeded";
        case Reject::MissingWeight: return "MissingWeight";
        case Reject::Overflow: return "Overflow";
    }
    return "?";
}

// Result of one contract operation. Rejections emit nothing and leave the
// state untouched; accepted operations return the events they emitted.
struct OpResult {
    std::optional<Reject> rejected;
    std::uint64_t id = 0;  // created offer/solution id on create operations
    std::vector<Event> events;

    bool ok() const { return !rejected.has_value(); }
    std::string outcome() const { return ok() ? "ok" : to_string(*rejected); }
};

// A named in-progress allocation with incrementally maintained objective and
// fixed-point usage accumulators, so feasibility never needs batch
// revalidation.
struct Solution {
    SolutionId id = 0;
    ActorId creator = 0;
    std::uint64_t misc = 0;
    std::vector<Assignment> assignments;
    std::int64_t objective_value = 0;
    std::map<OfferId, std::uint64_t> provider_usage;   // numerators, scale = precision
    std::map<OfferId, std::uint64_t> consumer_usage;
    std::map<ResourceType, std::uint64_t> per_type_total;
};

struct ContractState {
    ContractParams params;
    ObjectiveSpec objective_spec;
    ConstraintSet constraints;
    Phase phase = Phase::Init;
    Tick phase_started_at = 0;
    std::uint64_t cycle = 0;
    std::uint64_t next_offer_id = 0;     // per-cycle; reset at finalize
    std::uint64_t next_solution_id = 0;  // per-cycle; reset at finalize
    OfferTable offers;
    std::map<SolutionId, Solution> solutions;
    std::optional<SolutionId> candidate;  // best feasible solution submitted so far
    Tick now = 0;
    std::uint64_t next_event_seq = 0;
    std::vector<Event> events;  // append-only across the contract's lifetime
};

// Guard switches for the fault-injection suite. Each flag disables one
// verification rule so tests can confirm the corresponding trace property
// catches the broken variant. All flags false in normal operation.
struct GuardOverrides {
    bool allow_post_cancel_in_solve = false;
    bool allow_post_by_non_owner = false;
    bool allow_double_post = false;
    bool allow_cancel_unposted = false;
    bool allow_create_solution_in_receive = false;
    bool skip_capacity_check = false;

    bool any() const {
        return allow_post_cancel_in_solve || allow_post_by_non_owner || allow_double_post ||
               allow_cancel_unposted || allow_create_solution_in_receive || skip_capacity_check;
    }
};

// Deterministic emulation of the verifying market contract: a three-state
// transition system (Init -> Receive <-> Solve) whose operations run in
// constant time, verify submitted assignments incrementally, and track the
// best feasible candidate solution for end-of-cycle finalization.
//
// Operations are applied one at a time in arrival order; the harness is the
// serialization point. Every mutation is deterministic in (state, args).
class Contract {
public:
    Contract() = default;
    explicit Contract(GuardOverrides faults) : faults_(faults) {}

    const ContractState& state() const { return state_; }
    const std::vector<Event>& events() const { return state_.events; }

    // Table entries read or written by the most recent operation, for the
    // constant-cost checks.
    std::uint64_t last_op_touches() const { return touches_; }

    OpResult setup(ActorId caller, Tick now, const ContractParams& params,
                   const ObjectiveSpec& objective_spec, const ConstraintSet& constraints) {
        begin_op();
        (void)caller;
        if (state_.phase != Phase::Init) return reject(Reject::WrongPhase);
        if (!params.valid() || !objective_spec.valid() || !constraints.valid())
            return reject(Reject::BadParams);

        state_.params = params;
        state_.objective_spec = objective_spec;
        state_.constraints = constraints;
        state_.phase = Phase::Receive;
        state_.phase_started_at = now;
        state_.cycle = 1;
        state_.now = now;
        return OpResult{};
    }

    OpResult create_offer(ActorId caller, Tick now, bool providing, std::uint64_t misc) {
        begin_op();
        if (state_.phase != Phase::Receive) return reject(Reject::WrongPhase);

        OfferId id = state_.next_offer_id++;
        Offer offer;
        offer.id = id;
        offer.owner = caller;
        offer.side = providing ? Side::Providing : Side::Consuming;
        offer.misc = misc;
        touch();
        state_.offers.emplace(id, std::move(offer));
        state_.now = now;

        OpResult res;
        res.id = id;
        Event e = base_event(EventKind::OfferCreated, now);
        e.offer_id = id;
        e.actor = caller;
        e.providing = providing;
        e.misc = misc;
        res.events.push_back(emit(std::move(e)));
        return res;
    }

    OpResult update_offer(ActorId caller, Tick now, OfferId id, ResourceType rtype,
                          std::uint64_t quantity, std::uint64_t value) {
        begin_op();
        if (state_.phase != Phase::Receive) return reject(Reject::WrongPhase);
        Offer* offer = find_offer(id);
        if (!offer) return reject(Reject::UnknownOffer);
        if (offer->owner != caller) return reject(Reject::NotOwner);
        if (offer->lifecycle != Lifecycle::Created) return reject(Reject::AlreadyPosted);
        if (quantity > state_.params.max_quantity) return reject(Reject::QuantityTooLarge);
        bool is_new = offer->lines.find(rtype) == offer->lines.end();
        if (is_new && offer->lines.size() >= state_.params.num_types)
            return reject(Reject::TooManyTypes);

        offer->lines[rtype] = OfferLine{quantity, value};
        state_.now = now;

        OpResult res;
        res.id = id;
        Event e = base_event(EventKind::OfferUpdated, now);
        e.offer_id = id;
        e.rtype = rtype;
        e.quantity = quantity;
        e.value = value;
        res.events.push_back(emit(std::move(e)));
        return res;
    }

    OpResult post_offer(ActorId caller, Tick now, OfferId id) {
        begin_op();
        if (state_.phase != Phase::Receive && !faults_.allow_post_cancel_in_solve)
            return reject(Reject::WrongPhase);
        if (state_.phase == Phase::Init) return reject(Reject::WrongPhase);
        Offer* offer = find_offer(id);
        if (!offer) return reject(Reject::UnknownOffer);
        if (offer->owner != caller && !faults_.allow_post_by_non_owner)
            return reject(Reject::NotOwner);
        if (offer->lifecycle != Lifecycle::Created && !faults_.allow_double_post)
            return reject(Reject::AlreadyPosted);
        if (offer->usable_types() == 0) return reject(Reject::EmptyOffer);

        offer->lifecycle = Lifecycle::Posted;
        state_.now = now;

        OpResult res;
        res.id = id;
        Event e = base_event(EventKind::OfferPosted, now);
        e.offer_id = id;
        res.events.push_back(emit(std::move(e)));
        return res;
    }

    OpResult cancel_offer(ActorId caller, Tick now, OfferId id) {
        begin_op();
        if (state_.phase != Phase::Receive && !faults_.allow_post_cancel_in_solve)
            return reject(Reject::WrongPhase);
        if (state_.phase == Phase::Init) return reject(Reject::WrongPhase);
        Offer* offer = find_offer(id);
        if (!offer) return reject(Reject::UnknownOffer);
        if (offer->owner != caller) return reject(Reject::NotOwner);
        if (offer->lifecycle != Lifecycle::Posted && !faults_.allow_cancel_unposted)
            return reject(Reject::NotPosted);

        offer->lifecycle = Lifecycle::Canceled;
        state_.now = now;

        OpResult res;
        res.id = id;
        Event e = base_event(EventKind::OfferCanceled, now);
        e.offer_id = id;
        res.events.push_back(emit(std::move(e)));
        return res;
    }

    OpResult close(ActorId caller, Tick now) {
        begin_op();
        if (state_.phase != Phase::Receive) return reject(Reject::WrongPhase);
        if (state_.params.director && caller != *state_.params.director)
            return reject(Reject::NotDirector);
        if (now < state_.phase_started_at ||
            now - state_.phase_started_at < state_.params.length_receive)
            return reject(Reject::TooEarly);

        state_.phase = Phase::Solve;
        state_.phase_started_at = now;
        state_.now = now;

        OpResult res;
        res.events.push_back(emit(base_event(EventKind::Closed, now)));
        return res;
    }

    OpResult create_solution(ActorId caller, Tick now, std::uint64_t misc) {
        begin_op();
        if (state_.phase != Phase::Solve && !faults_.allow_create_solution_in_receive)
            return reject(Reject::WrongPhase);
        if (state_.phase == Phase::Init) return reject(Reject::WrongPhase);

        SolutionId id = state_.next_solution_id++;
        Solution sol;
        sol.id = id;
        sol.creator = caller;
        sol.misc = misc;
        touch();
        state_.solutions.emplace(id, std::move(sol));
        state_.now = now;

        OpResult res;
        res.id = id;
        Event e = base_event(EventKind::SolutionCreated, now);
        e.solution_id = id;
        e.actor = caller;
        e.misc = misc;
        res.events.push_back(emit(std::move(e)));
        return res;
    }

    OpResult add_assignment(ActorId caller, Tick now, SolutionId solution_id,
                            OfferId providing_offer, OfferId consuming_offer, ResourceType rtype,
                            std::uint64_t quantity, std::uint64_t value) {
        begin_op();
        if (state_.phase != Phase::Solve) return reject(Reject::WrongPhase);
        Solution* sol = find_solution(solution_id);
        if (!sol) return reject(Reject::UnknownSolution);
        if (sol->creator != caller) return reject(Reject::NotCreator);
        if (quantity == 0) return reject(Reject::ZeroQuantity);

        Offer* prov = find_offer(providing_offer);
        if (!prov) return reject(Reject::UnknownOffer);
        Offer* cons = find_offer(consuming_offer);
        if (!cons) return reject(Reject::UnknownOffer);
        if (prov->side != Side::Providing || cons->side != Side::Consuming)
            return reject(Reject::WrongSide);
        if (prov->lifecycle != Lifecycle::Posted || cons->lifecycle != Lifecycle::Posted)
            return reject(Reject::OfferNotPosted);

        const OfferLine* prov_line = prov->line(rtype);
        const OfferLine* cons_line = cons->line(rtype);
        if (!prov_line || prov_line->quantity == 0 || !cons_line || cons_line->quantity == 0)
            return reject(Reject::TypeNotOffered);

        // Reservation prices.
        if (value < prov_line->unit_price) return reject(Reject::PriceBelowProviderReservation);
        if (value > cons_line->unit_price) return reject(Reject::PriceAboveConsumerReservation);

        // Regulator price bounds.
        auto lo = state_.constraints.price_min.find(rtype);
        if (lo != state_.constraints.price_min.end() && value < lo->second)
            return reject(Reject::PriceOutOfBounds);
        auto hi = state_.constraints.price_max.find(rtype);
        if (hi != state_.constraints.price_max.end() && value > hi->second)
            return reject(Reject::PriceOutOfBounds);

        // Pairwise exchange restriction.
        auto pw = state_.constraints.pairwise.find(rtype);
        if (pw != state_.constraints.pairwise.end() &&
            !pw->second.count({prov->owner, cons->owner}))
            return reject(Reject::PairNotAllowed);

        // System-wide per-type limit.
        auto lim = state_.constraints.system_limit.find(rtype);
        std::uint64_t type_total = 0;
        if (auto it = sol->per_type_total.find(rtype); it != sol->per_type_total.end())
            type_total = it->second;
        if (lim != state_.constraints.system_limit.end()) {
            if (uint128(type_total) + quantity > lim->second)
                return reject(Reject::SystemLimitExceeded);
        }

        // Objective increment, checked against 64-bit range.
        std::int64_t delta = 0;
        switch (state_.objective_spec.kind) {
            case ObjectiveKind::TotalQuantity: {
                if (quantity > std::uint64_t(std::numeric_limits<std::int64_t>::max()))
                    return reject(Reject::Overflow);
                delta = static_cast<std::int64_t>(quantity);
                break;
            }
            case ObjectiveKind::WeightedQuantity: {
                auto w = state_.objective_spec.weights.find(rtype);
                if (w == state_.objective_spec.weights.end())
                    return reject(Reject::MissingWeight);
                int128 d = int128(w->second) * int128(quantity);
                if (d > std::numeric_limits<std::int64_t>::max()) return reject(Reject::Overflow);
                delta = static_cast<std::int64_t>(d);
                break;
            }
            case ObjectiveKind::TotalBenefit: {
                int128 d = int128(quantity) *
                           (int128(cons_line->unit_price) - int128(prov_line->unit_price));
                if (d > std::numeric_limits<std::int64_t>::max() ||
                    d < std::numeric_limits<std::int64_t>::min())
                    return reject(Reject::Overflow);
                delta = static_cast<std::int64_t>(d);
                break;
            }
        }
        if (int128(sol->objective_value) + delta > std::numeric_limits<std::int64_t>::max())
            return reject(Reject::Overflow);

        // Convex capacity budgets, incremental fixed-point form.
        uint128 du_p = usage_increment_wide(quantity, state_.params.precision, prov_line->quantity);
        uint128 du_c = usage_increment_wide(quantity, state_.params.precision, cons_line->quantity);
        std::uint64_t used_p = 0;
        if (auto it = sol->provider_usage.find(providing_offer); it != sol->provider_usage.end())
            used_p = it->second;
        std::uint64_t used_c = 0;
        if (auto it = sol->consumer_usage.find(consuming_offer); it != sol->consumer_usage.end())
            used_c = it->second;
        if (!faults_.skip_capacity_check) {
            if (uint128(used_p) + du_p > state_.params.precision)
                return reject(Reject::CapacityExceeded);
            if (uint128(used_c) + du_c > state_.params.precision)
                return reject(Reject::CapacityExceeded);
        }

        // All checks passed; commit.
        constexpr std::uint64_t kMaxU64 = std::numeric_limits<std::uint64_t>::max();
        auto saturate = [&](std::uint64_t used, uint128 du) {
            return uint128(used) + du > kMaxU64 ? kMaxU64
                                                : used + static_cast<std::uint64_t>(du);
        };
        sol->assignments.push_back(
            Assignment{providing_offer, consuming_offer, rtype, quantity, value});
        sol->provider_usage[providing_offer] = saturate(used_p, du_p);
        sol->consumer_usage[consuming_offer] = saturate(used_c, du_c);
        sol->per_type_total[rtype] = type_total + quantity;
        sol->objective_value += delta;
        touch();
        touch();
        state_.now = now;

        // Candidate replacement on strict improvement only: ties keep the
        // incumbent, so the first solution to reach a value wins it.
        if (!state_.candidate ||
            state_.solutions.at(*state_.candidate).objective_value < sol->objective_value) {
            state_.candidate = solution_id;
        }

        OpResult res;
        res.id = solution_id;
        Event e = base_event(EventKind::AssignmentAdded, now);
        e.solution_id = solution_id;
        e.providing_offer = providing_offer;
        e.consuming_offer = consuming_offer;
        e.rtype = rtype;
        e.quantity = quantity;
        e.value = value;
        res.events.push_back(emit(std::move(e)));
        return res;
    }

    OpResult finalize(ActorId caller, Tick now) {
        begin_op();
        if (state_.phase != Phase::Solve) return reject(Reject::WrongPhase);
        if (state_.params.director && caller != *state_.params.director)
            return reject(Reject::NotDirector);
        if (now < state_.phase_started_at ||
            now - state_.phase_started_at < state_.params.length_solve)
            return reject(Reject::TooEarly);

        OpResult res;
        std::int64_t objective_value = 0;
        if (state_.candidate) {
            const Solution& winner = state_.solutions.at(*state_.candidate);
            objective_value = winner.objective_value;
            for (const Assignment& a : winner.assignments) {
                Event e = base_event(EventKind::AssignmentFinalized, now);
                e.solution_id = winner.id;
                e.providing_offer = a.providing_offer;
                e.consuming_offer = a.consuming_offer;
                e.rtype = a.rtype;
                e.quantity = a.quantity;
                e.value = a.unit_price;
                res.events.push_back(emit(std::move(e)));
                touch();
            }
        }
        Event e = base_event(EventKind::CycleFinalized, now);
        e.winner = state_.candidate;
        e.objective = objective_value;
        res.events.push_back(emit(std::move(e)));

        // Cross-cycle cleanup: prosumers re-post each cycle, ids restart.
        state_.offers = OfferTable{};
        state_.solutions = std::map<SolutionId, Solution>{};
        state_.candidate.reset();
        state_.next_offer_id = 0;
        state_.next_solution_id = 0;
        state_.cycle += 1;
        state_.phase = Phase::Receive;
        state_.phase_started_at = now;
        state_.now = now;
        return res;
    }

private:
    void begin_op() { touches_ = 0; }
    void touch() { ++touches_; }

    OpResult reject(Reject r) {
        OpResult res;
        res.rejected = r;
        return res;
    }

    Offer* find_offer(OfferId id) {
        touch();
        auto it = state_.offers.find(id);
        return it == state_.offers.end() ? nullptr : &it->second;
    }

    Solution* find_solution(SolutionId id) {
        touch();
        auto it = state_.solutions.find(id);
        return it == state_.solutions.end() ? nullptr : &it->second;
    }

    Event base_event(EventKind kind, Tick now) {
        Event e;
        e.kind = kind;
        e.cycle = state_.cycle;
        e.time = now;
        return e;
    }

    const Event& emit(Event e) {
        e.seq = state_.next_event_seq++;
        state_.events.push_back(std::move(e));
        return state_.events.back();
    }

    ContractState state_;
    GuardOverrides faults_;
    std::uint64_t touches_ = 0;
};

}  // namespace agora::ledger
