#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "agora/errors.hpp"
#include "agora/serde.hpp"
#include "agora/types.hpp"

namespace agora::ledger {

enum class EventKind {
    OfferCreated,
    OfferUpdated,
    OfferPosted,
    OfferCanceled,
    Closed,
    SolutionCreated,
    AssignmentAdded,
    AssignmentFinalized,
    CycleFinalized,
};

inline const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::OfferCreated: return "OfferCreated";
        case EventKind::OfferUpdated: return "OfferUpdated";
        case EventKind::OfferPosted: return "OfferPosted";
        case EventKind::OfferCanceled: return "OfferCanceled";
        case EventKind::Closed: return "Closed";
        case EventKind::SolutionCreated: return "SolutionCreated";
        case EventKind::AssignmentAdded: return "AssignmentAdded";
        case EventKind::AssignmentFinalized: return "AssignmentFinalized";
        case EventKind::CycleFinalized: return "CycleFinalized";
    }
    return "?";
}

inline EventKind event_kind_from_string(const std::string& s) {
    if (s == "OfferCreated") return EventKind::OfferCreated;
    if (s == "OfferUpdated") return EventKind::OfferUpdated;
    if (s == "OfferPosted") return EventKind::OfferPosted;
    if (s == "OfferCanceled") return EventKind::OfferCanceled;
    if (s == "Closed") return EventKind::Closed;
    if (s == "SolutionCreated") return EventKind::SolutionCreated;
    if (s == "AssignmentAdded") return EventKind::AssignmentAdded;
    if (s == "AssignmentFinalized") return EventKind::AssignmentFinalized;
    if (s == "CycleFinalized") return EventKind::CycleFinalized;
    throw Error(Errc::ParseError, "unknown event kind: " + s);
}

// One contract event. The event stream is the audit record: it fully
// determines contract state and is all that off-ledger solvers see, so
// offer events carry owner, side, and line data.
struct Event {
    std::uint64_t seq = 0;
    std::uint64_t cycle = 0;
    Tick time = 0;
    EventKind kind = EventKind::OfferCreated;

    std::optional<OfferId> offer_id;
    std::optional<SolutionId> solution_id;
    std::optional<ActorId> actor;  // offer owner / solution creator
    std::optional<bool> providing;
    std::optional<std::uint64_t> misc;
    std::optional<ResourceType> rtype;
    std::optional<std::uint64_t> quantity;
    std::optional<std::uint64_t> value;
    std::optional<OfferId> providing_offer;
    std::optional<OfferId> consuming_offer;
    std::optional<SolutionId> winner;      // CycleFinalized; empty = no candidate
    std::optional<std::int64_t> objective; // CycleFinalized

    Assignment assignment() const {
        return Assignment{providing_offer.value_or(0), consuming_offer.value_or(0),
                          rtype.value_or(0), quantity.value_or(0), value.value_or(0)};
    }

    friend bool operator==(const Event&, const Event&) = default;
};

// Fixed field order: seq, cycle, time, kind, then payload fields.
inline nlohmann::ordered_json event_to_json(const Event& e) {
    nlohmann::ordered_json j;
    j["seq"] = e.seq;
    j["cycle"] = e.cycle;
    j["time"] = e.time;
    j["kind"] = to_string(e.kind);
    if (e.offer_id) j["offer_id"] = *e.offer_id;
    if (e.solution_id) j["solution_id"] = *e.solution_id;
    if (e.actor) j["actor"] = *e.actor;
    if (e.providing) j["providing"] = *e.providing;
    if (e.misc) j["misc"] = u64_str(*e.misc);
    if (e.rtype) j["rtype"] = u64_str(*e.rtype);
    if (e.quantity) j["quantity"] = u64_str(*e.quantity);
    if (e.value) j["value"] = u64_str(*e.value);
    if (e.providing_offer) j["providing_offer"] = *e.providing_offer;
    if (e.consuming_offer) j["consuming_offer"] = *e.consuming_offer;
    if (e.kind == EventKind::CycleFinalized) {
        if (e.winner)
            j["winner"] = *e.winner;
        else
            j["winner"] = nullptr;
        j["objective"] = *e.objective;
    }
    return j;
}

inline Event event_from_json(const nlohmann::json& j) {
    Event e;
    e.seq = j.at("seq").get<std::uint64_t>();
    e.cycle = j.at("cycle").get<std::uint64_t>();
    e.time = j.at("time").get<Tick>();
    e.kind = event_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("offer_id")) e.offer_id = j.at("offer_id").get<OfferId>();
    if (j.contains("solution_id")) e.solution_id = j.at("solution_id").get<SolutionId>();
    if (j.contains("actor")) e.actor = j.at("actor").get<ActorId>();
    if (j.contains("providing")) e.providing = j.at("providing").get<bool>();
    if (j.contains("misc")) e.misc = u64_from_json(j.at("misc"));
    if (j.contains("rtype")) e.rtype = u64_from_json(j.at("rtype"));
    if (j.contains("quantity")) e.quantity = u64_from_json(j.at("quantity"));
    if (j.contains("value")) e.value = u64_from_json(j.at("value"));
    if (j.contains("providing_offer")) e.providing_offer = j.at("providing_offer").get<OfferId>();
    if (j.contains("consuming_offer")) e.consuming_offer = j.at("consuming_offer").get<OfferId>();
    if (j.contains("winner") && !j.at("winner").is_null())
        e.winner = j.at("winner").get<SolutionId>();
    if (j.contains("objective")) e.objective = j.at("objective").get<std::int64_t>();
    return e;
}

}  // namespace agora::ledger
