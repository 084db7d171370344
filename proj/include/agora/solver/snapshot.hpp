#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "agora/errors.hpp"
#include "agora/ledger/events.hpp"
#include "agora/types.hpp"

namespace agora::solver {

// Frozen view of the market at the moment the offering phase closed: the
// posted (and not canceled) offers a solver may allocate between.
struct MarketSnapshot {
    std::vector<Offer> providing;  // sorted by offer id
    std::vector<Offer> consuming;
    std::uint64_t cycle = 0;
    std::uint64_t precision = 1;  // contract fixed-point scale

    bool empty() const { return providing.empty() && consuming.empty(); }

    OfferTable table() const {
        OfferTable t;
        for (const Offer& o : providing) t.emplace(o.id, o);
        for (const Offer& o : consuming) t.emplace(o.id, o);
        return t;
    }
};

// Rebuilds the posted-offer set from a contract event stream that ends at (or
// after) a Closed event. Offer events are applied in order; a CycleFinalized
// event resets the table for the next cycle. The snapshot is frozen at the
// last Closed event seen.
inline MarketSnapshot snapshot_from_events(std::span<const ledger::Event> events,
                                           std::uint64_t precision) {
    using ledger::EventKind;
    std::map<OfferId, Offer> offers;
    MarketSnapshot snap;
    bool closed_seen = false;
    bool have_seq = false;
    std::uint64_t last_seq = 0;

    for (const ledger::Event& e : events) {
        if (have_seq && e.seq <= last_seq)
            throw Error(Errc::MalformedStream, "event seq not strictly increasing");
        last_seq = e.seq;
        have_seq = true;

        switch (e.kind) {
            case EventKind::OfferCreated: {
                Offer o;
                o.id = e.offer_id.value_or(0);
                o.owner = e.actor.value_or(0);
                o.side = e.providing.value_or(true) ? Side::Providing : Side::Consuming;
                o.misc = e.misc.value_or(0);
                offers[o.id] = std::move(o);
                break;
            }
            case EventKind::OfferUpdated: {
                auto it = offers.find(e.offer_id.value_or(0));
                if (it != offers.end())
                    it->second.lines[e.rtype.value_or(0)] =
                        OfferLine{e.quantity.value_or(0), e.value.value_or(0)};
                break;
            }
            case EventKind::OfferPosted: {
                auto it = offers.find(e.offer_id.value_or(0));
                if (it != offers.end()) it->second.lifecycle = Lifecycle::Posted;
                break;
            }
            case EventKind::OfferCanceled: {
                auto it = offers.find(e.offer_id.value_or(0));
                if (it != offers.end()) it->second.lifecycle = Lifecycle::Canceled;
                break;
            }
            case EventKind::Closed: {
                snap.providing.clear();
                snap.consuming.clear();
                for (const auto& [id, o] : offers) {
                    if (o.lifecycle != Lifecycle::Posted) continue;
                    (o.side == Side::Providing ? snap.providing : snap.consuming).push_back(o);
                }
                snap.cycle = e.cycle;
                closed_seen = true;
                break;
            }
            case EventKind::CycleFinalized:
                offers.clear();
                break;
            default:
                break;
        }
    }
    if (!closed_seen) throw Error(Errc::MalformedStream, "no Closed event in stream");
    snap.precision = precision;
    return snap;
}

}  // namespace agora::solver
