#pragma once

#include <cstdint>
#include <limits>
#include <span>

#include "agora/errors.hpp"
#include "agora/types.hpp"

namespace agora {

using uint128 = unsigned __int128;

// Fixed-point usage charged against an offer's capacity budget by one
// assignment of `quantity` units on a type offering `type_quantity` units:
// ceil(quantity * precision / type_quantity). Ceiling rounding never
// understates the exact rational fraction quantity/type_quantity.
inline uint128 usage_increment_wide(std::uint64_t quantity, std::uint64_t precision,
                                    std::uint64_t type_quantity) {
    if (quantity == 0) return 0;
    uint128 prod = uint128(quantity) * precision;
    return (prod + type_quantity - 1) / type_quantity;
}

// 64-bit variant used by the public usage() operation. Throws Overflow when
// quantity * precision does not fit 64 bits (the contract's setup guard
// precision * maxQuantity < 2^63 rules this out for contract-sized inputs).
inline std::uint64_t usage_increment(std::uint64_t quantity, std::uint64_t precision,
                                     std::uint64_t type_quantity) {
    if (type_quantity == 0) throw Error(Errc::ZeroQuantityType, "type has zero offered quantity");
    uint128 inc = usage_increment_wide(quantity, precision, type_quantity);
    if (uint128(quantity) * precision > std::numeric_limits<std::uint64_t>::max())
        throw Error(Errc::Overflow, "quantity * precision exceeds 64-bit range");
    return static_cast<std::uint64_t>(inc);
}

// Total fixed-point usage of `offer` by assignments that reference it on its
// own side. The result's numerator must stay <= precision for the offer's
// convex capacity budget to hold.
inline ScaledFraction usage(const Offer& offer, std::span<const Assignment> assignments,
                            std::uint64_t precision) {
    std::uint64_t total = 0;
    for (const Assignment& a : assignments) {
        std::uint64_t tq = offer.quantity_of(a.rtype);
        if (tq == 0) throw Error(Errc::ZeroQuantityType, "assignment targets a type with o_Q(t)=0");
        std::uint64_t inc = usage_increment(a.quantity, precision, tq);
        if (total > std::numeric_limits<std::uint64_t>::max() - inc)
            throw Error(Errc::Overflow, "usage sum exceeds 64-bit range");
        total += inc;
    }
    return ScaledFraction{total, precision};
}

// Full feasibility verdict for an allocation against an offer table:
//   - per-offer convex capacity budgets under the fixed-point usage rule,
//   - provider and consumer reservation prices,
//   - optional price bounds, pairwise sets, and system-wide limits.
// Total function: malformed references become violations, never errors.
inline FeasibilityVerdict check_allocation(const OfferTable& offers, const Allocation& alloc,
                                           const ConstraintSet& constraints,
                                           std::uint64_t precision) {
    FeasibilityVerdict verdict;
    auto flag = [&](ConstraintTag tag, std::size_t idx) {
        verdict.violations.push_back(Violation{tag, idx});
    };

    std::map<OfferId, uint128> provider_used;
    std::map<OfferId, uint128> consumer_used;
    std::map<ResourceType, uint128> per_type_total;
    // budget-style constraints are flagged once, at the assignment that
    // first crosses the budget
    std::set<OfferId> provider_flagged, consumer_flagged;
    std::set<ResourceType> limit_flagged;

    for (std::size_t i = 0; i < alloc.assignments.size(); ++i) {
        const Assignment& a = alloc.assignments[i];

        auto pit = offers.find(a.providing_offer);
        auto cit = offers.find(a.consuming_offer);
        bool refs_ok = true;
        if (pit == offers.end()) {
            flag(ConstraintTag::UnknownOffer, i);
            refs_ok = false;
        } else if (pit->second.side != Side::Providing) {
            flag(ConstraintTag::WrongSide, i);
            refs_ok = false;
        }
        if (cit == offers.end()) {
            flag(ConstraintTag::UnknownOffer, i);
            refs_ok = false;
        } else if (cit->second.side != Side::Consuming) {
            flag(ConstraintTag::WrongSide, i);
            refs_ok = false;
        }
        if (!refs_ok) continue;

        const Offer& prov = pit->second;
        const Offer& cons = cit->second;

        // Convex capacity budgets: a type absent or offered at zero quantity has
        // no capacity at all, so any positive assignment on it overflows.
        std::uint64_t pq = prov.quantity_of(a.rtype);
        if (pq == 0) {
            if (a.quantity > 0 && provider_flagged.insert(a.providing_offer).second)
                flag(ConstraintTag::ProviderCapacity, i);
        } else {
            provider_used[a.providing_offer] += usage_increment_wide(a.quantity, precision, pq);
            if (provider_used[a.providing_offer] > precision &&
                provider_flagged.insert(a.providing_offer).second)
                flag(ConstraintTag::ProviderCapacity, i);
        }
        std::uint64_t cq = cons.quantity_of(a.rtype);
        if (cq == 0) {
            if (a.quantity > 0 && consumer_flagged.insert(a.consuming_offer).second)
                flag(ConstraintTag::ConsumerCapacity, i);
        } else {
            consumer_used[a.consuming_offer] += usage_increment_wide(a.quantity, precision, cq);
            if (consumer_used[a.consuming_offer] > precision &&
                consumer_flagged.insert(a.consuming_offer).second)
                flag(ConstraintTag::ConsumerCapacity, i);
        }

        // Reservation prices: providers sell at or above theirs, consumers
        // buy at or below theirs.
        if (pq > 0 && a.unit_price < prov.price_of(a.rtype))
            flag(ConstraintTag::ProviderReservation, i);
        if (cq > 0 && a.unit_price > cons.price_of(a.rtype))
            flag(ConstraintTag::ConsumerReservation, i);

        // Regulator price bounds.
        auto lo = constraints.price_min.find(a.rtype);
        auto hi = constraints.price_max.find(a.rtype);
        if ((lo != constraints.price_min.end() && a.unit_price < lo->second) ||
            (hi != constraints.price_max.end() && a.unit_price > hi->second))
            flag(ConstraintTag::PriceBound, i);

        // Pairwise exchange restrictions.
        auto pw = constraints.pairwise.find(a.rtype);
        if (pw != constraints.pairwise.end() && !pw->second.count({prov.owner, cons.owner}))
            flag(ConstraintTag::Pairwise, i);

        // System-wide per-type limit.
        per_type_total[a.rtype] += a.quantity;
        auto lim = constraints.system_limit.find(a.rtype);
        if (lim != constraints.system_limit.end() && per_type_total[a.rtype] > lim->second &&
            limit_flagged.insert(a.rtype).second)
            flag(ConstraintTag::SystemLimit, i);
    }

    verdict.feasible = verdict.violations.empty();
    return verdict;
}

}  // namespace agora
