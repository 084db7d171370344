#pragma once

// Independent arbitrary-precision feasibility oracle used only by tests.
// Evaluates the exact rational convex-budget sums and the reservation-price,
// price-bound, pairwise and system-limit rules directly from their
// definitions, with no fixed-point rounding and no shared code with the
// production verifier.

#include <map>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include "agora/types.hpp"

namespace oracle {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::rational<BigInt>;

// Exact check of the rational capacity constraints: for every offer, the sum
// of a_Q / o_Q(a_T) over assignments referencing it stays <= 1.
inline bool capacity_ok(const agora::OfferTable& offers, const agora::Allocation& alloc) {
    std::map<agora::OfferId, BigRat> provider_sum;
    std::map<agora::OfferId, BigRat> consumer_sum;
    for (const agora::Assignment& a : alloc.assignments) {
        auto pit = offers.find(a.providing_offer);
        auto cit = offers.find(a.consuming_offer);
        if (pit == offers.end() || cit == offers.end()) return false;
        std::uint64_t pq = pit->second.quantity_of(a.rtype);
        std::uint64_t cq = cit->second.quantity_of(a.rtype);
        if (pq == 0 || cq == 0) return a.quantity == 0;
        provider_sum[a.providing_offer] += BigRat(BigInt(a.quantity), BigInt(pq));
        consumer_sum[a.consuming_offer] += BigRat(BigInt(a.quantity), BigInt(cq));
    }
    for (const auto& [id, s] : provider_sum)
        if (s > BigRat(1)) return false;
    for (const auto& [id, s] : consumer_sum)
        if (s > BigRat(1)) return false;
    return true;
}

inline bool feasible(const agora::OfferTable& offers, const agora::Allocation& alloc,
                     const agora::ConstraintSet& constraints) {
    if (!capacity_ok(offers, alloc)) return false;
    std::map<agora::ResourceType, BigInt> per_type;
    for (const agora::Assignment& a : alloc.assignments) {
        auto pit = offers.find(a.providing_offer);
        auto cit = offers.find(a.consuming_offer);
        if (pit == offers.end() || cit == offers.end()) return false;
        const agora::Offer& prov = pit->second;
        const agora::Offer& cons = cit->second;
        if (prov.side != agora::Side::Providing || cons.side != agora::Side::Consuming)
            return false;
        if (a.unit_price < prov.price_of(a.rtype)) return false;
        if (a.unit_price > cons.price_of(a.rtype)) return false;
        if (auto lo = constraints.price_min.find(a.rtype);
            lo != constraints.price_min.end() && a.unit_price < lo->second)
            return false;
        if (auto hi = constraints.price_max.find(a.rtype);
            hi != constraints.price_max.end() && a.unit_price > hi->second)
            return false;
        if (auto pw = constraints.pairwise.find(a.rtype); pw != constraints.pairwise.end())
            if (!pw->second.count({prov.owner, cons.owner})) return false;
        per_type[a.rtype] += BigInt(a.quantity);
    }
    for (const auto& [t, total] : per_type)
        if (auto lim = constraints.system_limit.find(t);
            lim != constraints.system_limit.end() && total > BigInt(lim->second))
            return false;
    return true;
}

}  // namespace oracle
