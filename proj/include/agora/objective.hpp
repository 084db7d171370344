#pragma once

#include <cstdint>
#include <limits>

#include "agora/errors.hpp"
#include "agora/types.hpp"

namespace agora {

using int128 = __int128;

namespace detail {

inline std::int64_t narrow_i64(int128 v, const char* what) {
    if (v > int128(std::numeric_limits<std::int64_t>::max()) ||
        v < int128(std::numeric_limits<std::int64_t>::min()))
        throw Error(Errc::Overflow, what);
    return static_cast<std::int64_t>(v);
}

}  // namespace detail

// Objective contribution of a single assignment:
//   TotalQuantity    -> a_Q
//   WeightedQuantity -> beta(a_T) * a_Q
//   TotalBenefit     -> a_Q * (consumer reservation - provider reservation);
//                       the assignment price cancels between the two parties,
//                       so a_V never appears.
inline std::int64_t objective_increment(const Assignment& a, const OfferTable& offers,
                                        const ObjectiveSpec& spec) {
    switch (spec.kind) {
        case ObjectiveKind::TotalQuantity:
            return detail::narrow_i64(int128(a.quantity), "objective term exceeds 64-bit range");
        case ObjectiveKind::WeightedQuantity: {
            auto w = spec.weights.find(a.rtype);
            if (w == spec.weights.end())
                throw Error(Errc::MissingWeight, "no weight configured for assignment type");
            return detail::narrow_i64(int128(w->second) * int128(a.quantity),
                                      "objective term exceeds 64-bit range");
        }
        case ObjectiveKind::TotalBenefit: {
            auto pit = offers.find(a.providing_offer);
            auto cit = offers.find(a.consuming_offer);
            if (pit == offers.end() || cit == offers.end())
                throw Error(Errc::UnknownOffer, "assignment references a missing offer");
            int128 benefit = int128(cit->second.price_of(a.rtype)) -
                             int128(pit->second.price_of(a.rtype));
            return detail::narrow_i64(int128(a.quantity) * benefit,
                                      "objective term exceeds 64-bit range");
        }
    }
    return 0;
}

// Objective value of a whole allocation. Additive over disjoint assignment
// lists and independent of assignment order.
inline std::int64_t objective(const Allocation& alloc, const OfferTable& offers,
                              const ObjectiveSpec& spec) {
    int128 total = 0;
    for (const Assignment& a : alloc.assignments)
        total += int128(objective_increment(a, offers, spec));
    return detail::narrow_i64(total, "objective sum exceeds 64-bit range");
}

}  // namespace agora
