#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace agora {

// A resource type is an opaque 64-bit code. Scenario modules define what the
// bits mean (e.g. timestamp*1000 + pickup*10 + destination for rides, or an
// HHMM label for energy intervals); the market core never interprets them.
using ResourceType = std::uint64_t;
using ActorId = std::uint64_t;
using OfferId = std::uint64_t;
using SolutionId = std::uint64_t;
using Tick = std::uint64_t;  // logical time supplied by the harness

enum class Side { Providing, Consuming };
enum class Lifecycle { Created, Posted, Canceled };

inline const char* to_string(Side s) {
    return s == Side::Providing ? "providing" : "consuming";
}

inline const char* to_string(Lifecycle l) {
    switch (l) {
        case Lifecycle::Created: return "created";
        case Lifecycle::Posted: return "posted";
        case Lifecycle::Canceled: return "canceled";
    }
    return "?";
}

// Quantity offered and unit reservation price for one resource type of an
// offer. Keeping both in one map entry guarantees the quantity and price key
// sets coincide.
struct OfferLine {
    std::uint64_t quantity = 0;    // resource units
    std::uint64_t unit_price = 0;  // currency units per resource unit

    friend bool operator==(const OfferLine&, const OfferLine&) = default;
};

// One side of the market. A providing offer promises alternatives: any convex
// combination of its lines that fits in a single capacity budget. A consuming
// offer requests under the same rule.
struct Offer {
    OfferId id = 0;
    ActorId owner = 0;
    Side side = Side::Providing;
    Lifecycle lifecycle = Lifecycle::Created;
    std::uint64_t misc = 0;  // opaque caller tag
    std::map<ResourceType, OfferLine> lines;

    const OfferLine* line(ResourceType t) const {
        auto it = lines.find(t);
        return it == lines.end() ? nullptr : &it->second;
    }

    // Quantity for a type; absent types count as zero.
    std::uint64_t quantity_of(ResourceType t) const {
        const OfferLine* l = line(t);
        return l ? l->quantity : 0;
    }

    std::uint64_t price_of(ResourceType t) const {
        const OfferLine* l = line(t);
        return l ? l->unit_price : 0;
    }

    // Types with nonzero quantity; zero-quantity lines are stored but unusable.
    std::size_t usable_types() const {
        std::size_t n = 0;
        for (const auto& [t, l] : lines)
            if (l.quantity > 0) ++n;
        return n;
    }

    friend bool operator==(const Offer&, const Offer&) = default;
};

using OfferTable = std::map<OfferId, Offer>;

// One matched trade: quantity of rtype flows from the providing offer to the
// consuming offer at unit_price.
struct Assignment {
    OfferId providing_offer = 0;
    OfferId consuming_offer = 0;
    ResourceType rtype = 0;
    std::uint64_t quantity = 0;
    std::uint64_t unit_price = 0;

    friend auto operator<=>(const Assignment&, const Assignment&) = default;
};

struct Allocation {
    std::vector<Assignment> assignments;

    bool empty() const { return assignments.empty(); }
    friend bool operator==(const Allocation&, const Allocation&) = default;
};

// Fixed-point fraction numerator/scale, where scale is the contract
// `precision` parameter. Used for per-offer capacity usage accounting.
struct ScaledFraction {
    std::uint64_t numerator = 0;
    std::uint64_t scale = 1;

    bool within_budget() const { return numerator <= scale; }
    friend bool operator==(const ScaledFraction&, const ScaledFraction&) = default;
};

// Optional feasibility extensions: price floors/ceilings per type, allowed
// prosumer pairs per type, and system-wide per-type quantity limits. Absent
// entries mean unconstrained. real_valued flags that quantities and prices
// are fixed-point encodings of reals; the integer verification math is
// unchanged, only the interpretation of a unit differs.
struct ConstraintSet {
    std::map<ResourceType, std::uint64_t> price_min;
    std::map<ResourceType, std::uint64_t> price_max;
    std::map<ResourceType, std::set<std::pair<ActorId, ActorId>>> pairwise;
    std::map<ResourceType, std::uint64_t> system_limit;
    bool real_valued = false;

    bool valid() const {
        for (const auto& [t, lo] : price_min) {
            auto hi = price_max.find(t);
            if (hi != price_max.end() && lo > hi->second) return false;
        }
        return true;
    }

    friend bool operator==(const ConstraintSet&, const ConstraintSet&) = default;
};

enum class ObjectiveKind { TotalQuantity, WeightedQuantity, TotalBenefit };

inline const char* to_string(ObjectiveKind k) {
    switch (k) {
        case ObjectiveKind::TotalQuantity: return "total_quantity";
        case ObjectiveKind::WeightedQuantity: return "weighted_quantity";
        case ObjectiveKind::TotalBenefit: return "total_benefit";
    }
    return "?";
}

struct ObjectiveSpec {
    ObjectiveKind kind = ObjectiveKind::TotalQuantity;
    std::map<ResourceType, std::uint64_t> weights;  // consulted iff WeightedQuantity

    bool valid() const {
        return weights.empty() == (kind != ObjectiveKind::WeightedQuantity);
    }

    friend bool operator==(const ObjectiveSpec&, const ObjectiveSpec&) = default;
};

enum class ConstraintTag {
    ProviderCapacity,
    ConsumerCapacity,
    ProviderReservation,
    ConsumerReservation,
    PriceBound,
    Pairwise,
    SystemLimit,
    UnknownOffer,
    WrongSide,
};

inline const char* to_string(ConstraintTag t) {
    switch (t) {
        case ConstraintTag::ProviderCapacity: return "ProviderCapacity";
        case ConstraintTag::ConsumerCapacity: return "ConsumerCapacity";
        case ConstraintTag::ProviderReservation: return "ProviderReservation";
        case ConstraintTag::ConsumerReservation: return "ConsumerReservation";
        case ConstraintTag::PriceBound: return "PriceBound";
        case ConstraintTag::Pairwise: return "Pairwise";
        case ConstraintTag::SystemLimit: return "SystemLimit";
        case ConstraintTag::UnknownOffer: return "UnknownOffer";
        case ConstraintTag::WrongSide: return "WrongSide";
    }
    return "?";
}

struct Violation {
    ConstraintTag tag;
    std::size_t assignment_index;

    friend auto operator<=>(const Violation&, const Violation&) = default;
};

struct FeasibilityVerdict {
    bool feasible = true;
    std::vector<Violation> violations;
};

}  // namespace agora
