#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "agora/feasibility.hpp"
#include "agora/objective.hpp"
#include "agora/solver/config.hpp"
#include "agora/solver/snapshot.hpp"

namespace agora::solver {

// A compatible (providing offer, consuming offer, type) combination: both
// sides carry the type with nonzero quantity, the price band
// [max(provider reservation, min_t), min(consumer reservation, max_t)] is
// nonempty, and any pairwise restriction admits the owners. All strategies
// search over quantities on these triples; the contract's ceiling fixed-point
// rule is applied verbatim so solver feasibility equals verifier feasibility.
struct Triple {
    std::size_t prov = 0;  // index into snapshot.providing
    std::size_t cons = 0;  // index into snapshot.consuming
    ResourceType rtype = 0;
    std::uint64_t prov_quantity = 0;  // o_Q of the providing offer for rtype
    std::uint64_t cons_quantity = 0;
    std::int64_t unit_weight = 0;  // objective gain per allocated unit
    std::uint64_t price = 0;       // assignment price under the configured rule
};

struct Instance {
    MarketSnapshot snap;
    ObjectiveSpec objective;
    std::vector<Triple> triples;  // sorted by (providing id, consuming id, rtype)
    std::vector<ResourceType> limited_types;
    std::vector<std::uint64_t> limits;  // parallel to limited_types

    std::uint64_t precision() const { return snap.precision; }
    std::size_t offer_count() const { return snap.providing.size() + snap.consuming.size(); }

    int limit_slot(ResourceType t) const {
        auto it = std::lower_bound(limited_types.begin(), limited_types.end(), t);
        if (it == limited_types.end() || *it != t) return -1;
        return int(it - limited_types.begin());
    }
};

inline Instance build_instance(const MarketSnapshot& snap, const SolverConfig& config) {
    Instance inst;
    inst.snap = snap;
    inst.objective = config.objective;
    for (const auto& [t, lim] : config.constraints.system_limit) {
        inst.limited_types.push_back(t);
        inst.limits.push_back(lim);
    }

    const ConstraintSet& cs = config.constraints;
    for (std::size_t pi = 0; pi < snap.providing.size(); ++pi) {
        const Offer& prov = snap.providing[pi];
        for (std::size_t ci = 0; ci < snap.consuming.size(); ++ci) {
            const Offer& cons = snap.consuming[ci];
            for (const auto& [t, pline] : prov.lines) {
                if (pline.quantity == 0) continue;
                const OfferLine* cline = cons.line(t);
                if (!cline || cline->quantity == 0) continue;

                std::uint64_t lo = pline.unit_price;
                std::uint64_t hi = cline->unit_price;
                if (auto it = cs.price_min.find(t); it != cs.price_min.end())
                    lo = std::max(lo, it->second);
                if (auto it = cs.price_max.find(t); it != cs.price_max.end())
                    hi = std::min(hi, it->second);
                if (lo > hi) continue;

                if (auto pw = cs.pairwise.find(t); pw != cs.pairwise.end())
                    if (!pw->second.count({prov.owner, cons.owner})) continue;

                std::int64_t weight = 0;
                switch (config.objective.kind) {
                    case ObjectiveKind::TotalQuantity:
                        weight = 1;
                        break;
                    case ObjectiveKind::WeightedQuantity: {
                        auto w = config.objective.weights.find(t);
                        if (w == config.objective.weights.end()) continue;  // unsubmittable
                        weight = std::int64_t(w->second);
                        break;
                    }
                    case ObjectiveKind::TotalBenefit:
                        weight = std::int64_t(cline->unit_price) - std::int64_t(pline.unit_price);
                        break;
                }

                std::uint64_t price = lo;
                switch (config.price_rule) {
                    case PriceRule::Midpoint: {
                        std::uint64_t mid = static_cast<std::uint64_t>(
                            (uint128(pline.unit_price) + cline->unit_price) / 2);
                        price = std::clamp(mid, lo, hi);
                        break;
                    }
                    case PriceRule::ProviderReservation:
                        price = lo;
                        break;
                    case PriceRule::ConsumerReservation:
                        price = hi;
                        break;
                }

                inst.triples.push_back(Triple{pi, ci, t, pline.quantity, cline->quantity,
                                              weight, price});
            }
        }
    }
    std::sort(inst.triples.begin(), inst.triples.end(), [&](const Triple& a, const Triple& b) {
        OfferId pa = snap.providing[a.prov].id, pb = snap.providing[b.prov].id;
        OfferId ca = snap.consuming[a.cons].id, cb = snap.consuming[b.cons].id;
        return std::tie(pa, ca, a.rtype) < std::tie(pb, cb, b.rtype);
    });
    return inst;
}

// Largest additional quantity the triple admits given both offers' remaining
// fixed-point budgets: ceil(q*P/oQ) <= B iff q <= floor(B*oQ/P).
inline std::uint64_t max_quantity_for(const Triple& t, std::uint64_t prov_used,
                                      std::uint64_t cons_used, std::uint64_t precision) {
    std::uint64_t bp = precision - std::min(prov_used, precision);
    std::uint64_t bc = precision - std::min(cons_used, precision);
    uint128 qp = uint128(bp) * t.prov_quantity / precision;
    uint128 qc = uint128(bc) * t.cons_quantity / precision;
    uint128 q = qp < qc ? qp : qc;
    constexpr std::uint64_t kMax = ~std::uint64_t{0};
    return q > kMax ? kMax : static_cast<std::uint64_t>(q);
}

// Mutable search state shared by the strategies: per-offer fixed-point usage,
// per-limited-type totals, and the quantity chosen for each triple.
struct SearchState {
    std::vector<std::uint64_t> prov_used;
    std::vector<std::uint64_t> cons_used;
    std::vector<std::uint64_t> limit_used;
    std::vector<std::uint64_t> qty;  // parallel to instance triples
    std::int64_t objective = 0;

    explicit SearchState(const Instance& inst)
        : prov_used(inst.snap.providing.size(), 0),
          cons_used(inst.snap.consuming.size(), 0),
          limit_used(inst.limits.size(), 0),
          qty(inst.triples.size(), 0) {}

    // Exact growth headroom for a triple, accounting for the merged ceiling:
    // the triple's usage is one ceil term over its total quantity, so the
    // budget available to it excludes its own current contribution.
    std::uint64_t headroom(const Instance& inst, std::size_t ti) const {
        const Triple& t = inst.triples[ti];
        std::uint64_t p = inst.precision();
        auto side_max = [&](std::uint64_t used, std::uint64_t type_q) {
            std::uint64_t own = static_cast<std::uint64_t>(
                usage_increment_wide(qty[ti], p, type_q));
            std::uint64_t budget = p - std::min(used - own, p);
            uint128 max_total = uint128(budget) * type_q / p;
            if (max_total <= qty[ti]) return std::uint64_t{0};
            uint128 head = max_total - qty[ti];
            constexpr std::uint64_t kMax = ~std::uint64_t{0};
            return head > kMax ? kMax : static_cast<std::uint64_t>(head);
        };
        std::uint64_t q = std::min(side_max(prov_used[t.prov], t.prov_quantity),
                                   side_max(cons_used[t.cons], t.cons_quantity));
        if (int slot = inst.limit_slot(t.rtype); slot >= 0) {
            std::uint64_t left = inst.limits[slot] - std::min(limit_used[slot], inst.limits[slot]);
            q = std::min(q, left);
        }
        return q;
    }

    void add(const Instance& inst, std::size_t ti, std::uint64_t dq) {
        if (dq == 0) return;
        const Triple& t = inst.triples[ti];
        std::uint64_t p = inst.precision();
        prov_used[t.prov] -= static_cast<std::uint64_t>(
            usage_increment_wide(qty[ti], p, t.prov_quantity));
        cons_used[t.cons] -= static_cast<std::uint64_t>(
            usage_increment_wide(qty[ti], p, t.cons_quantity));
        qty[ti] += dq;
        prov_used[t.prov] += static_cast<std::uint64_t>(
            usage_increment_wide(qty[ti], p, t.prov_quantity));
        cons_used[t.cons] += static_cast<std::uint64_t>(
            usage_increment_wide(qty[ti], p, t.cons_quantity));
        if (int slot = inst.limit_slot(t.rtype); slot >= 0) limit_used[slot] += dq;
        objective += std::int64_t(dq) * t.unit_weight;
    }

    void remove(const Instance& inst, std::size_t ti, std::uint64_t dq) {
        if (dq == 0) return;
        const Triple& t = inst.triples[ti];
        std::uint64_t p = inst.precision();
        prov_used[t.prov] -= static_cast<std::uint64_t>(
            usage_increment_wide(qty[ti], p, t.prov_quantity));
        cons_used[t.cons] -= static_cast<std::uint64_t>(
            usage_increment_wide(qty[ti], p, t.cons_quantity));
        qty[ti] -= dq;
        prov_used[t.prov] += static_cast<std::uint64_t>(
            usage_increment_wide(qty[ti], p, t.prov_quantity));
        cons_used[t.cons] += static_cast<std::uint64_t>(
            usage_increment_wide(qty[ti], p, t.cons_quantity));
        if (int slot = inst.limit_slot(t.rtype); slot >= 0) limit_used[slot] -= dq;
        objective -= std::int64_t(dq) * t.unit_weight;
    }

    Allocation to_allocation(const Instance& inst) const {
        Allocation alloc;
        for (std::size_t i = 0; i < qty.size(); ++i) {
            if (qty[i] == 0) continue;
            const Triple& t = inst.triples[i];
            alloc.assignments.push_back(Assignment{inst.snap.providing[t.prov].id,
                                                   inst.snap.consuming[t.cons].id, t.rtype,
                                                   qty[i], t.price});
        }
        return alloc;  // triples are canonically sorted, so assignments are too
    }
};

}  // namespace agora::solver
