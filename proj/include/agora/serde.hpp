#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "agora/errors.hpp"
#include "agora/types.hpp"

// JSON conversions for the core domain types.
//
// Wire rule: opaque 64-bit payload values (resource types, quantities, unit
// prices, misc tags, weights) are serialized as decimal strings, since they
// may exceed 2^53 and must survive consumers that read JSON numbers as
// doubles. Structural counters (ids, seq, cycle, time) stay JSON numbers.
// Readers accept both forms.

namespace agora {

inline std::uint64_t u64_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        const std::string& s = j.get_ref<const std::string&>();
        try {
            std::size_t pos = 0;
            std::uint64_t v = std::stoull(s, &pos);
            if (pos != s.size()) throw Error(Errc::ParseError, "trailing junk in integer: " + s);
            return v;
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            throw Error(Errc::ParseError, "bad integer literal: " + s);
        }
    }
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer()) {
        auto v = j.get<std::int64_t>();
        if (v < 0) throw Error(Errc::ParseError, "negative value for unsigned field");
        return static_cast<std::uint64_t>(v);
    }
    throw Error(Errc::ParseError, "expected integer or decimal string");
}

inline std::string u64_str(std::uint64_t v) { return std::to_string(v); }

template <typename Json>
Json u64_map_to_json(const std::map<ResourceType, std::uint64_t>& m) {
    Json j = Json::object();
    for (const auto& [t, v] : m) j[u64_str(t)] = u64_str(v);
    return j;
}

inline std::map<ResourceType, std::uint64_t> u64_map_from_json(const nlohmann::json& j) {
    std::map<ResourceType, std::uint64_t> m;
    for (auto it = j.begin(); it != j.end(); ++it)
        m[std::stoull(it.key())] = u64_from_json(it.value());
    return m;
}

template <typename Json>
void to_json(Json& j, const OfferLine& l) {
    j = Json{{"quantity", u64_str(l.quantity)}, {"value", u64_str(l.unit_price)}};
}

template <typename Json>
void from_json(const Json& j, OfferLine& l) {
    l.quantity = u64_from_json(j.at("quantity"));
    l.unit_price = u64_from_json(j.at("value"));
}

template <typename Json>
void to_json(Json& j, const Offer& o) {
    Json lines = Json::object();
    for (const auto& [t, l] : o.lines) {
        Json lj;
        to_json(lj, l);
        lines[u64_str(t)] = std::move(lj);
    }
    j = Json{{"id", o.id},
             {"owner", o.owner},
             {"side", to_string(o.side)},
             {"lifecycle", to_string(o.lifecycle)},
             {"misc", u64_str(o.misc)},
             {"lines", std::move(lines)}};
}

template <typename Json>
void from_json(const Json& j, Offer& o) {
    o.id = j.at("id").template get<OfferId>();
    o.owner = j.at("owner").template get<ActorId>();
    std::string side = j.at("side").template get<std::string>();
    o.side = side == "providing" ? Side::Providing : Side::Consuming;
    std::string lc = j.at("lifecycle").template get<std::string>();
    o.lifecycle = lc == "created" ? Lifecycle::Created
                : lc == "posted"  ? Lifecycle::Posted
                                  : Lifecycle::Canceled;
    o.misc = u64_from_json(j.at("misc"));
    o.lines.clear();
    for (auto it = j.at("lines").begin(); it != j.at("lines").end(); ++it) {
        OfferLine l;
        from_json(it.value(), l);
        o.lines[std::stoull(it.key())] = l;
    }
}

template <typename Json>
void to_json(Json& j, const Assignment& a) {
    j = Json{{"providing_offer", a.providing_offer},
             {"consuming_offer", a.consuming_offer},
             {"rtype", u64_str(a.rtype)},
             {"quantity", u64_str(a.quantity)},
             {"value", u64_str(a.unit_price)}};
}

template <typename Json>
void from_json(const Json& j, Assignment& a) {
    a.providing_offer = j.at("providing_offer").template get<OfferId>();
    a.consuming_offer = j.at("consuming_offer").template get<OfferId>();
    a.rtype = u64_from_json(j.at("rtype"));
    a.quantity = u64_from_json(j.at("quantity"));
    a.unit_price = u64_from_json(j.at("value"));
}

template <typename Json>
void to_json(Json& j, const Allocation& alloc) {
    j = Json::array();
    for (const Assignment& a : alloc.assignments) {
        Json aj;
        to_json(aj, a);
        j.push_back(std::move(aj));
    }
}

template <typename Json>
void from_json(const Json& j, Allocation& alloc) {
    alloc.assignments.clear();
    for (const auto& aj : j) {
        Assignment a;
        from_json(aj, a);
        alloc.assignments.push_back(a);
    }
}

template <typename Json>
void to_json(Json& j, const ObjectiveSpec& spec) {
    j = Json{{"kind", to_string(spec.kind)}};
    if (spec.kind == ObjectiveKind::WeightedQuantity)
        j["weights"] = u64_map_to_json<Json>(spec.weights);
}

template <typename Json>
void from_json(const Json& j, ObjectiveSpec& spec) {
    std::string kind = j.at("kind").template get<std::string>();
    if (kind == "total_quantity") {
        spec.kind = ObjectiveKind::TotalQuantity;
    } else if (kind == "weighted_quantity") {
        spec.kind = ObjectiveKind::WeightedQuantity;
    } else if (kind == "total_benefit") {
        spec.kind = ObjectiveKind::TotalBenefit;
    } else {
        throw Error(Errc::ParseError, "unknown objective kind: " + kind);
    }
    spec.weights.clear();
    if (j.contains("weights")) spec.weights = u64_map_from_json(j.at("weights"));
}

template <typename Json>
void to_json(Json& j, const ConstraintSet& c) {
    j = Json::object();
    if (!c.price_min.empty()) j["price_min"] = u64_map_to_json<Json>(c.price_min);
    if (!c.price_max.empty()) j["price_max"] = u64_map_to_json<Json>(c.price_max);
    if (!c.pairwise.empty()) {
        Json pw = Json::object();
        for (const auto& [t, pairs] : c.pairwise) {
            Json arr = Json::array();
            for (const auto& [p, q] : pairs) arr.push_back(Json::array({p, q}));
            pw[u64_str(t)] = std::move(arr);
        }
        j["pairwise"] = std::move(pw);
    }
    if (!c.system_limit.empty()) j["system_limit"] = u64_map_to_json<Json>(c.system_limit);
    j["real_valued"] = c.real_valued;
}

template <typename Json>
void from_json(const Json& j, ConstraintSet& c) {
    c = ConstraintSet{};
    if (j.contains("price_min")) c.price_min = u64_map_from_json(j.at("price_min"));
    if (j.contains("price_max")) c.price_max = u64_map_from_json(j.at("price_max"));
    if (j.contains("pairwise")) {
        for (auto it = j.at("pairwise").begin(); it != j.at("pairwise").end(); ++it) {
            auto& pairs = c.pairwise[std::stoull(it.key())];
            for (const auto& pj : it.value())
                pairs.insert({pj.at(0).template get<ActorId>(), pj.at(1).template get<ActorId>()});
        }
    }
    if (j.contains("system_limit")) c.system_limit = u64_map_from_json(j.at("system_limit"));
    if (j.contains("real_valued")) c.real_valued = j.at("real_valued").template get<bool>();
}

}  // namespace agora
