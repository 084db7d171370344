#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "agora/ledger/contract.hpp"
#include "agora/serde.hpp"
#include "agora/sha256.hpp"

namespace agora::ledger {

// Canonical serialization of the full contract state. nlohmann::json keeps
// object keys sorted, so two equal states always dump to identical bytes.
inline nlohmann::json params_to_json(const ContractParams& p) {
    nlohmann::json j{{"num_types", p.num_types},
                     {"precision", p.precision},
                     {"max_quantity", p.max_quantity},
                     {"length_receive", p.length_receive},
                     {"length_solve", p.length_solve}};
    if (p.director)
        j["director"] = *p.director;
    else
        j["director"] = nullptr;
    return j;
}

inline ContractParams params_from_json(const nlohmann::json& j) {
    ContractParams p;
    p.num_types = u64_from_json(j.at("num_types"));
    p.precision = u64_from_json(j.at("precision"));
    p.max_quantity = u64_from_json(j.at("max_quantity"));
    p.length_receive = u64_from_json(j.at("length_receive"));
    p.length_solve = u64_from_json(j.at("length_solve"));
    if (j.contains("director") && !j.at("director").is_null())
        p.director = j.at("director").get<ActorId>();
    return p;
}

inline nlohmann::json solution_to_json(const Solution& s) {
    nlohmann::json j;
    j["id"] = s.id;
    j["creator"] = s.creator;
    j["misc"] = u64_str(s.misc);
    to_json(j["assignments"], Allocation{s.assignments});
    j["objective"] = s.objective_value;
    nlohmann::json pu = nlohmann::json::object();
    for (const auto& [id, u] : s.provider_usage) pu[u64_str(id)] = u64_str(u);
    j["provider_usage"] = std::move(pu);
    nlohmann::json cu = nlohmann::json::object();
    for (const auto& [id, u] : s.consumer_usage) cu[u64_str(id)] = u64_str(u);
    j["consumer_usage"] = std::move(cu);
    j["per_type_total"] = u64_map_to_json<nlohmann::json>(s.per_type_total);
    return j;
}

inline nlohmann::json canonical_state_json(const ContractState& st) {
    nlohmann::json j;
    j["params"] = params_to_json(st.params);
    to_json(j["objective_spec"], st.objective_spec);
    to_json(j["constraints"], st.constraints);
    j["phase"] = to_string(st.phase);
    j["phase_started_at"] = st.phase_started_at;
    j["cycle"] = st.cycle;
    j["next_offer_id"] = st.next_offer_id;
    j["next_solution_id"] = st.next_solution_id;
    nlohmann::json offers = nlohmann::json::object();
    for (const auto& [id, o] : st.offers) {
        nlohmann::json oj;
        to_json(oj, o);
        offers[u64_str(id)] = std::move(oj);
    }
    j["offers"] = std::move(offers);
    nlohmann::json sols = nlohmann::json::object();
    for (const auto& [id, s] : st.solutions) sols[u64_str(id)] = solution_to_json(s);
    j["solutions"] = std::move(sols);
    if (st.candidate)
        j["candidate"] = *st.candidate;
    else
        j["candidate"] = nullptr;
    j["now"] = st.now;
    j["next_event_seq"] = st.next_event_seq;
    nlohmann::json evs = nlohmann::json::array();
    for (const Event& e : st.events) evs.push_back(nlohmann::json(event_to_json(e)));
    j["events"] = std::move(evs);
    return j;
}

inline std::string state_hash(const ContractState& st) {
    return sha256_hex(canonical_state_json(st).dump());
}

inline std::string state_hash(const Contract& c) { return state_hash(c.state()); }

}  // namespace agora::ledger
