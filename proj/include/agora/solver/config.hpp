#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "agora/errors.hpp"
#include "agora/serde.hpp"
#include "agora/types.hpp"

namespace agora::solver {

enum class Strategy { ExactEnumeration, BranchAndBound, GreedyLocalSearch };
enum class PriceRule { Midpoint, ProviderReservation, ConsumerReservation };

inline const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::ExactEnumeration: return "exact_enumeration";
        case Strategy::BranchAndBound: return "branch_and_bound";
        case Strategy::GreedyLocalSearch: return "greedy_local_search";
    }
    return "?";
}

inline Strategy strategy_from_string(const std::string& s) {
    if (s == "exact_enumeration") return Strategy::ExactEnumeration;
    if (s == "branch_and_bound") return Strategy::BranchAndBound;
    if (s == "greedy_local_search") return Strategy::GreedyLocalSearch;
    throw Error(Errc::ConfigError, "unknown strategy: " + s);
}

inline const char* to_string(PriceRule r) {
    switch (r) {
        case PriceRule::Midpoint: return "midpoint";
        case PriceRule::ProviderReservation: return "provider_reservation";
        case PriceRule::ConsumerReservation: return "consumer_reservation";
    }
    return "?";
}

inline PriceRule price_rule_from_string(const std::string& s) {
    if (s == "midpoint") return PriceRule::Midpoint;
    if (s == "provider_reservation") return PriceRule::ProviderReservation;
    if (s == "consumer_reservation") return PriceRule::ConsumerReservation;
    throw Error(Errc::ConfigError, "unknown price rule: " + s);
}

struct SolverConfig {
    Strategy strategy = Strategy::GreedyLocalSearch;
    ObjectiveSpec objective;
    ConstraintSet constraints;
    PriceRule price_rule = PriceRule::Midpoint;
    std::size_t exact_size_cap = 12;      // max total offers for exact strategies
    std::uint64_t time_budget_ms = 900;   // local-search budget
    std::uint64_t seed = 0;
};

template <typename Json>
void to_json(Json& j, const SolverConfig& c) {
    j = Json::object();
    j["strategy"] = to_string(c.strategy);
    Json oj;
    agora::to_json(oj, c.objective);
    j["objective"] = std::move(oj);
    Json cj;
    agora::to_json(cj, c.constraints);
    j["constraints"] = std::move(cj);
    j["price_rule"] = to_string(c.price_rule);
    j["exact_size_cap"] = c.exact_size_cap;
    j["time_budget_ms"] = c.time_budget_ms;
    j["seed"] = c.seed;
}

template <typename Json>
void from_json(const Json& j, SolverConfig& c) {
    c = SolverConfig{};
    if (j.contains("strategy"))
        c.strategy = strategy_from_string(j.at("strategy").template get<std::string>());
    if (j.contains("objective")) agora::from_json(j.at("objective"), c.objective);
    if (j.contains("constraints")) agora::from_json(j.at("constraints"), c.constraints);
    if (j.contains("price_rule"))
        c.price_rule = price_rule_from_string(j.at("price_rule").template get<std::string>());
    if (j.contains("exact_size_cap"))
        c.exact_size_cap = j.at("exact_size_cap").template get<std::size_t>();
    if (j.contains("time_budget_ms"))
        c.time_budget_ms = j.at("time_budget_ms").template get<std::uint64_t>();
    if (j.contains("seed")) c.seed = u64_from_json(j.at("seed"));
}

}  // namespace agora::solver
