#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "agora/ledger/events.hpp"
#include "agora/ledger/oplog.hpp"
#include "agora/serde.hpp"

namespace agora::sim {

struct CycleSummary {
    std::uint64_t cycle = 0;
    std::int64_t objective = 0;
    std::optional<SolutionId> winner_solution;
    std::optional<ActorId> winner_solver;
    std::uint64_t assignment_count = 0;
    std::uint64_t matched_quantity = 0;
    std::map<ResourceType, std::uint64_t> matched_by_type;
    std::map<ResourceType, std::uint64_t> posted_providing_by_type;
    std::map<ResourceType, std::uint64_t> posted_consuming_by_type;
};

struct SimulationReport {
    std::vector<CycleSummary> cycles;
    std::map<std::string, std::uint64_t> rejection_counts;
    std::uint64_t total_ops = 0;
    std::uint64_t accepted_ops = 0;
    std::int64_t total_objective = 0;
    std::uint64_t total_matched_quantity = 0;
    std::string final_state_hash;

    // Conservation: per cycle and type, the finalized quantity never exceeds
    // what both sides posted.
    bool conservation_holds() const {
        for (const CycleSummary& c : cycles) {
            for (const auto& [t, q] : c.matched_by_type) {
                auto p = c.posted_providing_by_type.find(t);
                auto d = c.posted_consuming_by_type.find(t);
                std::uint64_t supply = p == c.posted_providing_by_type.end() ? 0 : p->second;
                std::uint64_t demand = d == c.posted_consuming_by_type.end() ? 0 : d->second;
                if (q > supply || q > demand) return false;
            }
        }
        return true;
    }
};

// Rebuilds the per-cycle summary from the event stream: posted offer volumes
// frozen at each Closed event, matches from the AssignmentFinalized batch.
inline SimulationReport build_report(const std::vector<ledger::Event>& events,
                                     const std::vector<ledger::OpRecord>& ops,
                                     const std::string& final_state_hash) {
    SimulationReport report;
    report.final_state_hash = final_state_hash;

    std::map<OfferId, Offer> offers;
    std::map<SolutionId, ActorId> solution_creators;
    CycleSummary current;
    bool cycle_open = false;

    for (const ledger::Event& e : events) {
        switch (e.kind) {
            case ledger::EventKind::OfferCreated: {
                Offer o;
                o.id = e.offer_id.value_or(0);
                o.owner = e.actor.value_or(0);
                o.side = e.providing.value_or(true) ? Side::Providing : Side::Consuming;
                offers[o.id] = std::move(o);
                break;
            }
            case ledger::EventKind::OfferUpdated:
                if (auto it = offers.find(e.offer_id.value_or(0)); it != offers.end())
                    it->second.lines[e.rtype.value_or(0)] =
                        OfferLine{e.quantity.value_or(0), e.value.value_or(0)};
                break;
            case ledger::EventKind::OfferPosted:
                if (auto it = offers.find(e.offer_id.value_or(0)); it != offers.end())
                    it->second.lifecycle = Lifecycle::Posted;
                break;
            case ledger::EventKind::OfferCanceled:
                if (auto it = offers.find(e.offer_id.value_or(0)); it != offers.end())
                    it->second.lifecycle = Lifecycle::Canceled;
                break;
            case ledger::EventKind::Closed: {
                current = CycleSummary{};
                current.cycle = e.cycle;
                cycle_open = true;
                for (const auto& [id, o] : offers) {
                    if (o.lifecycle != Lifecycle::Posted) continue;
                    auto& bucket = o.side == Side::Providing ? current.posted_providing_by_type
                                                             : current.posted_consuming_by_type;
                    for (const auto& [t, l] : o.lines) bucket[t] += l.quantity;
                }
                break;
            }
            case ledger::EventKind::SolutionCreated:
                solution_creators[e.solution_id.value_or(0)] = e.actor.value_or(0);
                break;
            case ledger::EventKind::AssignmentAdded:
                break;
            case ledger::EventKind::AssignmentFinalized:
                if (cycle_open) {
                    current.assignment_count += 1;
                    current.matched_quantity += e.quantity.value_or(0);
                    current.matched_by_type[e.rtype.value_or(0)] += e.quantity.value_or(0);
                }
                break;
            case ledger::EventKind::CycleFinalized: {
                if (!cycle_open) {
                    current = CycleSummary{};
                    current.cycle = e.cycle;
                }
                current.objective = e.objective.value_or(0);
                current.winner_solution = e.winner;
                if (e.winner) {
                    auto it = solution_creators.find(*e.winner);
                    if (it != solution_creators.end()) current.winner_solver = it->second;
                }
                report.cycles.push_back(current);
                report.total_objective += current.objective;
                report.total_matched_quantity += current.matched_quantity;
                offers.clear();
                solution_creators.clear();
                cycle_open = false;
                break;
            }
        }
    }

    report.total_ops = ops.size();
    for (const ledger::OpRecord& r : ops) {
        if (r.accepted())
            ++report.accepted_ops;
        else
            ++report.rejection_counts[r.outcome];
    }
    return report;
}

inline nlohmann::ordered_json report_to_json(const SimulationReport& r) {
    nlohmann::ordered_json j;
    j["cycles"] = nlohmann::ordered_json::array();
    for (const CycleSummary& c : r.cycles) {
        nlohmann::ordered_json cj;
        cj["cycle"] = c.cycle;
        cj["objective"] = c.objective;
        if (c.winner_solution)
            cj["winner_solution"] = *c.winner_solution;
        else
            cj["winner_solution"] = nullptr;
        if (c.winner_solver)
            cj["winner_solver"] = *c.winner_solver;
        else
            cj["winner_solver"] = nullptr;
        cj["assignments"] = c.assignment_count;
        cj["matched_quantity"] = c.matched_quantity;
        cj["matched_by_type"] = u64_map_to_json<nlohmann::ordered_json>(c.matched_by_type);
        cj["posted_providing_by_type"] =
            u64_map_to_json<nlohmann::ordered_json>(c.posted_providing_by_type);
        cj["posted_consuming_by_type"] =
            u64_map_to_json<nlohmann::ordered_json>(c.posted_consuming_by_type);
        j["cycles"].push_back(std::move(cj));
    }
    j["totals"] = {{"objective", r.total_objective},
                   {"matched_quantity", r.total_matched_quantity},
                   {"ops", r.total_ops},
                   {"accepted_ops", r.accepted_ops}};
    j["rejections"] = r.rejection_counts;
    j["final_state_hash"] = r.final_state_hash;
    return j;
}

}  // namespace agora::sim
