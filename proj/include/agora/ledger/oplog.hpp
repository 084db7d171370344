#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "agora/errors.hpp"
#include "agora/ledger/canonical.hpp"
#include "agora/ledger/contract.hpp"

namespace agora::ledger {

enum class OpKind {
    Setup,
    CreateOffer,
    UpdateOffer,
    PostOffer,
    CancelOffer,
    Close,
    CreateSolution,
    AddAssignment,
    Finalize,
};

inline const char* to_string(OpKind k) {
    switch (k) {
        case OpKind::Setup: return "setup";
        case OpKind::CreateOffer: return "create_offer";
        case OpKind::UpdateOffer: return "update_offer";
        case OpKind::PostOffer: return "post_offer";
        case OpKind::CancelOffer: return "cancel_offer";
        case OpKind::Close: return "close";
        case OpKind::CreateSolution: return "create_solution";
        case OpKind::AddAssignment: return "add_assignment";
        case OpKind::Finalize: return "finalize";
    }
    return "?";
}

inline OpKind op_kind_from_string(const std::string& s) {
    if (s == "setup") return OpKind::Setup;
    if (s == "create_offer") return OpKind::CreateOffer;
    if (s == "update_offer") return OpKind::UpdateOffer;
    if (s == "post_offer") return OpKind::PostOffer;
    if (s == "cancel_offer") return OpKind::CancelOffer;
    if (s == "close") return OpKind::Close;
    if (s == "create_solution") return OpKind::CreateSolution;
    if (s == "add_assignment") return OpKind::AddAssignment;
    if (s == "finalize") return OpKind::Finalize;
    throw Error(Errc::ParseError, "unknown op kind: " + s);
}

// One attempted contract operation, with its arguments and recorded outcome.
// The operation log is the replay source: reapplying every record to a fresh
// contract reproduces the exact same state and event stream.
struct OpRecord {
    std::uint64_t seq = 0;
    Tick time = 0;
    ActorId caller = 0;
    OpKind op = OpKind::Setup;

    // setup
    std::optional<ContractParams> params;
    std::optional<ObjectiveSpec> objective_spec;
    std::optional<ConstraintSet> constraints;
    // offer ops
    std::optional<bool> providing;
    std::optional<std::uint64_t> misc;
    std::optional<OfferId> offer_id;
    std::optional<ResourceType> rtype;
    std::optional<std::uint64_t> quantity;
    std::optional<std::uint64_t> value;
    // solution ops
    std::optional<SolutionId> solution_id;
    std::optional<OfferId> providing_offer;
    std::optional<OfferId> consuming_offer;

    std::string outcome = "ok";  // "ok" or a rejection code
    std::optional<std::uint64_t> result_id;    // id returned by create operations
    std::optional<std::string> state_hash;     // checkpoint, recorded on accepted finalize

    bool accepted() const { return outcome == "ok"; }
};

inline nlohmann::ordered_json op_to_json(const OpRecord& r) {
    nlohmann::ordered_json j;
    j["seq"] = r.seq;
    j["time"] = r.time;
    j["caller"] = r.caller;
    j["op"] = to_string(r.op);
    if (r.params) j["params"] = params_to_json(*r.params);
    if (r.objective_spec) {
        nlohmann::ordered_json oj;
        to_json(oj, *r.objective_spec);
        j["objective"] = std::move(oj);
    }
    if (r.constraints) {
        nlohmann::ordered_json cj;
        to_json(cj, *r.constraints);
        j["constraints"] = std::move(cj);
    }
    if (r.providing) j["providing"] = *r.providing;
    if (r.misc) j["misc"] = u64_str(*r.misc);
    if (r.offer_id) j["offer_id"] = *r.offer_id;
    if (r.rtype) j["rtype"] = u64_str(*r.rtype);
    if (r.quantity) j["quantity"] = u64_str(*r.quantity);
    if (r.value) j["value"] = u64_str(*r.value);
    if (r.solution_id) j["solution_id"] = *r.solution_id;
    if (r.providing_offer) j["providing_offer"] = *r.providing_offer;
    if (r.consuming_offer) j["consuming_offer"] = *r.consuming_offer;
    j["outcome"] = r.outcome;
    if (r.result_id) j["result_id"] = *r.result_id;
    if (r.state_hash) j["state_hash"] = *r.state_hash;
    return j;
}

inline OpRecord op_from_json(const nlohmann::json& j) {
    OpRecord r;
    r.seq = j.at("seq").get<std::uint64_t>();
    r.time = j.at("time").get<Tick>();
    r.caller = j.at("caller").get<ActorId>();
    r.op = op_kind_from_string(j.at("op").get<std::string>());
    if (j.contains("params")) r.params = params_from_json(j.at("params"));
    if (j.contains("objective")) {
        ObjectiveSpec s;
        from_json(j.at("objective"), s);
        r.objective_spec = s;
    }
    if (j.contains("constraints")) {
        ConstraintSet c;
        from_json(j.at("constraints"), c);
        r.constraints = c;
    }
    if (j.contains("providing")) r.providing = j.at("providing").get<bool>();
    if (j.contains("misc")) r.misc = u64_from_json(j.at("misc"));
    if (j.contains("offer_id")) r.offer_id = j.at("offer_id").get<OfferId>();
    if (j.contains("rtype")) r.rtype = u64_from_json(j.at("rtype"));
    if (j.contains("quantity")) r.quantity = u64_from_json(j.at("quantity"));
    if (j.contains("value")) r.value = u64_from_json(j.at("value"));
    if (j.contains("solution_id")) r.solution_id = j.at("solution_id").get<SolutionId>();
    if (j.contains("providing_offer")) r.providing_offer = j.at("providing_offer").get<OfferId>();
    if (j.contains("consuming_offer")) r.consuming_offer = j.at("consuming_offer").get<OfferId>();
    r.outcome = j.at("outcome").get<std::string>();
    if (j.contains("result_id")) r.result_id = j.at("result_id").get<std::uint64_t>();
    if (j.contains("state_hash")) r.state_hash = j.at("state_hash").get<std::string>();
    return r;
}

// Applies a logged operation to a contract. Missing arguments default to
// zero values so that malformed records still apply deterministically.
inline OpResult apply_op(Contract& c, const OpRecord& r) {
    switch (r.op) {
        case OpKind::Setup:
            return c.setup(r.caller, r.time, r.params.value_or(ContractParams{}),
                           r.objective_spec.value_or(ObjectiveSpec{}),
                           r.constraints.value_or(ConstraintSet{}));
        case OpKind::CreateOffer:
            return c.create_offer(r.caller, r.time, r.providing.value_or(true),
                                  r.misc.value_or(0));
        case OpKind::UpdateOffer:
            return c.update_offer(r.caller, r.time, r.offer_id.value_or(0), r.rtype.value_or(0),
                                  r.quantity.value_or(0), r.value.value_or(0));
        case OpKind::PostOffer:
            return c.post_offer(r.caller, r.time, r.offer_id.value_or(0));
        case OpKind::CancelOffer:
            return c.cancel_offer(r.caller, r.time, r.offer_id.value_or(0));
        case OpKind::Close:
            return c.close(r.caller, r.time);
        case OpKind::CreateSolution:
            return c.create_solution(r.caller, r.time, r.misc.value_or(0));
        case OpKind::AddAssignment:
            return c.add_assignment(r.caller, r.time, r.solution_id.value_or(0),
                                    r.providing_offer.value_or(0), r.consuming_offer.value_or(0),
                                    r.rtype.value_or(0), r.quantity.value_or(0),
                                    r.value.value_or(0));
        case OpKind::Finalize:
            return c.finalize(r.caller, r.time);
    }
    return OpResult{};
}

inline void write_op_log(const std::filesystem::path& path, const std::vector<OpRecord>& ops) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::IoError, "cannot open for writing: " + path.string());
    for (const OpRecord& r : ops) out << op_to_json(r).dump() << '\n';
}

inline std::vector<OpRecord> read_op_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open: " + path.string());
    std::vector<OpRecord> ops;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
            ops.push_back(op_from_json(j));
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw Error(Errc::CorruptLog,
                        "line " + std::to_string(lineno) + ": " + e.what());
        }
        if (ops.back().seq != ops.size() - 1)
            throw Error(Errc::CorruptLog, "seq gap at line " + std::to_string(lineno));
    }
    return ops;
}

inline void write_event_log(const std::filesystem::path& path, const std::vector<Event>& events) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::IoError, "cannot open for writing: " + path.string());
    for (const Event& e : events) out << event_to_json(e).dump() << '\n';
}

inline std::vector<Event> read_event_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open: " + path.string());
    std::vector<Event> events;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            events.push_back(event_from_json(nlohmann::json::parse(line)));
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw Error(Errc::CorruptLog,
                        "line " + std::to_string(lineno) + ": " + e.what());
        }
        if (events.back().seq != events.size() - 1)
            throw Error(Errc::CorruptLog, "event seq gap at line " + std::to_string(lineno));
    }
    return events;
}

}  // namespace agora::ledger
