#pragma once

#include <vector>

#include "agora/ledger/canonical.hpp"
#include "agora/ledger/contract.hpp"
#include "agora/ledger/oplog.hpp"

namespace agora::audit {

struct ScriptResult {
    std::vector<ledger::OpRecord> ops;  // with recorded outcomes and result ids
    std::vector<ledger::Event> events;
    ledger::Contract contract;
};

// Drives a contract (optionally a broken variant, for the mutation suite)
// with a list of operation arguments, recording outcomes, result ids, and
// per-finalize state-hash checkpoints.
inline ScriptResult run_script(const std::vector<ledger::OpRecord>& script,
                               ledger::GuardOverrides faults = {},
                               bool checkpoint_hashes = false) {
    ScriptResult out;
    out.contract = ledger::Contract(faults);
    out.ops.reserve(script.size());
    std::uint64_t seq = 0;
    for (ledger::OpRecord r : script) {
        r.seq = seq++;
        ledger::OpResult res = ledger::apply_op(out.contract, r);
        r.outcome = res.outcome();
        r.result_id.reset();
        r.state_hash.reset();
        if (res.ok()) {
            if (r.op == ledger::OpKind::CreateOffer || r.op == ledger::OpKind::CreateSolution)
                r.result_id = res.id;
            if (checkpoint_hashes && r.op == ledger::OpKind::Finalize)
                r.state_hash = ledger::state_hash(out.contract);
        }
        out.ops.push_back(std::move(r));
    }
    out.events = out.contract.events();
    return out;
}

}  // namespace agora::audit
