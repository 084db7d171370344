#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "agora/errors.hpp"
#include "agora/ledger/canonical.hpp"
#include "agora/ledger/contract.hpp"
#include "agora/ledger/oplog.hpp"

namespace agora::sim {

struct ReplayOutcome {
    ledger::Contract contract;
    std::uint64_t ops_applied = 0;
    std::string final_hash;
};

// Replays an operation log through a fresh contract. Detects tampering three
// ways: seq gaps (CorruptLog from the reader), outcome divergence, and
// state-hash mismatches at the per-finalize checkpoints.
inline ReplayOutcome replay_ops(const std::vector<ledger::OpRecord>& ops) {
    ReplayOutcome out;
    for (const ledger::OpRecord& r : ops) {
        ledger::OpResult res = ledger::apply_op(out.contract, r);
        if (res.outcome() != r.outcome)
            throw Error(Errc::CorruptLog, "outcome mismatch at seq " + std::to_string(r.seq) +
                                              ": log says " + r.outcome + ", replay says " +
                                              res.outcome());
        if (r.state_hash) {
            std::string h = ledger::state_hash(out.contract);
            if (h != *r.state_hash)
                throw Error(Errc::CorruptLog,
                            "checkpoint hash mismatch at seq " + std::to_string(r.seq));
        }
        ++out.ops_applied;
    }
    out.final_hash = ledger::state_hash(out.contract);
    return out;
}

inline ReplayOutcome replay(const std::filesystem::path& ops_path) {
    return replay_ops(ledger::read_op_log(ops_path));
}

}  // namespace agora::sim
