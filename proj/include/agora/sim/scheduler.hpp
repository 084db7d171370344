#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "agora/types.hpp"

namespace agora::sim {

// Deterministic discrete-event scheduler. Actions run in (tick, insertion)
// order; the logical clock never moves backwards, and every contract
// operation draws a fresh, strictly larger tick via alloc_op_tick so phase
// guards see a strictly monotone clock.
class Scheduler {
public:
    using Action = std::function<void()>;

    void schedule(Tick at, Action fn) { queue_.push(Item{at, next_seq_++, std::move(fn)}); }

    bool empty() const { return queue_.empty(); }

    Tick now() const { return now_; }

    // Strictly increasing operation clock, also bounded below by the tick of
    // the action being executed.
    Tick alloc_op_tick() { return ++now_; }

    // Runs the earliest pending action. Returns false when the queue is dry.
    bool run_next() {
        if (queue_.empty()) return false;
        Item item = queue_.top();
        queue_.pop();
        if (item.tick > now_) now_ = item.tick;
        item.fn();
        return true;
    }

    void drain() {
        while (run_next()) {
        }
    }

private:
    struct Item {
        Tick tick;
        std::uint64_t seq;
        Action fn;

        bool operator>(const Item& o) const {
            return tick != o.tick ? tick > o.tick : seq > o.seq;
        }
    };

    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue_;
    Tick now_ = 0;
    std::uint64_t next_seq_ = 0;
};

}  // namespace agora::sim
