#pragma once

#include <algorithm>
#include <chrono>
#include <random>
#include <cstring>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "agora/errors.hpp"
#include "agora/solver/instance.hpp"

namespace agora::solver {

namespace detail {

// ---------------------------------------------------------------------------
// Exhaustive search: depth-first over triples in canonical provider-major
// order, trying every feasible quantity. Memoized on (triple index, active
// provider budget, consumer budgets, limit totals); earlier providers no
// longer matter once their triples are exhausted, which keeps the state space
// small. Returns the exact optimum.
// ---------------------------------------------------------------------------
class Enumerator {
public:
    explicit Enumerator(const Instance& inst) : inst_(inst), state_(inst) {}

    std::int64_t best_value() {
        if (inst_.triples.empty()) return 0;
        return search(0);
    }

    // Reconstructs one optimal quantity vector by walking the memoized values.
    // Picks the smallest quantity achieving the optimum at each step.
    SearchState reconstruct() {
        std::size_t n = inst_.triples.size();
        for (std::size_t i = 0; i < n; ++i) {
            std::int64_t want = search(i);
            const Triple& t = inst_.triples[i];
            std::uint64_t qmax = max_quantity_for(t, state_.prov_used[t.prov],
                                                  state_.cons_used[t.cons], inst_.precision());
            if (int slot = inst_.limit_slot(t.rtype); slot >= 0)
                qmax = std::min(qmax, inst_.limits[slot] - state_.limit_used[slot]);
            bool placed = false;
            for (std::uint64_t q = 0; q <= qmax && !placed; ++q) {
                state_.add(inst_, i, q);
                std::int64_t rest = (i + 1 < n) ? search(i + 1) : 0;
                if (std::int64_t(q) * t.unit_weight + rest == want)
                    placed = true;
                else
                    state_.remove(inst_, i, q);
            }
        }
        return state_;
    }

private:
    std::string key(std::size_t idx) const {
        const Triple& t = inst_.triples[idx];
        std::string k;
        k.reserve(16 + 8 * (state_.cons_used.size() + state_.limit_used.size()));
        auto put = [&](std::uint64_t v) {
            char buf[8];
            std::memcpy(buf, &v, 8);
            k.append(buf, 8);
        };
        put(idx);
        put(state_.prov_used[t.prov]);
        for (std::uint64_t u : state_.cons_used) put(u);
        for (std::uint64_t u : state_.limit_used) put(u);
        return k;
    }

    std::int64_t search(std::size_t idx) {
        if (idx == inst_.triples.size()) return 0;
        std::string k = key(idx);
        if (auto it = memo_.find(k); it != memo_.end()) return it->second;

        const Triple& t = inst_.triples[idx];
        std::uint64_t qmax = max_quantity_for(t, state_.prov_used[t.prov],
                                              state_.cons_used[t.cons], inst_.precision());
        if (int slot = inst_.limit_slot(t.rtype); slot >= 0)
            qmax = std::min(qmax, inst_.limits[slot] - state_.limit_used[slot]);

        std::int64_t best = std::numeric_limits<std::int64_t>::min();
        for (std::uint64_t q = 0; q <= qmax; ++q) {
            state_.add(inst_, idx, q);
            std::int64_t value = std::int64_t(q) * t.unit_weight + search(idx + 1);
            state_.remove(inst_, idx, q);
            best = std::max(best, value);
        }
        if (memo_.size() < kMemoCap) memo_.emplace(std::move(k), best);
        return best;
    }

    static constexpr std::size_t kMemoCap = 4'000'000;
    const Instance& inst_;
    SearchState state_;
    std::unordered_map<std::string, std::int64_t> memo_;
};

// ---------------------------------------------------------------------------
// Branch and bound: depth-first over triples ordered by descending per-unit
// weight, quantities tried largest-first, pruned by an admissible two-sided
// fractional bound. Independent of the enumerator's memoized route.
// ---------------------------------------------------------------------------
class BranchAndBound {
public:
    explicit BranchAndBound(const Instance& inst) : inst_(inst), state_(inst) {
        order_.resize(inst.triples.size());
        std::iota(order_.begin(), order_.end(), 0);
        std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
            return inst.triples[a].unit_weight > inst.triples[b].unit_weight;
        });
    }

    SearchState run(const SearchState& incumbent) {
        best_state_ = incumbent;
        best_value_ = incumbent.objective;
        dfs(0);
        return best_state_;
    }

private:
    // Optimistic completion value for triples order_[idx..]: each offer can
    // ship at most ceil(budget * oQmax / P) more units, each worth at most its
    // best remaining weight; both sides must agree, so take the smaller.
    std::int64_t upper_bound(std::size_t idx) const {
        std::map<std::size_t, std::pair<std::uint64_t, std::int64_t>> prov, cons;
        for (std::size_t k = idx; k < order_.size(); ++k) {
            const Triple& t = inst_.triples[order_[k]];
            if (t.unit_weight <= 0) continue;
            auto& p = prov[t.prov];
            p.first = std::max(p.first, t.prov_quantity);
            p.second = std::max(p.second, t.unit_weight);
            auto& c = cons[t.cons];
            c.first = std::max(c.first, t.cons_quantity);
            c.second = std::max(c.second, t.unit_weight);
        }
        uint128 p = inst_.precision();
        int128 prov_side = 0, cons_side = 0;
        for (const auto& [i, v] : prov) {
            std::uint64_t budget = inst_.precision() - state_.prov_used[i];
            uint128 units = (uint128(budget) * v.first + p - 1) / p;
            prov_side += int128(units) * v.second;
        }
        for (const auto& [i, v] : cons) {
            std::uint64_t budget = inst_.precision() - state_.cons_used[i];
            uint128 units = (uint128(budget) * v.first + p - 1) / p;
            cons_side += int128(units) * v.second;
        }
        int128 bound = prov_side < cons_side ? prov_side : cons_side;
        constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();
        return bound > kMax ? kMax : std::int64_t(bound);
    }

    void dfs(std::size_t idx) {
        if (state_.objective > best_value_) {
            best_value_ = state_.objective;
            best_state_ = state_;
        }
        if (idx == order_.size()) return;
        if (state_.objective + upper_bound(idx) <= best_value_) return;

        std::size_t ti = order_[idx];
        const Triple& t = inst_.triples[ti];
        std::uint64_t qmax = max_quantity_for(t, state_.prov_used[t.prov],
                                              state_.cons_used[t.cons], inst_.precision());
        if (int slot = inst_.limit_slot(t.rtype); slot >= 0)
            qmax = std::min(qmax, inst_.limits[slot] - state_.limit_used[slot]);
        for (std::uint64_t q = qmax;; --q) {
            state_.add(inst_, ti, q);
            dfs(idx + 1);
            state_.remove(inst_, ti, q);
            if (q == 0) break;
        }
    }

    const Instance& inst_;
    SearchState state_;
    std::vector<std::size_t> order_;
    SearchState best_state_{inst_};
    std::int64_t best_value_ = 0;
};

// Greedy fill by descending per-unit weight (ties: canonical order). This is
// the baseline the local search must never fall below. `skip` excludes one
// triple, for the drop-refill move.
inline void greedy_fill_in_order(const Instance& inst, SearchState& state,
                                 const std::vector<std::size_t>& order,
                                 std::size_t skip = std::size_t(-1)) {
    for (std::size_t ti : order) {
        if (inst.triples[ti].unit_weight <= 0) break;
        if (ti == skip) continue;
        std::uint64_t q = state.headroom(inst, ti);
        if (q > 0) state.add(inst, ti, q);
    }
}

inline std::vector<std::size_t> weight_order(const Instance& inst) {
    std::vector<std::size_t> order(inst.triples.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return inst.triples[a].unit_weight > inst.triples[b].unit_weight;
    });
    return order;
}

inline void greedy_fill(const Instance& inst, SearchState& state,
                        std::size_t skip = std::size_t(-1)) {
    greedy_fill_in_order(inst, state, weight_order(inst), skip);
}

class LocalSearch {
public:
    LocalSearch(const Instance& inst, std::uint64_t budget_ms)
        : inst_(inst),
          deadline_(std::chrono::steady_clock::now() + std::chrono::milliseconds(budget_ms)) {
        prov_triples_.resize(inst.snap.providing.size());
        cons_triples_.resize(inst.snap.consuming.size());
        limit_triples_.resize(inst.limits.size());
        for (std::size_t ti = 0; ti < inst.triples.size(); ++ti) {
            const Triple& t = inst.triples[ti];
            prov_triples_[t.prov].push_back(ti);
            cons_triples_[t.cons].push_back(ti);
            if (int slot = inst.limit_slot(t.rtype); slot >= 0)
                limit_triples_[slot].push_back(ti);
        }
    }

    void improve(SearchState& state) {
        bool improved = true;
        while (improved && !expired()) {
            improved = grow(state);
            if (!expired() && transfer(state)) improved = true;
            if (!improved && !expired() && drop_refill(state)) improved = true;
        }
    }

    bool expired() const { return std::chrono::steady_clock::now() >= deadline_; }

private:
    bool grow(SearchState& state) {
        bool any = false;
        for (std::size_t ti = 0; ti < inst_.triples.size(); ++ti) {
            if (inst_.triples[ti].unit_weight <= 0) continue;
            std::uint64_t q = state.headroom(inst_, ti);
            if (q > 0) {
                state.add(inst_, ti, q);
                any = true;
            }
        }
        return any;
    }

    // Move quantity from a lower-weight triple to a higher-weight one when the
    // freed budget buys a strictly better replacement. Only triples sharing an
    // offer or a limited type with the source can gain headroom from the move.
    bool transfer(SearchState& state) {
        for (std::size_t src = 0; src < inst_.triples.size(); ++src) {
            if (expired()) return false;
            if (state.qty[src] == 0) continue;
            const Triple& s = inst_.triples[src];
            std::int64_t w_src = s.unit_weight;
            auto try_dsts = [&](const std::vector<std::size_t>& dsts) -> bool {
                for (std::size_t dst : dsts) {
                    if (dst == src || inst_.triples[dst].unit_weight <= w_src) continue;
                    std::int64_t w_dst = inst_.triples[dst].unit_weight;
                    std::uint64_t q_src = state.qty[src];
                    for (std::uint64_t dq = 1; dq <= q_src; ++dq) {
                        state.remove(inst_, src, dq);
                        std::uint64_t gain_q = state.headroom(inst_, dst);
                        if (std::int64_t(gain_q) * w_dst > std::int64_t(dq) * w_src) {
                            state.add(inst_, dst, gain_q);
                            return true;
                        }
                        state.add(inst_, src, dq);
                    }
                }
                return false;
            };
            if (try_dsts(prov_triples_[s.prov])) return true;
            if (try_dsts(cons_triples_[s.cons])) return true;
            if (int slot = inst_.limit_slot(s.rtype); slot >= 0)
                if (try_dsts(limit_triples_[slot])) return true;
        }
        return false;
    }

    // Composite move: drop one assignment entirely, refill greedily without
    // it (otherwise the refill reinstates the exact same assignment), then
    // allow it back in a final grow. Keep the result only when strictly
    // better overall. Too costly beyond desk-scale instances; the time budget
    // governs full-scale runs anyway.
    bool drop_refill(SearchState& state) {
        if (inst_.triples.size() > kDropRefillMaxTriples) return false;
        for (std::size_t src = 0; src < inst_.triples.size(); ++src) {
            if (expired()) return false;
            if (state.qty[src] == 0) continue;
            SearchState trial = state;
            trial.remove(inst_, src, trial.qty[src]);
            greedy_fill(inst_, trial, src);
            if (std::uint64_t q = trial.headroom(inst_, src);
                q > 0 && inst_.triples[src].unit_weight > 0)
                trial.add(inst_, src, q);
            if (trial.objective > state.objective) {
                state = std::move(trial);
                return true;
            }
        }
        return false;
    }

    static constexpr std::size_t kDropRefillMaxTriples = 4000;
    const Instance& inst_;
    std::chrono::steady_clock::time_point deadline_;
    std::vector<std::vector<std::size_t>> prov_triples_;
    std::vector<std::vector<std::size_t>> cons_triples_;
    std::vector<std::vector<std::size_t>> limit_triples_;
};

}  // namespace detail

inline Allocation solve_exact_enumeration(const Instance& inst) {
    detail::Enumerator e(inst);
    return e.reconstruct().to_allocation(inst);
}

inline std::int64_t exact_enumeration_value(const Instance& inst) {
    detail::Enumerator e(inst);
    return e.best_value();
}

inline Allocation solve_branch_and_bound(const Instance& inst) {
    SearchState incumbent(inst);
    detail::greedy_fill(inst, incumbent);
    detail::BranchAndBound bb(inst);
    return bb.run(incumbent).to_allocation(inst);
}

inline Allocation solve_greedy(const Instance& inst) {
    SearchState state(inst);
    detail::greedy_fill(inst, state);
    return state.to_allocation(inst);
}

// Greedy start plus improving local search, restarted with seeded
// perturbations of the greedy tie-breaking while the time budget lasts.
// Every start is itself greedy-or-better, so the result never falls below
// the plain greedy baseline; restarts stop after a stagnation streak.
inline Allocation solve_greedy_local_search(const Instance& inst, std::uint64_t budget_ms,
                                            std::uint64_t seed = 0) {
    detail::LocalSearch ls(inst, budget_ms);
    SearchState best(inst);
    detail::greedy_fill(inst, best);
    ls.improve(best);

    std::mt19937_64 rng(seed ^ 0x677265656479ull);
    std::vector<std::size_t> order = detail::weight_order(inst);
    constexpr int kMaxRestarts = 64;
    constexpr int kStagnationCap = 12;
    int stale = 0;
    for (int r = 0; r < kMaxRestarts && stale < kStagnationCap && !ls.expired(); ++r) {
        // re-sort with random tie-breaking among equal weights
        std::vector<std::uint64_t> salt(inst.triples.size());
        for (auto& s : salt) s = rng();
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const Triple& ta = inst.triples[a];
            const Triple& tb = inst.triples[b];
            return ta.unit_weight != tb.unit_weight ? ta.unit_weight > tb.unit_weight
                                                    : salt[a] < salt[b];
        });
        SearchState state(inst);
        detail::greedy_fill_in_order(inst, state, order);
        ls.improve(state);
        if (state.objective > best.objective) {
            best = std::move(state);
            stale = 0;
        } else {
            ++stale;
        }
    }
    return best.to_allocation(inst);
}

// Entry point used by solver agents: builds the compatible-triple instance
// and dispatches on the configured strategy. Exact strategies refuse
// instances above exact_size_cap.
inline Allocation solve(const MarketSnapshot& snap, const SolverConfig& config) {
    Instance inst = build_instance(snap, config);
    switch (config.strategy) {
        case Strategy::ExactEnumeration:
            if (inst.offer_count() > config.exact_size_cap)
                throw Error(Errc::InstanceTooLarge,
                            std::to_string(inst.offer_count()) + " offers > cap " +
                                std::to_string(config.exact_size_cap));
            return solve_exact_enumeration(inst);
        case Strategy::BranchAndBound:
            if (inst.offer_count() > config.exact_size_cap)
                throw Error(Errc::InstanceTooLarge,
                            std::to_string(inst.offer_count()) + " offers > cap " +
                                std::to_string(config.exact_size_cap));
            return solve_branch_and_bound(inst);
        case Strategy::GreedyLocalSearch:
            return solve_greedy_local_search(inst, config.time_budget_ms, config.seed);
    }
    return Allocation{};
}

}  // namespace agora::solver
