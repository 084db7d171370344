#include <catch_amalgamated.hpp>

#include "agora/feasibility.hpp"
#include "agora/objective.hpp"
#include "agora/solver/snapshot.hpp"
#include "agora/solver/strategies.hpp"
#include "support/contract_dsl.hpp"
#include "support/generators.hpp"
#include "support/tiny_enum.hpp"

using namespace agora;
using namespace agora::solver;

namespace {

MarketSnapshot snapshot_of(const OfferTable& offers, std::uint64_t precision = 1'000'000) {
    MarketSnapshot s;
    s.precision = precision;
    s.cycle = 1;
    for (const auto& [id, o] : offers)
        (o.side == Side::Providing ? s.providing : s.consuming).push_back(o);
    return s;
}

Offer posted(OfferId id, ActorId owner, Side side,
             std::initializer_list<std::pair<ResourceType, OfferLine>> lines) {
    Offer o;
    o.id = id;
    o.owner = owner;
    o.side = side;
    o.lifecycle = Lifecycle::Posted;
    for (const auto& [t, l] : lines) o.lines[t] = l;
    return o;
}

}  // namespace

TEST_CASE("snapshot_from_events tracks the offer lifecycle") {
    dsl::Market m;
    OfferId kept = m.post(10, Side::Providing, {{7, {5, 3}}});
    OfferId gone = m.post(11, Side::Providing, {{7, {9, 3}}});
    REQUIRE(m.contract.cancel_offer(11, ++m.now, gone).ok());
    ledger::OpResult never_posted = m.contract.create_offer(12, ++m.now, false, 0);
    REQUIRE(never_posted.ok());
    REQUIRE(m.contract.update_offer(12, ++m.now, never_posted.id, 7, 1, 9).ok());
    OfferId cons = m.post(13, Side::Consuming, {{7, {4, 9}}});
    REQUIRE(m.close().ok());

    MarketSnapshot snap = snapshot_from_events(m.contract.events(), 1'000'000);
    CHECK(snap.cycle == 1);
    REQUIRE(snap.providing.size() == 1);
    CHECK(snap.providing[0].id == kept);
    CHECK(snap.providing[0].owner == 10);
    CHECK(snap.providing[0].lines.at(7) == OfferLine{5, 3});
    REQUIRE(snap.consuming.size() == 1);
    CHECK(snap.consuming[0].id == cons);
}

TEST_CASE("snapshot_from_events rejects a disordered stream") {
    dsl::Market m;
    m.post(10, Side::Providing, {{7, {5, 3}}});
    REQUIRE(m.close().ok());
    std::vector<ledger::Event> events = m.contract.events();
    std::swap(events[0], events[1]);
    CHECK_THROWS_MATCHES(snapshot_from_events(events, 1000), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::MalformedStream; }));
    std::vector<ledger::Event> no_close(m.contract.events().begin(),
                                        m.contract.events().end() - 1);
    CHECK_THROWS_AS(snapshot_from_events(no_close, 1000), Error);
}

TEST_CASE("snapshot resets across cycles") {
    dsl::Market m;
    m.post(10, Side::Providing, {{7, {5, 3}}});
    REQUIRE(m.close().ok());
    REQUIRE(m.finalize().ok());
    OfferId again = m.post(10, Side::Providing, {{8, {2, 4}}});
    REQUIRE(m.close().ok());
    MarketSnapshot snap = snapshot_from_events(m.contract.events(), 1'000'000);
    CHECK(snap.cycle == 2);
    REQUIRE(snap.providing.size() == 1);
    CHECK(snap.providing[0].id == again);
    CHECK(snap.providing[0].lines.count(8) == 1);
}

TEST_CASE("solve: empty market yields the empty allocation") {
    MarketSnapshot snap;
    snap.precision = 1'000'000;
    for (Strategy s :
         {Strategy::ExactEnumeration, Strategy::BranchAndBound, Strategy::GreedyLocalSearch}) {
        SolverConfig cfg;
        cfg.strategy = s;
        CHECK(solve(snap, cfg).empty());
    }
}

TEST_CASE("solve: single matched pair at the midpoint price") {
    OfferTable offers;
    offers[0] = posted(0, 10, Side::Providing, {{7, {500, 5}}});
    offers[1] = posted(1, 11, Side::Consuming, {{7, {500, 10}}});
    MarketSnapshot snap = snapshot_of(offers);

    for (Strategy s :
         {Strategy::ExactEnumeration, Strategy::BranchAndBound, Strategy::GreedyLocalSearch}) {
        SolverConfig cfg;
        cfg.strategy = s;
        Allocation alloc = solve(snap, cfg);
        REQUIRE(alloc.assignments.size() == 1);
        CHECK(alloc.assignments[0].quantity == 500);
        CHECK(alloc.assignments[0].unit_price == 7);  // floor((5+10)/2)
        CHECK(objective(alloc, offers, ObjectiveSpec{}) == 500);
    }
}

TEST_CASE("solve: unsatisfiable reservation band yields the empty allocation") {
    OfferTable offers;
    offers[0] = posted(0, 10, Side::Providing, {{7, {500, 10}}});
    offers[1] = posted(1, 11, Side::Consuming, {{7, {500, 5}}});
    SolverConfig cfg;
    cfg.strategy = Strategy::ExactEnumeration;
    CHECK(solve(snapshot_of(offers), cfg).empty());
}

TEST_CASE("price rules") {
    OfferTable offers;
    offers[0] = posted(0, 10, Side::Providing, {{7, {10, 4}}});
    offers[1] = posted(1, 11, Side::Consuming, {{7, {10, 9}}});
    MarketSnapshot snap = snapshot_of(offers);

    SolverConfig cfg;
    cfg.strategy = Strategy::GreedyLocalSearch;
    cfg.price_rule = PriceRule::ProviderReservation;
    CHECK(solve(snap, cfg).assignments[0].unit_price == 4);
    cfg.price_rule = PriceRule::ConsumerReservation;
    CHECK(solve(snap, cfg).assignments[0].unit_price == 9);
    cfg.price_rule = PriceRule::Midpoint;
    CHECK(solve(snap, cfg).assignments[0].unit_price == 6);

    SECTION("midpoint clamps into regulator bounds") {
        cfg.constraints.price_min[7] = 7;
        Allocation alloc = solve(snap, cfg);
        CHECK(alloc.assignments[0].unit_price == 7);
        OfferTable t = snap.table();
        CHECK(check_allocation(t, alloc, cfg.constraints, snap.precision).feasible);
    }
}

TEST_CASE("exact strategies refuse oversized instances") {
    gen::Rng rng(5);
    gen::InstanceShape shape;
    shape.max_providers = 8;
    shape.max_consumers = 8;
    OfferTable offers;
    while (offers.size() <= 13) offers = gen::random_offers(rng, shape);
    SolverConfig cfg;
    cfg.strategy = Strategy::ExactEnumeration;
    cfg.exact_size_cap = 12;
    CHECK_THROWS_MATCHES(solve(snapshot_of(offers), cfg), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::InstanceTooLarge; }));
}

TEST_CASE("enumeration agrees with an independent brute force at small scale") {
    gen::Rng rng(31337);
    gen::InstanceShape shape;
    shape.max_providers = 2;
    shape.max_consumers = 2;
    shape.max_types = 2;
    shape.max_quantity = 3;
    for (int iter = 0; iter < 60; ++iter) {
        OfferTable offers = gen::random_offers(rng, shape);
        MarketSnapshot snap = snapshot_of(offers);
        SolverConfig cfg;
        cfg.strategy = Strategy::ExactEnumeration;
        Allocation alloc = solve(snap, cfg);
        std::int64_t got = objective(alloc, offers, ObjectiveSpec{});
        std::int64_t want = tiny::brute_force_optimum(offers, snap.precision);
        REQUIRE(got == want);
    }
}

TEST_CASE("branch and bound matches enumeration; local search matches at 3x3x2") {
    gen::Rng rng(2718);
    gen::InstanceShape shape;
    shape.max_providers = 3;
    shape.max_consumers = 3;
    shape.max_types = 2;
    shape.max_quantity = 5;
    for (int iter = 0; iter < 60; ++iter) {
        OfferTable offers = gen::random_offers(rng, shape);
        MarketSnapshot snap = snapshot_of(offers);
        SolverConfig cfg;
        cfg.strategy = Strategy::ExactEnumeration;
        std::int64_t exact = objective(solve(snap, cfg), offers, ObjectiveSpec{});
        cfg.strategy = Strategy::BranchAndBound;
        std::int64_t bb = objective(solve(snap, cfg), offers, ObjectiveSpec{});
        REQUIRE(bb == exact);
        cfg.strategy = Strategy::GreedyLocalSearch;
        std::int64_t gls = objective(solve(snap, cfg), offers, ObjectiveSpec{});
        REQUIRE(gls == exact);
    }
}

TEST_CASE("soundness: solver output always verifies") {
    gen::Rng rng(909090);
    gen::InstanceShape shape;
    int iters = 10000;
    for (int iter = 0; iter < iters; ++iter) {
        OfferTable offers = gen::random_offers(rng, shape);
        MarketSnapshot snap = snapshot_of(offers);
        SolverConfig cfg;
        cfg.strategy = (iter % 3 == 0)   ? Strategy::ExactEnumeration
                       : (iter % 3 == 1) ? Strategy::BranchAndBound
                                         : Strategy::GreedyLocalSearch;
        cfg.objective.kind = (iter % 2 == 0) ? ObjectiveKind::TotalQuantity
                                             : ObjectiveKind::TotalBenefit;
        if (iter % 5 == 0) {
            cfg.constraints.price_min[1] = 3;
            cfg.constraints.price_max[1] = 8;
            cfg.constraints.system_limit[2] = 4;
        }
        Allocation alloc = solve(snap, cfg);
        OfferTable table = snap.table();
        FeasibilityVerdict v = check_allocation(table, alloc, cfg.constraints, snap.precision);
        REQUIRE(v.feasible);
        for (const Assignment& a : alloc.assignments) REQUIRE(a.quantity >= 1);
    }
}

TEST_CASE("determinism: same snapshot and seed give identical allocations") {
    gen::Rng rng(1212);
    gen::InstanceShape shape;
    shape.max_providers = 4;
    shape.max_consumers = 4;
    for (int iter = 0; iter < 40; ++iter) {
        OfferTable offers = gen::random_offers(rng, shape);
        MarketSnapshot snap = snapshot_of(offers);
        for (Strategy s : {Strategy::ExactEnumeration, Strategy::BranchAndBound,
                           Strategy::GreedyLocalSearch}) {
            SolverConfig cfg;
            cfg.strategy = s;
            cfg.seed = 42;
            CHECK(solve(snap, cfg) == solve(snap, cfg));
        }
    }
}

TEST_CASE("heuristic dominance: local search never loses to pure greedy") {
    gen::Rng rng(321);
    gen::InstanceShape shape;
    shape.max_providers = 4;
    shape.max_consumers = 4;
    shape.max_types = 3;
    for (int iter = 0; iter < 150; ++iter) {
        OfferTable offers = gen::random_offers(rng, shape);
        MarketSnapshot snap = snapshot_of(offers);
        SolverConfig cfg;
        Instance inst = build_instance(snap, cfg);
        std::int64_t greedy = objective(solve_greedy(inst), offers, cfg.objective);
        std::int64_t gls = objective(solve_greedy_local_search(inst, 100), offers, cfg.objective);
        REQUIRE(gls >= greedy);
    }
}

TEST_CASE("weighted objective skips types without weights") {
    OfferTable offers;
    offers[0] = posted(0, 10, Side::Providing, {{1, {5, 2}}, {2, {5, 2}}});
    offers[1] = posted(1, 11, Side::Consuming, {{1, {5, 8}}, {2, {5, 8}}});
    SolverConfig cfg;
    cfg.strategy = Strategy::ExactEnumeration;
    cfg.objective = ObjectiveSpec{ObjectiveKind::WeightedQuantity, {{1, 4}}};
    Allocation alloc = solve(snapshot_of(offers), cfg);
    REQUIRE(alloc.assignments.size() == 1);
    CHECK(alloc.assignments[0].rtype == 1);
    CHECK(objective(alloc, offers, cfg.objective) == 20);
}

TEST_CASE("solver config JSON round-trip") {
    SolverConfig cfg;
    cfg.strategy = Strategy::BranchAndBound;
    cfg.price_rule = PriceRule::ConsumerReservation;
    cfg.exact_size_cap = 9;
    cfg.time_budget_ms = 250;
    cfg.seed = 777;
    cfg.objective = ObjectiveSpec{ObjectiveKind::WeightedQuantity, {{900, 2}}};
    cfg.constraints.price_min[900] = 1;
    nlohmann::json j;
    to_json(j, cfg);
    SolverConfig back;
    from_json(j, back);
    CHECK(back.strategy == cfg.strategy);
    CHECK(back.price_rule == cfg.price_rule);
    CHECK(back.exact_size_cap == cfg.exact_size_cap);
    CHECK(back.time_budget_ms == cfg.time_budget_ms);
    CHECK(back.seed == cfg.seed);
    CHECK(back.objective == cfg.objective);
    CHECK(back.constraints == cfg.constraints);
}
