#include <filesystem>
#include <fstream>

#include <catch_amalgamated.hpp>

#include "agora/scenario/carpool.hpp"
#include "agora/scenario/energy.hpp"
#include "agora/scenario/kmeans.hpp"
#include "agora/scenario/ride_codec.hpp"

using namespace agora;
using namespace agora::scenario;

TEST_CASE("ride type encoding packs timestamp, pickup, destination") {
    CHECK(encode_ride_type(1523621700, 15, 3) == 1523621700153ull);
    CHECK(encode_ride_type(1523623500, 17, 3) == 1523623500173ull);
    CHECK(encode_ride_type(0, 0, 0) == 0);

    RideType r = decode_ride_type(1523621700153ull);
    CHECK(r.timestamp == 1523621700);
    CHECK(r.pickup_id == 15);
    CHECK(r.destination_id == 3);
    CHECK(decode_ride_type(0) == RideType{0, 0, 0});
}

TEST_CASE("ride type codec errors") {
    CHECK_THROWS_MATCHES(encode_ride_type(1, 100, 0), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::IdOutOfRange; }));
    CHECK_THROWS_MATCHES(encode_ride_type(1, 0, 10), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::IdOutOfRange; }));
    CHECK_THROWS_MATCHES(encode_ride_type(~std::uint64_t{0} / 100, 0, 0), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::Overflow; }));
}

TEST_CASE("ride type codec round-trips on random triples") {
    SeededRng rng(123);
    for (int i = 0; i < 1000; ++i) {
        std::uint64_t ts = rng.u64(0, 4'000'000'000ull);
        std::uint64_t pu = rng.u64(0, 99);
        std::uint64_t dst = rng.u64(0, 9);
        RideType back = decode_ride_type(encode_ride_type(ts, pu, dst));
        REQUIRE(back == RideType{ts, pu, dst});
    }
}

TEST_CASE("kmeans: k equal to point count keeps every point") {
    std::vector<Point> pts = {{0, 0}, {5, 1}, {-3, 2}, {7, 7}};
    std::vector<Point> cs = kmeans(pts, pts.size(), 20, 42);
    REQUIRE(cs.size() == pts.size());
    for (const Point& p : pts) {
        bool found = false;
        for (const Point& c : cs) found = found || (c == p);
        CHECK(found);
    }
}

TEST_CASE("kmeans: two separated clouds are split") {
    SeededRng rng(9);
    std::vector<Point> pts;
    for (int i = 0; i < 40; ++i) pts.push_back(Point{rng.normal(0, 0.5), rng.normal(0, 0.5)});
    for (int i = 0; i < 40; ++i) pts.push_back(Point{rng.normal(100, 0.5), rng.normal(50, 0.5)});
    std::vector<Point> cs = kmeans(pts, 2, 50, 4);
    REQUIRE(cs.size() == 2);
    auto near = [](const Point& c, double x, double y) {
        return std::abs(c.x - x) < 5 && std::abs(c.y - y) < 5;
    };
    bool split = (near(cs[0], 0, 0) && near(cs[1], 100, 50)) ||
                 (near(cs[1], 0, 0) && near(cs[0], 100, 50));
    CHECK(split);
}

TEST_CASE("kmeans: WCSS is non-increasing across iterations") {
    SeededRng rng(77);
    std::vector<Point> pts;
    for (int i = 0; i < 120; ++i) pts.push_back(Point{rng.normal(0, 10), rng.normal(0, 10)});
    // the i-iteration run is a prefix of the (i+1)-iteration run under the
    // same seed, so successive runs walk the Lloyd iterates
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t iters = 1; iters <= 12; ++iters) {
        double w = wcss(pts, kmeans(pts, 8, iters, 5));
        CHECK(w <= prev + 1e-9);
        prev = w;
    }
}

TEST_CASE("kmeans: too few points") {
    std::vector<Point> pts = {{0, 0}};
    CHECK_THROWS_MATCHES(kmeans(pts, 2, 10, 1), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::TooFewPoints; }));
}

TEST_CASE("carpool generation obeys the offer construction rules") {
    CarpoolParams params;
    params.seed = 20260810;
    CarpoolScenario sc = generate_carpool(params);

    CHECK(sc.residences.size() == 75);
    CHECK(sc.pickups.size() == 20);
    CHECK(sc.destinations.size() == 5);
    CHECK(sc.interval_timestamps.size() == 11);
    CHECK(!sc.offers.empty());

    for (const OfferSpec& offer : sc.offers) {
        const CarpoolProsumer& p = sc.prosumers.at(offer.actor_index);
        REQUIRE(offer.providing == p.provider);
        const Point& dest = sc.destinations[p.destination];
        double dist2 = squared_distance(p.residence, dest);
        Point center = p.provider ? Point{(p.residence.x + dest.x) / 2,
                                          (p.residence.y + dest.y) / 2}
                                  : p.residence;
        for (const auto& [t, line] : offer.lines) {
            RideType r = decode_ride_type(t);
            // quantity: seats for drivers, 1 for riders
            CHECK(line.quantity == (p.provider ? p.seats : 1));
            if (!p.provider) CHECK(line.quantity == 1);
            CHECK(r.destination_id == p.destination);
            // the interval lies inside the prosumer's window
            bool in_window = false;
            for (int w = 0; w < p.window; ++w)
                in_window = in_window ||
                            sc.interval_timestamps[std::size_t(p.first_interval + w)] ==
                                r.timestamp;
            CHECK(in_window);
            // the pickup is within the out-of-the-way radius
            CHECK(4.0 * squared_distance(sc.pickups[r.pickup_id], center) <= dist2);
        }
        // every pickup in range appears for every window interval
        std::size_t in_range = 0;
        for (const Point& pu : sc.pickups)
            if (4.0 * squared_distance(pu, center) <= dist2) ++in_range;
        CHECK(offer.lines.size() == in_range * std::size_t(p.window));
    }
}

TEST_CASE("carpool generation is deterministic under the seed") {
    CarpoolParams params;
    params.seed = 99;
    CarpoolScenario a = generate_carpool(params);
    CarpoolScenario b = generate_carpool(params);
    CHECK(a.offers == b.offers);
    params.seed = 100;
    CarpoolScenario c = generate_carpool(params);
    CHECK(a.offers != c.offers);
}

TEST_CASE("carpool generation validates encoding capacity") {
    CarpoolParams params;
    params.destination_count = 11;
    CHECK_THROWS_MATCHES(generate_carpool(params), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::EncodingCapacity; }));
}

TEST_CASE("energy: battery block becomes one spanning offer") {
    EnergyProfile p;
    p.home_id = 3;
    p.batteries.push_back(BatteryBlock{500, 36, 39});  // 9:00-9:45
    std::vector<OfferSpec> offers = energy_offers_from_profile(p, EnergyPricing{}, 3);
    REQUIRE(offers.size() == 1);
    const OfferSpec& battery = offers[0];
    CHECK(battery.providing);
    REQUIRE(battery.lines.size() == 4);
    for (ResourceType t : {900ull, 915ull, 930ull, 945ull}) {
        REQUIRE(battery.lines.count(t) == 1);
        CHECK(battery.lines.at(t).quantity == 500);
    }
}

TEST_CASE("energy: per-interval production and consumption offers") {
    EnergyProfile p;
    p.home_id = 0;
    p.net_power_w[40] = -300;  // consuming 300 W at 10:00
    std::vector<OfferSpec> offers = energy_offers_from_profile(p, EnergyPricing{}, 0);
    REQUIRE(offers.size() == 1);
    CHECK_FALSE(offers[0].providing);
    CHECK(offers[0].lines.size() == 1);
    CHECK(offers[0].lines.at(1000).quantity == 300);

    p.net_power_w[40] = 0;
    CHECK(energy_offers_from_profile(p, EnergyPricing{}, 0).empty());

    p.net_power_w[20] = 750;  // producing at 5:00
    std::vector<OfferSpec> prod = energy_offers_from_profile(p, EnergyPricing{}, 0);
    REQUIRE(prod.size() == 1);
    CHECK(prod[0].providing);
    CHECK(prod[0].lines.at(500).quantity == 750);
}

TEST_CASE("energy: negative battery energy is rejected") {
    EnergyProfile p;
    p.batteries.push_back(BatteryBlock{-5, 0, 3});
    CHECK_THROWS_MATCHES(energy_offers_from_profile(p, EnergyPricing{}, 0), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::NegativeEnergy; }));
}

TEST_CASE("energy trace CSV loading") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "agora-traces";
    fs::create_directories(dir);
    fs::path file = dir / "two_homes.csv";
    {
        std::ofstream f(file);
        f << "home_id,interval,net_power_w\n";
        for (int h = 0; h < 2; ++h)
            for (int i = 0; i < 96; ++i)
                f << h << ',' << i << ',' << (h == 0 ? 250 - i * 10 : -400) << '\n';
    }
    std::vector<EnergyProfile> profiles = load_energy_traces(file);
    REQUIRE(profiles.size() == 2);
    CHECK(profiles[0].home_id == 0);
    CHECK(profiles[0].net_power_w[0] == 250);
    CHECK(profiles[1].net_power_w[95] == -400);

    SECTION("missing interval rows are rejected") {
        fs::path bad = dir / "short.csv";
        std::ofstream f(bad);
        f << "home_id,interval,net_power_w\n";
        for (int i = 0; i < 95; ++i) f << "0," << i << ",100\n";
        f.close();
        CHECK_THROWS_MATCHES(load_energy_traces(bad), Error,
                             Catch::Matchers::Predicate<Error>([](const Error& e) {
                                 return e.code() == Errc::WrongIntervalCount;
                             }));
    }
    SECTION("garbage rows are a parse error") {
        fs::path bad = dir / "garbage.csv";
        std::ofstream f(bad);
        f << "home_id,interval,net_power_w\nnot,a,number\n";
        f.close();
        CHECK_THROWS_MATCHES(load_energy_traces(bad), Error,
                             Catch::Matchers::Predicate<Error>(
                                 [](const Error& e) { return e.code() == Errc::ParseError; }));
    }
    fs::remove_all(dir);
}

TEST_CASE("synthetic energy day: 102 homes, exactly 5 net producers") {
    EnergyParams params;
    params.seed = 4;
    std::vector<EnergyProfile> profiles = synthetic_energy_profiles(params);
    REQUIRE(profiles.size() == 102);
    int with_production = 0;
    for (const EnergyProfile& p : profiles) {
        bool positive = false;
        for (std::int64_t w : p.net_power_w) positive = positive || w > 0;
        if (positive) ++with_production;
    }
    CHECK(with_production == 5);

    int with_battery = 0;
    for (const EnergyProfile& p : profiles) with_battery += !p.batteries.empty();
    CHECK(with_battery == 2);

    // deterministic under the seed
    std::vector<EnergyProfile> again = synthetic_energy_profiles(params);
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        CHECK(profiles[i].net_power_w == again[i].net_power_w);
    }
}

TEST_CASE("generated offers satisfy the scenario contract parameters") {
    // defaults used by the run configs: num_types 256, max_quantity 1e6
    CarpoolParams cp;
    cp.seed = 8;
    for (const OfferSpec& o : generate_carpool(cp).offers) {
        CHECK(o.lines.size() <= 256);
        std::size_t usable = 0;
        for (const auto& [t, l] : o.lines) {
            CHECK(l.quantity <= 1'000'000);
            if (l.quantity > 0) ++usable;
        }
        CHECK(usable > 0);  // postable
    }
    EnergyParams ep;
    ep.seed = 8;
    for (const OfferSpec& o : energy_offers(ep)) {
        CHECK(o.lines.size() <= 256);
        std::size_t usable = 0;
        for (const auto& [t, l] : o.lines) {
            CHECK(l.quantity <= 1'000'000);
            if (l.quantity > 0) ++usable;
        }
        CHECK(usable > 0);
    }
}
