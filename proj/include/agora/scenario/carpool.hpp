#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "agora/errors.hpp"
#include "agora/scenario/kmeans.hpp"
#include "agora/scenario/offer_spec.hpp"
#include "agora/scenario/rand.hpp"
#include "agora/scenario/ride_codec.hpp"

namespace agora::scenario {

struct GaussianComponent {
    double weight = 1.0;
    double mean_x = 0.0;
    double mean_y = 0.0;
    double stddev = 1.0;
};

// Carpool market: prosumers with sampled residences offer or request seats
// for rides (time interval, pickup point, destination). Pickup points are
// k-means centroids of the residences; a ride type is feasible for a
// prosumer when the pickup lies within its out-of-the-way radius, which is
// half the residence-to-destination distance (centered at the midpoint for
// drivers, at the residence for riders).
struct CarpoolParams {
    int prosumer_count = 75;
    double provider_probability = 0.5;
    int pickup_count = 20;
    int destination_count = 5;
    std::uint64_t start_timestamp = 1523620800;  // first interval start, unix seconds
    int interval_count = 11;                     // 7:00-9:30 at 15-minute steps
    int interval_step_minutes = 15;
    int max_window = 4;  // max consecutive intervals a prosumer is flexible over
    std::uint64_t seats_min = 1, seats_max = 3;
    std::uint64_t value_min = 5, value_max = 15;
    std::vector<GaussianComponent> residence_mixture = {
        {0.5, 0.0, 0.0, 2.0}, {0.3, 6.0, 2.0, 1.5}, {0.2, -4.0, 5.0, 1.0}};
    double destination_spread = 0.8;  // destinations cluster near the origin
    std::uint64_t seed = 1;
};

struct CarpoolProsumer {
    std::uint64_t index = 0;
    bool provider = false;
    Point residence;
    std::uint64_t destination = 0;
    std::uint64_t seats = 1;
    int first_interval = 0;
    int window = 1;
};

struct CarpoolScenario {
    std::vector<Point> residences;
    std::vector<Point> pickups;
    std::vector<Point> destinations;
    std::vector<CarpoolProsumer> prosumers;
    std::vector<OfferSpec> offers;
    std::vector<std::uint64_t> interval_timestamps;
};

inline Point sample_mixture(SeededRng& rng, const std::vector<GaussianComponent>& mix) {
    double total = 0;
    for (const GaussianComponent& g : mix) total += g.weight;
    double pick = rng.unit() * total;
    const GaussianComponent* chosen = &mix.back();
    for (const GaussianComponent& g : mix) {
        if (pick < g.weight) {
            chosen = &g;
            break;
        }
        pick -= g.weight;
    }
    return Point{rng.normal(chosen->mean_x, chosen->stddev),
                 rng.normal(chosen->mean_y, chosen->stddev)};
}

inline CarpoolScenario generate_carpool(const CarpoolParams& params) {
    if (params.pickup_count > 100 || params.destination_count > 10)
        throw Error(Errc::EncodingCapacity,
                    "ride encoding supports at most 100 pickups and 10 destinations");
    if (params.prosumer_count < params.pickup_count)
        throw Error(Errc::TooFewPoints, "need at least as many prosumers as pickup points");
    if (params.residence_mixture.empty())
        throw Error(Errc::ConfigError, "residence mixture must not be empty");

    CarpoolScenario sc;
    SeededRng root = SeededRng(params.seed);
    SeededRng res_rng = root.fork(1);
    SeededRng dest_rng = root.fork(2);
    SeededRng pros_rng = root.fork(3);

    for (int i = 0; i < params.interval_count; ++i)
        sc.interval_timestamps.push_back(params.start_timestamp +
                                         std::uint64_t(i) * params.interval_step_minutes * 60);

    for (int i = 0; i < params.prosumer_count; ++i)
        sc.residences.push_back(sample_mixture(res_rng, params.residence_mixture));

    sc.pickups = kmeans(sc.residences, std::size_t(params.pickup_count), 50, root.fork(4).raw());

    for (int i = 0; i < params.destination_count; ++i)
        sc.destinations.push_back(Point{dest_rng.normal(0.0, params.destination_spread),
                                        dest_rng.normal(0.0, params.destination_spread)});

    for (int i = 0; i < params.prosumer_count; ++i) {
        CarpoolProsumer p;
        p.index = std::uint64_t(i);
        p.residence = sc.residences[std::size_t(i)];
        p.provider = pros_rng.chance(params.provider_probability);
        p.destination = pros_rng.u64(0, std::uint64_t(params.destination_count) - 1);
        p.seats = p.provider ? pros_rng.u64(params.seats_min, params.seats_max) : 1;
        p.first_interval = int(pros_rng.u64(0, std::uint64_t(params.interval_count) - 1));
        int max_len = std::min(params.max_window, params.interval_count - p.first_interval);
        p.window = int(pros_rng.u64(1, std::uint64_t(max_len)));
        std::uint64_t value = pros_rng.u64(params.value_min, params.value_max);

        const Point& dest = sc.destinations[p.destination];
        // out-of-the-way rule: radius is half the residence-destination
        // distance; drivers detour around the route midpoint, riders around
        // home. Compared in squared form: d^2(pickup, center) <= dist^2 / 4.
        double dist2 = squared_distance(p.residence, dest);
        Point center = p.provider
                           ? Point{(p.residence.x + dest.x) / 2, (p.residence.y + dest.y) / 2}
                           : p.residence;

        OfferSpec offer;
        offer.actor_index = p.index;
        offer.providing = p.provider;
        offer.misc = p.index;
        for (int w = 0; w < p.window; ++w) {
            std::uint64_t ts = sc.interval_timestamps[std::size_t(p.first_interval + w)];
            for (std::size_t pu = 0; pu < sc.pickups.size(); ++pu) {
                if (4.0 * squared_distance(sc.pickups[pu], center) > dist2) continue;
                ResourceType t = encode_ride_type(ts, pu, p.destination);
                offer.lines[t] = OfferLine{p.seats, value};
            }
        }
        sc.prosumers.push_back(p);
        if (!offer.lines.empty()) sc.offers.push_back(std::move(offer));
    }
    return sc;
}

template <typename Json>
void from_json(const Json& j, CarpoolParams& p) {
    if (j.contains("prosumer_count")) p.prosumer_count = j.at("prosumer_count").template get<int>();
    if (j.contains("provider_probability"))
        p.provider_probability = j.at("provider_probability").template get<double>();
    if (j.contains("pickup_count")) p.pickup_count = j.at("pickup_count").template get<int>();
    if (j.contains("destination_count"))
        p.destination_count = j.at("destination_count").template get<int>();
    if (j.contains("start_timestamp"))
        p.start_timestamp = u64_from_json(j.at("start_timestamp"));
    if (j.contains("interval_count"))
        p.interval_count = j.at("interval_count").template get<int>();
    if (j.contains("interval_step_minutes"))
        p.interval_step_minutes = j.at("interval_step_minutes").template get<int>();
    if (j.contains("max_window")) p.max_window = j.at("max_window").template get<int>();
    if (j.contains("seats_min")) p.seats_min = u64_from_json(j.at("seats_min"));
    if (j.contains("seats_max")) p.seats_max = u64_from_json(j.at("seats_max"));
    if (j.contains("value_min")) p.value_min = u64_from_json(j.at("value_min"));
    if (j.contains("value_max")) p.value_max = u64_from_json(j.at("value_max"));
    if (j.contains("destination_spread"))
        p.destination_spread = j.at("destination_spread").template get<double>();
    if (j.contains("residence_mixture")) {
        p.residence_mixture.clear();
        for (const auto& gj : j.at("residence_mixture"))
            p.residence_mixture.push_back(GaussianComponent{
                gj.at("weight").template get<double>(), gj.at("mean_x").template get<double>(),
                gj.at("mean_y").template get<double>(), gj.at("stddev").template get<double>()});
    }
    if (j.contains("seed")) p.seed = u64_from_json(j.at("seed"));
}

}  // namespace agora::scenario
