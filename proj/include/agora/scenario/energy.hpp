#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "agora/errors.hpp"
#include "agora/scenario/offer_spec.hpp"
#include "agora/scenario/rand.hpp"

namespace agora::scenario {

constexpr int kIntervalsPerDay = 96;  // 15-minute intervals

// Resource types for energy use HHMM labels of the interval start:
// 0, 15, 30, 45, 100, 115, ..., 2345.
inline ResourceType interval_label(int interval) {
    int minutes = interval * 15;
    return ResourceType((minutes / 60) * 100 + minutes % 60);
}

inline int interval_from_label(ResourceType label) {
    int hh = int(label) / 100;
    int mm = int(label) % 100;
    return hh * 4 + mm / 15;
}

// A battery block: energy that can be discharged in any one interval of the
// window, or split across it (one offer, convex-combination semantics).
struct BatteryBlock {
    std::int64_t energy_wh = 0;
    int first_interval = 0;
    int last_interval = 0;
};

struct EnergyProfile {
    std::uint64_t home_id = 0;
    std::array<std::int64_t, kIntervalsPerDay> net_power_w{};  // positive = production
    std::vector<BatteryBlock> batteries;
};

struct EnergyPricing {
    std::uint64_t provider_value = 5;   // uniform reservation prices
    std::uint64_t consumer_value = 10;
};

// One offer per production interval, one per consumption interval, and one
// spanning offer per battery block.
inline std::vector<OfferSpec> energy_offers_from_profile(const EnergyProfile& profile,
                                                         const EnergyPricing& pricing,
                                                         std::uint64_t actor_index) {
    std::vector<OfferSpec> offers;
    std::uint64_t misc = 0;
    for (int i = 0; i < kIntervalsPerDay; ++i) {
        std::int64_t w = profile.net_power_w[std::size_t(i)];
        if (w == 0) continue;
        OfferSpec o;
        o.actor_index = actor_index;
        o.providing = w > 0;
        o.misc = misc++;
        std::uint64_t quantity = std::uint64_t(w > 0 ? w : -w);
        o.lines[interval_label(i)] = OfferLine{
            quantity, o.providing ? pricing.provider_value : pricing.consumer_value};
        offers.push_back(std::move(o));
    }
    for (const BatteryBlock& b : profile.batteries) {
        if (b.energy_wh < 0) throw Error(Errc::NegativeEnergy, "battery energy below zero");
        if (b.energy_wh == 0) continue;
        if (b.first_interval < 0 || b.last_interval >= kIntervalsPerDay ||
            b.first_interval > b.last_interval)
            throw Error(Errc::ConfigError, "battery window out of range");
        OfferSpec o;
        o.actor_index = actor_index;
        o.providing = true;
        o.misc = misc++;
        for (int i = b.first_interval; i <= b.last_interval; ++i)
            o.lines[interval_label(i)] =
                OfferLine{std::uint64_t(b.energy_wh), pricing.provider_value};
        offers.push_back(std::move(o));
    }
    return offers;
}

// CSV format: header `home_id,interval,net_power_w`, one row per home and
// interval, interval in 0..95, exactly 96 rows per home.
inline std::vector<EnergyProfile> load_energy_traces(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw Error(Errc::ParseError, "empty trace file");
    if (line != "home_id,interval,net_power_w")
        throw Error(Errc::ParseError, "unexpected header: " + line);

    std::map<std::uint64_t, std::map<int, std::int64_t>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string home_s, interval_s, power_s;
        if (!std::getline(ss, home_s, ',') || !std::getline(ss, interval_s, ',') ||
            !std::getline(ss, power_s))
            throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": bad row");
        try {
            std::uint64_t home = std::stoull(home_s);
            int interval = std::stoi(interval_s);
            std::int64_t power = std::stoll(power_s);
            if (interval < 0 || interval >= kIntervalsPerDay)
                throw Error(Errc::ParseError,
                            "line " + std::to_string(lineno) + ": interval out of range");
            if (!rows[home].emplace(interval, power).second)
                throw Error(Errc::ParseError,
                            "line " + std::to_string(lineno) + ": duplicate interval");
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": bad integer");
        }
    }

    std::vector<EnergyProfile> profiles;
    for (const auto& [home, per_interval] : rows) {
        if (per_interval.size() != std::size_t(kIntervalsPerDay))
            throw Error(Errc::WrongIntervalCount,
                        "home " + std::to_string(home) + " has " +
                            std::to_string(per_interval.size()) + " intervals");
        EnergyProfile p;
        p.home_id = home;
        for (const auto& [i, w] : per_interval) p.net_power_w[std::size_t(i)] = w;
        profiles.push_back(std::move(p));
    }
    return profiles;
}

struct EnergyParams {
    int homes = 102;
    int producers = 5;
    int batteries = 2;                 // first N producers also carry a battery
    std::int64_t battery_energy_wh = 500;
    int battery_first_interval = 36;   // 9:00
    int battery_last_interval = 39;    // 9:45
    EnergyPricing pricing;
    std::optional<std::string> traces_csv;  // read instead of synthesizing
    std::uint64_t seed = 1;
};

// Synthetic day: producer homes carry a midday solar hump that clears their
// base load; consumer homes draw morning and evening peaks. Exactly the
// first `producers` homes ever reach positive net power.
inline std::vector<EnergyProfile> synthetic_energy_profiles(const EnergyParams& params) {
    std::vector<EnergyProfile> profiles;
    SeededRng root(params.seed);
    for (int h = 0; h < params.homes; ++h) {
        SeededRng rng = root.fork(std::uint64_t(h) + 100);
        EnergyProfile p;
        p.home_id = std::uint64_t(h);
        bool producer = h < params.producers;
        std::int64_t base = std::int64_t(rng.u64(120, 500));
        std::int64_t solar_peak = producer ? std::int64_t(rng.u64(2500, 4000)) : 0;
        for (int i = 0; i < kIntervalsPerDay; ++i) {
            double hour = i / 4.0;
            double morning = hour >= 6 && hour < 10 ? (hour - 6) / 4.0 : 0.0;
            double evening = hour >= 17 && hour < 23 ? (23 - hour) / 6.0 : 0.0;
            std::int64_t load = base + std::int64_t(900 * morning + 1100 * evening) +
                                std::int64_t(rng.u64(0, 150));
            std::int64_t solar = 0;
            if (producer && hour >= 7 && hour < 19) {
                double mid = 13.0;
                double shape = 1.0 - (hour - mid) * (hour - mid) / 36.0;
                if (shape > 0) solar = std::int64_t(double(solar_peak) * shape);
            }
            p.net_power_w[std::size_t(i)] = solar - load;
        }
        if (producer) {
            // guarantee visible midday production regardless of load draw
            for (int i = 44; i <= 56; ++i)
                if (p.net_power_w[std::size_t(i)] < 100) p.net_power_w[std::size_t(i)] = 100;
        }
        if (h < params.batteries && producer) {
            p.batteries.push_back(BatteryBlock{params.battery_energy_wh,
                                               params.battery_first_interval,
                                               params.battery_last_interval});
        }
        profiles.push_back(std::move(p));
    }
    return profiles;
}

inline std::vector<EnergyProfile> energy_profiles(const EnergyParams& params) {
    if (params.traces_csv) return load_energy_traces(*params.traces_csv);
    return synthetic_energy_profiles(params);
}

inline std::vector<OfferSpec> energy_offers(const EnergyParams& params) {
    std::vector<OfferSpec> all;
    std::vector<EnergyProfile> profiles = energy_profiles(params);
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        std::vector<OfferSpec> offers =
            energy_offers_from_profile(profiles[i], params.pricing, std::uint64_t(i));
        all.insert(all.end(), offers.begin(), offers.end());
    }
    return all;
}

template <typename Json>
void from_json(const Json& j, EnergyParams& p) {
    if (j.contains("homes")) p.homes = j.at("homes").template get<int>();
    if (j.contains("producers")) p.producers = j.at("producers").template get<int>();
    if (j.contains("batteries")) p.batteries = j.at("batteries").template get<int>();
    if (j.contains("battery_energy_wh"))
        p.battery_energy_wh = j.at("battery_energy_wh").template get<std::int64_t>();
    if (j.contains("battery_first_interval"))
        p.battery_first_interval = j.at("battery_first_interval").template get<int>();
    if (j.contains("battery_last_interval"))
        p.battery_last_interval = j.at("battery_last_interval").template get<int>();
    if (j.contains("provider_value")) p.pricing.provider_value = u64_from_json(j.at("provider_value"));
    if (j.contains("consumer_value")) p.pricing.consumer_value = u64_from_json(j.at("consumer_value"));
    if (j.contains("traces_csv")) p.traces_csv = j.at("traces_csv").template get<std::string>();
    if (j.contains("seed")) p.seed = u64_from_json(j.at("seed"));
}

}  // namespace agora::scenario
