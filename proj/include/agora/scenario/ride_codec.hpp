#pragma once

#include <cstdint>
#include <tuple>

#include "agora/errors.hpp"
#include "agora/types.hpp"

namespace agora::scenario {

// A ride type packs (pickup timestamp, pickup point id, destination id) into
// one 64-bit code: timestamp * 1000 + pickup_id * 10 + destination_id.
// E.g. timestamp 1523621700, pickup 15, destination 3 -> 1523621700153.
inline ResourceType encode_ride_type(std::uint64_t timestamp, std::uint64_t pickup_id,
                                     std::uint64_t destination_id) {
    if (pickup_id >= 100) throw Error(Errc::IdOutOfRange, "pickup id must be < 100");
    if (destination_id >= 10) throw Error(Errc::IdOutOfRange, "destination id must be < 10");
    if (timestamp > (~std::uint64_t{0} - 999) / 1000)
        throw Error(Errc::Overflow, "timestamp too large for the 64-bit ride encoding");
    return timestamp * 1000 + pickup_id * 10 + destination_id;
}

struct RideType {
    std::uint64_t timestamp = 0;
    std::uint64_t pickup_id = 0;
    std::uint64_t destination_id = 0;

    friend bool operator==(const RideType&, const RideType&) = default;
};

inline RideType decode_ride_type(ResourceType rtype) {
    RideType r;
    r.destination_id = rtype % 10;
    r.pickup_id = (rtype % 1000) / 10;
    r.timestamp = rtype / 1000;
    return r;
}

}  // namespace agora::scenario
