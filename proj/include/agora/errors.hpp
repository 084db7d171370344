#pragma once

#include <stdexcept>
#include <string>

namespace agora {

// Library-level error conditions. Contract-operation rejections are not
// errors; they are ordinary return values (see ledger/contract.hpp).
enum class Errc {
    ZeroQuantityType,
    Overflow,
    UnknownOffer,
    MissingWeight,
    InstanceTooLarge,
    MalformedStream,
    ChannelClosed,
    ConfigError,
    IoError,
    CorruptLog,
    DuplicateName,
    NotFound,
    UnknownAgent,
    IdOutOfRange,
    TooFewPoints,
    EncodingCapacity,
    NegativeEnergy,
    ParseError,
    WrongIntervalCount,
};

inline const char* to_string(Errc c) {
    switch (c) {
        case Errc::ZeroQuantityType: return "ZeroQuantityType";
        case Errc::Overflow: return "Overflow";
        case Errc::UnknownOffer: return "UnknownOffer";
        case Errc::MissingWeight: return "MissingWeight";
        case Errc::InstanceTooLarge: return "InstanceTooLarge";
        case Errc::MalformedStream: return "MalformedStream";
        case Errc::ChannelClosed: return "ChannelClosed";
        case Errc::ConfigError: return "ConfigError";
        case Errc::IoError: return "IoError";
        case Errc::CorruptLog: return "CorruptLog";
        case Errc::DuplicateName: return "DuplicateName";
        case Errc::NotFound: return "NotFound";
        case Errc::UnknownAgent: return "UnknownAgent";
        case Errc::IdOutOfRange: return "IdOutOfRange";
        case Errc::TooFewPoints: return "TooFewPoints";
        case Errc::EncodingCapacity: return "EncodingCapacity";
        case Errc::NegativeEnergy: return "NegativeEnergy";
        case Errc::ParseError: return "ParseError";
        case Errc::WrongIntervalCount: return "WrongIntervalCount";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace agora
