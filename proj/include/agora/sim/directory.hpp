#pragma once

#include <map>
#include <string>

#include "agora/errors.hpp"
#include "agora/types.hpp"

namespace agora::sim {

// In-process name registry: agents and the contract register endpoints under
// unique names; everyone else looks them up.
struct Endpoint {
    std::string kind;  // "contract" | "agent"
    ActorId id = 0;

    friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

class Directory {
public:
    void register_endpoint(const std::string& name, Endpoint endpoint) {
        auto [it, inserted] = entries_.emplace(name, std::move(endpoint));
        if (!inserted) throw Error(Errc::DuplicateName, name);
    }

    const Endpoint& lookup(const std::string& name) const {
        auto it = entries_.find(name);
        if (it == entries_.end()) throw Error(Errc::NotFound, name);
        return it->second;
    }

    bool contains(const std::string& name) const { return entries_.count(name) > 0; }

    const std::map<std::string, Endpoint>& entries() const { return entries_; }

private:
    std::map<std::string, Endpoint> entries_;
};

}  // namespace agora::sim
