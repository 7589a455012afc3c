#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace bhsim {

using NodeId = std::uint32_t;
using SeqNum = std::uint32_t;

/// Simulation time in seconds.
using SimTime = double;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

/// Raised for invalid scenario or API input (bad ids, scheduling in the past, ...).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SimError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bhsim
