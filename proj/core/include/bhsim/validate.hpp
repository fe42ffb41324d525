#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "bhsim/messages.hpp"

namespace bhsim {

/// Returns the first invariant the message violates, or nullopt when it is
/// well formed for a scenario with `num_nodes` nodes.
std::optional<std::string> validate_message(const Message& msg, std::uint32_t num_nodes);

}  // namespace bhsim
