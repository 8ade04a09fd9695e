#pragma once

#include <string_view>

#include "maltls/bytes.hpp"

namespace maltls {

// Strict RFC 4648 decoder; whitespace is tolerated (PEM wraps lines).
// Throws MalformedPem on any other irregularity.
Bytes base64_decode(std::string_view text);

}  // namespace maltls
