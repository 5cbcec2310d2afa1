#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "b2mdf/errors.hpp"

namespace b2mdf {

using json = nlohmann::json;

// Canonical encoding used for everything that gets hashed or persisted:
// object keys in UTF-8 byte order, no insignificant whitespace, base-10
// integers, shortest round-trip floats, binary data pre-encoded as lowercase
// hex strings by the payload builders. Equal values encode to equal bytes.
//
// Throws Error{UnencodableValue} for null, binary, discarded, or non-finite
// numbers anywhere in the value.
std::string canonical_bytes(const json& value);

// Strict parse of a canonical document: rejects trailing garbage.
// Throws Error{UnparseableChain} on any syntax error.
json parse_canonical(std::string_view text);

std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(std::string_view hex);  // Error{BadHexString}

}  // namespace b2mdf
