#include "b2mdf/canonical.hpp"

#include <cmath>

namespace b2mdf {

namespace {

void check_encodable(const json& value) {
  switch (value.type()) {
    case json::value_t::object:
      for (const auto& [key, child] : value.items()) {
        (void)key;
        check_encodable(child);
      }
      return;
    case json::value_t::array:
      for (const auto& child : value) {
        check_encodable(child);
      }
      return;
    case json::value_t::number_float:
      if (!std::isfinite(value.get<double>())) {
        throw Error(ErrorKind::UnencodableValue, "non-finite number");
      }
      return;
    case json::value_t::string:
    case json::value_t::boolean:
    case json::value_t::number_integer:
    case json::value_t::number_unsigned:
      return;
    case json::value_t::null:
      throw Error(ErrorKind::UnencodableValue, "null is not a payload value");
    case json::value_t::binary:
      throw Error(ErrorKind::UnencodableValue,
                  "raw binary must be hex-encoded by the caller");
    default:
      throw Error(ErrorKind::UnencodableValue, "unsupported value kind");
  }
}

}  // namespace

std::string canonical_bytes(const json& value) {
  check_encodable(value);
  // nlohmann objects are std::map keyed by std::string, so iteration is
  // already UTF-8 byte order; dump() emits no whitespace and shortest
  // round-trip numbers.
  return value.dump();
}

json parse_canonical(std::string_view text) {
  json parsed = json::parse(text, nullptr, false);
  if (parsed.is_discarded()) {
    throw Error(ErrorKind::UnparseableChain, "invalid JSON");
  }
  return parsed;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static const char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0x0f]);
  }
  return out;
}

static int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

std::vector<std::uint8_t> from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    throw Error(ErrorKind::BadHexString, "odd length");
  }
  std::vector<std::uint8_t> out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = hex_nibble(hex[i]);
    int lo = hex_nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) {
      throw Error(ErrorKind::BadHexString,
                  "non-hex character at offset " + std::to_string(i));
    }
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

}  // namespace b2mdf
