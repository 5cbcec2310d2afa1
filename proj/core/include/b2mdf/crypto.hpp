#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

namespace b2mdf {

using Digest = std::array<std::uint8_t, 32>;
using PublicKey = std::array<std::uint8_t, 32>;
using Signature = std::array<std::uint8_t, 64>;
using KeySeed = std::array<std::uint8_t, 32>;

inline constexpr Digest kZeroDigest{};

Digest sha256(std::span<const std::uint8_t> data);
Digest sha256(std::string_view data);

std::string digest_hex(const Digest& d);
Digest digest_from_hex(std::string_view hex);  // Error{BadHexString} if not 64 hex chars

// Ed25519 signing identity. The 64-byte expanded secret key is derived from
// a 32-byte seed so deployments only ever persist seeds.
struct KeyPair {
  PublicKey public_key{};
  std::array<std::uint8_t, 64> secret_key{};

  static KeyPair from_seed(const KeySeed& seed);
};

Signature sign_digest(const Digest& message, const KeyPair& keys);
bool verify_digest(const Digest& message, const Signature& signature,
                   const PublicKey& key);

}  // namespace b2mdf
