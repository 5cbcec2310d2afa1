#include "b2mdf/crypto.hpp"

#include <mutex>
#include <stdexcept>

#include <sodium.h>

#include "b2mdf/canonical.hpp"
#include "b2mdf/errors.hpp"

namespace b2mdf {

namespace {

void ensure_sodium() {
  static std::once_flag flag;
  std::call_once(flag, [] {
    if (sodium_init() < 0) {
      throw std::runtime_error("libsodium initialization failed");
    }
  });
}

}  // namespace

Digest sha256(std::span<const std::uint8_t> data) {
  ensure_sodium();
  Digest out{};
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return out;
}

Digest sha256(std::string_view data) {
  return sha256(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

std::string digest_hex(const Digest& d) { return to_hex(d); }

Digest digest_from_hex(std::string_view hex) {
  auto bytes = from_hex(hex);
  if (bytes.size() != 32) {
    throw Error(ErrorKind::BadHexString,
                "expected 64 hex chars, got " + std::to_string(hex.size()));
  }
  Digest out{};
  std::copy(bytes.begin(), bytes.end(), out.begin());
  return out;
}

KeyPair KeyPair::from_seed(const KeySeed& seed) {
  ensure_sodium();
  KeyPair kp;
  crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(),
                           seed.data());
  return kp;
}

Signature sign_digest(const Digest& message, const KeyPair& keys) {
  ensure_sodium();
  Signature sig{};
  crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(),
                       keys.secret_key.data());
  return sig;
}

bool verify_digest(const Digest& message, const Signature& signature,
                   const PublicKey& key) {
  ensure_sodium();
  return crypto_sign_verify_detached(signature.data(), message.data(),
                                     message.size(), key.data()) == 0;
}

}  // namespace b2mdf
