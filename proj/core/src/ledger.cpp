#include "b2mdf/ledger.hpp"

#include <algorithm>

#include "b2mdf/errors.hpp"

namespace b2mdf {

const char* chain_kind_name(ChainKind kind) {
  switch (kind) {
    case ChainKind::Dipb: return "DIPB";
    case ChainKind::Depb: return "DEPB";
    case ChainKind::Cb: return "CB";
  }
  return "?";
}

ChainKind chain_kind_from_name(std::string_view name) {
  if (name == "DIPB") return ChainKind::Dipb;
  if (name == "DEPB") return ChainKind::Depb;
  if (name == "CB") return ChainKind::Cb;
  throw Error(ErrorKind::BadConfig, "unknown chain kind: " + std::string(name));
}

const char* role_name(Role role) {
  switch (role) {
    case Role::FeatureExtractor: return "FeatureExtractor";
    case Role::DetectionEngine: return "DetectionEngine";
    case Role::ThirdParty: return "ThirdParty";
    case Role::DeterminantAgent: return "DeterminantAgent";
  }
  return "?";
}

Role role_from_name(std::string_view name) {
  if (name == "FeatureExtractor") return Role::FeatureExtractor;
  if (name == "DetectionEngine") return Role::DetectionEngine;
  if (name == "ThirdParty") return Role::ThirdParty;
  if (name == "DeterminantAgent") return Role::DeterminantAgent;
  throw Error(ErrorKind::BadConfig, "unknown role: " + std::string(name));
}

const char* validation_failure_name(ValidationFailure reason) {
  switch (reason) {
    case ValidationFailure::LinkMismatch: return "LinkMismatch";
    case ValidationFailure::PayloadHashMismatch: return "PayloadHashMismatch";
    case ValidationFailure::BadSignature: return "BadSignature";
    case ValidationFailure::UnauthorizedAuthor: return "UnauthorizedAuthor";
    case ValidationFailure::HeightGap: return "HeightGap";
    case ValidationFailure::QuorumShortfall: return "QuorumShortfall";
  }
  return "?";
}

void ParticipantRegistry::add(ParticipantIdentity identity) {
  if (identity.id.empty()) {
    throw Error(ErrorKind::BadConfig, "participant id must be non-empty");
  }
  auto [it, inserted] = participants_.emplace(identity.id, identity);
  (void)it;
  if (!inserted) {
    throw Error(ErrorKind::BadConfig, "duplicate participant id: " + identity.id);
  }
}

const ParticipantIdentity* ParticipantRegistry::find(std::string_view id) const {
  auto it = participants_.find(id);
  return it == participants_.end() ? nullptr : &it->second;
}

std::size_t ParticipantRegistry::count_role(Role role) const {
  std::size_t n = 0;
  for (const auto& [id, p] : participants_) {
    (void)id;
    if (p.role == role) ++n;
  }
  return n;
}

std::vector<std::string> ParticipantRegistry::ids_with_role(Role role) const {
  std::vector<std::string> ids;
  for (const auto& [id, p] : participants_) {
    if (p.role == role) ids.push_back(id);
  }
  return ids;  // map iteration is already sorted
}

json ParticipantRegistry::to_json() const {
  json list = json::array();
  for (const auto& [id, p] : participants_) {
    (void)id;
    list.push_back({{"id", p.id},
                    {"public_key", to_hex(p.public_key)},
                    {"role", role_name(p.role)}});
  }
  return json{{"participants", list}};
}

ParticipantRegistry ParticipantRegistry::from_json(const json& doc) {
  ParticipantRegistry registry;
  if (!doc.is_object() || !doc.contains("participants") ||
      !doc["participants"].is_array()) {
    throw Error(ErrorKind::BadConfig, "registry must have a participants array");
  }
  for (const auto& entry : doc["participants"]) {
    if (!entry.is_object() || !entry.contains("id") || !entry.contains("role") ||
        !entry.contains("public_key")) {
      throw Error(ErrorKind::BadConfig, "registry entry missing id/role/public_key");
    }
    ParticipantIdentity p;
    p.id = entry["id"].get<std::string>();
    p.role = role_from_name(entry["role"].get<std::string>());
    auto key = from_hex(entry["public_key"].get<std::string>());
    if (key.size() != p.public_key.size()) {
      throw Error(ErrorKind::BadConfig, "public key must be 32 bytes: " + p.id);
    }
    std::copy(key.begin(), key.end(), p.public_key.begin());
    registry.add(std::move(p));
  }
  return registry;
}

json BlockHeader::to_json() const {
  return json{{"app_id", app_id},
              {"author_id", author_id},
              {"chain_kind", chain_kind_name(chain_kind)},
              {"height", height},
              {"payload_hash", digest_hex(payload_hash)},
              {"prev_hash", digest_hex(prev_hash)},
              {"timestamp", timestamp}};
}

BlockHeader BlockHeader::from_json(const json& doc) {
  BlockHeader h;
  h.app_id = doc.at("app_id").get<std::string>();
  h.author_id = doc.at("author_id").get<std::string>();
  h.chain_kind = chain_kind_from_name(doc.at("chain_kind").get<std::string>());
  h.height = doc.at("height").get<std::uint64_t>();
  h.payload_hash = digest_from_hex(doc.at("payload_hash").get<std::string>());
  h.prev_hash = digest_from_hex(doc.at("prev_hash").get<std::string>());
  h.timestamp = doc.at("timestamp").get<std::int64_t>();
  return h;
}

json Block::to_json() const {
  json sigs = json::array();
  for (const auto& s : signatures) {
    sigs.push_back({{"signature", to_hex(s.signature)}, {"signer", s.signer_id}});
  }
  return json{{"header", header.to_json()}, {"payload", payload}, {"signatures", sigs}};
}

Block Block::from_json(const json& doc) {
  Block b;
  b.header = BlockHeader::from_json(doc.at("header"));
  b.payload = doc.at("payload");
  for (const auto& s : doc.at("signatures")) {
    BlockSignature sig;
    sig.signer_id = s.at("signer").get<std::string>();
    auto bytes = from_hex(s.at("signature").get<std::string>());
    if (bytes.size() != sig.signature.size()) {
      throw Error(ErrorKind::UnparseableChain, "signature must be 64 bytes");
    }
    std::copy(bytes.begin(), bytes.end(), sig.signature.begin());
    b.signatures.push_back(std::move(sig));
  }
  return b;
}

Digest header_digest(const BlockHeader& header) {
  return sha256(canonical_bytes(header.to_json()));
}

Digest block_digest(const Block& block) { return header_digest(block.header); }

bool authorize(Role role, ChainKind kind, Action action) {
  if (action == Action::Read) {
    return true;  // read policy: open to registered participants
  }
  switch (role) {
    case Role::FeatureExtractor:
      return kind == ChainKind::Dipb;
    case Role::DetectionEngine:
      return kind == ChainKind::Depb || kind == ChainKind::Cb;
    case Role::ThirdParty:
    case Role::DeterminantAgent:
      return false;
  }
  return false;
}

bool BlockFilter::matches(const Block& block) const {
  if (kind) {
    if (!block.payload.is_object() || !block.payload.contains("kind") ||
        !block.payload["kind"].is_string() ||
        block.payload["kind"].get<std::string>() != *kind) {
      return false;
    }
  }
  if (version_code) {
    if (!block.payload.is_object() || !block.payload.contains("version_code") ||
        !block.payload["version_code"].is_number_integer()) {
      return false;
    }
    if (block.payload["version_code"].get<std::int64_t>() != *version_code) {
      return false;
    }
  }
  return true;
}

Block Chain::make_child_block(const json& payload, const ParticipantIdentity& author,
                              std::int64_t timestamp) const {
  Block block;
  block.header.app_id = app_id_;
  block.header.chain_kind = kind_;
  block.header.height = blocks_.size();
  block.header.prev_hash = blocks_.empty() ? kZeroDigest : block_digest(blocks_.back());
  block.header.payload_hash = sha256(canonical_bytes(payload));
  block.header.author_id = author.id;
  block.header.timestamp = timestamp;
  block.payload = payload;
  return block;
}

const Block& Chain::append_block(const json& payload, const ParticipantIdentity& author,
                                 const KeyPair& keys, std::int64_t timestamp) {
  if (!authorize(author.role, kind_, Action::Append)) {
    throw Error(ErrorKind::Unauthorized,
                std::string(role_name(author.role)) + " may not append to " +
                    chain_kind_name(kind_));
  }
  if (!link_valid()) {
    throw Error(ErrorKind::StaleChain, "chain is not link-valid before append");
  }
  Block block = make_child_block(payload, author, timestamp);
  Digest digest = block_digest(block);
  BlockSignature sig{author.id, sign_digest(digest, keys)};
  if (!verify_digest(digest, sig.signature, author.public_key)) {
    throw Error(ErrorKind::SignatureFailure,
                "signature does not verify under the author's registered key");
  }
  block.signatures.push_back(std::move(sig));
  blocks_.push_back(std::move(block));
  return blocks_.back();
}

const Block& Chain::append_prebuilt(Block block) {
  Digest expected_prev = blocks_.empty() ? kZeroDigest : block_digest(blocks_.back());
  if (block.header.height != blocks_.size() ||
      block.header.prev_hash != expected_prev ||
      block.header.payload_hash != sha256(canonical_bytes(block.payload))) {
    throw Error(ErrorKind::AppendRejected, "block does not extend the chain tip");
  }
  std::sort(block.signatures.begin(), block.signatures.end(),
            [](const BlockSignature& a, const BlockSignature& b) {
              return a.signer_id < b.signer_id;
            });
  blocks_.push_back(std::move(block));
  return blocks_.back();
}

std::vector<Block> Chain::get_blocks(const BlockFilter& filter) const {
  std::vector<Block> out;
  for (const auto& block : blocks_) {
    if (filter.matches(block)) out.push_back(block);
  }
  return out;
}

bool Chain::link_valid() const {
  Digest expected_prev = kZeroDigest;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const Block& b = blocks_[i];
    if (b.header.height != i) return false;
    if (b.header.prev_hash != expected_prev) return false;
    if (b.header.payload_hash != sha256(canonical_bytes(b.payload))) return false;
    expected_prev = block_digest(b);
  }
  return true;
}

ValidationReport Chain::verify(const ParticipantRegistry& registry,
                               std::optional<std::size_t> quorum_n) const {
  Digest expected_prev = kZeroDigest;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const Block& b = blocks_[i];
    const std::uint64_t h = b.header.height;

    if (b.header.height != i) {
      return ValidationReport::failure(i, ValidationFailure::HeightGap);
    }
    if (b.header.prev_hash != expected_prev) {
      return ValidationReport::failure(h, ValidationFailure::LinkMismatch);
    }
    if (b.header.payload_hash != sha256(canonical_bytes(b.payload))) {
      return ValidationReport::failure(h, ValidationFailure::PayloadHashMismatch);
    }

    const Digest digest = block_digest(b);

    // Signature rules: private chains carry exactly the author's signature;
    // CB blocks carry a distinct-signer set that must include the author.
    if (kind_ == ChainKind::Cb) {
      if (b.signatures.empty()) {
        return ValidationReport::failure(h, ValidationFailure::BadSignature);
      }
      std::vector<std::string> seen;
      bool author_signed = false;
      for (const auto& sig : b.signatures) {
        const ParticipantIdentity* signer = registry.find(sig.signer_id);
        if (signer == nullptr ||
            !verify_digest(digest, sig.signature, signer->public_key)) {
          return ValidationReport::failure(h, ValidationFailure::BadSignature);
        }
        if (std::find(seen.begin(), seen.end(), sig.signer_id) != seen.end()) {
          return ValidationReport::failure(h, ValidationFailure::BadSignature);
        }
        seen.push_back(sig.signer_id);
        if (sig.signer_id == b.header.author_id) author_signed = true;
      }
      if (!author_signed) {
        return ValidationReport::failure(h, ValidationFailure::BadSignature);
      }
    } else {
      if (b.signatures.size() != 1 ||
          b.signatures[0].signer_id != b.header.author_id) {
        return ValidationReport::failure(h, ValidationFailure::BadSignature);
      }
      const ParticipantIdentity* signer = registry.find(b.header.author_id);
      if (signer == nullptr ||
          !verify_digest(digest, b.signatures[0].signature, signer->public_key)) {
        return ValidationReport::failure(h, ValidationFailure::BadSignature);
      }
    }

    const ParticipantIdentity* author = registry.find(b.header.author_id);
    if (author == nullptr || !authorize(author->role, kind_, Action::Append)) {
      return ValidationReport::failure(h, ValidationFailure::UnauthorizedAuthor);
    }

    if (kind_ == ChainKind::Cb && quorum_n) {
      const std::size_t needed = (2 * *quorum_n + 2) / 3;  // ceil(2n/3)
      if (b.signatures.size() < needed) {
        return ValidationReport::failure(h, ValidationFailure::QuorumShortfall);
      }
    }

    expected_prev = digest;
  }
  return ValidationReport::ok();
}

std::string Chain::serialize() const {
  std::string out;
  for (const auto& block : blocks_) {
    out += canonical_bytes(block.to_json());
    out += '\n';
  }
  return out;
}

Chain Chain::deserialize(std::string_view text, std::string app_id, ChainKind kind) {
  Chain chain(std::move(app_id), kind);
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) {
      throw Error(ErrorKind::UnparseableChain,
                  "missing LF terminator on line " + std::to_string(line_no));
    }
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty()) {
      try {
        chain.blocks_.push_back(Block::from_json(parse_canonical(line)));
      } catch (const std::exception& e) {
        throw Error(ErrorKind::UnparseableChain,
                    "line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    pos = eol + 1;
    ++line_no;
  }
  return chain;
}

}  // namespace b2mdf
