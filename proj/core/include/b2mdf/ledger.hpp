#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "b2mdf/canonical.hpp"
#include "b2mdf/crypto.hpp"

namespace b2mdf {

// The three per-app chain kinds: DIPB holds feature blocks written by
// feature extractors, DEPB holds per-version malice scores written by
// detection engines, CB holds quorum-signed verdict blocks.
enum class ChainKind { Dipb, Depb, Cb };

enum class Role { FeatureExtractor, DetectionEngine, ThirdParty, DeterminantAgent };

enum class Action { Append, Read };

const char* chain_kind_name(ChainKind kind);
ChainKind chain_kind_from_name(std::string_view name);
const char* role_name(Role role);
Role role_from_name(std::string_view name);

struct ParticipantIdentity {
  std::string id;
  Role role = Role::ThirdParty;
  PublicKey public_key{};
};

class ParticipantRegistry {
 public:
  void add(ParticipantIdentity identity);
  const ParticipantIdentity* find(std::string_view id) const;
  std::size_t count_role(Role role) const;
  std::vector<std::string> ids_with_role(Role role) const;  // sorted
  std::size_t size() const { return participants_.size(); }

  json to_json() const;
  static ParticipantRegistry from_json(const json& doc);  // Error{BadConfig}

 private:
  std::map<std::string, ParticipantIdentity, std::less<>> participants_;
};

struct BlockHeader {
  std::string app_id;
  ChainKind chain_kind = ChainKind::Dipb;
  std::uint64_t height = 0;
  Digest prev_hash{};     // 32 zero bytes for genesis
  Digest payload_hash{};  // sha256 of the canonical payload bytes
  std::string author_id;
  std::int64_t timestamp = 0;  // caller-supplied logical milliseconds

  json to_json() const;
  static BlockHeader from_json(const json& doc);
};

struct BlockSignature {
  std::string signer_id;
  Signature signature{};
};

struct Block {
  BlockHeader header;
  json payload;
  std::vector<BlockSignature> signatures;

  json to_json() const;
  static Block from_json(const json& doc);
};

// Digest over the canonical header bytes. The payload is committed through
// header.payload_hash, so this pins the whole block.
Digest block_digest(const Block& block);
Digest header_digest(const BlockHeader& header);

// Role/chain/action access matrix. Reads are open to every registered
// participant; append rights follow the framework's role arrows.
bool authorize(Role role, ChainKind kind, Action action);

enum class ValidationFailure {
  LinkMismatch,
  PayloadHashMismatch,
  BadSignature,
  UnauthorizedAuthor,
  HeightGap,
  QuorumShortfall,
};

const char* validation_failure_name(ValidationFailure reason);

struct ValidationReport {
  bool valid = true;
  std::optional<std::uint64_t> first_bad_height;
  std::optional<ValidationFailure> reason;

  static ValidationReport ok() { return {}; }
  static ValidationReport failure(std::uint64_t height, ValidationFailure why) {
    return {false, height, why};
  }
};

// Optional filter for block queries: payload "kind" and/or "version_code".
struct BlockFilter {
  std::optional<std::string> kind;
  std::optional<std::int64_t> version_code;

  bool matches(const Block& block) const;
};

class Chain {
 public:
  Chain(std::string app_id, ChainKind kind)
      : app_id_(std::move(app_id)), kind_(kind) {}

  const std::string& app_id() const { return app_id_; }
  ChainKind kind() const { return kind_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t size() const { return blocks_.size(); }
  bool empty() const { return blocks_.empty(); }

  // Appends a new author-signed block. Errors: Unauthorized when the role
  // matrix denies append, StaleChain when the existing chain is not
  // link-valid, SignatureFailure when the produced signature does not verify
  // under the author's registered public key.
  const Block& append_block(const json& payload, const ParticipantIdentity& author,
                            const KeyPair& keys, std::int64_t timestamp);

  // Builds the block that would extend this chain, without appending.
  // Consensus uses this so validators can sign the exact digest that will
  // land on the CB.
  Block make_child_block(const json& payload, const ParticipantIdentity& author,
                         std::int64_t timestamp) const;

  // Appends a block previously built by make_child_block once its signature
  // set is complete. Error{AppendRejected} if the block no longer links.
  const Block& append_prebuilt(Block block);

  std::vector<Block> get_blocks(const BlockFilter& filter = {}) const;

  // Structure-only linkage check (heights, links, payload hashes); no
  // signature or authorization checks, so it needs no registry.
  bool link_valid() const;

  // Full audit in check order: height continuity, linkage, payload hash,
  // signatures, author authorization, and quorum for CB chains when
  // quorum_n is given. Reports the first failure; never throws.
  ValidationReport verify(const ParticipantRegistry& registry,
                          std::optional<std::size_t> quorum_n = {}) const;

  // JSON Lines codec: one canonical block per line, LF-terminated.
  std::string serialize() const;
  static Chain deserialize(std::string_view text, std::string app_id,
                           ChainKind kind);  // Error{UnparseableChain}

  // Test and consensus support: raw block access for fixture surgery.
  std::vector<Block>& mutable_blocks() { return blocks_; }

 private:
  std::string app_id_;
  ChainKind kind_;
  std::vector<Block> blocks_;
};

}  // namespace b2mdf
