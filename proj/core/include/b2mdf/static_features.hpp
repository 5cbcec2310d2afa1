#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "b2mdf/canonical.hpp"
#include "b2mdf/crypto.hpp"
#include "b2mdf/dex.hpp"
#include "b2mdf/manifest.hpp"

namespace b2mdf {

// Payload "kind" tags shared by the ledger filter, the engines, and the CLI.
namespace payload_kind {
inline constexpr const char* kOpcodes = "opcodes";
inline constexpr const char* kPermissions = "permissions";
inline constexpr const char* kApiCalls = "api_calls";
inline constexpr const char* kCommands = "commands";
inline constexpr const char* kSyscallNgrams = "syscall_ngrams";
inline constexpr const char* kResources = "resources";
}  // namespace payload_kind

struct ApiWatchPattern {
  std::string class_contains;  // substring of the class descriptor
  std::string method;          // exact method name

  std::string key() const { return class_contains + "#" + method; }
  bool operator==(const ApiWatchPattern&) const = default;
};

struct Watchlists {
  std::vector<ApiWatchPattern> api;
  std::vector<std::string> commands;

  static Watchlists defaults();
  static Watchlists from_json(const json& doc);  // Error{BadConfig}
};

struct AppVersionKey {
  std::string app_id;
  std::int64_t version_code = 0;
};

struct OpcodeSequenceFeature {
  AppVersionKey app;
  OpcodeSequence sequence;
};

struct PermissionFeature {
  AppVersionKey app;
  std::vector<std::string> permissions;
};

struct HitCount {
  std::string pattern;
  std::uint64_t count = 0;

  bool operator==(const HitCount&) const = default;
};

struct ApiCallFeature {
  AppVersionKey app;
  std::vector<HitCount> hits;  // unmatched patterns omitted, counts >= 1
};

struct CommandFeature {
  AppVersionKey app;
  std::vector<HitCount> hits;
};

// Counts method references whose class descriptor contains the pattern's
// substring and whose name matches exactly. Operates on the deduplicated
// method_ids table, not call sites.
ApiCallFeature extract_api_calls(const DexFile& dex, const AppVersionKey& app,
                                 const std::vector<ApiWatchPattern>& watchlist);

// Counts string-table entries containing each command token (one hit per
// containing string).
CommandFeature extract_commands(const DexFile& dex, const AppVersionKey& app,
                                const std::vector<std::string>& watchlist);

PermissionFeature extract_permissions(const ManifestInfo& manifest,
                                      const AppVersionKey& app);

// Source digests stamped into every static payload so score records can
// reference the exact file contents that were analyzed.
struct SourceDigests {
  Digest apk_sha256{};
  Digest dex_sha256{};
  bool has_dex = false;
};

json opcode_payload(const OpcodeSequenceFeature& feature, const SourceDigests& src);
json permission_payload(const PermissionFeature& feature, const SourceDigests& src);
json api_call_payload(const ApiCallFeature& feature, const SourceDigests& src);
json command_payload(const CommandFeature& feature, const SourceDigests& src);

}  // namespace b2mdf
