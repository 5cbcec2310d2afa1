#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "b2mdf/canonical.hpp"
#include "b2mdf/crypto.hpp"
#include "b2mdf/ledger.hpp"

namespace b2mdf {

enum class Verdict { Malicious, Benign };

const char* verdict_name(Verdict verdict);
Verdict verdict_from_name(std::string_view name);

struct FeatureVector {
  std::vector<std::pair<std::string, double>> entries;  // keys unique, sorted
  std::string schema_id;

  double value_of(std::string_view key) const;  // 0 when absent
};

struct ScoreRecord {
  std::string engine_id;
  std::string app_id;
  std::int64_t version_code = 0;
  double malice_score = 0.0;  // in [0,1]
  Verdict verdict = Verdict::Benign;
  std::vector<Digest> evidence;  // DIPB block digests consulted
  std::string detail;

  json to_json() const;
  static ScoreRecord from_json(const json& doc);
};

enum class EngineKind { Signature, Heuristic };

struct EngineConfig {
  std::string engine_id;
  EngineKind kind = EngineKind::Heuristic;
  double threshold = 0.5;                  // verdict = Malicious iff score >= threshold
  std::map<std::string, double> weights;   // Heuristic; "__bias" is the intercept
  std::vector<Digest> blacklist;           // Signature
  std::string family_tag;                  // optional "family:" detail on hits
};

// Builds the engine input from the latest feature payloads of one
// (app, version): schema keys address derived scalars —
//   perm:<NAME>          0/1 indicator from the permissions block
//   cmd:<token>          command hit count
//   api:<class>#<method> API reference count
//   op:<2-hex>           opcode histogram bin
//   sys<n>:<a>|...       syscall n-gram count
//   res:<metric>.<agg>   resource aggregate
// Missing blocks default every dependent key to 0.
// Error: ConflictingBlocks when two blocks share kind and version.
FeatureVector assemble_feature_vector(const std::vector<Block>& dipb_blocks,
                                      const std::vector<std::string>& schema);

// Blacklist check over the APK and classes.dex digests; either hit scores 1.0.
ScoreRecord signature_scan(const Digest& apk_digest,
                           const std::optional<Digest>& dex_digest,
                           const EngineConfig& cfg);

// logistic(w . v + bias). Error: NonFiniteScore when the dot product is
// not finite.
ScoreRecord heuristic_score(const FeatureVector& v, const EngineConfig& cfg);

// Reads the app's DIPB blocks for one version (read-only), dispatches by
// engine kind, and attaches the digests of every block read as evidence.
// Errors: MissingChain, MissingFeatures, plus kind-specific errors.
ScoreRecord run_engine(const EngineConfig& engine, const Chain& dipb,
                       const std::string& app_id, std::int64_t version_code,
                       const std::vector<std::string>& schema);

}  // namespace b2mdf
