#include "b2mdf/static_features.hpp"

#include "b2mdf/errors.hpp"

namespace b2mdf {

Watchlists Watchlists::defaults() {
  Watchlists w;
  w.api = {
      {"Landroid/telephony/TelephonyManager;", "getDeviceId"},
      {"Landroid/telephony/TelephonyManager;", "getSubscriberId"},
      {"Landroid/telephony/SmsManager;", "sendTextMessage"},
      {"Landroid/content/pm/PackageManager;", "getInstalledPackages"},
  };
  w.commands = {"chmod", "mount", "/system/bin/su", "chown"};
  return w;
}

Watchlists Watchlists::from_json(const json& doc) {
  Watchlists w;
  if (!doc.is_object()) {
    throw Error(ErrorKind::BadConfig, "watchlist file must be a JSON object");
  }
  if (doc.contains("api_watchlist")) {
    for (const auto& entry : doc.at("api_watchlist")) {
      if (!entry.contains("class_contains") || !entry.contains("method")) {
        throw Error(ErrorKind::BadConfig,
                    "api_watchlist entries need class_contains and method");
      }
      w.api.push_back({entry["class_contains"].get<std::string>(),
                       entry["method"].get<std::string>()});
    }
  }
  if (doc.contains("command_watchlist")) {
    for (const auto& entry : doc.at("command_watchlist")) {
      w.commands.push_back(entry.get<std::string>());
    }
  }
  return w;
}

ApiCallFeature extract_api_calls(const DexFile& dex, const AppVersionKey& app,
                                 const std::vector<ApiWatchPattern>& watchlist) {
  ApiCallFeature feature{app, {}};
  for (const auto& pattern : watchlist) {
    std::uint64_t count = 0;
    for (const auto& ref : dex.method_refs) {
      if (ref.name == pattern.method &&
          ref.class_descriptor.find(pattern.class_contains) != std::string::npos) {
        ++count;
      }
    }
    if (count > 0) {
      feature.hits.push_back({pattern.key(), count});
    }
  }
  return feature;
}

CommandFeature extract_commands(const DexFile& dex, const AppVersionKey& app,
                                const std::vector<std::string>& watchlist) {
  CommandFeature feature{app, {}};
  for (const auto& command : watchlist) {
    if (command.empty()) continue;
    std::uint64_t count = 0;
    for (const auto& s : dex.string_table) {
      if (s.find(command) != std::string::npos) {
        ++count;
      }
    }
    if (count > 0) {
      feature.hits.push_back({command, count});
    }
  }
  return feature;
}

PermissionFeature extract_permissions(const ManifestInfo& manifest,
                                      const AppVersionKey& app) {
  return {app, manifest.permissions};
}

namespace {

json payload_envelope(const char* kind, const AppVersionKey& app,
                      const SourceDigests& src) {
  json doc{{"kind", kind},
           {"app_id", app.app_id},
           {"version_code", app.version_code},
           {"apk_sha256", digest_hex(src.apk_sha256)}};
  if (src.has_dex) {
    doc["dex_sha256"] = digest_hex(src.dex_sha256);
  }
  return doc;
}

json hits_to_json(const std::vector<HitCount>& hits) {
  json obj = json::object();
  for (const auto& hit : hits) {
    obj[hit.pattern] = hit.count;
  }
  return obj;
}

}  // namespace

json opcode_payload(const OpcodeSequenceFeature& feature, const SourceDigests& src) {
  json doc = payload_envelope(payload_kind::kOpcodes, feature.app, src);
  json ops = json::array();
  for (std::uint8_t op : feature.sequence.opcodes) ops.push_back(op);
  json hist = json::array();
  for (std::uint64_t bin : feature.sequence.histogram) hist.push_back(bin);
  doc["opcodes"] = std::move(ops);
  doc["histogram"] = std::move(hist);
  return doc;
}

json permission_payload(const PermissionFeature& feature, const SourceDigests& src) {
  json doc = payload_envelope(payload_kind::kPermissions, feature.app, src);
  doc["permissions"] = feature.permissions;
  return doc;
}

json api_call_payload(const ApiCallFeature& feature, const SourceDigests& src) {
  json doc = payload_envelope(payload_kind::kApiCalls, feature.app, src);
  doc["hits"] = hits_to_json(feature.hits);
  return doc;
}

json command_payload(const CommandFeature& feature, const SourceDigests& src) {
  json doc = payload_envelope(payload_kind::kCommands, feature.app, src);
  doc["hits"] = hits_to_json(feature.hits);
  return doc;
}

}  // namespace b2mdf
