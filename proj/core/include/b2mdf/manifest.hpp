#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace b2mdf {

enum class ComponentKind { Activity, Service, Receiver, Provider };

const char* component_kind_name(ComponentKind kind);

struct ManifestComponent {
  ComponentKind kind = ComponentKind::Activity;
  std::string name;

  bool operator==(const ManifestComponent&) const = default;
};

struct ManifestInfo {
  std::string package_name;
  std::int64_t version_code = 0;
  std::string version_name;
  std::vector<std::string> permissions;  // deduplicated, first-appearance order
  std::vector<ManifestComponent> components;
  std::vector<std::string> intent_filter_actions;
  std::vector<std::string> features;  // uses-feature names

  bool operator==(const ManifestInfo&) const = default;
};

// Parses AndroidManifest.xml from either encoding: the binary AXML chunk
// stream (leading chunk type 0x0003) or plain-text XML. Both paths produce
// identical ManifestInfo for equivalent documents.
//
// Errors: MalformedAxml(offset, reason), MalformedXml(line), MissingPackage.
ManifestInfo parse_manifest(std::span<const std::uint8_t> data);
ManifestInfo parse_manifest(std::string_view text);

}  // namespace b2mdf
