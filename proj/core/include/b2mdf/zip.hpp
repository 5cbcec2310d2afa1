#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace b2mdf {

struct ApkEntry {
  std::string path;
  std::uint32_t crc32 = 0;
  std::vector<std::uint8_t> data;  // decompressed
};

// Presence flags for the archive paths an APK is expected to carry.
struct WellKnownEntries {
  bool manifest = false;        // AndroidManifest.xml
  bool classes_dex = false;     // classes.dex
  bool resources_arsc = false;  // resources.arsc
  bool res_dir = false;         // res/
  bool assets_dir = false;      // assets/
  bool lib_dir = false;         // lib/
  bool meta_inf = false;        // META-INF/

  bool operator==(const WellKnownEntries&) const = default;
};

struct ApkContainer {
  std::vector<ApkEntry> entries;  // central directory order
  WellKnownEntries well_known;

  const ApkEntry* find(std::string_view path) const;
  // All classes*.dex entries in lexicographic path order.
  std::vector<const ApkEntry*> dex_entries() const;
};

// Parses a ZIP archive: walks the end-of-central-directory record and the
// central directory, decompresses stored (0) and deflated (8) entries, and
// checks each entry's CRC-32.
//
// Errors: NotAZip (no usable end-of-central-directory), MalformedZip,
// CrcMismatch(path), UnsupportedCompression(method).
ApkContainer open_apk(std::span<const std::uint8_t> data);

}  // namespace b2mdf
