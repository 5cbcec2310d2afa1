#include "b2mdf/zip.hpp"

#include <algorithm>
#include <cstring>

#include <zlib.h>

#include "b2mdf/errors.hpp"

namespace b2mdf {

namespace {

constexpr std::uint32_t kEocdSig = 0x06054b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::size_t kEocdSize = 22;
constexpr std::size_t kCentralSize = 46;
constexpr std::size_t kLocalSize = 30;
// Decompression guard for hostile size fields; real fixtures are tiny.
constexpr std::size_t kMaxEntryBytes = 64u << 20;

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint16_t u16(std::size_t offset) const {
    require(offset, 2);
    return static_cast<std::uint16_t>(data_[offset] | (data_[offset + 1] << 8));
  }
  std::uint32_t u32(std::size_t offset) const {
    require(offset, 4);
    return static_cast<std::uint32_t>(data_[offset]) |
           (static_cast<std::uint32_t>(data_[offset + 1]) << 8) |
           (static_cast<std::uint32_t>(data_[offset + 2]) << 16) |
           (static_cast<std::uint32_t>(data_[offset + 3]) << 24);
  }
  std::span<const std::uint8_t> slice(std::size_t offset, std::size_t length) const {
    require(offset, length);
    return data_.subspan(offset, length);
  }
  std::size_t size() const { return data_.size(); }

 private:
  void require(std::size_t offset, std::size_t length) const {
    if (offset > data_.size() || length > data_.size() - offset) {
      throw Error(ErrorKind::MalformedZip, "read past end of archive");
    }
  }
  std::span<const std::uint8_t> data_;
};

std::size_t find_eocd(const ByteReader& r) {
  if (r.size() < kEocdSize) {
    throw Error(ErrorKind::NotAZip, "too short for an end-of-central-directory");
  }
  // EOCD sits at the end, possibly followed by a comment up to 64 KiB.
  const std::size_t lowest =
      r.size() >= kEocdSize + 0xFFFF ? r.size() - kEocdSize - 0xFFFF : 0;
  for (std::size_t pos = r.size() - kEocdSize + 1; pos-- > lowest;) {
    if (r.u32(pos) == kEocdSig) {
      const std::size_t comment_len = r.u16(pos + 20);
      if (pos + kEocdSize + comment_len == r.size()) {
        return pos;
      }
    }
  }
  throw Error(ErrorKind::NotAZip, "end-of-central-directory record not found");
}

std::vector<std::uint8_t> inflate_raw(std::span<const std::uint8_t> compressed,
                                      std::size_t expected_size,
                                      const std::string& path) {
  std::vector<std::uint8_t> out(expected_size);
  z_stream stream{};
  if (inflateInit2(&stream, -MAX_WBITS) != Z_OK) {
    throw Error(ErrorKind::MalformedZip, "inflate init failed: " + path);
  }
  stream.next_in = const_cast<Bytef*>(compressed.data());
  stream.avail_in = static_cast<uInt>(compressed.size());
  stream.next_out = out.data();
  stream.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&stream, Z_FINISH);
  const bool complete = rc == Z_STREAM_END && stream.avail_out == 0;
  inflateEnd(&stream);
  if (!complete) {
    throw Error(ErrorKind::MalformedZip, "deflate stream corrupt: " + path);
  }
  return out;
}

}  // namespace

const ApkEntry* ApkContainer::find(std::string_view path) const {
  for (const auto& entry : entries) {
    if (entry.path == path) return &entry;
  }
  return nullptr;
}

std::vector<const ApkEntry*> ApkContainer::dex_entries() const {
  std::vector<const ApkEntry*> out;
  for (const auto& entry : entries) {
    if (entry.path.starts_with("classes") && entry.path.ends_with(".dex") &&
        entry.path.find('/') == std::string::npos) {
      out.push_back(&entry);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const ApkEntry* a, const ApkEntry* b) { return a->path < b->path; });
  return out;
}

ApkContainer open_apk(std::span<const std::uint8_t> data) {
  if (data.empty()) {
    throw Error(ErrorKind::NotAZip, "empty input");
  }
  ByteReader r(data);
  const std::size_t eocd = find_eocd(r);

  const std::uint16_t disk_no = r.u16(eocd + 4);
  const std::uint16_t cd_disk = r.u16(eocd + 6);
  if (disk_no != 0 || cd_disk != 0) {
    throw Error(ErrorKind::MalformedZip, "multi-disk archives unsupported");
  }
  const std::uint16_t entry_count = r.u16(eocd + 10);
  const std::uint32_t cd_size = r.u32(eocd + 12);
  const std::uint32_t cd_offset = r.u32(eocd + 16);
  if (entry_count == 0xFFFF || cd_size == 0xFFFFFFFF || cd_offset == 0xFFFFFFFF) {
    throw Error(ErrorKind::MalformedZip, "zip64 archives unsupported");
  }
  if (static_cast<std::size_t>(cd_offset) + cd_size > eocd) {
    throw Error(ErrorKind::MalformedZip, "central directory overruns EOCD");
  }

  ApkContainer apk;
  std::size_t pos = cd_offset;
  for (std::uint16_t i = 0; i < entry_count; ++i) {
    if (r.u32(pos) != kCentralSig) {
      throw Error(ErrorKind::MalformedZip,
                  "bad central directory signature at entry " + std::to_string(i));
    }
    const std::uint16_t flags = r.u16(pos + 8);
    const std::uint16_t method = r.u16(pos + 10);
    const std::uint32_t crc = r.u32(pos + 16);
    const std::uint32_t comp_size = r.u32(pos + 20);
    const std::uint32_t uncomp_size = r.u32(pos + 24);
    const std::uint16_t name_len = r.u16(pos + 28);
    const std::uint16_t extra_len = r.u16(pos + 30);
    const std::uint16_t comment_len = r.u16(pos + 32);
    const std::uint32_t local_offset = r.u32(pos + 42);

    if (flags & 0x0001) {
      throw Error(ErrorKind::MalformedZip, "encrypted entries unsupported");
    }

    auto name_bytes = r.slice(pos + kCentralSize, name_len);
    std::string path(name_bytes.begin(), name_bytes.end());

    if (r.u32(local_offset) != kLocalSig) {
      throw Error(ErrorKind::MalformedZip, "bad local header for " + path);
    }
    const std::uint16_t local_name_len = r.u16(local_offset + 26);
    const std::uint16_t local_extra_len = r.u16(local_offset + 28);
    const std::size_t data_start =
        static_cast<std::size_t>(local_offset) + kLocalSize + local_name_len +
        local_extra_len;

    if (uncomp_size > kMaxEntryBytes || comp_size > kMaxEntryBytes) {
      throw Error(ErrorKind::MalformedZip, "entry too large: " + path);
    }

    ApkEntry entry;
    entry.path = path;
    entry.crc32 = crc;
    if (method == 0) {
      if (comp_size != uncomp_size) {
        throw Error(ErrorKind::MalformedZip, "stored size mismatch: " + path);
      }
      auto bytes = r.slice(data_start, comp_size);
      entry.data.assign(bytes.begin(), bytes.end());
    } else if (method == 8) {
      auto bytes = r.slice(data_start, comp_size);
      entry.data = inflate_raw(bytes, uncomp_size, path);
    } else {
      throw Error(ErrorKind::UnsupportedCompression,
                  "method " + std::to_string(method) + " on " + path);
    }

    const auto actual_crc = static_cast<std::uint32_t>(
        ::crc32(0L, entry.data.data(), static_cast<uInt>(entry.data.size())));
    if (actual_crc != crc) {
      throw Error(ErrorKind::CrcMismatch, path);
    }

    if (apk.find(path) != nullptr) {
      throw Error(ErrorKind::MalformedZip, "duplicate entry path: " + path);
    }
    apk.entries.push_back(std::move(entry));
    pos += kCentralSize + name_len + extra_len + comment_len;
  }

  for (const auto& entry : apk.entries) {
    const std::string& p = entry.path;
    if (p == "AndroidManifest.xml") apk.well_known.manifest = true;
    if (p == "classes.dex") apk.well_known.classes_dex = true;
    if (p == "resources.arsc") apk.well_known.resources_arsc = true;
    if (p.starts_with("res/")) apk.well_known.res_dir = true;
    if (p.starts_with("assets/")) apk.well_known.assets_dir = true;
    if (p.starts_with("lib/")) apk.well_known.lib_dir = true;
    if (p.starts_with("META-INF/")) apk.well_known.meta_inf = true;
  }
  return apk;
}

}  // namespace b2mdf
