#include "b2mdf/manifest.hpp"

#include <algorithm>
#include <optional>

#include "b2mdf/errors.hpp"

namespace b2mdf {

namespace {

constexpr std::uint16_t kChunkStringPool = 0x0001;
constexpr std::uint16_t kChunkXml = 0x0003;
constexpr std::uint16_t kChunkStartNamespace = 0x0100;
constexpr std::uint16_t kChunkEndNamespace = 0x0101;
constexpr std::uint16_t kChunkStartElement = 0x0102;
constexpr std::uint16_t kChunkEndElement = 0x0103;
constexpr std::uint16_t kChunkCdata = 0x0104;
constexpr std::uint16_t kChunkResourceMap = 0x0180;

constexpr std::uint8_t kTypeString = 0x03;
constexpr std::uint8_t kTypeIntDec = 0x10;
constexpr std::uint8_t kTypeIntHex = 0x11;
constexpr std::uint8_t kTypeBoolean = 0x12;

[[noreturn]] void fail_axml(std::size_t offset, const std::string& reason) {
  throw Error(ErrorKind::MalformedAxml,
              "offset " + std::to_string(offset) + ": " + reason);
}

class AxmlReader {
 public:
  explicit AxmlReader(std::span<const std::uint8_t> data) : data_(data) {}

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
  std::uint8_t u8(std::size_t offset) const {
    require(offset, 1);
    return data_[offset];
  }
  std::size_t size() const { return data_.size(); }

 private:
  void require(std::size_t offset, std::size_t length) const {
    if (offset > data_.size() || length > data_.size() - offset) {
      fail_axml(offset, "read past end of chunk stream");
    }
  }
  std::span<const std::uint8_t> data_;
};

// String pool decoded up front; indices are validated on access.
struct StringPool {
  std::vector<std::string> strings;

  const std::string& at(std::uint32_t index, std::size_t offset) const {
    if (index >= strings.size()) {
      fail_axml(offset, "string index out of range");
    }
    return strings[index];
  }
};

std::string decode_utf16le(const AxmlReader& r, std::size_t offset,
                           std::size_t char_count) {
  // Fixture content is ASCII-range; non-BMP input is passed through as
  // UTF-8 from raw code units without surrogate pairing.
  std::string out;
  out.reserve(char_count);
  for (std::size_t i = 0; i < char_count; ++i) {
    const std::uint16_t unit = r.u16(offset + 2 * i);
    if (unit < 0x80) {
      out.push_back(static_cast<char>(unit));
    } else if (unit < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (unit >> 6)));
      out.push_back(static_cast<char>(0x80 | (unit & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xE0 | (unit >> 12)));
      out.push_back(static_cast<char>(0x80 | ((unit >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (unit & 0x3F)));
    }
  }
  return out;
}

StringPool parse_string_pool(const AxmlReader& r, std::size_t chunk_offset,
                             std::uint32_t chunk_size) {
  const std::uint16_t header_size = r.u16(chunk_offset + 2);
  if (header_size < 28 || chunk_size < header_size) {
    fail_axml(chunk_offset, "string pool header too small");
  }
  const std::uint32_t string_count = r.u32(chunk_offset + 8);
  const std::uint32_t flags = r.u32(chunk_offset + 16);
  const std::uint32_t strings_start = r.u32(chunk_offset + 20);
  const bool utf8 = (flags & 0x100) != 0;

  if (string_count > chunk_size / 4) {
    fail_axml(chunk_offset, "string count exceeds pool size");
  }
  const std::size_t offsets_at = chunk_offset + header_size;
  const std::size_t pool_end = chunk_offset + chunk_size;
  if (strings_start > chunk_size) {
    fail_axml(chunk_offset, "strings start beyond pool");
  }
  const std::size_t data_at = chunk_offset + strings_start;

  StringPool pool;
  pool.strings.reserve(string_count);
  for (std::uint32_t i = 0; i < string_count; ++i) {
    const std::uint32_t rel = r.u32(offsets_at + 4 * i);
    std::size_t at = data_at + rel;
    if (at >= pool_end) {
      fail_axml(at, "string offset beyond pool");
    }
    if (utf8) {
      // utf16 length then byte length, each 1 or 2 bytes
      std::size_t p = at;
      std::uint32_t u16len = r.u8(p++);
      if (u16len & 0x80) u16len = ((u16len & 0x7F) << 8) | r.u8(p++);
      (void)u16len;
      std::uint32_t byte_len = r.u8(p++);
      if (byte_len & 0x80) byte_len = ((byte_len & 0x7F) << 8) | r.u8(p++);
      if (p + byte_len > pool_end) {
        fail_axml(p, "utf8 string overruns pool");
      }
      std::string s;
      s.reserve(byte_len);
      for (std::uint32_t b = 0; b < byte_len; ++b) {
        s.push_back(static_cast<char>(r.u8(p + b)));
      }
      pool.strings.push_back(std::move(s));
    } else {
      std::size_t p = at;
      std::uint32_t char_count = r.u16(p);
      p += 2;
      if (char_count & 0x8000) {
        char_count = ((char_count & 0x7FFF) << 16) | r.u16(p);
        p += 2;
      }
      if (p + 2 * static_cast<std::size_t>(char_count) > pool_end) {
        fail_axml(p, "utf16 string overruns pool");
      }
      pool.strings.push_back(decode_utf16le(r, p, char_count));
    }
  }
  return pool;
}

struct TypedValue {
  std::uint8_t data_type = 0;
  std::uint32_t data = 0;
  std::uint32_t raw_string_index = 0xFFFFFFFF;
};

struct AxmlAttribute {
  std::string name;
  TypedValue value;
};

struct AxmlElement {
  std::string name;
  std::vector<AxmlAttribute> attributes;

  const TypedValue* attr(std::string_view name_) const {
    for (const auto& a : attributes) {
      if (a.name == name_) return &a.value;
    }
    return nullptr;
  }
};

// Streaming element callbacks feed the same semantic builder as the text
// path, which is what keeps the two encodings equivalent.
class ManifestBuilder {
 public:
  void start_element(const std::string& name,
                     const std::vector<std::pair<std::string, std::string>>& attrs,
                     std::optional<std::int64_t> version_code_attr) {
    path_.push_back(name);
    auto attr = [&](std::string_view key) -> const std::string* {
      for (const auto& [k, v] : attrs) {
        if (k == key) return &v;
      }
      return nullptr;
    };

    if (depth() == 1) {
      if (name != "manifest") {
        malformed("root element must be <manifest>");
      }
      if (const std::string* pkg = attr("package")) {
        info_.package_name = *pkg;
      }
      if (version_code_attr) {
        info_.version_code = *version_code_attr;
      } else if (const std::string* vc = attr("versionCode")) {
        try {
          std::size_t used = 0;
          info_.version_code = std::stoll(*vc, &used);
          if (used != vc->size()) throw std::invalid_argument(*vc);
        } catch (const std::exception&) {
          malformed("versionCode must be an integer");
        }
      }
      if (const std::string* vn = attr("versionName")) {
        info_.version_name = *vn;
      }
      return;
    }

    const std::string* name_attr = attr("name");
    if (name == "uses-permission" && name_attr) {
      push_unique(info_.permissions, *name_attr);
    } else if (name == "uses-feature" && name_attr) {
      push_unique(info_.features, *name_attr);
    } else if (name == "action" && name_attr && in("intent-filter")) {
      info_.intent_filter_actions.push_back(*name_attr);
    } else if (name_attr && in("application")) {
      if (name == "activity") add_component(ComponentKind::Activity, *name_attr);
      if (name == "service") add_component(ComponentKind::Service, *name_attr);
      if (name == "receiver") add_component(ComponentKind::Receiver, *name_attr);
      if (name == "provider") add_component(ComponentKind::Provider, *name_attr);
    }
  }

  void end_element() {
    if (!path_.empty()) path_.pop_back();
  }

  ManifestInfo finish() {
    if (info_.package_name.empty()) {
      throw Error(ErrorKind::MissingPackage, "manifest declares no package");
    }
    return std::move(info_);
  }

  void set_malformed_thrower(bool axml, std::size_t position) {
    axml_ = axml;
    position_ = position;
  }

 private:
  std::size_t depth() const { return path_.size(); }

  bool in(std::string_view ancestor) const {
    return std::find(path_.begin(), path_.end(), ancestor) != path_.end();
  }

  void add_component(ComponentKind kind, const std::string& name) {
    info_.components.push_back({kind, name});
  }

  static void push_unique(std::vector<std::string>& list, const std::string& value) {
    if (std::find(list.begin(), list.end(), value) == list.end()) {
      list.push_back(value);
    }
  }

  [[noreturn]] void malformed(const std::string& reason) const {
    if (axml_) {
      fail_axml(position_, reason);
    }
    throw Error(ErrorKind::MalformedXml,
                "line " + std::to_string(position_) + ": " + reason);
  }

  ManifestInfo info_;
  std::vector<std::string> path_;
  bool axml_ = false;
  std::size_t position_ = 0;
};

ManifestInfo parse_axml(std::span<const std::uint8_t> data) {
  AxmlReader r(data);
  if (r.u16(0) != kChunkXml) {
    fail_axml(0, "not an AXML document");
  }
  const std::uint32_t doc_size = r.u32(4);
  if (doc_size > r.size() || doc_size < 8) {
    fail_axml(4, "document size field out of range");
  }

  std::optional<StringPool> pool;
  ManifestBuilder builder;

  std::size_t pos = 8;
  while (pos + 8 <= doc_size) {
    const std::uint16_t type = r.u16(pos);
    const std::uint32_t size = r.u32(pos + 4);
    if (size < 8 || pos + size > doc_size) {
      fail_axml(pos, "chunk size out of range");
    }

    switch (type) {
      case kChunkStringPool:
        pool = parse_string_pool(r, pos, size);
        break;
      case kChunkResourceMap:
      case kChunkStartNamespace:
      case kChunkEndNamespace:
      case kChunkCdata:
        break;
      case kChunkStartElement: {
        if (!pool) fail_axml(pos, "element before string pool");
        const std::uint32_t name_idx = r.u32(pos + 20);
        AxmlElement element;
        element.name = pool->at(name_idx, pos + 20);

        const std::uint16_t attr_start = r.u16(pos + 24);
        const std::uint16_t attr_size = r.u16(pos + 26);
        const std::uint16_t attr_count = r.u16(pos + 28);
        if (attr_size < 20) fail_axml(pos + 26, "attribute record too small");
        std::size_t attr_at = pos + 16 + attr_start;
        for (std::uint16_t i = 0; i < attr_count; ++i) {
          if (attr_at + attr_size > pos + size) {
            fail_axml(attr_at, "attribute overruns element chunk");
          }
          AxmlAttribute attribute;
          attribute.name = pool->at(r.u32(attr_at + 4), attr_at + 4);
          attribute.value.raw_string_index = r.u32(attr_at + 8);
          attribute.value.data_type = r.u8(attr_at + 15);
          attribute.value.data = r.u32(attr_at + 16);
          element.attributes.push_back(std::move(attribute));
          attr_at += attr_size;
        }

        std::vector<std::pair<std::string, std::string>> attrs;
        std::optional<std::int64_t> version_code;
        for (const auto& a : element.attributes) {
          switch (a.value.data_type) {
            case kTypeString:
              attrs.emplace_back(a.name, pool->at(a.value.data, pos));
              break;
            case kTypeIntDec:
            case kTypeIntHex:
              if (a.name == "versionCode") {
                version_code = static_cast<std::int32_t>(a.value.data);
              } else {
                attrs.emplace_back(a.name, std::to_string(a.value.data));
              }
              break;
            case kTypeBoolean:
              attrs.emplace_back(a.name, a.value.data ? "true" : "false");
              break;
            default:
              // references and other typed values are not manifest fields
              // this extractor consumes
              break;
          }
        }
        builder.set_malformed_thrower(true, pos);
        builder.start_element(element.name, attrs, version_code);
        break;
      }
      case kChunkEndElement:
        builder.end_element();
        break;
      default:
        fail_axml(pos, "unknown chunk type " + std::to_string(type));
    }
    pos += size;
  }
  return builder.finish();
}

// -- plain-text path ---------------------------------------------------------

class XmlCursor {
 public:
  explicit XmlCursor(std::string_view text) : text_(text) {}

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  std::size_t line() const { return line_; }

  char next() {
    char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  bool consume(std::string_view token) {
    if (text_.substr(pos_).starts_with(token)) {
      for (std::size_t i = 0; i < token.size(); ++i) next();
      return true;
    }
    return false;
  }

  void skip_whitespace() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r' ||
                      peek() == '\n')) {
      next();
    }
  }

  void skip_until(std::string_view token) {
    while (!eof() && !consume(token)) next();
  }

  [[noreturn]] void malformed(const std::string& reason) const {
    throw Error(ErrorKind::MalformedXml,
                "line " + std::to_string(line_) + ": " + reason);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

bool name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.' || c == ':';
}

std::string read_name(XmlCursor& c) {
  std::string name;
  while (!c.eof() && name_char(c.peek())) name.push_back(c.next());
  if (name.empty()) c.malformed("expected a name");
  return name;
}

std::string decode_entities(XmlCursor& c, const std::string& raw) {
  std::string out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] != '&') {
      out.push_back(raw[i]);
      continue;
    }
    const std::string_view rest(raw.data() + i, raw.size() - i);
    if (rest.starts_with("&amp;")) {
      out.push_back('&');
      i += 4;
    } else if (rest.starts_with("&lt;")) {
      out.push_back('<');
      i += 3;
    } else if (rest.starts_with("&gt;")) {
      out.push_back('>');
      i += 3;
    } else if (rest.starts_with("&quot;")) {
      out.push_back('"');
      i += 5;
    } else if (rest.starts_with("&apos;")) {
      out.push_back('\'');
      i += 5;
    } else {
      c.malformed("unknown entity");
    }
  }
  return out;
}

// strips a namespace prefix: android:name -> name
std::string local_name(const std::string& qualified) {
  const std::size_t colon = qualified.find(':');
  return colon == std::string::npos ? qualified : qualified.substr(colon + 1);
}

ManifestInfo parse_text_xml(std::string_view text) {
  XmlCursor c(text);
  ManifestBuilder builder;
  int depth = 0;
  bool seen_root = false;

  while (true) {
    c.skip_whitespace();
    if (c.eof()) break;
    if (c.peek() != '<') c.malformed("text outside of elements");
    c.next();

    if (c.consume("?")) {
      c.skip_until("?>");
      continue;
    }
    if (c.consume("!--")) {
      c.skip_until("-->");
      continue;
    }
    if (c.consume("/")) {
      read_name(c);
      c.skip_whitespace();
      if (c.eof() || c.next() != '>') c.malformed("unterminated closing tag");
      if (depth == 0) c.malformed("closing tag without opener");
      --depth;
      builder.end_element();
      if (depth == 0) break;
      continue;
    }

    const std::string element = read_name(c);
    std::vector<std::pair<std::string, std::string>> attrs;

    while (true) {
      c.skip_whitespace();
      if (c.eof()) c.malformed("unterminated element");
      if (c.peek() == '/' || c.peek() == '>') break;
      const std::string attr_name = read_name(c);
      c.skip_whitespace();
      if (c.eof() || c.next() != '=') c.malformed("expected = after attribute");
      c.skip_whitespace();
      if (c.eof()) c.malformed("unterminated attribute");
      const char quote = c.next();
      if (quote != '"' && quote != '\'') c.malformed("attribute value must be quoted");
      std::string raw;
      while (!c.eof() && c.peek() != quote) raw.push_back(c.next());
      if (c.eof()) c.malformed("unterminated attribute value");
      c.next();
      attrs.emplace_back(local_name(attr_name), decode_entities(c, raw));
    }

    bool self_closing = false;
    if (c.peek() == '/') {
      c.next();
      self_closing = true;
    }
    if (c.eof() || c.next() != '>') c.malformed("unterminated start tag");

    if (depth == 0 && seen_root) c.malformed("multiple root elements");
    seen_root = true;

    builder.set_malformed_thrower(false, c.line());
    builder.start_element(element, attrs, std::nullopt);
    if (self_closing) {
      builder.end_element();
      if (depth == 0) break;
    } else {
      ++depth;
    }
  }

  if (!seen_root) c.malformed("no root element");
  if (depth != 0) c.malformed("unclosed elements at end of document");
  return builder.finish();
}

}  // namespace

const char* component_kind_name(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::Activity: return "activity";
    case ComponentKind::Service: return "service";
    case ComponentKind::Receiver: return "receiver";
    case ComponentKind::Provider: return "provider";
  }
  return "?";
}

ManifestInfo parse_manifest(std::span<const std::uint8_t> data) {
  if (data.size() >= 4) {
    const std::uint16_t type = static_cast<std::uint16_t>(data[0] | (data[1] << 8));
    if (type == kChunkXml) {
      return parse_axml(data);
    }
  }
  return parse_text_xml(
      std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

ManifestInfo parse_manifest(std::string_view text) {
  return parse_manifest(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace b2mdf
