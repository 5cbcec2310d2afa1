#include "b2mdf/dex.hpp"

#include <cstring>

#include "b2mdf/errors.hpp"

namespace b2mdf {

namespace {

constexpr std::size_t kHeaderSize = 112;

[[noreturn]] void fail_truncated(const std::string& section) {
  throw Error(ErrorKind::TruncatedFile, section);
}

class DexReader {
 public:
  explicit DexReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint16_t u16(std::size_t offset, const char* section) const {
    require(offset, 2, section);
    return static_cast<std::uint16_t>(data_[offset] | (data_[offset + 1] << 8));
  }
  std::uint32_t u32(std::size_t offset, const char* section) const {
    require(offset, 4, section);
    return static_cast<std::uint32_t>(data_[offset]) |
           (static_cast<std::uint32_t>(data_[offset + 1]) << 8) |
           (static_cast<std::uint32_t>(data_[offset + 2]) << 16) |
           (static_cast<std::uint32_t>(data_[offset + 3]) << 24);
  }
  std::span<const std::uint8_t> bytes() const { return data_; }
  std::size_t size() const { return data_.size(); }

  void require(std::size_t offset, std::size_t length, const char* section) const {
    if (offset > data_.size() || length > data_.size() - offset) {
      fail_truncated(section);
    }
  }

 private:
  std::span<const std::uint8_t> data_;
};

// Widths in code units per opcode, indexed by the low byte. Zero marks the
// unused gaps of the 035/037 instruction set.
constexpr std::array<std::uint8_t, 256> build_width_table() {
  std::array<std::uint8_t, 256> w{};
  auto fill = [&](int lo, int hi, std::uint8_t units) {
    for (int op = lo; op <= hi; ++op) w[static_cast<std::size_t>(op)] = units;
  };
  fill(0x00, 0x0d, 1);  // nop, move family, move-result family
  w[0x02] = 2;          // move/from16
  w[0x03] = 3;          // move/16
  w[0x05] = 2;          // move-wide/from16
  w[0x06] = 3;          // move-wide/16
  w[0x08] = 2;          // move-object/from16
  w[0x09] = 3;          // move-object/16
  fill(0x0e, 0x11, 1);  // return family
  w[0x12] = 1;          // const/4
  w[0x13] = 2;          // const/16
  w[0x14] = 3;          // const
  w[0x15] = 2;          // const/high16
  w[0x16] = 2;          // const-wide/16
  w[0x17] = 3;          // const-wide/32
  w[0x18] = 5;          // const-wide
  w[0x19] = 2;          // const-wide/high16
  w[0x1a] = 2;          // const-string
  w[0x1b] = 3;          // const-string/jumbo
  w[0x1c] = 2;          // const-class
  w[0x1d] = 1;          // monitor-enter
  w[0x1e] = 1;          // monitor-exit
  w[0x1f] = 2;          // check-cast
  w[0x20] = 2;          // instance-of
  w[0x21] = 1;          // array-length
  w[0x22] = 2;          // new-instance
  w[0x23] = 2;          // new-array
  w[0x24] = 3;          // filled-new-array
  w[0x25] = 3;          // filled-new-array/range
  w[0x26] = 3;          // fill-array-data
  w[0x27] = 1;          // throw
  w[0x28] = 1;          // goto
  w[0x29] = 2;          // goto/16
  w[0x2a] = 3;          // goto/32
  w[0x2b] = 3;          // packed-switch
  w[0x2c] = 3;          // sparse-switch
  fill(0x2d, 0x31, 2);  // cmp family
  fill(0x32, 0x37, 2);  // if-test
  fill(0x38, 0x3d, 2);  // if-testz
  fill(0x44, 0x51, 2);  // aget/aput
  fill(0x52, 0x5f, 2);  // iget/iput
  fill(0x60, 0x6d, 2);  // sget/sput
  fill(0x6e, 0x72, 3);  // invoke-kind
  fill(0x74, 0x78, 3);  // invoke-kind/range
  fill(0x7b, 0x8f, 1);  // unary ops
  fill(0x90, 0xaf, 2);  // binary ops
  fill(0xb0, 0xcf, 1);  // binop/2addr
  fill(0xd0, 0xd7, 2);  // binop/lit16
  fill(0xd8, 0xe2, 2);  // binop/lit8
  return w;
}

constexpr std::array<std::uint8_t, 256> kOpcodeWidth = build_width_table();

constexpr std::uint16_t kPackedSwitchIdent = 0x0100;
constexpr std::uint16_t kSparseSwitchIdent = 0x0200;
constexpr std::uint16_t kFillArrayIdent = 0x0300;

}  // namespace

Uleb128 read_uleb128(std::span<const std::uint8_t> data, std::size_t offset) {
  std::uint32_t value = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    if (offset + i >= data.size()) {
      throw Error(ErrorKind::TruncatedVarint,
                  "at offset " + std::to_string(offset));
    }
    const std::uint8_t byte = data[offset + i];
    if (i == 4 && (byte & 0xF0) != 0) {
      throw Error(ErrorKind::OverlongVarint,
                  "at offset " + std::to_string(offset));
    }
    value |= static_cast<std::uint32_t>(byte & 0x7F) << (7 * i);
    if ((byte & 0x80) == 0) {
      return {value, offset + i + 1};
    }
  }
  throw Error(ErrorKind::OverlongVarint, "at offset " + std::to_string(offset));
}

std::uint8_t opcode_width(std::uint8_t opcode) { return kOpcodeWidth[opcode]; }

DexFile parse_dex(std::span<const std::uint8_t> data) {
  DexReader r(data);
  if (r.size() < kHeaderSize) {
    fail_truncated("header");
  }
  static const std::uint8_t kMagic035[8] = {'d', 'e', 'x', '\n', '0', '3', '5', 0};
  static const std::uint8_t kMagic037[8] = {'d', 'e', 'x', '\n', '0', '3', '7', 0};
  if (std::memcmp(data.data(), kMagic035, 8) != 0 &&
      std::memcmp(data.data(), kMagic037, 8) != 0) {
    throw Error(ErrorKind::BadMagic, "not a dex 035/037 file");
  }

  const std::uint32_t string_ids_size = r.u32(56, "header");
  const std::uint32_t string_ids_off = r.u32(60, "header");
  const std::uint32_t type_ids_size = r.u32(64, "header");
  const std::uint32_t type_ids_off = r.u32(68, "header");
  const std::uint32_t proto_ids_size = r.u32(72, "header");
  const std::uint32_t proto_ids_off = r.u32(76, "header");
  const std::uint32_t method_ids_size = r.u32(88, "header");
  const std::uint32_t method_ids_off = r.u32(92, "header");
  const std::uint32_t class_defs_size = r.u32(96, "header");
  const std::uint32_t class_defs_off = r.u32(100, "header");

  DexFile dex;

  // strings
  r.require(string_ids_off, static_cast<std::size_t>(string_ids_size) * 4,
            "string_ids");
  dex.string_table.reserve(string_ids_size);
  for (std::uint32_t i = 0; i < string_ids_size; ++i) {
    const std::uint32_t item_off = r.u32(string_ids_off + 4 * i, "string_ids");
    auto [utf16_len, payload_off] = read_uleb128(data, item_off);
    (void)utf16_len;
    std::string s;
    std::size_t p = payload_off;
    while (true) {
      if (p >= data.size()) fail_truncated("string_data");
      const char c = static_cast<char>(data[p]);
      if (c == '\0') break;
      s.push_back(c);  // MUTF-8 accepted as UTF-8 at this scale
      ++p;
    }
    dex.string_table.push_back(std::move(s));
  }

  auto string_at = [&](std::uint32_t index, const char* table) -> const std::string& {
    if (index >= dex.string_table.size()) {
      throw Error(ErrorKind::IndexOutOfRange,
                  std::string(table) + " string index " + std::to_string(index));
    }
    return dex.string_table[index];
  };

  // type descriptors
  std::vector<std::uint32_t> type_descriptor_idx(type_ids_size);
  r.require(type_ids_off, static_cast<std::size_t>(type_ids_size) * 4, "type_ids");
  for (std::uint32_t i = 0; i < type_ids_size; ++i) {
    type_descriptor_idx[i] = r.u32(type_ids_off + 4 * i, "type_ids");
    string_at(type_descriptor_idx[i], "type_ids");
  }
  auto type_descriptor = [&](std::uint32_t index, const char* table) -> const std::string& {
    if (index >= type_descriptor_idx.size()) {
      throw Error(ErrorKind::IndexOutOfRange,
                  std::string(table) + " type index " + std::to_string(index));
    }
    return dex.string_table[type_descriptor_idx[index]];
  };

  // proto shorties
  std::vector<std::uint32_t> proto_shorty_idx(proto_ids_size);
  r.require(proto_ids_off, static_cast<std::size_t>(proto_ids_size) * 12,
            "proto_ids");
  for (std::uint32_t i = 0; i < proto_ids_size; ++i) {
    proto_shorty_idx[i] = r.u32(proto_ids_off + 12 * i, "proto_ids");
    string_at(proto_shorty_idx[i], "proto_ids");
  }

  // method references
  r.require(method_ids_off, static_cast<std::size_t>(method_ids_size) * 8,
            "method_ids");
  dex.method_refs.reserve(method_ids_size);
  for (std::uint32_t i = 0; i < method_ids_size; ++i) {
    const std::size_t at = method_ids_off + 8 * i;
    const std::uint16_t class_idx = r.u16(at, "method_ids");
    const std::uint16_t proto_idx = r.u16(at + 2, "method_ids");
    const std::uint32_t name_idx = r.u32(at + 4, "method_ids");
    if (proto_idx >= proto_shorty_idx.size()) {
      throw Error(ErrorKind::IndexOutOfRange,
                  "method_ids proto index " + std::to_string(proto_idx));
    }
    MethodRef ref;
    ref.class_descriptor = type_descriptor(class_idx, "method_ids");
    ref.name = string_at(name_idx, "method_ids");
    ref.shorty = dex.string_table[proto_shorty_idx[proto_idx]];
    dex.method_refs.push_back(std::move(ref));
  }

  // class_defs -> class_data -> code items
  r.require(class_defs_off, static_cast<std::size_t>(class_defs_size) * 32,
            "class_defs");
  for (std::uint32_t i = 0; i < class_defs_size; ++i) {
    const std::size_t def_at = class_defs_off + 32 * i;
    const std::uint32_t class_data_off = r.u32(def_at + 24, "class_defs");
    if (class_data_off == 0) continue;

    std::size_t p = class_data_off;
    auto next = [&]() {
      auto v = read_uleb128(data, p);
      p = v.next_offset;
      return v.value;
    };
    const std::uint32_t static_fields = next();
    const std::uint32_t instance_fields = next();
    const std::uint32_t direct_methods = next();
    const std::uint32_t virtual_methods = next();
    for (std::uint32_t f = 0; f < static_fields + instance_fields; ++f) {
      next();  // field_idx_diff
      next();  // access_flags
    }
    std::uint32_t method_index = 0;
    for (std::uint32_t m = 0; m < direct_methods + virtual_methods; ++m) {
      if (m == direct_methods) method_index = 0;  // diffs restart per list
      const std::uint32_t idx_diff = next();
      next();  // access_flags
      const std::uint32_t code_off = next();
      method_index = (m == 0 || m == direct_methods) ? idx_diff
                                                     : method_index + idx_diff;
      if (method_index >= dex.method_refs.size()) {
        throw Error(ErrorKind::IndexOutOfRange,
                    "class_data method index " + std::to_string(method_index));
      }
      if (code_off == 0) continue;

      const std::uint32_t insns_size = r.u32(code_off + 12, "code_item");
      r.require(code_off + 16, static_cast<std::size_t>(insns_size) * 2,
                "code_item insns");
      CodeItem item;
      item.method_index = method_index;
      item.insns.reserve(insns_size);
      for (std::uint32_t u = 0; u < insns_size; ++u) {
        item.insns.push_back(r.u16(code_off + 16 + 2 * u, "code_item insns"));
      }
      dex.code_items.push_back(std::move(item));
    }
  }

  return dex;
}

DecodedInstructions decode_instructions(std::span<const std::uint16_t> insns) {
  DecodedInstructions out;
  std::size_t pos = 0;
  while (pos < insns.size()) {
    const std::uint16_t unit = insns[pos];
    const std::uint8_t low = static_cast<std::uint8_t>(unit & 0xFF);

    if (low == 0x00 && (unit == kPackedSwitchIdent || unit == kSparseSwitchIdent ||
                        unit == kFillArrayIdent)) {
      // payload pseudo-instruction: advance by its self-declared size
      if (pos + 2 > insns.size()) {
        throw Error(ErrorKind::TruncatedInstruction,
                    "payload header at unit " + std::to_string(pos));
      }
      std::size_t units = 0;
      if (unit == kPackedSwitchIdent) {
        const std::uint16_t size = insns[pos + 1];
        units = static_cast<std::size_t>(size) * 2 + 4;
      } else if (unit == kSparseSwitchIdent) {
        const std::uint16_t size = insns[pos + 1];
        units = static_cast<std::size_t>(size) * 4 + 2;
      } else {
        if (pos + 4 > insns.size()) {
          throw Error(ErrorKind::TruncatedInstruction,
                      "fill-array-data header at unit " + std::to_string(pos));
        }
        const std::uint16_t element_width = insns[pos + 1];
        const std::uint32_t count = static_cast<std::uint32_t>(insns[pos + 2]) |
                                    (static_cast<std::uint32_t>(insns[pos + 3]) << 16);
        const std::uint64_t data_bytes =
            static_cast<std::uint64_t>(element_width) * count;
        units = 4 + static_cast<std::size_t>((data_bytes + 1) / 2);
      }
      if (pos + units > insns.size()) {
        throw Error(ErrorKind::TruncatedInstruction,
                    "payload overruns insns at unit " + std::to_string(pos));
      }
      pos += units;
      continue;
    }

    const std::uint8_t width = kOpcodeWidth[low];
    if (width == 0) {
      static const char hexd[] = "0123456789abcdef";
      const std::string hex{hexd[low >> 4], hexd[low & 0x0F]};
      throw Error(ErrorKind::UnknownOpcode,
                  "opcode 0x" + hex + " at unit " + std::to_string(pos));
    }
    if (pos + width > insns.size()) {
      throw Error(ErrorKind::TruncatedInstruction,
                  "instruction overruns insns at unit " + std::to_string(pos));
    }
    out.opcodes.push_back(low);
    pos += width;
  }
  out.consumed_units = pos;
  return out;
}

OpcodeSequence extract_opcode_sequence(const DexFile& dex) {
  OpcodeSequence seq;
  for (const auto& item : dex.code_items) {
    DecodedInstructions decoded = decode_instructions(item.insns);
    for (std::uint8_t op : decoded.opcodes) {
      seq.opcodes.push_back(op);
      ++seq.histogram[op];
    }
  }
  return seq;
}

}  // namespace b2mdf
