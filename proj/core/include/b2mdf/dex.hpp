#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace b2mdf {

struct Uleb128 {
  std::uint32_t value = 0;
  std::size_t next_offset = 0;
};

// Unsigned little-endian base-128 varint as used throughout the DEX format.
// Errors: TruncatedVarint, OverlongVarint (more than 5 bytes / 32-bit overflow).
Uleb128 read_uleb128(std::span<const std::uint8_t> data, std::size_t offset);

struct MethodRef {
  std::string class_descriptor;
  std::string name;
  std::string shorty;
};

struct CodeItem {
  std::uint32_t method_index = 0;
  std::vector<std::uint16_t> insns;  // raw code units
};

struct DexFile {
  std::vector<std::string> string_table;
  std::vector<MethodRef> method_refs;
  std::vector<CodeItem> code_items;  // class_def order, then method order
};

// Parses the sections this pipeline consumes: strings, method references,
// and every code item reachable through class_data_items.
// Errors: BadMagic, TruncatedFile(section), IndexOutOfRange(table).
DexFile parse_dex(std::span<const std::uint8_t> data);

struct DecodedInstructions {
  std::vector<std::uint8_t> opcodes;  // payload pseudo-instructions excluded
  std::size_t consumed_units = 0;     // equals insns.size() on success
};

// Decodes one insns array by width: the opcode is the low byte of the first
// code unit, the advance comes from the standard format-width table, and
// switch/array payloads advance by their self-declared size without
// emitting an opcode.
// Errors: UnknownOpcode(value, offset), TruncatedInstruction(offset).
DecodedInstructions decode_instructions(std::span<const std::uint16_t> insns);

// Width in code units for a plain (non-payload) opcode; 0 marks gaps in the
// instruction set.
std::uint8_t opcode_width(std::uint8_t opcode);

struct OpcodeSequence {
  std::vector<std::uint8_t> opcodes;
  std::array<std::uint64_t, 256> histogram{};
};

OpcodeSequence extract_opcode_sequence(const DexFile& dex);

}  // namespace b2mdf
