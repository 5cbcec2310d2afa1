#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "b2mdf/canonical.hpp"
#include "b2mdf/static_features.hpp"

namespace b2mdf {

struct SyscallTrace {
  AppVersionKey app;
  std::vector<std::string> calls;
};

struct NgramFeature {
  AppVersionKey app;
  std::uint32_t n = 1;
  std::map<std::string, std::uint64_t> counts;  // gram joined with "|"

  std::uint64_t total() const;
};

struct ResourceSamples {
  AppVersionKey app;
  std::vector<std::string> schema;  // header order
  std::vector<std::vector<double>> rows;
};

struct ResourceFeature {
  AppVersionKey app;
  std::map<std::string, double> values;  // "<metric>.<agg>", agg in mean|max|last
};

// Comma- or newline-separated syscall tokens; blank segments are skipped.
// Errors: EmptyTrace, BadToken(position) for embedded whitespace.
SyscallTrace parse_syscall_trace(std::string_view text, const AppVersionKey& app);

// Sliding-window counts; n > trace length yields empty counts.
NgramFeature syscall_ngrams(const SyscallTrace& trace, std::uint32_t n);

// CSV with a header of metric names and numeric rows.
// Errors: EmptyFile, BadHeader, RaggedRow(line), NonNumeric(line, column).
ResourceSamples parse_resource_samples(std::string_view text,
                                       const AppVersionKey& app);

// mean/max/last per metric. Error: NoSamples.
ResourceFeature resource_features(const ResourceSamples& samples);

json ngram_payload(const NgramFeature& feature);
json resource_payload(const ResourceFeature& feature);

}  // namespace b2mdf
