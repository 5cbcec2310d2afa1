#include "b2mdf/dynamic_features.hpp"

#include <algorithm>
#include <charconv>

#include "b2mdf/errors.hpp"

namespace b2mdf {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

std::string_view trim(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && is_space(s[begin])) ++begin;
  while (end > begin && is_space(s[end - 1])) --end;
  return s.substr(begin, end - begin);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t next = text.find(sep, pos);
    if (next == std::string_view::npos) next = text.size();
    out.push_back(text.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

}  // namespace

std::uint64_t NgramFeature::total() const {
  std::uint64_t sum = 0;
  for (const auto& [gram, count] : counts) {
    (void)gram;
    sum += count;
  }
  return sum;
}

SyscallTrace parse_syscall_trace(std::string_view text, const AppVersionKey& app) {
  SyscallTrace trace{app, {}};
  std::size_t position = 0;
  for (std::string_view line : split(text, '\n')) {
    for (std::string_view segment : split(line, ',')) {
      std::string_view token = trim(segment);
      if (token.empty()) continue;  // blank lines and stray separators
      if (std::any_of(token.begin(), token.end(), is_space)) {
        throw Error(ErrorKind::BadToken,
                    "embedded whitespace in token " + std::to_string(position));
      }
      trace.calls.emplace_back(token);
      ++position;
    }
  }
  if (trace.calls.empty()) {
    throw Error(ErrorKind::EmptyTrace, "no syscall tokens");
  }
  return trace;
}

NgramFeature syscall_ngrams(const SyscallTrace& trace, std::uint32_t n) {
  if (n < 1) {
    throw Error(ErrorKind::BadConfig, "n-gram size must be >= 1");
  }
  NgramFeature feature;
  feature.app = trace.app;
  feature.n = n;
  const std::size_t len = trace.calls.size();
  if (n > len) {
    return feature;
  }
  for (std::size_t i = 0; i + n <= len; ++i) {
    std::string gram = trace.calls[i];
    for (std::size_t j = 1; j < n; ++j) {
      gram += '|';
      gram += trace.calls[i + j];
    }
    ++feature.counts[gram];
  }
  return feature;
}

ResourceSamples parse_resource_samples(std::string_view text,
                                       const AppVersionKey& app) {
  ResourceSamples samples{app, {}, {}};
  std::vector<std::string_view> lines = split(text, '\n');
  // drop trailing blank lines
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) {
    throw Error(ErrorKind::EmptyFile, "no header row");
  }

  for (std::string_view cell : split(lines[0], ',')) {
    std::string_view name = trim(cell);
    if (name.empty()) {
      throw Error(ErrorKind::BadHeader, "empty metric name");
    }
    if (std::find(samples.schema.begin(), samples.schema.end(),
                  std::string(name)) != samples.schema.end()) {
      throw Error(ErrorKind::BadHeader, "duplicate metric name: " + std::string(name));
    }
    samples.schema.emplace_back(name);
  }

  for (std::size_t row = 1; row < lines.size(); ++row) {
    if (trim(lines[row]).empty()) continue;
    std::vector<std::string_view> cells = split(lines[row], ',');
    if (cells.size() != samples.schema.size()) {
      throw Error(ErrorKind::RaggedRow, "line " + std::to_string(row + 1));
    }
    std::vector<double> values;
    values.reserve(cells.size());
    for (std::size_t col = 0; col < cells.size(); ++col) {
      std::string_view cell = trim(cells[col]);
      double value = 0;
      auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc{} || end != cell.data() + cell.size() || cell.empty()) {
        throw Error(ErrorKind::NonNumeric, "line " + std::to_string(row + 1) +
                                               ", column " + std::to_string(col + 1));
      }
      values.push_back(value);
    }
    samples.rows.push_back(std::move(values));
  }

  if (samples.rows.empty()) {
    throw Error(ErrorKind::EmptyFile, "header without data rows");
  }
  return samples;
}

ResourceFeature resource_features(const ResourceSamples& samples) {
  if (samples.rows.empty()) {
    throw Error(ErrorKind::NoSamples, "no samples to aggregate");
  }
  ResourceFeature feature;
  feature.app = samples.app;
  for (std::size_t m = 0; m < samples.schema.size(); ++m) {
    double sum = 0;
    double max = samples.rows[0][m];
    for (const auto& row : samples.rows) {
      sum += row[m];
      max = std::max(max, row[m]);
    }
    const std::string& metric = samples.schema[m];
    feature.values[metric + ".mean"] = sum / static_cast<double>(samples.rows.size());
    feature.values[metric + ".max"] = max;
    feature.values[metric + ".last"] = samples.rows.back()[m];
  }
  return feature;
}

json ngram_payload(const NgramFeature& feature) {
  json counts = json::object();
  for (const auto& [gram, count] : feature.counts) {
    counts[gram] = count;
  }
  return json{{"kind", payload_kind::kSyscallNgrams},
              {"app_id", feature.app.app_id},
              {"version_code", feature.app.version_code},
              {"n", feature.n},
              {"counts", std::move(counts)}};
}

json resource_payload(const ResourceFeature& feature) {
  json values = json::object();
  for (const auto& [key, value] : feature.values) {
    values[key] = value;
  }
  return json{{"kind", payload_kind::kResources},
              {"app_id", feature.app.app_id},
              {"version_code", feature.app.version_code},
              {"values", std::move(values)}};
}

}  // namespace b2mdf
