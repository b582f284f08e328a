#pragma once

// JSON documents written by the tool: test/peel reports and P-vs-Q
// distribution comparisons. Both carry a schema name and version; readers
// refuse anything else with a SchemaError.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cyclic/exact_resampling.hpp"
#include "cyclic/io.hpp"
#include "cyclic/peeling.hpp"
#include "cyclic/perm_engine.hpp"

namespace cyclic {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr int kComparisonSchemaVersion = 1;
inline constexpr const char* kReportSchema = "cyclicshift-report";
inline constexpr const char* kComparisonSchema = "cyclicshift-comparison";

struct Report {
  std::string tool_version;
  std::string command = "test";  // "test" or "peel"
  std::size_t n_samples = 0;
  std::size_t n_markers = 0;
  TestResult test;
  std::optional<PeelConfig> peel_config;
  std::optional<PeelReport> peel;
  std::vector<InputProvenance> inputs;

  bool operator==(const Report&) const = default;
};

/// Report for a single test run on `x`, stamped with the current tool version.
Report make_report(const MarkerMatrix& x, const TestResult& result,
                   std::vector<InputProvenance> inputs);

std::string report_to_json(const Report& r);
/// Throws InputError for text that is not JSON, SchemaError for a document of
/// the wrong kind, version or shape.
Report report_from_json(const std::string& text);

void write_report(const Report& r, const std::filesystem::path& path);
Report read_report(const std::filesystem::path& path);

std::string comparison_to_json(const DistributionComparison& c);
DistributionComparison comparison_from_json(const std::string& text);

void write_comparison(const DistributionComparison& c, const std::filesystem::path& path);
DistributionComparison read_comparison(const std::filesystem::path& path);

/// Whole file as a string; InputError when unreadable.
std::string read_text_file(const std::filesystem::path& path);
/// Writes `text` verbatim.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace cyclic
