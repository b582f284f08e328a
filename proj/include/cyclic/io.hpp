#pragma once

// Marker table files and the data transforms applied before testing.
//
// Marker table (TSV, optionally gzip-compressed):
//
//   marker_id  chrom  pos    <sample 1>  <sample 2>  ...
//   cn001      1      10500  0.12        -0.40
//
// One marker per line, one sample per value column. chrom and pos may be
// "." when unknown. Markers of a chromosome form one contiguous block with
// strictly increasing pos. Values are decimal reals or the token NA.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "cyclic/matrix.hpp"

namespace cyclic {

enum class NaPolicy { reject, impute_row_median };

std::string to_string(NaPolicy p);
NaPolicy parse_na_policy(const std::string& s);

/// Where a matrix came from and what was done to it on the way in.
struct InputProvenance {
  std::string path;
  std::string sha256;  // of the file bytes as stored on disk
  std::string na_policy = "reject";
  std::uint64_t imputed_cells = 0;
  std::string transform;  // empty, "zscore" or "paired-diff"
  std::uint64_t clamped_cells = 0;

  bool operator==(const InputProvenance&) const = default;
};

struct LoadedMatrix {
  MarkerMatrix matrix;
  InputProvenance provenance;
};

/// Parses a marker table from text. Every malformed line raises InputError
/// carrying its 1-based line number.
LoadedMatrix parse_matrix(std::istream& in, NaPolicy policy = NaPolicy::reject);

/// Reads `path` (plain or gzip), transposed to samples as rows.
LoadedMatrix load_matrix(const std::filesystem::path& path, NaPolicy policy = NaPolicy::reject);

void write_matrix(const MarkerMatrix& x, std::ostream& out);
void write_matrix(const MarkerMatrix& x, const std::filesystem::path& path);

/// Lowercase hex SHA-256 of a file's bytes.
std::string file_sha256(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Entrywise tumor - normal. Throws InputError naming the first marker whose
/// annotation differs, DimensionError when the shapes differ.
MarkerMatrix paired_difference(const MarkerMatrix& tumor, const MarkerMatrix& normal);

struct ZscoreResult {
  MarkerMatrix matrix;
  std::uint64_t clamped_cells = 0;  // p = 1 entries replaced by 1 - 2^-53
};

/// x = -inv_norm_cdf(p), then max(x, floor). Entries must lie in (0, 1];
/// anything else is a DomainError.
ZscoreResult zscore_transform(const MarkerMatrix& pvalues, double floor = 0.0);

/// Per-marker statistic table consumed by the genome track figure:
/// marker_id,chrom,pos,stat
void write_column_stats(const MarkerMatrix& x, std::span<const double> stats, std::ostream& out);
void write_column_stats(const MarkerMatrix& x, std::span<const double> stats,
                        const std::filesystem::path& path);

struct ColumnStatRow {
  ColumnAnnotation column;
  double stat;

  bool operator==(const ColumnStatRow&) const = default;
};

std::vector<ColumnStatRow> read_column_stats(std::istream& in);

}  // namespace cyclic
