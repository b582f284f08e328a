#include "cyclic/io.hpp"

#include <openssl/evp.h>
#include <zlib.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <unordered_map>

#include "cyclic/error.hpp"
#include "cyclic/normal.hpp"
#include "cyclic/peeling.hpp"

namespace cyclic {

std::string to_string(NaPolicy p) {
  return p == NaPolicy::reject ? "reject" : "impute-row-median";
}

NaPolicy parse_na_policy(const std::string& s) {
  if (s == "reject") return NaPolicy::reject;
  if (s == "impute-row-median") return NaPolicy::impute_row_median;
  throw DomainError("unknown NA policy '" + s + "' (expected reject or impute-row-median)");
}

namespace {

constexpr const char* kNaToken = "NA";
constexpr const char* kMissing = ".";

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

bool parse_real(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_position(std::string_view s, std::uint64_t& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

LoadedMatrix parse_matrix(std::istream& in, NaPolicy policy) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> samples;
  bool have_header = false;

  std::vector<ColumnAnnotation> columns;
  std::vector<std::size_t> column_line;
  std::vector<double> by_marker;  // marker-major while reading
  std::vector<std::uint8_t> missing;
  std::unordered_map<std::string, std::size_t> seen_ids;
  std::unordered_map<std::string, std::size_t> closed_chroms;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_tabs(line);

    if (!have_header) {
      if (fields.size() < 4 || fields[0] != "marker_id" || fields[1] != "chrom" || fields[2] != "pos") {
        throw InputError("header must be marker_id, chrom, pos followed by at least one sample column",
                         lineno);
      }
      for (std::size_t k = 3; k < fields.size(); ++k) {
        std::string id(fields[k]);
        if (id.empty()) throw InputError("empty sample id in header", lineno);
        if (std::find(samples.begin(), samples.end(), id) != samples.end()) {
          throw InputError("duplicate sample id '" + id + "'", lineno);
        }
        samples.push_back(std::move(id));
      }
      have_header = true;
      continue;
    }

    if (fields.size() != samples.size() + 3) {
      throw InputError("ragged row: expected " + std::to_string(samples.size() + 3) +
                           " fields, found " + std::to_string(fields.size()),
                       lineno);
    }
    ColumnAnnotation col;
    col.marker_id = std::string(fields[0]);
    if (col.marker_id.empty()) throw InputError("empty marker_id", lineno);
    if (const auto it = seen_ids.find(col.marker_id); it != seen_ids.end()) {
      throw InputError("duplicate marker_id '" + col.marker_id + "' (first seen on line " +
                           std::to_string(it->second) + ")",
                       lineno);
    }
    seen_ids.emplace(col.marker_id, lineno);
    if (fields[1] != kMissing) {
      if (fields[1].empty()) throw InputError("empty chrom for marker '" + col.marker_id + "'", lineno);
      col.chromosome = std::string(fields[1]);
    }
    if (fields[2] != kMissing) {
      std::uint64_t pos = 0;
      if (!parse_position(fields[2], pos)) {
        throw InputError("position '" + std::string(fields[2]) + "' of marker '" + col.marker_id +
                             "' is not a non-negative integer",
                         lineno);
      }
      col.position_bp = pos;
    }

    if (!columns.empty()) {
      const ColumnAnnotation& prev = columns.back();
      if (prev.chromosome != col.chromosome) {
        if (prev.chromosome) closed_chroms.emplace(*prev.chromosome, column_line.back());
        if (col.chromosome && closed_chroms.count(*col.chromosome) != 0) {
          throw InputError("chromosome '" + *col.chromosome +
                               "' is not contiguous (block ended on line " +
                               std::to_string(closed_chroms.at(*col.chromosome)) + ")",
                           lineno);
        }
      } else if (prev.position_bp && col.position_bp && *col.position_bp <= *prev.position_bp) {
        throw InputError("unsorted positions: " + std::to_string(*col.position_bp) + " does not follow " +
                             std::to_string(*prev.position_bp) + " on chromosome '" +
                             col.chromosome.value_or(kMissing) + "'",
                         lineno);
      }
    }

    for (std::size_t k = 0; k < samples.size(); ++k) {
      const std::string_view cell = fields[k + 3];
      double v = 0.0;
      if (cell == kNaToken) {
        if (policy == NaPolicy::reject) {
          throw InputError("NA value for sample '" + samples[k] + "' at marker '" + col.marker_id +
                               "' (NA policy is reject)",
                           lineno);
        }
        missing.push_back(1);
      } else if (parse_real(cell, v)) {
        missing.push_back(0);
      } else {
        throw InputError("non-numeric value '" + std::string(cell) + "' for sample '" + samples[k] +
                             "' at marker '" + col.marker_id + "'",
                         lineno);
      }
      by_marker.push_back(v);
    }
    columns.push_back(std::move(col));
    column_line.push_back(lineno);
  }
  if (in.bad()) throw InputError("read error");
  if (!have_header) throw InputError("empty marker table");

  const std::size_t n = samples.size();
  const std::size_t m = columns.size();
  if (m < 2) throw InputError("marker table needs at least two markers, found " + std::to_string(m));

  std::vector<double> values(n * m);
  InputProvenance prov;
  prov.na_policy = to_string(policy);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> observed;
    for (std::size_t j = 0; j < m; ++j) {
      values[i * m + j] = by_marker[j * n + i];
      if (missing[j * n + i] == 0) observed.push_back(by_marker[j * n + i]);
    }
    if (observed.size() == m) continue;
    if (observed.empty()) throw InputError("sample '" + samples[i] + "' has no observed values");
    const double med = quantile(std::move(observed), 0.5);
    for (std::size_t j = 0; j < m; ++j) {
      if (missing[j * n + i] != 0) {
        values[i * m + j] = med;
        ++prov.imputed_cells;
      }
    }
  }
  return {MarkerMatrix(n, m, std::move(values), std::move(samples), std::move(columns)),
          std::move(prov)};
}

LoadedMatrix load_matrix(const std::filesystem::path& path, NaPolicy policy) {
  std::unique_ptr<gzFile_s, decltype(&gzclose)> gz(gzopen(path.c_str(), "rb"), &gzclose);
  if (!gz || std::filesystem::is_directory(path)) {
    throw InputError("cannot open marker table '" + path.string() + "'");
  }
  std::string text;
  std::array<char, 1 << 16> buf{};
  while (true) {
    const int got = gzread(gz.get(), buf.data(), static_cast<unsigned>(buf.size()));
    if (got < 0) throw InputError("cannot decompress '" + path.string() + "'");
    if (got == 0) break;
    text.append(buf.data(), static_cast<std::size_t>(got));
  }
  std::istringstream in(text);
  LoadedMatrix loaded = parse_matrix(in, policy);
  loaded.provenance.path = path.string();
  loaded.provenance.sha256 = file_sha256(path);
  return loaded;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw DomainError("cannot format value");
  return std::string(buf.data(), ptr);
}

void write_matrix(const MarkerMatrix& x, std::ostream& out) {
  out << "marker_id\tchrom\tpos";
  for (const auto& id : x.row_ids()) out << '\t' << id;
  out << '\n';
  for (std::size_t j = 0; j < x.cols(); ++j) {
    const auto& c = x.columns()[j];
    out << c.marker_id << '\t' << c.chromosome.value_or(kMissing) << '\t'
        << (c.position_bp ? std::to_string(*c.position_bp) : std::string(kMissing));
    for (std::size_t i = 0; i < x.rows(); ++i) out << '\t' << format_double(x(i, j));
    out << '\n';
  }
}

void write_matrix(const MarkerMatrix& x, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  write_matrix(x, out);
  if (!out) throw InputError("write to '" + path.string() + "' failed");
}

std::string file_sha256(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 initialisation failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out.push_back(hex[md[k] >> 4]);
    out.push_back(hex[md[k] & 0xf]);
  }
  return out;
}

MarkerMatrix paired_difference(const MarkerMatrix& tumor, const MarkerMatrix& normal) {
  if (tumor.rows() != normal.rows() || tumor.cols() != normal.cols()) {
    throw DimensionError("tumor is " + std::to_string(tumor.rows()) + "x" +
                         std::to_string(tumor.cols()) + " but normal is " +
                         std::to_string(normal.rows()) + "x" + std::to_string(normal.cols()));
  }
  for (std::size_t j = 0; j < tumor.cols(); ++j) {
    if (tumor.columns()[j] != normal.columns()[j]) {
      throw InputError("marker annotation mismatch at column " + std::to_string(j + 1) +
                       ": tumor '" + tumor.columns()[j].marker_id + "' vs normal '" +
                       normal.columns()[j].marker_id + "'");
    }
  }
  std::vector<double> diff(tumor.values().size());
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = tumor.values()[k] - normal.values()[k];
  return tumor.with_values(std::move(diff));
}

ZscoreResult zscore_transform(const MarkerMatrix& pvalues, double floor) {
  if (!std::isfinite(floor)) throw DomainError("z-score floor must be finite");
  constexpr double kBelowOne = 1.0 - 0x1p-53;
  std::uint64_t clamped = 0;
  std::vector<double> z(pvalues.values().size());
  for (std::size_t k = 0; k < z.size(); ++k) {
    double p = pvalues.values()[k];
    if (!(p > 0.0 && p <= 1.0)) {
      throw DomainError("p-value " + format_double(p) + " at sample '" +
                        pvalues.row_ids()[k / pvalues.cols()] + "', marker '" +
                        pvalues.columns()[k % pvalues.cols()].marker_id + "' is outside (0, 1]");
    }
    if (p == 1.0) {
      p = kBelowOne;
      ++clamped;
    }
    z[k] = std::max(-inv_norm_cdf(p), floor) + 0.0;  // no negative zero in output
  }
  return {pvalues.with_values(std::move(z)), clamped};
}

void write_column_stats(const MarkerMatrix& x, std::span<const double> stats, std::ostream& out) {
  if (stats.size() != x.cols()) {
    throw DimensionError("column statistics have " + std::to_string(stats.size()) +
                         " entries for " + std::to_string(x.cols()) + " markers");
  }
  out << "marker_id,chrom,pos,stat\n";
  for (std::size_t j = 0; j < x.cols(); ++j) {
    const auto& c = x.columns()[j];
    out << c.marker_id << ',' << c.chromosome.value_or("") << ','
        << (c.position_bp ? std::to_string(*c.position_bp) : std::string()) << ','
        << format_double(stats[j]) << '\n';
  }
}

void write_column_stats(const MarkerMatrix& x, std::span<const double> stats,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  write_column_stats(x, stats, out);
}

std::vector<ColumnStatRow> read_column_stats(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<ColumnStatRow> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != "marker_id,chrom,pos,stat") throw InputError("bad column statistics header", 1);
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 4) throw InputError("expected 4 fields", lineno);
    ColumnStatRow r;
    r.column.marker_id = f[0];
    if (!f[1].empty()) r.column.chromosome = f[1];
    if (!f[2].empty()) {
      std::uint64_t pos = 0;
      if (!parse_position(f[2], pos)) throw InputError("bad position '" + f[2] + "'", lineno);
      r.column.position_bp = pos;
    }
    if (!parse_real(f[3], r.stat)) throw InputError("bad statistic '" + f[3] + "'", lineno);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace cyclic
