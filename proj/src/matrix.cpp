#include "cyclic/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>
#include <utility>

#include "cyclic/error.hpp"

namespace cyclic {

namespace {

void validate_columns(const std::vector<ColumnAnnotation>& columns) {
  std::unordered_set<std::string> ids;
  std::unordered_set<std::string> finished_chromosomes;
  const ColumnAnnotation* prev = nullptr;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const auto& c = columns[j];
    if (!ids.insert(c.marker_id).second) {
      throw InputError("duplicate marker_id '" + c.marker_id + "' at column " + std::to_string(j));
    }
    if (prev != nullptr && prev->chromosome && c.chromosome) {
      if (*prev->chromosome != *c.chromosome) {
        finished_chromosomes.insert(*prev->chromosome);
        if (finished_chromosomes.count(*c.chromosome) != 0) {
          throw InputError("chromosome '" + *c.chromosome + "' is not contiguous (marker '" +
                           c.marker_id + "')");
        }
      } else if (prev->position_bp && c.position_bp && *c.position_bp <= *prev->position_bp) {
        throw InputError("positions not strictly increasing on chromosome '" + *c.chromosome +
                         "' at marker '" + c.marker_id + "'");
      }
    }
    prev = &c;
  }
}

}  // namespace

MarkerMatrix::MarkerMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                           std::vector<std::string> row_ids,
                           std::vector<ColumnAnnotation> columns)
    : rows_(rows),
      cols_(cols),
      values_(std::move(values)),
      row_ids_(std::move(row_ids)),
      columns_(std::move(columns)) {
  if (rows_ < 1) throw DimensionError("marker matrix needs at least one row");
  if (cols_ < 2) throw DimensionError("marker matrix needs at least two columns");
  if (values_.size() != rows_ * cols_) {
    throw DimensionError("expected " + std::to_string(rows_ * cols_) + " values, got " +
                         std::to_string(values_.size()));
  }
  for (std::size_t idx = 0; idx < values_.size(); ++idx) {
    if (!std::isfinite(values_[idx])) {
      throw DomainError("non-finite entry at row " + std::to_string(idx / cols_) + ", column " +
                        std::to_string(idx % cols_));
    }
  }
  if (row_ids_.empty()) {
    row_ids_.reserve(rows_);
    for (std::size_t i = 0; i < rows_; ++i) row_ids_.push_back("s" + std::to_string(i + 1));
  } else if (row_ids_.size() != rows_) {
    throw DimensionError("row id count does not match row count");
  }
  if (columns_.empty()) {
    columns_.reserve(cols_);
    for (std::size_t j = 0; j < cols_; ++j) columns_.push_back({"m" + std::to_string(j + 1), {}, {}});
  } else if (columns_.size() != cols_) {
    throw DimensionError("column annotation count does not match column count");
  }
  validate_columns(columns_);
}

MarkerMatrix MarkerMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw DimensionError("marker matrix needs at least one row");
  const std::size_t m = rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * m);
  for (const auto& r : rows) {
    if (r.size() != m) throw DimensionError("ragged rows");
    values.insert(values.end(), r.begin(), r.end());
  }
  return MarkerMatrix(rows.size(), m, std::move(values));
}

std::vector<double> MarkerMatrix::column(std::size_t j) const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = values_[i * cols_ + j];
  return out;
}

MarkerMatrix MarkerMatrix::with_values(std::vector<double> values) const {
  return MarkerMatrix(rows_, cols_, std::move(values), row_ids_, columns_);
}

MarkerMatrix MarkerMatrix::column_range(std::size_t first, std::size_t last) const {
  if (first >= last || last > cols_) throw RangeError("bad column range");
  const std::size_t width = last - first;
  std::vector<double> values;
  values.reserve(rows_ * width);
  for (std::size_t i = 0; i < rows_; ++i) {
    auto r = row(i);
    values.insert(values.end(), r.begin() + static_cast<std::ptrdiff_t>(first),
                  r.begin() + static_cast<std::ptrdiff_t>(last));
  }
  std::vector<ColumnAnnotation> cols(columns_.begin() + static_cast<std::ptrdiff_t>(first),
                                     columns_.begin() + static_cast<std::ptrdiff_t>(last));
  return MarkerMatrix(rows_, width, std::move(values), row_ids_, std::move(cols));
}

ShiftVector::ShiftVector(std::vector<std::size_t> offsets, std::size_t modulus)
    : offsets_(std::move(offsets)), modulus_(modulus) {
  if (modulus_ == 0) throw RangeError("shift modulus must be positive");
  for (std::size_t i = 0; i < offsets_.size(); ++i) {
    if (offsets_[i] >= modulus_) {
      throw RangeError("offset " + std::to_string(offsets_[i]) + " for row " + std::to_string(i) +
                       " outside [0, " + std::to_string(modulus_ - 1) + "]");
    }
  }
}

ShiftVector ShiftVector::constant(std::size_t rows, std::size_t k, std::size_t modulus) {
  return ShiftVector(std::vector<std::size_t>(rows, k), modulus);
}

ShiftVector ShiftVector::inverse() const {
  std::vector<std::size_t> inv(offsets_.size());
  for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = (modulus_ - offsets_[i]) % modulus_;
  return ShiftVector(std::move(inv), modulus_);
}

LocalStatistic LocalStatistic::custom(Function fn, std::string name) {
  if (!fn) throw DomainError("custom local statistic needs a callable");
  return LocalStatistic(Kind::custom, std::move(fn), std::move(name));
}

double LocalStatistic::operator()(std::span<const double> column) const {
  switch (kind_) {
    case Kind::column_sum: {
      double s = 0.0;
      for (double v : column) s += v;
      return s;
    }
    case Kind::column_mean: {
      double s = 0.0;
      for (double v : column) s += v;
      return s / static_cast<double>(column.size());
    }
    case Kind::custom:
      return fn_(column);
  }
  return 0.0;
}

std::vector<double> cyclic_shift_row(std::span<const double> x, std::size_t k) {
  if (x.empty()) throw DimensionError("cannot shift an empty row");
  if (k >= x.size()) {
    throw RangeError("shift " + std::to_string(k) + " outside [0, " + std::to_string(x.size() - 1) +
                     "]");
  }
  std::vector<double> out(x.size());
  std::rotate_copy(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(k), x.end(), out.begin());
  return out;
}

MarkerMatrix apply_shift(const MarkerMatrix& x, const ShiftVector& k) {
  if (k.size() != x.rows()) {
    throw DimensionError("shift vector has " + std::to_string(k.size()) + " entries for " +
                         std::to_string(x.rows()) + " rows");
  }
  if (k.modulus() != x.cols()) throw DimensionError("shift modulus does not match column count");
  std::vector<double> values;
  values.reserve(x.rows() * x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto r = cyclic_shift_row(x.row(i), k[i]);
    values.insert(values.end(), r.begin(), r.end());
  }
  return x.with_values(std::move(values));
}

std::vector<double> column_stats(const MarkerMatrix& x, const LocalStatistic& s) {
  std::vector<double> out(x.cols());
  std::vector<double> col(x.rows());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    for (std::size_t i = 0; i < x.rows(); ++i) col[i] = x(i, j);
    out[j] = s(col);
  }
  return out;
}

GlobalValue global_stat(std::span<const double> stats, GlobalStatistic g) {
  if (stats.empty()) throw DimensionError("global statistic of an empty vector");
  std::size_t best = 0;
  for (std::size_t j = 1; j < stats.size(); ++j) {
    const bool better = g == GlobalStatistic::max ? stats[j] > stats[best] : stats[j] < stats[best];
    if (better) best = j;
  }
  return {stats[best], best};
}

}  // namespace cyclic
