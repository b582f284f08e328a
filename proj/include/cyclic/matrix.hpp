#pragma once

// Marker matrices, the cyclic-shift group action on their rows, and the
// local/global summary statistics computed from them.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cyclic {

struct ColumnAnnotation {
  std::string marker_id;
  std::optional<std::string> chromosome;
  std::optional<std::uint64_t> position_bp;

  bool operator==(const ColumnAnnotation&) const = default;
};

/// An n x m matrix of finite reals (samples as rows, markers as columns)
/// with per-row sample ids and per-column marker annotations.
///
/// Immutable after construction. Rows are stored contiguously so that a row
/// rotation is two memcpy-sized segments.
class MarkerMatrix {
 public:
  /// `values` is row-major, n*m entries. Empty `row_ids` / `columns` get
  /// generated ids ("s1".., "m1.."). Throws DimensionError, DomainError or
  /// InputError when an invariant is violated.
  MarkerMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
               std::vector<std::string> row_ids = {},
               std::vector<ColumnAnnotation> columns = {});

  static MarkerMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  std::span<const double> values() const noexcept { return values_; }
  std::vector<double> column(std::size_t j) const;

  const std::vector<std::string>& row_ids() const noexcept { return row_ids_; }
  const std::vector<ColumnAnnotation>& columns() const noexcept { return columns_; }

  /// Same shape and annotations, new entries.
  MarkerMatrix with_values(std::vector<double> values) const;

  /// Columns [first, last) with their annotations.
  MarkerMatrix column_range(std::size_t first, std::size_t last) const;

  bool operator==(const MarkerMatrix&) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
  std::vector<std::string> row_ids_;
  std::vector<ColumnAnnotation> columns_;
};

/// One cyclic offset per row, each in [0, m).
class ShiftVector {
 public:
  ShiftVector(std::vector<std::size_t> offsets, std::size_t modulus);

  static ShiftVector constant(std::size_t rows, std::size_t k, std::size_t modulus);

  std::size_t size() const noexcept { return offsets_.size(); }
  std::size_t modulus() const noexcept { return modulus_; }
  std::size_t operator[](std::size_t i) const { return offsets_[i]; }
  std::span<const std::size_t> offsets() const noexcept { return offsets_; }

  /// Per-row offsets that undo this shift.
  ShiftVector inverse() const;

  bool operator==(const ShiftVector&) const = default;

 private:
  std::vector<std::size_t> offsets_;
  std::size_t modulus_;
};

/// Per-column summary s_j = s(X_{.j}). Depends on the column values only.
class LocalStatistic {
 public:
  enum class Kind { column_sum, column_mean, custom };
  using Function = std::function<double(std::span<const double>)>;

  static LocalStatistic sum() { return LocalStatistic(Kind::column_sum, {}, "sum"); }
  static LocalStatistic mean() { return LocalStatistic(Kind::column_mean, {}, "mean"); }
  static LocalStatistic custom(Function fn, std::string name = "custom");

  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  double operator()(std::span<const double> column) const;

  /// Sum and mean can be evaluated from column sums alone.
  bool is_additive() const noexcept { return kind_ != Kind::custom; }

 private:
  LocalStatistic(Kind kind, Function fn, std::string name)
      : kind_(kind), fn_(std::move(fn)), name_(std::move(name)) {}

  Kind kind_;
  Function fn_;
  std::string name_;
};

enum class GlobalStatistic { max, min };

struct GlobalValue {
  double value;
  std::size_t peak_index;

  bool operator==(const GlobalValue&) const = default;
};

/// sigma_k: out[j] = x[(j + k) mod m]. Throws RangeError unless k < m.
std::vector<double> cyclic_shift_row(std::span<const double> x, std::size_t k);

/// Applies offset k[i] to row i. Throws DimensionError on length mismatch.
MarkerMatrix apply_shift(const MarkerMatrix& x, const ShiftVector& k);

std::vector<double> column_stats(const MarkerMatrix& x, const LocalStatistic& s);

/// Max (or min) of `stats` and the lowest index attaining it.
GlobalValue global_stat(std::span<const double> stats, GlobalStatistic g);

/// T(X) = g(s_1, ..., s_m).
inline GlobalValue evaluate(const MarkerMatrix& x, const LocalStatistic& s, GlobalStatistic g) {
  return global_stat(column_stats(x, s), g);
}

}  // namespace cyclic
