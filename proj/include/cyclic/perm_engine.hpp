#pragma once

// The cyclic shift test: draw N independent shift vectors, evaluate the
// global statistic on each shifted matrix, and report the percentile
// p-value max(#{T_l >= t0} / N, 1/N).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cyclic/matrix.hpp"

namespace cyclic {

/// gain looks for the maximum column statistic, loss for the minimum.
enum class Direction { gain, loss };

inline GlobalStatistic global_for(Direction d) noexcept {
  return d == Direction::gain ? GlobalStatistic::max : GlobalStatistic::min;
}

std::string to_string(Direction d);
Direction parse_direction(const std::string& s);

/// How null matrices are generated. row_permutation (independent shuffles
/// of each row) exists only as a comparison baseline.
enum class NullScheme { cyclic_shift, row_permutation };

std::string to_string(NullScheme s);
NullScheme parse_null_scheme(const std::string& s);

inline constexpr std::uint64_t kDefaultEnumerationBudget = 1'000'000;

struct TestConfig {
  std::size_t num_shifts = 10'000;
  std::uint64_t seed = 0;
  Direction direction = Direction::gain;
  LocalStatistic local = LocalStatistic::sum();
  bool store_null = false;
  NullScheme scheme = NullScheme::cyclic_shift;
  int threads = 0;

  void validate() const;
};

struct TestResult {
  double t0 = 0.0;
  double p_value = 1.0;
  std::uint64_t exceed_count = 0;
  std::uint64_t num_shifts = 0;
  std::uint64_t seed = 0;
  Direction direction = Direction::gain;
  std::string local_stat = "sum";
  NullScheme scheme = NullScheme::cyclic_shift;
  bool exhaustive = false;
  std::size_t peak_index = 0;
  ColumnAnnotation peak;
  std::optional<std::vector<double>> null_values;

  bool operator==(const TestResult&) const = default;
};

/// Shift vector number `iteration` of the stream keyed by `seed`.
ShiftVector random_shift_vector(std::uint64_t seed, std::uint64_t iteration, std::size_t n,
                                std::size_t m);

/// True when `value` counts as at least as extreme as `t0`.
inline bool at_least_as_extreme(double value, double t0, Direction d) noexcept {
  return d == Direction::gain ? value >= t0 : value <= t0;
}

TestResult cyclic_shift_test(const MarkerMatrix& x, const TestConfig& cfg);

struct ExhaustiveResult {
  double t0;
  std::size_t peak_index;
  std::uint64_t exceed_count;
  std::uint64_t total;  // m^n
  double probability;   // exceed_count / total
};

/// m^n, or nullopt when it exceeds `cap`.
std::optional<std::uint64_t> shift_space_size(std::size_t n, std::size_t m, std::uint64_t cap);

/// Exact Q_X(T >= t0) (<= for losses) by enumerating all m^n shift vectors.
/// Throws BudgetError when m^n exceeds `budget`.
ExhaustiveResult exhaustive_test(const MarkerMatrix& x, Direction direction,
                                 const LocalStatistic& local,
                                 std::uint64_t budget = kDefaultEnumerationBudget,
                                 int threads = 0);

/// exhaustive_test packaged as a TestResult (N = m^n, p = exact value).
TestResult exhaustive_result(const MarkerMatrix& x, Direction direction,
                             const LocalStatistic& local,
                             std::uint64_t budget = kDefaultEnumerationBudget, int threads = 0);

}  // namespace cyclic
