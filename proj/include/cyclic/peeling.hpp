#pragma once

// Peeling: remove the contribution of a discovered peak so the test can be
// repeated to look for further aberrant markers.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cyclic/matrix.hpp"
#include "cyclic/perm_engine.hpp"

namespace cyclic {

struct PeelConfig {
  double alpha = 0.05;
  std::size_t max_iterations = 5;
  double baseline_quantile = 0.5;

  void validate() const;

  bool operator==(const PeelConfig&) const = default;
};

struct PeelOutcome {
  MarkerMatrix matrix;
  std::size_t left;   // inclusive column range that was modified
  std::size_t right;
  double baseline;
  bool degenerate;    // no column beyond the baseline at the peak; matrix unchanged
};

/// A peeling procedure. Implementations must leave every column outside
/// [left, right] bit-identical.
class PeelRule {
 public:
  virtual ~PeelRule() = default;
  virtual std::string name() const = 0;
  virtual PeelOutcome peel(const MarkerMatrix& x, std::size_t peak_index, Direction direction,
                           double baseline_quantile) const = 0;
};

/// Default rule, working on column sums s_j:
///  1. b = q-quantile of {s_j} (linear interpolation between order statistics).
///  2. Region = maximal run of columns around the peak, on the peak's
///     chromosome, with s_j > b (s_j < b for losses).
///  3. With c_i = (x_{i,peak} - b/n) / (s_peak - b) and e_j = s_j - b,
///     subtract c_i * e_j from x_ij inside the region. The c_i sum to 1, so
///     each region column sum drops to exactly b and the peak column becomes
///     b/n in every row.
class ExcessRedistributionPeel final : public PeelRule {
 public:
  std::string name() const override { return "excess-redistribution"; }
  PeelOutcome peel(const MarkerMatrix& x, std::size_t peak_index, Direction direction,
                   double baseline_quantile) const override;
};

/// Quantile of `values` (type 7: linear interpolation, q in [0, 1]).
double quantile(std::vector<double> values, double q);

PeelOutcome peel_once(const MarkerMatrix& x, std::size_t peak_index, Direction direction,
                      double baseline_quantile = 0.5);

struct PeelFinding {
  std::size_t iteration;  // 1-based
  std::uint64_t seed;
  std::size_t peak_index;
  ColumnAnnotation peak;
  double t0;
  double p_value;
  std::uint64_t exceed_count;
  std::size_t region_left;
  std::size_t region_right;
  bool peeled;

  bool operator==(const PeelFinding&) const = default;
};

struct PeelReport {
  std::string rule;
  std::vector<PeelFinding> findings;

  bool operator==(const PeelReport&) const = default;
};

/// Seed used by 0-based iteration `it` of iterative_detection.
inline std::uint64_t peel_iteration_seed(std::uint64_t seed, std::size_t it) noexcept {
  return seed ^ static_cast<std::uint64_t>(it);
}

/// test -> record -> (if p <= alpha and iterations remain) peel -> repeat.
PeelReport iterative_detection(const MarkerMatrix& x, const TestConfig& test_cfg,
                               const PeelConfig& peel_cfg);
PeelReport iterative_detection(const MarkerMatrix& x, const TestConfig& test_cfg,
                               const PeelConfig& peel_cfg, const PeelRule& rule);

}  // namespace cyclic
