#include "cyclic/peeling.hpp"

#include <algorithm>
#include <cmath>

#include "cyclic/error.hpp"

namespace cyclic {

void PeelConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (max_iterations < 1) throw DomainError("max_iterations must be at least 1");
  if (!(baseline_quantile >= 0.0 && baseline_quantile <= 1.0)) {
    throw DomainError("baseline quantile must lie in [0, 1]");
  }
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DimensionError("quantile of an empty vector");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

PeelOutcome ExcessRedistributionPeel::peel(const MarkerMatrix& x, std::size_t peak,
                                           Direction direction, double q) const {
  const std::size_t n = x.rows();
  const std::size_t m = x.cols();
  if (peak >= m) throw RangeError("peak index " + std::to_string(peak) + " out of range");

  const std::vector<double> sums = column_stats(x, LocalStatistic::sum());
  const double b = quantile(sums, q);
  const auto beyond = [&](std::size_t j) {
    return direction == Direction::gain ? sums[j] > b : sums[j] < b;
  };
  if (!beyond(peak)) return {x, peak, peak, b, true};

  const auto& cols = x.columns();
  const auto same_chrom = [&](std::size_t j) { return cols[j].chromosome == cols[peak].chromosome; };
  std::size_t left = peak;
  while (left > 0 && same_chrom(left - 1) && beyond(left - 1)) --left;
  std::size_t right = peak;
  while (right + 1 < m && same_chrom(right + 1) && beyond(right + 1)) ++right;

  const double peak_excess = sums[peak] - b;
  const double share_base = b / static_cast<double>(n);
  std::vector<double> values(x.values().begin(), x.values().end());
  for (std::size_t i = 0; i < n; ++i) {
    const double c = (x(i, peak) - share_base) / peak_excess;
    double* row = values.data() + i * m;
    for (std::size_t j = left; j <= right; ++j) row[j] -= c * (sums[j] - b);
  }
  return {x.with_values(std::move(values)), left, right, b, false};
}

PeelOutcome peel_once(const MarkerMatrix& x, std::size_t peak_index, Direction direction,
                      double baseline_quantile) {
  return ExcessRedistributionPeel{}.peel(x, peak_index, direction, baseline_quantile);
}

PeelReport iterative_detection(const MarkerMatrix& x, const TestConfig& test_cfg,
                               const PeelConfig& peel_cfg) {
  return iterative_detection(x, test_cfg, peel_cfg, ExcessRedistributionPeel{});
}

PeelReport iterative_detection(const MarkerMatrix& x, const TestConfig& test_cfg,
                               const PeelConfig& peel_cfg, const PeelRule& rule) {
  test_cfg.validate();
  peel_cfg.validate();
  PeelReport report{rule.name(), {}};
  MarkerMatrix current = x;
  for (std::size_t it = 0; it < peel_cfg.max_iterations; ++it) {
    TestConfig cfg = test_cfg;
    cfg.seed = peel_iteration_seed(test_cfg.seed, it);
    cfg.store_null = false;
    const TestResult r = cyclic_shift_test(current, cfg);
    PeelOutcome outcome =
        rule.peel(current, r.peak_index, test_cfg.direction, peel_cfg.baseline_quantile);

    const bool more = r.p_value <= peel_cfg.alpha && it + 1 < peel_cfg.max_iterations &&
                      !outcome.degenerate;
    report.findings.push_back({it + 1, cfg.seed, r.peak_index, r.peak, r.t0, r.p_value,
                               r.exceed_count, outcome.left, outcome.right, more});
    if (!more) break;
    current = std::move(outcome.matrix);
  }
  return report;
}

}  // namespace cyclic
