#pragma once

// The cyclic conditional distribution Q_X (uniform over the m^n shift
// vectors) and the likelihood-weighted distribution P_X^o of the global
// statistic, computed exactly by enumeration or by Monte Carlo, plus the
// combinatorial diagnostics (minimal period, fullness) that relate P_X^o and
// Q_X^o to their set-conditional counterparts.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cyclic/matrix.hpp"
#include "cyclic/null_models.hpp"
#include "cyclic/perm_engine.hpp"

namespace cyclic {

/// Finite distribution of a statistic: strictly increasing support,
/// non-negative probabilities summing to 1.
struct StatDistribution {
  std::vector<double> support;
  std::vector<double> probabilities;

  /// Collapses equal values and normalizes by the total weight. Weights are
  /// accumulated in ascending value order, ties in input order.
  static StatDistribution from_weighted(std::span<const double> values,
                                        std::span<const double> weights);
  static StatDistribution uniform(std::span<const double> values);

  /// P(T <= t).
  double cdf(double t) const;
  /// P(T >= t).
  double upper_tail(double t) const;
};

struct ComparisonMeta {
  std::size_t n = 0;
  std::size_t m = 0;
  std::string spec;
  std::uint64_t seed = 0;
  std::size_t replicate = 0;
  std::string method;            // "exact" or "monte-carlo"
  std::uint64_t num_samples = 0; // Monte Carlo only
  bool full = false;             // all m^n shifts of X distinct

  bool operator==(const ComparisonMeta&) const = default;
};

/// cdf_p / cdf_q on a common grid; sup_distance = max |cdf_p - cdf_q|.
struct DistributionComparison {
  ComparisonMeta meta;
  std::vector<double> grid;
  std::vector<double> cdf_p;
  std::vector<double> cdf_q;
  double sup_distance = 0.0;

  bool operator==(const DistributionComparison&) const = default;
};

/// Evaluates both right-continuous CDFs on the merged support.
DistributionComparison compare_distributions(const StatDistribution& p, const StatDistribution& q,
                                             ComparisonMeta meta = {});

/// Least k >= 1 with sigma_k(row) = row. Always divides the row length.
std::size_t minimal_period(std::span<const double> row);

struct Fullness {
  bool full;
  std::vector<std::size_t> periods;
};

/// S_m(X) is full iff every row has minimal period m.
Fullness is_full(const MarkerMatrix& x);

struct BlockWitness {
  std::size_t first;
  std::size_t second;
  std::size_t length;

  bool operator==(const BlockWitness&) const = default;
};

/// Two disjoint equal blocks [first, first+length), [second, second+length)
/// with length >= m/3, present exactly when the row has a proper period.
std::optional<BlockWitness> repeated_block_witness(std::span<const double> row);

/// Normalized weights p_m(sigma_s(row)) / sum_t p_m(sigma_t(row)), computed
/// in log space. Throws DomainError when every shift has zero likelihood.
std::vector<double> row_shift_weights(std::span<const double> row, const NullModel& model);

/// Q_X^o by enumerating all m^n shift vectors. Throws BudgetError.
StatDistribution exact_cyclic_dist(const MarkerMatrix& x, const LocalStatistic& local,
                                   GlobalStatistic global,
                                   std::uint64_t budget = kDefaultEnumerationBudget,
                                   int threads = 0);

/// P_X^o: the same enumeration weighted by prod_i row_shift_weights_i(r_i).
StatDistribution exact_conditional_dist(const MarkerMatrix& x, const NullModel& model,
                                        const LocalStatistic& local, GlobalStatistic global,
                                        std::uint64_t budget = kDefaultEnumerationBudget,
                                        int threads = 0);

/// Both exact distributions from one enumeration pass.
DistributionComparison exact_comparison(const MarkerMatrix& x, const NullModel& model,
                                        const LocalStatistic& local, GlobalStatistic global,
                                        std::uint64_t budget = kDefaultEnumerationBudget,
                                        int threads = 0);

/// Monte Carlo version for shift spaces too large to enumerate.
///
/// Q side: ECDF of T over `num_samples` uniform shift vectors. P side: the
/// same draws, self-normalized by the exact weight m^n eta(sigma_r(X))
/// averaged over the m constant shifts r + (k, ..., k). Averaging is exact
/// (T is invariant under constant shifts) and removes most of the weight
/// variance.
DistributionComparison monte_carlo_dists(const MarkerMatrix& x, const NullModel& model,
                                         const LocalStatistic& local, GlobalStatistic global,
                                         std::uint64_t num_samples, std::uint64_t seed,
                                         int threads = 0);

struct ExperimentConfig {
  std::size_t n = 4;
  std::vector<std::size_t> m_values{10, 50};
  std::size_t replicates = 20;
  std::uint64_t seed = 0;
  LocalStatistic local = LocalStatistic::sum();
  GlobalStatistic global = GlobalStatistic::max;
  std::uint64_t budget = kDefaultEnumerationBudget;
  std::uint64_t num_samples = 10'000;
  int threads = 0;
};

/// Seed of the matrix simulated for (m, replicate).
std::uint64_t replicate_seed(std::uint64_t seed, std::size_t m, std::size_t replicate) noexcept;

/// For every m and replicate: simulate X, compare P_X^o with Q_X^o exactly
/// when m^n fits the budget, by Monte Carlo otherwise. Output is ordered by
/// m, then replicate, and does not depend on the thread count.
std::vector<DistributionComparison> convergence_experiment(const NullModel& model,
                                                           const ExperimentConfig& cfg);

double median(std::vector<double> values);

}  // namespace cyclic
