#include "cyclic/exact_resampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cyclic/error.hpp"
#include "cyclic/kernels.hpp"
#include "cyclic/rng.hpp"

namespace cyclic {

StatDistribution StatDistribution::from_weighted(std::span<const double> values,
                                                 std::span<const double> weights) {
  if (values.size() != weights.size()) throw DimensionError("values and weights differ in length");
  if (values.empty()) throw DimensionError("empty distribution");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  StatDistribution d;
  double total = 0.0;
  for (std::size_t idx : order) {
    if (!(weights[idx] >= 0.0)) throw DomainError("negative or NaN weight");
    if (d.support.empty() || values[idx] != d.support.back()) {
      d.support.push_back(values[idx]);
      d.probabilities.push_back(0.0);
    }
    d.probabilities.back() += weights[idx];
    total += weights[idx];
  }
  if (!(total > 0.0) || !std::isfinite(total)) throw DomainError("weights do not have a positive finite total");
  for (auto& p : d.probabilities) p /= total;
  return d;
}

StatDistribution StatDistribution::uniform(std::span<const double> values) {
  const std::vector<double> ones(values.size(), 1.0);
  return from_weighted(values, ones);
}

double StatDistribution::cdf(double t) const {
  double c = 0.0;
  for (std::size_t i = 0; i < support.size() && support[i] <= t; ++i) c += probabilities[i];
  return std::min(c, 1.0);
}

double StatDistribution::upper_tail(double t) const {
  double c = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] >= t) c += probabilities[i];
  }
  return std::min(c, 1.0);
}

DistributionComparison compare_distributions(const StatDistribution& p, const StatDistribution& q,
                                             ComparisonMeta meta) {
  DistributionComparison out;
  out.meta = std::move(meta);
  std::set_union(p.support.begin(), p.support.end(), q.support.begin(), q.support.end(),
                 std::back_inserter(out.grid));
  out.cdf_p.reserve(out.grid.size());
  out.cdf_q.reserve(out.grid.size());
  std::size_t ip = 0;
  std::size_t iq = 0;
  double cp = 0.0;
  double cq = 0.0;
  for (double t : out.grid) {
    while (ip < p.support.size() && p.support[ip] <= t) cp += p.probabilities[ip++];
    while (iq < q.support.size() && q.support[iq] <= t) cq += q.probabilities[iq++];
    out.cdf_p.push_back(std::min(cp, 1.0));
    out.cdf_q.push_back(std::min(cq, 1.0));
    out.sup_distance = std::max(out.sup_distance, std::abs(out.cdf_p.back() - out.cdf_q.back()));
  }
  return out;
}

std::size_t minimal_period(std::span<const double> row) {
  const std::size_t m = row.size();
  if (m == 0) throw DimensionError("empty row");
  // Prefix function; the shortest border-free period is m - border(m).
  std::vector<std::size_t> border(m + 1, 0);
  for (std::size_t i = 1; i < m; ++i) {
    std::size_t k = border[i];
    while (k > 0 && row[i] != row[k]) k = border[k];
    if (row[i] == row[k]) ++k;
    border[i + 1] = k;
  }
  const std::size_t p = m - border[m];
  return m % p == 0 ? p : m;
}

Fullness is_full(const MarkerMatrix& x) {
  Fullness f{true, {}};
  f.periods.reserve(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    f.periods.push_back(minimal_period(x.row(i)));
    if (f.periods.back() != x.cols()) f.full = false;
  }
  return f;
}

std::optional<BlockWitness> repeated_block_witness(std::span<const double> row) {
  const std::size_t m = row.size();
  const std::size_t k = minimal_period(row);
  if (k == m) return std::nullopt;
  // The row is q >= 2 copies of a k-block; take floor(q/2) copies twice.
  const std::size_t length = k * ((m / k) / 2);
  return BlockWitness{0, length, length};
}

std::vector<double> row_shift_weights(std::span<const double> row, const NullModel& model) {
  std::vector<double> w = shift_log_likelihoods(row, model);
  const double top = *std::max_element(w.begin(), w.end());
  if (std::isinf(top)) throw DomainError("every cyclic shift of the row has zero likelihood");
  double total = 0.0;
  for (auto& v : w) {
    v = std::exp(v - top);
    total += v;
  }
  for (auto& v : w) v /= total;
  return w;
}

namespace {

std::uint64_t enumeration_size(const MarkerMatrix& x, std::uint64_t budget) {
  const auto total = shift_space_size(x.rows(), x.cols(), budget);
  if (!total) {
    throw BudgetError("enumeration of " + std::to_string(x.cols()) + "^" +
                          std::to_string(x.rows()) + " shift vectors exceeds the budget of " +
                          std::to_string(budget),
                      budget);
  }
  return *total;
}

std::vector<std::vector<double>> all_row_weights(const MarkerMatrix& x, const NullModel& model) {
  std::vector<std::vector<double>> w;
  w.reserve(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) w.push_back(row_shift_weights(x.row(i), model));
  return w;
}

std::vector<double> enumerated_weights(const std::vector<std::vector<double>>& row_weights,
                                       std::uint64_t total, std::size_t m) {
  const auto source = kernels::enumerated_shifts(m);
  std::vector<double> out(total);
  std::vector<std::size_t> offsets(row_weights.size());
  for (std::uint64_t l = 0; l < total; ++l) {
    source(l, offsets);
    double w = 1.0;
    for (std::size_t i = 0; i < offsets.size(); ++i) w *= row_weights[i][offsets[i]];
    out[l] = w;
  }
  return out;
}

}  // namespace

StatDistribution exact_cyclic_dist(const MarkerMatrix& x, const LocalStatistic& local,
                                   GlobalStatistic global, std::uint64_t budget, int threads) {
  const std::uint64_t total = enumeration_size(x, budget);
  const auto values = kernels::evaluate_null_parallel(x, local, global, total,
                                                      kernels::enumerated_shifts(x.cols()), threads);
  return StatDistribution::uniform(values);
}

StatDistribution exact_conditional_dist(const MarkerMatrix& x, const NullModel& model,
                                        const LocalStatistic& local, GlobalStatistic global,
                                        std::uint64_t budget, int threads) {
  const std::uint64_t total = enumeration_size(x, budget);
  const auto row_weights = all_row_weights(x, model);
  const auto values = kernels::evaluate_null_parallel(x, local, global, total,
                                                      kernels::enumerated_shifts(x.cols()), threads);
  return StatDistribution::from_weighted(values, enumerated_weights(row_weights, total, x.cols()));
}

DistributionComparison exact_comparison(const MarkerMatrix& x, const NullModel& model,
                                        const LocalStatistic& local, GlobalStatistic global,
                                        std::uint64_t budget, int threads) {
  const std::uint64_t total = enumeration_size(x, budget);
  const auto row_weights = all_row_weights(x, model);
  const auto values = kernels::evaluate_null_parallel(x, local, global, total,
                                                      kernels::enumerated_shifts(x.cols()), threads);
  ComparisonMeta meta;
  meta.n = x.rows();
  meta.m = x.cols();
  meta.spec = model_name(model);
  meta.method = "exact";
  meta.full = is_full(x).full;
  return compare_distributions(
      StatDistribution::from_weighted(values, enumerated_weights(row_weights, total, x.cols())),
      StatDistribution::uniform(values), std::move(meta));
}

DistributionComparison monte_carlo_dists(const MarkerMatrix& x, const NullModel& model,
                                         const LocalStatistic& local, GlobalStatistic global,
                                         std::uint64_t num_samples, std::uint64_t seed,
                                         int threads) {
  if (num_samples < 1) throw DomainError("Monte Carlo needs at least one sample");
  const std::size_t m = x.cols();
  auto row_weights = all_row_weights(x, model);
  for (auto& w : row_weights) {
    for (auto& v : w) v *= static_cast<double>(m);
  }
  const auto source = kernels::random_shifts(seed, m);
  const auto values = kernels::evaluate_null_parallel(x, local, global, num_samples, source, threads);
  const auto weights = kernels::averaged_weights_parallel(row_weights, num_samples, source, threads);

  ComparisonMeta meta;
  meta.n = x.rows();
  meta.m = m;
  meta.spec = model_name(model);
  meta.seed = seed;
  meta.method = "monte-carlo";
  meta.num_samples = num_samples;
  meta.full = is_full(x).full;
  return compare_distributions(StatDistribution::from_weighted(values, weights),
                               StatDistribution::uniform(values), std::move(meta));
}

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t m, std::size_t replicate) noexcept {
  return derive_seed(derive_seed(seed, m), replicate);
}

std::vector<DistributionComparison> convergence_experiment(const NullModel& model,
                                                           const ExperimentConfig& cfg) {
  if (cfg.n < 1 || cfg.m_values.empty() || cfg.replicates < 1) {
    throw DomainError("experiment needs n >= 1, at least one m and one replicate");
  }
  const std::size_t jobs = cfg.m_values.size() * cfg.replicates;
  std::vector<std::optional<DistributionComparison>> out(jobs);
  const auto total = static_cast<std::int64_t>(jobs);
#pragma omp parallel for schedule(dynamic, 1) num_threads(kernels::resolve_threads(cfg.threads))
  for (std::int64_t job = 0; job < total; ++job) {
    const std::size_t m = cfg.m_values[static_cast<std::size_t>(job) / cfg.replicates];
    const std::size_t rep = static_cast<std::size_t>(job) % cfg.replicates;
    const std::uint64_t seed = replicate_seed(cfg.seed, m, rep);
    const MarkerMatrix x = simulate(model, cfg.n, m, seed);
    DistributionComparison c =
        shift_space_size(cfg.n, m, cfg.budget)
            ? exact_comparison(x, model, cfg.local, cfg.global, cfg.budget, 1)
            : monte_carlo_dists(x, model, cfg.local, cfg.global, cfg.num_samples,
                                derive_seed(seed, 1), 1);
    c.meta.seed = seed;
    c.meta.replicate = rep;
    out[static_cast<std::size_t>(job)] = std::move(c);
  }
  std::vector<DistributionComparison> result;
  result.reserve(jobs);
  for (auto& c : out) result.push_back(std::move(*c));
  return result;
}

double median(std::vector<double> values) {
  if (values.empty()) throw DimensionError("median of an empty vector");
  std::sort(values.begin(), values.end());
  const std::size_t h = values.size() / 2;
  return values.size() % 2 == 1 ? values[h] : 0.5 * (values[h - 1] + values[h]);
}

}  // namespace cyclic
