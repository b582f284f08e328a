#include "cyclic/perm_engine.hpp"

#include <omp.h>

#include <algorithm>
#include <string>

#include "cyclic/error.hpp"
#include "cyclic/kernels.hpp"
#include "cyclic/rng.hpp"

namespace cyclic {

std::string to_string(Direction d) { return d == Direction::gain ? "gain" : "loss"; }

Direction parse_direction(const std::string& s) {
  if (s == "gain") return Direction::gain;
  if (s == "loss") return Direction::loss;
  throw DomainError("direction must be 'gain' or 'loss', got '" + s + "'");
}

std::string to_string(NullScheme s) {
  return s == NullScheme::cyclic_shift ? "cyclic-shift" : "row-permutation";
}

NullScheme parse_null_scheme(const std::string& s) {
  if (s == "cyclic-shift" || s == "cyclic") return NullScheme::cyclic_shift;
  if (s == "row-permutation") return NullScheme::row_permutation;
  throw DomainError("null scheme must be 'cyclic-shift' or 'row-permutation', got '" + s + "'");
}

void TestConfig::validate() const {
  if (num_shifts < 1) throw DomainError("number of shifts must be at least 1");
  if (threads < 0) throw DomainError("thread count cannot be negative");
}

ShiftVector random_shift_vector(std::uint64_t seed, std::uint64_t iteration, std::size_t n,
                                std::size_t m) {
  if (m < 1) throw RangeError("shift modulus must be positive");
  std::vector<std::size_t> offsets(n);
  kernels::random_shifts(seed, m)(iteration, offsets);
  return ShiftVector(std::move(offsets), m);
}

namespace {

std::vector<double> row_permutation_null(const MarkerMatrix& x, const TestConfig& cfg) {
  const std::size_t n = x.rows();
  const std::size_t m = x.cols();
  const GlobalStatistic g = global_for(cfg.direction);
  std::vector<double> out(cfg.num_shifts);
  const auto total = static_cast<std::int64_t>(cfg.num_shifts);
#pragma omp parallel num_threads(kernels::resolve_threads(cfg.threads))
  {
    std::vector<double> values(n * m);
    std::vector<double> col(n);
    std::vector<double> stats(m);
#pragma omp for schedule(static)
    for (std::int64_t l = 0; l < total; ++l) {
      CounterStream stream(cfg.seed, StreamDomain::permute, static_cast<std::uint64_t>(l));
      std::copy(x.values().begin(), x.values().end(), values.begin());
      for (std::size_t i = 0; i < n; ++i) {
        double* row = values.data() + i * m;
        for (std::size_t j = m - 1; j > 0; --j) {
          std::swap(row[j], row[stream.uniform_below(j + 1)]);
        }
      }
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = values[i * m + j];
        stats[j] = cfg.local(col);
      }
      out[static_cast<std::size_t>(l)] = global_stat(stats, g).value;
    }
  }
  return out;
}

}  // namespace

TestResult cyclic_shift_test(const MarkerMatrix& x, const TestConfig& cfg) {
  cfg.validate();
  const GlobalStatistic g = global_for(cfg.direction);
  const GlobalValue observed = evaluate(x, cfg.local, g);

  std::vector<double> null_values =
      cfg.scheme == NullScheme::cyclic_shift
          ? kernels::evaluate_null_parallel(x, cfg.local, g, cfg.num_shifts,
                                            kernels::random_shifts(cfg.seed, x.cols()),
                                            cfg.threads)
          : row_permutation_null(x, cfg);

  std::uint64_t exceed = 0;
  for (double v : null_values) {
    if (at_least_as_extreme(v, observed.value, cfg.direction)) ++exceed;
  }
  const double n_draws = static_cast<double>(cfg.num_shifts);

  TestResult r;
  r.t0 = observed.value;
  r.exceed_count = exceed;
  r.num_shifts = cfg.num_shifts;
  r.p_value = std::max(static_cast<double>(exceed) / n_draws, 1.0 / n_draws);
  r.seed = cfg.seed;
  r.direction = cfg.direction;
  r.local_stat = cfg.local.name();
  r.scheme = cfg.scheme;
  r.peak_index = observed.peak_index;
  r.peak = x.columns()[observed.peak_index];
  if (cfg.store_null) r.null_values = std::move(null_values);
  return r;
}

std::optional<std::uint64_t> shift_space_size(std::size_t n, std::size_t m, std::uint64_t cap) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (m != 0 && total > cap / m) return std::nullopt;
    total *= m;
  }
  if (total > cap) return std::nullopt;
  return total;
}

ExhaustiveResult exhaustive_test(const MarkerMatrix& x, Direction direction,
                                 const LocalStatistic& local, std::uint64_t budget, int threads) {
  const auto total = shift_space_size(x.rows(), x.cols(), budget);
  if (!total) {
    throw BudgetError("enumeration of " + std::to_string(x.cols()) + "^" +
                          std::to_string(x.rows()) + " shift vectors exceeds the budget of " +
                          std::to_string(budget),
                      budget);
  }
  const GlobalStatistic g = global_for(direction);
  const GlobalValue observed = evaluate(x, local, g);
  const auto values = kernels::evaluate_null_parallel(x, local, g, *total,
                                                      kernels::enumerated_shifts(x.cols()), threads);
  std::uint64_t exceed = 0;
  for (double v : values) {
    if (at_least_as_extreme(v, observed.value, direction)) ++exceed;
  }
  return {observed.value, observed.peak_index, exceed, *total,
          static_cast<double>(exceed) / static_cast<double>(*total)};
}

TestResult exhaustive_result(const MarkerMatrix& x, Direction direction,
                             const LocalStatistic& local, std::uint64_t budget, int threads) {
  const ExhaustiveResult e = exhaustive_test(x, direction, local, budget, threads);
  TestResult r;
  r.t0 = e.t0;
  r.p_value = e.probability;
  r.exceed_count = e.exceed_count;
  r.num_shifts = e.total;
  r.direction = direction;
  r.local_stat = local.name();
  r.exhaustive = true;
  r.peak_index = e.peak_index;
  r.peak = x.columns()[e.peak_index];
  return r;
}

}  // namespace cyclic
