#include "cyclic/kernels.hpp"

#include <omp.h>

#include <algorithm>

#include "cyclic/error.hpp"
#include "cyclic/rng.hpp"

namespace cyclic::kernels {

int resolve_threads(int requested) noexcept {
  return requested > 0 ? requested : omp_get_max_threads();
}

ShiftSource random_shifts(std::uint64_t seed, std::size_t m) {
  return [seed, m](std::uint64_t index, std::span<std::size_t> out) {
    CounterStream stream(seed, StreamDomain::shift, index);
    for (auto& k : out) k = static_cast<std::size_t>(stream.uniform_below(m));
  };
}

ShiftSource enumerated_shifts(std::size_t m) {
  return [m](std::uint64_t index, std::span<std::size_t> out) {
    for (auto& k : out) {
      k = static_cast<std::size_t>(index % m);
      index /= m;
    }
  };
}

ShiftEvaluator::ShiftEvaluator(const MarkerMatrix& x, const LocalStatistic& s, GlobalStatistic g)
    : x_(&x), s_(&s), g_(g), stats_(x.cols()), column_(x.rows()) {}

GlobalValue ShiftEvaluator::operator()(std::span<const std::size_t> offsets) {
  const std::size_t n = x_->rows();
  const std::size_t m = x_->cols();
  if (s_->is_additive()) {
    std::fill(stats_.begin(), stats_.end(), 0.0);
    double* acc = stats_.data();
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = x_->row(i).data();
      const std::size_t k = offsets[i];
      const std::size_t head = m - k;
      // acc[j] += row[j + k] for j < m - k, acc[j] += row[j + k - m] after.
      for (std::size_t j = 0; j < head; ++j) acc[j] += row[j + k];
      for (std::size_t j = head; j < m; ++j) acc[j] += row[j - head];
    }
    if (s_->kind() == LocalStatistic::Kind::column_mean) {
      const double dn = static_cast<double>(n);
      for (auto& v : stats_) v /= dn;
    }
  } else {
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t src = j + offsets[i];
        if (src >= m) src -= m;
        column_[i] = (*x_)(i, src);
      }
      stats_[j] = (*s_)(column_);
    }
  }
  return global_stat(stats_, g_);
}

std::vector<double> evaluate_null_serial(const MarkerMatrix& x, const LocalStatistic& s,
                                         GlobalStatistic g, std::uint64_t count,
                                         const ShiftSource& source) {
  std::vector<double> out(count);
  ShiftEvaluator eval(x, s, g);
  std::vector<std::size_t> offsets(x.rows());
  for (std::uint64_t l = 0; l < count; ++l) {
    source(l, offsets);
    out[l] = eval(offsets).value;
  }
  return out;
}

std::vector<double> evaluate_null_parallel(const MarkerMatrix& x, const LocalStatistic& s,
                                           GlobalStatistic g, std::uint64_t count,
                                           const ShiftSource& source, int threads) {
  std::vector<double> out(count);
  const auto total = static_cast<std::int64_t>(count);
#pragma omp parallel num_threads(resolve_threads(threads))
  {
    ShiftEvaluator eval(x, s, g);
    std::vector<std::size_t> offsets(x.rows());
#pragma omp for schedule(static)
    for (std::int64_t l = 0; l < total; ++l) {
      source(static_cast<std::uint64_t>(l), offsets);
      out[static_cast<std::size_t>(l)] = eval(offsets).value;
    }
  }
  return out;
}

double constant_shift_average(std::span<const std::vector<double>> weights,
                              std::span<const std::size_t> offsets, std::span<double> scratch) {
  const std::size_t m = scratch.size();
  std::fill(scratch.begin(), scratch.end(), 1.0);
  double* acc = scratch.data();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double* w = weights[i].data();
    const std::size_t k = offsets[i];
    const std::size_t head = m - k;
    for (std::size_t j = 0; j < head; ++j) acc[j] *= w[j + k];
    for (std::size_t j = head; j < m; ++j) acc[j] *= w[j - head];
  }
  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) total += acc[j];
  return total / static_cast<double>(m);
}

namespace {

std::size_t weight_length(std::span<const std::vector<double>> weights) {
  if (weights.empty()) throw DimensionError("no row weights");
  const std::size_t m = weights.front().size();
  for (const auto& w : weights) {
    if (w.size() != m) throw DimensionError("row weight vectors differ in length");
  }
  return m;
}

}  // namespace

std::vector<double> averaged_weights_serial(std::span<const std::vector<double>> weights,
                                            std::uint64_t count, const ShiftSource& source) {
  const std::size_t m = weight_length(weights);
  std::vector<double> out(count);
  std::vector<double> scratch(m);
  std::vector<std::size_t> offsets(weights.size());
  for (std::uint64_t l = 0; l < count; ++l) {
    source(l, offsets);
    out[l] = constant_shift_average(weights, offsets, scratch);
  }
  return out;
}

std::vector<double> averaged_weights_parallel(std::span<const std::vector<double>> weights,
                                              std::uint64_t count, const ShiftSource& source,
                                              int threads) {
  const std::size_t m = weight_length(weights);
  std::vector<double> out(count);
  const auto total = static_cast<std::int64_t>(count);
#pragma omp parallel num_threads(resolve_threads(threads))
  {
    std::vector<double> scratch(m);
    std::vector<std::size_t> offsets(weights.size());
#pragma omp for schedule(static)
    for (std::int64_t l = 0; l < total; ++l) {
      source(static_cast<std::uint64_t>(l), offsets);
      out[static_cast<std::size_t>(l)] = constant_shift_average(weights, offsets, scratch);
    }
  }
  return out;
}

}  // namespace cyclic::kernels
