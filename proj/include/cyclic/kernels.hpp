#pragma once

// Hot loops of the resampling procedures.
//
// Each kernel comes as a pair: a plain serial loop kept as the reference
// and an OpenMP version that must agree with it bit for bit. Work item l
// depends only on l (its shift vector comes from a ShiftSource that is a
// pure function of the index), results are written to slot l, and all
// reductions happen afterwards in index order.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cyclic/matrix.hpp"

namespace cyclic::kernels {

/// Fills `out` (length n) with the shift vector of work item `index`.
/// Must be thread safe and deterministic.
using ShiftSource = std::function<void(std::uint64_t index, std::span<std::size_t> out)>;

/// 0 means "whatever OpenMP would use" (OMP_NUM_THREADS or core count).
int resolve_threads(int requested) noexcept;

/// Shift vectors drawn uniformly from (seed, index) streams.
ShiftSource random_shifts(std::uint64_t seed, std::size_t m);

/// Shift vector `index` in base-m digits, row 0 least significant.
ShiftSource enumerated_shifts(std::size_t m);

/// T(sigma_k(X)) without materialising sigma_k(X). One instance per thread.
class ShiftEvaluator {
 public:
  ShiftEvaluator(const MarkerMatrix& x, const LocalStatistic& s, GlobalStatistic g);

  GlobalValue operator()(std::span<const std::size_t> offsets);

  /// Column statistics from the last call.
  std::span<const double> stats() const noexcept { return stats_; }

 private:
  const MarkerMatrix* x_;
  const LocalStatistic* s_;
  GlobalStatistic g_;
  std::vector<double> stats_;
  std::vector<double> column_;
};

std::vector<double> evaluate_null_serial(const MarkerMatrix& x, const LocalStatistic& s,
                                         GlobalStatistic g, std::uint64_t count,
                                         const ShiftSource& source);

std::vector<double> evaluate_null_parallel(const MarkerMatrix& x, const LocalStatistic& s,
                                           GlobalStatistic g, std::uint64_t count,
                                           const ShiftSource& source, int threads);

/// mean over k in [0, m) of prod_i weights[i][(r_i + k) mod m].
///
/// `weights[i]` is row i's shift weight vector scaled to mean 1. Averaging
/// over constant shifts leaves the expectation of any constant-shift
/// invariant statistic unchanged.
double constant_shift_average(std::span<const std::vector<double>> weights,
                              std::span<const std::size_t> offsets, std::span<double> scratch);

std::vector<double> averaged_weights_serial(std::span<const std::vector<double>> weights,
                                            std::uint64_t count, const ShiftSource& source);

std::vector<double> averaged_weights_parallel(std::span<const std::vector<double>> weights,
                                              std::uint64_t count, const ShiftSource& source,
                                              int threads);

}  // namespace cyclic::kernels
