#pragma once

// Stationary null models for marker rows: finite-state Markov chains and
// Gaussian AR(1) processes. Provides simulation, the row likelihood
// p_m(x) = p1(x_0) prod_j p(x_j | x_{j-1}), and the diagnostics rho_t and
// gamma_m that govern how far the likelihood-weighted shift distribution is
// from the uniform one.
//
// Pair orientation: p2(v, u) = P(X_{j-1} = v, X_j = u) = p1(v) p(u | v).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cyclic/matrix.hpp"

namespace cyclic {

/// Square row-stochastic matrix; (v, u) holds p(u | v).
class TransitionMatrix {
 public:
  /// Throws DomainError unless square, non-negative, rows summing to 1 within 1e-12.
  explicit TransitionMatrix(std::vector<std::vector<double>> rows);

  std::size_t size() const noexcept { return r_; }
  double operator()(std::size_t from, std::size_t to) const { return p_[from * r_ + to]; }
  std::span<const double> row(std::size_t from) const { return {p_.data() + from * r_, r_}; }

  bool operator==(const TransitionMatrix&) const = default;

 private:
  std::size_t r_;
  std::vector<double> p_;
};

struct ConditionReport {
  bool irreducible = false;
  bool aperiodic = false;
  std::size_t period = 0;  // 0 when the chain is reducible
  double max_transition = 0.0;
  /// (v, u) pairs with p2(v, u) = 0 although p1(u) p1(v) > 0. Only
  /// evaluated for ergodic chains (otherwise p1 is not unique).
  std::vector<std::pair<std::size_t, std::size_t>> pair_violations;
  bool pair_condition_checked = false;

  bool ergodic() const noexcept { return irreducible && aperiodic; }
  bool max_condition() const noexcept { return max_transition < 1.0; }
  bool passes() const noexcept {
    return ergodic() && max_condition() && pair_condition_checked && pair_violations.empty();
  }
  std::string describe() const;
};

/// Solves p1 M = p1 with sum 1. Throws ConditionError for reducible or
/// periodic chains, or if the residual exceeds 1e-12.
std::vector<double> stationary_distribution(const TransitionMatrix& m);

ConditionReport check_conditions(const TransitionMatrix& m);

class MarkovChainSpec {
 public:
  /// States must be distinct finite reals. Throws ConditionError when the
  /// chain is not ergodic.
  MarkovChainSpec(std::string name, std::vector<double> states, TransitionMatrix transition);

  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return states_.size(); }
  const std::vector<double>& states() const noexcept { return states_; }
  const TransitionMatrix& transition() const noexcept { return transition_; }
  const std::vector<double>& stationary() const noexcept { return stationary_; }

  std::optional<std::size_t> index_of(double value) const noexcept;
  /// Throws DomainError for values outside the state set.
  std::size_t require_index(double value) const;

 private:
  std::string name_;
  std::vector<double> states_;
  TransitionMatrix transition_;
  std::vector<double> stationary_;
};

ConditionReport check_conditions(const MarkovChainSpec& spec);

/// X_j = mean + phi (X_{j-1} - mean) + eps_j, eps_j ~ N(0, sd^2 (1 - phi^2)),
/// X_0 ~ N(mean, sd^2); stationary with marginal N(mean, sd^2).
struct AR1Spec {
  std::string name = "ar1";
  double mean = 0.0;
  double sd = 1.0;
  double phi = 0.0;

  void validate() const;
  double innovation_variance() const noexcept { return sd * sd * (1.0 - phi * phi); }
};

using NullModel = std::variant<MarkovChainSpec, AR1Spec>;

std::string model_name(const NullModel& model);

/// Row i comes from the (seed, simulate, i) stream. Refuses (ConditionError)
/// chains that fail check_conditions.
MarkerMatrix simulate_markov(const MarkovChainSpec& spec, std::size_t n, std::size_t m,
                             std::uint64_t seed);
MarkerMatrix simulate_ar1(const AR1Spec& spec, std::size_t n, std::size_t m, std::uint64_t seed);
MarkerMatrix simulate(const NullModel& model, std::size_t n, std::size_t m, std::uint64_t seed);

/// log p_m(row). -infinity marks a zero-probability row.
double row_log_likelihood(std::span<const double> row, const MarkovChainSpec& spec);
double row_log_likelihood(std::span<const double> row, const AR1Spec& spec);
double row_log_likelihood(std::span<const double> row, const NullModel& model);

/// rho_t(x) = p1(x_[t]) p1(x_[t-1]) / p2(x_[t-1], x_[t]), indices mod m,
/// with 0/0 = 0. Densities replace masses for AR(1).
double rho(std::span<const double> row, std::int64_t t, const MarkovChainSpec& spec);
double rho(std::span<const double> row, std::int64_t t, const AR1Spec& spec);
double rho(std::span<const double> row, std::int64_t t, const NullModel& model);

/// gamma_m(x) = (1/m) sum_{j=0}^{m-1} rho_j(x).
double gamma_m(std::span<const double> row, const NullModel& model);

/// log p_m(sigma_s(row)) for s = 0..m-1 in O(m).
std::vector<double> shift_log_likelihoods(std::span<const double> row, const NullModel& model);

}  // namespace cyclic
