#include "cyclic/null_models.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "cyclic/error.hpp"
#include "cyclic/normal.hpp"
#include "cyclic/rng.hpp"

namespace cyclic {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<bool> reachable_from(const TransitionMatrix& m, std::size_t start, bool reverse) {
  const std::size_t r = m.size();
  std::vector<bool> seen(r, false);
  std::vector<std::size_t> stack{start};
  seen[start] = true;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t u = 0; u < r; ++u) {
      const double p = reverse ? m(u, v) : m(v, u);
      if (p > 0.0 && !seen[u]) {
        seen[u] = true;
        stack.push_back(u);
      }
    }
  }
  return seen;
}

// Period of state 0: gcd over edges v->u of level(v) + 1 - level(u), with
// levels from a BFS rooted at 0. Assumes irreducibility.
std::size_t period_of_state_zero(const TransitionMatrix& m) {
  const std::size_t r = m.size();
  std::vector<long> level(r, -1);
  std::queue<std::size_t> q;
  level[0] = 0;
  q.push(0);
  while (!q.empty()) {
    const std::size_t v = q.front();
    q.pop();
    for (std::size_t u = 0; u < r; ++u) {
      if (m(v, u) > 0.0 && level[u] < 0) {
        level[u] = level[v] + 1;
        q.push(u);
      }
    }
  }
  long g = 0;
  for (std::size_t v = 0; v < r; ++v) {
    for (std::size_t u = 0; u < r; ++u) {
      if (m(v, u) > 0.0) g = std::gcd(g, std::labs(level[v] + 1 - level[u]));
    }
  }
  return static_cast<std::size_t>(g);
}

void fill_ergodicity(const TransitionMatrix& m, ConditionReport& rep) {
  const auto fwd = reachable_from(m, 0, false);
  const auto bwd = reachable_from(m, 0, true);
  rep.irreducible = std::all_of(fwd.begin(), fwd.end(), [](bool b) { return b; }) &&
                    std::all_of(bwd.begin(), bwd.end(), [](bool b) { return b; });
  rep.period = rep.irreducible ? period_of_state_zero(m) : 0;
  rep.aperiodic = rep.period == 1;
}

std::int64_t wrap(std::int64_t t, std::size_t m) {
  const auto mm = static_cast<std::int64_t>(m);
  return ((t % mm) + mm) % mm;
}

// out[s] = first[s] + sum_{j != s} pair[j], treating -inf terms exactly.
std::vector<double> combine_shift_terms(const std::vector<double>& first,
                                        const std::vector<double>& pair) {
  const std::size_t m = pair.size();
  double finite_sum = 0.0;
  std::size_t impossible = 0;
  std::size_t impossible_at = 0;
  for (std::size_t j = 0; j < m; ++j) {
    if (std::isinf(pair[j])) {
      ++impossible;
      impossible_at = j;
    } else {
      finite_sum += pair[j];
    }
  }
  std::vector<double> out(m, kNegInf);
  if (impossible == 0) {
    for (std::size_t s = 0; s < m; ++s) out[s] = first[s] + (finite_sum - pair[s]);
  } else if (impossible == 1) {
    out[impossible_at] = first[impossible_at] + finite_sum;
  }
  return out;
}

}  // namespace

TransitionMatrix::TransitionMatrix(std::vector<std::vector<double>> rows) : r_(rows.size()) {
  if (r_ == 0) throw DomainError("transition matrix is empty");
  p_.reserve(r_ * r_);
  for (std::size_t v = 0; v < r_; ++v) {
    if (rows[v].size() != r_) throw DomainError("transition matrix is not square");
    double total = 0.0;
    for (double p : rows[v]) {
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw DomainError("transition row " + std::to_string(v) + " has a negative or non-finite entry");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw DomainError("transition row " + std::to_string(v) + " sums to " + std::to_string(total));
    }
    p_.insert(p_.end(), rows[v].begin(), rows[v].end());
  }
}

std::string ConditionReport::describe() const {
  std::ostringstream os;
  os << "irreducible=" << (irreducible ? "yes" : "no") << " period=" << period
     << " max p(u|v)=" << max_transition << (max_condition() ? " (<1)" : " (NOT <1)");
  if (!pair_condition_checked) {
    os << "; pair condition not evaluated (no unique stationary distribution)";
  } else if (pair_violations.empty()) {
    os << "; pair condition holds";
  } else {
    os << "; p2(v,u)=0 with p1(u)p1(v)>0 for (v,u) =";
    for (const auto& [v, u] : pair_violations) os << " (" << v << "," << u << ")";
  }
  return os.str();
}

std::vector<double> stationary_distribution(const TransitionMatrix& m) {
  ConditionReport rep;
  fill_ergodicity(m, rep);
  if (!rep.irreducible) throw ConditionError("chain is reducible; no unique stationary distribution");
  if (!rep.aperiodic) {
    throw ConditionError("chain is periodic (period " + std::to_string(rep.period) + ")");
  }
  const auto r = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXd a(r, r);
  for (Eigen::Index v = 0; v < r; ++v) {
    for (Eigen::Index u = 0; u < r; ++u) {
      a(u, v) = m(static_cast<std::size_t>(v), static_cast<std::size_t>(u)) - (u == v ? 1.0 : 0.0);
    }
  }
  a.row(r - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(r);
  b(r - 1) = 1.0;
  Eigen::VectorXd p = a.fullPivLu().solve(b);

  std::vector<double> p1(p.data(), p.data() + r);
  for (auto& v : p1) v = std::max(v, 0.0);
  const double total = std::accumulate(p1.begin(), p1.end(), 0.0);
  for (auto& v : p1) v /= total;

  double residual = 0.0;
  for (std::size_t u = 0; u < m.size(); ++u) {
    double s = 0.0;
    for (std::size_t v = 0; v < m.size(); ++v) s += p1[v] * m(v, u);
    residual = std::max(residual, std::abs(s - p1[u]));
  }
  if (residual > 1e-12) {
    throw ConditionError("stationary solve residual " + std::to_string(residual) + " exceeds 1e-12");
  }
  return p1;
}

ConditionReport check_conditions(const TransitionMatrix& m) {
  ConditionReport rep;
  fill_ergodicity(m, rep);
  for (std::size_t v = 0; v < m.size(); ++v) {
    for (double p : m.row(v)) rep.max_transition = std::max(rep.max_transition, p);
  }
  if (rep.ergodic()) {
    const auto p1 = stationary_distribution(m);
    rep.pair_condition_checked = true;
    for (std::size_t v = 0; v < m.size(); ++v) {
      for (std::size_t u = 0; u < m.size(); ++u) {
        const double p2 = p1[v] * m(v, u);
        if (p2 == 0.0 && p1[u] * p1[v] > 0.0) rep.pair_violations.emplace_back(v, u);
      }
    }
  }
  return rep;
}

MarkovChainSpec::MarkovChainSpec(std::string name, std::vector<double> states,
                                 TransitionMatrix transition)
    : name_(std::move(name)), states_(std::move(states)), transition_(std::move(transition)) {
  if (states_.size() != transition_.size()) {
    throw DomainError("state count does not match transition matrix size");
  }
  for (std::size_t a = 0; a < states_.size(); ++a) {
    if (!std::isfinite(states_[a])) throw DomainError("states must be finite");
    for (std::size_t b = 0; b < a; ++b) {
      if (states_[a] == states_[b]) throw DomainError("states must be distinct");
    }
  }
  stationary_ = stationary_distribution(transition_);
}

std::optional<std::size_t> MarkovChainSpec::index_of(double value) const noexcept {
  for (std::size_t a = 0; a < states_.size(); ++a) {
    if (states_[a] == value) return a;
  }
  return std::nullopt;
}

std::size_t MarkovChainSpec::require_index(double value) const {
  if (auto idx = index_of(value)) return *idx;
  std::ostringstream os;
  os << "value " << value << " is not a state of chain '" << name_ << "'";
  throw DomainError(os.str());
}

ConditionReport check_conditions(const MarkovChainSpec& spec) {
  return check_conditions(spec.transition());
}

void AR1Spec::validate() const {
  if (!std::isfinite(mean)) throw DomainError("AR(1) mean must be finite");
  if (!(sd > 0.0) || !std::isfinite(sd)) throw DomainError("AR(1) sd must be positive");
  if (!(std::abs(phi) < 1.0)) throw DomainError("AR(1) requires |phi| < 1 for stationarity");
}

std::string model_name(const NullModel& model) {
  if (const auto* chain = std::get_if<MarkovChainSpec>(&model)) return chain->name();
  return std::get<AR1Spec>(model).name;
}

MarkerMatrix simulate_markov(const MarkovChainSpec& spec, std::size_t n, std::size_t m,
                             std::uint64_t seed) {
  const ConditionReport rep = check_conditions(spec);
  if (!rep.passes()) throw ConditionError("chain '" + spec.name() + "' refused: " + rep.describe());
  const std::size_t r = spec.size();
  std::vector<double> initial(r);
  std::partial_sum(spec.stationary().begin(), spec.stationary().end(), initial.begin());
  std::vector<std::vector<double>> cumulative(r, std::vector<double>(r));
  for (std::size_t v = 0; v < r; ++v) {
    auto row = spec.transition().row(v);
    std::partial_sum(row.begin(), row.end(), cumulative[v].begin());
  }
  const auto draw = [r](const std::vector<double>& cdf, double u) {
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return std::min(static_cast<std::size_t>(it - cdf.begin()), r - 1);
  };

  std::vector<double> values(n * m);
  const auto rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i) {
    CounterStream stream(seed, StreamDomain::simulate, static_cast<std::uint64_t>(i));
    double* out = values.data() + static_cast<std::size_t>(i) * m;
    std::size_t state = draw(initial, stream.next_open_unit());
    out[0] = spec.states()[state];
    for (std::size_t j = 1; j < m; ++j) {
      state = draw(cumulative[state], stream.next_open_unit());
      out[j] = spec.states()[state];
    }
  }
  return MarkerMatrix(n, m, std::move(values));
}

MarkerMatrix simulate_ar1(const AR1Spec& spec, std::size_t n, std::size_t m, std::uint64_t seed) {
  spec.validate();
  const double innovation_sd = std::sqrt(spec.innovation_variance());
  std::vector<double> values(n * m);
  const auto rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i) {
    CounterStream stream(seed, StreamDomain::simulate, static_cast<std::uint64_t>(i));
    double* out = values.data() + static_cast<std::size_t>(i) * m;
    out[0] = spec.mean + spec.sd * inv_norm_cdf(stream.next_open_unit());
    for (std::size_t j = 1; j < m; ++j) {
      out[j] = spec.mean + spec.phi * (out[j - 1] - spec.mean) +
               innovation_sd * inv_norm_cdf(stream.next_open_unit());
    }
  }
  return MarkerMatrix(n, m, std::move(values));
}

MarkerMatrix simulate(const NullModel& model, std::size_t n, std::size_t m, std::uint64_t seed) {
  return std::visit(
      [&](const auto& spec) {
        if constexpr (std::is_same_v<std::decay_t<decltype(spec)>, AR1Spec>) {
          return simulate_ar1(spec, n, m, seed);
        } else {
          return simulate_markov(spec, n, m, seed);
        }
      },
      model);
}

double row_log_likelihood(std::span<const double> row, const MarkovChainSpec& spec) {
  if (row.empty()) throw DimensionError("empty row");
  std::size_t prev = spec.require_index(row[0]);
  double ll = std::log(spec.stationary()[prev]);
  for (std::size_t j = 1; j < row.size(); ++j) {
    const std::size_t cur = spec.require_index(row[j]);
    ll += std::log(spec.transition()(prev, cur));
    prev = cur;
  }
  return ll;
}

double row_log_likelihood(std::span<const double> row, const AR1Spec& spec) {
  if (row.empty()) throw DimensionError("empty row");
  spec.validate();
  const double var = spec.sd * spec.sd;
  const double cond_var = spec.innovation_variance();
  double ll = normal_log_pdf(row[0], spec.mean, var);
  for (std::size_t j = 1; j < row.size(); ++j) {
    ll += normal_log_pdf(row[j], spec.mean + spec.phi * (row[j - 1] - spec.mean), cond_var);
  }
  return ll;
}

double row_log_likelihood(std::span<const double> row, const NullModel& model) {
  return std::visit([&](const auto& spec) { return row_log_likelihood(row, spec); }, model);
}

double rho(std::span<const double> row, std::int64_t t, const MarkovChainSpec& spec) {
  if (row.empty()) throw DimensionError("empty row");
  const std::size_t u = spec.require_index(row[static_cast<std::size_t>(wrap(t, row.size()))]);
  const std::size_t v = spec.require_index(row[static_cast<std::size_t>(wrap(t - 1, row.size()))]);
  const auto& p1 = spec.stationary();
  const double num = p1[u] * p1[v];
  const double den = p1[v] * spec.transition()(v, u);
  if (den == 0.0) return num == 0.0 ? 0.0 : kInf;
  return num / den;
}

double rho(std::span<const double> row, std::int64_t t, const AR1Spec& spec) {
  if (row.empty()) throw DimensionError("empty row");
  spec.validate();
  const double u = row[static_cast<std::size_t>(wrap(t, row.size()))];
  const double v = row[static_cast<std::size_t>(wrap(t - 1, row.size()))];
  const double var = spec.sd * spec.sd;
  // f1(u) f1(v) / (f1(v) f(u | v))
  const double log_ratio = normal_log_pdf(u, spec.mean, var) -
                           normal_log_pdf(u, spec.mean + spec.phi * (v - spec.mean),
                                          spec.innovation_variance());
  return std::exp(log_ratio);
}

double rho(std::span<const double> row, std::int64_t t, const NullModel& model) {
  return std::visit([&](const auto& spec) { return rho(row, t, spec); }, model);
}

double gamma_m(std::span<const double> row, const NullModel& model) {
  if (row.empty()) throw DimensionError("empty row");
  double total = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) total += rho(row, static_cast<std::int64_t>(j), model);
  return total / static_cast<double>(row.size());
}

std::vector<double> shift_log_likelihoods(std::span<const double> row, const NullModel& model) {
  const std::size_t m = row.size();
  if (m == 0) throw DimensionError("empty row");
  std::vector<double> first(m);
  std::vector<double> pair(m);  // pair[j]: log p(x_j | x_{j-1}), j = 0 wraps to x_{m-1}
  if (const auto* chain = std::get_if<MarkovChainSpec>(&model)) {
    std::vector<std::size_t> idx(m);
    for (std::size_t j = 0; j < m; ++j) idx[j] = chain->require_index(row[j]);
    for (std::size_t j = 0; j < m; ++j) {
      first[j] = std::log(chain->stationary()[idx[j]]);
      pair[j] = std::log(chain->transition()(idx[(j + m - 1) % m], idx[j]));
    }
  } else {
    const auto& ar = std::get<AR1Spec>(model);
    ar.validate();
    const double var = ar.sd * ar.sd;
    const double cond_var = ar.innovation_variance();
    for (std::size_t j = 0; j < m; ++j) {
      first[j] = normal_log_pdf(row[j], ar.mean, var);
      const double prev = row[(j + m - 1) % m];
      pair[j] = normal_log_pdf(row[j], ar.mean + ar.phi * (prev - ar.mean), cond_var);
    }
  }
  return combine_shift_terms(first, pair);
}

}  // namespace cyclic
