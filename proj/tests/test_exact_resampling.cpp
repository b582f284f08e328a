#include <cmath>

#include "doctest.h"
#include "oracles.hpp"

#include "cyclic/error.hpp"
#include "cyclic/exact_resampling.hpp"
#include "cyclic/model_file.hpp"

using namespace cyclic;

namespace {

NullModel markov3() { return load_null_model(CYCLICSHIFT_DATA_DIR "/specs/markov3.txt"); }
NullModel markov5() { return load_null_model(CYCLICSHIFT_DATA_DIR "/specs/markov5.txt"); }

NullModel iid3() {
  return MarkovChainSpec("iid3", {0, 1, 2.5},
                         TransitionMatrix({{0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}}));
}

void check_matches(const StatDistribution& d, const oracle::Dist& ref, double tol) {
  REQUIRE(d.support.size() == ref.size());
  std::size_t k = 0;
  for (const auto& [t, p] : ref) {
    CHECK(d.support[k] == t);
    CHECK(std::abs(d.probabilities[k] - p) <= tol);
    ++k;
  }
}

double cdf_at(const oracle::Dist& d, double t) {
  double c = 0.0;
  for (const auto& [v, p] : d) c += v <= t ? p : 0.0;
  return c;
}

}  // namespace

TEST_CASE("StatDistribution") {
  const std::vector<double> v{3, 1, 3, 2};
  const std::vector<double> w{1, 2, 3, 2};
  const auto d = StatDistribution::from_weighted(v, w);
  CHECK(d.support == std::vector<double>{1, 2, 3});
  CHECK(d.probabilities == std::vector<double>{0.25, 0.25, 0.5});
  CHECK(d.cdf(0.5) == 0.0);
  CHECK(d.cdf(2.0) == 0.5);
  CHECK(d.cdf(9.0) == 1.0);
  CHECK(d.upper_tail(2.0) == 0.75);
  CHECK(d.upper_tail(2.5) == 0.5);

  const auto u = StatDistribution::uniform(v);
  CHECK(u.probabilities == std::vector<double>{0.25, 0.25, 0.5});

  const std::vector<double> bad{1, -1, 0, 0};
  CHECK_THROWS_AS(StatDistribution::from_weighted(v, bad), DomainError);
  const std::vector<double> zero(4, 0.0);
  CHECK_THROWS_AS(StatDistribution::from_weighted(v, zero), DomainError);
  CHECK_THROWS_AS(StatDistribution::from_weighted(v, std::vector<double>{1.0}), DimensionError);
}

TEST_CASE("compare_distributions evaluates both CDFs on the merged grid") {
  const StatDistribution p{{0, 1}, {0.5, 0.5}};
  const StatDistribution q{{0.5}, {1.0}};
  const auto c = compare_distributions(p, q);
  CHECK(c.grid == std::vector<double>{0, 0.5, 1});
  CHECK(c.cdf_p == std::vector<double>{0.5, 0.5, 1});
  CHECK(c.cdf_q == std::vector<double>{0, 1, 1});
  CHECK(c.sup_distance == 0.5);
  CHECK(compare_distributions(p, p).sup_distance == 0.0);
}

TEST_CASE("minimal_period") {
  CHECK(minimal_period(std::vector<double>{1, 2, 1, 2}) == 2);
  CHECK(minimal_period(std::vector<double>{1, 2, 3}) == 3);
  CHECK(minimal_period(std::vector<double>{7, 7, 7, 7}) == 1);
  CHECK(minimal_period(std::vector<double>{1, 2, 1, 2, 1}) == 5);
  CHECK(minimal_period(std::vector<double>{5}) == 1);

  // Brute force: least k with sigma_k(row) = row.
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const std::size_t m = 2 + seed % 12;
    const auto x = oracle::random_matrix(seed, 1, m, {0.0, 1.0});
    const std::vector<double> row(x.row(0).begin(), x.row(0).end());
    std::size_t expect = m;
    for (std::size_t k = 1; k < m; ++k) {
      if (cyclic_shift_row(row, k) == row) {
        expect = k;
        break;
      }
    }
    CHECK(minimal_period(row) == expect);
    CHECK(m % expect == 0);
  }
}

TEST_CASE("repeated_block_witness") {
  CHECK(repeated_block_witness(std::vector<double>{1, 2, 1, 2, 1, 2}) == BlockWitness{0, 2, 2});
  CHECK(repeated_block_witness(std::vector<double>{4, 4, 4}) == BlockWitness{0, 1, 1});
  CHECK_FALSE(repeated_block_witness(std::vector<double>{1, 2, 3}).has_value());

  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const std::size_t m = 2 + seed % 12;
    const auto x = oracle::random_matrix(seed, 1, m, {0.0, 1.0});
    const auto row = x.row(0);
    const auto w = repeated_block_witness(row);
    CHECK(w.has_value() == (minimal_period(row) < m));
    if (!w) continue;
    CHECK(3 * w->length >= m);
    CHECK(w->first + w->length <= w->second);
    CHECK(w->second + w->length <= m);
    for (std::size_t j = 0; j < w->length; ++j) CHECK(row[w->first + j] == row[w->second + j]);
  }
}

TEST_CASE("is_full") {
  CHECK(is_full(MarkerMatrix::from_rows({{1, 2, 3}, {0, 0, 1}})).full);
  const auto f = is_full(MarkerMatrix::from_rows({{1, 2, 3, 4}, {1, 2, 1, 2}}));
  CHECK_FALSE(f.full);
  CHECK(f.periods == std::vector<std::size_t>{4, 2});
}

TEST_CASE("2x3 example: exact Q distribution") {
  const auto x = MarkerMatrix::from_rows({{1, 0, 0}, {1, 0, 0}});
  const auto q = exact_cyclic_dist(x, LocalStatistic::sum(), GlobalStatistic::max);
  CHECK(q.support == std::vector<double>{1, 2});
  CHECK(q.probabilities[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(q.probabilities[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(q.upper_tail(2.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("constant rows give point masses") {
  const auto x = MarkerMatrix::from_rows({{1, 1, 1, 1}, {2.5, 2.5, 2.5, 2.5}});
  const auto c = exact_comparison(x, markov3(), LocalStatistic::sum(), GlobalStatistic::max);
  CHECK(c.grid == std::vector<double>{3.5});
  CHECK(c.cdf_p == std::vector<double>{1.0});
  CHECK(c.sup_distance == 0.0);
  CHECK_FALSE(c.meta.full);
}

TEST_CASE("exact distributions match the materialising oracles") {
  for (const auto& model : {markov3(), iid3()}) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const std::size_t n = 1 + seed % 2;
      const std::size_t m = 2 + seed % 5;
      const auto x = oracle::random_matrix(seed, n, m, {0.0, 1.0, 2.5});
      for (bool gain : {true, false}) {
        const auto g = gain ? GlobalStatistic::max : GlobalStatistic::min;
        check_matches(exact_cyclic_dist(x, LocalStatistic::sum(), g), oracle::cyclic_dist(x, gain), 1e-14);
        check_matches(exact_conditional_dist(x, model, LocalStatistic::sum(), g),
                      oracle::conditional_dist(x, model, gain), 1e-13);
      }
      const auto c = exact_comparison(x, model, LocalStatistic::sum(), GlobalStatistic::max);
      CHECK(c.meta.method == "exact");
      CHECK(c.meta.n == n);
      CHECK(c.meta.m == m);
      for (std::size_t k = 0; k < c.grid.size(); ++k) {
        CHECK(c.cdf_q[k] == doctest::Approx(cdf_at(oracle::cyclic_dist(x, true), c.grid[k])).epsilon(1e-13));
        CHECK(c.cdf_p[k] ==
              doctest::Approx(cdf_at(oracle::conditional_dist(x, model, true), c.grid[k])).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("row_shift_weights sum to one and match the oracle") {
  const auto model = markov5();
  const auto x = simulate(model, 6, 20, 3);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto w = row_shift_weights(x.row(i), model);
    const auto ref = oracle::shift_weights(x.row(i), model);
    double total = 0.0;
    for (std::size_t s = 0; s < w.size(); ++s) {
      CHECK(w[s] == doctest::Approx(ref[s]).epsilon(1e-12));
      total += w[s];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("two-state example against the oracle") {
  const NullModel model = MarkovChainSpec("two", {0, 1}, TransitionMatrix({{0.9, 0.1}, {0.2, 0.8}}));
  const auto x = MarkerMatrix::from_rows({{0, 1, 1}, {1, 0, 0}});
  check_matches(exact_conditional_dist(x, model, LocalStatistic::sum(), GlobalStatistic::max),
                oracle::conditional_dist(x, model, true), 1e-14);
}

TEST_CASE("a full shift orbit makes the weighted distribution equal the set-conditional one") {
  const auto model = markov3();
  int full_cases = 0;
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    const std::size_t n = 1 + seed % 2;
    const std::size_t m = 3 + seed % 3;
    const auto x = oracle::random_matrix(500 + seed, n, m, {0.0, 1.0, 2.5});
    if (!is_full(x).full) continue;
    ++full_cases;
    check_matches(exact_conditional_dist(x, model, LocalStatistic::sum(), GlobalStatistic::max),
                  oracle::set_conditional_dist(x, model, true), 1e-13);
  }
  CHECK(full_cases >= 30);
}

TEST_CASE("iid chains make P and Q coincide") {
  const auto model = iid3();
  const auto x = simulate(model, 3, 8, 1);
  CHECK(exact_comparison(x, model, LocalStatistic::sum(), GlobalStatistic::max).sup_distance <= 1e-14);
  CHECK(monte_carlo_dists(x, model, LocalStatistic::sum(), GlobalStatistic::max, 2000, 4).sup_distance <= 1e-12);
}

TEST_CASE("Monte Carlo comparison concentrates on the exact one") {
  const auto model = markov3();
  const std::uint64_t samples = 20'000;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto x = simulate(model, 2, 6 + seed, seed);
    const auto exact = exact_comparison(x, model, LocalStatistic::sum(), GlobalStatistic::max);
    const auto mc = monte_carlo_dists(x, model, LocalStatistic::sum(), GlobalStatistic::max, samples, 9 + seed);
    CHECK(mc.meta.method == "monte-carlo");
    CHECK(mc.meta.num_samples == samples);
    for (std::size_t k = 0; k < mc.grid.size(); ++k) {
      // Exact CDFs at the Monte Carlo grid point.
      double fq = 0.0;
      double fp = 0.0;
      for (std::size_t e = 0; e < exact.grid.size() && exact.grid[e] <= mc.grid[k]; ++e) {
        fq = exact.cdf_q[e];
        fp = exact.cdf_p[e];
      }
      CHECK(std::abs(mc.cdf_q[k] - fq) <= 4 * std::sqrt(fq * (1 - fq) / samples) + 1e-12);
      CHECK(std::abs(mc.cdf_p[k] - fp) <= 0.03);
    }
  }
}

TEST_CASE("convergence_experiment is deterministic and thread-count independent") {
  ExperimentConfig cfg;
  cfg.n = 2;
  cfg.m_values = {5, 30};
  cfg.replicates = 3;
  cfg.seed = 8;
  cfg.budget = 100;
  cfg.num_samples = 500;
  cfg.threads = 1;
  const auto a = convergence_experiment(markov5(), cfg);
  cfg.threads = 4;
  const auto b = convergence_experiment(markov5(), cfg);
  REQUIRE(a.size() == 6);
  CHECK(a == b);
  CHECK(a[0].meta.method == "exact");
  CHECK(a[3].meta.method == "monte-carlo");
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].meta.replicate == k % 3);
    CHECK(a[k].meta.seed == replicate_seed(8, cfg.m_values[k / 3], k % 3));
  }
}

TEST_CASE("median") {
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 3, 2}) == 2.5);
  CHECK_THROWS_AS(median({}), DimensionError);
}
