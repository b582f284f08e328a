#include <cmath>
#include <set>

#include "doctest.h"

#include "cyclic/error.hpp"
#include "cyclic/normal.hpp"
#include "cyclic/rng.hpp"

using namespace cyclic;

// Known-answer vectors published with the Random123 distribution (kat_vectors).
TEST_CASE("philox4x32-10 known answers") {
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
        PhiloxBlock{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        PhiloxBlock{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        PhiloxBlock{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("counter streams follow the documented layout") {
  CounterStream s(0x0000000700000005ULL, StreamDomain::shift, 0x0000000300000002ULL);
  const auto block0 = philox4x32_10({0, 1, 2, 3}, {5, 7});
  const auto block1 = philox4x32_10({1, 1, 2, 3}, {5, 7});
  for (auto w : block0) CHECK(s.next_u32() == w);
  CHECK(s.next_u64() == (static_cast<std::uint64_t>(block1[1]) << 32 | block1[0]));
}

TEST_CASE("streams are independent of each other and reproducible") {
  CounterStream a(1, StreamDomain::shift, 0);
  CounterStream b(1, StreamDomain::shift, 0);
  CounterStream c(1, StreamDomain::simulate, 0);
  CounterStream d(1, StreamDomain::shift, 1);
  std::set<std::uint64_t> firsts;
  const auto va = a.next_u64();
  CHECK(va == b.next_u64());
  firsts.insert(va);
  firsts.insert(c.next_u64());
  firsts.insert(d.next_u64());
  CHECK(firsts.size() == 3);
  CHECK(derive_seed(9, 1) != derive_seed(9, 2));
  CHECK(derive_seed(9, 1) == derive_seed(9, 1));
}

TEST_CASE("uniform_below and next_open_unit ranges") {
  CounterStream s(42, StreamDomain::derive, 0);
  for (int k = 0; k < 10000; ++k) {
    CHECK(s.uniform_below(7) < 7);
    const double u = s.next_open_unit();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
  CHECK(s.uniform_below(1) == 0);
}

// Reference quantiles from a 30-digit mpmath evaluation of sqrt(2) erfinv(2p - 1).
TEST_CASE("inv_norm_cdf") {
  CHECK(inv_norm_cdf(0.5) == 0.0);
  CHECK(inv_norm_cdf(0.975) == doctest::Approx(1.95996398454005423552).epsilon(1e-14));
  CHECK(inv_norm_cdf(0.1) == doctest::Approx(-1.28155156554460046697).epsilon(1e-14));
  CHECK(inv_norm_cdf(1e-10) == doctest::Approx(-6.36134090240405620).epsilon(1e-12));
  CHECK(inv_norm_cdf(1 - 1e-6) == doctest::Approx(4.75342430882289895).epsilon(1e-10));

  CHECK_THROWS_AS(inv_norm_cdf(0.0), DomainError);
  CHECK_THROWS_AS(inv_norm_cdf(1.0), DomainError);
  CHECK_THROWS_AS(inv_norm_cdf(-0.2), DomainError);
  CHECK_THROWS_AS(inv_norm_cdf(NAN), DomainError);
}

TEST_CASE("property: inv_norm_cdf inverts normal_cdf and is antisymmetric") {
  CounterStream s(7, StreamDomain::derive, 0);
  for (int k = 0; k < 5000; ++k) {
    const double p = s.next_open_unit();
    const double z = inv_norm_cdf(p);
    CHECK(std::abs(normal_cdf(z) - p) <= 1e-9);
    CHECK(z == doctest::Approx(-inv_norm_cdf(1.0 - p)).epsilon(1e-9));
  }
}

TEST_CASE("normal_log_pdf") {
  CHECK(normal_log_pdf(0.0, 0.0, 1.0) == doctest::Approx(-0.918938533204672742));
  CHECK(normal_log_pdf(3.0, 1.0, 4.0) == doctest::Approx(-0.5 * std::log(8 * M_PI) - 0.5));
}
