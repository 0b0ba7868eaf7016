#include <doctest.h>

#include <cmath>
#include <vector>

#include "fastgauss/errors.hpp"
#include "fastgauss/rng.hpp"
#include "oracle.hpp"

using namespace fastgauss;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using B = Philox4x32::Block;
  CHECK(Philox4x32::encrypt(B{0, 0, 0, 0}, {0, 0}) ==
        B{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::encrypt(B{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                            {0xffffffffu, 0xffffffffu}) ==
        B{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::encrypt(B{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                            {0xa4093822u, 0x299f31d0u}) ==
        B{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("identical seed and stream give identical sequences") {
  RngStream a(42, 0), b(42, 0);
  CHECK(a.normal() == b.normal());
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(draw_gamma(a, 0.7, 2.0) == draw_gamma(b, 0.7, 2.0));
}

TEST_CASE("distinct streams are uncorrelated") {
  RngStream a(42, 0), b(42, 1);
  const int n = 100000;
  double sab = 0.0;
  for (int i = 0; i < n; ++i) sab += a.normal() * b.normal();
  CHECK(std::abs(sab / n) < 4.0 / std::sqrt(n));
}

TEST_CASE("uniform stays in the open unit interval") {
  RngStream rng(1, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = draw_uniform(rng);
    CHECK_UNARY(u > 0.0);
    CHECK_UNARY(u < 1.0);
  }
}

TEST_CASE("standard normal moments") {
  RngStream rng(2024, 3);
  const auto z = draw_std_normal(rng, 100000);
  const double mean = z.mean();
  const double var = (z.array() - mean).square().sum() / (z.size() - 1);
  CHECK(std::abs(mean) < 0.013);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("gamma(1, rate) matches exponential(rate)") {
  RngStream g(9, 0), e(9, 1);
  std::vector<double> a, b;
  for (int i = 0; i < 100000; ++i) {
    a.push_back(draw_gamma(g, 1.0, 2.0));
    b.push_back(draw_exponential(e, 2.0));
  }
  CHECK(oracle::ks_two_sample(a, b) < 0.01);
  CHECK(oracle::ks_statistic(b, [](double x) { return 1.0 - std::exp(-2.0 * x); }) < 0.01);
}

TEST_CASE("gamma moments across shapes") {
  for (const double shape : {0.3, 0.5, 1.0, 2.5, 40.0}) {
    RngStream rng(17, static_cast<std::uint64_t>(shape * 10));
    const double rate = 1.5;
    const int n = 100000;
    double s = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = draw_gamma(rng, shape, rate);
      s += x;
      ss += x * x;
    }
    const double mean = s / n;
    const double var = ss / n - mean * mean;
    const double true_var = shape / (rate * rate);
    CAPTURE(shape);
    CHECK(std::abs(mean - shape / rate) < 4.0 * std::sqrt(true_var / n));
    CHECK(std::abs(var / true_var - 1.0) < 0.05);
  }
}

TEST_CASE("invalid distribution parameters") {
  RngStream rng(0, 0);
  CHECK_THROWS_AS(draw_gamma(rng, 0.0, 1.0), InvalidParameter);
  CHECK_THROWS_AS(draw_gamma(rng, 1.0, -1.0), InvalidParameter);
  CHECK_THROWS_AS(draw_exponential(rng, 0.0), InvalidParameter);
}
