// SPDX-License-Identifier: Apache-2.0

#include <boost/math/special_functions/lambert_w.hpp>
#include <cmath>
#include <numbers>

#include "bmdf/errors.hpp"
#include "bmdf/lambert_w.hpp"
#include "bmdf/rng.hpp"
#include "doctest.h"

using namespace bmdf;

TEST_CASE("lambert_w exact points") {
  const double e = std::numbers::e;
  CHECK(lambert_w0(0.0) == 0.0);
  CHECK(lambert_wm1(-1.0 / e) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(lambert_w0(-1.0 / e) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(lambert_wm1(-2.0 * std::exp(-2.0)) == doctest::Approx(-2.0).epsilon(1e-13));
  CHECK(lambert_w0(e) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("lambert_w gives gamma0 on the lower branch") {
  const double w = lambert_wm1(-0.5 * std::exp(-0.5));
  CHECK(-w - 0.5 == doctest::Approx(1.2564).epsilon(5e-4 / 1.2564));
}

TEST_CASE("lambert_w matches Boost on both branches") {
  for (double x = -0.3678; x < 1e6; x = x < 0 ? x + 0.01 : x * 1.37 + 1e-3) {
    const double ours = lambert_w0(x);
    const double ref = boost::math::lambert_w0(x);
    CHECK(ours == doctest::Approx(ref).epsilon(1e-13).scale(1e-300));
  }
  for (double x = -0.3678; x < -1e-300; x *= 0.71) {
    CHECK(lambert_wm1(x) == doctest::Approx(boost::math::lambert_wm1(x)).epsilon(1e-13));
  }
}

TEST_CASE("lambert_w round trip") {
  for (double x : {-0.36, -0.2, -1e-3, 1e-9, 0.5, 3.0, 1e3, 1e12}) {
    const double w = lambert_w0(x);
    CHECK(w * std::exp(w) == doctest::Approx(x).epsilon(1e-14));
    if (x < 0) {
      const double v = lambert_wm1(x);
      CHECK(v <= -1.0);
      CHECK(v * std::exp(v) == doctest::Approx(x).epsilon(1e-13));
    }
  }
}

TEST_CASE("lambert_w rejects points off its domain") {
  CHECK_THROWS_AS(lambert_w0(-0.5), DomainError);
  CHECK_THROWS_AS(lambert_wm1(0.1), DomainError);
  CHECK_THROWS_AS(lambert_wm1(0.0), DomainError);
  CHECK_THROWS_AS(lambert_w0(std::nan("")), DomainError);
}

TEST_CASE("philox4x64-10 known answers") {
  using A4 = std::array<std::uint64_t, 4>;
  CHECK(philox4x64({0, 0, 0, 0}, {0, 0}) ==
        A4{0x16554d9eca36314cULL, 0xdb20fe9d672d0fdcULL, 0xd7e772cee186176bULL, 0x7e68b68aec7ba23bULL});
  constexpr std::uint64_t m = ~0ULL;
  CHECK(philox4x64({m, m, m, m}, {m, m}) ==
        A4{0x87b092c3013fe90bULL, 0x438c3c67be8d0224ULL, 0x9cc7d7c69cd777b6ULL, 0xa09caebf594f0ba0ULL});
  CHECK(philox4x64({0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL, 0xa4093822299f31d0ULL, 0x082efa98ec4e6c89ULL},
                   {0x452821e638d01377ULL, 0xbe5466cf34e90c6cULL}) ==
        A4{0xa528f45403e61d95ULL, 0x38c72dbd566e9788ULL, 0xa5a1610e72fd18b5ULL, 0x57bd43b5e52b7fe6ULL});
}

TEST_CASE("rng streams are reproducible and addressable") {
  RngStream a(42), b(42);
  for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
  RngStream c(42);
  c.seek(7);
  CHECK(c.next() == RngStream(42).block(7));
  CHECK(RngStream(42).block(0) != RngStream(43).block(0));
  CHECK(RngStream(42).substream(1).block(0) != RngStream(42).substream(2).block(0));
  CHECK(RngStream(42).substream(3).block(5) == RngStream(42).substream(3).block(5));
}

TEST_CASE("unit conversions stay inside their intervals") {
  CHECK(to_unit_open_closed(0) > 0.0);
  CHECK(to_unit_open_closed(~0ULL) == 1.0);
  CHECK(to_unit_closed_open(0) == 0.0);
  CHECK(to_unit_closed_open(~0ULL) < 1.0);
}
