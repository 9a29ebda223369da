#include "doctest.h"

#include <set>
#include <vector>

#include "wetting/rng.hpp"

using namespace wetting;

TEST_CASE("philox known answers") {
  auto a = philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(a[0] == 0x6627e8d5u);
  CHECK(a[1] == 0xe169c58du);
  CHECK(a[2] == 0xbc57ac4cu);
  CHECK(a[3] == 0x9b00dbd8u);
  auto b = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  CHECK(b[0] == 0x408f276du);
  CHECK(b[1] == 0x41c83b0eu);
  CHECK(b[2] == 0xa20bc7c6u);
  CHECK(b[3] == 0x6d5451fdu);
}

TEST_CASE("streams are reproducible and addressable") {
  Rng a(42, 3, 7), b(42, 3, 7), c(42, 4, 7), d(43, 3, 7);
  std::vector<std::uint64_t> xa, xb;
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 100; ++i) {
    xa.push_back(a());
    xb.push_back(b());
    differs_c |= xa.back() != c();
    differs_d |= xa.back() != d();
  }
  CHECK(xa == xb);
  CHECK(differs_c);
  CHECK(differs_d);
  Rng e(42, 3, 0);
  e();
  e.seek(7);
  for (int i = 0; i < 100; ++i) CHECK(e() == xa[i]);
}

TEST_CASE("uniform and below stay in range") {
  Rng r(1);
  double sum = 0;
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0);
    REQUIRE(u < 1);
    sum += u;
    const auto k = r.below(6);
    REQUIRE(k < 6);
    seen.insert(k);
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
  CHECK(seen.size() == 6);
}
