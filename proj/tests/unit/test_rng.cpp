#include <cmath>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "osbm/parallel.hpp"
#include "osbm/rng.hpp"

using osbm::Philox4x32;
using osbm::RandomStream;
using osbm::RngSpec;

TEST_CASE("philox known answers") {
  // Reference vectors of the Random123 distribution for philox4x32-10.
  CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) ==
        Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and distinct") {
  RandomStream a(RngSpec{7, 3}), b(RngSpec{7, 3}), c(RngSpec{7, 4}), d(RngSpec{8, 3}), lane(RngSpec{7, 3}, 1);
  std::set<std::uint64_t> firsts;
  for (int i = 0; i < 100; ++i) {
    const auto v = a.next_u64();
    CHECK(v == b.next_u64());
    firsts.insert(v);
  }
  CHECK(firsts.size() == 100);
  RandomStream a2(RngSpec{7, 3});
  const auto v0 = a2.next_u64();
  CHECK(v0 != c.next_u64());
  CHECK(v0 != d.next_u64());
  CHECK(v0 != lane.next_u64());
}

TEST_CASE("uniform lies in the open unit interval with the right moments") {
  RandomStream s(RngSpec{1, 0});
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sq += u * u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.005));
  CHECK(sq / n == doctest::Approx(1.0 / 3.0).epsilon(0.005));
}

TEST_CASE("normal draws have unit variance and light tails") {
  RandomStream s(RngSpec{2, 0});
  const int n = 200000;
  double sum = 0.0, sq = 0.0, four = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    sum += z;
    sq += z * z;
    four += z * z * z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(sq / n == doctest::Approx(1.0).epsilon(0.01));
  CHECK(four / n == doctest::Approx(3.0).epsilon(0.03));
}

TEST_CASE("parallel_for visits every index once under any worker count") {
  for (unsigned threads : {1u, 2u, 5u}) {
    osbm::ThreadCountOverride guard(threads);
    CHECK(osbm::worker_count() == threads);
    std::vector<int> hits(1003, 0);
    osbm::parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) REQUIRE(h == 1);
  }
}

TEST_CASE("parallel_for rethrows a worker exception") {
  osbm::ThreadCountOverride guard(3);
  CHECK_THROWS_AS(osbm::parallel_for(100,
                                     [](std::size_t i) {
                                       if (i == 57) throw std::runtime_error("boom");
                                     }),
                  std::runtime_error);
}
