#include <doctest.h>

#include <set>
#include <vector>

#include "safe_explore/error.hpp"
#include "safe_explore/rng.hpp"
#include "safe_explore/stats.hpp"

using namespace safe_explore;

TEST_CASE("rng is reproducible and split streams differ") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(Rng::derive_seed(7, i));
  CHECK(seeds.size() == 1000);
  // adding runs never changes earlier streams
  CHECK(Rng::derive_seed(7, 3) == Rng::derive_seed(7, 3));
  CHECK(Rng::derive_seed(7, 3) != Rng::derive_seed(8, 3));
}

TEST_CASE("rng draws stay in range") {
  Rng r(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.index(7) < 7);
  }
  CHECK_THROWS_AS(r.index(0), InvalidStateError);
  CHECK_FALSE(r.bernoulli(0.0));
  CHECK(r.bernoulli(1.0));
}

TEST_CASE("rng index is roughly uniform") {
  Rng r(3);
  std::vector<int> counts(4, 0);
  const int n = 40000;
  for (int i = 0; i < n; ++i) ++counts[r.index(4)];
  for (int c : counts) CHECK(std::abs(c - n / 4) < 400);  // ~4.6 sd
}

TEST_CASE("harmonic numbers") {
  CHECK(harmonic_number(0) == 0.0);
  CHECK(harmonic_number(1) == 1.0);
  CHECK(harmonic_number(3) == doctest::Approx(11.0 / 6.0));
}

TEST_CASE("aggregate") {
  SUBCASE("constant sample") {
    const std::vector<double> xs{3, 3, 3};
    const auto s = aggregate(xs);
    CHECK(s.mean == 3.0);
    CHECK(s.std_error == 0.0);
    CHECK(s.n == 3);
    CHECK_FALSE(s.degenerate);
  }
  SUBCASE("two points") {
    const std::vector<double> xs{0, 2};
    const auto s = aggregate(xs);
    CHECK(s.mean == 1.0);
    CHECK(s.std_error == doctest::Approx(1.0));
    CHECK(s.variance == doctest::Approx(2.0));
  }
  SUBCASE("single point is degenerate") {
    const std::vector<double> xs{5};
    const auto s = aggregate(xs);
    CHECK(s.mean == 5.0);
    CHECK(s.std_error == 0.0);
    CHECK(s.degenerate);
  }
  CHECK_THROWS_AS(aggregate(std::vector<double>{}), ParameterError);
}
