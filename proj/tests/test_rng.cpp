#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "torsim/rng.hpp"

using namespace torsim;

TEST_CASE("rng: identical seeds give identical streams") {
  RandomStream a(12345), b(12345);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("rng: different seeds diverge") {
  RandomStream a(1), b(2);
  int equal = 0;
  for (int i = 0; i < 100; ++i)
    if (a.next_u64() == b.next_u64()) ++equal;
  CHECK(equal < 5);
}

TEST_CASE("rng: canonical stays in [0,1), unit_open in (0,1]") {
  RandomStream r(7);
  for (int i = 0; i < 100000; ++i) {
    const double c = r.canonical();
    CHECK(c >= 0.0);
    CHECK(c < 1.0);
    const double o = r.unit_open();
    CHECK(o > 0.0);
    CHECK(o <= 1.0);
  }
}

TEST_CASE("rng: uniform_index bounds and rough uniformity") {
  RandomStream r(11);
  std::vector<int> hits(10, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const std::size_t k = r.uniform_index(10);
    REQUIRE(k < 10);
    ++hits[k];
  }
  for (int h : hits) CHECK(std::abs(h - n / 10) < n / 100);
}

TEST_CASE("rng: normal moments") {
  RandomStream r(3);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("rng: exponential mean and positivity") {
  RandomStream r(5);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.exponential(360.0);
    REQUIRE(x > 0.0);
    sum += x;
  }
  CHECK(sum / n == doctest::Approx(360.0).epsilon(0.02));
  CHECK_THROWS_AS(r.exponential(0.0), std::invalid_argument);
}

TEST_CASE("rng: lognormal median") {
  RandomStream r(9);
  const int n = 100001;
  std::vector<double> xs(n);
  for (double& x : xs) x = r.lognormal(std::log(1000.0), 0.5);
  std::nth_element(xs.begin(), xs.begin() + n / 2, xs.end());
  CHECK(xs[n / 2] == doctest::Approx(1000.0).epsilon(0.03));
}

TEST_CASE("rng: beta support and mean") {
  RandomStream r(13);
  SUBCASE("shapes above 1") {
    const double a = 4.0, b = 6.0;
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const double x = r.beta(a, b);
      REQUIRE(x >= 0.0);
      REQUIRE(x <= 1.0);
      sum += x;
    }
    CHECK(sum / n == doctest::Approx(a / (a + b)).epsilon(0.02));
  }
  SUBCASE("shape below 1 uses the boost path") {
    const double a = 0.5, b = 8.5;
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const double x = r.beta(a, b);
      REQUIRE(x >= 0.0);
      REQUIRE(x <= 1.0);
      sum += x;
    }
    CHECK(sum / n == doctest::Approx(a / (a + b)).epsilon(0.05));
  }
  CHECK_THROWS_AS(r.beta(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("rng: mix64 and mix_seeds separate nearby inputs") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(mix64(i));
  CHECK(seen.size() == 1000);
  CHECK(mix_seeds(1, 2) != mix_seeds(2, 1));
  CHECK(mix_seeds(0, 0) != 0);
}
