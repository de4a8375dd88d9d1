#include <doctest.h>

#include <cmath>
#include <vector>

#include "ramcmc/rng.hpp"

using namespace ramcmc;

TEST_SUITE_BEGIN("rng");

TEST_CASE("equal (seed, stream) pairs reproduce the sequence exactly") {
  RngStream a(42, 7);
  RngStream b(42, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  RngStream c(42, 7);
  RngStream d(42, 7);
  for (int i = 0; i < 100; ++i) {
    CHECK(c.normal() == d.normal());
    CHECK(c.gamma(0.5) == d.gamma(0.5));
  }
}

TEST_CASE("different streams diverge") {
  RngStream a(42, 0);
  RngStream b(42, 1);
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += a.next_u32() == b.next_u32() ? 1 : 0;
  CHECK(equal == 0);
}

TEST_CASE("disjoint streams are empirically uncorrelated") {
  RngStream a(9, 100);
  RngStream b(9, 200);
  const int n = 100000;
  double sum_ab = 0.0, sum_a = 0.0, sum_b = 0.0, sum_a2 = 0.0, sum_b2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = a.uniform01();
    const double y = b.uniform01();
    sum_ab += x * y;
    sum_a += x;
    sum_b += y;
    sum_a2 += x * x;
    sum_b2 += y * y;
  }
  const double cov = sum_ab / n - (sum_a / n) * (sum_b / n);
  const double var_a = sum_a2 / n - (sum_a / n) * (sum_a / n);
  const double var_b = sum_b2 / n - (sum_b / n) * (sum_b / n);
  CHECK(std::abs(cov / std::sqrt(var_a * var_b)) < 0.01);
}

TEST_CASE("uniform draws live in [0, 1) with mean one half") {
  RngStream rng(3);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("normal draws have the right first two moments") {
  RngStream rng(5);
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 0.02);
  CHECK(sum2 / n - mean * mean == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("gamma draws match their mean and variance") {
  RngStream rng(7);
  const int n = 100000;
  for (double shape : {0.5, 2.5}) {
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = rng.gamma(shape);
      sum += x;
      sum2 += x * x;
    }
    const double mean = sum / n;
    CHECK(mean == doctest::Approx(shape).epsilon(0.03));
    CHECK(sum2 / n - mean * mean == doctest::Approx(shape).epsilon(0.08));
  }
}

TEST_CASE("chi-squared(1) draws have mean 1") {
  RngStream rng(11);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.chi_squared(1.0);
  CHECK(sum / n == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("cauchy draws have median 0 and unit quartiles") {
  RngStream rng(13);
  const int n = 100000;
  std::vector<double> draws(n);
  for (int i = 0; i < n; ++i) draws[i] = rng.cauchy();
  std::sort(draws.begin(), draws.end());
  CHECK(std::abs(draws[n / 2]) < 0.02);
  CHECK(draws[3 * n / 4] == doctest::Approx(1.0).epsilon(0.03));
}

TEST_SUITE_END();
