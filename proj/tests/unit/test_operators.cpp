#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "treetrace/operators.hpp"

using namespace treetrace;

namespace {

BoundaryFunction random_u(int K, int N, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<double> v(static_cast<std::size_t>(std::pow(K, N)));
  for (double& x : v) x = u(rng);
  return BoundaryFunction(K, N, std::move(v));
}

}  // namespace

TEST_SUITE("operators") {
  TEST_CASE("extension of a leaf indicator") {
    const auto F = extend(BoundaryFunction(2, 2, {1, 0, 0, 0}));
    CHECK(F.at(0, 0) == 0.25);
    CHECK(F.at(1, 0) == 0.5);
    CHECK(F.at(1, 1) == 0.0);
    CHECK(F.at(2, 0) == 1.0);
    CHECK(F.at(2, 3) == 0.0);
  }

  TEST_CASE("vertex values are cell averages") {
    std::mt19937_64 rng(3);
    for (int K : {2, 3}) {
      const auto u = random_u(K, 4, rng);
      const auto F = extend(u);
      for (int n = 0; n <= 4; ++n) {
        const std::size_t width = static_cast<std::size_t>(std::pow(K, 4 - n));
        for (std::size_t i = 0; i < F.level(n).size(); ++i) {
          double sum = 0.0;
          for (std::size_t j = i * width; j < (i + 1) * width; ++j) sum += u[j];
          CHECK(F.at(n, i) == doctest::Approx(sum / width).epsilon(1e-13));
        }
      }
    }
  }

  TEST_CASE("trace of extension is the identity bit for bit") {
    std::mt19937_64 rng(4);
    for (int K : {2, 3}) {
      for (int N = 0; N <= 6; ++N) {
        const auto u = random_u(K, N, rng);
        const auto back = trace(extend(u));
        REQUIRE(back.size() == u.size());
        CHECK(std::memcmp(back.values().data(), u.values().data(), u.size() * sizeof(double)) == 0);
      }
    }
  }

  TEST_CASE("both operators are linear") {
    std::mt19937_64 rng(5);
    const auto u = random_u(3, 3, rng), v = random_u(3, 3, rng);
    const auto lhs = extend(u.scaled(2.0).plus(v));
    const auto rhs = extend(u).scaled(2.0).plus(extend(v));
    for (int n = 0; n <= 3; ++n)
      for (std::size_t i = 0; i < lhs.level(n).size(); ++i)
        CHECK(lhs.at(n, i) == doctest::Approx(rhs.at(n, i)).epsilon(1e-12).scale(1.0));
    const auto F = extend(u), G = extend(v);
    const auto t = trace(F.scaled(-1.5).plus(G));
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(t[i] == doctest::Approx(-1.5 * u[i] + v[i]).epsilon(1e-12).scale(1.0));
  }

  TEST_CASE("star majorant") {
    const auto F = extend(BoundaryFunction(2, 2, {1, 0, 0, 0}));
    CHECK(star_majorant(F, DyadicCell{VertexAddress{{0, 0}}}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(star_majorant(F, DyadicCell{VertexAddress{{1, 1}}}) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(star_majorant(F, DyadicCell{VertexAddress{{1}}}), InvalidArgument);
    CHECK_THROWS_AS(star_majorant(F, DyadicCell{VertexAddress{{0, 2}}}), InvalidArgument);

    std::mt19937_64 rng(6);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::vector<double>> levels(5);
      for (int n = 0; n <= 4; ++n) {
        levels[n].resize(static_cast<std::size_t>(std::pow(3, n)));
        for (double& x : levels[n]) x = z(rng);
      }
      const TreeFunction G(3, 4, levels);
      const auto t = trace(G);
      for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(std::abs(t[i]) <= star_majorant(G, DyadicCell{VertexAddress::from_index(i, 4, 3)}) + 1e-12);
      }
    }
  }
}
