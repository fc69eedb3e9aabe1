#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "treetrace/tree_norms.hpp"

using namespace treetrace;

namespace {

const double ln2 = std::log(2.0);

TreeFunction random_F(int K, int N, std::mt19937_64& rng, double lo = -1.0) {
  std::uniform_real_distribution<double> u(lo, 1.0);
  std::vector<std::vector<double>> levels(N + 1);
  for (int n = 0; n <= N; ++n) {
    levels[n].resize(static_cast<std::size_t>(std::pow(K, n)));
    for (double& x : levels[n]) x = u(rng);
  }
  return TreeFunction(K, N, std::move(levels));
}

TreeFunction example_extension() { return TreeFunction(2, 2, {{0.25}, {0.5, 0.0}, {1, 0, 0, 0}}); }

}  // namespace

TEST_SUITE("tree_norms") {
  TEST_CASE("construction") {
    CHECK_THROWS_AS(TreeFunction(2, 1, {{0.0}}), InvalidArgument);
    CHECK_THROWS_AS(TreeFunction(2, 1, {{0.0}, {1.0}}), InvalidArgument);
    CHECK_THROWS_AS(TreeFunction(2, 1, {{0.0}, {1.0, INFINITY}}), InvalidArgument);
    const auto F = example_extension();
    CHECK(F.at(VertexAddress{{0, 0}}) == 1.0);
    CHECK(F.at(VertexAddress{}) == 0.25);
    CHECK_THROWS_AS(F.at(VertexAddress{{0, 0, 0}}), InvalidArgument);
  }

  TEST_CASE("edge gradients") {
    const auto P = make_tree_params(2, ln2, 2 * ln2, 0.0, 2);
    const auto g = upper_gradient_edges(P, example_extension());
    REQUIRE(g.levels.size() == 3);
    CHECK(g.levels[0].empty());
    CHECK(g.levels[1][0] == doctest::Approx(ln2 / 2).epsilon(1e-14));
    CHECK(g.levels[1][0] == doctest::Approx(0.34657).epsilon(1e-5));
    CHECK(g.levels[2][0] == doctest::Approx(2 * ln2).epsilon(1e-14));
    CHECK(g.levels[2][2] == 0.0);
    for (const auto& level : upper_gradient_edges(P, TreeFunction::constant(2, 2, 5.0)).levels)
      for (double v : level) CHECK(v == 0.0);
    const auto s = upper_gradient_edges(P, example_extension().scaled(-3.0));
    for (int m = 1; m <= 2; ++m)
      for (std::size_t i = 0; i < s.levels[m].size(); ++i)
        CHECK(s.levels[m][i] == doctest::Approx(3.0 * g.levels[m][i]).epsilon(1e-14));
    CHECK_THROWS_AS(upper_gradient_edges(make_tree_params(3, 1.0, 2.0, 0.0, 2), example_extension()),
                    InvalidArgument);
  }

  TEST_CASE("upper gradient inequality along geodesics") {
    const auto P = make_tree_params(3, 0.6, 2.0, 0.0, 5);
    std::mt19937_64 rng(21);
    const auto F = random_F(3, 5, rng);
    const auto g = upper_gradient_edges(P, F);
    std::uniform_int_distribution<int> lev(0, 5), dig(0, 2);
    for (int trial = 0; trial < 1000; ++trial) {
      VertexAddress y, z;
      y.digits.resize(lev(rng));
      z.digits.resize(lev(rng));
      for (int& d : y.digits) d = dig(rng);
      for (int& d : z.digits) d = dig(rng);
      std::size_t common = 0;
      while (common < y.digits.size() && common < z.digits.size() && y.digits[common] == z.digits[common]) ++common;
      double path = 0.0;
      for (const auto* v : {&y, &z}) {
        for (std::size_t m = common + 1; m <= v->digits.size(); ++m) {
          const VertexAddress child{{v->digits.begin(), v->digits.begin() + m}};
          path += g.levels[m][child.index(3)] * edge_length(P, static_cast<int>(m) - 1);
        }
      }
      CHECK(std::abs(F.at(z) - F.at(y)) <= path + 1e-9);
      if (common == y.digits.size() && y.digits.size() + 1 == z.digits.size()) {
        CHECK(std::abs(F.at(z) - F.at(y)) == doctest::Approx(path).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("value modular") {
    const auto P = make_tree_params(2, ln2, 2 * ln2, 0.0, 3);
    CHECK(tree_lphi_modular(P, TreeFunction::constant(2, 3, 0.0), YoungPhi(2.0, 1.0), 0.0, 1.0) == 0.0);
    const double c = 1.7;
    CHECK(tree_lphi_modular(P, TreeFunction::constant(2, 3, c), YoungPhi(3.0, 0.0), 0.0, 1.0) ==
          doctest::Approx(c * c * c * truncated_measure(P, 0.0)).epsilon(1e-12));
    CHECK_THROWS_AS(tree_lphi_modular(P, TreeFunction::constant(2, 3, c), YoungPhi(2.0, 0.0), 0.0, 0.0),
                    InvalidArgument);
  }

  TEST_CASE("value modular on a single edge against adaptive quadrature") {
    const double eps = 0.9, beta = 2.0;
    for (double lambda2 : {0.0, 1.0, -1.0}) {
      const auto P = make_tree_params(2, eps, beta, lambda2, 1, 24);
      const double C = P.C_const();
      for (auto [a, b] : {std::pair{0.3, 1.2}, {1.0, -0.5}, {-2.0, 0.7}}) {
        const TreeFunction F(2, 1, {{a}, {b, b}});
        for (const YoungPhi& phi : {YoungPhi(2.0, 0.0), YoungPhi(2.0, 1.0), YoungPhi(1.0, 1.0)}) {
          const double k = 0.8;
          // F is linear in arclength s(t) = (1 - e^{-eps t}) / eps along the edge.
          auto integrand = [&](double t) {
            const double w = (1.0 - std::exp(-eps * t)) / (1.0 - std::exp(-eps));
            return phi(std::abs(a + (b - a) * w) / k) * std::exp(-beta * t) * std::pow(t + C, lambda2);
          };
          double oracle = 0.0;
          if (a * b < 0) {
            const double w0 = a / (a - b);
            const double t0 = -std::log(1.0 - w0 * (1.0 - std::exp(-eps))) / eps;
            oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, t0, 15, 1e-14) +
                     boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, t0, 1.0, 15, 1e-14);
          } else {
            oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, 1.0, 15, 1e-14);
          }
          CHECK(tree_lphi_modular(P, F, phi, lambda2, k) == doctest::Approx(2 * oracle).epsilon(1e-10));
        }
      }
    }
  }

  TEST_CASE("gradient modular") {
    const auto P = make_tree_params(2, ln2, 2 * ln2, 0.0, 2);
    CHECK(gradient_lphi_modular(P, TreeFunction::constant(2, 2, 1.0), YoungPhi(2.0, 1.0), 0.0, 1.0) == 0.0);
    // Six edges: two at level 0 with g = ln2/2, two at level 1 with g = 2 ln2, two flat.
    CHECK(gradient_lphi_modular(P, example_extension(), YoungPhi(2.0, 0.0), 0.0, 1.0) ==
          doctest::Approx(0.9375 * ln2).epsilon(1e-13));

    std::mt19937_64 rng(8);
    const auto Q = make_tree_params(3, 0.7, 2.0, 1.0, 4);
    const auto F = random_F(3, 4, rng);
    const auto g = upper_gradient_edges(Q, F);
    const YoungPhi phi(2.0, -1.0);
    double expect = 0.0;
    for (int m = 1; m <= 4; ++m) {
      for (double v : g.levels[m]) {
        const double mass = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            [&](double t) { return std::exp(-2.0 * t) * std::pow(t + Q.C_const(), 1.0); }, m - 1.0, m, 15, 1e-14);
        expect += phi(v / 0.5) * mass;
      }
    }
    CHECK(gradient_lphi_modular(Q, F, phi, 1.0, 0.5) == doctest::Approx(expect).epsilon(1e-12));
  }

  TEST_CASE("Newtonian norm") {
    const auto P = make_tree_params(2, ln2, 2 * ln2, 0.0, 4);
    const YoungPhi sq(2.0, 0.0);
    const auto c = TreeFunction::constant(2, 4, 2.0);
    CHECK(newtonian_norm(P, c, sq, 0.0) == doctest::Approx(2.0 * std::sqrt(truncated_measure(P, 0.0))).epsilon(1e-9));

    std::mt19937_64 rng(9);
    for (int i = 0; i < 10; ++i) {
      const auto F = random_F(2, 4, rng);
      const double expect =
          std::sqrt(tree_lphi_modular(P, F, sq, 0.0, 1.0)) + std::sqrt(gradient_lphi_modular(P, F, sq, 0.0, 1.0));
      CHECK(newtonian_norm(P, F, sq, 0.0) == doctest::Approx(expect).epsilon(1e-9));
      const YoungPhi lg(1.0, 1.0);
      CHECK(newtonian_norm(P, F.scaled(-0.3), lg, 0.0) == doctest::Approx(0.3 * newtonian_norm(P, F, lg, 0.0)).epsilon(1e-9));
    }
  }

  TEST_CASE("CSV round trip") {
    std::mt19937_64 rng(10);
    const auto F = random_F(3, 3, rng);
    std::stringstream ss;
    write_tree_csv(ss, F);
    const auto G = read_tree_csv(ss);
    for (int n = 0; n <= 3; ++n)
      for (std::size_t i = 0; i < F.level(n).size(); ++i) CHECK(G.at(n, i) == F.at(n, i));
    std::stringstream missing("K,N\n2,1\naddress,value\n,1\n0,2\n");
    CHECK_THROWS_AS(read_tree_csv(missing), InvalidArgument);
    std::stringstream dup("K,N\n2,1\naddress,value\n,1\n0,2\n1,3\n,4\n");
    CHECK_THROWS_AS(read_tree_csv(dup), InvalidArgument);
  }
}
