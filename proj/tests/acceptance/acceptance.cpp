// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "treetrace/boundary.hpp"
#include "treetrace/boundary_norms.hpp"
#include "treetrace/hajlasz.hpp"
#include "treetrace/harness.hpp"
#include "treetrace/operators.hpp"
#include "treetrace/tree.hpp"
#include "treetrace/young.hpp"

using namespace treetrace;

namespace {

const double ln2 = std::log(2.0);

const std::vector<Family> kAllFamilies{Family::iid_uniform, Family::cell_indicator, Family::lacunary,
                                       Family::extension_of_boundary, Family::random_vertex};

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("%s  %2d  %-28s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::vector<std::uint64_t> seed_range(std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint64_t> s;
  for (auto i = lo; i <= hi; ++i) s.push_back(i);
  return s;
}

BoundaryFunction uniform_f(int K, int N, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(std::pow(K, N)));
  for (double& x : v) x = u(rng);
  return BoundaryFunction(K, N, std::move(v));
}

void roundtrip() {
  double worst = 0.0;
  std::size_t checked = 0;
  bool pass = true;
  for (int K : {2, 3}) {
    ExperimentConfig c;
    c.K = K;
    c.beta = 2.0 * std::log(static_cast<double>(K));
    c.families = kAllFamilies;
    c.seeds = seed_range(1, 100);
    c.depths = {2, 3, 4, 5, 6, 7, 8};
    const auto r = verify_roundtrip(c);
    pass = pass && r.pass;
    worst = std::max(worst, r.worst);
    checked += r.checked;
  }
  report(1, "roundtrip", pass, fmt("worst |T(Eu) - u| = %.3g over %.0f functions", worst, double(checked)));
}

void hand_oracles() {
  const auto P2 = make_tree_params(2, ln2, 2 * ln2, 0.0, 2);
  const auto P1 = make_tree_params(2, ln2, 2 * ln2, 0.0, 1);
  const double energy = dyadic_energy(P2, BoundaryFunction(2, 2, {1, 0, 0, 0}), EnergyParams{0.5, 2.0, 0.0, 0.0});
  const double di = double_integral_energy(P1, BoundaryFunction(2, 1, {1, 0}), 0.5, 2.0).value;
  const auto F = extend(BoundaryFunction(2, 2, {1, 0, 0, 0}));
  const bool ext = F.at(0, 0) == 0.25 && F.at(1, 0) == 0.5 && F.at(1, 1) == 0.0 && F.at(2, 0) == 1.0 &&
                   F.at(2, 1) == 0.0 && F.at(2, 2) == 0.0 && F.at(2, 3) == 0.0;
  const double lp = hajlasz_energy(make_hajlasz_instance(P1, BoundaryFunction(2, 1, {1, 0}), 0.5, 1.0));
  const double lp_exact = 0.5 / std::sqrt(2.0 / ln2);
  const bool pass = std::abs(energy - 0.625) <= 1e-12 && std::abs(di - ln2 / 4) <= 1e-12 && ext &&
                    std::abs(lp - lp_exact) <= 1e-4;
  report(2, "hand oracles", pass,
         fmt("energy %.15g, double integral %.15g, LP %.6f", energy, di, lp) + (ext ? ", extension exact" : ", extension WRONG"));
}

void degeneracy() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> log_scale(-1.5, 1.5);
  double worst = 0.0;
  int n = 0;
  for (int K : {2, 3}) {
    for (double lambda2 : {0.0, 1.0, -1.0}) {
      const auto P = make_tree_params(K, 0.8, 2.0, lambda2, 5);
      for (double p : {1.5, 2.0}) {
        for (int i = 0; i < 9; ++i, ++n) {
          const auto f = uniform_f(K, 5, rng).scaled(std::exp(log_scale(rng)));
          const EnergyParams e{0.4, p, lambda2, lambda2};
          const double M = dyadic_orlicz_modular(P, f, e, YoungPhi(p, 0.0));
          const double E = dyadic_energy(P, f, e);
          worst = std::max(worst, std::abs(M - E) / E);
        }
      }
    }
  }
  report(3, "lambda1 = 0 degeneracy", worst <= 1e-12 && n >= 100, fmt("worst relative gap %.3g over %.0f functions", worst, n));
}

void quadrature() {
  double worst = 0.0;
  for (double beta : {2 * ln2, 2.0, 3.5}) {
    const auto P = make_tree_params(2, ln2, beta, 0.0, 11);
    for (int n = 0; n <= 10; ++n) {
      const double exact = (std::exp(-beta * n) - std::exp(-beta * (n + 1))) / beta;
      worst = std::max(worst, std::abs(edge_measure(P, n, 0.0) - exact) / exact);
    }
  }
  report(4, "edge quadrature", worst <= 1e-12, fmt("worst relative error %.3g for n = 0..10", worst));
}

void ahlfors() {
  double worst = 0.0;
  std::size_t checked = 0;
  bool pass = true;
  for (int K : {2, 3}) {
    for (double eps : {ln2, 0.9}) {
      ExperimentConfig c;
      c.K = K;
      c.epsilon = eps;
      c.beta = std::log(static_cast<double>(K)) + 0.5 * eps;
      c.depths = {1, 2, 3, 4, 5, 6, 7, 8};
      const auto r = verify_ahlfors(c);
      pass = pass && r.pass;
      worst = std::max(worst, r.worst);
      checked += r.checked;
    }
  }
  report(5, "Ahlfors constancy", pass, fmt("worst relative deviation %.3g over %.0f cells", worst, double(checked)));
}

void doubling() {
  double worst = 0.0;
  bool pass = true;
  struct Geometry {
    int K;
    double eps, beta, lambda2;
  };
  for (const Geometry& g : {Geometry{2, ln2, 2 * ln2, 0.0}, Geometry{2, ln2, 2 * ln2, 1.0}, Geometry{2, ln2, 2 * ln2, -1.0},
                            Geometry{2, ln2, 2.5, 0.0}, Geometry{3, 0.9, 2.0, 0.0}, Geometry{3, 0.9, 2.0, 1.0}}) {
    ExperimentConfig c;
    c.K = g.K;
    c.epsilon = g.eps;
    c.beta = g.beta;
    c.lambda2 = g.lambda2;
    c.seeds = {7};
    c.depths = {4, 5, 6};
    const auto r = verify_doubling(c, 1.5);
    pass = pass && r.pass;
    worst = std::max(worst, r.worst);
  }
  report(6, "doubling stability", pass, fmt("worst sup ratio spread between N and N+2: %.4f (limit 1.5)", worst));
}

ExperimentConfig equivalence_config(double p, double lambda1) {
  ExperimentConfig c;
  c.p = p;
  c.beta = p == 1.0 ? 1.5 * ln2 : 2 * ln2;
  c.lambda1 = lambda1;
  c.families = {Family::iid_uniform, Family::cell_indicator, Family::lacunary};
  c.seeds = seed_range(1, 34);
  c.depths = {4, 5, 6, 7};
  return c;
}

void norm_equivalence() {
  auto c = equivalence_config(2.0, 0.0);
  c.hajlasz_max_depth = 0;
  const auto r = verify_equivalences(c).double_integral;
  const bool enough = r.rows.size() >= 100 * c.depths.size();
  report(7, "double integral vs dyadic", r.pass && enough,
         fmt("slope %.4f, max/min %.3f, %.0f rows", r.slope, r.max / r.min, double(r.rows.size())));
}

void trace_extension() {
  struct Case {
    const char* name;
    double p, lambda1;
  };
  bool all = true;
  std::string detail;
  for (const Case& k : {Case{"t^2", 2.0, 0.0}, Case{"t^2 log", 2.0, 1.0}, Case{"t^2/log", 2.0, -1.0}, Case{"t log", 1.0, 1.0}}) {
    ExperimentConfig c;
    c.p = k.p;
    c.beta = k.p == 1.0 ? 1.5 * ln2 : 2 * ln2;
    c.lambda1 = k.lambda1;
    c.lambda2 = 0.0;
    c.seeds = seed_range(1, 30);
    c.depths = {4, 5, 6, 7, 8};
    c.families = {Family::extension_of_boundary, Family::random_vertex};
    const auto t = verify_trace_bound(c);
    c.families = {Family::iid_uniform, Family::lacunary, Family::cell_indicator};
    const auto e = verify_extension_bound(c);
    const bool pass = t.pass && e.bound.pass && e.energy_identity.pass;
    all = all && pass;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s%s[trace %.3f, ext %.3f, id %.3f]%s", detail.empty() ? "" : " ", k.name, t.slope,
                  e.bound.slope, e.energy_identity.slope, pass ? "" : "!");
    detail += buf;
  }
  report(8, "trace and extension bounds", all, "slopes " + detail);
}

void comparability() {
  bool all = true;
  std::string detail;
  for (double lambda1 : {-1.0, 1.0}) {
    auto c = equivalence_config(2.0, lambda1);
    c.hajlasz_max_depth = 0;
    const auto fit = verify_equivalences(c).fit;
    all = all && fit.pass && fit.fit_depth == 4;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%slambda1=%+.0f: C=%.3g C'=%.3g, %zu/%zu violations", detail.empty() ? "" : "; ", lambda1,
                  fit.C, fit.C_prime, fit.violations, fit.checked);
    detail += buf;
  }
  report(9, "two-sided energy fit", all, detail);
}

void hajlasz() {
  const int res = 40;
  std::size_t checked = 0, bad = 0;
  double worst = 0.0;  // (oracle - solver) / allowance
  for (double p : {1.0, 2.0}) {
    for (int N : {1, 2}) {
      const auto P = make_tree_params(2, ln2, 2 * ln2, 0.0, N);
      for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto f = boundary_sample(Family::iid_uniform, P, 0.5, seed);
        const auto inst = make_hajlasz_instance(P, f, 0.5, p);
        const auto sol = hajlasz_solve(inst);
        const double oracle = hajlasz_oracle(inst, res);
        const double allow = 2.0 * hajlasz_oracle_step_cost(inst, res);
        const bool ok = hajlasz_feasible(inst, sol.g) && sol.energy <= oracle + 1e-9 * (1.0 + oracle) &&
                        oracle - sol.energy <= allow;
        ++checked;
        if (!ok) ++bad;
        if (allow > 0.0) worst = std::max(worst, (oracle - sol.energy) / allow);
      }
    }
  }
  report(10, "Hajlasz solver vs oracle", bad == 0,
         fmt("%.0f instances, %.0f failures, worst gap %.3f of allowance", double(checked), double(bad), worst));
}

void gauge() {
  double worst_root = 0.0;
  const YoungPhi lg(2.0, 1.0), inv(2.0, -1.0), lin(1.0, 1.0);
  std::vector<std::function<double(double)>> rhos{
      [](double k) { return (3.0 / k) * (3.0 / k); },
      [](double k) { return 0.25 * std::pow(7.0 / k, 3.0); },
      [&](double k) { return lg(2.0 / k); },
      [&](double k) { return 0.5 * inv(1e-3 / k) + 0.5 * inv(40.0 / k); },
      [&](double k) { return 0.1 * lin(1e4 / k) + lin(0.5 / k); },
  };
  for (const auto& rho : rhos) worst_root = std::max(worst_root, std::abs(rho(luxemburg_gauge(rho, 1e-10)) - 1.0));
  const double closed = std::abs(luxemburg_gauge(rhos[0], 1e-12) - 3.0) / 3.0;

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> scale(-3.0, 3.0);
  double worst_hom = 0.0;
  for (const YoungPhi& phi : {YoungPhi(2.0, 0.0), lg, inv, lin}) {
    for (int i = 0; i < 25; ++i) {
      const auto f = uniform_f(2, 6, rng);
      const double c = std::pow(10.0, scale(rng));
      const double a = orlicz_norm(f.scaled(c), phi, 1e-13);
      const double b = c * orlicz_norm(f, phi, 1e-13);
      worst_hom = std::max(worst_hom, std::abs(a - b) / b);
    }
  }
  report(11, "gauge", worst_root <= 1e-9 && closed <= 1e-9 && worst_hom <= 1e-9,
         fmt("worst |rho(k*) - 1| %.3g, closed form %.3g, homogeneity %.3g", worst_root, closed, worst_hom));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{roundtrip,        hand_oracles,    degeneracy,    quadrature,
                                                    ahlfors,          doubling,        norm_equivalence,
                                                    trace_extension,  comparability,   hajlasz,       gauge};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i) + 1, "criterion", false, std::string("threw: ") + e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
