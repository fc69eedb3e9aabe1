#include "treetrace/hajlasz.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

namespace treetrace {

int dyadic_scale(double d) {
  if (!(d > 0.0) || !std::isfinite(d)) throw InvalidArgument("distance must be positive and finite");
  int e = 0;
  std::frexp(d, &e);  // d = m 2^e with m in [1/2, 1), so 2^{e-1} <= d < 2^e
  return -e;
}

HajlaszInstance make_hajlasz_instance(const TreeParams& params, BoundaryFunction f, double theta, double p) {
  if (params.K() != f.K()) throw InvalidArgument("function and tree parameters disagree on K");
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("theta must lie in (0, 1)");
  if (!(p >= 1.0)) throw InvalidArgument("Hajlasz energy needs p >= 1");
  if (f.depth() < 1) throw InvalidArgument("Hajlasz instance needs depth >= 1");

  const int N = f.depth();
  const int K = f.K();
  HajlaszInstance inst{std::move(f), theta, p, {}, {}, {}, {}};
  std::map<int, int> index_of_scale;
  for (int j = 0; j < N; ++j) {
    const double d = split_distance(params, j);
    const int k = dyadic_scale(d);
    auto [it, inserted] = index_of_scale.try_emplace(k, static_cast<int>(inst.scales.size()));
    if (inserted) inst.scales.push_back(k);
    inst.scale_of_split.push_back(it->second);
    inst.split_distances.push_back(d);
  }
  inst.constraints.resize(inst.scales.size());

  const auto leaves = static_cast<std::uint32_t>(inst.f.size());
  const auto vals = inst.f.values();
  for (std::uint32_t a = 0; a < leaves; ++a) {
    for (std::uint32_t b = a + 1; b < leaves; ++b) {
      const double jump = std::abs(vals[a] - vals[b]);
      if (jump == 0.0) continue;
      std::uint32_t width = leaves / K;
      int j = 0;
      while (a / width == b / width) {
        ++j;
        width /= K;
      }
      const double demand = jump / std::pow(inst.split_distances[j], theta);
      inst.constraints[inst.scale_of_split[j]].push_back({a, b, demand});
    }
  }
  return inst;
}

namespace {

void require_shape(const HajlaszInstance& inst, const HajlaszGradient& g) {
  if (g.size() != inst.scales.size()) throw InvalidArgument("gradient needs one array per scale");
  for (const auto& row : g) {
    if (row.size() != inst.f.size()) throw InvalidArgument("gradient arrays need one value per leaf");
    for (double v : row) {
      if (!(v >= 0.0)) throw InvalidArgument("Hajlasz gradients must be nonnegative");
    }
  }
}

double pow_p(double x, double p) {
  if (p == 1.0) return x;
  if (p == 2.0) return x * x;
  return std::pow(x, p);
}

}  // namespace

bool hajlasz_feasible(const HajlaszInstance& inst, const HajlaszGradient& g) {
  require_shape(inst, g);
  const auto vals = inst.f.values();
  const auto leaves = static_cast<std::uint32_t>(inst.f.size());
  const int K = inst.f.K();
  for (std::uint32_t a = 0; a < leaves; ++a) {
    for (std::uint32_t b = a + 1; b < leaves; ++b) {
      std::uint32_t width = leaves / K;
      int j = 0;
      while (a / width == b / width) {
        ++j;
        width /= K;
      }
      const int s = inst.scale_of_split[j];
      const double bound = std::pow(inst.split_distances[j], inst.theta) * (g[s][a] + g[s][b]);
      if (std::abs(vals[a] - vals[b]) > bound * (1.0 + 1e-12)) return false;
    }
  }
  return true;
}

double hajlasz_objective(const HajlaszInstance& inst, const HajlaszGradient& g) {
  require_shape(inst, g);
  double total = 0.0;
  for (const auto& row : g)
    for (double v : row) total += pow_p(v, inst.p);
  return total * inst.leaf_measure();
}

namespace {

// Raise endpoints of violated constraints; values only grow, so one pass suffices.
void repair(const std::vector<HajlaszConstraint>& cons, std::vector<double>& x) {
  for (const auto& c : cons) {
    const double deficit = c.demand - x[c.a] - x[c.b];
    if (deficit > 0.0) {
      x[c.a] += 0.5 * deficit;
      x[c.b] += 0.5 * deficit;
    }
  }
  for (const auto& c : cons) {
    // Absorb rounding in the halves.
    const double deficit = c.demand - x[c.a] - x[c.b];
    if (deficit > 0.0) x[c.a] += deficit;
  }
}

struct ScaleResult {
  std::vector<double> x;
  double energy = 0.0;
  double lower = 0.0;
  std::int64_t iterations = 0;
};

// p = 1: max sum c_e y_e s.t. sum_{e at v} y_e <= nu, y >= 0, by the primal
// simplex from the slack basis. The leaf values are the slack shadow prices.
ScaleResult solve_linear(const std::vector<HajlaszConstraint>& cons, std::size_t leaves, double nu,
                         std::int64_t max_pivots) {
  ScaleResult out;
  out.x.assign(leaves, 0.0);
  if (cons.empty()) return out;

  std::vector<int> row_of(leaves, -1);
  std::vector<std::uint32_t> leaf_of_row;
  for (const auto& c : cons) {
    for (auto v : {c.a, c.b}) {
      if (row_of[v] < 0) {
        row_of[v] = static_cast<int>(leaf_of_row.size());
        leaf_of_row.push_back(v);
      }
    }
  }
  const std::size_t rows = leaf_of_row.size();
  const std::size_t m = cons.size();
  const std::size_t cols = m + rows + 1;  // structural, slack, rhs
  const std::size_t rhs = cols - 1;
  std::vector<double> T((rows + 1) * cols, 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return T[r * cols + c]; };
  double cmax = 0.0;
  for (std::size_t e = 0; e < m; ++e) {
    at(row_of[cons[e].a], e) = 1.0;
    at(row_of[cons[e].b], e) = 1.0;
    at(rows, e) = -cons[e].demand;
    cmax = std::max(cmax, cons[e].demand);
  }
  for (std::size_t r = 0; r < rows; ++r) {
    at(r, m + r) = 1.0;
    at(r, rhs) = nu;
  }
  std::vector<std::size_t> basis(rows);
  for (std::size_t r = 0; r < rows; ++r) basis[r] = m + r;

  const double tol = 1e-12 * std::max(cmax, 1.0);
  int degenerate_run = 0;
  std::int64_t pivots = 0;
  for (;; ++pivots) {
    if (pivots >= max_pivots) throw SolverError("simplex did not converge within the pivot cap");
    const bool bland = degenerate_run > 50;
    std::size_t enter = cols;
    double best = -tol;
    for (std::size_t c = 0; c < rhs; ++c) {
      const double rc = at(rows, c);
      if (rc < best) {
        enter = c;
        if (bland) break;
        best = rc;
      }
    }
    if (enter == cols) break;
    std::size_t leave = rows;
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < rows; ++r) {
      const double a = at(r, enter);
      if (a <= 1e-12) continue;
      const double q = at(r, rhs) / a;
      if (q < ratio - 1e-15 || (q <= ratio + 1e-15 && leave < rows && basis[r] < basis[leave])) {
        ratio = q;
        leave = r;
      }
    }
    if (leave == rows) throw SolverError("dual program unbounded; the constraint data are inconsistent");
    degenerate_run = ratio <= 1e-15 ? degenerate_run + 1 : 0;

    const double piv = at(leave, enter);
    for (std::size_t c = 0; c < cols; ++c) at(leave, c) /= piv;
    for (std::size_t r = 0; r <= rows; ++r) {
      if (r == leave) continue;
      const double factor = at(r, enter);
      if (factor == 0.0) continue;
      for (std::size_t c = 0; c < cols; ++c) at(r, c) -= factor * at(leave, c);
    }
    basis[leave] = enter;
  }

  for (std::size_t r = 0; r < rows; ++r) out.x[leaf_of_row[r]] = std::max(0.0, at(rows, m + r));
  out.lower = at(rows, rhs);
  repair(cons, out.x);
  for (double v : out.x) out.energy += v;
  out.energy *= nu;
  out.iterations = pivots;
  return out;
}

// p > 1: cyclic coordinate ascent on the concave dual
//   D(y) = sum c_e y_e + (1 - p) sum nu x_v^p,  x_v = (Y_v / (p nu))^{1/(p-1)},
// where Y_v sums y_e over constraints touching v.
ScaleResult solve_smooth(const std::vector<HajlaszConstraint>& cons, std::size_t leaves, double nu, double p,
                         const HajlaszSolverConfig& config) {
  ScaleResult out;
  out.x.assign(leaves, 0.0);
  if (cons.empty()) return out;

  const double q = 1.0 / (p - 1.0);
  const double pnu = p * nu;
  auto x_of = [&](double Y) { return Y <= 0.0 ? 0.0 : (p == 2.0 ? Y / pnu : std::pow(Y / pnu, q)); };

  // Symmetric feasible start for the primal bound.
  double dmax = 0.0;
  for (const auto& c : cons) dmax = std::max(dmax, c.demand);
  std::vector<double> best_x(leaves, 0.0);
  std::vector<bool> touched(leaves, false);
  for (const auto& c : cons) touched[c.a] = touched[c.b] = true;
  double best_primal = 0.0;
  for (std::size_t v = 0; v < leaves; ++v) {
    if (touched[v]) {
      best_x[v] = 0.5 * dmax;
      best_primal += nu * pow_p(best_x[v], p);
    }
  }

  std::vector<double> y(cons.size(), 0.0);
  std::vector<double> Y(leaves, 0.0);
  std::vector<double> trial(leaves);
  double lower = 0.0;

  for (std::int64_t sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    for (std::size_t e = 0; e < cons.size(); ++e) {
      const auto& c = cons[e];
      const double Ya = Y[c.a], Yb = Y[c.b];
      auto excess = [&](double delta) { return x_of(Ya + delta) + x_of(Yb + delta) - c.demand; };
      double delta;
      if (excess(-y[e]) >= 0.0) {
        delta = -y[e];
      } else if (p == 2.0) {
        // Closed form, both leaves carry the same nu.
        delta = std::max(-y[e], 0.5 * (pnu * c.demand - Ya - Yb));
      } else {
        double lo = -y[e];
        double hi = pnu * std::pow(c.demand, p - 1.0) - std::min(Ya, Yb);
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
          const double mid = 0.5 * (lo + hi);
          (excess(mid) < 0.0 ? lo : hi) = mid;
        }
        delta = hi;
      }
      y[e] += delta;
      Y[c.a] += delta;
      Y[c.b] += delta;
    }

    double dual = 0.0;
    for (std::size_t e = 0; e < cons.size(); ++e) dual += cons[e].demand * y[e];
    for (std::size_t v = 0; v < leaves; ++v) {
      trial[v] = x_of(Y[v]);
      dual += (1.0 - p) * nu * pow_p(trial[v], p);
    }
    lower = std::max(lower, dual);
    repair(cons, trial);
    double primal = 0.0;
    for (double v : trial) primal += nu * pow_p(v, p);
    if (primal < best_primal) {
      best_primal = primal;
      best_x = trial;
    }
    out.iterations = sweep;
    if (best_primal - lower <= config.relative_gap * best_primal) {
      out.x = std::move(best_x);
      out.energy = best_primal;
      out.lower = lower;
      return out;
    }
  }
  throw SolverError("Hajlasz dual ascent did not reach the requested gap within the sweep cap");
}

}  // namespace

HajlaszSolution hajlasz_solve(const HajlaszInstance& inst, const HajlaszSolverConfig& config) {
  HajlaszSolution sol;
  const std::size_t leaves = inst.f.size();
  const double nu = inst.leaf_measure();
  for (const auto& cons : inst.constraints) {
    ScaleResult r = inst.p == 1.0 ? solve_linear(cons, leaves, nu, config.max_pivots)
                                  : solve_smooth(cons, leaves, nu, inst.p, config);
    sol.energy += r.energy;
    sol.lower_bound += r.lower;
    sol.iterations += r.iterations;
    sol.g.push_back(std::move(r.x));
  }
  return sol;
}

double hajlasz_energy(const HajlaszInstance& inst, const HajlaszSolverConfig& config) {
  return hajlasz_solve(inst, config).energy;
}

namespace {

double oracle_gmax(const HajlaszInstance& inst) {
  const auto vals = inst.f.values();
  const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
  double dmin = std::numeric_limits<double>::infinity();
  for (double d : inst.split_distances) dmin = std::min(dmin, d);
  return (*hi - *lo) * std::pow(dmin, -inst.theta);
}

std::vector<std::uint32_t> involved_leaves(const std::vector<HajlaszConstraint>& cons) {
  std::vector<std::uint32_t> v;
  for (const auto& c : cons) {
    v.push_back(c.a);
    v.push_back(c.b);
  }
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

double hajlasz_oracle_spacing(const HajlaszInstance& inst, int resolution) {
  if (resolution < 1) throw InvalidArgument("oracle resolution must be >= 1");
  return oracle_gmax(inst) / resolution;
}

double hajlasz_oracle_step_cost(const HajlaszInstance& inst, int resolution) {
  const double h = hajlasz_oracle_spacing(inst, resolution);
  const double gmax = oracle_gmax(inst);
  double vars = 0.0;
  for (const auto& cons : inst.constraints) vars += static_cast<double>(involved_leaves(cons).size());
  return vars * inst.leaf_measure() * inst.p * std::pow(gmax, inst.p - 1.0) * h;
}

double hajlasz_oracle(const HajlaszInstance& inst, int resolution) {
  if (inst.f.size() > 8) throw InvalidArgument("oracle needs K^N <= 8");
  if (inst.scales.size() > 3) throw InvalidArgument("oracle needs at most 3 scales");
  const double h = hajlasz_oracle_spacing(inst, resolution);
  const double nu = inst.leaf_measure();

  std::vector<double> cost(resolution + 1);
  for (int i = 0; i <= resolution; ++i) cost[i] = nu * pow_p(i * h, inst.p);

  double total = 0.0;
  for (const auto& cons : inst.constraints) {
    if (cons.empty()) continue;
    const auto leaves = involved_leaves(cons);
    const std::size_t L = leaves.size();
    if (std::pow(resolution + 1.0, static_cast<double>(L)) > 5e8) {
      throw InvalidArgument("oracle grid too large; lower the resolution");
    }
    // Constraints in local leaf indices.
    std::vector<std::array<std::size_t, 2>> local;
    for (const auto& c : cons) {
      local.push_back({static_cast<std::size_t>(std::lower_bound(leaves.begin(), leaves.end(), c.a) - leaves.begin()),
                       static_cast<std::size_t>(std::lower_bound(leaves.begin(), leaves.end(), c.b) - leaves.begin())});
    }
    std::vector<int> idx(L, 0);
    double best = std::numeric_limits<double>::infinity();
    for (;;) {
      double obj = 0.0;
      for (int i : idx) obj += cost[i];
      if (obj < best) {
        bool ok = true;
        for (std::size_t e = 0; e < cons.size() && ok; ++e) {
          ok = (idx[local[e][0]] + idx[local[e][1]]) * h >= cons[e].demand * (1.0 - 1e-12);
        }
        if (ok) best = obj;
      }
      std::size_t pos = 0;
      while (pos < L && ++idx[pos] > resolution) idx[pos++] = 0;
      if (pos == L) break;
    }
    total += best;
  }
  return total;
}

}  // namespace treetrace
