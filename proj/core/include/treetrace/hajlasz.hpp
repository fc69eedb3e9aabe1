#pragma once

#include <cstdint>
#include <vector>

#include "treetrace/boundary_norms.hpp"
#include "treetrace/tree.hpp"

namespace treetrace {

/// One pairwise condition g_k(a) + g_k(b) >= demand, with
/// demand = |f_a - f_b| / d(a, b)^theta. Stored once per unordered pair.
struct HajlaszConstraint {
  std::uint32_t a;
  std::uint32_t b;
  double demand;
};

/// Finite-resolution fractional Hajlasz problem for a boundary function.
///
/// Leaves split at level j sit at distance d_j = 2/eps e^{-eps j}, which falls
/// in the dyadic annulus 2^{-k-1} <= d_j < 2^{-k} of exactly one integer k.
/// Only occupied k get gradient arrays.
struct HajlaszInstance {
  BoundaryFunction f;
  double theta;
  double p;
  std::vector<int> scales;                               // distinct k, ordered by first split level
  std::vector<int> scale_of_split;                       // split level j -> index into scales
  std::vector<double> split_distances;                   // d_j
  std::vector<std::vector<HajlaszConstraint>> constraints;  // per scale index, zero demands dropped

  double leaf_measure() const { return 1.0 / static_cast<double>(f.size()); }
};

/// The integer k with 2^{-k-1} <= d < 2^{-k}.
int dyadic_scale(double d);

HajlaszInstance make_hajlasz_instance(const TreeParams& params, BoundaryFunction f, double theta, double p);

/// g[s][leaf]: gradient value for scale index s at a leaf.
using HajlaszGradient = std::vector<std::vector<double>>;

/// True iff |f_a - f_b| <= d^theta (g_k(a) + g_k(b)) for all distinct leaves
/// (up to 1e-12 relative rounding slack). Rejects negative entries.
bool hajlasz_feasible(const HajlaszInstance& inst, const HajlaszGradient& g);

/// sum_k sum_leaves nu(leaf) g_k(leaf)^p.
double hajlasz_objective(const HajlaszInstance& inst, const HajlaszGradient& g);

struct HajlaszSolverConfig {
  double relative_gap = 1e-9;      // stop once (primal - dual) <= gap * primal
  std::int64_t max_sweeps = 200000;  // dual coordinate-ascent sweeps (p > 1)
  std::int64_t max_pivots = 1000000; // simplex pivots (p = 1)
};

struct HajlaszSolution {
  double energy = 0.0;       // objective at the returned feasible g
  double lower_bound = 0.0;  // dual bound; energy - lower_bound certifies optimality
  HajlaszGradient g;
  std::int64_t iterations = 0;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Minimizes the objective over feasible g. p = 1 is solved exactly as a
/// linear program (simplex on the dual); p > 1 by cyclic dual coordinate
/// ascent with a duality-gap stopping rule. The returned g is always feasible.
HajlaszSolution hajlasz_solve(const HajlaszInstance& inst, const HajlaszSolverConfig& config = {});

double hajlasz_energy(const HajlaszInstance& inst, const HajlaszSolverConfig& config = {});

/// Exhaustive grid search over g in {0, h, ..., g_max}^(scales x leaves) with
/// h = g_max / resolution. Scales are searched independently since neither
/// objective nor constraints couple them. Needs K^N <= 8 and at most 3 scales.
double hajlasz_oracle(const HajlaszInstance& inst, int resolution);

/// Grid step h used by the oracle.
double hajlasz_oracle_spacing(const HajlaszInstance& inst, int resolution);

/// Objective change caused by moving every variable one grid step: the
/// bound on how far the oracle's grid minimum can sit above the infimum.
double hajlasz_oracle_step_cost(const HajlaszInstance& inst, int resolution);

}  // namespace treetrace
