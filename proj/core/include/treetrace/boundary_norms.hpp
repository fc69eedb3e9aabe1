#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "treetrace/boundary.hpp"
#include "treetrace/tree.hpp"
#include "treetrace/young.hpp"

namespace treetrace {

/// Piecewise-constant function on the K^depth leaf cells, stored in
/// lexicographic digit order of the leaf addresses.
class BoundaryFunction {
 public:
  BoundaryFunction(int K, int depth, std::vector<double> values);
  static BoundaryFunction constant(int K, int depth, double c);

  int K() const { return K_; }
  int depth() const { return depth_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  BoundaryFunction scaled(double c) const;
  BoundaryFunction plus(const BoundaryFunction& other) const;

 private:
  int K_;
  int depth_;
  std::vector<double> values_;
};

/// Cell averages for every level 0..depth, computed bottom-up in one pass.
/// levels[n][i] is the mean over the i-th level-n cell.
struct CellAverages {
  std::vector<std::vector<double>> levels;

  explicit CellAverages(const BoundaryFunction& f);
};

double cell_average(const BoundaryFunction& f, const DyadicCell& cell);

double lp_norm(const BoundaryFunction& f, double p);
double orlicz_norm(const BoundaryFunction& f, const YoungPhi& phi, double tol = 1e-10);

/// Exponents of the dyadic energies. `lambda` weights the L^p energy,
/// `lambda2` the Orlicz modular.
struct EnergyParams {
  double theta;
  double p;
  double lambda = 0.0;
  double lambda2 = 0.0;

  void validate() const;
};

/// sum_n e^{eps n theta p} n^lambda sum_{I in level n} nu(I) |f_I - f_parent(I)|^p.
double dyadic_energy(const TreeParams& params, const BoundaryFunction& f, const EnergyParams& energy);
double dyadic_energy(const TreeParams& params, const CellAverages& averages, const EnergyParams& energy);

/// sum_n e^{eps n (theta-1) p} n^lambda2 sum_I nu(I) Phi(|f_I - f_parent(I)| / e^{-eps n}).
double dyadic_orlicz_modular(const TreeParams& params, const BoundaryFunction& f, const EnergyParams& energy,
                             const YoungPhi& phi);
/// Same modular evaluated on f/k given the averages of f.
double dyadic_orlicz_modular(const TreeParams& params, const CellAverages& averages, const EnergyParams& energy,
                             const YoungPhi& phi, double k = 1.0);

/// ||f||_{L^Phi} + inf{k > 0 : modular(f/k) <= 1}.
double orlicz_besov_norm(const TreeParams& params, const BoundaryFunction& f, const EnergyParams& energy,
                         const YoungPhi& phi, double tol = 1e-10);

/// Fraction of level-n cells whose jump |f_I - f_parent| exceeds e^{-eps n (theta+1)/2}.
std::vector<double> jump_threshold_fractions(const TreeParams& params, const BoundaryFunction& f, double theta);

enum class IntegralMode { exact, montecarlo };

struct DoubleIntegralOptions {
  IntegralMode mode = IntegralMode::exact;
  std::uint64_t pair_budget = 16384;  // max K^{2N} ordered pairs for exact mode
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
};

struct DoubleIntegralResult {
  double value = 0.0;
  double std_error = 0.0;  // zero in exact mode
};

/// Double-integral Besov energy with nu(B(zeta, d)) taken as the measure of
/// the split-level cell containing zeta.
DoubleIntegralResult double_integral_energy(const TreeParams& params, const BoundaryFunction& f, double theta,
                                            double p, const DoubleIntegralOptions& options = {});

/// CSV: a "K,N" header line, the two values, then one "address,value" row per leaf.
void write_boundary_csv(std::ostream& out, const BoundaryFunction& f);
BoundaryFunction read_boundary_csv(std::istream& in);

}  // namespace treetrace
