#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace treetrace {

/// Phi(t) = t^p log^lambda1(e + t), admissible for p > 1 with any lambda1,
/// or p = 1 with lambda1 >= 0.
class YoungPhi {
 public:
  YoungPhi(double p, double lambda1);

  double p() const { return p_; }
  double lambda1() const { return lambda1_; }

  /// Unchecked evaluation for t >= 0.
  double operator()(double t) const;

 private:
  double p_;
  double lambda1_;
};

/// Checked evaluation; rejects negative t.
double phi_eval(const YoungPhi& phi, double t);

struct PhiDiagnostics {
  bool convex = true;
  double worst_convexity_excess = 0.0;  // max of Phi(mid) - mean(Phi(a), Phi(b)), relative
  double delta2_sup = 0.0;              // sup Phi(2t)/Phi(t) over the grid
  double delta = 0.0;
  bool sandwich_found = false;
  double sandwich_k = 0.0;
  double sandwich_T = 0.0;
};

/// Log-spaced grid of n points on [lo, hi].
std::vector<double> log_grid(double lo, double hi, int n);

/// Sampled convexity, doubling constant and power sandwich
/// t^max(p-delta,1) <= Phi(kt), Phi(t) <= (kt)^(p+delta) for t >= T.
PhiDiagnostics phi_diagnostics(const YoungPhi& phi, std::span<const double> t_grid, double delta = 0.5);

/// k -> rho(k), non-increasing on (0, inf).
using ModularFunction = std::function<double(double)>;

class GaugeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// inf{k > 0 : rho(k) <= 1} by geometric bracketing from k = 1 and bisection.
///
/// Returns 0 for rho == 0 and +infinity when rho is infinite everywhere.
/// Bisection stops once |rho(k) - 1| <= tol or the bracket is exhausted at
/// machine precision, in which case the upper end (rho <= 1) is returned.
/// Throws GaugeError on detected non-monotonicity, NaN, or when no bracket is
/// found within 200 doublings.
double luxemburg_gauge(const ModularFunction& rho, double tol = 1e-10);

}  // namespace treetrace
