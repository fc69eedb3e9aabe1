#include "treetrace/young.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "treetrace/tree.hpp"

namespace treetrace {

YoungPhi::YoungPhi(double p, double lambda1) : p_(p), lambda1_(lambda1) {
  if (!std::isfinite(p) || !std::isfinite(lambda1)) throw InvalidArgument("Young function parameters must be finite");
  if (p < 1.0) throw InvalidArgument("Young function needs p >= 1");
  if (p == 1.0 && lambda1 < 0.0) throw InvalidArgument("p = 1 needs lambda1 >= 0");
}

double YoungPhi::operator()(double t) const {
  if (t == 0.0) return 0.0;
  const double power = p_ == 2.0 ? t * t : std::pow(t, p_);
  if (lambda1_ == 0.0) return power;
  return power * std::pow(std::log(std::numbers::e + t), lambda1_);
}

double phi_eval(const YoungPhi& phi, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("Phi is defined for t >= 0");
  return phi(t);
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw InvalidArgument("log_grid needs 0 < lo < hi and n >= 2");
  std::vector<double> grid(n);
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / (n - 1);
  for (int i = 0; i < n; ++i) grid[i] = std::exp(a + step * i);
  grid.back() = hi;
  return grid;
}

PhiDiagnostics phi_diagnostics(const YoungPhi& phi, std::span<const double> t_grid, double delta) {
  if (t_grid.size() < 3) throw InvalidArgument("diagnostic grid needs at least 3 points");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0) || (i > 0 && !(t_grid[i] > t_grid[i - 1]))) {
      throw InvalidArgument("diagnostic grid must be positive and increasing");
    }
  }
  if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");

  PhiDiagnostics d;
  d.delta = delta;
  // Convexity on every grid triple a < b < c: Phi(b) under the chord, and the
  // midpoint inequality on each consecutive pair.
  for (std::size_t i = 1; i + 1 < t_grid.size(); ++i) {
    const double a = t_grid[i - 1], b = t_grid[i], c = t_grid[i + 1];
    const double w = (c - b) / (c - a);
    const double chord = w * phi(a) + (1.0 - w) * phi(c);
    const double excess = (phi(b) - chord) / std::max(chord, std::numeric_limits<double>::min());
    d.worst_convexity_excess = std::max(d.worst_convexity_excess, excess);
    const double mid_mean = 0.5 * (phi(a) + phi(b));
    const double mid_excess = (phi(0.5 * (a + b)) - mid_mean) / std::max(mid_mean, std::numeric_limits<double>::min());
    d.worst_convexity_excess = std::max(d.worst_convexity_excess, mid_excess);
  }
  d.convex = d.worst_convexity_excess <= 1e-12;

  for (double t : t_grid) d.delta2_sup = std::max(d.delta2_sup, phi(2.0 * t) / phi(t));

  const double lower_exp = std::max(phi.p() - delta, 1.0);
  const double upper_exp = phi.p() + delta;
  for (double T = 1.0; T <= 1e6 && !d.sandwich_found; T *= 10.0) {
    for (double k = 1.0; k <= 1048576.0; k *= 2.0) {
      bool ok = true;
      for (double t : t_grid) {
        if (t < T) continue;
        if (std::pow(t, lower_exp) > phi(k * t) || phi(t) > std::pow(k * t, upper_exp)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        d.sandwich_found = true;
        d.sandwich_k = k;
        d.sandwich_T = T;
        break;
      }
    }
  }
  return d;
}

namespace {

double checked(const ModularFunction& rho, double k) {
  const double r = rho(k);
  if (std::isnan(r)) throw GaugeError("modular returned NaN");
  if (r < 0.0) throw GaugeError("modular returned a negative value");
  return r;
}

void require_order(double r_small_k, double r_large_k) {
  // Allow rounding noise from reassociated sums.
  if (r_large_k > r_small_k * (1.0 + 1e-9) + 1e-300) throw GaugeError("modular is not non-increasing in k");
}

}  // namespace

double luxemburg_gauge(const ModularFunction& rho, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("gauge tolerance must be positive");
  constexpr int kMaxDoublings = 200;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  double lo = 1.0, hi = 1.0;
  double r_lo = checked(rho, 1.0), r_hi = r_lo;
  if (std::abs(r_lo - 1.0) <= tol) return 1.0;

  if (r_lo > 1.0) {
    bool bracketed = false;
    for (int i = 0; i < kMaxDoublings; ++i) {
      const double k = hi * 2.0;
      const double r = checked(rho, k);
      if (std::isfinite(r_hi)) require_order(r_hi, r);
      if (r <= 1.0) {
        lo = hi;
        r_lo = r_hi;
        hi = k;
        r_hi = r;
        bracketed = true;
        break;
      }
      hi = k;
      r_hi = r;
    }
    if (!bracketed) {
      if (std::isinf(r_hi)) return kInf;
      throw GaugeError("could not bracket the gauge within 200 doublings");
    }
  } else {
    bool bracketed = false;
    while (lo > std::numeric_limits<double>::min()) {
      const double k = lo * 0.5;
      const double r = checked(rho, k);
      require_order(r, r_lo);
      if (r > 1.0) {
        hi = lo;
        r_hi = r_lo;
        lo = k;
        r_lo = r;
        bracketed = true;
        break;
      }
      lo = k;
      r_lo = r;
    }
    if (!bracketed) {
      if (r_lo == 0.0) return 0.0;
      throw GaugeError("modular stays below 1 for all sampled k");
    }
  }

  for (int iter = 0; iter < 400; ++iter) {
    const double mid = std::sqrt(lo) * std::sqrt(hi);
    if (!(mid > lo && mid < hi)) break;
    const double r = checked(rho, mid);
    require_order(r_lo, r);
    require_order(r, r_hi);
    if (std::abs(r - 1.0) <= tol) return mid;
    if (r > 1.0) {
      lo = mid;
      r_lo = r;
    } else {
      hi = mid;
      r_hi = r;
    }
  }
  return hi;
}

}  // namespace treetrace
