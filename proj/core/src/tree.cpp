#include "treetrace/tree.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace treetrace {

GaussRule::GaussRule(int order) {
  if (order < 2) throw InvalidArgument("quadrature order must be >= 2");
  const int n = order;
  nodes_.assign(n, 0.0);
  weights_.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double step = p1 / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    nodes_[i] = -z;
    nodes_[n - 1 - i] = z;
    weights_[i] = weights_[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

double TreeParams::Q() const { return std::log(static_cast<double>(K_)) / epsilon_; }

double TreeParams::theta(double p) const {
  return 1.0 - (beta_ - std::log(static_cast<double>(K_))) / (epsilon_ * p);
}

double TreeParams::minimal_C(int K, double epsilon, double beta, double lambda2) {
  const double gap = beta - std::log(static_cast<double>(K));
  return std::max(2.0 * std::abs(lambda2) / gap, 2.0 * std::log(4.0) / epsilon);
}

TreeParams TreeParams::with_depth(int depth) const {
  if (depth < 1) throw InvalidArgument("depth must be >= 1");
  TreeParams copy = *this;
  copy.depth_ = depth;
  return copy;
}

TreeParams make_tree_params(int K, double epsilon, double beta, double lambda2, int depth,
                            int quad_order, std::optional<double> C_const) {
  if (K < 2) throw InvalidArgument("K must be >= 2");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  if (!(beta > std::log(static_cast<double>(K)))) throw InvalidArgument("beta must exceed log K");
  if (!std::isfinite(lambda2)) throw InvalidArgument("lambda2 must be finite");
  if (depth < 1) throw InvalidArgument("depth must be >= 1");
  if (quad_order < 2) throw InvalidArgument("quad_order must be >= 2");
  const double c_min = TreeParams::minimal_C(K, epsilon, beta, lambda2);
  if (C_const && !(*C_const >= c_min)) {
    throw InvalidArgument("C must be >= max{2|lambda2|/(beta - log K), 2 log 4 / epsilon}");
  }
  TreeParams params;
  params.K_ = K;
  params.epsilon_ = epsilon;
  params.beta_ = beta;
  params.lambda2_ = lambda2;
  params.C_ = C_const.value_or(c_min);
  params.depth_ = depth;
  params.rule_ = GaussRule(quad_order);
  return params;
}

std::uint64_t VertexAddress::index(int K) const {
  std::uint64_t idx = 0;
  for (int d : digits) idx = idx * static_cast<std::uint64_t>(K) + static_cast<std::uint64_t>(d);
  return idx;
}

VertexAddress VertexAddress::from_index(std::uint64_t index, int level, int K) {
  VertexAddress x;
  x.digits.assign(level, 0);
  for (int i = level - 1; i >= 0; --i) {
    x.digits[i] = static_cast<int>(index % static_cast<std::uint64_t>(K));
    index /= static_cast<std::uint64_t>(K);
  }
  if (index != 0) throw InvalidArgument("vertex index out of range for level");
  return x;
}

namespace {

constexpr std::string_view kDigitChars = "0123456789abcdefghijklmnopqrstuvwxyz";

}  // namespace

std::string VertexAddress::to_string() const {
  std::string out;
  out.reserve(digits.size());
  for (int d : digits) {
    if (d < 0 || d >= static_cast<int>(kDigitChars.size())) throw InvalidArgument("digit not representable");
    out.push_back(kDigitChars[d]);
  }
  return out;
}

VertexAddress VertexAddress::parse(std::string_view text, int K) {
  VertexAddress x;
  x.digits.reserve(text.size());
  for (char c : text) {
    const auto pos = kDigitChars.find(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (pos == std::string_view::npos || static_cast<int>(pos) >= K) {
      throw InvalidArgument("invalid digit '" + std::string(1, c) + "' in address");
    }
    x.digits.push_back(static_cast<int>(pos));
  }
  return x;
}

void validate_address(const TreeParams& params, const VertexAddress& x) {
  if (x.level() > params.depth()) throw InvalidArgument("address deeper than truncation depth");
  for (int d : x.digits) {
    if (d < 0 || d >= params.K()) throw InvalidArgument("address digit outside [0, K)");
  }
}

namespace {

// s(b) - s(a) for heights a <= b.
double arclength_between(double epsilon, double a, double b) {
  return std::exp(-epsilon * a) * -std::expm1(-epsilon * (b - a)) / epsilon;
}

}  // namespace

double edge_length(const TreeParams& params, int n) {
  if (n < 0 || n >= params.depth()) throw InvalidArgument("edge level out of range");
  return arclength_between(params.epsilon(), n, n + 1.0);
}

double arclength_at(const TreeParams& params, double tau) {
  return -std::expm1(-params.epsilon() * tau) / params.epsilon();
}

double height_at_arclength(const TreeParams& params, double sigma) {
  const double x = params.epsilon() * sigma;
  if (x >= 1.0) return std::numeric_limits<double>::infinity();
  return -std::log1p(-x) / params.epsilon();
}

double vertex_distance(const TreeParams& params, const VertexAddress& x, const VertexAddress& y) {
  validate_address(params, x);
  validate_address(params, y);
  const auto common = std::mismatch(x.digits.begin(), x.digits.end(), y.digits.begin(), y.digits.end());
  const int c = static_cast<int>(common.first - x.digits.begin());
  const double eps = params.epsilon();
  return arclength_between(eps, c, x.level()) + arclength_between(eps, c, y.level());
}

namespace {

// Integral over [a, b] of exp(-beta (t - shift)) (t + C)^lambda; [a, b] inside one unit edge.
double density_piece(const TreeParams& params, double lambda, double a, double b, double shift) {
  if (b <= a) return 0.0;
  const double beta = params.beta();
  const double C = params.C_const();
  return params.rule().integrate(
      [&](double t) { return std::exp(-beta * (t - shift)) * std::pow(t + C, lambda); }, a, b);
}

// exp(beta n) * edge_measure(n): the edge integral with the exponential scale factored out.
double scaled_edge_measure(const TreeParams& params, int n, double lambda) {
  return density_piece(params, lambda, n, n + 1.0, n);
}

}  // namespace

double density_integral(const TreeParams& params, double lambda, double a, double b) {
  if (!(a >= 0.0) || b < a) throw InvalidArgument("density_integral needs 0 <= a <= b");
  double acc = 0.0;
  for (double lo = a; lo < b;) {
    const double hi = std::min(b, std::floor(lo) + 1.0);
    acc += density_piece(params, lambda, lo, hi, 0.0);
    lo = hi;
  }
  return acc;
}

double edge_measure(const TreeParams& params, int n, double lambda) {
  if (n < 0 || n >= params.depth()) throw InvalidArgument("edge level out of range");
  return std::exp(-params.beta() * n) * scaled_edge_measure(params, n, lambda);
}

double tail_measure(const TreeParams& params, double lambda, int from_level) {
  if (from_level < 0) throw InvalidArgument("from_level must be >= 0");
  const double logK = std::log(static_cast<double>(params.K()));
  double acc = 0.0;
  double prev = 0.0;
  constexpr int kMaxLevels = 10'000'000;
  for (int n = from_level; n < from_level + kMaxLevels; ++n) {
    // K^{n+1} e^{-beta n} overflows separately for large n; combine in log space.
    const double term = std::exp((n + 1) * logK - params.beta() * n) * scaled_edge_measure(params, n, lambda);
    acc += term;
    if (prev > 0.0) {
      const double r = term / prev;
      if (r < 1.0 && term * r / (1.0 - r) < 1e-13 * acc) break;
    }
    prev = term;
  }
  return acc;
}

double residual_measure(const TreeParams& params, double lambda) {
  return tail_measure(params, lambda, params.depth());
}

double truncated_measure(const TreeParams& params, double lambda) {
  double acc = 0.0;
  double count = 1.0;
  for (int n = 0; n < params.depth(); ++n) {
    count *= params.K();
    acc += count * edge_measure(params, n, lambda);
  }
  return acc;
}

namespace {

// Measure of heights [a, b] below a vertex at level `base`, counting every
// edge copy: K^{floor(t) - base} copies at height t. Clipped at the depth.
double subtree_band(const TreeParams& params, double lambda, int base, double a, double b) {
  b = std::min(b, static_cast<double>(params.depth()));
  double acc = 0.0;
  double mult = std::pow(static_cast<double>(params.K()), std::floor(a) - base);
  for (double lo = a; lo < b;) {
    const double hi = std::min(b, std::floor(lo) + 1.0);
    acc += mult * density_piece(params, lambda, lo, hi, 0.0);
    lo = hi;
    mult *= params.K();
  }
  return acc;
}

}  // namespace

double ball_measure(const TreeParams& params, double lambda, double center_height, double radius) {
  const int N = params.depth();
  if (!(center_height >= 0.0) || !(center_height < N)) throw InvalidArgument("ball center outside truncated tree");
  if (!(radius > 0.0)) throw InvalidArgument("ball radius must be positive");
  const double t = center_height;
  const int n = static_cast<int>(std::floor(t));
  const double s_t = arclength_at(params, t);

  // Downward into the subtree below x, starting on x's own edge.
  double total = subtree_band(params, lambda, n, t, height_at_arclength(params, s_t + radius));

  // Upward along x's edge to its upper vertex.
  const double s_n = arclength_at(params, n);
  if (s_t - s_n < radius) {
    total += density_integral(params, lambda, n, t);
  } else {
    const double lo = height_at_arclength(params, s_t - radius);
    return total + density_integral(params, lambda, lo, t);
  }

  double remaining = radius - (s_t - s_n);
  for (int m = n;; --m) {
    const double s_m = arclength_at(params, m);
    const double reach = height_at_arclength(params, s_m + remaining);
    total += (params.K() - 1) * subtree_band(params, lambda, m, m, reach);
    if (m == 0) break;
    const double s_up = arclength_at(params, m - 1);
    if (s_m - s_up >= remaining) {
      total += density_integral(params, lambda, height_at_arclength(params, s_m - remaining), m);
      break;
    }
    total += density_integral(params, lambda, m - 1, m);
    remaining -= s_m - s_up;
  }
  return total;
}

DoublingReport sample_doubling(const TreeParams& params, double lambda, int n_centers, int n_radii,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double diam = 2.0 / params.epsilon();
  DoublingReport report;
  report.samples.reserve(static_cast<std::size_t>(n_centers) * n_radii);
  for (int i = 0; i < n_centers; ++i) {
    double t = unit(rng) * params.depth();
    if (i % 5 == 0) t = std::floor(t);  // include vertex centers
    t = std::min(t, std::nextafter(static_cast<double>(params.depth()), 0.0));
    for (int j = 1; j <= n_radii; ++j) {
      const double r = diam * std::ldexp(1.0, -j);
      const double ratio = ball_measure(params, lambda, t, 2.0 * r) / ball_measure(params, lambda, t, r);
      report.samples.push_back({t, r, ratio});
      report.sup_ratio = std::max(report.sup_ratio, ratio);
    }
  }
  return report;
}

}  // namespace treetrace
