#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace treetrace {

/// Raised when an argument violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Gauss-Legendre rule on [-1, 1].
class GaussRule {
 public:
  GaussRule() = default;
  explicit GaussRule(int order);

  int order() const { return static_cast<int>(nodes_.size()); }

  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) acc += weights_[i] * f(mid + half * nodes_[i]);
    return half * acc;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Geometry and measure parameters of a depth-truncated regular K-ary tree.
///
/// Edges are unit intervals in the level parameter tau. The metric has
/// density exp(-epsilon*tau) and the measure has density
/// exp(-beta*tau) * (tau + C)^lambda2.
class TreeParams {
 public:
  int K() const { return K_; }
  double epsilon() const { return epsilon_; }
  double beta() const { return beta_; }
  double lambda2() const { return lambda2_; }
  double C_const() const { return C_; }
  int depth() const { return depth_; }
  int quad_order() const { return rule_.order(); }
  const GaussRule& rule() const { return rule_; }

  /// Hausdorff dimension of the boundary, log K / epsilon.
  double Q() const;
  /// Smoothness exponent 1 - (beta - log K) / (epsilon p).
  double theta(double p) const;
  /// Minimal admissible C for the given geometry and measure exponent.
  static double minimal_C(int K, double epsilon, double beta, double lambda2);

  /// Copy with a different truncation depth.
  TreeParams with_depth(int depth) const;

  friend TreeParams make_tree_params(int, double, double, double, int, int, std::optional<double>);

 private:
  TreeParams() = default;

  int K_ = 2;
  double epsilon_ = 0.0;
  double beta_ = 0.0;
  double lambda2_ = 0.0;
  double C_ = 0.0;
  int depth_ = 1;
  GaussRule rule_;
};

/// Validates and bundles tree parameters. When `C_const` is absent the
/// minimal admissible value is used; a smaller explicit value is rejected.
TreeParams make_tree_params(int K, double epsilon, double beta, double lambda2, int depth,
                            int quad_order = 8, std::optional<double> C_const = std::nullopt);

/// Base-K word addressing a vertex; the empty word is the root.
struct VertexAddress {
  std::vector<int> digits;

  int level() const { return static_cast<int>(digits.size()); }
  bool operator==(const VertexAddress&) const = default;

  /// Lexicographic rank among the K^level vertices of the same level.
  std::uint64_t index(int K) const;
  static VertexAddress from_index(std::uint64_t index, int level, int K);

  /// Digit string, one character per digit (0-9 then a-z).
  std::string to_string() const;
  static VertexAddress parse(std::string_view text, int K);
};

/// Throws unless every digit is in [0, K) and the level is within depth.
void validate_address(const TreeParams& params, const VertexAddress& x);

/// Metric length of one edge joining level n to level n + 1.
double edge_length(const TreeParams& params, int n);

/// Arclength from the root to height tau along any ray.
double arclength_at(const TreeParams& params, double tau);

/// Inverse of arclength_at; +infinity once sigma reaches 1/epsilon.
double height_at_arclength(const TreeParams& params, double sigma);

/// d_X along the unique geodesic through the deepest common ancestor.
double vertex_distance(const TreeParams& params, const VertexAddress& x, const VertexAddress& y);

/// Integral of the measure density exp(-beta t)(t + C)^lambda over heights [a, b].
double density_integral(const TreeParams& params, double lambda, double a, double b);

/// Measure of one edge joining level n to level n + 1.
double edge_measure(const TreeParams& params, int n, double lambda);

/// Mass of all edges at levels >= from_level (no depth truncation).
double tail_measure(const TreeParams& params, double lambda, int from_level);

/// Mass discarded by truncating at params.depth().
double residual_measure(const TreeParams& params, double lambda);

/// Mass of the truncated tree: all edges between levels 0 and depth.
double truncated_measure(const TreeParams& params, double lambda);

/// Measure of the open ball B(x, r) in the truncated tree, where x sits at
/// height `center_height` in [0, depth) on some edge. By regularity the value
/// does not depend on which edge.
double ball_measure(const TreeParams& params, double lambda, double center_height, double radius);

struct DoublingSample {
  double center_height;
  double radius;
  double ratio;  // mu(B(x, 2r)) / mu(B(x, r))
};

struct DoublingReport {
  std::vector<DoublingSample> samples;
  double sup_ratio = 0.0;
};

/// Samples mu(2B)/mu(B) over random centers and a dyadic radius grid.
DoublingReport sample_doubling(const TreeParams& params, double lambda, int n_centers, int n_radii,
                               std::uint64_t seed);

}  // namespace treetrace
