#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "treetrace/tree.hpp"
#include "treetrace/young.hpp"

namespace treetrace {

/// Vertex values on levels 0..depth, interpreted linearly in d_X-arclength
/// along every edge. Level n holds K^n values in lexicographic order.
class TreeFunction {
 public:
  TreeFunction(int K, int depth, std::vector<std::vector<double>> levels);
  static TreeFunction constant(int K, int depth, double c);

  int K() const { return K_; }
  int depth() const { return depth_; }
  std::span<const double> level(int n) const { return levels_.at(n); }
  double at(int n, std::size_t i) const { return levels_.at(n).at(i); }
  double at(const VertexAddress& x) const;

  TreeFunction scaled(double c) const;
  TreeFunction plus(const TreeFunction& other) const;

 private:
  int K_;
  int depth_;
  std::vector<std::vector<double>> levels_;
};

/// Per-edge gradient constants; edges are keyed by their lower (child)
/// vertex, so levels[m] has K^m entries for m = 1..depth and levels[0] is empty.
struct EdgeGradients {
  std::vector<std::vector<double>> levels;
};

/// |F(child) - F(parent)| / edge_length for every edge.
EdgeGradients upper_gradient_edges(const TreeParams& params, const TreeFunction& F);

/// sum over edges of the integral of Phi(|F|/k) against mu_{lambda2}.
double tree_lphi_modular(const TreeParams& params, const TreeFunction& F, const YoungPhi& phi, double lambda2,
                         double k);

/// sum over edges of Phi(g/k) * edge_measure.
double gradient_lphi_modular(const TreeParams& params, const TreeFunction& F, const YoungPhi& phi, double lambda2,
                             double k);

/// ||F||_{L^Phi} + ||g_F||_{L^Phi}, both against mu_{lambda2}.
double newtonian_norm(const TreeParams& params, const TreeFunction& F, const YoungPhi& phi, double lambda2,
                      double tol = 1e-10);

/// CSV: "K,N" header, the two values, then "address,value" for every vertex
/// (the root has an empty address).
void write_tree_csv(std::ostream& out, const TreeFunction& F);
TreeFunction read_tree_csv(std::istream& in);

}  // namespace treetrace
