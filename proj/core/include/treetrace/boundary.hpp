#pragma once

#include <vector>

#include "treetrace/tree.hpp"

namespace treetrace {

/// The boundary cell I_x: every ray from the root passing through x.
struct DyadicCell {
  VertexAddress address;

  int level() const { return address.level(); }
  bool operator==(const DyadicCell&) const = default;
};

/// Uniform Bernoulli measure on the boundary: each child cell carries 1/K of its parent.
class BoundaryMeasure {
 public:
  explicit BoundaryMeasure(int K);

  int K() const { return K_; }
  double of_level(int level) const;
  double operator()(const DyadicCell& cell) const { return of_level(cell.level()); }

 private:
  int K_;
};

DyadicCell cell_parent(const DyadicCell& cell);
std::vector<DyadicCell> cell_children(const TreeParams& params, const DyadicCell& cell);

/// Length of the longest common prefix of two distinct cells of equal level.
int split_level(const DyadicCell& a, const DyadicCell& b);

/// Distance 2/epsilon * exp(-epsilon k) between points of distinct cells splitting at level k.
double boundary_distance(const TreeParams& params, const DyadicCell& a, const DyadicCell& b);

/// Distance between boundary points whose rays split at level k.
double split_distance(const TreeParams& params, int k);

/// nu(cell) / r^Q with r = 2/epsilon * exp(-epsilon level).
double ahlfors_ratio(const TreeParams& params, const DyadicCell& cell);

}  // namespace treetrace
