#pragma once

#include "treetrace/boundary.hpp"
#include "treetrace/boundary_norms.hpp"
#include "treetrace/tree_norms.hpp"

namespace treetrace {

/// Boundary values of F at its own resolution: leaf cell I_x gets F(x).
BoundaryFunction trace(const TreeFunction& F);

/// Vertex x gets the nu-average of u over I_x, for every level 0..depth.
TreeFunction extend(const BoundaryFunction& u);

/// |F(root)| + sum of |F(x_{j+1}) - F(x_j)| along the ancestors of `leaf`.
/// Dominates |trace(F)| at that leaf.
double star_majorant(const TreeFunction& F, const DyadicCell& leaf);

}  // namespace treetrace
