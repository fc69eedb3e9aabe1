#include "treetrace/boundary.hpp"

#include <algorithm>
#include <cmath>

namespace treetrace {

BoundaryMeasure::BoundaryMeasure(int K) : K_(K) {
  if (K < 2) throw InvalidArgument("K must be >= 2");
}

double BoundaryMeasure::of_level(int level) const {
  if (level < 0) throw InvalidArgument("negative cell level");
  return std::pow(static_cast<double>(K_), -level);
}

DyadicCell cell_parent(const DyadicCell& cell) {
  if (cell.level() == 0) throw InvalidArgument("the root cell has no parent");
  DyadicCell parent = cell;
  parent.address.digits.pop_back();
  return parent;
}

std::vector<DyadicCell> cell_children(const TreeParams& params, const DyadicCell& cell) {
  validate_address(params, cell.address);
  if (cell.level() >= params.depth()) throw InvalidArgument("leaf cells have no children within truncation");
  std::vector<DyadicCell> out(params.K(), cell);
  for (int d = 0; d < params.K(); ++d) out[d].address.digits.push_back(d);
  return out;
}

int split_level(const DyadicCell& a, const DyadicCell& b) {
  if (a.level() != b.level()) throw InvalidArgument("split_level needs cells of equal level");
  if (a == b) throw InvalidArgument("split_level needs distinct cells");
  const auto& x = a.address.digits;
  const auto& y = b.address.digits;
  return static_cast<int>(std::mismatch(x.begin(), x.end(), y.begin()).first - x.begin());
}

double split_distance(const TreeParams& params, int k) {
  return 2.0 / params.epsilon() * std::exp(-params.epsilon() * k);
}

double boundary_distance(const TreeParams& params, const DyadicCell& a, const DyadicCell& b) {
  validate_address(params, a.address);
  validate_address(params, b.address);
  return split_distance(params, split_level(a, b));
}

double ahlfors_ratio(const TreeParams& params, const DyadicCell& cell) {
  validate_address(params, cell.address);
  const double r = split_distance(params, cell.level());
  return BoundaryMeasure(params.K()).of_level(cell.level()) / std::pow(r, params.Q());
}

}  // namespace treetrace
