#include "treetrace/operators.hpp"

#include <cmath>

namespace treetrace {

BoundaryFunction trace(const TreeFunction& F) {
  const auto leaves = F.level(F.depth());
  return BoundaryFunction(F.K(), F.depth(), std::vector<double>(leaves.begin(), leaves.end()));
}

TreeFunction extend(const BoundaryFunction& u) {
  CellAverages averages(u);
  // The leaf level is copied verbatim, which makes trace(extend(u)) == u bitwise.
  return TreeFunction(u.K(), u.depth(), std::move(averages.levels));
}

double star_majorant(const TreeFunction& F, const DyadicCell& leaf) {
  if (leaf.level() != F.depth()) throw InvalidArgument("star_majorant needs a leaf cell at the function's depth");
  for (int d : leaf.address.digits) {
    if (d < 0 || d >= F.K()) throw InvalidArgument("cell digit outside [0, K)");
  }
  double total = std::abs(F.at(0, 0));
  std::uint64_t idx = 0;
  double prev = F.at(0, 0);
  for (int j = 1; j <= F.depth(); ++j) {
    idx = idx * F.K() + leaf.address.digits[j - 1];
    const double cur = F.at(j, idx);
    total += std::abs(cur - prev);
    prev = cur;
  }
  return total;
}

}  // namespace treetrace
