#include "treetrace/tree_norms.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "csv_util.hpp"

namespace treetrace {

namespace {

std::size_t level_size(int K, int n) {
  const double count = std::pow(static_cast<double>(K), n);
  if (count > 1e9) throw InvalidArgument("K^depth too large");
  return static_cast<std::size_t>(std::llround(count));
}

void require_compatible(const TreeParams& params, const TreeFunction& F) {
  if (params.K() != F.K()) throw InvalidArgument("function and tree parameters disagree on K");
}

}  // namespace

TreeFunction::TreeFunction(int K, int depth, std::vector<std::vector<double>> levels)
    : K_(K), depth_(depth), levels_(std::move(levels)) {
  if (K < 2) throw InvalidArgument("K must be >= 2");
  if (depth < 0) throw InvalidArgument("depth must be >= 0");
  if (levels_.size() != static_cast<std::size_t>(depth) + 1) throw InvalidArgument("tree function needs depth + 1 levels");
  for (int n = 0; n <= depth; ++n) {
    if (levels_[n].size() != level_size(K, n)) throw InvalidArgument("tree function level n needs K^n values");
    for (double v : levels_[n]) {
      if (!std::isfinite(v)) throw InvalidArgument("tree function values must be finite");
    }
  }
}

TreeFunction TreeFunction::constant(int K, int depth, double c) {
  std::vector<std::vector<double>> levels(depth + 1);
  for (int n = 0; n <= depth; ++n) levels[n].assign(level_size(K, n), c);
  return TreeFunction(K, depth, std::move(levels));
}

double TreeFunction::at(const VertexAddress& x) const {
  if (x.level() > depth_) throw InvalidArgument("vertex deeper than tree function");
  return levels_[x.level()][x.index(K_)];
}

TreeFunction TreeFunction::scaled(double c) const {
  auto levels = levels_;
  for (auto& row : levels)
    for (double& v : row) v *= c;
  return TreeFunction(K_, depth_, std::move(levels));
}

TreeFunction TreeFunction::plus(const TreeFunction& other) const {
  if (other.K_ != K_ || other.depth_ != depth_) throw InvalidArgument("tree functions of different shape");
  auto levels = levels_;
  for (std::size_t n = 0; n < levels.size(); ++n)
    for (std::size_t i = 0; i < levels[n].size(); ++i) levels[n][i] += other.levels_[n][i];
  return TreeFunction(K_, depth_, std::move(levels));
}

EdgeGradients upper_gradient_edges(const TreeParams& params, const TreeFunction& F) {
  require_compatible(params, F);
  const TreeParams geom = params.with_depth(std::max(1, F.depth()));
  EdgeGradients g;
  g.levels.resize(F.depth() + 1);
  for (int m = 1; m <= F.depth(); ++m) {
    const double len = edge_length(geom, m - 1);
    const auto child = F.level(m);
    const auto parent = F.level(m - 1);
    auto& out = g.levels[m];
    out.resize(child.size());
    for (std::size_t i = 0; i < child.size(); ++i) out[i] = std::abs(child[i] - parent[i / F.K()]) / len;
  }
  return g;
}

namespace {

// Quadrature of Phi(|a + (b - a) w(t)| / k) against exp(-beta t)(t + C)^lambda
// over heights [lo, hi] inside the edge from level n, where
// w(t) = (1 - e^{-eps (t - n)}) / (1 - e^{-eps}) is the arclength fraction.
double edge_phi_integral(const TreeParams& params, const YoungPhi& phi, double lambda, int n, double a, double b,
                         double k, double lo, double hi) {
  const double eps = params.epsilon();
  const double denom = -std::expm1(-eps);
  const double beta = params.beta();
  const double C = params.C_const();
  return params.rule().integrate(
      [&](double t) {
        const double w = -std::expm1(-eps * (t - n)) / denom;
        return phi(std::abs(a + (b - a) * w) / k) * std::exp(-beta * t) * std::pow(t + C, lambda);
      },
      lo, hi);
}

double edge_modular(const TreeParams& params, const YoungPhi& phi, double lambda, int n, double a, double b,
                    double k) {
  if (a == 0.0 && b == 0.0) return 0.0;
  if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) {
    // Split at the zero of the interpolant, where |F| has a kink.
    const double w0 = a / (a - b);
    const double t0 = n - std::log1p(w0 * std::expm1(-params.epsilon())) / params.epsilon();
    return edge_phi_integral(params, phi, lambda, n, a, b, k, n, t0) +
           edge_phi_integral(params, phi, lambda, n, a, b, k, t0, n + 1.0);
  }
  return edge_phi_integral(params, phi, lambda, n, a, b, k, n, n + 1.0);
}

}  // namespace

double tree_lphi_modular(const TreeParams& params, const TreeFunction& F, const YoungPhi& phi, double lambda2,
                         double k) {
  require_compatible(params, F);
  if (!(k > 0.0)) throw InvalidArgument("modular scale k must be positive");
  double total = 0.0;
  for (int m = 1; m <= F.depth(); ++m) {
    const auto child = F.level(m);
    const auto parent = F.level(m - 1);
    for (std::size_t i = 0; i < child.size(); ++i) {
      total += edge_modular(params, phi, lambda2, m - 1, parent[i / F.K()], child[i], k);
    }
  }
  return total;
}

double gradient_lphi_modular(const TreeParams& params, const TreeFunction& F, const YoungPhi& phi, double lambda2,
                             double k) {
  require_compatible(params, F);
  if (!(k > 0.0)) throw InvalidArgument("modular scale k must be positive");
  const EdgeGradients g = upper_gradient_edges(params, F);
  const TreeParams geom = params.with_depth(std::max(1, F.depth()));
  double total = 0.0;
  for (int m = 1; m <= F.depth(); ++m) {
    double s = 0.0;
    for (double gi : g.levels[m]) s += phi(gi / k);
    total += s * edge_measure(geom, m - 1, lambda2);
  }
  return total;
}

double newtonian_norm(const TreeParams& params, const TreeFunction& F, const YoungPhi& phi, double lambda2,
                      double tol) {
  const double value_part =
      luxemburg_gauge([&](double k) { return tree_lphi_modular(params, F, phi, lambda2, k); }, tol);
  const double gradient_part =
      luxemburg_gauge([&](double k) { return gradient_lphi_modular(params, F, phi, lambda2, k); }, tol);
  return value_part + gradient_part;
}

void write_tree_csv(std::ostream& out, const TreeFunction& F) {
  out << "K,N\n" << F.K() << ',' << F.depth() << "\naddress,value\n";
  for (int n = 0; n <= F.depth(); ++n) {
    const auto row = F.level(n);
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << VertexAddress::from_index(i, n, F.K()).to_string() << ',' << detail::format_double(row[i]) << '\n';
    }
  }
}

TreeFunction read_tree_csv(std::istream& in) {
  const auto [K, N] = detail::read_shape_header(in);
  if (N < 0) throw InvalidArgument("negative depth in tree CSV");
  std::vector<std::vector<double>> levels(N + 1);
  std::vector<std::vector<bool>> seen(N + 1);
  for (int n = 0; n <= N; ++n) {
    levels[n].assign(level_size(K, n), 0.0);
    seen[n].assign(levels[n].size(), false);
  }
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (detail::blank(line)) continue;
    const auto [address, value] = detail::split_row(line);
    const VertexAddress x = VertexAddress::parse(address, K);
    if (x.level() > N) throw InvalidArgument("tree CSV address deeper than N: " + address);
    const auto idx = x.index(K);
    if (seen[x.level()][idx]) throw InvalidArgument("duplicate vertex address in CSV: '" + address + "'");
    seen[x.level()][idx] = true;
    levels[x.level()][idx] = value;
    ++rows;
  }
  std::size_t expected = 0;
  for (const auto& row : levels) expected += row.size();
  if (rows != expected) throw InvalidArgument("tree CSV must list every vertex exactly once");
  return TreeFunction(K, N, std::move(levels));
}

}  // namespace treetrace
