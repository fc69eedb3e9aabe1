#include "treetrace/boundary_norms.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "csv_util.hpp"

namespace treetrace {

namespace {

std::uint64_t checked_leaf_count(int K, int depth) {
  if (K < 2) throw InvalidArgument("K must be >= 2");
  if (depth < 0) throw InvalidArgument("depth must be >= 0");
  const double count = std::pow(static_cast<double>(K), depth);
  if (count > 1e9) throw InvalidArgument("K^depth too large");
  return static_cast<std::uint64_t>(std::llround(count));
}

double abs_pow(double x, double p) {
  x = std::abs(x);
  if (p == 2.0) return x * x;
  if (p == 1.0) return x;
  return std::pow(x, p);
}

void require_compatible(const TreeParams& params, int K) {
  if (params.K() != K) throw InvalidArgument("function and tree parameters disagree on K");
}

}  // namespace

BoundaryFunction::BoundaryFunction(int K, int depth, std::vector<double> values)
    : K_(K), depth_(depth), values_(std::move(values)) {
  if (values_.size() != checked_leaf_count(K, depth)) throw InvalidArgument("boundary function needs K^depth values");
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidArgument("boundary function values must be finite");
  }
}

BoundaryFunction BoundaryFunction::constant(int K, int depth, double c) {
  return BoundaryFunction(K, depth, std::vector<double>(checked_leaf_count(K, depth), c));
}

BoundaryFunction BoundaryFunction::scaled(double c) const {
  std::vector<double> out(values_);
  for (double& v : out) v *= c;
  return BoundaryFunction(K_, depth_, std::move(out));
}

BoundaryFunction BoundaryFunction::plus(const BoundaryFunction& other) const {
  if (other.K_ != K_ || other.depth_ != depth_) throw InvalidArgument("boundary functions of different shape");
  std::vector<double> out(values_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += other.values_[i];
  return BoundaryFunction(K_, depth_, std::move(out));
}

CellAverages::CellAverages(const BoundaryFunction& f) {
  const int K = f.K();
  levels.resize(f.depth() + 1);
  levels[f.depth()].assign(f.values().begin(), f.values().end());
  for (int n = f.depth() - 1; n >= 0; --n) {
    const auto& below = levels[n + 1];
    auto& here = levels[n];
    here.assign(below.size() / K, 0.0);
    for (std::size_t i = 0; i < here.size(); ++i) {
      double s = 0.0;
      for (int d = 0; d < K; ++d) s += below[i * K + d];
      here[i] = s / K;
    }
  }
}

double cell_average(const BoundaryFunction& f, const DyadicCell& cell) {
  if (cell.level() > f.depth()) throw InvalidArgument("cell deeper than function resolution");
  for (int d : cell.address.digits) {
    if (d < 0 || d >= f.K()) throw InvalidArgument("cell digit outside [0, K)");
  }
  const std::uint64_t width = checked_leaf_count(f.K(), f.depth() - cell.level());
  const std::uint64_t first = cell.address.index(f.K()) * width;
  double s = 0.0;
  for (std::uint64_t i = first; i < first + width; ++i) s += f[i];
  return s / static_cast<double>(width);
}

double lp_norm(const BoundaryFunction& f, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("lp_norm needs p >= 1");
  double s = 0.0;
  for (double v : f.values()) s += abs_pow(v, p);
  return std::pow(s / static_cast<double>(f.size()), 1.0 / p);
}

double orlicz_norm(const BoundaryFunction& f, const YoungPhi& phi, double tol) {
  const double nu = 1.0 / static_cast<double>(f.size());
  return luxemburg_gauge(
      [&](double k) {
        double s = 0.0;
        for (double v : f.values()) s += phi(std::abs(v) / k);
        return s * nu;
      },
      tol);
}

void EnergyParams::validate() const {
  if (!(theta >= 0.0 && theta < 1.0)) throw InvalidArgument("theta must lie in [0, 1)");
  if (!(p >= 1.0)) throw InvalidArgument("energy exponent p must be >= 1");
  if (!std::isfinite(lambda) || !std::isfinite(lambda2)) throw InvalidArgument("lambda exponents must be finite");
}

double dyadic_energy(const TreeParams& params, const CellAverages& averages, const EnergyParams& energy) {
  energy.validate();
  const int N = static_cast<int>(averages.levels.size()) - 1;
  const int K = params.K();
  double total = 0.0;
  for (int n = 1; n <= N; ++n) {
    const auto& here = averages.levels[n];
    const auto& above = averages.levels[n - 1];
    double s = 0.0;
    for (std::size_t i = 0; i < here.size(); ++i) s += abs_pow(here[i] - above[i / K], energy.p);
    const double weight = std::exp(params.epsilon() * n * energy.theta * energy.p) * std::pow(n, energy.lambda);
    total += weight * s / static_cast<double>(here.size());
  }
  return total;
}

double dyadic_energy(const TreeParams& params, const BoundaryFunction& f, const EnergyParams& energy) {
  require_compatible(params, f.K());
  return dyadic_energy(params, CellAverages(f), energy);
}

double dyadic_orlicz_modular(const TreeParams& params, const CellAverages& averages, const EnergyParams& energy,
                             const YoungPhi& phi, double k) {
  energy.validate();
  if (!(k > 0.0)) throw InvalidArgument("modular scale k must be positive");
  const int N = static_cast<int>(averages.levels.size()) - 1;
  const int K = params.K();
  const double eps = params.epsilon();
  double total = 0.0;
  for (int n = 1; n <= N; ++n) {
    const auto& here = averages.levels[n];
    const auto& above = averages.levels[n - 1];
    const double grow = std::exp(eps * n);
    double s = 0.0;
    // Divide last so a zero jump stays zero even when k underflows.
    for (std::size_t i = 0; i < here.size(); ++i) s += phi(std::abs(here[i] - above[i / K]) * grow / k);
    const double weight = std::exp(eps * n * (energy.theta - 1.0) * energy.p) * std::pow(n, energy.lambda2);
    total += weight * s / static_cast<double>(here.size());
  }
  return total;
}

double dyadic_orlicz_modular(const TreeParams& params, const BoundaryFunction& f, const EnergyParams& energy,
                             const YoungPhi& phi) {
  require_compatible(params, f.K());
  return dyadic_orlicz_modular(params, CellAverages(f), energy, phi, 1.0);
}

double orlicz_besov_norm(const TreeParams& params, const BoundaryFunction& f, const EnergyParams& energy,
                         const YoungPhi& phi, double tol) {
  require_compatible(params, f.K());
  const CellAverages averages(f);
  const double seminorm = luxemburg_gauge(
      [&](double k) { return dyadic_orlicz_modular(params, averages, energy, phi, k); }, tol);
  return orlicz_norm(f, phi, tol) + seminorm;
}

std::vector<double> jump_threshold_fractions(const TreeParams& params, const BoundaryFunction& f, double theta) {
  require_compatible(params, f.K());
  const CellAverages averages(f);
  std::vector<double> out;
  for (int n = 1; n <= f.depth(); ++n) {
    const double threshold = std::exp(-params.epsilon() * n * (theta + 1.0) / 2.0);
    const auto& here = averages.levels[n];
    const auto& above = averages.levels[n - 1];
    std::size_t hits = 0;
    for (std::size_t i = 0; i < here.size(); ++i) {
      if (std::abs(here[i] - above[i / f.K()]) > threshold) ++hits;
    }
    out.push_back(static_cast<double>(hits) / static_cast<double>(here.size()));
  }
  return out;
}

DoubleIntegralResult double_integral_energy(const TreeParams& params, const BoundaryFunction& f, double theta,
                                            double p, const DoubleIntegralOptions& options) {
  require_compatible(params, f.K());
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("theta must lie in (0, 1)");
  if (!(p >= 1.0)) throw InvalidArgument("p must be >= 1");
  const int K = f.K();
  const int N = f.depth();
  const std::uint64_t leaves = f.size();

  // Kernel factor for a pair splitting at level k: 1 / (d_k^{theta p} K^{-k}).
  std::vector<double> kernel(N + 1);
  for (int k = 0; k < N; ++k) {
    kernel[k] = std::pow(static_cast<double>(K), k) / std::pow(split_distance(params, k), theta * p);
  }

  DoubleIntegralResult result;
  if (options.mode == IntegralMode::exact) {
    if (static_cast<double>(leaves) * static_cast<double>(leaves) > static_cast<double>(options.pair_budget)) {
      throw InvalidArgument("exact double integral exceeds the configured pair budget");
    }
    const auto vals = f.values();
    double total = 0.0;
    std::uint64_t block = leaves;
    std::uint64_t nodes = 1;
    for (int k = 0; k < N; ++k) {
      const std::uint64_t child = block / K;
      double level_sum = 0.0;
      for (std::uint64_t node = 0; node < nodes; ++node) {
        const std::uint64_t base = node * block;
        // Unordered pairs of distinct children; each counted twice below.
        for (int c1 = 0; c1 < K; ++c1) {
          for (int c2 = c1 + 1; c2 < K; ++c2) {
            for (std::uint64_t a = base + c1 * child; a < base + (c1 + 1) * child; ++a) {
              for (std::uint64_t b = base + c2 * child; b < base + (c2 + 1) * child; ++b) {
                level_sum += abs_pow(vals[a] - vals[b], p);
              }
            }
          }
        }
      }
      total += 2.0 * kernel[k] * level_sum;
      block = child;
      nodes *= K;
    }
    result.value = total / (static_cast<double>(leaves) * static_cast<double>(leaves));
    return result;
  }

  if (options.samples < 2) throw InvalidArgument("Monte Carlo needs at least 2 samples");
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::uint64_t> pick(0, leaves - 1);
  double mean = 0.0, m2 = 0.0;
  for (std::uint64_t s = 0; s < options.samples; ++s) {
    const std::uint64_t a = pick(rng);
    const std::uint64_t b = pick(rng);
    double x = 0.0;
    if (a != b) {
      // Split level = number of leading base-K digits shared by a and b.
      std::uint64_t width = leaves / K;
      int k = 0;
      while (a / width == b / width) {
        ++k;
        width /= K;
      }
      x = abs_pow(f[a] - f[b], p) * kernel[k];
    }
    const double delta = x - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (x - mean);
  }
  const double n = static_cast<double>(options.samples);
  result.value = mean;
  result.std_error = std::sqrt(m2 / (n - 1.0) / n);
  return result;
}

void write_boundary_csv(std::ostream& out, const BoundaryFunction& f) {
  out << "K,N\n" << f.K() << ',' << f.depth() << "\naddress,value\n";
  for (std::uint64_t i = 0; i < f.size(); ++i) {
    out << VertexAddress::from_index(i, f.depth(), f.K()).to_string() << ',' << detail::format_double(f[i]) << '\n';
  }
}

BoundaryFunction read_boundary_csv(std::istream& in) {
  const auto [K, N] = detail::read_shape_header(in);
  const std::uint64_t count = checked_leaf_count(K, N);
  std::vector<double> values(count, 0.0);
  std::vector<bool> seen(count, false);
  std::string line;
  std::uint64_t rows = 0;
  while (std::getline(in, line)) {
    if (detail::blank(line)) continue;
    const auto [address, value] = detail::split_row(line);
    const VertexAddress x = VertexAddress::parse(address, K);
    if (x.level() != N) throw InvalidArgument("boundary CSV row is not a leaf address: " + address);
    const std::uint64_t idx = x.index(K);
    if (seen[idx]) throw InvalidArgument("duplicate leaf address in CSV: " + address);
    seen[idx] = true;
    values[idx] = value;
    ++rows;
  }
  if (rows != count) throw InvalidArgument("boundary CSV must list every leaf exactly once");
  return BoundaryFunction(K, N, std::move(values));
}

}  // namespace treetrace
