#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "treetrace/boundary.hpp"
#include "treetrace/boundary_norms.hpp"
#include "treetrace/tree.hpp"
#include "treetrace/tree_norms.hpp"
#include "treetrace/young.hpp"

namespace treetrace {

enum class Family { iid_uniform, cell_indicator, lacunary, extension_of_boundary, random_vertex };

Family parse_family(std::string_view name);
std::string_view family_name(Family family);

/// True for families that produce a BoundaryFunction.
bool is_boundary_family(Family family);

using Sample = std::variant<BoundaryFunction, TreeFunction>;

/// Deterministic in (family, params.K, params.depth, params.epsilon, theta, seed).
/// theta is only read by the lacunary family:
///   f = sum_{n=1..N} e^{-eps theta n} / n * r_n,  r_n = +-1 on each level-n cell.
Sample generate(Family family, const TreeParams& params, double theta, std::uint64_t seed);

/// Boundary view of a sample; tree samples are traced.
BoundaryFunction boundary_sample(Family family, const TreeParams& params, double theta, std::uint64_t seed);
/// Tree view of a sample; boundary samples are extended.
TreeFunction tree_sample(Family family, const TreeParams& params, double theta, std::uint64_t seed);

/// The cell whose indicator the cell-indicator family returns for this seed.
DyadicCell indicator_cell(int K, int depth, std::uint64_t seed);

struct ExperimentConfig {
  int K = 2;
  double epsilon = 0.6931471805599453;
  double beta = 1.3862943611198906;
  std::optional<double> C;
  int quad_order = 8;
  double p = 2.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::optional<double> lambda;  // if given, must equal lambda1 + lambda2
  std::optional<double> theta;   // if given, must match the trace exponent
  std::vector<Family> families{Family::iid_uniform};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<int> depths{4, 5, 6};
  double slope_tolerance = 0.1;
  double spread_limit = 100.0;
  double gauge_tolerance = 1e-10;
  int hajlasz_max_depth = 6;
  double hajlasz_gap = 1e-6;
  std::string output;
  bool emit_plot_data = false;

  /// 1 - (beta - log K) / (eps p).
  double trace_theta() const;
  double theta_value() const { return theta.value_or(trace_theta()); }
  double lambda_value() const { return lambda.value_or(lambda1 + lambda2); }
  YoungPhi phi() const { return YoungPhi(p, lambda1); }
  TreeParams tree_params(int depth) const;
  EnergyParams energy_params() const;
};

/// Flat "key = value" lines; '#' starts a comment. Lists are comma separated
/// and integer lists also accept "a..b". Unknown keys are rejected.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Throws InvalidArgument unless p > (beta - log K)/eps > 0, theta equals the
/// trace exponent, lambda = lambda1 + lambda2, and Phi is admissible.
void validate_hypotheses(const ExperimentConfig& config);

struct RatioRow {
  std::uint64_t seed = 0;
  int depth = 0;
  std::string family;
  double numerator = 0.0;
  double denominator = 0.0;
  double ratio = 0.0;
};

struct DepthAggregate {
  int depth = 0;
  std::size_t count = 0;
  double min = 0.0;
  double max = 0.0;
  double median = 0.0;
};

struct RatioReport {
  std::string name;
  std::string numerator_label;
  std::string denominator_label;
  std::vector<RatioRow> rows;
  std::vector<DepthAggregate> per_depth;
  double min = 0.0;
  double max = 0.0;
  double median = 0.0;
  double slope = 0.0;  // least-squares slope of log(ratio) against depth
  bool finite = true;
  bool pass = false;
};

/// Sorts rows by (seed, depth, family), fills the aggregates, and sets pass
/// iff all ratios are finite and positive, |slope| <= slope_tolerance and
/// max/min <= spread_limit.
void finalize_report(RatioReport& report, double slope_tolerance, double spread_limit);

/// ||trace F||_B / ||F||_{N^{1,Phi}} over tree samples.
RatioReport verify_trace_bound(const ExperimentConfig& config);

struct ExtensionReport {
  RatioReport bound;            // ||extend u||_{N^{1,Phi}} / ||u||_B
  RatioReport energy_identity;  // gradient modular of extend u / dyadic Orlicz modular of u
};
ExtensionReport verify_extension_bound(const ExperimentConfig& config);

/// Two-sided comparison between the L^p energy E (exponent lambda) and the
/// Orlicz modular M (exponent lambda2). For lambda1 > 0:
///   M / C <= E <= C M + C',
/// and for lambda1 < 0 the same with E and M exchanged. C and C' are fitted
/// on the first depth and checked on the rest with C widened by `widen`.
struct ComparabilityFit {
  int fit_depth = 0;
  double C = 0.0;
  double C_prime = 0.0;
  double widen = 2.0;
  std::size_t checked = 0;
  std::size_t violations = 0;
  bool pass = false;
};

ComparabilityFit fit_comparability(const std::vector<RatioRow>& rows, double lambda1, double widen = 2.0);

struct ThresholdRow {
  std::uint64_t seed = 0;
  int depth = 0;
  std::string family;
  std::vector<double> fractions;  // per level 1..depth
};

struct EquivalenceReport {
  RatioReport double_integral;  // double-integral energy / dyadic energy
  RatioReport hajlasz;          // Hajlasz energy / dyadic energy
  RatioReport comparability;    // rows carry E (numerator) and M (denominator); pass mirrors fit
  ComparabilityFit fit;
  std::vector<ThresholdRow> thresholds;
  bool pass = false;
};
EquivalenceReport verify_equivalences(const ExperimentConfig& config);

struct CheckReport {
  std::string name;
  std::size_t checked = 0;
  std::size_t failures = 0;
  double worst = 0.0;  // worst deviation seen
  bool pass = false;
};

/// trace(extend(u)) == u to 1e-12 over the config's families, seeds and depths.
CheckReport verify_roundtrip(const ExperimentConfig& config);

/// For each depth N, the sampled doubling sup at N and N + 2 agree within `factor`.
CheckReport verify_doubling(const ExperimentConfig& config, double factor = 1.5);

/// ahlfors_ratio is the same on every cell of every level up to each depth.
CheckReport verify_ahlfors(const ExperimentConfig& config);

/// One CSV row per (seed, depth, family); bytes depend only on the report.
void write_report_csv(std::ostream& out, const RatioReport& report);
/// "depth,ratio" series for external plotting.
void write_plot_data(std::ostream& out, const RatioReport& report);
void print_summary(std::ostream& out, const RatioReport& report);
void print_summary(std::ostream& out, const CheckReport& report);

}  // namespace treetrace
