// treetrace: command line front end for the tree trace library.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "treetrace/hajlasz.hpp"
#include "treetrace/harness.hpp"
#include "treetrace/operators.hpp"

using namespace treetrace;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> depth;
  std::string out;
};

ExperimentConfig resolve(const Common& c) {
  ExperimentConfig cfg = c.config_path.empty() ? ExperimentConfig{} : load_config(c.config_path);
  if (c.seed) cfg.seeds = {*c.seed};
  if (c.depth) cfg.depths = {*c.depth};
  if (!c.out.empty()) cfg.output = c.out;
  return cfg;
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "Flat key=value experiment config");
  cmd->add_option("--seed", c.seed, "Use this single seed");
  cmd->add_option("--depth", c.depth, "Use this single depth");
  cmd->add_option("--out", c.out, "Output file (stdout if omitted)");
}

template <class Write>
void emit(const std::string& path, Write&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream f(path);
  if (!f) throw InvalidArgument("cannot write " + path);
  write(f);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  return in;
}

void emit_report(const ExperimentConfig& cfg, const RatioReport& r, const std::string& suffix = "") {
  print_summary(std::cerr, r);
  if (cfg.output.empty()) return;
  const std::string path = cfg.output + suffix;
  emit(path, [&](std::ostream& o) { write_report_csv(o, r); });
  if (cfg.emit_plot_data) emit(path + ".plot.csv", [&](std::ostream& o) { write_plot_data(o, r); });
}

int run_verify(const std::string& what, const ExperimentConfig& cfg) {
  if (what == "trace-bound") {
    const auto r = verify_trace_bound(cfg);
    emit_report(cfg, r);
    return r.pass ? 0 : 1;
  }
  if (what == "extension-bound") {
    const auto r = verify_extension_bound(cfg);
    emit_report(cfg, r.bound);
    emit_report(cfg, r.energy_identity, ".identity.csv");
    return r.bound.pass && r.energy_identity.pass ? 0 : 1;
  }
  if (what == "equivalence") {
    const auto r = verify_equivalences(cfg);
    emit_report(cfg, r.double_integral);
    emit_report(cfg, r.hajlasz, ".hajlasz.csv");
    emit_report(cfg, r.comparability, ".comparability.csv");
    std::cerr << "comparability fit: " << (r.fit.pass ? "PASS" : "FAIL") << " C=" << r.fit.C
              << " C'=" << r.fit.C_prime << " fit_depth=" << r.fit.fit_depth << " checked=" << r.fit.checked
              << " violations=" << r.fit.violations << '\n';
    return r.pass ? 0 : 1;
  }
  CheckReport r;
  if (what == "roundtrip") r = verify_roundtrip(cfg);
  else if (what == "doubling") r = verify_doubling(cfg);
  else if (what == "ahlfors") r = verify_ahlfors(cfg);
  else throw InvalidArgument("unknown verification: " + what);
  print_summary(std::cerr, r);
  return r.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dyadic norms, traces and extensions on regular trees"};
  app.require_subcommand(1);

  Common common;
  std::string input;
  std::string family = "iid-uniform";
  bool with_hajlasz = false;

  auto* energy = app.add_subcommand("energy", "Energies and norms of a boundary function CSV");
  add_common(energy, common);
  energy->add_option("input", input, "Boundary function CSV")->required();
  energy->add_flag("--hajlasz", with_hajlasz, "Also solve the Hajlasz program");

  auto* ext = app.add_subcommand("extend", "Extend a boundary function CSV to the tree");
  add_common(ext, common);
  ext->add_option("input", input, "Boundary function CSV")->required();

  auto* tr = app.add_subcommand("trace", "Trace a tree function CSV to the boundary");
  add_common(tr, common);
  tr->add_option("input", input, "Tree function CSV")->required();

  auto* gen = app.add_subcommand("gen", "Generate a random function");
  add_common(gen, common);
  gen->add_option("--family", family, "Function family")
      ->check(CLI::IsMember(std::vector<std::string>{"iid-uniform", "cell-indicator", "lacunary", "extension-of-boundary", "random-vertex"}));

  std::string which;
  bool plot = false;
  auto* verify = app.add_subcommand("verify", "Run an experiment; exit 0 iff it passes");
  add_common(verify, common);
  verify->add_option("what", which, "Experiment")
      ->required()
      ->check(CLI::IsMember(std::vector<std::string>{"trace-bound", "extension-bound", "equivalence", "roundtrip", "doubling", "ahlfors"}));
  verify->add_flag("--emit-plot-data", plot, "Also write depth,ratio series next to --out");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = resolve(common);
    if (*verify) {
      cfg.emit_plot_data = cfg.emit_plot_data || plot;
      return run_verify(which, cfg);
    }
    if (*gen) {
      const TreeParams params = cfg.tree_params(cfg.depths.front());
      const Sample s = generate(parse_family(family), params, cfg.theta_value(), cfg.seeds.front());
      emit(cfg.output, [&](std::ostream& o) {
        if (const auto* u = std::get_if<BoundaryFunction>(&s)) write_boundary_csv(o, *u);
        else write_tree_csv(o, std::get<TreeFunction>(s));
      });
      return 0;
    }
    if (*ext) {
      auto in = open_input(input);
      const TreeFunction F = extend(read_boundary_csv(in));
      emit(cfg.output, [&](std::ostream& o) { write_tree_csv(o, F); });
      return 0;
    }
    if (*tr) {
      auto in = open_input(input);
      const BoundaryFunction u = trace(read_tree_csv(in));
      emit(cfg.output, [&](std::ostream& o) { write_boundary_csv(o, u); });
      return 0;
    }
    if (*energy) {
      auto in = open_input(input);
      const BoundaryFunction f = read_boundary_csv(in);
      validate_hypotheses(cfg);
      const TreeParams params = cfg.tree_params(std::max(1, f.depth()));
      const EnergyParams e = cfg.energy_params();
      const EnergyParams plain{e.theta, e.p, 0.0, 0.0};
      DoubleIntegralOptions opts;
      if (std::pow(static_cast<double>(f.K()), 2.0 * f.depth()) > static_cast<double>(opts.pair_budget)) {
        opts.mode = IntegralMode::montecarlo;
      }
      const auto di = double_integral_energy(params, f, e.theta, e.p, opts);
      emit(cfg.output, [&](std::ostream& o) {
        o.precision(17);
        o << "quantity,value\n";
        o << "theta," << e.theta << '\n';
        o << "dyadic_energy," << dyadic_energy(params, f, plain) << '\n';
        o << "weighted_dyadic_energy," << dyadic_energy(params, f, e) << '\n';
        o << "orlicz_modular," << dyadic_orlicz_modular(params, f, e, cfg.phi()) << '\n';
        o << "orlicz_besov_norm," << orlicz_besov_norm(params, f, e, cfg.phi(), cfg.gauge_tolerance) << '\n';
        o << "double_integral_energy," << di.value << '\n';
        if (opts.mode == IntegralMode::montecarlo) o << "double_integral_std_error," << di.std_error << '\n';
        if (with_hajlasz) {
          o << "hajlasz_energy," << hajlasz_energy(make_hajlasz_instance(params, f, e.theta, e.p)) << '\n';
        }
      });
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  }
  return 0;
}
