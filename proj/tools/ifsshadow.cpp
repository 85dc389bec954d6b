#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "ifsshadow/catalog.hpp"
#include "ifsshadow/cli.hpp"
#include "ifsshadow/errors.hpp"
#include "ifsshadow/parallel.hpp"

using namespace ifsshadow;

namespace {

void add_options(CLI::App& app, RunConfig& c) {
  app.add_option("--system,--f", c.system, "catalog name or IFS JSON file")->capture_default_str();
  app.add_option("--g", c.g_system, "second family (metrics, semiconj)");
  app.add_option("--sigma", c.sigma, "constant:s, periodic:a,b,..., random:len or a JSON file")->capture_default_str();
  app.add_option("--x0", c.x0, "start point, comma separated");
  app.add_option("--chain-in", c.chain_in, "chain CSV to read");
  app.add_option("--shadow-in", c.shadow_in, "candidate shadow CSV (verify)");
  app.add_option("--x", c.point_x, "first point (septime)");
  app.add_option("--y", c.point_y, "second point (septime)");
  app.add_option("--pairs", c.pairs, "movepoints pairs p:q;p:q");

  app.add_option("--delta", c.delta, "link slack")->capture_default_str();
  app.add_option("--eps", c.eps, "shadowing radius")->capture_default_str();
  app.add_option("--Delta,--big-delta", c.big_delta, "perturbation size")->capture_default_str();
  app.add_option("--eta", c.eta, "separation threshold")->capture_default_str();
  app.add_option("--mu", c.mu, "minimum pair distance for N(mu)")->capture_default_str();
  app.add_option("--pair-tol", c.pair_tol, "smallest sampled pair distance")->capture_default_str();
  app.add_option("--bump", c.bump, "bump displacement for semiconj")->capture_default_str();
  app.add_option("--min-sep", c.min_sep, "random movepoints separation")->capture_default_str();
  app.add_option("--tol", c.tol, "solver tolerance")->capture_default_str();
  app.add_option("--Delta-grid", c.delta_grid, "expansiveness candidates")->delimiter(',')->capture_default_str();

  app.add_option("--len", c.len, "chain length")->capture_default_str();
  app.add_option("--chains", c.chains, "chains in a shadow batch")->capture_default_str();
  app.add_option("--m", c.m, "last adjusted index (perturb)")->capture_default_str();
  app.add_option("--K", c.k_window, "semiconj window")->capture_default_str();
  app.add_option("--N-cap", c.n_cap, "orbit search cap")->capture_default_str();
  app.add_option("--grid", c.grid, "grid resolution per axis (0 = default)")->capture_default_str();
  app.add_option("--trials", c.trials, "uniqueness trials")->capture_default_str();
  app.add_option("--samples", c.samples, "semiconj samples")->capture_default_str();
  app.add_option("--centers", c.centers, "cover centers")->capture_default_str();
  app.add_option("--probes", c.probes, "cover probes per center")->capture_default_str();
  app.add_option("--k-pairs", c.k_pairs, "random movepoints pairs")->capture_default_str();
  app.add_option("--max-iter", c.max_iter, "Newton iteration cap")->capture_default_str();
  app.add_option("--padding", c.padding, "Newton padding")->capture_default_str();
  app.add_option("--decimals", c.decimals, "rounding noise decimals")->capture_default_str();
  app.add_option("--map-index", c.map_index, "map for cover and rho metrics")->capture_default_str();
  app.add_option("--max-counterexamples", c.max_counterexamples, "cover CSV cap")->capture_default_str();
  app.add_option("--seed", c.seed, "random seed")->capture_default_str();

  app.add_option("--noise", c.noise, "uniform or rounding")->capture_default_str();
  app.add_option("--solver", c.solver, "auto, contraction, linear-hyperbolic, newton")->capture_default_str();
  app.add_option("--metric", c.metric, "rho0, rho1, D0, D1")->capture_default_str();
  app.add_option("--pairing", c.pairing, "matched or all-pairs")->capture_default_str();

  app.add_option("--out", c.out, "result JSON path");
  app.add_option("--csv", c.csv, "CSV artifact path");
  app.add_option("--threads", c.threads, "worker threads (0 = all cores)")
      ->envname("IFSSHADOW_THREADS")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shadowing and stability experiments for iterated function systems"};
  app.set_config("--config", "", "read options from a TOML/INI file");
  RunConfig cfg;
  add_options(app, cfg);
  bool dump = false;
  bool list = false;
  app.add_flag("--dump-config", dump, "print the effective configuration and exit")->configurable(false);
  app.add_flag("--list-systems", list, "print the system catalog and exit")->configurable(false);
  for (const auto& name : command_names()) {
    app.add_subcommand(name)->fallthrough();
  }
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (list) {
    for (const auto& e : system_catalog()) std::cout << e.usage << "  " << e.doc << "\n";
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << "a command is required: generate, shadow, verify, expansive, septime, perturb, movepoints, "
                 "semiconj, cover or metrics\n";
    return 2;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (dump) {
    std::cout << app.config_to_str(true, false);
    return 0;
  }
  if (cfg.threads > 0) set_thread_count(cfg.threads);

  try {
    const Json out = run_command(cfg);
    const std::string text = dump_json(out);
    if (!cfg.out.empty()) write_file_atomic(cfg.out, text);
    std::cout << text;
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
