#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ifsshadow/io.hpp"

namespace ifsshadow {

/// Everything a command needs; CLI flags and config files fill it in.
/// Empty strings mean "not given".
struct RunConfig {
  std::string command;
  std::string system = "cat";
  std::string g_system;
  std::string sigma = "constant:0";
  std::string x0;
  std::string chain_in;
  std::string shadow_in;
  std::string point_x;
  std::string point_y;
  std::string pairs;

  double delta = 0.01;
  double eps = 0.05;
  double big_delta = 0.05;
  double eta = 0.1;
  double mu = 0.0;
  double pair_tol = 1e-3;
  double bump = 0.0;
  double min_sep = 0.2;
  double tol = 1e-10;
  std::vector<double> delta_grid = {0.4, 0.3, 0.2, 0.1, 0.05, 0.02, 0.01};

  int len = 1000;
  int chains = 1;
  int m = 10;
  int k_window = 20;
  int n_cap = 30;
  int grid = 0;
  int trials = 20;
  int samples = 200;
  int centers = 1000;
  int probes = 1000;
  int k_pairs = 5;
  int max_iter = 50;
  int padding = 32;
  int decimals = 2;
  int map_index = 0;
  int max_counterexamples = 1000;
  std::uint64_t seed = 0;

  std::string noise = "uniform";
  std::string solver = "auto";
  std::string metric = "rho0";
  std::string pairing = "matched";

  std::string out;
  std::string csv;
  int threads = 0;
};

const std::vector<std::string>& command_names();

/// Parameters that shape the result (threads and output paths excluded).
Json config_to_json(const RunConfig& cfg);

/// Runs one command and returns {"command", "config", "result"}. Writes the
/// CSV artifact when cfg.csv is set. Throws ConfigError for bad input and
/// Error for contract violations.
Json run_command(const RunConfig& cfg);

}  // namespace ifsshadow
