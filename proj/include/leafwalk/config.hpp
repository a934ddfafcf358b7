#pragma once

// Plain-text run configuration:
//
//   # comment
//   [geometry]
//   r = 0.3
//   [representation]
//   rep = custom
//   A = 1 2 0 1            # row-major, entries like 0.5, -2i, 1+0.5i
//
// Keys may also appear before any section header.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "leafwalk/fls.hpp"
#include "leafwalk/projdyn.hpp"

namespace leafwalk::config {

using fls::ConfigError;

struct Config {
  std::string group = "gamma2";
  fls::BallSpec balls;

  // "inclusion", "trivial", "rotation", "diagonal" or "custom" (A and B given).
  std::string rep = "inclusion";
  std::optional<projdyn::Matrix> a;
  std::optional<projdyn::Matrix> b;

  // Driving measure for the lyapunov subcommand: "discretized" or a single
  // word. Empty means "A" for the diagonal preset and "discretized" otherwise.
  std::string drive;

  std::size_t N = 1000;
  std::uint64_t n_mu = 20000;
  std::uint64_t n_mu_mean = 2000;  // orbit samples per evaluation in the mean-value test
  int n_circle = 16;
  double circle_radius = 0.5;
  int n_steps = 200;
  int n_runs = 20;
  int n_max = 50;
  int n_products = 100;
  std::size_t n_probe = 64;
  int bootstrap = 200;
  int max_len = 3;  // truncation length of the equivariance TV test

  double w1_threshold = 0.05;
  double sigma_threshold = 3.0;

  std::uint64_t seed = 1;
  std::string out = "out";

  projdyn::RepTable rep_table() const;
  // Resolved value of `drive`.
  std::string driving_measure() const;
};

// Throws ConfigError with a "line N:" prefix on the offending line.
Config parse_config(std::string_view text);
Config load_config(const std::filesystem::path& path);

// "1.5", "-2i", "0.5-1e-3i", "i" ...
std::complex<double> parse_complex(std::string_view token);

}  // namespace leafwalk::config
