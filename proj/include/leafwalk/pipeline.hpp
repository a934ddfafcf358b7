#pragma once

// Subcommand drivers behind the leafwalk tool. Each run writes its artifacts
// into an output directory and returns the process exit status:
// 0 all thresholds pass, 1 some threshold fails (artifacts still written).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "leafwalk/config.hpp"

namespace leafwalk::pipeline {

enum class Subcommand { kDiscretize, kStationary, kCheck, kLyapunov, kMoments, kReport };

std::optional<Subcommand> parse_subcommand(std::string_view name);
std::string subcommand_name(Subcommand s);

struct DiagnosticRow {
  std::string test_name;
  double value;
  double threshold;
  std::optional<double> std_error;
  std::uint64_t n_samples;
  std::uint64_t seed;
  bool pass;
};

inline constexpr std::string_view kCsvHeader = "test_name,value,threshold,std_error,n_samples,seed,pass";

std::string format_csv(const std::vector<DiagnosticRow>& rows);
std::vector<DiagnosticRow> parse_csv(std::string_view text);

// Base point at 0.1 of the in-radius of the fundamental domain from p0.
hypgeom::HPoint perturbed_base();

struct RunOutcome {
  int exit_code;
  std::vector<DiagnosticRow> rows;
  std::vector<std::filesystem::path> files;  // in write order
};

// Runs with cfg.seed; the directory is created if needed.
RunOutcome run(Subcommand sub, const config::Config& cfg, const std::filesystem::path& out_dir,
               std::ostream* log = nullptr);

}  // namespace leafwalk::pipeline
