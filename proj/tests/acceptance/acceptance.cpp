// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "leafwalk/config.hpp"
#include "leafwalk/fls.hpp"
#include "leafwalk/harmonic.hpp"
#include "leafwalk/hypgeom.hpp"
#include "leafwalk/lattice.hpp"
#include "leafwalk/pipeline.hpp"
#include "leafwalk/projdyn.hpp"

using namespace leafwalk;
namespace fs = std::filesystem;

namespace {

using hypgeom::Complex;
using hypgeom::HPoint;
using lattice::Word;

constexpr std::uint64_t kSeed = 1;

std::uint64_t seed(std::uint64_t k) { return fls::derive_seed(kSeed, k); }

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Shared fixtures, built on first use.
const fls::Discretization& disc() {
  static const fls::Discretization d(lattice::GroupAtlas::build_gamma2(), fls::BallSpec{});
  return d;
}

const fls::OrbitMeasure& mu_p0() {
  static const fls::OrbitMeasure mu = disc().sample_mu(HPoint(), Word(), 20000, seed(1));
  return mu;
}

const projdyn::ParticleCloud& nu() {
  static const projdyn::ParticleCloud cloud = projdyn::stationary_cloud_checked(
      projdyn::RepTable::inclusion(), mu_p0(), projdyn::ProjPoint::basis(2, 0), 1000, {}, seed(3));
  return cloud;
}

HPoint in_copy(const char* word) {
  const auto& atlas = disc().atlas();
  return hypgeom::apply(atlas.word_to_isometry(Word::parse(word)), pipeline::perturbed_base());
}

Verdict geometry() {
  std::mt19937_64 gen(seed(100));
  std::uniform_real_distribution<double> entry(-2.0, 2.0), unit(0.0, 1.0);
  auto point = [&] {
    return HPoint::from_disc(std::polar(0.9 * std::sqrt(unit(gen)), 2.0 * std::numbers::pi * unit(gen)));
  };
  double worst = 0.0;
  for (int k = 0; k < 100000; ++k) {
    double a, b, c, d;
    do {
      a = entry(gen), b = entry(gen), c = entry(gen), d = entry(gen);
    } while (a * d - b * c < 0.2);
    const hypgeom::Isometry g(a, b, c, d);
    const HPoint p = point(), q = point();
    worst = std::max(worst, std::abs(hypgeom::dist(hypgeom::apply(g, p), hypgeom::apply(g, q)) - hypgeom::dist(p, q)));
  }

  const Complex y = 0.5;
  const int n = 100000;
  std::vector<double> s(n);
  for (double& t : s) t = hypgeom::poisson_exit_sample(y, unit(gen)).value();
  std::sort(s.begin(), s.end());
  double ks = 0.0;
  for (int k = 0; k < n; ++k) {
    const double f = hypgeom::poisson_cdf(y, s[k]);
    ks = std::max({ks, std::abs(f - static_cast<double>(k) / n), std::abs(f - static_cast<double>(k + 1) / n)});
  }
  return {worst < 1e-10 && ks < 0.01, "max invariance error " + fmt("%.2e", worst) + ", KS " + fmt("%.4f", ks)};
}

Verdict separation() {
  const auto& atlas = disc().atlas();
  const std::size_t words = atlas.orbit_enumerate(6).size() - 1;
  const double md = atlas.min_displacement(6);
  const double err = std::abs(md - std::acosh(3.0));
  return {err < 1e-9 && words == 1456,
          std::to_string(words) + " words, min displacement " + fmt("%.12f", md) + ", error " + fmt("%.1e", err)};
}

Verdict full_support() {
  const std::uint64_t n = 100000;
  const auto mu = disc().sample_mu(HPoint(), Word(), n, seed(200));
  int positive = 0, total = 0;
  for (const auto& op : disc().atlas().orbit_enumerate(2)) {
    ++total;
    positive += mu.count(op.word) > 0 ? 1 : 0;
  }
  const double p = mu.weight(Word());
  const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  const double bound = 1.0 / disc().balls().harnack() - 3.0 * sigma;
  return {positive == 17 && total == 17 && p >= bound,
          std::to_string(positive) + "/" + std::to_string(total) + " words of length <= 2, P(e) = " + fmt("%.4f", p) +
              " >= " + fmt("%.4f", bound)};
}

Verdict equivariance_discretization() {
  bool ok = true;
  std::string detail;
  std::uint64_t k = 300;
  for (const char* xi : {"A", "B", "AB"}) {
    const auto r = fls::equivariance_tv(disc(), Word::parse(xi), 20000, 3, seed(k++));
    ok = ok && r.tv < r.threshold;
    detail += std::string(detail.empty() ? "" : ", ") + xi + ": " + fmt("%.4f", r.tv) + " < " + fmt("%.4f", r.threshold);
  }
  return {ok, "TV " + detail};
}

Verdict harmonicity() {
  const auto rep = projdyn::RepTable::inclusion();
  const std::vector<harmonic::TestFunction> fs{harmonic::TestFunction::pauli_z(), harmonic::TestFunction::pauli_x(),
                                               harmonic::TestFunction::pauli_mix()};
  bool ok = true;
  double worst = 0.0;
  int count = 0;
  std::uint64_t k = 400;
  for (const auto& [p, hint] : {std::pair{pipeline::perturbed_base(), Word()}, std::pair{in_copy("A"), Word::parse("A")}}) {
    const auto res = harmonic::mean_value_residual(rep, disc(), p, hint, 0.5, fs, 16, 2000, nu(), seed(k++));
    for (const auto& m : res) {
      ok = ok && m.residual < 3.0 * m.std_error;
      worst = std::max(worst, m.residual / m.std_error);
      ++count;
    }
  }
  return {ok && count == 6, std::to_string(count) + " residuals, largest " + fmt("%.2f", worst) + " standard errors"};
}

Verdict stationarity() {
  const auto rep = projdyn::RepTable::inclusion();
  const auto fresh = disc().sample_mu(HPoint(), Word(), 20000, seed(2));
  const double markov = projdyn::markov_residual(rep, fresh, nu(), seed(4));
  const auto cond = harmonic::conditional_measure(rep, fresh, nu(), seed(500));
  const double round_trip = projdyn::wasserstein1(cond.cloud, nu(), seed(501));
  return {markov < 0.05 && round_trip < 0.05,
          "Markov residual " + fmt("%.4f", markov) + ", round trip W1 " + fmt("%.4f", round_trip)};
}

Verdict conditionals() {
  const auto rep = projdyn::RepTable::inclusion();
  bool ok = true;
  double worst_eq = 0.0, worst_tr = 0.0;
  std::uint64_t k = 600;
  const std::vector<std::pair<HPoint, Word>> bases{
      {pipeline::perturbed_base(), Word()}, {in_copy("A"), Word::parse("A")}, {in_copy("AB"), Word::parse("AB")}};
  for (const auto& [p, hint] : bases) {
    for (const char* xi : {"A", "B", "aB"}) {
      const double r = harmonic::equivariance_residual(rep, disc(), Word::parse(xi), p, hint, nu(), 20000, seed(k++));
      ok = ok && r < 0.05;
      worst_eq = std::max(worst_eq, r);
    }
  }
  for (const char* copy : {"A", "AB", "ba"}) {
    const double r = harmonic::transport_residual(rep, disc(), in_copy(copy), Word::parse(copy), nu(), 20000, seed(k++));
    ok = ok && r < 0.05;
    worst_tr = std::max(worst_tr, r);
  }
  return {ok, "largest equivariance W1 " + fmt("%.4f", worst_eq) + " (9), largest transport W1 " +
                  fmt("%.4f", worst_tr) + " (3)"};
}

Verdict uniqueness() {
  const double inc = harmonic::uniqueness_gap(projdyn::RepTable::inclusion(), mu_p0(), 1000, {seed(5), seed(6)});
  const double triv = harmonic::uniqueness_gap(projdyn::RepTable::trivial(), mu_p0(), 1000, {seed(5), seed(6)});
  const bool ok = inc < 0.05 && std::abs(triv - std::numbers::pi / 2) <= 0.01;
  return {ok, "inclusion gap " + fmt("%.4f", inc) + ", trivial gap " + fmt("%.6f", triv)};
}

Verdict contraction() {
  const auto inc = projdyn::RepTable::inclusion();
  const auto gap = projdyn::lyapunov_gap(inc, mu_p0(), 200, 20, seed(30));
  int contracted = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    contracted += projdyn::contraction_series(inc, mu_p0(), 50, 64, seed(1000 + t)).back() < 0.01 ? 1 : 0;
  }
  fls::OrbitMeasure delta_a;
  delta_a.add(Word::parse("A"));
  const auto diag = projdyn::lyapunov_gap(projdyn::RepTable::diagonal(), delta_a, 200, 20, seed(31));
  const double err = std::abs(diag.estimate - 2.0 * std::numbers::ln2);
  return {gap.ci_low > 0.0 && contracted >= 95 && err < 1e-9,
          "gap " + fmt("%.4f", gap.estimate) + " CI [" + fmt("%.4f", gap.ci_low) + ", " + fmt("%.4f", gap.ci_high) +
              "], contracted " + std::to_string(contracted) + "/100, diagonal error " + fmt("%.1e", err)};
}

Verdict integrability() {
  const auto rep = projdyn::RepTable::inclusion();
  const auto& atlas = disc().atlas();
  const std::uint64_t n = 100000;
  // Per-index streams: the doubled sample extends the first one.
  const auto mu1 = disc().sample_mu(HPoint(), Word(), n, seed(700));
  const auto mu2 = disc().sample_mu(HPoint(), Word(), 2 * n, seed(700));
  const auto s1 = harmonic::integrability_stats(rep, mu1, atlas);
  const auto s2 = harmonic::integrability_stats(rep, mu2, atlas);
  const double drift_norm = std::abs(s2.mean_log_norm - s1.mean_log_norm) / std::abs(s1.mean_log_norm);
  const double drift_dist = std::abs(s2.mean_dist - s1.mean_dist) / std::abs(s1.mean_dist);
  const double gen = harmonic::generator_ratio(rep, atlas);
  fls::OrbitMeasure delta_a;
  delta_a.add(Word::parse("A"));
  const double single = harmonic::integrability_stats(rep, delta_a, atlas).max_ratio;
  const bool finite = std::isfinite(s2.mean_log_norm) && std::isfinite(s2.mean_dist);
  const bool ok = finite && drift_norm < 0.1 && drift_dist < 0.1 && s2.max_ratio <= gen + 0.1 &&
                  std::abs(single - 0.5) < 1e-9;
  return {ok, "E log||rho|| " + fmt("%.4f", s2.mean_log_norm) + ", E dist " + fmt("%.4f", s2.mean_dist) + ", drifts " +
                  fmt("%.4f", drift_norm) + "/" + fmt("%.4f", drift_dist) + ", max ratio " + fmt("%.4f", s2.max_ratio) +
                  " <= " + fmt("%.4f", gen + 0.1) + ", single atom " + fmt("%.12f", single)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / ("leafwalk_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  config::Config cfg;
  cfg.seed = 1;
  const auto a = pipeline::run(pipeline::Subcommand::kCheck, cfg, root / "a");
  const auto b = pipeline::run(pipeline::Subcommand::kCheck, cfg, root / "b");
  bool same = a.files.size() == b.files.size() && !a.files.empty();
  for (std::size_t i = 0; same && i < a.files.size(); ++i) {
    same = a.files[i].filename() == b.files[i].filename() && slurp(a.files[i]) == slurp(b.files[i]);
  }
  const std::size_t n = a.files.size();
  fs::remove_all(root);
  return {same, std::to_string(n) + " artifacts compared byte for byte"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"geometry exactness", geometry},
      {"separation oracle", separation},
      {"discretization full support", full_support},
      {"discretization equivariance", equivariance_discretization},
      {"harmonicity (mean value)", harmonicity},
      {"stationarity and round trip", stationarity},
      {"conditional equivariance and transport", conditionals},
      {"uniqueness and negative control", uniqueness},
      {"contraction and Lyapunov gap", contraction},
      {"integrability", integrability},
      {"determinism", determinism},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v{false, ""};
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %2d %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", index, name.c_str(), v.detail.c_str(),
                secs);
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
