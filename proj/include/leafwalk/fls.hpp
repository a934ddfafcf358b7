#pragma once

// Monte Carlo discretization of hyperbolic Brownian motion onto the orbit of
// the base point: walk-on-spheres to the inner balls F_w = B(w p0, r), then a
// Harnack-weighted acceptance on the outer ball V_w = B(w p0, R).

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "leafwalk/hypgeom.hpp"
#include "leafwalk/lattice.hpp"
#include "leafwalk/rng.hpp"

namespace leafwalk::fls {

using hypgeom::Complex;
using hypgeom::HPoint;
using lattice::GroupAtlas;
using lattice::ShortLex;
using lattice::Word;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// (1 + rho) / (1 - rho) with rho = tanh(r/2) / tanh(R/2).
double harnack_constant(double r, double R);

struct BallSpec {
  double r = 0.3;
  double R = 0.8;
  double eps_shell = 1e-3;
  double step_cap = 0.5;

  // Inner radius of V_w after normalizing it to the unit disc.
  double rho() const;
  double harnack() const { return harnack_constant(r, R); }

  // Throws ConfigError unless 0 < r < R, 2R < separation and the walk
  // constants are positive.
  void validate(double separation) const;
};

// Empirical probability measure on the group, keyed by reduced word.
class OrbitMeasure {
 public:
  using Entries = std::map<Word, std::uint64_t, ShortLex>;

  void add(const Word& w, std::uint64_t count = 1);

  const Entries& entries() const { return entries_; }
  std::uint64_t total() const { return total_; }
  std::uint64_t count(const Word& w) const;
  double weight(const Word& w) const;
  std::size_t support_size() const { return entries_.size(); }

  // The measure gamma -> mu(xi^-1 gamma), i.e. every atom moved to xi * gamma.
  OrbitMeasure left_translate(const Word& xi) const;

  // Atoms of length <= max_len, renormalized to total mass 1.
  std::map<Word, double, ShortLex> truncated(std::size_t max_len) const;

  // One entry per sample, in shortlex order of the atoms.
  std::vector<Word> expand() const;

 private:
  Entries entries_;
  std::uint64_t total_ = 0;
};

// Constant-time-ish iid draws from an OrbitMeasure (binary search on the
// cumulative counts). Keeps a copy of the atoms.
class OrbitDraw {
 public:
  explicit OrbitDraw(const OrbitMeasure& mu);
  const Word& operator()(Rng& rng) const { return atoms_[index(rng)]; }
  std::size_t index(Rng& rng) const;
  const std::vector<Word>& atoms() const { return atoms_; }

 private:
  std::vector<Word> atoms_;
  std::vector<std::uint64_t> cumulative_;
};

double total_variation(const std::map<Word, double, ShortLex>& p, const std::map<Word, double, ShortLex>& q);

struct BalayageOutcome {
  bool accepted;
  hypgeom::BoundaryAngle exit;
};

// One acceptance attempt at a normalized hitting point y (|y| <= rho): draw
// the exit angle from y and accept with probability poisson_ratio / C.
BalayageOutcome balayage_attempt(Complex y, double harnack, Rng& rng);

struct WalkStats {
  std::uint64_t steps = 0;
  std::uint64_t attempts = 0;
};

class Discretization {
 public:
  Discretization(GroupAtlas atlas, BallSpec balls);

  const GroupAtlas& atlas() const { return atlas_; }
  const BallSpec& balls() const { return balls_; }
  const std::vector<Word>& contacts() const { return contact_words_; }

  // One draw from mu_p. `hint` names a domain copy near p (empty is fine for
  // points near the base point).
  Word sample_one(const HPoint& p, const Word& hint, Rng& rng, WalkStats* stats = nullptr) const;

  // n draws with per-sample streams (seed, index).
  OrbitMeasure sample_mu(const HPoint& p, const Word& hint, std::uint64_t n, std::uint64_t seed,
                         WalkStats* stats = nullptr) const;

 private:
  GroupAtlas atlas_;
  BallSpec balls_;
  std::vector<Word> contact_words_;
  std::vector<Complex> contact_centers_;
  double tanh_r_;
  double tanh_R_;
  double harnack_;
};

struct EquivarianceTv {
  double tv;
  double threshold;  // 99% quantile of the half-split null
  std::uint64_t n;
};

// TV distance between xi^-1 . mu_{xi p0} and mu_{p0}, truncated to length <= L.
EquivarianceTv equivariance_tv(const Discretization& disc, const Word& xi, std::uint64_t n, std::size_t max_len,
                               std::uint64_t seed, int bootstrap_rounds = 200);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k);

nlohmann::json to_json(const OrbitMeasure& mu, const HPoint& base, const BallSpec& balls, std::uint64_t seed);
OrbitMeasure orbit_measure_from_json(const nlohmann::json& j);

}  // namespace leafwalk::fls
