#pragma once

// Harmonic-measure side of the correspondence. A stationary cloud nu on the
// fiber is spread over the plane by m_p = sum_g mu_p(g) rho(g)_* nu, and the
// identities relating these conditionals are checked in weak form
// (Wasserstein distances and integrals of test functions).

#include <cstdint>
#include <utility>
#include <vector>

#include "leafwalk/fls.hpp"
#include "leafwalk/projdyn.hpp"

namespace leafwalk::harmonic {

using fls::Discretization;
using fls::OrbitMeasure;
using hypgeom::HPoint;
using lattice::GroupAtlas;
using lattice::Word;
using projdyn::Matrix;
using projdyn::ParticleCloud;
using projdyn::ProjMap;
using projdyn::ProjPoint;
using projdyn::RepTable;

// f(x) = <x, q x> for a traceless Hermitian q of spectral norm 1 (or q = 0).
class TestFunction {
 public:
  // Removes the trace and rescales to spectral norm 1. Throws
  // ProjectiveError if q is not Hermitian or is a multiple of the identity.
  explicit TestFunction(const Matrix& q);

  static TestFunction zero(int dim);
  static TestFunction pauli_z();
  static TestFunction pauli_x();
  static TestFunction pauli_mix();  // (sigma_z + sigma_x) / sqrt 2

  const Matrix& matrix() const { return q_; }
  double operator()(const ProjPoint& x) const;

 private:
  TestFunction() = default;
  Matrix q_;
};

struct Conditional {
  HPoint base;
  Word word;
  ParticleCloud cloud;
};

// The mixture sum_g mu(g) rho(g)_* nu, one draw of g per particle.
Conditional conditional_measure(const RepTable& rep, const OrbitMeasure& mu_p, const ParticleCloud& nu,
                                std::uint64_t seed, const HPoint& base = HPoint(), const Word& word = Word());

// Holonomy of the loop class w: rho(w)^-1.
ProjMap holonomy_of_word(const RepTable& rep, const Word& w);

ParticleCloud push_cloud(const ProjMap& g, const ParticleCloud& cloud);

// W1 between rho(xi)_* m_p and m_{xi p}, with independent orbit samples.
double equivariance_residual(const RepTable& rep, const Discretization& disc, const Word& xi, const HPoint& p,
                             const Word& hint, const ParticleCloud& nu, std::uint64_t n_mu, std::uint64_t seed);

// With w the domain copy of p: W1 between m at w^-1 p and hol(w)_* m_p.
double transport_residual(const RepTable& rep, const Discretization& disc, const HPoint& p, const Word& hint,
                          const ParticleCloud& nu, std::uint64_t n_mu, std::uint64_t seed);

// Added to the mean-value standard error; |f| <= 1 so this is far below
// any Monte Carlo error.
inline constexpr double kRoundoff = 1e-12;

struct MeanValue {
  double residual;
  double std_error;
  double center_value;
  std::vector<double> circle_values;  // u_f at angle 2 pi k / n_circle
};

// u_f(x) = integral of f against m_x. Compares u_f(p) with the average of u_f
// over n_circle equally spaced points of the hyperbolic circle S(p, s); every
// evaluation uses its own orbit sample of size n_mu. One result per test
// function; the orbit samples are shared across functions.
std::vector<MeanValue> mean_value_residual(const RepTable& rep, const Discretization& disc, const HPoint& p,
                                           const Word& hint, double s, const std::vector<TestFunction>& fs,
                                           int n_circle, std::uint64_t n_mu, const ParticleCloud& nu,
                                           std::uint64_t seed);

// Estimate of u_f(x) from an orbit sample, with its Monte Carlo variance.
struct HarmonicEstimate {
  double value;
  double variance;
};
std::vector<HarmonicEstimate> evaluate_harmonic(const RepTable& rep, const OrbitMeasure& mu, const ParticleCloud& nu,
                                                const std::vector<TestFunction>& fs);

struct Integrability {
  double mean_log_norm;
  double mean_dist;
  double max_ratio;  // max over the support of log||rho(g)|| / max(dist(p0, g p0), 1)
};
Integrability integrability_stats(const RepTable& rep, const OrbitMeasure& mu, const GroupAtlas& atlas);

// The same ratio maximized over the four generators.
double generator_ratio(const RepTable& rep, const GroupAtlas& atlas);

// W1 between stationary clouds started at e_1 and e_2 with distinct seeds.
double uniqueness_gap(const RepTable& rep, const OrbitMeasure& mu, std::size_t n,
                      std::pair<std::uint64_t, std::uint64_t> seeds,
                      const projdyn::BackwardOptions& opt = projdyn::BackwardOptions());

nlohmann::json to_json(const Conditional& c, std::uint64_t seed);

}  // namespace leafwalk::harmonic
