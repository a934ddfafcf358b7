#pragma once

// Fiber dynamics on CP^{d-1}: projective points and maps, stationary measures
// by backward iteration, Wasserstein distances and contraction diagnostics.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "leafwalk/fls.hpp"
#include "leafwalk/rng.hpp"
#include "leafwalk/word.hpp"

namespace leafwalk::projdyn {

using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using fls::OrbitMeasure;
using lattice::Word;

class ProjectiveError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unit vector representing a complex line; the first coordinate of largest
// modulus is real and positive.
class ProjPoint {
 public:
  explicit ProjPoint(const Vector& v);
  static ProjPoint basis(int dim, int k);

  const Vector& vec() const { return v_; }
  int dim() const { return static_cast<int>(v_.size()); }

 private:
  Vector v_;
};

// Invertible d x d complex matrix taken up to scalars. Stored with det = 1 and
// the d-th root of unity chosen so the first entry of largest modulus has
// argument in (-pi/d, pi/d].
class ProjMap {
 public:
  explicit ProjMap(const Matrix& m);
  static ProjMap identity(int dim);
  // For m already of determinant 1 (products, inverses): only the phase is
  // fixed, so huge but well-defined matrices do not lose the determinant to
  // cancellation.
  static ProjMap unimodular(const Matrix& m);

  const Matrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

  ProjMap operator*(const ProjMap& rhs) const { return unimodular(m_ * rhs.m_); }
  ProjMap inverse() const;

  // Equality as projective maps.
  bool approx_equal(const ProjMap& other, double tol = 1e-9) const;

 private:
  ProjMap() = default;
  void fix_phase();
  Matrix m_;
};

ProjPoint proj_apply(const ProjMap& g, const ProjPoint& x);
ProjPoint proj_apply(const Matrix& g, const ProjPoint& x);

// Fubini-Study angle arccos |<x, y>|, evaluated in a cancellation-free form.
double fs_dist(const ProjPoint& x, const ProjPoint& y);

// Representation of the free group on A, B: any pair of matrices will do.
class RepTable {
 public:
  RepTable(ProjMap a, ProjMap b);

  static RepTable trivial(int dim = 2);
  // A, B acting by their own real matrices.
  static RepTable inclusion();
  // Two rotations of SU(2) generating a dense subgroup.
  static RepTable rotation();
  // A and B both sent to diag(2, 1/2).
  static RepTable diagonal();

  int dim() const { return gens_[0].dim(); }
  const ProjMap& generator(char letter) const;
  ProjMap word_to_map(const Word& w) const;
  // rho(w) scaled to largest entry 1; *log_scale receives log of the factor
  // restoring determinant 1.
  Matrix word_matrix(const Word& w, double* log_scale = nullptr) const;
  // rho(w) x applied one letter at a time; slow but immune to the underflow
  // of word_matrix for very long words.
  ProjPoint apply_word(const Word& w, const ProjPoint& x) const;
  // log of the spectral norm of the determinant-1 image of w.
  double log_norm(const Word& w) const;

 private:
  std::array<ProjMap, 4> gens_;  // A, a, B, b
};

// Images of the atoms of an OrbitDraw as word_matrix, in the same order.
std::vector<Matrix> atom_maps(const RepTable& rep, const fls::OrbitDraw& draw);

// Below this norm of m x (|x| = 1, largest entry of m is 1) the image has lost
// too many digits and the word is applied letter by letter instead.
inline constexpr double kDegenerateImage = 1e-6;

// rho(w) x where m = rep.word_matrix(w).
ProjPoint apply_atom(const RepTable& rep, const Word& w, const Matrix& m, const ProjPoint& x);

struct ParticleCloud {
  std::vector<ProjPoint> points;
  std::vector<double> weights;

  static ParticleCloud uniform(std::vector<ProjPoint> pts);
  std::size_t size() const { return points.size(); }
  bool is_uniform() const;
  // Throws ProjectiveError if empty, negative weights or mass != 1.
  void validate() const;
};

struct BackwardResult {
  ProjPoint point;
  bool converged;
  int steps;         // draws consumed
  int converged_at;  // first counted draw of the final run of small increments, 0 if none
};

struct BackwardOptions {
  double tol = 1e-8;
  int max_steps = 1000;
  int run_length = 5;
};

// z_k = rho(g_1) ... rho(g_k) x0 with g_i iid from mu; the newest factor acts
// first. Draws of the identity word leave z unchanged and are not counted
// towards the run of small increments.
BackwardResult backward_sample(const RepTable& rep, const OrbitMeasure& mu, const ProjPoint& x0,
                               const BackwardOptions& opt, Rng& rng);

struct StationaryCloud {
  ParticleCloud cloud;
  double converged_fraction;
};

StationaryCloud stationary_cloud(const RepTable& rep, const OrbitMeasure& mu, const ProjPoint& x0, std::size_t n,
                                 const BackwardOptions& opt, std::uint64_t seed);

// Same, but throws ProjectiveError if fewer than 99% of particles converged.
ParticleCloud stationary_cloud_checked(const RepTable& rep, const OrbitMeasure& mu, const ProjPoint& x0,
                                       std::size_t n, const BackwardOptions& opt, std::uint64_t seed);

inline constexpr std::size_t kMaxAssignmentSize = 2048;

// Multinomial resampling to `n` equally weighted points.
ParticleCloud resample(const ParticleCloud& cloud, std::size_t n, std::uint64_t seed);

// Exact W1 under fs_dist between equally weighted clouds of equal size.
// Other inputs are first resampled to min(max size, 2048) points.
double wasserstein1(const ParticleCloud& a, const ParticleCloud& b, std::uint64_t seed = 0);

// Each particle pushed by rho(g) for an independent g ~ mu.
ParticleCloud push_forward(const RepTable& rep, const OrbitMeasure& mu, const ParticleCloud& cloud,
                           std::uint64_t seed);

// W1 between nu and its one-step Markov evolution under mu_fresh.
double markov_residual(const RepTable& rep, const OrbitMeasure& mu_fresh, const ParticleCloud& nu,
                       std::uint64_t seed);

struct GapEstimate {
  double estimate;
  double ci_low;
  double ci_high;
  double std_error;
};

// (1/n) log(sigma_1 / sigma_2) of n-step products, averaged over runs with a
// Student-t 95% interval. Products are renormalized at every step.
GapEstimate lyapunov_gap(const RepTable& rep, const OrbitMeasure& mu, int n_steps, int n_runs, std::uint64_t seed);

// Probe points drawn uniformly for the Fubini-Study volume.
std::vector<ProjPoint> random_points(int dim, std::size_t n, std::uint64_t seed, StreamTag tag = StreamTag::kProbe);

double diameter(const std::vector<ProjPoint>& pts);

// diameters[k] is the diameter of the probes' image under one sampled
// (k+1)-step product.
std::vector<double> contraction_series(const RepTable& rep, const OrbitMeasure& mu, int n_max,
                                       const std::vector<ProjPoint>& probes, std::uint64_t seed);
std::vector<double> contraction_series(const RepTable& rep, const OrbitMeasure& mu, int n_max, std::size_t n_probe,
                                       std::uint64_t seed);

// Finite evidence for the contracting / strongly irreducible hypotheses.
struct IrreducibilityCertificate {
  bool has_proximal_word;        // some word of length <= 6 has a simple top eigenvalue
  bool common_eigenvector_found;  // a shared eigenvector among 20 random words
};
IrreducibilityCertificate irreducibility_certificate(const RepTable& rep, std::uint64_t seed);

nlohmann::json to_json(const ParticleCloud& cloud, std::uint64_t seed);
ParticleCloud particle_cloud_from_json(const nlohmann::json& j);

}  // namespace leafwalk::projdyn
