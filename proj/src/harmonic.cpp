#include "leafwalk/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace leafwalk::harmonic {

namespace {

using Complex = std::complex<double>;

double spectral_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

Matrix pauli(Complex a, Complex b, Complex c, Complex d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TestFunction::TestFunction(const Matrix& q) {
  if (q.rows() != q.cols() || q.rows() < 1) throw projdyn::ProjectiveError("test function needs a square matrix");
  if (!q.allFinite()) throw projdyn::ProjectiveError("test function has non-finite entries");
  const double scale = std::max(q.cwiseAbs().maxCoeff(), 1.0);
  if ((q - q.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw projdyn::ProjectiveError("test function matrix is not Hermitian");
  }
  const auto d = q.rows();
  Matrix h = 0.5 * (q + q.adjoint());
  h -= (h.trace() / static_cast<double>(d)) * Matrix::Identity(d, d);
  const double norm = spectral_norm(h);
  if (!(norm > 1e-12 * scale)) throw projdyn::ProjectiveError("test function is constant");
  q_ = h / norm;
}

TestFunction TestFunction::zero(int dim) {
  TestFunction f;
  f.q_ = Matrix::Zero(dim, dim);
  return f;
}

TestFunction TestFunction::pauli_z() { return TestFunction(pauli(1.0, 0.0, 0.0, -1.0)); }
TestFunction TestFunction::pauli_x() { return TestFunction(pauli(0.0, 1.0, 1.0, 0.0)); }
TestFunction TestFunction::pauli_mix() { return TestFunction(pauli(1.0, 1.0, 1.0, -1.0)); }

double TestFunction::operator()(const ProjPoint& x) const {
  if (x.dim() != q_.rows()) throw projdyn::ProjectiveError("test function dimension mismatch");
  return x.vec().dot(q_ * x.vec()).real();
}

Conditional conditional_measure(const RepTable& rep, const OrbitMeasure& mu_p, const ParticleCloud& nu,
                                std::uint64_t seed, const HPoint& base, const Word& word) {
  return {base, word, projdyn::push_forward(rep, mu_p, nu, seed)};
}

ProjMap holonomy_of_word(const RepTable& rep, const Word& w) { return rep.word_to_map(w).inverse(); }

ParticleCloud push_cloud(const ProjMap& g, const ParticleCloud& cloud) {
  ParticleCloud out;
  out.points.reserve(cloud.size());
  for (const ProjPoint& x : cloud.points) out.points.push_back(proj_apply(g, x));
  out.weights = cloud.weights;
  return out;
}

double equivariance_residual(const RepTable& rep, const Discretization& disc, const Word& xi, const HPoint& p,
                             const Word& hint, const ParticleCloud& nu, std::uint64_t n_mu, std::uint64_t seed) {
  const GroupAtlas& atlas = disc.atlas();
  const HPoint moved = hypgeom::apply(atlas.word_to_isometry(xi), p);
  const OrbitMeasure mu_p = disc.sample_mu(p, hint, n_mu, fls::derive_seed(seed, 0));
  const OrbitMeasure mu_moved = disc.sample_mu(moved, xi * hint, n_mu, fls::derive_seed(seed, 1));
  const ParticleCloud lhs =
      push_cloud(rep.word_to_map(xi), conditional_measure(rep, mu_p, nu, fls::derive_seed(seed, 2)).cloud);
  const ParticleCloud rhs = conditional_measure(rep, mu_moved, nu, fls::derive_seed(seed, 3)).cloud;
  return projdyn::wasserstein1(lhs, rhs, fls::derive_seed(seed, 4));
}

double transport_residual(const RepTable& rep, const Discretization& disc, const HPoint& p, const Word& hint,
                          const ParticleCloud& nu, std::uint64_t n_mu, std::uint64_t seed) {
  const GroupAtlas& atlas = disc.atlas();
  const lattice::Located loc = atlas.locate_disc(p.disc(), hint);
  const HPoint local = HPoint::from_disc(loc.local);
  const OrbitMeasure mu_p = disc.sample_mu(p, loc.word, n_mu, fls::derive_seed(seed, 0));
  const OrbitMeasure mu_local = disc.sample_mu(local, Word(), n_mu, fls::derive_seed(seed, 1));
  const ParticleCloud carried = push_cloud(holonomy_of_word(rep, loc.word),
                                           conditional_measure(rep, mu_p, nu, fls::derive_seed(seed, 2)).cloud);
  const ParticleCloud at_local = conditional_measure(rep, mu_local, nu, fls::derive_seed(seed, 3)).cloud;
  return projdyn::wasserstein1(at_local, carried, fls::derive_seed(seed, 4));
}

std::vector<HarmonicEstimate> evaluate_harmonic(const RepTable& rep, const OrbitMeasure& mu, const ParticleCloud& nu,
                                                const std::vector<TestFunction>& fs) {
  nu.validate();
  if (mu.total() == 0) throw std::invalid_argument("evaluate_harmonic needs a nonempty orbit sample");
  const int d = rep.dim();
  const auto n = static_cast<Eigen::Index>(nu.size());
  Matrix x(d, n);
  Eigen::VectorXd w(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (nu.points[j].dim() != d) throw projdyn::ProjectiveError("cloud dimension differs from the representation");
    x.col(j) = nu.points[j].vec();
    w(j) = nu.weights[j];
  }

  // g_f(gamma) = integral of f o rho(gamma) against nu, once per distinct atom.
  const std::size_t k = fs.size();
  std::vector<double> sum(k, 0.0), sum_sq(k, 0.0);
  for (const auto& [gamma, count] : mu.entries()) {
    Matrix y = rep.word_matrix(gamma) * x;
    Eigen::VectorXd norms = y.colwise().squaredNorm().transpose();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (norms(j) < projdyn::kDegenerateImage * projdyn::kDegenerateImage) {
        y.col(j) = rep.apply_word(gamma, nu.points[j]).vec();
        norms(j) = 1.0;
      }
    }
    for (std::size_t i = 0; i < k; ++i) {
      const Matrix qy = fs[i].matrix() * y;
      const Eigen::VectorXd num = y.conjugate().cwiseProduct(qy).colwise().sum().real().transpose();
      const double g = w.dot(num.cwiseQuotient(norms));
      sum[i] += static_cast<double>(count) * g;
      sum_sq[i] += static_cast<double>(count) * g * g;
    }
  }
  const auto total = static_cast<double>(mu.total());
  std::vector<HarmonicEstimate> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double mean = sum[i] / total;
    double var = 0.0;
    if (mu.total() > 1) var = std::max(sum_sq[i] - total * mean * mean, 0.0) / (total - 1.0) / total;
    out.push_back({mean, var});
  }
  return out;
}

std::vector<MeanValue> mean_value_residual(const RepTable& rep, const Discretization& disc, const HPoint& p,
                                           const Word& hint, double s, const std::vector<TestFunction>& fs,
                                           int n_circle, std::uint64_t n_mu, const ParticleCloud& nu,
                                           std::uint64_t seed) {
  if (n_circle < 1) throw std::invalid_argument("mean_value_residual needs n_circle >= 1");
  if (!(s > 0.0)) throw std::invalid_argument("mean_value_residual needs a positive radius");
  const std::vector<HarmonicEstimate> center =
      evaluate_harmonic(rep, disc.sample_mu(p, hint, n_mu, fls::derive_seed(seed, 0)), nu, fs);

  const std::size_t k = fs.size();
  std::vector<double> ring(k, 0.0), ring_var(k, 0.0);
  std::vector<std::vector<double>> values(k);
  for (int j = 0; j < n_circle; ++j) {
    const HPoint q = hypgeom::circle_point(p, s, hypgeom::BoundaryAngle(hypgeom::kTwoPi * j / n_circle));
    const OrbitMeasure mu_q = disc.sample_mu(q, hint, n_mu, fls::derive_seed(seed, static_cast<std::uint64_t>(j) + 1));
    const std::vector<HarmonicEstimate> est = evaluate_harmonic(rep, mu_q, nu, fs);
    for (std::size_t i = 0; i < k; ++i) {
      ring[i] += est[i].value;
      ring_var[i] += est[i].variance;
      values[i].push_back(est[i].value);
    }
  }
  const auto m = static_cast<double>(n_circle);
  std::vector<MeanValue> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    // The rounding allowance keeps the test meaningful when u_f is constant
    // and the Monte Carlo error vanishes.
    const double se = std::sqrt(center[i].variance + ring_var[i] / (m * m)) + kRoundoff;
    out.push_back({std::abs(ring[i] / m - center[i].value), se, center[i].value, std::move(values[i])});
  }
  return out;
}

Integrability integrability_stats(const RepTable& rep, const OrbitMeasure& mu, const GroupAtlas& atlas) {
  if (mu.total() == 0) throw std::invalid_argument("integrability_stats needs a nonempty orbit sample");
  double log_norm = 0.0, distance = 0.0, ratio = 0.0;
  for (const auto& [gamma, count] : mu.entries()) {
    const double ln = rep.log_norm(gamma);
    const double dd = hypgeom::displacement(atlas.word_to_isometry(gamma));
    log_norm += static_cast<double>(count) * ln;
    distance += static_cast<double>(count) * dd;
    ratio = std::max(ratio, ln / std::max(dd, 1.0));
  }
  const auto total = static_cast<double>(mu.total());
  return {log_norm / total, distance / total, ratio};
}

double generator_ratio(const RepTable& rep, const GroupAtlas& atlas) {
  double ratio = 0.0;
  for (char c : {'A', 'a', 'B', 'b'}) {
    const Word g = Word::letter(c);
    const double ln = rep.log_norm(g);
    ratio = std::max(ratio, ln / std::max(hypgeom::displacement(atlas.word_to_isometry(g)), 1.0));
  }
  return ratio;
}

double uniqueness_gap(const RepTable& rep, const OrbitMeasure& mu, std::size_t n,
                      std::pair<std::uint64_t, std::uint64_t> seeds, const projdyn::BackwardOptions& opt) {
  if (rep.dim() < 2) throw projdyn::ProjectiveError("uniqueness_gap needs dimension >= 2");
  const auto first = projdyn::stationary_cloud(rep, mu, ProjPoint::basis(rep.dim(), 0), n, opt, seeds.first);
  const auto second = projdyn::stationary_cloud(rep, mu, ProjPoint::basis(rep.dim(), 1), n, opt, seeds.second);
  return projdyn::wasserstein1(first.cloud, second.cloud, fls::derive_seed(seeds.first, seeds.second));
}

nlohmann::json to_json(const Conditional& c, std::uint64_t seed) {
  nlohmann::json j = projdyn::to_json(c.cloud, seed);
  j["base_word"] = c.word.str();
  j["base_point"] = {c.base.disc().real(), c.base.disc().imag()};
  return j;
}

}  // namespace leafwalk::harmonic
