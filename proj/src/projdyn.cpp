#include "leafwalk/projdyn.hpp"

#include "leafwalk/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>

#include <boost/math/distributions/students_t.hpp>

namespace leafwalk::projdyn {

namespace {

using Complex = std::complex<double>;

// Index of the first coordinate whose modulus is within a relative 1e-12 of
// the largest; the tolerance keeps the phase convention stable under rounding.
template <typename Get>
Eigen::Index first_largest(Eigen::Index n, Get get) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) best = std::max(best, std::abs(get(i)));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(get(i)) >= best * (1.0 - 1e-12)) return i;
  }
  return 0;
}

Matrix second_compound(const Matrix& m) {
  const Eigen::Index d = m.rows();
  const Eigen::Index k = d * (d - 1) / 2;
  Matrix c(k, k);
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j, ++row) {
      Eigen::Index col = 0;
      for (Eigen::Index p = 0; p < d; ++p) {
        for (Eigen::Index q = p + 1; q < d; ++q, ++col) {
          c(row, col) = m(i, p) * m(j, q) - m(i, q) * m(j, p);
        }
      }
    }
  }
  return c;
}

double spectral_norm(const Matrix& m) {
  if (m.rows() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

ProjPoint::ProjPoint(const Vector& v) {
  if (v.size() < 1) throw ProjectiveError("projective point needs dimension >= 1");
  if (!v.allFinite()) throw ProjectiveError("projective point has non-finite coordinates");
  // Scale by the largest modulus first so tiny or huge vectors normalize cleanly.
  const double scale = v.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) throw ProjectiveError("projective point from the zero vector");
  Vector w = v / scale;
  w.normalize();
  const Eigen::Index k = first_largest(w.size(), [&](Eigen::Index i) { return w(i); });
  w *= std::conj(w(k)) / std::abs(w(k));
  w(k) = Complex(std::abs(w(k)), 0.0);
  v_ = std::move(w);
}

ProjPoint ProjPoint::basis(int dim, int k) {
  Vector v = Vector::Zero(dim);
  v(k) = 1.0;
  return ProjPoint(v);
}

ProjMap::ProjMap(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1) throw ProjectiveError("projective map must be square");
  if (!m.allFinite()) throw ProjectiveError("projective map has non-finite entries");
  const double scale = m.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) throw ProjectiveError("projective map is zero");
  Matrix s = m / scale;
  const Complex det = s.determinant();
  // With the largest entry scaled to 1, a determinant at rounding level means
  // the matrix is numerically singular.
  if (!(std::abs(det) > 64.0 * std::numeric_limits<double>::epsilon())) {
    throw ProjectiveError("projective map is singular");
  }
  s /= std::pow(det, 1.0 / static_cast<double>(m.rows()));
  m_ = std::move(s);
  fix_phase();
}

ProjMap ProjMap::unimodular(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1) throw ProjectiveError("projective map must be square");
  if (!m.allFinite()) throw ProjectiveError("projective map has non-finite entries");
  ProjMap g;
  g.m_ = m;
  g.fix_phase();
  return g;
}

void ProjMap::fix_phase() {
  const double d = static_cast<double>(m_.rows());
  const Eigen::Index cols = m_.cols();
  const Eigen::Index k = first_largest(m_.size(), [&](Eigen::Index i) { return m_(i / cols, i % cols); });
  const double phase = std::arg(m_(k / cols, k % cols));
  const double turn = 2.0 * std::numbers::pi / d;
  m_ *= std::polar(1.0, std::round(-phase / turn) * turn);
}

ProjMap ProjMap::inverse() const {
  if (m_.rows() == 2) {
    Matrix adj(2, 2);
    adj << m_(1, 1), -m_(0, 1), -m_(1, 0), m_(0, 0);
    return unimodular(adj);
  }
  return unimodular(m_.inverse());
}

ProjMap ProjMap::identity(int dim) { return ProjMap(Matrix::Identity(dim, dim)); }

bool ProjMap::approx_equal(const ProjMap& other, double tol) const {
  if (dim() != other.dim()) return false;
  // Compare up to a scalar: align phases on the largest entry of `this`.
  Eigen::Index r, c;
  m_.cwiseAbs().maxCoeff(&r, &c);
  if (std::abs(other.m_(r, c)) == 0.0) return false;
  const Complex ratio = m_(r, c) / other.m_(r, c);
  return (m_ - ratio * other.m_).cwiseAbs().maxCoeff() <= tol;
}

ProjPoint proj_apply(const Matrix& g, const ProjPoint& x) { return ProjPoint(g * x.vec()); }
ProjPoint proj_apply(const ProjMap& g, const ProjPoint& x) { return proj_apply(g.matrix(), x); }

double fs_dist(const ProjPoint& x, const ProjPoint& y) {
  if (x.vec() == y.vec()) return 0.0;
  // Both orders are evaluated so the result is bitwise symmetric.
  const Complex xy = x.vec().dot(y.vec());  // conjugate-linear in x
  const Complex yx = y.vec().dot(x.vec());
  const double c = std::abs(xy) + std::abs(yx);
  const double s = (y.vec() - xy * x.vec()).norm() + (x.vec() - yx * y.vec()).norm();
  return std::atan2(s, c);
}

RepTable::RepTable(ProjMap a, ProjMap b) : gens_{a, a.inverse(), b, b.inverse()} {
  if (a.dim() != b.dim()) throw ProjectiveError("generator images have different dimensions");
}

RepTable RepTable::trivial(int dim) { return RepTable(ProjMap::identity(dim), ProjMap::identity(dim)); }

RepTable RepTable::inclusion() {
  Matrix a(2, 2), b(2, 2);
  a << 1.0, 2.0, 0.0, 1.0;
  b << 1.0, 0.0, 2.0, 1.0;
  return RepTable(ProjMap(a), ProjMap(b));
}

RepTable RepTable::rotation() {
  const double alpha = 1.0, beta = 0.7;
  const Complex i{0.0, 1.0};
  Matrix a(2, 2), b(2, 2);
  a << std::polar(1.0, alpha), 0.0, 0.0, std::polar(1.0, -alpha);
  b << std::cos(beta), i * std::sin(beta), i * std::sin(beta), std::cos(beta);
  return RepTable(ProjMap(a), ProjMap(b));
}

RepTable RepTable::diagonal() {
  Matrix a(2, 2);
  a << 2.0, 0.0, 0.0, 0.5;
  return RepTable(ProjMap(a), ProjMap(a));
}

const ProjMap& RepTable::generator(char letter) const {
  switch (letter) {
    case 'A': return gens_[0];
    case 'a': return gens_[1];
    case 'B': return gens_[2];
    case 'b': return gens_[3];
    default: throw lattice::WordError("invalid letter '" + std::string(1, letter) + "'");
  }
}

Matrix RepTable::word_matrix(const Word& w, double* log_scale) const {
  Matrix m = Matrix::Identity(dim(), dim());
  double acc = 0.0;
  for (std::size_t i = 0; i < w.length(); ++i) {
    m = m * generator(w[i]).matrix();
    const double s = m.cwiseAbs().maxCoeff();
    m /= s;
    acc += std::log(s);
  }
  if (log_scale) *log_scale = acc;
  return m;
}

ProjMap RepTable::word_to_map(const Word& w) const {
  double log_scale = 0.0;
  const Matrix m = word_matrix(w, &log_scale);
  if (log_scale > 600.0) throw ProjectiveError("image of word " + w.str() + " overflows at determinant 1");
  return ProjMap::unimodular(m * std::exp(log_scale));
}

double RepTable::log_norm(const Word& w) const {
  double log_scale = 0.0;
  const Matrix m = word_matrix(w, &log_scale);
  Eigen::JacobiSVD<Matrix> svd(m);
  return std::log(svd.singularValues()(0)) + log_scale;
}

ProjPoint RepTable::apply_word(const Word& w, const ProjPoint& x) const {
  Vector v = x.vec();
  for (std::size_t i = w.length(); i-- > 0;) {
    v = generator(w[i]).matrix() * v;
    v /= v.cwiseAbs().maxCoeff();
  }
  return ProjPoint(v);
}

ProjPoint apply_atom(const RepTable& rep, const Word& w, const Matrix& m, const ProjPoint& x) {
  if (w.empty()) return x;
  Vector v = m * x.vec();
  if (v.norm() < kDegenerateImage) return rep.apply_word(w, x);
  return ProjPoint(v);
}

std::vector<Matrix> atom_maps(const RepTable& rep, const fls::OrbitDraw& draw) {
  std::vector<Matrix> out;
  out.reserve(draw.atoms().size());
  for (const Word& w : draw.atoms()) out.push_back(rep.word_matrix(w));
  return out;
}

ParticleCloud ParticleCloud::uniform(std::vector<ProjPoint> pts) {
  ParticleCloud c;
  const double w = pts.empty() ? 0.0 : 1.0 / static_cast<double>(pts.size());
  c.weights.assign(pts.size(), w);
  c.points = std::move(pts);
  return c;
}

bool ParticleCloud::is_uniform() const {
  if (weights.empty()) return true;
  return std::all_of(weights.begin(), weights.end(), [&](double w) { return w == weights.front(); });
}

void ParticleCloud::validate() const {
  if (points.empty()) throw ProjectiveError("particle cloud is empty");
  if (points.size() != weights.size()) throw ProjectiveError("particle cloud weights mismatch");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ProjectiveError("particle cloud has a negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ProjectiveError("particle cloud weights do not sum to 1");
}

namespace {

BackwardResult run_backward(const fls::OrbitDraw& draw, const std::vector<Matrix>& maps, const ProjPoint& x0,
                            const BackwardOptions& opt, Rng& rng) {
  const Eigen::Index d = x0.vec().size();
  Matrix product = Matrix::Identity(d, d);
  ProjPoint z = x0;
  int run = 0, run_start = 0;
  for (int k = 1; k <= opt.max_steps; ++k) {
    const std::size_t idx = draw.index(rng);
    if (draw.atoms()[idx].empty()) continue;
    product = product * maps[idx];
    product /= product.cwiseAbs().maxCoeff();
    const Vector v = product * x0.vec();
    // x0 so close to the repelling direction that its image underflowed.
    if (!(v.cwiseAbs().maxCoeff() > 0.0)) return {z, false, k, 0};
    ProjPoint next(v);
    const double inc = fs_dist(next, z);
    z = std::move(next);
    if (inc < opt.tol) {
      if (run == 0) run_start = k;
      if (++run >= opt.run_length) return {z, true, k, run_start};
    } else {
      run = 0;
    }
  }
  return {z, false, opt.max_steps, 0};
}

}  // namespace

BackwardResult backward_sample(const RepTable& rep, const OrbitMeasure& mu, const ProjPoint& x0,
                               const BackwardOptions& opt, Rng& rng) {
  if (x0.dim() != rep.dim()) throw ProjectiveError("initial point and representation dimensions differ");
  const fls::OrbitDraw draw(mu);
  return run_backward(draw, atom_maps(rep, draw), x0, opt, rng);
}

StationaryCloud stationary_cloud(const RepTable& rep, const OrbitMeasure& mu, const ProjPoint& x0, std::size_t n,
                                 const BackwardOptions& opt, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("stationary_cloud needs n >= 1");
  if (x0.dim() != rep.dim()) throw ProjectiveError("initial point and representation dimensions differ");
  const fls::OrbitDraw draw(mu);
  const std::vector<Matrix> maps = atom_maps(rep, draw);
  std::vector<ProjPoint> pts;
  pts.reserve(n);
  std::size_t converged = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = Rng::stream(seed, StreamTag::kBackward, i);
    BackwardResult res = run_backward(draw, maps, x0, opt, rng);
    converged += res.converged ? 1 : 0;
    pts.push_back(std::move(res.point));
  }
  return {ParticleCloud::uniform(std::move(pts)), static_cast<double>(converged) / static_cast<double>(n)};
}

ParticleCloud stationary_cloud_checked(const RepTable& rep, const OrbitMeasure& mu, const ProjPoint& x0,
                                       std::size_t n, const BackwardOptions& opt, std::uint64_t seed) {
  StationaryCloud sc = stationary_cloud(rep, mu, x0, n, opt, seed);
  if (sc.converged_fraction < 0.99) {
    throw ProjectiveError("backward iteration converged for only " + std::to_string(sc.converged_fraction) +
                          " of particles; representation does not look contracting");
  }
  return std::move(sc.cloud);
}

ParticleCloud resample(const ParticleCloud& cloud, std::size_t n, std::uint64_t seed) {
  cloud.validate();
  std::vector<double> cumulative;
  cumulative.reserve(cloud.size());
  double acc = 0.0;
  for (double w : cloud.weights) cumulative.push_back(acc += w);
  std::vector<ProjPoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = Rng::stream(seed, StreamTag::kResample, i);
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t k = std::min(static_cast<std::size_t>(it - cumulative.begin()), cloud.size() - 1);
    pts.push_back(cloud.points[k]);
  }
  return ParticleCloud::uniform(std::move(pts));
}

double wasserstein1(const ParticleCloud& a, const ParticleCloud& b, std::uint64_t seed) {
  a.validate();
  b.validate();
  if (a.points.front().dim() != b.points.front().dim()) throw ProjectiveError("clouds live in different dimensions");
  const std::size_t n = std::min(std::max(a.size(), b.size()), kMaxAssignmentSize);
  auto prepare = [&](const ParticleCloud& c, std::uint64_t salt) {
    if (c.size() == n && c.is_uniform()) return c;
    return resample(c, n, fls::derive_seed(seed, salt));
  };
  const ParticleCloud ra = prepare(a, 1);
  const ParticleCloud rb = prepare(b, 2);
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = fs_dist(ra.points[i], rb.points[j]);
  }
  std::vector<std::size_t> match;
  solve_assignment(cost, n, match);
  // Summing the matched costs in sorted order makes W1(a, b) == W1(b, a) exactly.
  std::vector<double> matched(n);
  for (std::size_t i = 0; i < n; ++i) matched[i] = cost[i * n + match[i]];
  std::sort(matched.begin(), matched.end());
  double total = 0.0;
  for (double c : matched) total += c;
  return total / static_cast<double>(n);
}

ParticleCloud push_forward(const RepTable& rep, const OrbitMeasure& mu, const ParticleCloud& cloud,
                           std::uint64_t seed) {
  cloud.validate();
  const fls::OrbitDraw draw(mu);
  const std::vector<Matrix> maps = atom_maps(rep, draw);
  ParticleCloud out;
  out.points.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    Rng rng = Rng::stream(seed, StreamTag::kPushforward, i);
    const std::size_t k = draw.index(rng);
    out.points.push_back(apply_atom(rep, draw.atoms()[k], maps[k], cloud.points[i]));
  }
  out.weights = cloud.weights;
  return out;
}

double markov_residual(const RepTable& rep, const OrbitMeasure& mu_fresh, const ParticleCloud& nu,
                       std::uint64_t seed) {
  return wasserstein1(nu, push_forward(rep, mu_fresh, nu, seed), seed);
}

GapEstimate lyapunov_gap(const RepTable& rep, const OrbitMeasure& mu, int n_steps, int n_runs, std::uint64_t seed) {
  if (n_steps < 10) throw std::invalid_argument("lyapunov_gap needs n_steps >= 10");
  if (n_runs < 5) throw std::invalid_argument("lyapunov_gap needs n_runs >= 5");
  const int d = rep.dim();
  if (d < 2) throw ProjectiveError("lyapunov_gap needs dimension >= 2");
  const Eigen::Index k = d * (d - 1) / 2;
  const fls::OrbitDraw draw(mu);

  // Per atom: rho(w) = exp(scale) * map and its second compound likewise,
  // both built letter by letter so long words cannot underflow.
  std::map<char, Matrix> letter_compounds;
  for (char c : {'A', 'a', 'B', 'b'}) letter_compounds[c] = second_compound(rep.generator(c).matrix());
  std::vector<Matrix> maps, compounds;
  std::vector<double> map_scales, compound_scales;
  for (const Word& w : draw.atoms()) {
    double ls = 0.0;
    maps.push_back(rep.word_matrix(w, &ls));
    map_scales.push_back(ls);
    Matrix c = Matrix::Identity(k, k);
    double lc = 0.0;
    for (std::size_t i = 0; i < w.length(); ++i) {
      c = c * letter_compounds.at(w[i]);
      const double sc = c.cwiseAbs().maxCoeff();
      c /= sc;
      lc += std::log(sc);
    }
    compounds.push_back(std::move(c));
    compound_scales.push_back(lc);
  }

  std::vector<double> gaps;
  for (int run = 0; run < n_runs; ++run) {
    Rng rng = Rng::stream(seed, StreamTag::kLyapunov, static_cast<std::uint64_t>(run));
    // log sigma_1(P) from P; log sigma_1 sigma_2 from the second compound of P.
    Matrix p = Matrix::Identity(d, d), q = Matrix::Identity(k, k);
    double log_p = 0.0, log_q = 0.0;
    for (int step = 0; step < n_steps; ++step) {
      const std::size_t idx = draw.index(rng);
      p = p * maps[idx];
      q = q * compounds[idx];
      const double sp = p.cwiseAbs().maxCoeff(), sq = q.cwiseAbs().maxCoeff();
      p /= sp;
      q /= sq;
      log_p += std::log(sp) + map_scales[idx];
      log_q += std::log(sq) + compound_scales[idx];
    }
    const double log_s1 = log_p + std::log(spectral_norm(p));
    const double log_s12 = log_q + std::log(spectral_norm(q));
    gaps.push_back((2.0 * log_s1 - log_s12) / n_steps);
  }
  double mean = 0.0;
  for (double g : gaps) mean += g;
  mean /= n_runs;
  double var = 0.0;
  for (double g : gaps) var += (g - mean) * (g - mean);
  var /= (n_runs - 1);
  const double se = std::sqrt(var / n_runs);
  const boost::math::students_t dist(n_runs - 1);
  // Rounding allowance: the estimator is a sum of n_steps logarithms.
  const double roundoff = 1e-12;
  const double half = boost::math::quantile(boost::math::complement(dist, 0.025)) * se + roundoff;
  return {mean, mean - half, mean + half, se};
}

std::vector<ProjPoint> random_points(int dim, std::size_t n, std::uint64_t seed, StreamTag tag) {
  std::vector<ProjPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = Rng::stream(seed, tag, i);
    Vector v(dim);
    for (int c = 0; c < dim; ++c) v(c) = Complex(rng.normal(), rng.normal());
    out.emplace_back(v);
  }
  return out;
}

double diameter(const std::vector<ProjPoint>& pts) {
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, fs_dist(pts[i], pts[j]));
  }
  return d;
}

std::vector<double> contraction_series(const RepTable& rep, const OrbitMeasure& mu, int n_max,
                                       const std::vector<ProjPoint>& probes, std::uint64_t seed) {
  if (probes.size() < 2) throw std::invalid_argument("contraction_series needs at least 2 probes");
  const fls::OrbitDraw draw(mu);
  const std::vector<Matrix> maps = atom_maps(rep, draw);
  const int d = rep.dim();
  Rng rng = Rng::stream(seed, StreamTag::kLyapunov, 1ULL << 40);
  Matrix product = Matrix::Identity(d, d);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(n_max, 0)));
  std::vector<ProjPoint> image;
  for (int n = 1; n <= n_max; ++n) {
    product = product * maps[draw.index(rng)];
    product /= product.cwiseAbs().maxCoeff();
    image.clear();
    for (const ProjPoint& x : probes) image.push_back(proj_apply(product, x));
    out.push_back(diameter(image));
  }
  return out;
}

std::vector<double> contraction_series(const RepTable& rep, const OrbitMeasure& mu, int n_max, std::size_t n_probe,
                                       std::uint64_t seed) {
  return contraction_series(rep, mu, n_max, random_points(rep.dim(), n_probe, seed), seed);
}

IrreducibilityCertificate irreducibility_certificate(const RepTable& rep, std::uint64_t seed) {
  IrreducibilityCertificate cert{false, false};
  const int d = rep.dim();
  constexpr char kLetters[4] = {'A', 'B', 'a', 'b'};

  // Proximality: any word of length <= 6 with a strictly dominant eigenvalue.
  std::vector<Word> level{Word()};
  for (int len = 1; len <= 6 && !cert.has_proximal_word; ++len) {
    std::vector<Word> next;
    for (const Word& w : level) {
      for (char c : kLetters) {
        if (!w.empty() && w[w.length() - 1] == Word::inverse_letter(c)) continue;
        Word child = w;
        child.push_back(c);
        Eigen::ComplexEigenSolver<Matrix> es(rep.word_to_map(child).matrix(), false);
        std::vector<double> mods;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) mods.push_back(std::abs(es.eigenvalues()(i)));
        std::sort(mods.rbegin(), mods.rend());
        if (mods.size() < 2 || mods[0] > mods[1] * (1.0 + 1e-8)) {
          cert.has_proximal_word = true;
          break;
        }
        next.push_back(std::move(child));
      }
    }
    level = std::move(next);
  }

  // Common eigenvector: eigenvectors of the first random word tested against
  // 19 more.
  std::vector<Matrix> words;
  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng rng = Rng::stream(seed, StreamTag::kProbe, 1000 + i);
    Word w;
    const auto len = 1 + rng.below(6);
    while (w.length() < len) w.push_back(kLetters[rng.below(4)]);
    words.push_back(rep.word_to_map(w).matrix());
  }
  Eigen::ComplexEigenSolver<Matrix> es(words.front());
  for (Eigen::Index c = 0; c < d; ++c) {
    const Vector v = es.eigenvectors().col(c).normalized();
    bool shared = true;
    for (const Matrix& m : words) {
      const Vector mv = m * v;
      const Complex lambda = v.dot(mv);
      if ((mv - lambda * v).norm() > 1e-8 * std::max(1.0, mv.norm())) {
        shared = false;
        break;
      }
    }
    if (shared) {
      cert.common_eigenvector_found = true;
      break;
    }
  }
  return cert;
}

nlohmann::json to_json(const ParticleCloud& cloud, std::uint64_t seed) {
  nlohmann::json j;
  j["type"] = "particle_cloud";
  j["d"] = cloud.points.empty() ? 0 : cloud.points.front().dim();
  j["n"] = cloud.size();
  j["seed"] = seed;
  nlohmann::json pts = nlohmann::json::array();
  for (const ProjPoint& p : cloud.points) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index i = 0; i < p.vec().size(); ++i) {
      row.push_back(p.vec()(i).real());
      row.push_back(p.vec()(i).imag());
    }
    pts.push_back(std::move(row));
  }
  j["points"] = std::move(pts);
  j["weights"] = cloud.weights;
  return j;
}

ParticleCloud particle_cloud_from_json(const nlohmann::json& j) {
  if (j.at("type") != "particle_cloud") throw std::invalid_argument("not a particle_cloud document");
  const int d = j.at("d").get<int>();
  ParticleCloud c;
  for (const auto& row : j.at("points")) {
    if (row.size() != static_cast<std::size_t>(2 * d)) throw std::invalid_argument("point has wrong arity");
    Vector v(d);
    for (int i = 0; i < d; ++i) v(i) = Complex(row[2 * i].get<double>(), row[2 * i + 1].get<double>());
    c.points.emplace_back(v);
  }
  c.weights = j.at("weights").get<std::vector<double>>();
  c.validate();
  return c;
}

}  // namespace leafwalk::projdyn
