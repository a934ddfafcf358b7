#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "leafwalk/projdyn.hpp"

using namespace leafwalk;
using namespace leafwalk::projdyn;

namespace {

constexpr double kPi = std::numbers::pi;
using Complex = std::complex<double>;

Vector vec2(Complex a, Complex b) {
  Vector v(2);
  v << a, b;
  return v;
}

Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Matrix random_matrix(std::mt19937_64& gen, int d) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Complex(g(gen), g(gen));
  return m;
}

Vector random_vector(std::mt19937_64& gen, int d) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = Complex(g(gen), g(gen));
  return v;
}

// Fubini-Study distance from [v] to the real projective line: the largest
// |<v, (cos t, sin t)>|^2 is the top eigenvalue of Re(v v^*).
double dist_to_real_circle(const ProjPoint& x) {
  const Complex a = x.vec()(0), b = x.vec()(1);
  const double p = std::norm(a), q = std::norm(b), r = (a * std::conj(b)).real();
  const double top = 0.5 * (p + q) + std::sqrt(0.25 * (p - q) * (p - q) + r * r);
  return std::acos(std::min(1.0, std::sqrt(top)));
}

// A measure concentrated on the listed words with equal counts.
OrbitMeasure measure_of(std::initializer_list<const char*> words) {
  OrbitMeasure mu;
  for (const char* w : words) mu.add(Word::parse(w));
  return mu;
}

const OrbitMeasure& sampled_mu() {
  static const OrbitMeasure mu = [] {
    const fls::Discretization disc(lattice::GroupAtlas::build_gamma2(), fls::BallSpec{});
    return disc.sample_mu(hypgeom::HPoint(), Word(), 20000, 123);
  }();
  return mu;
}

}  // namespace

TEST_CASE("projective points") {
  const ProjPoint x(vec2({0.0, 2.0}, {0.0, 1.0}));
  CHECK(x.vec()(0).imag() == doctest::Approx(0.0));
  CHECK(x.vec()(0).real() > 0.0);
  CHECK(x.vec().norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(ProjPoint(vec2(0.0, 0.0)), ProjectiveError);

  // The phase is fixed at the first coordinate of largest modulus.
  const ProjPoint y(vec2({1.0, 0.0}, {0.0, -1.0}));
  CHECK(y.vec()(0) == Complex(1.0 / std::sqrt(2.0), 0.0));

  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> expo(-150.0, 150.0);
  for (int k = 0; k < 100000; ++k) {
    Vector v = random_vector(gen, 2 + k % 3);
    v *= std::pow(10.0, expo(gen));
    const ProjPoint p(v);
    CHECK_FALSE(p.vec().hasNaN());
    if (k % 1000 == 0) CHECK(p.vec().norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("projective maps are normalized") {
  std::mt19937_64 gen(2);
  for (int k = 0; k < 1000; ++k) {
    const int d = 2 + k % 3;
    const ProjMap g(random_matrix(gen, d));
    CHECK(std::abs(g.matrix().determinant() - 1.0) < 1e-10);
    const ProjMap h(std::polar(3.7, 1.1) * g.matrix());
    CHECK(g.approx_equal(h));
    CHECK((g * g.inverse()).approx_equal(ProjMap::identity(d), 1e-8));
  }
  CHECK_THROWS_AS(ProjMap(mat2(1.0, 2.0, 2.0, 4.0)), ProjectiveError);
}

TEST_CASE("proj_apply") {
  const ProjPoint x(vec2(1.0, 1.0));
  CHECK(fs_dist(proj_apply(ProjMap::identity(2), x), x) < 1e-15);
  const ProjPoint y = proj_apply(ProjMap(mat2(2.0, 0.0, 0.0, 0.5)), x);
  CHECK(y.vec()(0).real() == doctest::Approx(4.0 / std::sqrt(17.0)).epsilon(1e-14));
  CHECK(y.vec()(1).real() == doctest::Approx(1.0 / std::sqrt(17.0)).epsilon(1e-14));

  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  for (int k = 0; k < 10000; ++k) {
    const Matrix m = random_matrix(gen, 2);
    const ProjPoint p(random_vector(gen, 2));
    const ProjPoint a = proj_apply(m, p);
    const ProjPoint b = proj_apply(Matrix(std::polar(0.01 + k, phase(gen)) * m), p);
    CHECK((a.vec() - b.vec()).norm() < 1e-10);
    CHECK(std::abs(a.vec().norm() - 1.0) < 1e-10);
  }
}

TEST_CASE("fubini-study distance") {
  const auto e1 = ProjPoint::basis(2, 0), e2 = ProjPoint::basis(2, 1);
  CHECK(fs_dist(e1, e1) == 0.0);
  CHECK(fs_dist(e1, e2) == doctest::Approx(kPi / 2));
  CHECK(fs_dist(ProjPoint(vec2(1.0, 1.0)), e1) == doctest::Approx(kPi / 4).epsilon(1e-14));
  CHECK(fs_dist(ProjPoint(vec2(1.0, 1e-9)), e1) == doctest::Approx(1e-9).epsilon(1e-6));

  std::mt19937_64 gen(4);
  for (int k = 0; k < 1000; ++k) {
    const ProjPoint a(random_vector(gen, 3)), b(random_vector(gen, 3)), c(random_vector(gen, 3));
    CHECK(fs_dist(a, b) == fs_dist(b, a));
    CHECK(fs_dist(a, c) <= fs_dist(a, b) + fs_dist(b, c) + 1e-12);
    CHECK(fs_dist(a, b) <= kPi / 2 + 1e-15);
  }
}

TEST_CASE("representation tables") {
  const auto rep = RepTable::inclusion();
  CHECK(rep.word_to_map(Word()).approx_equal(ProjMap::identity(2)));
  CHECK(rep.word_to_map(Word::parse("AB")).approx_equal(ProjMap(mat2(5.0, 2.0, 2.0, 1.0))));
  CHECK(rep.generator('a').approx_equal(rep.generator('A').inverse()));

  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> len(0, 8), letter(0, 3);
  const char letters[4] = {'A', 'a', 'B', 'b'};
  auto random_word = [&] {
    Word w;
    const int n = len(gen);
    while (static_cast<int>(w.length()) < n) w.push_back(letters[letter(gen)]);
    return w;
  };
  const auto rot = RepTable::rotation();
  for (int k = 0; k < 1000; ++k) {
    const Word w1 = random_word(), w2 = random_word();
    CHECK((rep.word_to_map(w1) * rep.word_to_map(w2)).approx_equal(rep.word_to_map(w1 * w2), 1e-6));
    CHECK((rot.word_to_map(w1) * rot.word_to_map(w2)).approx_equal(rot.word_to_map(w1 * w2), 1e-9));
  }
}

TEST_CASE("long words") {
  const auto rep = RepTable::inclusion();
  Word w;
  for (int k = 0; k < 200; ++k) w = w * Word::parse("AB");
  double log_scale = 0.0;
  const Matrix m = rep.word_matrix(w, &log_scale);
  CHECK(m.cwiseAbs().maxCoeff() == doctest::Approx(1.0));
  CHECK(std::isfinite(log_scale));
  // ||(AB)^200|| grows like the top eigenvalue of [[5,2],[2,1]] to the 200th.
  const double lam = 3.0 + 2.0 * std::sqrt(2.0);
  CHECK(rep.log_norm(w) == doctest::Approx(200.0 * std::log(lam)).epsilon(1e-6));

  const ProjPoint x(vec2({0.3, 0.1}, {-0.7, 0.2}));
  const ProjPoint by_letters = rep.apply_word(w, x);
  const ProjPoint by_matrix = apply_atom(rep, w, m, x);
  CHECK(fs_dist(by_letters, by_matrix) < 1e-9);
  const Word shortw = Word::parse("ABab");
  CHECK(fs_dist(rep.apply_word(shortw, x), proj_apply(rep.word_to_map(shortw), x)) < 1e-12);
}

TEST_CASE("backward iteration") {
  const auto x0 = ProjPoint(vec2(0.6, 0.8));
  Rng rng(1);
  const auto trivial = backward_sample(RepTable::trivial(), measure_of({"A", "B"}), x0, BackwardOptions{}, rng);
  CHECK(fs_dist(trivial.point, x0) < 1e-15);
  CHECK(trivial.converged);

  // Upper triangular images fix e1.
  const RepTable upper(ProjMap(mat2(2.0, 1.0, 0.0, 0.5)), ProjMap(mat2(1.0, Complex(0.0, 3.0), 0.0, 1.0)));
  const auto e1 = ProjPoint::basis(2, 0);
  const auto fixed = backward_sample(upper, measure_of({"A", "B", "ab"}), e1, BackwardOptions{}, rng);
  CHECK(fs_dist(fixed.point, e1) < 1e-12);

  // The inclusion preserves the real projective line.
  const auto rep = RepTable::inclusion();
  const auto cloud = stationary_cloud(rep, sampled_mu(), ProjPoint(vec2(Complex(1.0, 0.5), Complex(0.2, -1.0))), 1000,
                                      BackwardOptions{}, 8);
  CHECK(cloud.converged_fraction >= 0.99);
  double worst = 0.0;
  for (const auto& p : cloud.cloud.points) worst = std::max(worst, dist_to_real_circle(p));
  CHECK(worst < 0.02);
}

TEST_CASE("stationary clouds") {
  const auto x0 = ProjPoint::basis(2, 0);
  const auto one = stationary_cloud(RepTable::trivial(), measure_of({"A"}), x0, 1, BackwardOptions{}, 4);
  REQUIRE(one.cloud.size() == 1);
  CHECK(fs_dist(one.cloud.points[0], x0) == 0.0);

  const auto rep = RepTable::inclusion();
  const auto a = stationary_cloud(rep, sampled_mu(), x0, 200, BackwardOptions{}, 6);
  const auto b = stationary_cloud(rep, sampled_mu(), x0, 200, BackwardOptions{}, 6);
  for (std::size_t i = 0; i < a.cloud.size(); ++i) CHECK(a.cloud.points[i].vec() == b.cloud.points[i].vec());

  // Rotations do not contract: every increment has the size of the last
  // letter's displacement of a generic start point.
  const ProjPoint generic(vec2(0.6, 0.8));
  const auto rot = stationary_cloud(RepTable::rotation(), measure_of({"A", "B", "a", "b"}), generic, 100,
                                    BackwardOptions{}, 6);
  CHECK(rot.converged_fraction == 0.0);
  CHECK_THROWS_AS(stationary_cloud_checked(RepTable::rotation(), measure_of({"A", "B", "a", "b"}), generic, 100,
                                           BackwardOptions{}, 6),
                  ProjectiveError);
}

TEST_CASE("wasserstein distance") {
  const auto e1 = ProjPoint::basis(2, 0), e2 = ProjPoint::basis(2, 1);
  const auto pts = random_points(2, 300, 9);
  const auto cloud = ParticleCloud::uniform(pts);
  CHECK(wasserstein1(cloud, cloud) == 0.0);
  CHECK(wasserstein1(ParticleCloud::uniform({e1}), ParticleCloud::uniform({e2})) == doctest::Approx(kPi / 2));

  auto shuffled = pts;
  std::mt19937_64 gen(10);
  std::shuffle(shuffled.begin(), shuffled.end(), gen);
  CHECK(wasserstein1(cloud, ParticleCloud::uniform(shuffled)) == doctest::Approx(0.0).epsilon(1e-15));

  for (int t = 0; t < 100; ++t) {
    const auto a = ParticleCloud::uniform(random_points(2, 20, 100 + 3 * t));
    const auto b = ParticleCloud::uniform(random_points(2, 20, 101 + 3 * t));
    const auto c = ParticleCloud::uniform(random_points(2, 20, 102 + 3 * t));
    CHECK(wasserstein1(a, b) == wasserstein1(b, a));
    CHECK(wasserstein1(a, c) <= wasserstein1(a, b) + wasserstein1(b, c) + 1e-9);
  }

  ParticleCloud weighted{{e1, e2}, {0.25, 0.75}};
  const auto res = resample(weighted, 4000, 3);
  CHECK(res.size() == 4000);
  CHECK(res.is_uniform());
  std::size_t on_e2 = 0;
  for (const auto& p : res.points) on_e2 += fs_dist(p, e2) < 1e-12 ? 1 : 0;
  CHECK(std::abs(on_e2 / 4000.0 - 0.75) < 4.0 * std::sqrt(0.75 * 0.25 / 4000));
  CHECK_THROWS_AS((ParticleCloud{{e1}, {0.5}}.validate()), ProjectiveError);
}

TEST_CASE("markov residual") {
  const auto mu = sampled_mu();
  const auto pts = ParticleCloud::uniform(random_points(2, 1000, 21));
  CHECK(markov_residual(RepTable::trivial(), mu, pts, 1) < 0.01);
  CHECK(markov_residual(RepTable::rotation(), mu, pts, 1) < 0.05);

  const auto rep = RepTable::inclusion();
  const auto nu = stationary_cloud_checked(rep, mu, ProjPoint::basis(2, 0), 1000, BackwardOptions{}, 22);
  const fls::Discretization disc(lattice::GroupAtlas::build_gamma2(), fls::BallSpec{});
  const auto fresh = disc.sample_mu(hypgeom::HPoint(), Word(), 20000, 777);
  CHECK(markov_residual(rep, fresh, nu, 2) < 0.05);
  // A non-stationary start is detected.
  CHECK(markov_residual(rep, fresh, ParticleCloud::uniform(std::vector<ProjPoint>(1000, ProjPoint::basis(2, 0))), 2) >
        0.05);
}

TEST_CASE("backward and forward laws agree") {
  const auto rep = RepTable::inclusion();
  const auto& mu = sampled_mu();
  const auto x0 = ProjPoint(vec2(0.6, 0.8));
  const auto backward = stationary_cloud_checked(rep, mu, x0, 500, BackwardOptions{}, 31).points;
  ParticleCloud forward = ParticleCloud::uniform(std::vector<ProjPoint>(500, x0));
  for (int step = 0; step < 40; ++step) forward = push_forward(rep, mu, forward, 1000 + step);
  CHECK(wasserstein1(ParticleCloud::uniform(backward), forward) < 0.05);
}

TEST_CASE("lyapunov gap") {
  const auto diag = lyapunov_gap(RepTable::diagonal(), measure_of({"A"}), 100, 10, 1);
  CHECK(std::abs(diag.estimate - 2.0 * std::log(2.0)) < 1e-9);
  CHECK(diag.ci_high - diag.ci_low < 1e-9);

  const auto rot = lyapunov_gap(RepTable::rotation(), measure_of({"A", "B", "a", "b"}), 200, 20, 2);
  CHECK(rot.ci_low <= 0.0 + 1e-9);
  CHECK(std::abs(rot.estimate) < 1e-6);

  const auto inc = lyapunov_gap(RepTable::inclusion(), sampled_mu(), 200, 20, 3);
  CHECK(inc.ci_low > 0.0);
  CHECK(inc.estimate > inc.ci_low);
  CHECK(inc.estimate < inc.ci_high);
}

TEST_CASE("contraction series") {
  const auto mu_a = measure_of({"A"});
  const auto identity = contraction_series(RepTable::trivial(), mu_a, 10, 16, 1);
  for (double d : identity) CHECK(d == doctest::Approx(identity.front()).epsilon(1e-12));

  // diag(2, 1/2) contracts the affine chart at rate 4^-n away from e2.
  const auto diag = contraction_series(RepTable::diagonal(), mu_a, 20, 16, 2);
  CHECK(diag[19] < 0.01);
  for (std::size_t n = 1; n < diag.size(); ++n) CHECK(diag[n] <= diag[n - 1] + 1e-12);

  int contracted = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    if (contraction_series(RepTable::inclusion(), sampled_mu(), 50, 64, 500 + s).back() < 0.01) ++contracted;
  }
  CHECK(contracted >= 95);
}

TEST_CASE("irreducibility certificate") {
  const auto inc = irreducibility_certificate(RepTable::inclusion(), 1);
  CHECK(inc.has_proximal_word);
  CHECK_FALSE(inc.common_eigenvector_found);
  const auto diag = irreducibility_certificate(RepTable::diagonal(), 1);
  CHECK(diag.common_eigenvector_found);
  CHECK_FALSE(irreducibility_certificate(RepTable::trivial(), 1).has_proximal_word);
}

TEST_CASE("particle cloud json round trip") {
  const auto cloud = ParticleCloud::uniform(random_points(2, 10, 5));
  const auto j = to_json(cloud, 5);
  CHECK(j["type"] == "particle_cloud");
  CHECK(j["d"] == 2);
  CHECK(j["n"] == 10);
  CHECK(j["points"][0].size() == 4);
  const auto back = particle_cloud_from_json(nlohmann::json::parse(j.dump()));
  REQUIRE(back.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK((back.points[i].vec() - cloud.points[i].vec()).norm() < 1e-15);
}
