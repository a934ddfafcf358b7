#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "leafwalk/lattice.hpp"

using namespace leafwalk::lattice;
using leafwalk::hypgeom::dist;

namespace {

using IntMat = std::array<long long, 4>;

IntMat letter_matrix(char c) {
  switch (c) {
    case 'A': return {1, 2, 0, 1};
    case 'a': return {1, -2, 0, 1};
    case 'B': return {1, 0, 2, 1};
    default: return {1, 0, -2, 1};
  }
}

IntMat mul(const IntMat& x, const IntMat& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
          x[2] * y[1] + x[3] * y[3]};
}

// All reduced words of length exactly n, by brute-force filtering of {A,a,B,b}^n.
std::vector<std::string> reduced_words(int n) {
  std::vector<std::string> out{""};
  for (int k = 0; k < n; ++k) {
    std::vector<std::string> next;
    for (const auto& w : out) {
      for (char c : {'A', 'a', 'B', 'b'}) {
        if (!w.empty() && (w.back() ^ 0x20) == c) continue;
        next.push_back(w + c);
      }
    }
    out = std::move(next);
  }
  return out;
}

IntMat int_matrix(const std::string& w) {
  IntMat m{1, 0, 0, 1};
  for (char c : w) m = mul(m, letter_matrix(c));
  return m;
}

// dist(i, g i) from the integer entries.
double int_displacement(const IntMat& m) {
  const double f = static_cast<double>(m[0] * m[0] + m[1] * m[1] + m[2] * m[2] + m[3] * m[3]);
  return std::acosh(0.5 * f);
}

// Boundary of the fundamental domain sampled by hyperbolic arclength t in
// [-8, 8] along its four sides (lines Re z = +-1, circles |2z -+ 1| = 1).
std::vector<HPoint> boundary_mesh(int per_side) {
  std::vector<HPoint> pts;
  for (int k = 0; k < per_side; ++k) {
    const double y = std::exp(-8.0 + 16.0 * k / (per_side - 1));
    pts.push_back(HPoint::from_half_plane({1.0, y}));
    pts.push_back(HPoint::from_half_plane({-1.0, y}));
    const Complex iy{0.0, y};
    pts.push_back(HPoint::from_half_plane(iy / (iy + 1.0)));
    pts.push_back(HPoint::from_half_plane(iy / (1.0 - iy)));
  }
  return pts;
}

double mesh_distance(const GroupAtlas& atlas, const std::vector<HPoint>& mesh, const HPoint& p) {
  if (atlas.in_domain(p)) return 0.0;
  double best = 1e300;
  for (const auto& q : mesh) best = std::min(best, dist(p, q));
  return best;
}

Word random_word(std::mt19937_64& gen, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len), letter(0, 3);
  const char letters[4] = {'A', 'a', 'B', 'b'};
  Word w;
  const int n = len(gen);
  while (static_cast<int>(w.length()) < n) w.push_back(letters[letter(gen)]);
  return w;
}

}  // namespace

TEST_CASE("words") {
  CHECK(Word::parse("").empty());
  CHECK(Word::parse("ABab").str() == "ABab");
  CHECK_THROWS_AS(Word::parse("Aa"), WordError);
  CHECK_THROWS_AS(Word::parse("bB"), WordError);
  CHECK_THROWS_AS(Word::parse("AC"), WordError);
  CHECK(Word::parse("ABa").inverse().str() == "Aba");
  CHECK((Word::parse("ABa") * Word::parse("Ab")).str() == "A");
  CHECK((Word::parse("AB") * Word::parse("AB").inverse()).empty());
  Word w = Word::parse("AB");
  w.push_back('b');
  CHECK(w.str() == "A");

  ShortLex less;
  CHECK(less(Word::parse("b"), Word::parse("AA")));
  CHECK(less(Word::parse("A"), Word::parse("B")));
  CHECK(less(Word::parse("B"), Word::parse("a")));
  CHECK(less(Word::parse("a"), Word::parse("b")));
}

TEST_CASE("generators and word matrices") {
  const auto atlas = GroupAtlas::build_gamma2();
  const auto i = HPoint::from_half_plane({0.0, 1.0});
  const auto ai = leafwalk::hypgeom::apply(atlas.generator('A'), i).half_plane();
  CHECK(std::abs(ai - Complex(2.0, 1.0)) < 1e-12);
  const auto bi = leafwalk::hypgeom::apply(atlas.generator('B'), i).half_plane();
  CHECK(std::abs(bi - Complex(0.4, 0.2)) < 1e-12);

  CHECK(atlas.word_to_isometry(Word()).approx_equal(Isometry::identity()));
  CHECK(atlas.word_to_isometry(Word::parse("AB")).approx_equal(Isometry(5, 2, 2, 1), 1e-12));

  std::mt19937_64 gen(1);
  for (int k = 0; k < 1000; ++k) {
    const Word w1 = random_word(gen, 6), w2 = random_word(gen, 6);
    CHECK((atlas.word_to_isometry(w1) * atlas.word_to_isometry(w2))
              .approx_equal(atlas.word_to_isometry(w1 * w2), 1e-6));
  }
  for (const auto& s : reduced_words(4)) {
    const auto m = int_matrix(s);
    CHECK(atlas.word_to_isometry(Word::parse(s))
              .approx_equal(Isometry(static_cast<double>(m[0]), static_cast<double>(m[1]),
                                     static_cast<double>(m[2]), static_cast<double>(m[3])),
                            1e-9));
  }
}

TEST_CASE("side pairings and freeness") {
  const auto atlas = GroupAtlas::build_gamma2();
  CHECK(atlas.max_side_pairing_error(200) < 1e-9);
  CHECK(atlas.free_up_to(8));

  int trivial = 0;
  for (int n = 1; n <= 8; ++n) {
    for (const auto& s : reduced_words(n)) {
      const auto m = int_matrix(s);
      const bool plus = m == IntMat{1, 0, 0, 1};
      const bool minus = m == IntMat{-1, 0, 0, -1};
      if (plus || minus) ++trivial;
    }
  }
  CHECK(trivial == 0);
}

TEST_CASE("orbit enumeration") {
  const auto atlas = GroupAtlas::build_gamma2();
  const std::array<std::size_t, 5> counts{1, 5, 17, 53, 161};
  for (int n = 0; n <= 4; ++n) CHECK(atlas.orbit_enumerate(n).size() == counts[n]);

  const auto orbit = atlas.orbit_enumerate(3);
  for (const auto& op : orbit) {
    CHECK(dist(op.position, atlas.orbit_point(op.word)) < 1e-10);
  }
  const double sep = atlas.min_displacement(3);
  double closest = 1e300;
  for (std::size_t x = 0; x < orbit.size(); ++x) {
    for (std::size_t y = x + 1; y < orbit.size(); ++y) {
      closest = std::min(closest, dist(orbit[x].position, orbit[y].position));
    }
  }
  CHECK(closest >= sep - 1e-9);
}

TEST_CASE("minimal displacement") {
  const auto atlas = GroupAtlas::build_gamma2();
  double brute1 = 1e300, brute6 = 1e300;
  std::size_t words6 = 0;
  for (int n = 1; n <= 6; ++n) {
    for (const auto& s : reduced_words(n)) {
      const double d = int_displacement(int_matrix(s));
      if (n == 1) brute1 = std::min(brute1, d);
      brute6 = std::min(brute6, d);
      ++words6;
    }
  }
  CHECK(words6 == 1456);
  CHECK(atlas.min_displacement(1) == doctest::Approx(brute1).epsilon(1e-12));
  CHECK(atlas.min_displacement(6) == doctest::Approx(brute6).epsilon(1e-12));
  CHECK(std::abs(atlas.min_displacement(6) - std::acosh(3.0)) < 1e-9);
  for (int n = 1; n < 6; ++n) CHECK(atlas.min_displacement(n + 1) <= atlas.min_displacement(n));
}

TEST_CASE("distance to the domain agrees with the boundary mesh") {
  const auto atlas = GroupAtlas::build_gamma2();
  const auto mesh = boundary_mesh(2000);
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 300; ++k) {
    const auto p = HPoint::from_disc(std::polar(0.85 * std::sqrt(u(gen)), 6.283185307179586 * u(gen)));
    const double exact = atlas.distance_to_domain(p);
    const double approx = mesh_distance(atlas, mesh, p);
    CHECK(exact <= approx + 1e-12);
    CHECK(approx <= exact + 0.01);
  }
}

TEST_CASE("contact list") {
  const auto atlas = GroupAtlas::build_gamma2();
  const double R = 0.8;
  const auto contacts = atlas.contact_list(R);
  std::set<std::string> names;
  for (const auto& w : contacts) names.insert(w.str());
  for (const char* w : {"", "A", "a", "B", "b"}) CHECK(names.count(w) == 1);
  CHECK(std::is_sorted(contacts.begin(), contacts.end(), ShortLex{}));

  const auto mesh = boundary_mesh(250);
  const double mesh_tol = 0.04;
  for (const auto& w : contacts) {
    CHECK(mesh_distance(atlas, mesh, atlas.orbit_point(w)) <= 2.0 * R + mesh_tol);
  }
  // Completeness among short words: a ball whose center the mesh places
  // within 2R of the domain must be listed.
  for (const auto& op : atlas.orbit_enumerate(4)) {
    if (mesh_distance(atlas, mesh, op.position) <= 2.0 * R) CHECK(names.count(op.word.str()) == 1);
  }
}

TEST_CASE("locate examples") {
  const auto atlas = GroupAtlas::build_gamma2();
  CHECK(atlas.locate(HPoint(), Word()).empty());
  CHECK(atlas.locate(HPoint::from_half_plane({2.0, 1.0}), Word()).str() == "A");

  const auto w = Word::parse("ABa");
  const auto p = leafwalk::hypgeom::apply(atlas.word_to_isometry(w), HPoint::from_half_plane({1e-3, 1.0 + 1e-3}));
  CHECK(atlas.locate(p, Word::parse("AB")).str() == "ABa");
  CHECK(atlas.locate(p, Word()).str() == "ABa");
}

TEST_CASE("locate lands in the domain, also deep in cusps") {
  const auto atlas = GroupAtlas::build_gamma2();
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> re(-0.95, 0.95), im(0.0, 3.0);
  for (int k = 0; k < 500; ++k) {
    const Word w = random_word(gen, 5);
    const Complex h{re(gen), std::exp(im(gen))};
    if (!atlas.in_domain(HPoint::from_half_plane(h), -1e-6)) continue;
    const auto z = leafwalk::hypgeom::apply(atlas.word_to_isometry(w), HPoint::from_half_plane(h));
    const auto loc = atlas.locate_disc(z.disc(), Word());
    CHECK(loc.word == w);
    CHECK(atlas.in_domain_disc(loc.local, 1e-9));
  }

  // Parabolic powers at the cusps infinity, 0 and -1.
  for (int n : {5, 40, 300}) {
    for (const char* gen_word : {"A", "B", "aB"}) {
      Word w;
      for (int j = 0; j < n; ++j) w = w * Word::parse(gen_word);
      const auto z = leafwalk::hypgeom::apply(atlas.word_to_isometry(w), HPoint::from_half_plane({0.1, 1.2}));
      const auto loc = atlas.locate_disc(z.disc(), Word());
      CHECK(loc.word == w);
      CHECK(atlas.in_domain_disc(loc.local, 1e-6));
    }
  }
}

TEST_CASE("locate is equivariant") {
  const auto atlas = GroupAtlas::build_gamma2();
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> re(-0.9, 0.9), im(-0.5, 1.5);
  int trials = 0;
  while (trials < 1000) {
    const Complex h{re(gen), std::exp(im(gen))};
    if (!atlas.in_domain(HPoint::from_half_plane(h), -1e-3)) continue;
    const Word base = random_word(gen, 3), xi = random_word(gen, 3);
    const auto z = leafwalk::hypgeom::apply(atlas.word_to_isometry(base), HPoint::from_half_plane(h));
    const Word here = atlas.locate(z, base);
    const Word moved = atlas.locate(leafwalk::hypgeom::apply(atlas.word_to_isometry(xi), z), xi * base);
    CHECK(moved == xi * here);
    ++trials;
  }
}
