#include "leafwalk/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace leafwalk::lattice {

namespace {

constexpr char kLetters[4] = {'A', 'B', 'a', 'b'};  // byte order
constexpr int kLocateGuard = 10000;

int letter_index(char c) {
  switch (c) {
    case 'A': return 0;
    case 'a': return 1;
    case 'B': return 2;
    case 'b': return 3;
    default: throw WordError("invalid letter '" + std::string(1, c) + "'");
  }
}

Complex half_plane_of(Complex disc) { return Complex{0.0, 1.0} * (1.0 + disc) / (1.0 - disc); }

bool in_domain_half_plane(Complex h, double tol) {
  return std::abs(h.real()) <= 1.0 + tol && std::abs(2.0 * h - 1.0) >= 1.0 - tol &&
         std::abs(2.0 * h + 1.0) >= 1.0 - tol;
}

double distance_to_domain_half_plane(Complex h) {
  if (in_domain_half_plane(h, 0.0)) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (Side s : {Side::kRightLine, Side::kLeftLine, Side::kRightCircle, Side::kLeftCircle}) {
    d = std::min(d, GroupAtlas::distance_to_side(h, s));
  }
  return d;
}

Complex apply_half_plane(const Isometry& g, Complex z) {
  const auto& m = g.matrix();
  return (m[0] * z + m[1]) / (m[2] * z + m[3]);
}

}  // namespace

GroupAtlas::GroupAtlas()
    : generators_{Isometry(1, 2, 0, 1), Isometry(1, -2, 0, 1), Isometry(1, 0, 2, 1),
                  Isometry(1, 0, -2, 1)} {}

GroupAtlas GroupAtlas::build_gamma2() {
  GroupAtlas atlas;
  if (double err = atlas.max_side_pairing_error(64); err > 1e-9) {
    throw std::logic_error("side pairing check failed, error " + std::to_string(err));
  }
  if (!atlas.free_up_to(8)) {
    throw std::logic_error("generators satisfy a relation of length <= 8");
  }
  return atlas;
}

const Isometry& GroupAtlas::generator(char letter) const { return generators_[letter_index(letter)]; }

Isometry GroupAtlas::word_to_isometry(const Word& w) const {
  Isometry g;
  for (std::size_t i = 0; i < w.length(); ++i) g = g * generator(w[i]);
  return g;
}

HPoint GroupAtlas::orbit_point(const Word& w) const {
  return hypgeom::apply(word_to_isometry(w), base_point());
}

bool GroupAtlas::in_domain(const HPoint& p, double tol) const { return in_domain_disc(p.disc(), tol); }

bool GroupAtlas::in_domain_disc(Complex z, double tol) const {
  return in_domain_half_plane(half_plane_of(z), tol);
}

double GroupAtlas::distance_to_side(Complex h, Side side) {
  const double x = h.real(), y = h.imag();
  switch (side) {
    case Side::kRightLine: return std::asinh(std::abs(x - 1.0) / y);
    case Side::kLeftLine: return std::asinh(std::abs(x + 1.0) / y);
    case Side::kRightCircle: return std::asinh(std::abs(std::norm(h - 0.5) - 0.25) / y);
    case Side::kLeftCircle: return std::asinh(std::abs(std::norm(h + 0.5) - 0.25) / y);
  }
  return 0.0;
}

double GroupAtlas::distance_to_domain(const HPoint& p) const {
  return distance_to_domain_half_plane(p.half_plane());
}

std::vector<OrbitPoint> GroupAtlas::orbit_enumerate(int max_len) const {
  if (max_len < 0) throw std::invalid_argument("max_len must be nonnegative");
  std::vector<OrbitPoint> out;
  std::vector<std::pair<Word, Isometry>> level{{Word(), Isometry()}};
  out.push_back({Word(), base_point()});
  for (int len = 1; len <= max_len; ++len) {
    std::vector<std::pair<Word, Isometry>> next;
    next.reserve(level.size() * 3 + 4);
    for (const auto& [w, g] : level) {
      for (char c : kLetters) {
        if (!w.empty() && w[w.length() - 1] == Word::inverse_letter(c)) continue;
        Word child = w;
        child.push_back(c);
        next.emplace_back(std::move(child), g * generator(c));
      }
    }
    for (const auto& [w, g] : next) out.push_back({w, hypgeom::apply(g, base_point())});
    level = std::move(next);
  }
  return out;
}

double GroupAtlas::min_displacement(int max_len) const {
  if (max_len < 1) throw std::invalid_argument("max_len must be at least 1");
  // cosh d(i, g i) = (a^2 + b^2 + c^2 + d^2) / 2 for g in SL(2, R).
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::pair<Word, Isometry>> level{{Word(), Isometry()}};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<std::pair<Word, Isometry>> next;
    next.reserve(level.size() * 3 + 4);
    for (const auto& [w, g] : level) {
      for (char c : kLetters) {
        if (!w.empty() && w[w.length() - 1] == Word::inverse_letter(c)) continue;
        Word child = w;
        child.push_back(c);
        Isometry h = g * generator(c);
        const auto& m = h.matrix();
        double ch = 0.5 * (m[0] * m[0] + m[1] * m[1] + m[2] * m[2] + m[3] * m[3]);
        best = std::min(best, std::acosh(std::max(ch, 1.0)));
        next.emplace_back(std::move(child), h);
      }
    }
    level = std::move(next);
  }
  return best;
}

Located GroupAtlas::locate_disc(Complex z, const Word& hint) const {
  Located loc{hint, hint.empty() ? z : word_to_isometry(hint).inverse().apply_disc(z)};
  Complex h = half_plane_of(loc.local);
  constexpr double tol = 1e-12;
  // Deep in a cusp a single side pairing barely moves the point, so whole
  // powers of the cusp's parabolic are applied at once. In the cusp
  // coordinate t the letters pushed per unit of k act locally as t -> t - 2:
  //   cusp inf: t = h,           "A"  (local map a)
  //   cusp 0:   t = -1/h,        "b"  (local map B)
  //   cusp -1:  t = -1/(h + 1),  "aB" (local map b after A)
  auto bulk = [&loc](double t_re, const char* up, const char* down) -> long {
    if (std::abs(t_re) <= 3.0) return 0;
    const long k = std::lround(t_re / 2.0);
    const char* letters = k > 0 ? up : down;
    for (long i = 0; i < std::abs(k); ++i) {
      for (const char* c = letters; *c; ++c) loc.word.push_back(*c);
    }
    return k;
  };
  for (int step = 0; step < kLocateGuard; ++step) {
    if (const long k = bulk(h.real(), "A", "a")) {
      h -= 2.0 * static_cast<double>(k);
      continue;
    }
    if (const Complex t = -1.0 / h; const long k = bulk(t.real(), "b", "B")) {
      h = -1.0 / (t - 2.0 * static_cast<double>(k));
      continue;
    }
    if (const Complex t = -1.0 / (h + 1.0); const long k = bulk(t.real(), "aB", "bA")) {
      h = -1.0 - 1.0 / (t - 2.0 * static_cast<double>(k));
      continue;
    }
    char move;
    if (h.real() > 1.0 + tol) {
      move = 'A';
    } else if (h.real() < -1.0 - tol) {
      move = 'a';
    } else if (std::abs(2.0 * h - 1.0) < 1.0 - tol) {
      move = 'B';
    } else if (std::abs(2.0 * h + 1.0) < 1.0 - tol) {
      move = 'b';
    } else {
      loc.local = (h - Complex{0.0, 1.0}) / (h + Complex{0.0, 1.0});
      return loc;
    }
    // local = word^-1 z, so extending word by `move` applies move^-1 locally.
    h = apply_half_plane(generator(Word::inverse_letter(move)), h);
    loc.word.push_back(move);
  }
  throw hypgeom::GeometryError("fundamental-domain tracking did not terminate");
}

Word GroupAtlas::locate(const HPoint& z, const Word& hint) const {
  return locate_disc(z.disc(), hint).word;
}

std::vector<Word> GroupAtlas::contact_list(double R) const {
  if (!(R > 0.0)) throw std::invalid_argument("contact radius must be positive");
  const double reach = 2.0 * R + 1e-6;
  std::vector<Word> out{Word()};
  std::vector<std::pair<Word, Isometry>> level{{Word(), Isometry()}};
  int empty_levels = 0;
  constexpr int kMaxLen = 16;
  for (int len = 1; len <= kMaxLen && empty_levels < 2; ++len) {
    std::vector<std::pair<Word, Isometry>> next;
    next.reserve(level.size() * 3 + 4);
    bool any = false;
    for (const auto& [w, g] : level) {
      for (char c : kLetters) {
        if (!w.empty() && w[w.length() - 1] == Word::inverse_letter(c)) continue;
        Word child = w;
        child.push_back(c);
        Isometry h = g * generator(c);
        if (distance_to_domain_half_plane(apply_half_plane(h, Complex{0.0, 1.0})) <= reach) {
          out.push_back(child);
          any = true;
        }
        next.emplace_back(std::move(child), h);
      }
    }
    empty_levels = any ? 0 : empty_levels + 1;
    level = std::move(next);
  }
  std::sort(out.begin(), out.end(), ShortLex{});
  return out;
}

double GroupAtlas::max_side_pairing_error(int samples_per_side) const {
  double err = 0.0;
  for (int k = 0; k < samples_per_side; ++k) {
    const double t = (k + 0.5) / samples_per_side;
    // A carries Re z = -1 onto Re z = 1.
    const double y = std::exp(-6.0 + 12.0 * t);
    err = std::max(err, std::abs(apply_half_plane(generator('A'), Complex{-1.0, y}).real() - 1.0));
    // B carries |2z + 1| = 1 onto |2z - 1| = 1.
    const Complex on_left = -0.5 + 0.5 * std::polar(1.0, std::numbers::pi * t);
    err = std::max(err, std::abs(std::abs(2.0 * apply_half_plane(generator('B'), on_left) - 1.0) - 1.0));
  }
  return err;
}

bool GroupAtlas::free_up_to(int max_len) const {
  std::vector<std::pair<Word, Isometry>> level{{Word(), Isometry()}};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<std::pair<Word, Isometry>> next;
    for (const auto& [w, g] : level) {
      for (char c : kLetters) {
        if (!w.empty() && w[w.length() - 1] == Word::inverse_letter(c)) continue;
        Word child = w;
        child.push_back(c);
        Isometry h = g * generator(c);
        if (h.approx_equal(Isometry(), 1e-9)) return false;
        next.emplace_back(std::move(child), h);
      }
    }
    level = std::move(next);
  }
  return true;
}

}  // namespace leafwalk::lattice
