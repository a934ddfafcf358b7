#include "leafwalk/fls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace leafwalk::fls {

namespace {

constexpr std::uint64_t kStepGuard = 10'000'000;

}  // namespace

double harnack_constant(double r, double R) {
  if (!(r > 0.0 && r < R)) throw ConfigError("harnack_constant needs 0 < r < R");
  const double rho = std::tanh(0.5 * r) / std::tanh(0.5 * R);
  return (1.0 + rho) / (1.0 - rho);
}

double BallSpec::rho() const { return std::tanh(0.5 * r) / std::tanh(0.5 * R); }

void BallSpec::validate(double separation) const {
  if (!(r > 0.0)) throw ConfigError("inner radius r must be positive");
  if (!(r < R)) throw ConfigError("inner radius r must be smaller than outer radius R");
  if (!(2.0 * R < separation)) {
    throw ConfigError("outer balls overlap: 2R = " + std::to_string(2.0 * R) +
                      " is not below the orbit separation " + std::to_string(separation));
  }
  if (!(eps_shell > 0.0)) throw ConfigError("eps_shell must be positive");
  if (!(step_cap > 0.0)) throw ConfigError("step_cap must be positive");
}

void OrbitMeasure::add(const Word& w, std::uint64_t count) {
  if (count == 0) return;
  entries_[w] += count;
  total_ += count;
}

std::uint64_t OrbitMeasure::count(const Word& w) const {
  auto it = entries_.find(w);
  return it == entries_.end() ? 0 : it->second;
}

double OrbitMeasure::weight(const Word& w) const {
  return total_ == 0 ? 0.0 : static_cast<double>(count(w)) / static_cast<double>(total_);
}

OrbitMeasure OrbitMeasure::left_translate(const Word& xi) const {
  OrbitMeasure out;
  for (const auto& [w, c] : entries_) out.add(xi * w, c);
  return out;
}

std::map<Word, double, ShortLex> OrbitMeasure::truncated(std::size_t max_len) const {
  std::map<Word, double, ShortLex> out;
  std::uint64_t kept = 0;
  for (const auto& [w, c] : entries_) {
    if (w.length() <= max_len) kept += c;
  }
  if (kept == 0) return out;
  for (const auto& [w, c] : entries_) {
    if (w.length() <= max_len) out[w] = static_cast<double>(c) / static_cast<double>(kept);
  }
  return out;
}

std::vector<Word> OrbitMeasure::expand() const {
  std::vector<Word> out;
  out.reserve(total_);
  for (const auto& [w, c] : entries_) out.insert(out.end(), c, w);
  return out;
}

OrbitDraw::OrbitDraw(const OrbitMeasure& mu) {
  if (mu.total() == 0) throw std::invalid_argument("cannot draw from an empty orbit measure");
  std::uint64_t acc = 0;
  for (const auto& [w, c] : mu.entries()) {
    atoms_.push_back(w);
    acc += c;
    cumulative_.push_back(acc);
  }
}

std::size_t OrbitDraw::index(Rng& rng) const {
  const std::uint64_t k = rng.below(cumulative_.back());
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), k);
  return static_cast<std::size_t>(it - cumulative_.begin());
}

double total_variation(const std::map<Word, double, ShortLex>& p, const std::map<Word, double, ShortLex>& q) {
  double sum = 0.0;
  for (const auto& [w, x] : p) {
    auto it = q.find(w);
    sum += std::abs(x - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [w, y] : q) {
    if (!p.contains(w)) sum += y;
  }
  return 0.5 * sum;
}

BalayageOutcome balayage_attempt(Complex y, double harnack, Rng& rng) {
  const auto theta = hypgeom::poisson_exit_sample(y, rng.uniform());
  const bool accepted = rng.uniform() * harnack < hypgeom::poisson_ratio(y, theta);
  return {accepted, theta};
}

Discretization::Discretization(GroupAtlas atlas, BallSpec balls)
    : atlas_(std::move(atlas)),
      balls_(balls),
      tanh_r_(std::tanh(0.5 * balls.r)),
      tanh_R_(std::tanh(0.5 * balls.R)),
      harnack_(balls.harnack()) {
  balls_.validate(atlas_.min_displacement(6));
  contact_words_ = atlas_.contact_list(balls_.R);
  for (const Word& w : contact_words_) contact_centers_.push_back(atlas_.orbit_point(w).disc());
}

Word Discretization::sample_one(const HPoint& p, const Word& hint, Rng& rng, WalkStats* stats) const {
  lattice::Located loc = atlas_.locate_disc(p.disc(), hint);
  Word copy = std::move(loc.word);
  Complex z = loc.local;
  const double cosh_r = std::cosh(balls_.r);

  for (std::uint64_t step = 0; step < kStepGuard; ++step) {
    if (stats) ++stats->steps;
    // Nearest inner ball among the contacts; ties go to the shortlex-first word.
    std::size_t best = 0;
    double best_ch = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < contact_centers_.size(); ++j) {
      const double ch = hypgeom::cosh_dist_disc(z, contact_centers_[j]);
      if (ch < best_ch * (1.0 - 1e-12)) {
        best_ch = ch;
        best = j;
      }
    }
    const double gap = std::acosh(std::max(best_ch, 1.0)) - balls_.r;

    Complex next;
    if (gap <= balls_.eps_shell) {
      const Complex center = contact_centers_[best];
      const Complex u = hypgeom::to_frame(center, z);
      Complex y;
      if (best_ch < cosh_r) {
        y = u / tanh_R_;  // started inside F_w
      } else {
        const double m = std::abs(u);
        y = (m > 0.0 ? u / m : Complex{1.0, 0.0}) * (tanh_r_ / tanh_R_);
      }
      if (stats) ++stats->attempts;
      const BalayageOutcome out = balayage_attempt(y, harnack_, rng);
      if (out.accepted) return copy * contact_words_[best];
      next = hypgeom::from_frame(center, tanh_R_ * out.exit.unit());
    } else {
      next = hypgeom::circle_point_disc(z, std::min(gap, balls_.step_cap), hypgeom::kTwoPi * rng.uniform());
    }
    lattice::Located moved = atlas_.locate_disc(next);
    for (std::size_t i = 0; i < moved.word.length(); ++i) copy.push_back(moved.word[i]);
    z = moved.local;
  }
  throw hypgeom::GeometryError("walk exceeded the step guard; ball system too sparse");
}

OrbitMeasure Discretization::sample_mu(const HPoint& p, const Word& hint, std::uint64_t n, std::uint64_t seed,
                                       WalkStats* stats) const {
  if (n == 0) throw std::invalid_argument("sample_mu needs n >= 1");
  OrbitMeasure mu;
  for (std::uint64_t i = 0; i < n; ++i) {
    Rng rng = Rng::stream(seed, StreamTag::kOrbitSample, i);
    mu.add(sample_one(p, hint, rng, stats));
  }
  return mu;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) {
  return splitmix64(splitmix64(seed) + 0x632be59bd9b4e019ULL * (k + 1));
}

EquivarianceTv equivariance_tv(const Discretization& disc, const Word& xi, std::uint64_t n, std::size_t max_len,
                               std::uint64_t seed, int bootstrap_rounds) {
  const GroupAtlas& atlas = disc.atlas();
  const OrbitMeasure base = disc.sample_mu(atlas.base_point(), Word(), n, derive_seed(seed, 0));
  const OrbitMeasure moved = disc.sample_mu(atlas.orbit_point(xi), xi, n, derive_seed(seed, 1));
  const double tv = total_variation(base.truncated(max_len), moved.left_translate(xi.inverse()).truncated(max_len));

  // Null distribution: TV between random halves of the base sample.
  std::vector<Word> draws = base.expand();
  const std::size_t half = draws.size() / 2;
  std::vector<double> null_tv;
  null_tv.reserve(static_cast<std::size_t>(bootstrap_rounds));
  for (int b = 0; b < bootstrap_rounds; ++b) {
    Rng rng = Rng::stream(seed, StreamTag::kBootstrap, static_cast<std::uint64_t>(b));
    for (std::size_t i = draws.size(); i > 1; --i) std::swap(draws[i - 1], draws[rng.below(i)]);
    OrbitMeasure first, second;
    for (std::size_t i = 0; i < draws.size(); ++i) (i < half ? first : second).add(draws[i]);
    null_tv.push_back(total_variation(first.truncated(max_len), second.truncated(max_len)));
  }
  std::sort(null_tv.begin(), null_tv.end());
  const auto q = static_cast<std::size_t>(std::ceil(0.99 * bootstrap_rounds)) - 1;
  return {tv, null_tv[std::min(q, null_tv.size() - 1)], n};
}

nlohmann::json to_json(const OrbitMeasure& mu, const HPoint& base, const BallSpec& balls, std::uint64_t seed) {
  nlohmann::json j;
  j["type"] = "orbit_measure";
  if (base.disc() == Complex{0.0, 0.0}) {
    j["base_point"] = "p0";
  } else {
    j["base_point"] = {base.disc().real(), base.disc().imag()};
  }
  j["samples"] = mu.total();
  j["r"] = balls.r;
  j["R"] = balls.R;
  j["seed"] = seed;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [w, c] : mu.entries()) entries.push_back({{"word", w.str()}, {"count", c}});
  j["entries"] = std::move(entries);
  return j;
}

OrbitMeasure orbit_measure_from_json(const nlohmann::json& j) {
  if (j.at("type") != "orbit_measure") throw std::invalid_argument("not an orbit_measure document");
  OrbitMeasure mu;
  for (const auto& e : j.at("entries")) {
    mu.add(Word::parse(e.at("word").get<std::string>()), e.at("count").get<std::uint64_t>());
  }
  if (mu.total() != j.at("samples").get<std::uint64_t>()) {
    throw std::invalid_argument("orbit_measure counts do not sum to samples");
  }
  return mu;
}

}  // namespace leafwalk::fls
