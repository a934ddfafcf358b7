#include "leafwalk/config.hpp"

#include <algorithm>
#include <charconv>
#include <complex>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace leafwalk::config {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t parse_u64(std::string_view s) {
  s = trim(s);
  // Budgets like 2e4 are accepted when they are exact integers.
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (!s.empty() && ec == std::errc() && ptr == s.data() + s.size()) return v;
  const double d = parse_double(s);
  if (!(d >= 0.0 && d < 1.8e19) || d != static_cast<double>(static_cast<std::uint64_t>(d))) {
    throw ConfigError("expected a non-negative integer, got '" + std::string(s) + "'");
  }
  return static_cast<std::uint64_t>(d);
}

int parse_int(std::string_view s) {
  const std::uint64_t v = parse_u64(s);
  if (v > 1'000'000'000) throw ConfigError("value " + std::to_string(v) + " is too large");
  return static_cast<int>(v);
}

projdyn::Matrix parse_matrix(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::vector<std::complex<double>> entries;
  for (std::string tok; in >> tok;) entries.push_back(parse_complex(tok));
  if (entries.size() != 4) {
    throw ConfigError("a matrix needs 4 row-major entries, got " + std::to_string(entries.size()));
  }
  projdyn::Matrix m(2, 2);
  m << entries[0], entries[1], entries[2], entries[3];
  try {
    projdyn::ProjMap check(m);
  } catch (const projdyn::ProjectiveError& e) {
    throw ConfigError(std::string("matrix is not invertible (") + e.what() + ")");
  }
  return m;
}

struct Key {
  std::string section;
  std::function<void(Config&, std::string_view)> set;
};

const std::map<std::string, Key>& keys() {
  static const std::map<std::string, Key> table = {
      {"group", {"geometry", [](Config& c, std::string_view v) { c.group = std::string(v); }}},
      {"r", {"geometry", [](Config& c, std::string_view v) { c.balls.r = parse_double(v); }}},
      {"R", {"geometry", [](Config& c, std::string_view v) { c.balls.R = parse_double(v); }}},
      {"eps_shell", {"geometry", [](Config& c, std::string_view v) { c.balls.eps_shell = parse_double(v); }}},
      {"step_cap", {"geometry", [](Config& c, std::string_view v) { c.balls.step_cap = parse_double(v); }}},
      {"rep", {"representation", [](Config& c, std::string_view v) { c.rep = std::string(v); }}},
      {"A", {"representation", [](Config& c, std::string_view v) { c.a = parse_matrix(v); }}},
      {"B", {"representation", [](Config& c, std::string_view v) { c.b = parse_matrix(v); }}},
      {"drive", {"representation", [](Config& c, std::string_view v) { c.drive = std::string(v); }}},
      {"N", {"budgets", [](Config& c, std::string_view v) { c.N = parse_u64(v); }}},
      {"n_mu", {"budgets", [](Config& c, std::string_view v) { c.n_mu = parse_u64(v); }}},
      {"n_mu_mean", {"budgets", [](Config& c, std::string_view v) { c.n_mu_mean = parse_u64(v); }}},
      {"n_circle", {"budgets", [](Config& c, std::string_view v) { c.n_circle = parse_int(v); }}},
      {"circle_radius", {"budgets", [](Config& c, std::string_view v) { c.circle_radius = parse_double(v); }}},
      {"n_steps", {"budgets", [](Config& c, std::string_view v) { c.n_steps = parse_int(v); }}},
      {"n_runs", {"budgets", [](Config& c, std::string_view v) { c.n_runs = parse_int(v); }}},
      {"n_max", {"budgets", [](Config& c, std::string_view v) { c.n_max = parse_int(v); }}},
      {"n_products", {"budgets", [](Config& c, std::string_view v) { c.n_products = parse_int(v); }}},
      {"n_probe", {"budgets", [](Config& c, std::string_view v) { c.n_probe = parse_u64(v); }}},
      {"bootstrap", {"budgets", [](Config& c, std::string_view v) { c.bootstrap = parse_int(v); }}},
      {"max_len", {"budgets", [](Config& c, std::string_view v) { c.max_len = parse_int(v); }}},
      {"w1_threshold", {"thresholds", [](Config& c, std::string_view v) { c.w1_threshold = parse_double(v); }}},
      {"sigma_threshold",
       {"thresholds", [](Config& c, std::string_view v) { c.sigma_threshold = parse_double(v); }}},
      {"seed", {"run", [](Config& c, std::string_view v) { c.seed = parse_u64(v); }}},
      {"out", {"run", [](Config& c, std::string_view v) { c.out = std::string(v); }}},
  };
  return table;
}

[[noreturn]] void fail_at(int line, const std::string& what) {
  throw ConfigError("line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::complex<double> parse_complex(std::string_view token) {
  std::string_view s = trim(token);
  if (s.empty()) throw ConfigError("empty complex entry");
  if (s.back() != 'i') return {parse_double(s), 0.0};
  s.remove_suffix(1);
  // Split before the last sign that is not a leading sign or an exponent sign.
  std::size_t split = std::string_view::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_part = [](std::string_view t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return parse_double(t[0] == '+' ? t.substr(1) : t);
  };
  try {
    if (split == std::string_view::npos) return {0.0, imag_part(s)};
    return {parse_double(s.substr(0, split)), imag_part(s.substr(split))};
  } catch (const ConfigError&) {
    throw ConfigError("malformed complex number '" + std::string(token) + "'");
  }
}

Config parse_config(std::string_view text) {
  Config cfg;
  std::map<std::string, int> seen;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail_at(line_no, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      static const char* kSections[] = {"geometry", "representation", "budgets", "thresholds", "run"};
      if (std::find(std::begin(kSections), std::end(kSections), section) == std::end(kSections)) {
        fail_at(line_no, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail_at(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = keys().find(key);
    if (it == keys().end()) fail_at(line_no, "unknown key '" + key + "'");
    if (!section.empty() && section != it->second.section) {
      fail_at(line_no, "key '" + key + "' belongs in [" + it->second.section + "], not [" + section + "]");
    }
    if (seen.contains(key)) fail_at(line_no, "duplicate key '" + key + "' (first set on line " +
                                                 std::to_string(seen[key]) + ")");
    if (value.empty()) fail_at(line_no, "missing value for '" + key + "'");
    seen[key] = line_no;
    try {
      it->second.set(cfg, value);
    } catch (const ConfigError& e) {
      fail_at(line_no, e.what());
    }
  }

  auto line_of = [&seen](std::initializer_list<const char*> names) {
    int best = 0;
    for (const char* n : names) {
      if (auto it = seen.find(n); it != seen.end()) best = std::max(best, it->second);
    }
    return best;
  };

  if (cfg.group != "gamma2") fail_at(line_of({"group"}), "unknown group preset '" + cfg.group + "'");
  try {
    cfg.balls.validate(lattice::GroupAtlas::build_gamma2().min_displacement(6));
  } catch (const ConfigError& e) {
    fail_at(line_of({"r", "R", "eps_shell", "step_cap"}), e.what());
  }

  static const char* kPresets[] = {"inclusion", "trivial", "rotation", "diagonal", "custom"};
  if (std::find(std::begin(kPresets), std::end(kPresets), cfg.rep) == std::end(kPresets)) {
    fail_at(line_of({"rep"}), "unknown representation '" + cfg.rep + "'");
  }
  if (cfg.a || cfg.b) {
    if (!seen.contains("rep")) cfg.rep = "custom";
    if (cfg.rep != "custom") fail_at(line_of({"A", "B"}), "explicit matrices need rep = custom");
  }
  if (cfg.rep == "custom" && !(cfg.a && cfg.b)) fail_at(line_of({"rep"}), "rep = custom needs both A and B");

  if (!cfg.drive.empty() && cfg.drive != "discretized") {
    try {
      lattice::Word::parse(cfg.drive);
    } catch (const std::exception& e) {
      fail_at(line_of({"drive"}), std::string("drive must be 'discretized' or a reduced word: ") + e.what());
    }
  }

  const std::pair<const char*, long double> budgets[] = {
      {"N", cfg.N},           {"n_mu", cfg.n_mu},       {"n_mu_mean", cfg.n_mu_mean}, {"n_circle", cfg.n_circle},
      {"n_steps", cfg.n_steps}, {"n_runs", cfg.n_runs}, {"n_max", cfg.n_max},         {"n_products", cfg.n_products},
      {"n_probe", cfg.n_probe}, {"bootstrap", cfg.bootstrap}, {"max_len", cfg.max_len}};
  for (const auto& [name, v] : budgets) {
    if (v < 1) fail_at(line_of({name}), std::string(name) + " must be at least 1");
  }
  if (cfg.n_mu < 2) fail_at(line_of({"n_mu"}), "n_mu must be at least 2");
  if (cfg.n_steps < 10) fail_at(line_of({"n_steps"}), "n_steps must be at least 10");
  if (cfg.n_runs < 5) fail_at(line_of({"n_runs"}), "n_runs must be at least 5");
  if (cfg.n_probe < 2) fail_at(line_of({"n_probe"}), "n_probe must be at least 2");
  if (!(cfg.circle_radius > 0.0 && cfg.circle_radius <= 1.0)) {
    fail_at(line_of({"circle_radius"}), "circle_radius must lie in (0, 1]");
  }
  if (!(cfg.w1_threshold > 0.0)) fail_at(line_of({"w1_threshold"}), "w1_threshold must be positive");
  if (!(cfg.sigma_threshold > 0.0)) fail_at(line_of({"sigma_threshold"}), "sigma_threshold must be positive");
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

projdyn::RepTable Config::rep_table() const {
  if (rep == "inclusion") return projdyn::RepTable::inclusion();
  if (rep == "trivial") return projdyn::RepTable::trivial(2);
  if (rep == "rotation") return projdyn::RepTable::rotation();
  if (rep == "diagonal") return projdyn::RepTable::diagonal();
  if (rep == "custom" && a && b) return projdyn::RepTable(projdyn::ProjMap(*a), projdyn::ProjMap(*b));
  throw ConfigError("representation '" + rep + "' is not fully specified");
}

std::string Config::driving_measure() const {
  if (!drive.empty()) return drive;
  return rep == "diagonal" ? "A" : "discretized";
}

}  // namespace leafwalk::config
