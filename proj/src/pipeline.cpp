#include "leafwalk/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "leafwalk/harmonic.hpp"

namespace leafwalk::pipeline {

namespace fs = std::filesystem;
using config::Config;
using fls::derive_seed;
using fls::OrbitMeasure;
using hypgeom::HPoint;
using lattice::Word;

namespace {

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double parse_field(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

class Writer {
 public:
  Writer(fs::path dir, std::ostream* log) : dir_(std::move(dir)), log_(log) { fs::create_directories(dir_); }

  void text(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + p.string());
    files_.push_back(p);
    if (log_) *log_ << "wrote " << p.string() << "\n";
  }
  void json(const std::string& name, const nlohmann::json& j) { text(name, j.dump(2) + "\n"); }

  std::vector<fs::path> files() const { return files_; }

 private:
  fs::path dir_;
  std::ostream* log_;
  std::vector<fs::path> files_;
};

struct PlotData {
  std::ostringstream out;
  PlotData() { out << "series,x,y\n"; }
  void add(const std::string& series, double x, double y) { out << series << ',' << fmt(x) << ',' << fmt(y) << '\n'; }
};

DiagnosticRow below(std::string name, double value, double threshold, std::uint64_t n, std::uint64_t seed,
                    std::optional<double> se = std::nullopt) {
  return {std::move(name), value, threshold, se, n, seed, value < threshold};
}

DiagnosticRow at_least(std::string name, double value, double threshold, std::uint64_t n, std::uint64_t seed,
                       std::optional<double> se = std::nullopt) {
  return {std::move(name), value, threshold, se, n, seed, value >= threshold};
}

// Shared state of the subcommands that need the sampled measure.
struct Context {
  const Config& cfg;
  fls::Discretization disc;
  projdyn::RepTable rep;

  explicit Context(const Config& c)
      : cfg(c), disc(lattice::GroupAtlas::build_gamma2(), c.balls), rep(c.rep_table()) {}

  std::uint64_t seed(std::uint64_t k) const { return derive_seed(cfg.seed, k); }
  OrbitMeasure mu_p0() const { return disc.sample_mu(HPoint(), Word(), cfg.n_mu, seed(1)); }
  OrbitMeasure mu_fresh() const { return disc.sample_mu(HPoint(), Word(), cfg.n_mu, seed(2)); }
  projdyn::StationaryCloud nu(const OrbitMeasure& mu) const {
    return projdyn::stationary_cloud(rep, mu, projdyn::ProjPoint::basis(rep.dim(), 0), cfg.N, {}, seed(3));
  }
};

void stationarity_rows(const Context& ctx, const OrbitMeasure& mu, const OrbitMeasure& fresh,
                       const projdyn::StationaryCloud& nu, std::vector<DiagnosticRow>& rows) {
  const Config& cfg = ctx.cfg;
  rows.push_back(at_least("backward_converged_fraction", nu.converged_fraction, 0.99, cfg.N, ctx.seed(3)));
  rows.push_back(below("markov_residual", projdyn::markov_residual(ctx.rep, fresh, nu.cloud, ctx.seed(4)),
                       cfg.w1_threshold, cfg.N, ctx.seed(4)));
  const double gap = harmonic::uniqueness_gap(ctx.rep, mu, cfg.N, {ctx.seed(5), ctx.seed(6)});
  rows.push_back(below("uniqueness_gap", gap, cfg.w1_threshold, cfg.N, ctx.seed(5)));
}

std::vector<DiagnosticRow> run_discretize(const Context& ctx, Writer& w) {
  const Config& cfg = ctx.cfg;
  std::vector<DiagnosticRow> rows;
  const OrbitMeasure mu = ctx.mu_p0();
  w.json("orbit_measure.json", fls::to_json(mu, HPoint(), cfg.balls, ctx.seed(1)));

  int positive = 0;
  for (const auto& op : ctx.disc.atlas().orbit_enumerate(2)) positive += mu.count(op.word) > 0 ? 1 : 0;
  rows.push_back(at_least("support_length_le_2", positive, 17, cfg.n_mu, ctx.seed(1)));

  const double p = mu.weight(Word());
  const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(cfg.n_mu));
  rows.push_back(at_least("identity_mass", p, 1.0 / cfg.balls.harnack() - 3.0 * sigma, cfg.n_mu, ctx.seed(1), sigma));

  const char* xis[] = {"A", "B", "AB"};
  for (std::uint64_t k = 0; k < 3; ++k) {
    const auto tv = fls::equivariance_tv(ctx.disc, Word::parse(xis[k]), cfg.n_mu,
                                         static_cast<std::size_t>(cfg.max_len), ctx.seed(10 + k), cfg.bootstrap);
    rows.push_back(below(std::string("equivariance_tv_") + xis[k], tv.tv, tv.threshold, cfg.n_mu, ctx.seed(10 + k)));
  }

  PlotData plot;
  std::map<std::size_t, std::uint64_t> by_length;
  for (const auto& [word, c] : mu.entries()) by_length[std::min<std::size_t>(word.length(), 20)] += c;
  for (const auto& [len, c] : by_length) {
    plot.add("word_length_mass", static_cast<double>(len), static_cast<double>(c) / static_cast<double>(mu.total()));
  }
  w.text("discretize_plot_data.csv", plot.out.str());
  return rows;
}

std::vector<DiagnosticRow> run_stationary(const Context& ctx, Writer& w) {
  const Config& cfg = ctx.cfg;
  std::vector<DiagnosticRow> rows;
  const OrbitMeasure mu = ctx.mu_p0();
  const OrbitMeasure fresh = ctx.mu_fresh();
  const projdyn::StationaryCloud nu = ctx.nu(mu);
  w.json("orbit_measure.json", fls::to_json(mu, HPoint(), cfg.balls, ctx.seed(1)));
  w.json("particle_cloud.json", projdyn::to_json(nu.cloud, ctx.seed(3)));
  stationarity_rows(ctx, mu, fresh, nu, rows);

  // Distribution of the angle to e_1, in 18 bins over [0, pi/2].
  PlotData plot;
  const auto e1 = projdyn::ProjPoint::basis(ctx.rep.dim(), 0);
  std::vector<double> bins(18, 0.0);
  for (std::size_t i = 0; i < nu.cloud.size(); ++i) {
    const double a = projdyn::fs_dist(e1, nu.cloud.points[i]);
    const auto b = std::min<std::size_t>(static_cast<std::size_t>(a / (std::numbers::pi / 2) * 18.0), 17);
    bins[b] += nu.cloud.weights[i];
  }
  for (std::size_t b = 0; b < bins.size(); ++b) {
    plot.add("angle_to_e1_mass", (static_cast<double>(b) + 0.5) * (std::numbers::pi / 2) / 18.0, bins[b]);
  }
  w.text("stationary_plot_data.csv", plot.out.str());
  return rows;
}

std::vector<DiagnosticRow> run_check(const Context& ctx, Writer& w) {
  const Config& cfg = ctx.cfg;
  const auto& atlas = ctx.disc.atlas();
  std::vector<DiagnosticRow> rows;
  const OrbitMeasure mu = ctx.mu_p0();
  const OrbitMeasure fresh = ctx.mu_fresh();
  const projdyn::StationaryCloud nu = ctx.nu(mu);
  w.json("orbit_measure.json", fls::to_json(mu, HPoint(), cfg.balls, ctx.seed(1)));
  w.json("particle_cloud.json", projdyn::to_json(nu.cloud, ctx.seed(3)));
  stationarity_rows(ctx, mu, fresh, nu, rows);

  const harmonic::Conditional at_p0 = harmonic::conditional_measure(ctx.rep, mu, nu.cloud, ctx.seed(7));
  w.json("conditional_p0.json", harmonic::to_json(at_p0, ctx.seed(7)));
  rows.push_back(below("round_trip_w1", projdyn::wasserstein1(at_p0.cloud, nu.cloud, ctx.seed(8)), cfg.w1_threshold,
                       cfg.N, ctx.seed(7)));

  const HPoint q = perturbed_base();
  const HPoint q_a = hypgeom::apply(atlas.word_to_isometry(Word::parse("A")), q);
  {
    const OrbitMeasure mu_a = ctx.disc.sample_mu(q_a, Word::parse("A"), cfg.n_mu, ctx.seed(9));
    const auto cond = harmonic::conditional_measure(ctx.rep, mu_a, nu.cloud, ctx.seed(9), q_a, Word::parse("A"));
    w.json("conditional_A.json", harmonic::to_json(cond, ctx.seed(9)));
  }

  const std::pair<const char*, HPoint> bases[] = {{"p0", HPoint()}, {"Aq", q_a}};
  const char* xis[] = {"A", "B", "aB"};
  std::uint64_t k = 20;
  for (const auto& [label, p] : bases) {
    const Word hint = std::string(label) == "p0" ? Word() : Word::parse("A");
    for (const char* xi : xis) {
      const double r = harmonic::equivariance_residual(ctx.rep, ctx.disc, Word::parse(xi), p, hint, nu.cloud,
                                                       cfg.n_mu, ctx.seed(k));
      rows.push_back(below(std::string("equivariance_") + xi + "_" + label, r, cfg.w1_threshold, cfg.N, ctx.seed(k)));
      ++k;
    }
  }

  for (const char* copy : {"A", "AB", "ba"}) {
    const Word wd = Word::parse(copy);
    const HPoint p = hypgeom::apply(atlas.word_to_isometry(wd), q);
    const double r = harmonic::transport_residual(ctx.rep, ctx.disc, p, wd, nu.cloud, cfg.n_mu, ctx.seed(k));
    rows.push_back(below(std::string("transport_") + copy, r, cfg.w1_threshold, cfg.N, ctx.seed(k)));
    ++k;
  }

  PlotData plot;
  const std::vector<harmonic::TestFunction> fns = {harmonic::TestFunction::pauli_z(),
                                                   harmonic::TestFunction::pauli_x(),
                                                   harmonic::TestFunction::pauli_mix()};
  const char* fn_names[] = {"pauli_z", "pauli_x", "pauli_mix"};
  for (const auto& [label, p] : bases) {
    const Word hint = std::string(label) == "p0" ? Word() : Word::parse("A");
    const auto mv = harmonic::mean_value_residual(ctx.rep, ctx.disc, p, hint, cfg.circle_radius, fns, cfg.n_circle,
                                                  cfg.n_mu_mean, nu.cloud, ctx.seed(k));
    for (std::size_t i = 0; i < fns.size(); ++i) {
      const std::string name = std::string("mean_value_") + fn_names[i] + "_" + label;
      const double thr = cfg.sigma_threshold * mv[i].std_error;
      rows.push_back({name, mv[i].residual, thr, mv[i].std_error, cfg.n_mu_mean, ctx.seed(k), mv[i].residual <= thr});
      plot.add(name + "_center", 0.0, mv[i].center_value);
      for (std::size_t j = 0; j < mv[i].circle_values.size(); ++j) {
        plot.add(name + "_circle", hypgeom::kTwoPi * static_cast<double>(j) / cfg.n_circle, mv[i].circle_values[j]);
      }
    }
    ++k;
  }
  w.text("check_plot_data.csv", plot.out.str());
  return rows;
}

std::vector<DiagnosticRow> run_lyapunov(const Context& ctx, Writer& w) {
  const Config& cfg = ctx.cfg;
  std::vector<DiagnosticRow> rows;
  const std::string drive = cfg.driving_measure();
  OrbitMeasure mu;
  if (drive == "discretized") {
    mu = ctx.mu_p0();
    w.json("orbit_measure.json", fls::to_json(mu, HPoint(), cfg.balls, ctx.seed(1)));
  } else {
    mu.add(Word::parse(drive));
  }

  const auto gap = projdyn::lyapunov_gap(ctx.rep, mu, cfg.n_steps, cfg.n_runs, ctx.seed(30));
  const bool excludes_zero = gap.ci_low > 0.0 || gap.ci_high < 0.0;
  rows.push_back({"lyapunov_gap", gap.estimate, 0.0, gap.std_error, static_cast<std::uint64_t>(cfg.n_runs),
                  ctx.seed(30), excludes_zero});
  rows.push_back({"lyapunov_gap_ci_low", gap.ci_low, 0.0, gap.std_error, static_cast<std::uint64_t>(cfg.n_runs),
                  ctx.seed(30), excludes_zero});
  if (cfg.rep == "diagonal" && drive != "discretized") {
    // diag(2, 1/2)^e has singular value ratio 4^|e|.
    long e = 0;
    const Word word = Word::parse(drive);
    for (std::size_t i = 0; i < word.length(); ++i) e += std::isupper(static_cast<unsigned char>(word[i])) ? 1 : -1;
    const double exact = 2.0 * std::numbers::ln2 * static_cast<double>(std::labs(e));
    rows.push_back(below("lyapunov_gap_exact_error", std::abs(gap.estimate - exact), 1e-9,
                         static_cast<std::uint64_t>(cfg.n_runs), ctx.seed(30)));
  }

  PlotData plot;
  std::vector<double> mean_diam(static_cast<std::size_t>(cfg.n_max), 0.0);
  int contracted = 0;
  for (int t = 0; t < cfg.n_products; ++t) {
    const std::uint64_t s = ctx.seed(1000 + static_cast<std::uint64_t>(t));
    const auto series = projdyn::contraction_series(ctx.rep, mu, cfg.n_max, cfg.n_probe, s);
    contracted += series.back() < 0.01 ? 1 : 0;
    for (std::size_t i = 0; i < series.size(); ++i) mean_diam[i] += series[i] / cfg.n_products;
  }
  rows.push_back(at_least("contraction_fraction", static_cast<double>(contracted) / cfg.n_products, 0.95,
                          static_cast<std::uint64_t>(cfg.n_products), ctx.seed(1000)));
  for (std::size_t i = 0; i < mean_diam.size(); ++i) {
    plot.add("contraction_mean_diameter", static_cast<double>(i + 1), mean_diam[i]);
  }
  w.text("lyapunov_plot_data.csv", plot.out.str());
  return rows;
}

std::vector<DiagnosticRow> run_moments(const Context& ctx, Writer& w) {
  const Config& cfg = ctx.cfg;
  const auto& atlas = ctx.disc.atlas();
  std::vector<DiagnosticRow> rows;
  // Per-sample streams make the n-sample measure a prefix of the 2n one.
  const OrbitMeasure mu = ctx.mu_p0();
  const OrbitMeasure mu2 = ctx.disc.sample_mu(HPoint(), Word(), 2 * cfg.n_mu, ctx.seed(1));
  w.json("orbit_measure.json", fls::to_json(mu2, HPoint(), cfg.balls, ctx.seed(1)));
  const auto s1 = harmonic::integrability_stats(ctx.rep, mu, atlas);
  const auto s2 = harmonic::integrability_stats(ctx.rep, mu2, atlas);
  const double inf = std::numeric_limits<double>::infinity();
  rows.push_back(below("mean_log_norm", s2.mean_log_norm, inf, 2 * cfg.n_mu, ctx.seed(1)));
  rows.push_back(below("mean_dist", s2.mean_dist, inf, 2 * cfg.n_mu, ctx.seed(1)));
  auto drift = [](double a, double b) { return std::abs(b - a) / std::max(std::abs(b), 1e-12); };
  rows.push_back(below("drift_log_norm", drift(s1.mean_log_norm, s2.mean_log_norm), 0.1, 2 * cfg.n_mu, ctx.seed(1)));
  rows.push_back(below("drift_dist", drift(s1.mean_dist, s2.mean_dist), 0.1, 2 * cfg.n_mu, ctx.seed(1)));
  const double bound = harmonic::generator_ratio(ctx.rep, atlas) + 0.1;
  rows.push_back({"max_norm_dist_ratio", s2.max_ratio, bound, std::nullopt, 2 * cfg.n_mu, ctx.seed(1),
                  s2.max_ratio <= bound});

  PlotData plot;
  std::map<long, double> hist;
  for (const auto& [word, c] : mu2.entries()) {
    const double d = hypgeom::displacement(atlas.word_to_isometry(word));
    hist[std::lround(std::floor(d / 0.5))] += static_cast<double>(c) / static_cast<double>(mu2.total());
  }
  for (const auto& [bin, mass] : hist) plot.add("orbit_distance_mass", (static_cast<double>(bin) + 0.5) * 0.5, mass);
  w.text("moments_plot_data.csv", plot.out.str());
  return rows;
}

std::vector<DiagnosticRow> run_report(const fs::path& dir, Writer& w, std::ostream* log) {
  std::vector<fs::path> inputs;
  if (fs::exists(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (name.size() > 16 && name.ends_with("_diagnostics.csv") && name != "report_diagnostics.csv") {
        inputs.push_back(entry.path());
      }
    }
  }
  std::sort(inputs.begin(), inputs.end());
  std::vector<DiagnosticRow> all;
  std::ostringstream table;
  table << "source," << kCsvHeader << "\n";
  for (const fs::path& p : inputs) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string source = p.filename().string().substr(0, p.filename().string().size() - 16);
    const auto rows = parse_csv(buf.str());
    std::istringstream lines(format_csv(rows));
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) table << source << ',' << line << "\n";
    for (const auto& r : rows) {
      if (log) *log << (r.pass ? "PASS " : "FAIL ") << source << ' ' << r.test_name << ' ' << fmt(r.value) << "\n";
      all.push_back(r);
    }
  }
  w.text("report.csv", table.str());
  return all;
}

}  // namespace

std::optional<Subcommand> parse_subcommand(std::string_view name) {
  if (name == "discretize") return Subcommand::kDiscretize;
  if (name == "stationary") return Subcommand::kStationary;
  if (name == "check") return Subcommand::kCheck;
  if (name == "lyapunov") return Subcommand::kLyapunov;
  if (name == "moments") return Subcommand::kMoments;
  if (name == "report") return Subcommand::kReport;
  return std::nullopt;
}

std::string subcommand_name(Subcommand s) {
  switch (s) {
    case Subcommand::kDiscretize: return "discretize";
    case Subcommand::kStationary: return "stationary";
    case Subcommand::kCheck: return "check";
    case Subcommand::kLyapunov: return "lyapunov";
    case Subcommand::kMoments: return "moments";
    case Subcommand::kReport: return "report";
  }
  return "unknown";
}

std::string format_csv(const std::vector<DiagnosticRow>& rows) {
  std::ostringstream out;
  out << kCsvHeader << "\n";
  for (const auto& r : rows) {
    out << r.test_name << ',' << fmt(r.value) << ',' << fmt(r.threshold) << ','
        << (r.std_error ? fmt(*r.std_error) : std::string()) << ',' << r.n_samples << ',' << r.seed << ','
        << (r.pass ? "true" : "false") << "\n";
  }
  return out.str();
}

std::vector<DiagnosticRow> parse_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::invalid_argument("diagnostics CSV has a bad header");
  std::vector<DiagnosticRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream cells(line);
    for (std::string cell; std::getline(cells, cell, ',');) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 7) throw std::invalid_argument("diagnostics row has " + std::to_string(f.size()) + " fields");
    if (f[6] != "true" && f[6] != "false") throw std::invalid_argument("pass column must be true or false");
    rows.push_back({f[0], parse_field(f[1]), parse_field(f[2]),
                    f[3].empty() ? std::nullopt : std::optional<double>(parse_field(f[3])), std::stoull(f[4]),
                    std::stoull(f[5]), f[6] == "true"});
  }
  return rows;
}

HPoint perturbed_base() {
  // The domain's largest inscribed ball about p0 has radius asinh 1.
  return hypgeom::circle_point(HPoint(), 0.1 * std::asinh(1.0), hypgeom::BoundaryAngle(0.7));
}

RunOutcome run(Subcommand sub, const Config& cfg, const fs::path& out_dir, std::ostream* log) {
  Writer w(out_dir, log);
  std::vector<DiagnosticRow> rows;
  if (sub == Subcommand::kReport) {
    rows = run_report(out_dir, w, log);
    const bool ok = !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.pass; });
    return {ok ? 0 : 1, rows, w.files()};
  }
  const Context ctx(cfg);
  switch (sub) {
    case Subcommand::kDiscretize: rows = run_discretize(ctx, w); break;
    case Subcommand::kStationary: rows = run_stationary(ctx, w); break;
    case Subcommand::kCheck: rows = run_check(ctx, w); break;
    case Subcommand::kLyapunov: rows = run_lyapunov(ctx, w); break;
    case Subcommand::kMoments: rows = run_moments(ctx, w); break;
    case Subcommand::kReport: break;
  }
  w.text(subcommand_name(sub) + "_diagnostics.csv", format_csv(rows));
  if (log) {
    for (const auto& r : rows) *log << (r.pass ? "PASS " : "FAIL ") << r.test_name << ' ' << fmt(r.value) << "\n";
  }
  const bool ok = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.pass; });
  return {ok ? 0 : 1, rows, w.files()};
}

}  // namespace leafwalk::pipeline
