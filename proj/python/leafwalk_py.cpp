#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "leafwalk/config.hpp"
#include "leafwalk/fls.hpp"
#include "leafwalk/harmonic.hpp"
#include "leafwalk/hypgeom.hpp"
#include "leafwalk/lattice.hpp"
#include "leafwalk/pipeline.hpp"
#include "leafwalk/projdyn.hpp"

namespace py = pybind11;
using namespace leafwalk;

using hypgeom::Complex;
using hypgeom::HPoint;
using lattice::Word;
using CloudArray = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace {

// Clouds cross the boundary as (n, d) complex arrays with uniform weights.
projdyn::ParticleCloud cloud_from(const CloudArray& a) {
  std::vector<projdyn::ProjPoint> pts;
  pts.reserve(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) pts.emplace_back(projdyn::Vector(a.row(i).transpose()));
  return projdyn::ParticleCloud::uniform(std::move(pts));
}

CloudArray array_from(const projdyn::ParticleCloud& c) {
  const int d = c.points.empty() ? 0 : c.points.front().dim();
  CloudArray out(static_cast<Eigen::Index>(c.size()), d);
  for (std::size_t i = 0; i < c.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = c.points[i].vec().transpose();
  return out;
}

harmonic::TestFunction test_function(const py::handle& h) {
  if (py::isinstance<py::str>(h)) {
    const auto name = h.cast<std::string>();
    if (name == "pauli_z") return harmonic::TestFunction::pauli_z();
    if (name == "pauli_x") return harmonic::TestFunction::pauli_x();
    if (name == "pauli_mix") return harmonic::TestFunction::pauli_mix();
    throw py::value_error("unknown test function '" + name + "'");
  }
  return harmonic::TestFunction(h.cast<projdyn::Matrix>());
}

py::dict row_dict(const pipeline::DiagnosticRow& r) {
  py::dict d;
  d["test_name"] = r.test_name;
  d["value"] = r.value;
  d["threshold"] = r.threshold;
  d["std_error"] = r.std_error ? py::cast(*r.std_error) : py::none();
  d["n_samples"] = r.n_samples;
  d["seed"] = r.seed;
  d["pass"] = r.pass;
  return d;
}

}  // namespace

PYBIND11_MODULE(_leafwalk, m) {
  m.doc() = "Discretized hyperbolic Brownian motion on the Gamma(2) orbit and stationary measures on CP^{d-1}";

  py::register_exception<hypgeom::GeometryError>(m, "GeometryError", PyExc_ValueError);
  py::register_exception<projdyn::ProjectiveError>(m, "ProjectiveError", PyExc_ValueError);
  py::register_exception<fls::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<lattice::WordError>(m, "WordError", PyExc_ValueError);

  // Geometry, with points given by disc coordinates.
  m.def("dist", [](Complex a, Complex b) { return hypgeom::dist(HPoint::from_disc(a), HPoint::from_disc(b)); });
  m.def("cayley", [](Complex w) { return hypgeom::cayley(w).disc(); }, "Half-plane point to disc coordinate.");
  m.def("cayley_inverse", [](Complex z) { return hypgeom::cayley_inverse(HPoint::from_disc(z)); });
  m.def("circle_point", [](Complex center, double radius, double theta) {
    return hypgeom::circle_point(HPoint::from_disc(center), radius, hypgeom::BoundaryAngle(theta)).disc();
  });
  m.def("poisson_exit_sample",
        [](Complex y, double u) { return hypgeom::poisson_exit_sample(y, u).value(); });
  m.def("poisson_ratio",
        [](Complex y, double theta) { return hypgeom::poisson_ratio(y, hypgeom::BoundaryAngle(theta)); });
  m.def("harnack_constant", &fls::harnack_constant, py::arg("r"), py::arg("R"));

  py::class_<lattice::GroupAtlas>(m, "GroupAtlas")
      .def(py::init([] { return lattice::GroupAtlas::build_gamma2(); }))
      .def("word_to_matrix",
           [](const lattice::GroupAtlas& a, const std::string& w) { return a.word_to_isometry(Word::parse(w)).matrix(); })
      .def("orbit_point", [](const lattice::GroupAtlas& a, const std::string& w) {
        return a.orbit_point(Word::parse(w)).disc();
      })
      .def("orbit_words",
           [](const lattice::GroupAtlas& a, int max_len) {
             std::vector<std::string> out;
             for (const auto& op : a.orbit_enumerate(max_len)) out.push_back(op.word.str());
             return out;
           })
      .def("min_displacement", &lattice::GroupAtlas::min_displacement)
      .def("contact_list",
           [](const lattice::GroupAtlas& a, double R) {
             std::vector<std::string> out;
             for (const auto& w : a.contact_list(R)) out.push_back(w.str());
             return out;
           })
      .def("in_domain", [](const lattice::GroupAtlas& a, Complex z) { return a.in_domain_disc(z); })
      .def(
          "locate",
          [](const lattice::GroupAtlas& a, Complex z, const std::string& hint) {
            const auto loc = a.locate_disc(z, Word::parse(hint));
            return py::make_tuple(loc.word.str(), loc.local);
          },
          py::arg("z"), py::arg("hint") = "");

  py::class_<fls::OrbitMeasure>(m, "OrbitMeasure")
      .def(py::init<>())
      .def("add", [](fls::OrbitMeasure& mu, const std::string& w, std::uint64_t c) { mu.add(Word::parse(w), c); },
           py::arg("word"), py::arg("count") = 1)
      .def_property_readonly("total", &fls::OrbitMeasure::total)
      .def("support_size", &fls::OrbitMeasure::support_size)
      .def("count", [](const fls::OrbitMeasure& mu, const std::string& w) { return mu.count(Word::parse(w)); })
      .def("weight", [](const fls::OrbitMeasure& mu, const std::string& w) { return mu.weight(Word::parse(w)); })
      .def("entries",
           [](const fls::OrbitMeasure& mu) {
             std::vector<std::pair<std::string, std::uint64_t>> out;
             for (const auto& [w, c] : mu.entries()) out.emplace_back(w.str(), c);
             return out;
           })
      .def("__len__", &fls::OrbitMeasure::support_size);

  py::class_<fls::Discretization>(m, "Discretization")
      .def(py::init([](double r, double R) {
             fls::BallSpec balls;
             balls.r = r;
             balls.R = R;
             return fls::Discretization(lattice::GroupAtlas::build_gamma2(), balls);
           }),
           py::arg("r") = 0.3, py::arg("R") = 0.8)
      .def_property_readonly("harnack", [](const fls::Discretization& d) { return d.balls().harnack(); })
      .def_property_readonly("contacts",
                             [](const fls::Discretization& d) {
                               std::vector<std::string> out;
                               for (const auto& w : d.contacts()) out.push_back(w.str());
                               return out;
                             })
      .def(
          "sample_mu",
          [](const fls::Discretization& d, std::uint64_t n, std::uint64_t seed, Complex base, const std::string& hint) {
            py::gil_scoped_release release;
            return d.sample_mu(HPoint::from_disc(base), Word::parse(hint), n, seed);
          },
          py::arg("n"), py::arg("seed"), py::arg("base") = Complex{0.0, 0.0}, py::arg("hint") = "")
      .def(
          "equivariance_tv",
          [](const fls::Discretization& d, const std::string& xi, std::uint64_t n, std::size_t max_len,
             std::uint64_t seed) {
            const auto r = fls::equivariance_tv(d, Word::parse(xi), n, max_len, seed);
            return py::make_tuple(r.tv, r.threshold);
          },
          py::arg("xi"), py::arg("n"), py::arg("max_len") = 3, py::arg("seed") = 1);

  py::class_<projdyn::RepTable>(m, "RepTable")
      .def(py::init([](const projdyn::Matrix& a, const projdyn::Matrix& b) {
             return projdyn::RepTable(projdyn::ProjMap(a), projdyn::ProjMap(b));
           }),
           py::arg("A"), py::arg("B"))
      .def_static("inclusion", &projdyn::RepTable::inclusion)
      .def_static("trivial", &projdyn::RepTable::trivial, py::arg("dim") = 2)
      .def_static("rotation", &projdyn::RepTable::rotation)
      .def_static("diagonal", &projdyn::RepTable::diagonal)
      .def_property_readonly("dim", &projdyn::RepTable::dim)
      .def("word_matrix", [](const projdyn::RepTable& r, const std::string& w) {
        return projdyn::Matrix(r.word_to_map(Word::parse(w)).matrix());
      });

  m.def("fs_dist", [](const projdyn::Vector& x, const projdyn::Vector& y) {
    return projdyn::fs_dist(projdyn::ProjPoint(x), projdyn::ProjPoint(y));
  });
  m.def(
      "stationary_cloud",
      [](const projdyn::RepTable& rep, const fls::OrbitMeasure& mu, std::size_t n, std::uint64_t seed,
         std::optional<projdyn::Vector> x0) {
        const auto start = x0 ? projdyn::ProjPoint(*x0) : projdyn::ProjPoint::basis(rep.dim(), 0);
        const auto res = projdyn::stationary_cloud(rep, mu, start, n, {}, seed);
        return py::make_tuple(array_from(res.cloud), res.converged_fraction);
      },
      py::arg("rep"), py::arg("mu"), py::arg("n"), py::arg("seed"), py::arg("x0") = py::none());
  m.def(
      "wasserstein1",
      [](const CloudArray& a, const CloudArray& b, std::uint64_t seed) {
        return projdyn::wasserstein1(cloud_from(a), cloud_from(b), seed);
      },
      py::arg("a"), py::arg("b"), py::arg("seed") = 0);
  m.def("markov_residual", [](const projdyn::RepTable& rep, const fls::OrbitMeasure& mu, const CloudArray& nu,
                              std::uint64_t seed) { return projdyn::markov_residual(rep, mu, cloud_from(nu), seed); });
  m.def(
      "lyapunov_gap",
      [](const projdyn::RepTable& rep, const fls::OrbitMeasure& mu, int n_steps, int n_runs, std::uint64_t seed) {
        const auto g = projdyn::lyapunov_gap(rep, mu, n_steps, n_runs, seed);
        py::dict d;
        d["estimate"] = g.estimate;
        d["ci_low"] = g.ci_low;
        d["ci_high"] = g.ci_high;
        d["std_error"] = g.std_error;
        return d;
      },
      py::arg("rep"), py::arg("mu"), py::arg("n_steps") = 200, py::arg("n_runs") = 20, py::arg("seed") = 1);
  m.def("contraction_series",
        py::overload_cast<const projdyn::RepTable&, const fls::OrbitMeasure&, int, std::size_t, std::uint64_t>(
            &projdyn::contraction_series),
        py::arg("rep"), py::arg("mu"), py::arg("n_max"), py::arg("n_probe"), py::arg("seed"));

  m.def("conditional_measure", [](const projdyn::RepTable& rep, const fls::OrbitMeasure& mu, const CloudArray& nu,
                                  std::uint64_t seed) {
    return array_from(harmonic::conditional_measure(rep, mu, cloud_from(nu), seed).cloud);
  });
  m.def("holonomy_of_word", [](const projdyn::RepTable& rep, const std::string& w) {
    return projdyn::Matrix(harmonic::holonomy_of_word(rep, Word::parse(w)).matrix());
  });
  m.def(
      "mean_value_residual",
      [](const projdyn::RepTable& rep, const fls::Discretization& d, Complex p, const std::string& hint, double s,
         const py::list& functions, int n_circle, std::uint64_t n_mu, const CloudArray& nu, std::uint64_t seed) {
        std::vector<harmonic::TestFunction> fs;
        for (const auto& f : functions) fs.push_back(test_function(f));
        const auto res = harmonic::mean_value_residual(rep, d, HPoint::from_disc(p), Word::parse(hint), s, fs,
                                                       n_circle, n_mu, cloud_from(nu), seed);
        std::vector<std::pair<double, double>> out;
        for (const auto& r : res) out.emplace_back(r.residual, r.std_error);
        return out;
      },
      py::arg("rep"), py::arg("disc"), py::arg("p"), py::arg("hint"), py::arg("s"), py::arg("functions"),
      py::arg("n_circle"), py::arg("n_mu"), py::arg("nu"), py::arg("seed"));
  m.def("integrability_stats", [](const projdyn::RepTable& rep, const fls::OrbitMeasure& mu) {
    const auto s = harmonic::integrability_stats(rep, mu, lattice::GroupAtlas::build_gamma2());
    return py::make_tuple(s.mean_log_norm, s.mean_dist, s.max_ratio);
  });
  m.def("generator_ratio", [](const projdyn::RepTable& rep) {
    return harmonic::generator_ratio(rep, lattice::GroupAtlas::build_gamma2());
  });
  m.def(
      "uniqueness_gap",
      [](const projdyn::RepTable& rep, const fls::OrbitMeasure& mu, std::size_t n, std::uint64_t seed_a,
         std::uint64_t seed_b) { return harmonic::uniqueness_gap(rep, mu, n, {seed_a, seed_b}); },
      py::arg("rep"), py::arg("mu"), py::arg("n"), py::arg("seed_a"), py::arg("seed_b"));

  m.def(
      "run",
      [](const std::string& subcommand, const std::string& out, const std::string& config_text,
         std::optional<std::uint64_t> seed) {
        const auto sub = pipeline::parse_subcommand(subcommand);
        if (!sub) throw py::value_error("unknown subcommand '" + subcommand + "'");
        auto cfg = config::parse_config(config_text);
        if (seed) cfg.seed = *seed;
        pipeline::RunOutcome outcome;
        {
          py::gil_scoped_release release;
          outcome = pipeline::run(*sub, cfg, out);
        }
        py::list rows;
        for (const auto& r : outcome.rows) rows.append(row_dict(r));
        return py::make_tuple(outcome.exit_code, rows);
      },
      py::arg("subcommand"), py::arg("out"), py::arg("config") = "", py::arg("seed") = py::none(),
      "Runs a leafwalk subcommand; returns (exit status, diagnostic rows).");
}
