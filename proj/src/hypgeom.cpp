#include "leafwalk/hypgeom.hpp"

#include <algorithm>
#include <cmath>

namespace leafwalk::hypgeom {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_disc(Complex z) {
  if (!(std::abs(z) < 1.0 - kBoundaryGuard)) {
    throw GeometryError("point outside the open disc: |z| = " + std::to_string(std::abs(z)));
  }
}

}  // namespace

HPoint HPoint::from_disc(Complex z) {
  check_disc(z);
  return HPoint(z);
}

HPoint HPoint::from_half_plane(Complex w) {
  if (!(w.imag() > 0.0)) {
    throw GeometryError("half-plane point must have positive imaginary part");
  }
  return from_disc((w - kI) / (w + kI));
}

Complex HPoint::half_plane() const { return kI * (1.0 + z_) / (1.0 - z_); }

BoundaryAngle::BoundaryAngle(double theta) {
  if (!std::isfinite(theta)) throw GeometryError("non-finite boundary angle");
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  theta_ = t;
}

Isometry::Isometry() : m_{1.0, 0.0, 0.0, 1.0} { normalize(); }

Isometry::Isometry(double a, double b, double c, double d) : m_{a, b, c, d} {
  double det = a * d - b * c;
  if (!(det > 0.0)) throw GeometryError("isometry matrix must have positive determinant");
  double s = 1.0 / std::sqrt(det);
  for (double& x : m_) x *= s;
  normalize();
}

void Isometry::normalize() {
  for (double x : m_) {
    if (x != 0.0) {
      if (x < 0.0) {
        for (double& y : m_) y = -y;
      }
      break;
    }
  }
  // Conjugate by the Cayley transform C = [[1, -i], [1, i]], C^-1 ~ [[i, i], [-1, 1]].
  const Complex a = m_[0], b = m_[1], c = m_[2], d = m_[3];
  // g * C^-1
  const Complex p00 = a * kI - b, p01 = a * kI + b;
  const Complex p10 = c * kI - d, p11 = c * kI + d;
  // C * (g * C^-1)
  disc_ = {p00 - kI * p10, p01 - kI * p11, p00 + kI * p10, p01 + kI * p11};
}

Isometry Isometry::inverse() const { return Isometry(m_[3], -m_[1], -m_[2], m_[0]); }

Isometry Isometry::operator*(const Isometry& rhs) const {
  const auto& r = rhs.m_;
  return Isometry(m_[0] * r[0] + m_[1] * r[2], m_[0] * r[1] + m_[1] * r[3],
                  m_[2] * r[0] + m_[3] * r[2], m_[2] * r[1] + m_[3] * r[3]);
}

bool Isometry::approx_equal(const Isometry& other, double tol) const {
  double same = 0.0, flipped = 0.0;
  for (int i = 0; i < 4; ++i) {
    same = std::max(same, std::abs(m_[i] - other.m_[i]));
    flipped = std::max(flipped, std::abs(m_[i] + other.m_[i]));
  }
  return std::min(same, flipped) <= tol;
}

double dist(const HPoint& a, const HPoint& b) {
  const Complex za = a.disc(), zb = b.disc();
  const double t = std::abs((za - zb) / (1.0 - std::conj(za) * zb));
  return 2.0 * std::atanh(std::min(t, 1.0));
}

double displacement(const Isometry& g) {
  double frob = 0.0;
  for (double x : g.matrix()) frob += x * x;
  return std::acosh(std::max(0.5 * frob, 1.0));
}

HPoint apply(const Isometry& g, const HPoint& p) {
  const Complex z = g.apply_disc(p.disc());
  if (!(std::abs(z) < 1.0 - kBoundaryGuard)) {
    throw GeometryError("isometry image reached the boundary; matrix is corrupt");
  }
  return HPoint::from_disc(z);
}

HPoint cayley(Complex half_plane_point) { return HPoint::from_half_plane(half_plane_point); }

Complex cayley_inverse(const HPoint& p) { return p.half_plane(); }

EuclideanDisc ball_params(const HPoint& center, double radius) {
  if (!(radius > 0.0)) throw GeometryError("ball radius must be positive");
  const Complex c = center.disc();
  const double t = std::tanh(0.5 * radius);
  const double s2 = std::norm(c);
  const double denom = 1.0 - s2 * t * t;
  return {c * (1.0 - t * t) / denom, t * (1.0 - s2) / denom};
}

HPoint circle_point(const HPoint& center, double radius, BoundaryAngle theta) {
  if (!(radius > 0.0)) throw GeometryError("circle radius must be positive");
  return HPoint::from_disc(circle_point_disc(center.disc(), radius, theta.value()));
}

BoundaryAngle poisson_exit_sample(Complex y, double u) {
  const Complex e = std::polar(1.0, kTwoPi * u);
  return BoundaryAngle(std::arg((e + y) / (1.0 + std::conj(y) * e)));
}

double poisson_ratio(Complex y, BoundaryAngle theta) {
  return std::norm(theta.unit() - y) / (1.0 - std::norm(y));
}

double poisson_cdf(Complex y, double theta) {
  if (theta <= 0.0) return 0.0;
  if (theta >= kTwoPi) return 1.0;
  // The exit law from y is the image of the uniform law under
  // z -> (z + y) / (1 + conj(y) z); pull the arc [0, theta] back through it.
  auto pull = [&](Complex z) { return std::arg((z - y) / (1.0 - std::conj(y) * z)); };
  double span = pull(std::polar(1.0, theta)) - pull(Complex{1.0, 0.0});
  span = std::fmod(span, kTwoPi);
  if (span < 0.0) span += kTwoPi;
  return span / kTwoPi;
}

}  // namespace leafwalk::hypgeom
