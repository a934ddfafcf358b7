#pragma once

// Geometry of the hyperbolic plane (curvature -1). Points are stored in the
// Poincare disc; isometries are real SL(2) matrices acting on the upper
// half-plane and are converted to disc Mobius maps for evaluation.

#include <array>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace leafwalk::hypgeom {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Points closer than this to the unit circle are rejected.
inline constexpr double kBoundaryGuard = 1e-12;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class HPoint {
 public:
  HPoint() = default;  // the disc origin

  static HPoint from_disc(Complex z);
  static HPoint from_half_plane(Complex w);

  Complex disc() const { return z_; }
  Complex half_plane() const;

 private:
  explicit HPoint(Complex z) : z_(z) {}
  Complex z_{0.0, 0.0};
};

// An angle in [0, 2*pi) naming a point of a normalized circle.
class BoundaryAngle {
 public:
  BoundaryAngle() = default;
  explicit BoundaryAngle(double theta);

  double value() const { return theta_; }
  Complex unit() const { return std::polar(1.0, theta_); }

 private:
  double theta_ = 0.0;
};

// Orientation-preserving isometry, stored as [[a, b], [c, d]] acting on the
// half-plane by z -> (az + b) / (cz + d). Normalized to det = 1 with the
// first nonzero entry (row-major) positive, so equality is well defined
// modulo -I.
class Isometry {
 public:
  Isometry();  // identity
  Isometry(double a, double b, double c, double d);

  static Isometry identity() { return Isometry(); }

  const std::array<double, 4>& matrix() const { return m_; }
  double det() const { return m_[0] * m_[3] - m_[1] * m_[2]; }

  Isometry inverse() const;
  Isometry operator*(const Isometry& rhs) const;

  // Action on a raw disc coordinate; no boundary check.
  Complex apply_disc(Complex z) const {
    return (disc_[0] * z + disc_[1]) / (disc_[2] * z + disc_[3]);
  }

  bool approx_equal(const Isometry& other, double tol = 1e-9) const;

 private:
  void normalize();

  std::array<double, 4> m_;
  std::array<Complex, 4> disc_;
};

// The reference point: half-plane i, disc origin.
inline HPoint origin() { return HPoint(); }

double dist(const HPoint& a, const HPoint& b);

// cosh of the hyperbolic distance between two disc coordinates. Cheap and
// monotone in the distance, so it is used for nearest-point searches.
inline double cosh_dist_disc(Complex a, Complex b) {
  return 1.0 + 2.0 * std::norm(a - b) / ((1.0 - std::norm(a)) * (1.0 - std::norm(b)));
}

HPoint apply(const Isometry& g, const HPoint& p);

// dist(p0, g p0), from cosh d = (a^2 + b^2 + c^2 + d^2) / 2; exact for the
// integer matrices of long words where the disc coordinates lose precision.
double displacement(const Isometry& g);

// Cayley transform w = (z - i) / (z + i) and its inverse.
HPoint cayley(Complex half_plane_point);
Complex cayley_inverse(const HPoint& p);

// Disc automorphism sending `center` to 0, and its inverse.
inline Complex to_frame(Complex center, Complex z) {
  return (z - center) / (1.0 - std::conj(center) * z);
}
inline Complex from_frame(Complex center, Complex u) {
  return (u + center) / (1.0 + std::conj(center) * u);
}

struct EuclideanDisc {
  Complex center;
  double radius;
};

// The hyperbolic ball B(center, radius) as a Euclidean disc of the model.
EuclideanDisc ball_params(const HPoint& center, double radius);

// Point at hyperbolic distance `radius` from `center`, in direction theta
// measured after moving `center` to the origin.
HPoint circle_point(const HPoint& center, double radius, BoundaryAngle theta);

// Raw-coordinate variant used on hot paths.
inline Complex circle_point_disc(Complex center, double radius, double theta) {
  return from_frame(center, std::polar(std::tanh(0.5 * radius), theta));
}

// Exit angle of Brownian motion started at y in the unit disc, generated from
// one uniform variate u in [0, 1).
BoundaryAngle poisson_exit_sample(Complex y, double u);

// Density of the exit law from 0 relative to the exit law from y at theta.
double poisson_ratio(Complex y, BoundaryAngle theta);

// Normalized Poisson kernel CDF: P(exit angle in [0, theta]) from y.
double poisson_cdf(Complex y, double theta);

}  // namespace leafwalk::hypgeom
