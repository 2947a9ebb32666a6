#include "eschlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "eschlab/errors.hpp"

namespace eschlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kStopTime = 2.0;
constexpr double kCotShift = 1.83;

double arccot(double x) { return 0.5 * kPi - std::atan(x); }

void require_interior_angle(double theta) {
  if (!(theta > 0.0 && theta < kPi)) {
    throw DomainError("polar angle " + std::to_string(theta) + " is not inside (0, pi)");
  }
}

// Obstacle profile of the deforming sphere and its derivative in x.
double obstacle(double x) {
  const double c = std::cos(2.0 * kPi * x);
  return 1.0 - 0.5 * c * c;
}
double obstacle_slope(double x) { return kPi * std::sin(4.0 * kPi * x); }

struct DeformedMeridian {
  double rho;      // distance to the axis
  double drho;     // d rho / d theta
  double rho_t;    // d rho / ds
  double drho_t;   // d^2 rho / (d theta ds)
};

DeformedMeridian deformed_meridian(double theta, double s) {
  const double st = std::sin(theta);
  const double ct = std::cos(theta);
  const double x = ct;
  const double gap = 1.0 - obstacle(x);
  const double scale = 1.0 - s * gap;
  // d gap / d theta = -obstacle'(x) * dx/dtheta = obstacle'(x) sin(theta)
  const double dgap = obstacle_slope(x) * st;
  return {st * scale, ct * scale - st * s * dgap, -st * gap, -ct * gap - st * dgap};
}

}  // namespace

std::string_view to_string(IntervalKind kind) {
  switch (kind) {
    case IntervalKind::StretchThenStop: return "stretch";
    case IntervalKind::CompressThenStop: return "compress";
    case IntervalKind::FixedUnit: return "fixed-unit";
    case IntervalKind::CotangentGrowth: return "cotangent-growth";
    case IntervalKind::Stationary: return "stationary";
  }
  return "unknown";
}

std::string_view to_string(SurfaceKind kind) {
  return kind == SurfaceKind::UnitSphereTangential ? "unit-sphere-tangential" : "deforming-sphere";
}

MovingInterval::MovingInterval(IntervalKind kind, double stationary_length)
    : kind_(kind), stationary_length_(stationary_length) {
  if (kind == IntervalKind::Stationary && !(stationary_length > 0.0)) {
    throw InvalidParamsError("stationary interval needs a positive length");
  }
}

double MovingInterval::length(double t) const {
  if (!(t >= 0.0)) throw DomainError("interval queried at negative time");
  switch (kind_) {
    case IntervalKind::StretchThenStop: return 1.0 + std::min(t, kStopTime);
    case IntervalKind::CompressThenStop: return 3.0 - std::min(t, kStopTime);
    case IntervalKind::FixedUnit: return 1.0;
    case IntervalKind::CotangentGrowth: return arccot(kCotShift - t) + 0.5;
    case IntervalKind::Stationary: return stationary_length_;
  }
  return 0.0;
}

std::optional<double> MovingInterval::stop_time() const {
  if (kind_ == IntervalKind::StretchThenStop || kind_ == IntervalKind::CompressThenStop) {
    return kStopTime;
  }
  return std::nullopt;
}

void MovingInterval::require_inside(double x, double t) const {
  const double len = length(t);
  const double slack = 1e-12 * len;
  if (!(x >= -slack && x <= len + slack)) {
    throw DomainError("x = " + std::to_string(x) + " is outside [0, " + std::to_string(len) +
                      "] at t = " + std::to_string(t));
  }
}

double MovingInterval::velocity(double x, double t) const {
  require_inside(x, t);
  switch (kind_) {
    case IntervalKind::StretchThenStop: return t <= kStopTime ? x / (1.0 + t) : 0.0;
    case IntervalKind::CompressThenStop: return t <= kStopTime ? -x / (3.0 - t) : 0.0;
    case IntervalKind::FixedUnit: return std::sin(kPi * x);
    case IntervalKind::CotangentGrowth: {
      if (x < 0.5) return 0.0;
      const double s = std::sin(x - 0.5);
      return s * s;
    }
    case IntervalKind::Stationary: return 0.0;
  }
  return 0.0;
}

double MovingInterval::surface_divergence(double x, double t) const {
  require_inside(x, t);
  switch (kind_) {
    case IntervalKind::StretchThenStop: return t <= kStopTime ? 1.0 / (1.0 + t) : 0.0;
    case IntervalKind::CompressThenStop: return t <= kStopTime ? -1.0 / (3.0 - t) : 0.0;
    case IntervalKind::FixedUnit: return kPi * std::cos(kPi * x);
    case IntervalKind::CotangentGrowth: return x < 0.5 ? 0.0 : std::sin(2.0 * (x - 0.5));
    case IntervalKind::Stationary: return 0.0;
  }
  return 0.0;
}

double MovingInterval::material_position(double x0, double t) const {
  require_inside(x0, 0.0);
  if (!(t >= 0.0)) throw DomainError("interval queried at negative time");
  switch (kind_) {
    case IntervalKind::StretchThenStop: return x0 * length(t);
    case IntervalKind::CompressThenStop: return x0 * length(t) / 3.0;
    case IntervalKind::FixedUnit: {
      if (x0 >= 1.0) return 1.0;
      return 2.0 / kPi * std::atan(std::tan(0.5 * kPi * x0) * std::exp(kPi * t));
    }
    case IntervalKind::CotangentGrowth: {
      const double y0 = x0 - 0.5;
      if (y0 <= 0.0) return x0;
      // dy/dt = sin^2 y integrates to cot y = cot y0 - t
      return 0.5 + arccot(std::cos(y0) / std::sin(y0) - t);
    }
    case IntervalKind::Stationary: return x0;
  }
  return x0;
}

SurfaceOfRevolution SurfaceOfRevolution::unit_sphere_tangential(double vbar) {
  return {SurfaceKind::UnitSphereTangential, vbar, 0.0};
}

SurfaceOfRevolution SurfaceOfRevolution::deforming_sphere(double freeze_time) {
  if (!(freeze_time > 0.0)) throw InvalidParamsError("freeze time must be positive");
  return {SurfaceKind::DeformingSphere, 0.0, freeze_time};
}

double SurfaceOfRevolution::deformation(double t) const {
  if (kind_ == SurfaceKind::UnitSphereTangential) return 0.0;
  return std::clamp(t, 0.0, freeze_time_);
}

MetricFactors SurfaceOfRevolution::deformed_metric(double theta, double s) {
  require_interior_angle(theta);
  const auto m = deformed_meridian(theta, s);
  const double st = std::sin(theta);
  return {std::sqrt(st * st + m.drho * m.drho), m.rho};
}

MetricFactors SurfaceOfRevolution::metric_factors(double theta, double t) const {
  require_interior_angle(theta);
  if (kind_ == SurfaceKind::UnitSphereTangential) return {1.0, std::sin(theta)};
  return deformed_metric(theta, deformation(t));
}

std::array<double, 3> SurfaceOfRevolution::position(double theta, double phi, double t) const {
  if (!(theta >= 0.0 && theta <= kPi)) throw DomainError("polar angle outside [0, pi]");
  if (kind_ == SurfaceKind::UnitSphereTangential) {
    const double st = std::sin(theta);
    return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
  }
  const double rho = deformed_meridian(theta, deformation(t)).rho;
  return {std::cos(theta), rho * std::cos(phi), rho * std::sin(phi)};
}

double SurfaceOfRevolution::velocity(double theta, double t) const {
  require_interior_angle(theta);
  if (kind_ == SurfaceKind::UnitSphereTangential) return vbar_ * std::sin(theta);
  if (t >= freeze_time_) return 0.0;
  const auto m = deformed_meridian(theta, deformation(t));
  const double g = std::sqrt(std::sin(theta) * std::sin(theta) + m.drho * m.drho);
  // unit meridian tangent is (-sin theta, drho) / g in the (axial, radial) plane
  return m.rho_t * m.drho / g;
}

double SurfaceOfRevolution::surface_divergence(double theta, double t) const {
  require_interior_angle(theta);
  if (kind_ == SurfaceKind::UnitSphereTangential) return 2.0 * vbar_ * std::cos(theta);
  if (t >= freeze_time_) return 0.0;
  const auto m = deformed_meridian(theta, deformation(t));
  const double st = std::sin(theta);
  const double g2 = st * st + m.drho * m.drho;
  return m.rho_t / m.rho + m.drho * m.drho_t / g2;
}

double SurfaceOfRevolution::angular_velocity(double theta, double t) const {
  require_interior_angle(theta);
  (void)t;
  if (kind_ == SurfaceKind::UnitSphereTangential) return vbar_ * std::sin(theta);
  return 0.0;
}

double SurfaceOfRevolution::material_angle(double theta0, double t) const {
  if (!(theta0 >= 0.0 && theta0 <= kPi)) throw DomainError("polar angle outside [0, pi]");
  if (kind_ == SurfaceKind::DeformingSphere || theta0 == 0.0 || theta0 == kPi) return theta0;
  return 2.0 * std::atan(std::tan(0.5 * theta0) * std::exp(vbar_ * t));
}

double SurfaceOfRevolution::area(double t, int panels) const {
  if (panels < 1) throw InvalidParamsError("area needs at least one panel");
  static constexpr double kNodes[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr double kWeights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const double h = kPi / panels;
  double sum = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double mid = (k + 0.5) * h;
    for (int q = 0; q < 3; ++q) {
      const auto mf = metric_factors(mid + 0.5 * h * kNodes[q], t);
      sum += kWeights[q] * mf.g * mf.rho;
    }
  }
  return 2.0 * kPi * 0.5 * h * sum;
}

double geodesic_curvature_latitude(double theta, int cap_index) {
  require_interior_angle(theta);
  if (cap_index != 1 && cap_index != 2) throw InvalidParamsError("cap index must be 1 or 2");
  const double cot = std::cos(theta) / std::sin(theta);
  return cap_index == 1 ? cot : -cot;
}

}  // namespace eschlab
