#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <variant>

namespace eschlab {

enum class IntervalKind {
  StretchThenStop,   ///< (0, 1+t) up to t = 2, then (0, 3)
  CompressThenStop,  ///< (0, 3-t) up to t = 2, then (0, 1)
  FixedUnit,         ///< [0, 1] with interior flow sin(pi x)
  CotangentGrowth,   ///< [0, acot(1.83-t)+1/2], flow sin^2(x-1/2) right of 1/2
  Stationary,        ///< [0, L] at rest
};

std::string_view to_string(IntervalKind kind);

/// One-dimensional domain [0, length(t)] with a closed-form material flow.
/// The left endpoint never moves.
class MovingInterval {
public:
  explicit MovingInterval(IntervalKind kind, double stationary_length = 1.0);

  IntervalKind kind() const noexcept { return kind_; }

  double length(double t) const;
  /// Time at which the motion switches off, if the law has one.
  std::optional<double> stop_time() const;
  /// Material velocity; throws DomainError outside [0, length(t)].
  double velocity(double x, double t) const;
  /// dv/dx.
  double surface_divergence(double x, double t) const;
  /// Position at time t of the material point that sat at x0 at time 0.
  double material_position(double x0, double t) const;

private:
  void require_inside(double x, double t) const;

  IntervalKind kind_;
  double stationary_length_;
};

/// Current length of the interval.
inline double domain_length(const MovingInterval& domain, double t) { return domain.length(t); }

enum class SurfaceKind {
  UnitSphereTangential,  ///< unit sphere, v = vbar sin(theta) x_theta, axis = z
  DeformingSphere,       ///< image of the unit sphere under the obstacle map, axis = x
};

std::string_view to_string(SurfaceKind kind);

struct MetricFactors {
  double g = 1.0;    ///< |dQ/dtheta|, arclength per unit polar angle
  double rho = 0.0;  ///< distance to the symmetry axis
};

/// Axisymmetric surface parametrised by the polar angle theta in (0, pi)
/// about its symmetry axis. For the deforming sphere theta is the reference
/// (material) angle; for the tangential flow the surface is the unit sphere
/// and theta is the current angle.
class SurfaceOfRevolution {
public:
  static SurfaceOfRevolution unit_sphere_tangential(double vbar);
  /// Deformation Q(p, t) = (1-s) p + s (x, rho(x) y, rho(x) z) with
  /// s = min(freeze_time, t) and rho(x) = 1 - cos^2(2 pi x) / 2.
  static SurfaceOfRevolution deforming_sphere(double freeze_time = 0.05);

  SurfaceKind kind() const noexcept { return kind_; }
  double vbar() const noexcept { return vbar_; }
  double freeze_time() const noexcept { return freeze_time_; }

  /// Deformation fraction s(t).
  double deformation(double t) const;

  MetricFactors metric_factors(double theta, double t) const;
  /// Metric factors of the deforming map at an explicit fraction s.
  static MetricFactors deformed_metric(double theta, double s);

  /// 3D position of the surface point at polar angle theta and azimuth phi.
  std::array<double, 3> position(double theta, double phi, double t) const;

  /// Tangential (meridional) component of the material velocity.
  double velocity(double theta, double t) const;
  /// Surface divergence of the material velocity, i.e. d/dt log(area element).
  double surface_divergence(double theta, double t) const;

  /// d theta / dt of a material point in the theta chart.
  double angular_velocity(double theta, double t) const;
  /// Polar angle at time t of the material point that sat at theta0 at time 0.
  double material_angle(double theta0, double t) const;

  /// Total area by Gauss quadrature on n panels.
  double area(double t, int panels = 400) const;

private:
  SurfaceOfRevolution(SurfaceKind kind, double vbar, double freeze_time)
      : kind_(kind), vbar_(vbar), freeze_time_(freeze_time) {}

  SurfaceKind kind_;
  double vbar_;
  double freeze_time_;
};

/// (-1)^(k+1) cot(theta): geodesic curvature of the latitude circle at theta
/// bounding polar cap k (1 = north cap, 2 = south cap) on the unit sphere.
double geodesic_curvature_latitude(double theta, int cap_index);

using Domain = std::variant<MovingInterval, SurfaceOfRevolution>;

}  // namespace eschlab
