#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eschlab/geometry.hpp"
#include "eschlab/model.hpp"

namespace eschlab {

/// Two latitude interfaces on the unit sphere: the u_b phase fills the polar
/// caps theta < theta1 and theta > theta2, the u_a phase the band between.
struct SharpCapState {
  double theta1 = 0.8;
  double theta2 = 2.1;
  double t = 0.0;
};

enum class IntervalOrientation {
  MinusPlus,  ///< u_a on the left of the interface, u_b on the right
  PlusMinus,  ///< u_b on the left, u_a on the right
};

struct SharpIntervalState {
  double lambda = 0.5;
  double t = 0.0;
  IntervalOrientation orientation = IntervalOrientation::MinusPlus;
};

struct SphereModelParams {
  double vbar = 0.0;
  double mbar = 1.0;
  double s_const = 0.4714045207910317;  ///< sqrt(2)/3
  double u_a = -1.0;
  double u_b = 1.0;

  void validate() const;
};

enum class CapRegion { NorthCap, Band, SouthCap };

/// Coefficients of the chemical potential in each region:
/// W = c1 log tan(theta/2) - (u_i vbar/mbar) cos(theta) + c2, with c1 = 0 in
/// both caps.
struct CapCoefficients {
  double c1a = 0.0;
  double c2a = 0.0;
  double c2b1 = 0.0;
  double c2b2 = 0.0;
};

/// Throws SingularSystemError when log tan(theta1/2) and log tan(theta2/2)
/// cannot be told apart, InvalidParamsError when the ordering is broken.
CapCoefficients cap_coefficients(const SharpCapState& state, const SphereModelParams& p);

/// W in the named region; throws DomainError when theta lies outside it.
double cap_potential(double theta, CapRegion region, const SharpCapState& state,
                     const SphereModelParams& p);

struct CapRates {
  double dtheta1 = 0.0;
  double dtheta2 = 0.0;
};

CapRates cap_rhs(const SharpCapState& state, const SphereModelParams& p);

struct SharpEvent {
  double time = 0.0;
  std::string kind;
};

struct CapTrajectory {
  std::vector<SharpCapState> states;
  std::optional<SharpEvent> event;
};

inline constexpr double kDefaultSharpDt = 1e-4;
inline constexpr double kSharpEventGap = 1e-3;
inline constexpr double kSharpEventResolution = 1e-6;

/// Classical RK4 with the event check min(theta1, pi - theta2, theta2 - theta1)
/// < kSharpEventGap. Steps that cross the threshold or leave the admissible
/// set are halved until the event time is bracketed to kSharpEventResolution.
CapTrajectory integrate_caps(const SharpCapState& initial, const SphereModelParams& p,
                             double t_end, double dt = kDefaultSharpDt);

/// 2 pi S (u_b - u_a) (sin theta1 + sin theta2).
double sharp_energy(const SharpCapState& state, const SphereModelParams& p);
/// Same with the quartic +-1 constants: (4 sqrt(2) pi / 3)(sin theta1 + sin theta2).
double sharp_energy(const SharpCapState& state);

/// Total amount of u in the sharp configuration on the unit sphere.
double sharp_mass(const SharpCapState& state, const SphereModelParams& p);

/// Interface speed of the point interface on a moving interval. Each phase
/// carries M w'' = u_i v' with w' = 0 at its outer endpoint and w = 0 at the
/// interface; the flux jump then gives
/// lambda' = (u_b v(e_b) - u_a v(e_a)) / (u_b - u_a),
/// with e_b, e_a the outer endpoints of the u_b and u_a sides.
double interval_rhs(const SharpIntervalState& state, const MovingInterval& domain,
                    const ModelParams& params);

struct IntervalTrajectory {
  std::vector<SharpIntervalState> states;
  std::optional<SharpEvent> event;
};

IntervalTrajectory integrate_interval(const SharpIntervalState& initial,
                                      const MovingInterval& domain, const ModelParams& params,
                                      double t_end, double dt = kDefaultSharpDt);

}  // namespace eschlab
