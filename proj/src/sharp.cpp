#include "eschlab/sharp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>

#include "eschlab/errors.hpp"

namespace eschlab {

namespace {

constexpr double kPi = std::numbers::pi;

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
Vec<N> axpy(const Vec<N>& y, double a, const Vec<N>& k) {
  Vec<N> r;
  for (std::size_t i = 0; i < N; ++i) r[i] = y[i] + a * k[i];
  return r;
}

template <std::size_t N>
struct OdeProblem {
  std::function<Vec<N>(double, const Vec<N>&)> rhs;
  std::function<double(double, const Vec<N>&)> gap;  // distance to the event set
  std::function<std::string(double, const Vec<N>&)> classify;
  std::optional<double> breakpoint;
};

template <std::size_t N>
std::optional<SharpEvent> integrate_rk4(const OdeProblem<N>& prob, double t0, Vec<N> y,
                                        double t_end, double dt,
                                        const std::function<void(double, const Vec<N>&)>& record) {
  if (!(dt > 0.0)) throw InvalidParamsError("time step must be positive");
  if (!(t_end >= t0)) throw InvalidParamsError("t_end precedes the initial time");
  double t = t0;
  record(t, y);
  if (!(prob.gap(t, y) >= kSharpEventGap)) return SharpEvent{t, prob.classify(t, y)};

  double h = dt;
  const double finish_tol = 1e-12 * std::max(1.0, std::abs(t_end));
  while (t_end - t > finish_tol) {
    double target = std::min(t + h, t_end);
    if (prob.breakpoint && t < *prob.breakpoint && target > *prob.breakpoint) {
      target = *prob.breakpoint;
    }
    const double hs = target - t;
    if (!(t + hs > t)) throw StepUnderflowError("sharp integrator: step no longer advances time");
    // stage times are kept strictly inside the step so that a law that
    // switches at a breakpoint is sampled on the correct side
    const double pad = std::min(1e-12 * std::max(1.0, std::abs(t)), 0.25 * hs);
    auto stage_time = [&](double s) { return std::clamp(s, t + pad, target - pad); };

    bool ok = true;
    Vec<N> next{};
    try {
      const auto k1 = prob.rhs(stage_time(t), y);
      const auto k2 = prob.rhs(stage_time(t + 0.5 * hs), axpy(y, 0.5 * hs, k1));
      const auto k3 = prob.rhs(stage_time(t + 0.5 * hs), axpy(y, 0.5 * hs, k2));
      const auto k4 = prob.rhs(stage_time(target), axpy(y, hs, k3));
      for (std::size_t i = 0; i < N; ++i) {
        next[i] = y[i] + hs / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (!std::isfinite(next[i])) ok = false;
      }
      if (ok) ok = prob.gap(target, next) >= kSharpEventGap;
    } catch (const std::invalid_argument&) {
      ok = false;
    } catch (const std::domain_error&) {
      ok = false;
    } catch (const SingularSystemError&) {
      ok = false;
    }

    if (ok) {
      t = target;
      y = next;
      record(t, y);
      continue;
    }
    if (hs <= kSharpEventResolution) return SharpEvent{t + 0.5 * hs, prob.classify(t, y)};
    h = 0.5 * hs;
  }
  return std::nullopt;
}

double log_tan_half(double theta) { return std::log(std::tan(0.5 * theta)); }

void require_cap_state(const SharpCapState& s) {
  if (!(s.theta1 > 0.0 && s.theta1 < s.theta2 && s.theta2 < kPi)) {
    throw InvalidParamsError("cap state needs 0 < theta1 < theta2 < pi");
  }
}

}  // namespace

void SphereModelParams::validate() const {
  if (!(u_a < u_b)) throw InvalidParamsError("wells must satisfy u_a < u_b");
  if (!(mbar > 0.0)) throw InvalidParamsError("mbar must be positive");
  if (!(s_const > 0.0)) throw InvalidParamsError("S must be positive");
  if (!(vbar >= 0.0)) throw InvalidParamsError("vbar must be non-negative");
}

CapCoefficients cap_coefficients(const SharpCapState& state, const SphereModelParams& p) {
  p.validate();
  require_cap_state(state);
  const double th1 = state.theta1;
  const double th2 = state.theta2;
  const double l1 = log_tan_half(th1);
  const double l2 = log_tan_half(th2);
  const double den = l1 - l2;
  if (!(std::abs(den) > 1e-12)) {
    throw SingularSystemError("cap coefficients: interfaces coincide", 1.0 / std::abs(den));
  }
  const double ratio = p.vbar / p.mbar;
  const double cot1 = std::cos(th1) / std::sin(th1);
  const double cot2 = std::cos(th2) / std::sin(th2);

  CapCoefficients c;
  c.c2b1 = p.s_const * cot1 + ratio * p.u_b * std::cos(th1);
  c.c2b2 = -p.s_const * cot2 + ratio * p.u_b * std::cos(th2);
  c.c1a = (p.s_const * (cot1 + cot2) + ratio * p.u_a * (std::cos(th1) - std::cos(th2))) / den;
  // band matches S cot(theta1) at theta1 and -S cot(theta2) at theta2
  const double r1 = p.s_const * cot1 + ratio * p.u_a * std::cos(th1);
  const double r2 = -p.s_const * cot2 + ratio * p.u_a * std::cos(th2);
  c.c2a = (l1 * r2 - l2 * r1) / den;
  return c;
}

double cap_potential(double theta, CapRegion region, const SharpCapState& state,
                     const SphereModelParams& p) {
  const auto c = cap_coefficients(state, p);
  const double slack = 1e-12;
  double lo = 0.0;
  double hi = kPi;
  switch (region) {
    case CapRegion::NorthCap: hi = state.theta1; break;
    case CapRegion::Band: lo = state.theta1; hi = state.theta2; break;
    case CapRegion::SouthCap: lo = state.theta2; break;
  }
  if (!(theta >= lo - slack && theta <= hi + slack) || theta <= 0.0 || theta >= kPi) {
    throw DomainError("theta = " + std::to_string(theta) + " is not in the requested region");
  }
  const double ratio = p.vbar / p.mbar;
  switch (region) {
    case CapRegion::NorthCap: return -p.u_b * ratio * std::cos(theta) + c.c2b1;
    case CapRegion::SouthCap: return -p.u_b * ratio * std::cos(theta) + c.c2b2;
    case CapRegion::Band:
      return c.c1a * log_tan_half(theta) - p.u_a * ratio * std::cos(theta) + c.c2a;
  }
  return 0.0;
}

CapRates cap_rhs(const SharpCapState& state, const SphereModelParams& p) {
  const auto c = cap_coefficients(state, p);
  // The transport terms of the flux jump cancel against the material velocity,
  // leaving only the harmonic part of the band potential.
  const double k = p.mbar * c.c1a / (p.u_b - p.u_a);
  return {k / std::sin(state.theta1), k / std::sin(state.theta2)};
}

CapTrajectory integrate_caps(const SharpCapState& initial, const SphereModelParams& p,
                             double t_end, double dt) {
  p.validate();
  require_cap_state(initial);
  OdeProblem<2> prob;
  prob.rhs = [&](double t, const Vec<2>& y) {
    const auto r = cap_rhs({y[0], y[1], t}, p);
    return Vec<2>{r.dtheta1, r.dtheta2};
  };
  prob.gap = [](double, const Vec<2>& y) {
    return std::min({y[0], kPi - y[1], y[1] - y[0]});
  };
  prob.classify = [](double, const Vec<2>& y) -> std::string {
    const double north = y[0];
    const double south = kPi - y[1];
    const double merge = y[1] - y[0];
    if (north <= south && north <= merge) return "north-cap-vanished";
    if (south <= merge) return "south-cap-vanished";
    return "caps-merged";
  };
  CapTrajectory traj;
  traj.event = integrate_rk4<2>(prob, initial.t, {initial.theta1, initial.theta2}, t_end, dt,
                                [&](double t, const Vec<2>& y) {
                                  traj.states.push_back({y[0], y[1], t});
                                });
  return traj;
}

double sharp_energy(const SharpCapState& state, const SphereModelParams& p) {
  return 2.0 * kPi * p.s_const * (p.u_b - p.u_a) * (std::sin(state.theta1) + std::sin(state.theta2));
}

double sharp_energy(const SharpCapState& state) {
  return 4.0 * std::numbers::sqrt2 * kPi / 3.0 * (std::sin(state.theta1) + std::sin(state.theta2));
}

double sharp_mass(const SharpCapState& state, const SphereModelParams& p) {
  const double caps = 2.0 * kPi * (1.0 - std::cos(state.theta1)) +
                      2.0 * kPi * (1.0 + std::cos(state.theta2));
  return p.u_b * caps + p.u_a * (4.0 * kPi - caps);
}

double interval_rhs(const SharpIntervalState& state, const MovingInterval& domain,
                    const ModelParams& params) {
  if (params.mobility != MobilityKind::Constant) {
    throw UnsupportedError("interval_rhs needs a constant mobility");
  }
  const double len = domain.length(state.t);
  if (!(state.lambda > 0.0 && state.lambda < len)) {
    throw DomainError("interface position outside the interval");
  }
  const bool b_right = state.orientation == IntervalOrientation::MinusPlus;
  const double v_b = domain.velocity(b_right ? len : 0.0, state.t);
  const double v_a = domain.velocity(b_right ? 0.0 : len, state.t);
  return (params.u_b * v_b - params.u_a * v_a) / (params.u_b - params.u_a);
}

IntervalTrajectory integrate_interval(const SharpIntervalState& initial,
                                      const MovingInterval& domain, const ModelParams& params,
                                      double t_end, double dt) {
  params.validate();
  const auto orientation = initial.orientation;
  OdeProblem<1> prob;
  prob.rhs = [&](double t, const Vec<1>& y) {
    return Vec<1>{interval_rhs({y[0], t, orientation}, domain, params)};
  };
  prob.gap = [&](double t, const Vec<1>& y) {
    return std::min(y[0], domain.length(t) - y[0]);
  };
  prob.classify = [&](double t, const Vec<1>& y) -> std::string {
    return y[0] < 0.5 * domain.length(t) ? "interface-reached-left-end"
                                         : "interface-reached-right-end";
  };
  prob.breakpoint = domain.stop_time();
  IntervalTrajectory traj;
  traj.event = integrate_rk4<1>(prob, initial.t, {initial.lambda}, t_end, dt,
                                [&](double t, const Vec<1>& y) {
                                  traj.states.push_back({y[0], t, orientation});
                                });
  return traj;
}

}  // namespace eschlab
