#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "eschlab/errors.hpp"
#include "eschlab/sharp.hpp"
#include "fd.hpp"

using namespace eschlab;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

SphereModelParams reference_sphere() {
  SphereModelParams p;
  p.vbar = 10.0;
  p.mbar = 5.0;
  p.s_const = std::sqrt(2.0) / 3.0;
  return p;
}

// Band coefficients from the two boundary values, by elimination on
// [log tan(th1/2) 1; log tan(th2/2) 1] [c1; c2] = [b1; b2].
std::pair<double, double> band_by_linear_solve(const SharpCapState& s, const SphereModelParams& p) {
  const double r = p.vbar / p.mbar;
  const double a11 = std::log(std::tan(s.theta1 / 2));
  const double a21 = std::log(std::tan(s.theta2 / 2));
  const double b1 = p.s_const / std::tan(s.theta1) + r * p.u_a * std::cos(s.theta1);
  const double b2 = -p.s_const / std::tan(s.theta2) + r * p.u_a * std::cos(s.theta2);
  const double c1 = (b1 - b2) / (a11 - a21);
  return {c1, b1 - a11 * c1};
}

// Second-order finite-difference solve of M w'' = u v' between the interface
// (w = 0) and an outer end (w' = 0); returns M dw/dx at the interface.
double interface_flux(const MovingInterval& d, double t, double u, double mbar, double lambda,
                      double outer, int n) {
  const double h = (outer - lambda) / n;
  // nodes x_j = lambda + j h, j = 0..n; w_0 = 0; ghost mirror at j = n
  std::vector<double> lower(n + 1, 0.0), diag(n + 1, 0.0), upper(n + 1, 0.0), rhs(n + 1, 0.0);
  for (int j = 1; j <= n; ++j) {
    const double x = lambda + j * h;
    const double src = u * d.surface_divergence(x, t) / mbar;
    diag[j] = -2.0 / (h * h);
    lower[j] = 1.0 / (h * h);
    upper[j] = 1.0 / (h * h);
    rhs[j] = src;
    if (j == n) {
      lower[j] = 2.0 / (h * h);
      upper[j] = 0.0;
    }
  }
  // Thomas algorithm on unknowns 1..n
  for (int j = 2; j <= n; ++j) {
    const double m = lower[j] / diag[j - 1];
    diag[j] -= m * upper[j - 1];
    rhs[j] -= m * rhs[j - 1];
  }
  std::vector<double> w(n + 1, 0.0);
  w[n] = rhs[n] / diag[n];
  for (int j = n - 1; j >= 1; --j) w[j] = (rhs[j] - upper[j] * w[j + 1]) / diag[j];
  const double src0 = u * d.surface_divergence(lambda, t) / mbar;
  const double dw = (w[1] - w[0]) / h - 0.5 * h * src0;
  return mbar * dw;
}

}  // namespace

TEST_CASE("band coefficient formula agrees with the boundary-value solve") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int k = 0; k < 40; ++k) {
    SphereModelParams p;
    p.vbar = 20.0 * u01(rng);
    p.mbar = 0.5 + 10.0 * u01(rng);
    p.s_const = 0.1 + u01(rng);
    p.u_a = -1.0 + 0.5 * u01(rng);
    p.u_b = 1.0 + u01(rng);
    const double a = 0.1 + 2.9 * u01(rng);
    const double b = 0.1 + 2.9 * u01(rng);
    if (std::abs(a - b) < 0.05) continue;
    const SharpCapState s{std::min(a, b), std::max(a, b), 0.0};
    const auto c = cap_coefficients(s, p);
    const auto [c1, c2] = band_by_linear_solve(s, p);
    CHECK(c.c1a == Approx(c1).epsilon(1e-10).scale(1.0));
    CHECK(c.c2a == Approx(c2).epsilon(1e-10).scale(1.0));
  }
  const auto formula = cap_coefficients({0.8, 2.1, 0.0}, reference_sphere());
  const auto [c1, c2] = band_by_linear_solve({0.8, 2.1, 0.0}, reference_sphere());
  CHECK(std::abs(formula.c1a - c1) < 1e-10);
  CHECK(std::abs(formula.c2a - c2) < 1e-10);
}

TEST_CASE("cap potential solves the bulk equation in every region") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double h = 1e-2;
  for (int k = 0; k < 20; ++k) {
    SphereModelParams p;
    p.vbar = 15.0 * u01(rng);
    p.mbar = 0.5 + 10.0 * u01(rng);
    const double th1 = 0.3 + 1.2 * u01(rng);
    const double th2 = th1 + 0.3 + (kPi - 0.3 - th1 - 0.3) * u01(rng);
    const SharpCapState s{th1, th2, 0.0};
    const struct { CapRegion r; double lo, hi, u; } regions[] = {
        {CapRegion::NorthCap, 0.0, th1, p.u_b},
        {CapRegion::Band, th1, th2, p.u_a},
        {CapRegion::SouthCap, th2, kPi, p.u_b}};
    int checked = 0;
    for (const auto& reg : regions) {
      const double lo = reg.lo + 5 * h;
      const double hi = reg.hi - 5 * h;
      for (int j = 0; j < 50; ++j) {
        const double th = lo + (hi - lo) * (j + 0.5) / 50.0;
        auto w = [&](double x) { return cap_potential(x, reg.r, s, p); };
        const double lap = fd::d2(w, th, h) + std::cos(th) / std::sin(th) * fd::d1(w, th, h);
        const double res = p.mbar * lap - reg.u * 2.0 * p.vbar * std::cos(th);
        CHECK(std::abs(res) < 1e-8);
        ++checked;
      }
    }
    CHECK(checked == 150);
  }
}

TEST_CASE("cap potential is continuous and meets the curvature values") {
  const auto p = reference_sphere();
  const SharpCapState s{0.8, 2.1, 0.0};
  const double w1n = cap_potential(0.8, CapRegion::NorthCap, s, p);
  const double w1b = cap_potential(0.8, CapRegion::Band, s, p);
  const double w2b = cap_potential(2.1, CapRegion::Band, s, p);
  const double w2s = cap_potential(2.1, CapRegion::SouthCap, s, p);
  CHECK(std::abs(w1n - w1b) < 1e-12);
  CHECK(std::abs(w2b - w2s) < 1e-12);
  CHECK(w1n == Approx(p.s_const / std::tan(0.8)).epsilon(1e-14));
  CHECK(w2s == Approx(-p.s_const / std::tan(2.1)).epsilon(1e-14));
  CHECK_THROWS_AS(cap_potential(1.5, CapRegion::NorthCap, s, p), DomainError);
  CHECK_THROWS_AS(cap_potential(0.5, CapRegion::Band, s, p), DomainError);
  CHECK_THROWS_AS(cap_potential(2.0, CapRegion::SouthCap, s, p), DomainError);
}

TEST_CASE("symmetric caps without transport are an equilibrium") {
  SphereModelParams p;
  p.s_const = std::sqrt(2.0) / 3.0;
  const SharpCapState s{0.8, kPi - 0.8, 0.0};
  const auto c = cap_coefficients(s, p);
  CHECK(std::abs(c.c1a) < 1e-14);
  const auto r = cap_rhs(s, p);
  CHECK(r.dtheta1 == Approx(r.dtheta2));
}

TEST_CASE("coincident interfaces are rejected") {
  const auto p = reference_sphere();
  CHECK_THROWS_AS(cap_coefficients({1.0, 1.0 + 1e-14, 0.0}, p), SingularSystemError);
  CHECK_THROWS_AS(cap_rhs({1.0, 1.0, 0.0}, p), InvalidParamsError);
  CHECK_THROWS_AS(cap_coefficients({2.0, 1.0, 0.0}, p), InvalidParamsError);
}

TEST_CASE("reference configuration drives the southern interface toward the pole") {
  const auto p = reference_sphere();
  const auto r = cap_rhs({0.8, 2.1, 0.0}, p);
  CHECK(r.dtheta2 > 0.0);
  CHECK(r.dtheta1 > 0.0);
  const auto traj = integrate_caps({0.8, 2.1, 0.0}, p, 1.0);
  REQUIRE(traj.event.has_value());
  CHECK(traj.event->kind == "south-cap-vanished");
  CHECK(traj.event->time >= 0.09);
  CHECK(traj.event->time <= 0.13);
  const auto& last = traj.states.back();
  CHECK(std::abs(traj.event->time - last.t) < 1e-6);
}

TEST_CASE("mirror symmetry of the cap system without transport") {
  SphereModelParams p;
  p.mbar = 5.0;
  const auto a = integrate_caps({0.7, 2.0, 0.0}, p, 0.2);
  const auto b = integrate_caps({kPi - 2.0, kPi - 0.7, 0.0}, p, 0.2);
  REQUIRE(a.states.size() == b.states.size());
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    CHECK(std::abs(a.states[i].theta1 - (kPi - b.states[i].theta2)) < 1e-10);
    CHECK(std::abs(a.states[i].theta2 - (kPi - b.states[i].theta1)) < 1e-10);
  }
  const auto sym = integrate_caps({0.9, kPi - 0.9, 0.0}, p, 0.2);
  for (const auto& s : sym.states) CHECK(std::abs(s.theta2 - (kPi - s.theta1)) < 1e-10);
}

TEST_CASE("halving the step changes the cap trajectory by less than 1e-8") {
  const auto p = reference_sphere();
  const auto a = integrate_caps({0.8, 2.1, 0.0}, p, 0.05, 1e-4);
  const auto b = integrate_caps({0.8, 2.1, 0.0}, p, 0.05, 5e-5);
  REQUIRE_FALSE(a.event.has_value());
  CHECK(a.states.back().t == Approx(0.05));
  CHECK(std::abs(a.states.back().theta1 - b.states.back().theta1) < 1e-8);
  CHECK(std::abs(a.states.back().theta2 - b.states.back().theta2) < 1e-8);
}

TEST_CASE("sharp mass is conserved along cap trajectories") {
  for (double vbar : {0.0, 10.0}) {
    auto p = reference_sphere();
    p.vbar = vbar;
    const auto traj = integrate_caps({0.8, 2.1, 0.0}, p, 0.2);
    const double m0 = sharp_mass(traj.states.front(), p);
    const double scale = 4.0 * kPi;
    for (const auto& s : traj.states) {
      const auto r = cap_rhs(s, p);
      const double rate = 2.0 * kPi * (p.u_b - p.u_a) *
                          (std::sin(s.theta1) * r.dtheta1 - std::sin(s.theta2) * r.dtheta2);
      CHECK(std::abs(rate) < 1e-6);
      // accumulated drift, away from the blow-up of the rates at the event
      if (std::min(s.theta1, kPi - s.theta2) > 0.05) {
        CHECK(std::abs(sharp_mass(s, p) - m0) / scale < 1e-6);
      }
    }
  }
}

TEST_CASE("sharp energy decreases on the stationary sphere") {
  SphereModelParams p;
  p.mbar = 5.0;
  p.s_const = std::sqrt(2.0) / 3.0;
  for (const auto& init : {SharpCapState{0.8, 2.1, 0.0}, SharpCapState{0.5, 1.2, 0.0},
                           SharpCapState{1.9, 2.8, 0.0}}) {
    const auto traj = integrate_caps(init, p, 0.5);
    REQUIRE(traj.states.size() > 2);
    for (std::size_t i = 1; i < traj.states.size(); ++i) {
      CHECK(sharp_energy(traj.states[i], p) < sharp_energy(traj.states[i - 1], p));
    }
  }
  // the larger southern cap wins
  const auto traj = integrate_caps({0.8, 2.1, 0.0}, p, 5.0);
  REQUIRE(traj.event.has_value());
  CHECK(traj.event->kind == "north-cap-vanished");
}

TEST_CASE("sharp energy values") {
  const double k = 4.0 * std::sqrt(2.0) * kPi / 3.0;
  CHECK(sharp_energy({kPi / 2, kPi / 2, 0.0}) == Approx(2.0 * k));
  CHECK(sharp_energy({0.8, 2.1, 0.0}) == Approx(k * (std::sin(0.8) + std::sin(2.1))));
  CHECK(sharp_energy({0.8, kPi, 0.0}) == Approx(k * std::sin(0.8)));
  CHECK(sharp_energy({0.8, 2.1, 0.0}, SphereModelParams{}) == Approx(sharp_energy({0.8, 2.1, 0.0})));
}

TEST_CASE("interval speed equals the flux balance of the two-sided problem") {
  const auto params = quartic_params(-1.0, 1.0, 0.1, 2.0);
  const MovingInterval kinds[] = {MovingInterval(IntervalKind::StretchThenStop),
                                  MovingInterval(IntervalKind::CompressThenStop),
                                  MovingInterval(IntervalKind::FixedUnit),
                                  MovingInterval(IntervalKind::CotangentGrowth)};
  for (const auto& d : kinds) {
    CAPTURE(to_string(d.kind()));
    for (double t : {0.3, 1.2}) {
      const double len = d.length(t);
      for (double f : {0.3, 0.55}) {
        for (auto orient : {IntervalOrientation::MinusPlus, IntervalOrientation::PlusMinus}) {
          const double lam = f * len;
          const bool b_right = orient == IntervalOrientation::MinusPlus;
          // M w' at the interface from each side
          const double right = interface_flux(d, t, b_right ? params.u_b : params.u_a,
                                              params.mbar, lam, len, 4000);
          const double left = interface_flux(d, t, b_right ? params.u_a : params.u_b,
                                             params.mbar, lam, 0.0, 4000);
          const double flux_b = b_right ? right : left;
          const double flux_a = b_right ? left : right;
          const double speed = d.velocity(lam, t) - (flux_b - flux_a) / (params.u_b - params.u_a);
          const double got = interval_rhs({lam, t, orient}, d, params);
          CHECK(std::abs(got - speed) < 1e-5);
        }
      }
    }
  }
}

TEST_CASE("interval speed examples") {
  const auto params = quartic_params();
  const MovingInterval stretch(IntervalKind::StretchThenStop);
  for (double t : {0.0, 0.7, 1.9})
    for (double f : {0.2, 0.5, 0.8})
      CHECK(interval_rhs({f * stretch.length(t), t}, stretch, params) == Approx(0.5));
  const MovingInterval still(IntervalKind::Stationary, 2.0);
  CHECK(interval_rhs({0.7, 1.0}, still, params) == 0.0);
  const MovingInterval bulk(IntervalKind::CotangentGrowth);
  CHECK(bulk.velocity(0.25, 0.0) == 0.0);
  CHECK(interval_rhs({0.25, 0.0}, bulk, params) > 0.0);
  CHECK_THROWS_AS(interval_rhs({1.5, 0.0}, bulk, params), DomainError);
}

TEST_CASE("interval trajectories match their closed forms") {
  const auto params = quartic_params();
  const auto s = integrate_interval({0.5, 0.0}, MovingInterval(IntervalKind::StretchThenStop),
                                    params, 10.0);
  CHECK_FALSE(s.event.has_value());
  CHECK(std::abs(s.states.back().lambda - 1.5) < 1e-6);
  CHECK(s.states.back().t == Approx(10.0));

  const auto c = integrate_interval({1.5, 0.0}, MovingInterval(IntervalKind::CompressThenStop),
                                    params, 10.0);
  CHECK(std::abs(c.states.back().lambda - 0.5) < 1e-6);

  const MovingInterval bulk(IntervalKind::CotangentGrowth);
  const auto b = integrate_interval({0.25, 0.0}, bulk, params, 1.8);
  const double exact = 0.25 + 0.5 * (std::atan(1.83) - std::atan(0.03));
  CHECK(std::abs(b.states.back().lambda - exact) < 1e-9);

  const auto b2 = integrate_interval({0.25, 0.0}, bulk, params, 1.8, 5e-5);
  CHECK(std::abs(b.states.back().lambda - b2.states.back().lambda) < 1e-8);
}

TEST_CASE("interval integration stops when the interface reaches an end") {
  const auto params = quartic_params();
  const MovingInterval compress(IntervalKind::CompressThenStop);
  // u_b on the left, the interface travels with the right end: lambda' = -(-1)(-1)/2
  const auto traj =
      integrate_interval({0.3, 0.0, IntervalOrientation::PlusMinus}, compress, params, 5.0);
  REQUIRE(traj.event.has_value());
  CHECK(traj.event->kind == "interface-reached-left-end");
  CHECK(traj.event->time == Approx(0.6 - 2e-3).epsilon(1e-3));
}
