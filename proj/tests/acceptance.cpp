// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "eschlab/errors.hpp"
#include "eschlab/esfem.hpp"
#include "eschlab/lab.hpp"
#include "eschlab/model.hpp"
#include "eschlab/sharp.hpp"
#include "fd.hpp"

using namespace eschlab;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* spec, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, spec, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::map<std::string, PresetOutcome>& outcomes() {
  static std::map<std::string, PresetOutcome> cache;
  return cache;
}

const PresetOutcome& outcome(const std::string& name) {
  auto& cache = outcomes();
  if (auto it = cache.find(name); it != cache.end()) return it->second;
  auto preset = builtin_preset(name);
  return cache.emplace(name, run_preset(preset, {.write_files = false})).first->second;
}

const PhaseFieldRun& run_for(const PresetOutcome& o, double eps, double mbar = -1.0) {
  for (const auto& r : o.runs) {
    if (r.epsilon == eps && (mbar < 0.0 || r.mbar == mbar)) {
      if (!r.ok()) throw std::runtime_error("run failed: " + r.error);
      return r;
    }
  }
  throw std::runtime_error(fmt("no run for eps=%g", eps));
}

// Linear interpolation of a nodal field at coordinate x.
double sample(const DiscreteState& s, double x) {
  const auto& xs = s.mesh.positions;
  if (x <= xs.front()) return s.u.front();
  if (x >= xs.back()) return s.u.back();
  const auto k = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
  const double a = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
  return (1.0 - a) * s.u[k - 1] + a * s.u[k];
}

// Trace quantity at time t, interpolated between neighbouring rows.
double trace_at(const std::vector<TraceRow>& trace, double t, const std::function<double(const TraceRow&)>& get) {
  for (std::size_t k = 1; k < trace.size(); ++k) {
    if (trace[k].t >= t) {
      const double a = (t - trace[k - 1].t) / (trace[k].t - trace[k - 1].t);
      return (1.0 - a) * get(trace[k - 1]) + a * get(trace[k]);
    }
  }
  throw std::runtime_error(fmt("trace does not reach t=%g", t));
}

double first_interface(const TraceRow& r) {
  if (r.interfaces.size() != 1) throw std::runtime_error(fmt("expected one interface at t=%g", r.t));
  return r.interfaces.front();
}

int crossings(const DiscreteState& s, double level) {
  int n = 0;
  for (std::size_t i = 1; i < s.u.size(); ++i) {
    if ((s.u[i - 1] - level) * (s.u[i] - level) < 0.0) ++n;
  }
  return n;
}

Verdict calibration() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = quartic_params();
  const double s = surface_tension_constant(solve_profile(p), p);
  const double dt = seconds_since(t0);
  const double err = std::abs(s - std::sqrt(2.0) / 3.0);
  return {err < 1e-6 && dt < 1.0, fmt("S=%.10f err=%.2e time=%.3fs", s, err, dt)};
}

Verdict profile_oracle() {
  const auto p = quartic_params();
  const auto sol = solve_profile(p);
  double err = 0.0;
  double first_integral = 0.0;
  for (std::size_t i = 0; i < sol.z_nodes.size(); ++i) {
    err = std::max(err, std::abs(sol.u_values[i] - std::tanh(sol.z_nodes[i] / std::sqrt(2.0))));
    const double lhs = 0.5 * sol.du_values[i] * sol.du_values[i];
    first_integral = std::max(first_integral, std::abs(lhs - potential_value(p, sol.u_values[i])));
  }
  return {err < 1e-8 && first_integral < 1e-6,
          fmt("max|U0-tanh|=%.2e first-integral residual=%.2e", err, first_integral)};
}

Verdict sphere_potential() {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double h = 1e-2;
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    SphereModelParams p;
    p.vbar = 20.0 * u01(rng);
    p.mbar = 0.5 + 20.0 * u01(rng);
    const double th1 = 0.3 + 1.2 * u01(rng);
    const double th2 = th1 + 0.3 + (kPi - 0.6 - th1) * u01(rng);
    const SharpCapState s{th1, th2, 0.0};
    const struct { CapRegion r; double lo, hi, u; } regions[] = {
        {CapRegion::NorthCap, 0.0, th1, p.u_b},
        {CapRegion::Band, th1, th2, p.u_a},
        {CapRegion::SouthCap, th2, kPi, p.u_b}};
    for (const auto& reg : regions) {
      const double lo = reg.lo + 5 * h;
      const double hi = reg.hi - 5 * h;
      for (int j = 0; j < 50; ++j) {
        const double th = lo + (hi - lo) * (j + 0.5) / 50.0;
        auto w = [&](double x) { return cap_potential(x, reg.r, s, p); };
        const double lap = fd::d2(w, th, h) + std::cos(th) / std::sin(th) * fd::d1(w, th, h);
        worst = std::max(worst, std::abs(p.mbar * lap - reg.u * 2.0 * p.vbar * std::cos(th)));
      }
    }
  }
  return {worst < 1e-8, fmt("max residual %.2e over 20 tuples x 3 regions x 50 points", worst)};
}

Verdict singular_time() {
  const auto t0 = std::chrono::steady_clock::now();
  SphereModelParams p;
  p.vbar = 10.0;
  p.mbar = 5.0;
  p.s_const = std::sqrt(2.0) / 3.0;
  const auto traj = integrate_caps({0.8, 2.1, 0.0}, p, 0.2);
  const double dt = seconds_since(t0);
  if (!traj.event) return {false, "no event before t=0.2"};
  const double t = traj.event->time;
  return {t >= 0.09 && t <= 0.13 && traj.event->kind == "south-cap-vanished" && dt < 5.0,
          fmt("%s at t*=%.6f time=%.2fs", traj.event->kind.c_str(), t, dt)};
}

Verdict interval_limit() {
  const auto& st = outcome("stretch");
  const auto& co = outcome("compress");
  const double xs = st.runs.empty() ? NAN : first_interface(run_for(st, 0.025).result.trace.back());
  const double xc = co.runs.empty() ? NAN : first_interface(run_for(co, 0.025).result.trace.back());
  const auto rs = sweep_report(st.runs, st.sharp);
  const auto rc = sweep_report(co.runs, co.sharp);
  std::string errs;
  for (const auto* rep : {&rs, &rc}) {
    errs += " [";
    for (const auto& row : rep->rows) errs += fmt(" %.2e", row.interface_error.value_or(NAN));
    errs += " ]";
  }
  const bool pos = std::abs(xs - 1.5) < 0.05 && std::abs(xc - 0.5) < 0.05;
  const bool dec = rs.interface_errors_decreasing && rc.interface_errors_decreasing;
  return {pos && dec, fmt("stretch %.6f compress %.6f; errors over eps 0.4,0.1,0.025:", xs, xc) + errs +
                          (dec ? "" : " not strictly decreasing")};
}

Verdict mixing() {
  const auto& co = outcome("compress");
  const auto& coarse = run_for(co, 0.4).result.final_state;
  const auto& fine = run_for(co, 0.025).result.final_state;
  double umax = 0.0;
  for (double u : coarse.u) umax = std::max(umax, std::abs(u));
  const double frac = static_cast<double>(std::count_if(fine.u.begin(), fine.u.end(),
                                                        [](double u) { return std::abs(u) > 0.9; })) /
                      static_cast<double>(fine.u.size());
  return {umax < 0.5 && frac >= 0.8, fmt("eps=0.4 max|u|=%.4f; eps=0.025 share |u|>0.9 = %.3f", umax, frac)};
}

Verdict flattening() {
  const auto& o = outcome("stretch-positive");
  const auto& r = run_for(o, 0.025);
  const auto& s = r.result.final_state;
  const auto [lo, hi] = std::minmax_element(s.u.begin(), s.u.end());
  const auto domain = builtin_preset("stretch-positive").domain.build();
  const double length = std::get<MovingInterval>(domain).length(s.t);
  const double mean = total_mass(s, domain) / length;
  return {*hi - *lo < 0.05 && std::abs(mean - 1.0 / 6.0) < 0.01,
          fmt("max-min=%.2e mean=%.6f (length %.4f)", *hi - *lo, mean, length)};
}

Verdict mass_conservation() {
  double worst = 0.0;
  std::string where = "-";
  int count = 0;
  for (const auto& name : preset_names()) {
    for (const auto& r : outcome(name).runs) {
      if (!r.ok()) return {false, name + ": " + r.error};
      ++count;
      if (r.mass_drift >= worst) {
        worst = r.mass_drift;
        where = fmt("%s eps=%g mbar=%g", name.c_str(), r.epsilon, r.mbar);
      }
    }
  }
  return {worst < 1e-8, fmt("%d runs, worst relative drift %.2e (", count, worst) + where + ")"};
}

Verdict genesis() {
  const auto& r = run_for(outcome("genesis"), 0.033);
  for (const auto& snap : r.result.snapshots) {
    if (std::abs(snap.t - 0.198) > 1e-9) continue;
    const auto [lo, hi] = std::minmax_element(snap.u.begin(), snap.u.end());
    return {*lo <= 0.3 && *hi >= 0.7, fmt("u spans [%.4f, %.4f] at t=0.198", *lo, *hi)};
  }
  return {false, "no snapshot at t=0.198"};
}

Verdict bulk_motion() {
  const auto& o = outcome("bulk-motion");
  const auto& trace = run_for(o, 0.01).result.trace;
  const double at1 = trace_at(trace, 1.0, first_interface);
  double tc = -1.0;
  for (std::size_t k = 1; k < trace.size(); ++k) {
    const double a = first_interface(trace[k - 1]);
    const double b = first_interface(trace[k]);
    if (a < 0.5 && b >= 0.5) {
      tc = trace[k - 1].t + (0.5 - a) / (b - a) * (trace[k].t - trace[k - 1].t);
      break;
    }
  }
  if (tc < 0.0) return {false, fmt("interface never crosses 0.5 (x(1)=%.4f)", at1)};
  const double window = std::min({0.1, tc - trace.front().t, 2.0 - tc});
  const double before = (0.5 - trace_at(trace, tc - window, first_interface)) / window;
  const double after = (trace_at(trace, tc + window, first_interface) - 0.5) / window;
  const double pf = trace_at(trace, 1.8, first_interface);
  const auto sharp = o.sharp.interfaces_at(1.8);
  const double gap = sharp.size() == 1 ? std::abs(pf - sharp.front()) : INFINITY;
  return {at1 > 0.25 && after > before && gap < 0.05,
          fmt("x(1)=%.4f; crossing t=%.4f speed %.4f -> %.4f; x(1.8)=%.4f sharp gap %.4f", at1, tc, before,
              after, pf, gap)};
}

Verdict sphere_energy() {
  const auto& o = outcome("sphere-energy");
  const auto e0 = o.sharp.energy_at(0.05);
  if (!e0) return {false, "no sharp energy"};
  std::string detail = fmt("E0(0.05)=%.6f gaps:", *e0);
  double prev = INFINITY;
  bool dec = true;
  for (double eps : {0.2, 0.1, 0.05}) {
    const double e = trace_at(run_for(o, eps).result.trace, 0.05, [](const TraceRow& r) { return r.energy; });
    const double gap = std::abs(e - *e0);
    detail += fmt(" eps=%g %.4e", eps, gap);
    dec = dec && gap < prev;
    prev = gap;
  }
  return {dec, detail + (dec ? "" : " not strictly decreasing")};
}

Verdict coarsening_direction() {
  const auto& co = run_for(outcome("sphere-coarsen"), 0.1).result.final_state;
  const auto& re = run_for(outcome("sphere-reverse"), 0.1).result.final_state;
  const double cn = sample(co, 0.1), cs = sample(co, kPi - 0.1);
  const double rn = sample(re, 0.1), rs = sample(re, kPi - 0.1);
  const bool coarsen_ok = cn < 0.0 && cs > 0.0;
  const bool reverse_ok = rn > 0.0 && rs < 0.0;
  return {coarsen_ok && reverse_ok,
          fmt("vbar=0: u(0.1)=%+.3f u(pi-0.1)=%+.3f%s; vbar=10: u(0.1)=%+.3f u(pi-0.1)=%+.3f%s", cn, cs,
              coarsen_ok ? "" : " (north cap not yet vanished)", rn, rs, reverse_ok ? "" : " (wrong signs)")};
}

Verdict mobility_scaling() {
  const auto& o = outcome("mobility-scaling");
  const auto& slow = run_for(o, 0.1, 5.0).result.final_state;
  const auto& fast = run_for(o, 0.1, 50.0).result.final_state;
  // each crossing in (0, pi) is a circle on the surface, seen twice in a meridian cross-section
  const int n_slow = 2 * crossings(slow, 0.0);
  const int n_fast = 2 * crossings(fast, 0.0);
  return {n_slow == 4 && n_fast == 2,
          fmt("crossings at t=%.2f: mbar=5 -> %d, mbar=50 -> %d (want 4 and 2)", slow.t, n_slow, n_fast)};
}

Verdict uniform_state() {
  const auto domain = DomainSpec{DomainSpec::Kind::Interval, IntervalKind::StretchThenStop, 0.0}.build();
  const auto params = quartic_params(-1.0, 1.0, 0.1, 1.0);
  const double u0 = 1.5;
  const auto init = initialize(domain, params, InitialCondition::constant(u0), 64);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  const auto res = run(domain, params, cfg, init, 1.0);
  double worst = 0.0;
  for (double u : res.final_state.u) worst = std::max(worst, std::abs(u - u0 / 2.0) / (u0 / 2.0));
  return {worst < 1e-4, fmt("u0=%.1f, max relative error at t=1: %.2e", u0, worst)};
}

Verdict dissipation() {
  struct Case {
    const char* name;
    Domain domain;
    ModelParams params;
    InitialCondition ic;
    double t_end;
    std::size_t cells;
  };
  auto log_params = logarithmic_params(0.5, 1.0, -1.0, 1.0, 0.1, 1.0);
  log_params.mobility = MobilityKind::Degenerate;
  const std::vector<Case> cases = {
      {"interval quartic", DomainSpec{}.build(), quartic_params(-1.0, 1.0, 0.05, 1.0),
       InitialCondition::scaled_tanh(0.0, 0.9, 10.0, 5.0), 0.5, 128},
      {"interval log/degenerate", DomainSpec{}.build(), log_params, InitialCondition::width_tanh(0.0, 0.5, 0.4),
       0.5, 128},
      {"sphere vbar=0", DomainSpec{DomainSpec::Kind::SphereTangential, IntervalKind::Stationary, 0.0}.build(),
       quartic_params(-1.0, 1.0, 0.1, 5.0), InitialCondition::two_caps(0.8, 2.1, 1.45), 0.05, 256},
  };
  std::string detail;
  bool ok = true;
  for (const auto& c : cases) {
    SolverConfig cfg;
    cfg.dt = 1e-3;
    const auto res = run(c.domain, c.params, cfg, initialize(c.domain, c.params, c.ic, c.cells), c.t_end);
    double worst = -INFINITY;
    for (std::size_t k = 1; k < res.trace.size(); ++k) {
      worst = std::max(worst, res.trace[k].energy - res.trace[k - 1].energy);
    }
    ok = ok && worst <= 1e-10;
    detail += fmt("%s%s: %zu steps, max increase %.2e", detail.empty() ? "" : "; ", c.name, res.trace.size() - 1,
                  worst);
  }
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Verdict (*)()>> criteria = {
      {"calibration constant", calibration},
      {"profile oracle", profile_oracle},
      {"analytic sphere potential", sphere_potential},
      {"singular time", singular_time},
      {"interval sharp limit", interval_limit},
      {"finite-eps mixing", mixing},
      {"positive-minima flattening", flattening},
      {"mass conservation", mass_conservation},
      {"interface genesis", genesis},
      {"bulk-driven motion", bulk_motion},
      {"sphere energy convergence", sphere_energy},
      {"coarsening direction reversal", coarsening_direction},
      {"mobility scaling", mobility_scaling},
      {"uniform-state exactness", uniform_state},
      {"energy dissipation", dissipation},
  };
  const auto start = std::chrono::steady_clock::now();
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("criterion %2zu %s  %s: %s (%.1fs)\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first,
                v.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed, %.1fs total\n", criteria.size(), failed, seconds_since(start));
  return failed == 0 ? 0 : 1;
}
