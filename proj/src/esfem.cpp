#include "eschlab/esfem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

#include "eschlab/banded.hpp"
#include "eschlab/errors.hpp"

namespace eschlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kResidualTolerance = 1e-12;
constexpr double kGauss2[2] = {-0.5773502691896257, 0.5773502691896257};
constexpr double kGauss3[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr double kGauss3W[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

bool is_surface(const Domain& d) { return std::holds_alternative<SurfaceOfRevolution>(d); }

struct Density {
  double m;       // area (or length) per unit coordinate
  double inv_g2;  // 1 / g^2, turns coordinate derivatives into surface gradients
};

Density density(const Domain& d, double s, double t) {
  if (!is_surface(d)) return {1.0, 1.0};
  const auto& surf = std::get<SurfaceOfRevolution>(d);
  if (surf.kind() == SurfaceKind::UnitSphereTangential) return {2.0 * kPi * std::sin(s), 1.0};
  const auto mf = surf.metric_factors(s, t);
  return {2.0 * kPi * mf.rho * mf.g, 1.0 / (mf.g * mf.g)};
}

double map_position(const Domain& d, double ref, double t) {
  if (const auto* iv = std::get_if<MovingInterval>(&d)) return iv->material_position(ref, t);
  return std::get<SurfaceOfRevolution>(d).material_angle(ref, t);
}

// Symmetric tridiagonal matrix: off[e] couples nodes e and e+1.
struct Tridiag {
  std::vector<double> diag;
  std::vector<double> off;

  explicit Tridiag(std::size_t n) : diag(n, 0.0), off(n > 0 ? n - 1 : 0, 0.0) {}

  std::vector<double> apply(const std::vector<double>& x) const {
    std::vector<double> y(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) {
      double s = diag[i] * x[i];
      if (i > 0) s += off[i - 1] * x[i - 1];
      if (i + 1 < diag.size()) s += off[i] * x[i + 1];
      y[i] = s;
    }
    return y;
  }

  std::vector<double> row_sums() const {
    std::vector<double> r(diag);
    for (std::size_t e = 0; e < off.size(); ++e) {
      r[e] += off[e];
      r[e + 1] += off[e];
    }
    return r;
  }
};

Tridiag assemble_mass(const Mesh1D& mesh, const Domain& d, double t) {
  const std::size_t n = mesh.size();
  Tridiag m(n);
  const auto& x = mesh.positions;
  for (std::size_t e = 0; e + 1 < n; ++e) {
    const double a = x[e];
    const double h = x[e + 1] - a;
    for (int q = 0; q < 3; ++q) {
      const double xi = 0.5 * (1.0 + kGauss3[q]);
      const double wq = 0.5 * h * kGauss3W[q] * density(d, a + xi * h, t).m;
      m.diag[e] += wq * (1.0 - xi) * (1.0 - xi);
      m.off[e] += wq * (1.0 - xi) * xi;
      m.diag[e + 1] += wq * xi * xi;
    }
  }
  if (mesh.pole_pads) {
    auto pad = [&](double lo, double hi) {
      double s = 0.0;
      for (int q = 0; q < 3; ++q) {
        s += 0.5 * (hi - lo) * kGauss3W[q] * density(d, 0.5 * (lo + hi) + 0.5 * (hi - lo) * kGauss3[q], t).m;
      }
      return s;
    };
    m.diag.front() += pad(0.0, x.front());
    m.diag.back() += pad(x.back(), kPi);
  }
  return m;
}

// Stiffness with optional nodal mobility field (interpolated to Gauss points).
Tridiag assemble_stiffness(const Mesh1D& mesh, const Domain& d, double t,
                           const ModelParams* params = nullptr,
                           const std::vector<double>* u_mob = nullptr, double floor = 0.0) {
  const std::size_t n = mesh.size();
  Tridiag k(n);
  const auto& x = mesh.positions;
  for (std::size_t e = 0; e + 1 < n; ++e) {
    const double a = x[e];
    const double h = x[e + 1] - a;
    double s = 0.0;
    for (int q = 0; q < 2; ++q) {
      const double xi = 0.5 * (1.0 + kGauss2[q]);
      const auto dens = density(d, a + xi * h, t);
      double mob = 1.0;
      if (params) {
        const double uq = (1.0 - xi) * (*u_mob)[e] + xi * (*u_mob)[e + 1];
        mob = std::max(mobility(*params, uq), floor);
      }
      s += 0.5 * h * dens.m * dens.inv_g2 * mob;
    }
    const double ke = s / (h * h);
    k.diag[e] += ke;
    k.diag[e + 1] += ke;
    k.off[e] -= ke;
  }
  return k;
}

// Nonlinear part of the chemical potential used by the time step, and its
// derivative in u. The quartic is split into its convex cubic (implicit)
// and concave linear part (explicit); the logarithmic potential is implicit.
struct StepNonlinearity {
  const ModelParams& p;
  double c1;
  double c2;

  explicit StepNonlinearity(const ModelParams& params) : p(params) {
    std::tie(c1, c2) = to_dimensionless(params);
  }
  std::pair<double, double> operator()(double u, double u_old) const;
};

std::pair<double, double> StepNonlinearity::operator()(double u, double u_old) const {
  if (p.potential == PotentialKind::Quartic) {
    const double s = u - c1;
    return {s * s * s - c2 * c2 * (u_old - c1), 3.0 * s * s};
  }
  return {potential_derivative(p, u), potential_second_derivative(p, u)};
}

void check_mesh(const Mesh1D& mesh, const Domain& d, double t) {
  const auto& x = mesh.positions;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (!(x[i + 1] > x[i])) {
      throw MeshTanglingError("mesh tangled at t = " + std::to_string(t) + " between nodes " +
                              std::to_string(i) + " and " + std::to_string(i + 1));
    }
  }
  if (is_surface(d)) {
    if (!(x.front() > 0.0 && x.back() < kPi)) {
      throw MeshTanglingError("surface node reached a pole at t = " + std::to_string(t));
    }
  }
}

Mesh1D moved_mesh(const Mesh1D& old, const Domain& d, double t) {
  Mesh1D m;
  m.reference = old.reference;
  m.pole_pads = old.pole_pads;
  m.positions.resize(m.reference.size());
  for (std::size_t i = 0; i < m.reference.size(); ++i) m.positions[i] = map_position(d, m.reference[i], t);
  check_mesh(m, d, t);
  m.weights.resize(m.positions.size());
  for (std::size_t i = 0; i < m.positions.size(); ++i) m.weights[i] = density(d, m.positions[i], t).m;
  return m;
}

double inf_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

DiscreteState step_to(const DiscreteState& state, const Domain& domain, const ModelParams& params,
                      const SolverConfig& config, double t_new) {
  const double dt = t_new - state.t;
  if (!(dt > 0.0)) throw InvalidParamsError("time step must be positive");
  const std::size_t n = state.mesh.size();
  const double eps = params.epsilon;
  const bool log_pot = params.potential == PotentialKind::Logarithmic;

  // With the logarithmic potential every mass matrix is lumped: the consistent
  // matrix has positive off-diagonals and lets nodal values cross the bounds.
  const bool lump_all = log_pot && config.mass_lumping;
  auto mass_matrix = [&](const Mesh1D& mesh, double t) {
    auto m = assemble_mass(mesh, domain, t);
    if (lump_all) {
      m.diag = m.row_sums();
      std::fill(m.off.begin(), m.off.end(), 0.0);
    }
    return m;
  };

  // mass carried over from the old mesh
  const auto b = mass_matrix(state.mesh, state.t).apply(state.u);

  DiscreteState next;
  next.mesh = moved_mesh(state.mesh, domain, t_new);
  next.t = t_new;
  const auto mass = mass_matrix(next.mesh, t_new);
  const auto lumped = mass.row_sums();
  const auto stiff = assemble_stiffness(next.mesh, domain, t_new);
  const double floor = config.mobility_floor >= 0.0 ? config.mobility_floor : 1e-12 * params.mbar;
  const auto mob = assemble_stiffness(next.mesh, domain, t_new, &params, &state.u, floor);

  std::vector<double> u = state.u;
  std::vector<double> w = state.w;
  const std::vector<double>& u_old = state.u;

  const StepNonlinearity nonlinearity(params);
  std::vector<double> fhat(n), dfhat(n);
  auto residual = [&](const std::vector<double>& uu, const std::vector<double>& ww,
                      std::vector<double>& r) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto [f, df] = nonlinearity(uu[i], u_old[i]);
      fhat[i] = f;
      dfhat[i] = df;
    }
    const auto mu = mass.apply(uu);
    const auto mw = mass.apply(ww);
    const auto aw = mob.apply(ww);
    const auto ku = stiff.apply(uu);
    std::vector<double> nl = config.mass_lumping ? std::vector<double>(n) : mass.apply(fhat);
    if (config.mass_lumping) {
      for (std::size_t i = 0; i < n; ++i) nl[i] = lumped[i] * fhat[i];
    }
    r.resize(2 * n);
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r[2 * i] = mu[i] - b[i] + dt * aw[i];
      r[2 * i + 1] = mw[i] - eps * ku[i] - nl[i] / eps;
      norm = std::max({norm, std::abs(r[2 * i]), std::abs(r[2 * i + 1])});
    }
    return norm;
  };

  std::vector<double> r;
  double rnorm = residual(u, w, r);
  int it = 0;
  bool converged = false;
  BandedMatrix jac(2 * n, 3, 3);
  // residual test against the carried-over mass, checked before each factorisation
  const double residual_tol = kResidualTolerance * (1.0 + inf_norm(b));
  for (; it < config.newton_max_iters; ++it) {
    if (rnorm <= residual_tol) {
      converged = true;
      break;
    }
    jac.set_zero();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t ru = 2 * i;
      const std::size_t rw = 2 * i + 1;
      for (int o = -1; o <= 1; ++o) {
        if ((o < 0 && i == 0) || (o > 0 && i + 1 == n)) continue;
        const std::size_t j = static_cast<std::size_t>(static_cast<long>(i) + o);
        const double mij = o == 0 ? mass.diag[i] : mass.off[std::min(i, j)];
        const double aij = o == 0 ? mob.diag[i] : mob.off[std::min(i, j)];
        const double kij = o == 0 ? stiff.diag[i] : stiff.off[std::min(i, j)];
        jac(ru, 2 * j) += mij;
        jac(ru, 2 * j + 1) += dt * aij;
        jac(rw, 2 * j + 1) += mij;
        jac(rw, 2 * j) -= eps * kij;
        if (!config.mass_lumping) jac(rw, 2 * j) -= mij * dfhat[j] / eps;
      }
      if (config.mass_lumping) jac(rw, 2 * i) -= lumped[i] * dfhat[i] / eps;
    }
    jac.factorize();
    std::vector<double> delta(2 * n);
    for (std::size_t k = 0; k < 2 * n; ++k) delta[k] = -r[k];
    jac.solve_in_place(delta);

    // Near a singular bound the Newton model of the logarithm overshoots, so
    // each node that would leave (alpha, beta) keeps 1% of its distance to it.
    bool clamped = false;
    std::vector<double> rt;
    for (std::size_t i = 0; i < n; ++i) {
      double un = u[i] + delta[2 * i];
      if (log_pot && un <= params.alpha) {
        un = u[i] - 0.99 * (u[i] - params.alpha);
        clamped = true;
      } else if (log_pot && un >= params.beta) {
        un = u[i] + 0.99 * (params.beta - u[i]);
        clamped = true;
      }
      u[i] = un;
      w[i] += delta[2 * i + 1];
    }
    rnorm = residual(u, w, r);
    const double step_size = inf_norm(delta);
    const double scale = 1.0 + std::max(inf_norm(u), inf_norm(w));
    if (step_size <= config.newton_tol * scale && !clamped) {
      converged = true;
      ++it;
      break;
    }
  }
  if (!converged) {
    throw ConvergenceError("implicit step at t = " + std::to_string(t_new) + " did not converge",
                           it, rnorm);
  }
  next.u = std::move(u);
  next.w = std::move(w);
  next.newton_iterations = it;
  return next;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(dt > 0.0)) throw InvalidParamsError("dt must be positive");
  if (!(newton_tol > 0.0)) throw InvalidParamsError("newton_tol must be positive");
  if (newton_max_iters < 1) throw InvalidParamsError("newton_max_iters must be at least 1");
  if (trace_every < 1) throw InvalidParamsError("trace_every must be at least 1");
  if (!std::is_sorted(output_times.begin(), output_times.end())) {
    throw InvalidParamsError("output times must be sorted");
  }
}

InitialCondition InitialCondition::constant(double value) {
  InitialCondition ic;
  ic.kind = Kind::Constant;
  ic.value = value;
  return ic;
}

InitialCondition InitialCondition::scaled_tanh(double offset, double amplitude, double slope,
                                               double shift) {
  InitialCondition ic;
  ic.kind = Kind::ScaledTanh;
  ic.offset = offset;
  ic.amplitude = amplitude;
  ic.slope = slope;
  ic.shift = shift;
  return ic;
}

InitialCondition InitialCondition::equilibrium(double centre, double direction) {
  InitialCondition ic;
  ic.kind = Kind::Equilibrium;
  ic.centre = centre;
  ic.direction = direction;
  return ic;
}

InitialCondition InitialCondition::two_caps(double first, double second, double split) {
  InitialCondition ic;
  ic.kind = Kind::TwoCaps;
  ic.first = first;
  ic.second = second;
  ic.split = split;
  return ic;
}

InitialCondition InitialCondition::width_tanh(double offset, double amplitude, double centre) {
  InitialCondition ic;
  ic.kind = Kind::WidthTanh;
  ic.offset = offset;
  ic.amplitude = amplitude;
  ic.centre = centre;
  return ic;
}

double layer_profile(const ModelParams& params, double y) {
  const auto [c1, c2] = to_dimensionless(params);
  return c1 + c2 * std::tanh(c2 * y / (std::numbers::sqrt2 * params.epsilon));
}

double evaluate_initial(const InitialCondition& ic, const ModelParams& params, double x) {
  switch (ic.kind) {
    case InitialCondition::Kind::Constant: return ic.value;
    case InitialCondition::Kind::ScaledTanh:
      return ic.offset + ic.amplitude * std::tanh(ic.slope * x - ic.shift);
    case InitialCondition::Kind::Equilibrium:
      return layer_profile(params, ic.direction * (x - ic.centre));
    case InitialCondition::Kind::TwoCaps:
      return x < ic.split ? layer_profile(params, ic.first - x) : layer_profile(params, x - ic.second);
    case InitialCondition::Kind::WidthTanh:
      return ic.offset + ic.amplitude * std::tanh((x - ic.centre) / params.epsilon);
  }
  return 0.0;
}

DiscreteState initialize(const Domain& domain, const ModelParams& params,
                         const InitialCondition& ic, std::size_t n_cells) {
  params.validate();
  if (n_cells < 8) throw InvalidParamsError("initialize needs at least 8 cells");
  if (ic.kind == InitialCondition::Kind::TwoCaps && !(ic.first < ic.split && ic.split < ic.second)) {
    throw InvalidParamsError("two-cap profile needs first < split < second");
  }
  if (ic.kind == InitialCondition::Kind::Equilibrium && ic.direction == 0.0) {
    throw InvalidParamsError("equilibrium profile needs a nonzero direction");
  }

  DiscreteState s;
  auto& mesh = s.mesh;
  if (const auto* iv = std::get_if<MovingInterval>(&domain)) {
    const double len = iv->length(0.0);
    mesh.reference.resize(n_cells + 1);
    for (std::size_t i = 0; i <= n_cells; ++i) {
      mesh.reference[i] = len * static_cast<double>(i) / static_cast<double>(n_cells);
    }
    mesh.reference.back() = len;
  } else {
    mesh.pole_pads = true;
    mesh.reference.resize(n_cells);
    for (std::size_t i = 0; i < n_cells; ++i) {
      mesh.reference[i] = (static_cast<double>(i) + 0.5) * kPi / static_cast<double>(n_cells);
    }
  }
  mesh.positions = mesh.reference;
  mesh.weights.resize(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) mesh.weights[i] = density(domain, mesh.positions[i], 0.0).m;

  const std::size_t n = mesh.size();
  s.u.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = evaluate_initial(ic, params, mesh.positions[i]);
    if (!std::isfinite(v)) throw InvalidParamsError("initial profile is not finite");
    if (params.potential == PotentialKind::Logarithmic && !(v > params.alpha && v < params.beta)) {
      throw InvalidParamsError("initial profile leaves the domain of the logarithmic potential");
    }
    s.u[i] = v;
  }

  // w = M^{-1} (eps K u + ML f(u) / eps)
  const auto mass = assemble_mass(mesh, domain, 0.0);
  const auto lumped = mass.row_sums();
  const auto ku = assemble_stiffness(mesh, domain, 0.0).apply(s.u);
  BandedMatrix m(n, 1, 1);
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = mass.diag[i];
    if (i + 1 < n) {
      m(i, i + 1) = mass.off[i];
      m(i + 1, i) = mass.off[i];
    }
    rhs[i] = params.epsilon * ku[i] + lumped[i] * potential_derivative(params, s.u[i]) / params.epsilon;
  }
  m.factorize();
  m.solve_in_place(rhs);
  s.w = std::move(rhs);
  return s;
}

DiscreteState step(const DiscreteState& state, const Domain& domain, const ModelParams& params,
                   const SolverConfig& config, double dt) {
  config.validate();
  return step_to(state, domain, params, config, state.t + dt);
}

double energy(const DiscreteState& state, const Domain& domain, const ModelParams& params) {
  const auto stiff = assemble_stiffness(state.mesh, domain, state.t);
  const auto lumped = assemble_mass(state.mesh, domain, state.t).row_sums();
  const auto ku = stiff.apply(state.u);
  double grad = 0.0;
  double bulk = 0.0;
  for (std::size_t i = 0; i < state.u.size(); ++i) {
    grad += state.u[i] * ku[i];
    bulk += lumped[i] * potential_value(params, state.u[i]);
  }
  return 0.5 * params.epsilon * grad + bulk / params.epsilon;
}

double total_mass(const DiscreteState& state, const Domain& domain) {
  const auto lumped = assemble_mass(state.mesh, domain, state.t).row_sums();
  double m = 0.0;
  for (std::size_t i = 0; i < state.u.size(); ++i) m += lumped[i] * state.u[i];
  return m;
}

double absolute_mass(const DiscreteState& state, const Domain& domain) {
  const auto lumped = assemble_mass(state.mesh, domain, state.t).row_sums();
  double m = 0.0;
  for (std::size_t i = 0; i < state.u.size(); ++i) m += lumped[i] * std::abs(state.u[i]);
  return m;
}

std::vector<double> locate_interfaces(const DiscreteState& state, const ModelParams& params) {
  const double level = 0.5 * (params.u_a + params.u_b);
  const auto& x = state.mesh.positions;
  const auto& u = state.u;
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const bool a = u[i] >= level;
    const bool b = u[i + 1] >= level;
    if (a == b) continue;
    const double s = (level - u[i]) / (u[i + 1] - u[i]);
    out.push_back(x[i] + s * (x[i + 1] - x[i]));
  }
  return out;
}

RunResult run(const Domain& domain, const ModelParams& params, const SolverConfig& config,
              const DiscreteState& initial, double t_end) {
  config.validate();
  params.validate();
  if (!(t_end >= initial.t)) throw InvalidParamsError("t_end precedes the initial time");

  RunResult res;
  DiscreteState state = initial;
  const double tol = 1e-9 * config.dt;
  auto record = [&](bool force, long step_index) {
    if (!force && step_index % config.trace_every != 0) return;
    res.trace.push_back({state.t, energy(state, domain, params), total_mass(state, domain),
                         locate_interfaces(state, params)});
  };
  auto snapshot = [&]() {
    res.snapshots.push_back({state.t, state.mesh.positions, state.u, state.w});
  };

  std::vector<double> outputs;
  for (double t : config.output_times) {
    if (t >= initial.t - tol && t <= t_end + tol) outputs.push_back(t);
  }
  std::size_t next_out = 0;
  res.initial_mass = total_mass(state, domain);
  record(true, 0);
  while (next_out < outputs.size() && std::abs(outputs[next_out] - state.t) <= tol) {
    snapshot();
    ++next_out;
  }

  // step times are anchor + k dt, re-anchored at every landing on an output
  // time, so that rounding does not accumulate into a spurious final step
  long steps = 0;
  double anchor = state.t;
  long k = 0;
  while (t_end - state.t > tol) {
    const double stop = next_out < outputs.size() ? std::min(outputs[next_out], t_end) : t_end;
    double target = anchor + static_cast<double>(k + 1) * config.dt;
    if (stop - target <= tol) target = stop;
    state = step_to(state, domain, params, config, target);
    ++steps;
    ++k;
    res.newton_iterations += state.newton_iterations;
    res.max_mass_deviation =
        std::max(res.max_mass_deviation, std::abs(total_mass(state, domain) - res.initial_mass));
    bool at_output = false;
    while (next_out < outputs.size() && std::abs(outputs[next_out] - state.t) <= tol) {
      snapshot();
      ++next_out;
      at_output = true;
    }
    if (target == stop) {
      anchor = stop;
      k = 0;
    }
    record(at_output || t_end - state.t <= tol, steps);
  }
  res.steps = steps;
  res.final_state = std::move(state);
  return res;
}

double max_stretch(const Domain& domain, double t_end) {
  constexpr int kPoints = 400;
  constexpr int kTimes = 100;
  std::vector<double> ref(kPoints + 1);
  if (const auto* iv = std::get_if<MovingInterval>(&domain)) {
    const double len = iv->length(0.0);
    for (int k = 0; k <= kPoints; ++k) ref[k] = len * k / kPoints;
  } else {
    for (int k = 0; k <= kPoints; ++k) ref[k] = (k + 0.5) * kPi / (kPoints + 1);
  }
  auto arclengths = [&](double t) {
    std::vector<double> pos(ref.size());
    for (std::size_t k = 0; k < ref.size(); ++k) pos[k] = map_position(domain, ref[k], t);
    std::vector<double> ds(ref.size() - 1);
    for (std::size_t k = 0; k + 1 < pos.size(); ++k) {
      const double mid = 0.5 * (pos[k] + pos[k + 1]);
      ds[k] = (pos[k + 1] - pos[k]) / std::sqrt(density(domain, mid, t).inv_g2);
    }
    return ds;
  };
  const auto ds0 = arclengths(0.0);
  double worst = 1.0;
  for (int j = 1; j <= kTimes; ++j) {
    const auto ds = arclengths(t_end * j / kTimes);
    for (std::size_t k = 0; k < ds.size(); ++k) worst = std::max(worst, ds[k] / ds0[k]);
  }
  return worst;
}

Resolution default_resolution(const Domain& domain, const ModelParams& params, double t_end) {
  double length = 0.0;
  if (const auto* iv = std::get_if<MovingInterval>(&domain)) {
    length = iv->length(0.0);
  } else {
    constexpr int kPanels = 400;
    for (int k = 0; k < kPanels; ++k) {
      const double mid = (k + 0.5) * kPi / kPanels;
      length += kPi / kPanels / std::sqrt(density(domain, mid, 0.0).inv_g2);
    }
  }
  const double stretch = max_stretch(domain, t_end);
  Resolution r;
  // the relative shave keeps an exact integer product from rounding up a cell
  const double cells = 16.0 * length * stretch / params.epsilon * (1.0 - 1e-12);
  r.n_cells = std::max<std::size_t>(64, static_cast<std::size_t>(std::ceil(cells)));
  r.dt = std::min(1e-3, 0.25 * params.epsilon * params.epsilon);
  return r;
}

}  // namespace eschlab
