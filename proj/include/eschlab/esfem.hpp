#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "eschlab/geometry.hpp"
#include "eschlab/model.hpp"

namespace eschlab {

/// Lagrangian P1 mesh of an interval or of the meridian of a surface of
/// revolution. On surfaces the nodes are cell centred and the two end nodes
/// also own the polar pads [0, x_0] and [x_{n-1}, pi], where their basis
/// function is constant.
struct Mesh1D {
  std::vector<double> reference;  ///< labels at t = 0
  std::vector<double> positions;  ///< current coordinate (x, or polar angle)
  std::vector<double> weights;    ///< measure density at the nodes
  bool pole_pads = false;

  std::size_t size() const noexcept { return positions.size(); }
};

struct DiscreteState {
  Mesh1D mesh;
  std::vector<double> u;
  std::vector<double> w;
  double t = 0.0;
  int newton_iterations = 0;  ///< iterations of the step that produced this state
};

struct SolverConfig {
  double dt = 1e-3;
  double newton_tol = 1e-10;
  int newton_max_iters = 30;
  /// Lower bound for the degenerate mobility; negative selects 1e-12 * mbar.
  double mobility_floor = -1.0;
  bool mass_lumping = true;
  std::vector<double> output_times;
  /// Trace rows are kept every this many steps (and always at output times).
  int trace_every = 1;

  void validate() const;
};

struct InitialCondition {
  enum class Kind {
    Constant,    ///< value
    ScaledTanh,  ///< offset + amplitude * tanh(slope * x - shift)
    Equilibrium, ///< layer profile in direction * (x - centre)
    TwoCaps,     ///< layer in (first - x) below split, in (x - second) above
    WidthTanh,   ///< offset + amplitude * tanh((x - centre) / eps)
  };
  Kind kind = Kind::Constant;
  double value = 0.0;
  double offset = 0.0;
  double amplitude = 1.0;
  double slope = 1.0;
  double shift = 0.0;
  double centre = 0.5;
  double direction = 1.0;
  double first = 0.8;
  double second = 2.1;
  double split = 1.45;

  static InitialCondition constant(double value);
  static InitialCondition scaled_tanh(double offset, double amplitude, double slope, double shift);
  static InitialCondition equilibrium(double centre, double direction = 1.0);
  static InitialCondition two_caps(double first, double second, double split);
  static InitialCondition width_tanh(double offset, double amplitude, double centre);

  bool operator==(const InitialCondition&) const = default;
};

/// c1 + c2 tanh(c2 y / (sqrt(2) eps)): the quartic equilibrium layer, used as
/// an initial shape for either potential.
double layer_profile(const ModelParams& params, double y);

/// Evaluates the initial condition at coordinate x.
double evaluate_initial(const InitialCondition& ic, const ModelParams& params, double x);

DiscreteState initialize(const Domain& domain, const ModelParams& params,
                         const InitialCondition& ic, std::size_t n_cells);

/// One implicit Euler step to t + dt on the mesh moved by the material map.
DiscreteState step(const DiscreteState& state, const Domain& domain, const ModelParams& params,
                   const SolverConfig& config, double dt);
inline DiscreteState step(const DiscreteState& state, const Domain& domain,
                          const ModelParams& params, const SolverConfig& config) {
  return step(state, domain, params, config, config.dt);
}

double energy(const DiscreteState& state, const Domain& domain, const ModelParams& params);
double total_mass(const DiscreteState& state, const Domain& domain);
/// Lumped integral of |u|, a scale for mass drift when the mass itself is near zero.
double absolute_mass(const DiscreteState& state, const Domain& domain);

/// Linear-interpolation crossings of the level (u_a + u_b)/2, sorted.
std::vector<double> locate_interfaces(const DiscreteState& state, const ModelParams& params);

struct TraceRow {
  double t = 0.0;
  double energy = 0.0;
  double mass = 0.0;
  std::vector<double> interfaces;
};

struct Snapshot {
  double t = 0.0;
  std::vector<double> coord;
  std::vector<double> u;
  std::vector<double> w;
};

struct RunResult {
  DiscreteState final_state;
  std::vector<TraceRow> trace;
  std::vector<Snapshot> snapshots;
  long steps = 0;
  long newton_iterations = 0;
  double initial_mass = 0.0;
  /// max |mass(t_k) - mass(0)| over every step, not only the traced ones
  double max_mass_deviation = 0.0;
};

/// Steps from the initial state to t_end, landing exactly on every output time.
RunResult run(const Domain& domain, const ModelParams& params, const SolverConfig& config,
              const DiscreteState& initial, double t_end);

struct Resolution {
  std::size_t n_cells = 64;
  double dt = 1e-3;
};

/// Largest ratio of current to initial arclength of a material element over [0, t_end].
double max_stretch(const Domain& domain, double t_end);

/// n_cells = max(64, ceil(16 * length * stretch / eps)), dt = min(1e-3, eps^2 / 4),
/// where length is the initial arclength of the interval or meridian.
Resolution default_resolution(const Domain& domain, const ModelParams& params, double t_end);

}  // namespace eschlab
