#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace eschlab {

enum class PotentialKind { Quartic, Logarithmic };
enum class MobilityKind { Constant, Degenerate };

std::string_view to_string(PotentialKind kind);
std::string_view to_string(MobilityKind kind);
PotentialKind potential_kind_from_string(std::string_view name);
MobilityKind mobility_kind_from_string(std::string_view name);

/// Parameters of the double-well potential, the mobility and the interface
/// width. The logarithmic fields are ignored for the quartic potential.
struct ModelParams {
  PotentialKind potential = PotentialKind::Quartic;
  MobilityKind mobility = MobilityKind::Constant;
  double u_a = -1.0;
  double u_b = 1.0;
  double epsilon = 0.1;
  double mbar = 1.0;

  double theta = 0.5;
  double theta_c = 1.0;
  double k1 = 1.0;
  double k2 = 1.0;
  double alpha = -1.0;
  double beta = 1.0;

  /// Throws InvalidParamsError when an invariant is violated.
  void validate() const;

  bool operator==(const ModelParams&) const = default;
};

/// Quartic double well with wells at -1 and 1.
ModelParams quartic_params(double u_a = -1.0, double u_b = 1.0, double epsilon = 0.1,
                           double mbar = 1.0);

/// Symmetric logarithmic potential on (alpha, beta) with wells located by
/// logarithmic_wells(); the returned params already carry u_a, u_b.
ModelParams logarithmic_params(double theta = 0.5, double theta_c = 1.0, double alpha = -1.0,
                               double beta = 1.0, double epsilon = 0.1, double mbar = 1.0);

/// Minima of a logarithmic potential that is symmetric about (alpha+beta)/2.
std::pair<double, double> logarithmic_wells(const ModelParams& params);

/// F(u).
double potential_value(const ModelParams& params, double u);
/// f(u) = F'(u).
double potential_derivative(const ModelParams& params, double u);
/// f'(u) = F''(u).
double potential_second_derivative(const ModelParams& params, double u);
/// f''(u) = F'''(u).
double potential_third_derivative(const ModelParams& params, double u);

double mobility(const ModelParams& params, double u);

/// Closed-form planar equilibrium of the quartic model across the level y = 0.
double equilibrium_profile(const ModelParams& params, double y);

/// (c1, c2) with u = c1 + c2 * u_tilde mapping the wells onto -1 and 1.
std::pair<double, double> to_dimensionless(const ModelParams& params);

/// Leading-order transition layer U0 on a truncated line together with its
/// calibration constants.
struct ProfileSolution {
  std::vector<double> z_nodes;
  std::vector<double> u_values;
  std::vector<double> du_values;  ///< dU0/dz at the nodes
  double s_constant = 0.0;
  std::optional<double> t_constant;
  int newton_iterations = 0;
  double residual = 0.0;

  double spacing() const { return z_nodes.size() > 1 ? z_nodes[1] - z_nodes[0] : 0.0; }
};

inline constexpr double kDefaultProfileTruncation = 20.0;
inline constexpr std::size_t kDefaultProfileNodes = 4001;

/// Solves 0 = -U0'' + f(U0) on [-truncation, truncation] with U0 pinned to the
/// wells at the ends (fourth-order Numerov scheme, damped Newton).
/// s_constant is filled in; t_constant is left empty.
ProfileSolution solve_profile(const ModelParams& params,
                              double truncation = kDefaultProfileTruncation,
                              std::size_t n = kDefaultProfileNodes);

/// S(U0) = int (U0')^2 dz / (u_b - u_a).
double surface_tension_constant(const ProfileSolution& profile, const ModelParams& params);

/// Solves -u'' + f'(U0) u = rhs with u' = 0 at both truncation ends, selecting
/// the solution orthogonal to U0' (the kernel of the operator on the line).
std::vector<double> solve_correction_bvp(const ProfileSolution& profile,
                                         const ModelParams& params,
                                         std::span<const double> rhs);

/// T(U0) = int [u~' U0' - (u~^2 / 2) d/dz f'(U0)] dz / (u_b - u_a), where u~
/// solves the correction problem with right-hand side S - U0'.
double correction_constant(const ProfileSolution& profile, const ModelParams& params);

/// T(U0) for an explicitly given correction field u~ at the profile nodes.
double correction_functional(const ProfileSolution& profile, const ModelParams& params,
                             std::span<const double> correction);

/// Fourth-order finite-difference derivative on a uniform grid.
std::vector<double> uniform_derivative(std::span<const double> values, double h);

/// Composite trapezoid rule on a uniform grid.
double trapezoid(std::span<const double> values, double h);

}  // namespace eschlab
