#include "eschlab/model.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "eschlab/banded.hpp"
#include "eschlab/errors.hpp"

namespace eschlab {

namespace {

void require_log_domain(const ModelParams& p, double u) {
  if (!(u > p.alpha && u < p.beta)) {
    throw DomainError("logarithmic potential evaluated at u = " + std::to_string(u) +
                      " outside (" + std::to_string(p.alpha) + ", " + std::to_string(p.beta) +
                      ")");
  }
}

double log_a(const ModelParams& p) { return p.theta / (2.0 * p.k1); }
double log_b(const ModelParams& p) { return p.theta_c / (2.0 * p.k2); }

}  // namespace

std::string_view to_string(PotentialKind kind) {
  return kind == PotentialKind::Quartic ? "quartic" : "log";
}

std::string_view to_string(MobilityKind kind) {
  return kind == MobilityKind::Constant ? "constant" : "degenerate";
}

PotentialKind potential_kind_from_string(std::string_view name) {
  if (name == "quartic") return PotentialKind::Quartic;
  if (name == "log" || name == "logarithmic") return PotentialKind::Logarithmic;
  throw InvalidParamsError("unknown potential '" + std::string(name) + "'");
}

MobilityKind mobility_kind_from_string(std::string_view name) {
  if (name == "constant") return MobilityKind::Constant;
  if (name == "degenerate") return MobilityKind::Degenerate;
  throw InvalidParamsError("unknown mobility '" + std::string(name) + "'");
}

void ModelParams::validate() const {
  if (!(u_a < u_b)) throw InvalidParamsError("wells must satisfy u_a < u_b");
  if (!(epsilon > 0.0)) throw InvalidParamsError("epsilon must be positive");
  if (!(mbar > 0.0)) throw InvalidParamsError("mbar must be positive");
  if (potential == PotentialKind::Logarithmic) {
    if (!(alpha < u_a && u_b < beta)) {
      throw InvalidParamsError("logarithmic potential needs alpha < u_a < u_b < beta");
    }
    if (!(theta > 0.0 && theta_c > 0.0 && k1 > 0.0 && k2 > 0.0)) {
      throw InvalidParamsError("theta, theta_c, k1, k2 must be positive");
    }
  }
  if (mobility == MobilityKind::Degenerate && !(alpha < beta)) {
    throw InvalidParamsError("degenerate mobility needs alpha < beta");
  }
}

ModelParams quartic_params(double u_a, double u_b, double epsilon, double mbar) {
  ModelParams p;
  p.u_a = u_a;
  p.u_b = u_b;
  p.epsilon = epsilon;
  p.mbar = mbar;
  p.validate();
  return p;
}

ModelParams logarithmic_params(double theta, double theta_c, double alpha, double beta,
                               double epsilon, double mbar) {
  ModelParams p;
  p.potential = PotentialKind::Logarithmic;
  p.mobility = MobilityKind::Degenerate;
  p.theta = theta;
  p.theta_c = theta_c;
  p.alpha = alpha;
  p.beta = beta;
  p.epsilon = epsilon;
  p.mbar = mbar;
  p.u_a = alpha + 0.25 * (beta - alpha);
  p.u_b = beta - 0.25 * (beta - alpha);
  const auto [ua, ub] = logarithmic_wells(p);
  p.u_a = ua;
  p.u_b = ub;
  p.validate();
  return p;
}

std::pair<double, double> logarithmic_wells(const ModelParams& p) {
  const double mid = 0.5 * (p.alpha + p.beta);
  const double half = 0.5 * (p.beta - p.alpha);
  if (potential_second_derivative(p, mid) >= 0.0) {
    throw InvalidParamsError("logarithmic potential has a single well (theta too large)");
  }
  // f(mid) = 0 and f < 0 just right of mid, f -> +inf at beta.
  double lo = mid + 1e-12 * half;
  double hi = p.beta - 1e-15 * half;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * half; ++it) {
    const double m = 0.5 * (lo + hi);
    if (potential_derivative(p, m) < 0.0) {
      lo = m;
    } else {
      hi = m;
    }
  }
  const double ub = 0.5 * (lo + hi);
  return {2.0 * mid - ub, ub};
}

double potential_value(const ModelParams& p, double u) {
  if (p.potential == PotentialKind::Quartic) {
    const double a = (p.u_b - u) * (u - p.u_a);
    return 0.25 * a * a;
  }
  require_log_domain(p, u);
  const double bu = p.beta - u;
  const double ua = u - p.alpha;
  return log_a(p) * (bu * std::log(bu) + ua * std::log(ua)) + log_b(p) * bu * ua;
}

double potential_derivative(const ModelParams& p, double u) {
  if (p.potential == PotentialKind::Quartic) {
    const auto [c1, c2] = to_dimensionless(p);
    const double s = u - c1;
    return s * (s * s - c2 * c2);
  }
  require_log_domain(p, u);
  return log_a(p) * std::log((u - p.alpha) / (p.beta - u)) +
         log_b(p) * (p.alpha + p.beta - 2.0 * u);
}

double potential_second_derivative(const ModelParams& p, double u) {
  if (p.potential == PotentialKind::Quartic) {
    const auto [c1, c2] = to_dimensionless(p);
    const double s = u - c1;
    return 3.0 * s * s - c2 * c2;
  }
  require_log_domain(p, u);
  return log_a(p) * (1.0 / (u - p.alpha) + 1.0 / (p.beta - u)) - 2.0 * log_b(p);
}

double potential_third_derivative(const ModelParams& p, double u) {
  if (p.potential == PotentialKind::Quartic) {
    return 6.0 * (u - 0.5 * (p.u_a + p.u_b));
  }
  require_log_domain(p, u);
  const double ua = u - p.alpha;
  const double bu = p.beta - u;
  return log_a(p) * (1.0 / (bu * bu) - 1.0 / (ua * ua));
}

double mobility(const ModelParams& p, double u) {
  if (p.mobility == MobilityKind::Constant) return p.mbar;
  return std::abs(p.mbar * (u - p.alpha) * (p.beta - u));
}

double equilibrium_profile(const ModelParams& p, double y) {
  if (p.potential != PotentialKind::Quartic) {
    throw UnsupportedError("equilibrium_profile has a closed form for the quartic potential only");
  }
  const auto [c1, c2] = to_dimensionless(p);
  return c1 + c2 * std::tanh(c2 * y / (std::sqrt(2.0) * p.epsilon));
}

std::pair<double, double> to_dimensionless(const ModelParams& p) {
  return {0.5 * (p.u_b + p.u_a), 0.5 * (p.u_b - p.u_a)};
}

std::vector<double> uniform_derivative(std::span<const double> v, double h) {
  const std::size_t n = v.size();
  std::vector<double> d(n, 0.0);
  if (n < 5) {
    for (std::size_t i = 0; i < n; ++i) {
      if (n < 2) break;
      const std::size_t a = i == 0 ? 0 : i - 1;
      const std::size_t b = i + 1 < n ? i + 1 : n - 1;
      d[i] = (v[b] - v[a]) / (static_cast<double>(b - a) * h);
    }
    return d;
  }
  for (std::size_t i = 2; i + 2 < n; ++i) {
    d[i] = (-v[i + 2] + 8.0 * v[i + 1] - 8.0 * v[i - 1] + v[i - 2]) / (12.0 * h);
  }
  // fourth-order one-sided stencils at the two nodes next to each end
  d[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h);
  d[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / (12.0 * h);
  d[n - 1] = (25.0 * v[n - 1] - 48.0 * v[n - 2] + 36.0 * v[n - 3] - 16.0 * v[n - 4] +
              3.0 * v[n - 5]) /
             (12.0 * h);
  d[n - 2] = (3.0 * v[n - 1] + 10.0 * v[n - 2] - 18.0 * v[n - 3] + 6.0 * v[n - 4] - v[n - 5]) /
             (12.0 * h);
  return d;
}

double trapezoid(std::span<const double> v, double h) {
  if (v.size() < 2) return 0.0;
  double s = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
  return s * h;
}

ProfileSolution solve_profile(const ModelParams& params, double truncation, std::size_t n) {
  params.validate();
  if (n < 3 || n % 2 == 0) throw InvalidParamsError("solve_profile needs an odd node count >= 3");
  if (!(truncation > 0.0)) throw InvalidParamsError("truncation must be positive");

  const auto [c1, c2] = to_dimensionless(params);
  const double fscale = std::max(1.0, std::abs(potential_second_derivative(params, params.u_b)));
  if (std::abs(potential_derivative(params, params.u_a)) > 1e-8 * fscale ||
      std::abs(potential_derivative(params, params.u_b)) > 1e-8 * fscale) {
    throw InvalidParamsError("u_a and u_b are not stationary points of the potential");
  }
  const double decay = potential_second_derivative(params, params.u_b);
  if (!(decay > 0.0) || !(potential_second_derivative(params, params.u_a) > 0.0)) {
    throw InvalidParamsError("wells must be non-degenerate minima");
  }

  ProfileSolution sol;
  const double h = 2.0 * truncation / static_cast<double>(n - 1);
  sol.z_nodes.resize(n);
  sol.u_values.resize(n);
  const double k = 0.5 * std::sqrt(decay);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = -truncation + h * static_cast<double>(i);
    sol.z_nodes[i] = z;
    sol.u_values[i] = c1 + c2 * std::tanh(k * z);
  }
  sol.u_values.front() = params.u_a;
  sol.u_values.back() = params.u_b;

  // The level c1 is pinned at z = 0. With F(u_a) = F(u_b) both halves meet
  // with matching slope, and the pin removes the translation mode that makes
  // the plain Dirichlet problem nearly singular.
  const std::size_t centre = (n - 1) / 2;
  sol.u_values[centre] = c1;

  auto& u = sol.u_values;
  const double h2 = h * h;
  const double w = h2 / 12.0;
  const bool bounded = params.potential == PotentialKind::Logarithmic;
  auto is_free = [&](std::size_t i) { return i > 0 && i + 1 < n && i != centre; };

  auto residual = [&](const std::vector<double>& v, std::vector<double>& r) {
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = potential_derivative(params, v[i]);
    double norm = 0.0;
    r.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (!is_free(i)) continue;
      r[i] = (v[i - 1] - 2.0 * v[i] + v[i + 1]) - w * (f[i - 1] + 10.0 * f[i] + f[i + 1]);
      norm = std::max(norm, std::abs(r[i]) / h2);
    }
    return norm;
  };

  const double floor = 100.0 * std::numeric_limits<double>::epsilon() *
                       std::max({1.0, std::abs(params.u_a), std::abs(params.u_b)}) / h2;
  const double tol = std::max(1e-12, floor);
  constexpr int kMaxIterations = 50;

  std::vector<double> r;
  double rnorm = residual(u, r);
  int it = 0;
  for (; it < kMaxIterations && rnorm > tol; ++it) {
    BandedMatrix jac(n, 1, 1);
    std::vector<double> delta(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!is_free(i)) {
        jac(i, i) = 1.0;
        continue;
      }
      jac(i, i) = -2.0 - 10.0 * w * potential_second_derivative(params, u[i]);
      if (is_free(i - 1)) jac(i, i - 1) = 1.0 - w * potential_second_derivative(params, u[i - 1]);
      if (is_free(i + 1)) jac(i, i + 1) = 1.0 - w * potential_second_derivative(params, u[i + 1]);
      delta[i] = -r[i];
    }
    jac.factorize();
    jac.solve_in_place(delta);

    double step = 1.0;
    if (bounded) {
      for (std::size_t i = 0; i < n; ++i) {
        const double d = delta[i];
        if (d < 0.0 && u[i] + d <= params.alpha) step = std::min(step, 0.9 * (u[i] - params.alpha) / -d);
        if (d > 0.0 && u[i] + d >= params.beta) step = std::min(step, 0.9 * (params.beta - u[i]) / d);
      }
    }
    std::vector<double> trial(u);
    std::vector<double> rtrial;
    double tnorm = 0.0;
    for (int ls = 0; ls < 30; ++ls) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + step * delta[i];
      tnorm = residual(trial, rtrial);
      if (tnorm < rnorm || step < 1e-4) break;
      step *= 0.5;
    }
    u.swap(trial);
    r.swap(rtrial);
    rnorm = tnorm;
  }
  if (rnorm > tol) {
    throw ConvergenceError("solve_profile: Newton did not converge", it, rnorm);
  }
  sol.newton_iterations = it;
  sol.residual = rnorm;
  sol.du_values = uniform_derivative(u, h);
  sol.s_constant = surface_tension_constant(sol, params);
  return sol;
}

double surface_tension_constant(const ProfileSolution& profile, const ModelParams& params) {
  std::vector<double> sq(profile.du_values.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = profile.du_values[i] * profile.du_values[i];
  return trapezoid(sq, profile.spacing()) / (params.u_b - params.u_a);
}

std::vector<double> solve_correction_bvp(const ProfileSolution& profile,
                                         const ModelParams& params,
                                         std::span<const double> rhs) {
  const std::size_t n = profile.u_values.size();
  if (rhs.size() != n) throw InvalidParamsError("correction rhs size mismatch");
  if (n < 5) throw InvalidParamsError("profile too coarse for the correction problem");
  const double h = profile.spacing();
  const double w = h * h / 12.0;

  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = potential_second_derivative(params, profile.u_values[i]);
  const auto& phi = profile.du_values;

  // Numerov form of u'' = q u - rhs - lambda * phi, mirrored ghosts at the
  // ends (zero slope), last row: trapezoid-weighted orthogonality to phi.
  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> entries;
  entries.reserve(6 * n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n + 1));
  const auto lam = static_cast<int>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int row = static_cast<int>(i);
    std::size_t left = i == 0 ? 1 : i - 1;
    std::size_t right = i + 1 == n ? n - 2 : i + 1;
    // -(u_l - 2u_i + u_r) + w (g_l + 10 g_i + g_r) = 0, g = q u - rhs - lambda phi
    entries.emplace_back(row, row, 2.0 + 10.0 * w * q[i]);
    entries.emplace_back(row, static_cast<int>(left), -1.0 + w * q[left]);
    entries.emplace_back(row, static_cast<int>(right), -1.0 + w * q[right]);
    entries.emplace_back(row, lam, -w * (phi[left] + 10.0 * phi[i] + phi[right]));
    b[row] = w * (rhs[left] + 10.0 * rhs[i] + rhs[right]);
    const double tw = (i == 0 || i + 1 == n) ? 0.5 * h : h;
    entries.emplace_back(lam, row, tw * phi[i]);
  }
  Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(n + 1));
  a.setFromTriplets(entries.begin(), entries.end());
  a.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  double norm1 = 0.0;
  for (int k = 0; k < a.outerSize(); ++k) {
    double col = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) col += std::abs(it.value());
    norm1 = std::max(norm1, col);
  }
  if (lu.info() != Eigen::Success) {
    throw SingularSystemError("correction problem: factorisation failed", std::numeric_limits<double>::infinity());
  }
  Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    throw SingularSystemError("correction problem: solve failed", std::numeric_limits<double>::infinity());
  }
  const double bnorm = b.lpNorm<Eigen::Infinity>();
  if (bnorm > 0.0) {
    const double growth = norm1 * x.lpNorm<Eigen::Infinity>() / bnorm;
    if (growth > 1e13) throw SingularSystemError("correction problem: numerically singular", growth);
  }
  return {x.data(), x.data() + n};
}

double correction_functional(const ProfileSolution& profile, const ModelParams& params,
                             std::span<const double> correction) {
  const std::size_t n = profile.u_values.size();
  const double h = profile.spacing();
  const auto dcorr = uniform_derivative(correction, h);
  std::vector<double> integrand(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double du0 = profile.du_values[i];
    const double dfp = potential_third_derivative(params, profile.u_values[i]) * du0;
    integrand[i] = dcorr[i] * du0 - 0.5 * correction[i] * correction[i] * dfp;
  }
  return trapezoid(integrand, h) / (params.u_b - params.u_a);
}

double correction_constant(const ProfileSolution& profile, const ModelParams& params) {
  std::vector<double> rhs(profile.u_values.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = profile.s_constant - profile.du_values[i];
  const auto corr = solve_correction_bvp(profile, params, rhs);
  return correction_functional(profile, params, corr);
}

}  // namespace eschlab
