#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "latwave/errors.hpp"
#include "latwave/flow.hpp"
#include "latwave/grid.hpp"
#include "latwave/potentials.hpp"

namespace latwave {

/// A fully assembled periodic travelling-wave solution of the lattice.
///
/// The dual profile Q solves the normalized branch equation; V is the
/// mean-zero carrier oscillation, U = v + V the carrier profile, and
/// u_j(t) = U(k j - omega t) solves the lattice equation.
struct WavetrainSolution {
  std::string model_name;
  double k = 0.0;      // wave number in (0, pi), after optional snapping
  double kappa = 0.0;  // normalized wave number in (0, pi/2]
  Branch branch = Branch::low;
  double q = 0.0;
  double gamma = 0.0;
  std::optional<double> alpha;  // initial amplitude when used

  double sigma = 0.0;  // phase speed
  double omega = 0.0;  // frequency, omega = kappa * sigma
  double eta = 0.0;    // multiplier, mean of psi_q'(Q)
  double v = 0.0;      // carrier mean, v = eta + psi'(q)

  Profile Q, V, U;

  double f_value = 0.0;          // final objective value
  double w_value = 0.0;          // final constraint value (= gamma at convergence)
  double residual = 0.0;         // dual-equation stationarity defect
  double primal_residual = 0.0;  // cross-check of omega V' = nabla_k phi'(v+V)
  double cone_dist = 0.0;
  long iterations = 0;
  bool converged = false;
  double psi_prime_at_q = 0.0;  // records the psi'(0) = 0 normalization reference
};

/// Numerical knobs for solve_wavetrain.
struct WavetrainNumerics {
  int grid_size = 200;
  double tau = 0.1;
  double tol = 1e-8;
  long max_iters = 500000;
  bool single_newton = false;
  bool snap_k = false;  // round k to the nearest grid multiple
};

/// Fourth-order central difference derivative of a periodic profile.
inline Profile periodic_derivative4(const Profile& p) {
  const int m = p.size();
  const double h = p.grid.spacing();
  Profile out = zero_profile(p.grid);
  for (int i = 0; i < m; ++i) {
    const double m2 = p[(i - 2 + m) % m], m1 = p[(i - 1 + m) % m];
    const double p1 = p[(i + 1) % m], p2 = p[(i + 2) % m];
    out[i] = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
  }
  return out;
}

/// Constraint level reached by the cosine data of amplitude alpha:
/// gamma = mean psi_q(alpha cos), strictly increasing in alpha >= 0.
inline double amplitude_to_gamma(const PotentialModel& model, double q, double alpha,
                                 int grid_size = 200) {
  if (!(alpha >= 0.0)) throw InvalidParams("amplitude must be nonnegative");
  PeriodicGrid grid(grid_size);
  double s = 0.0;
  for (int i = 0; i < grid.size; ++i) s += model.psi_q(q, alpha * std::cos(grid.node(i)));
  return s / grid.size;
}

namespace detail {

inline std::pair<double, Branch> split_branch(double k) {
  if (k <= pi / 2) return {k, Branch::low};
  return {pi - k, Branch::high};
}

inline WavetrainSolution assemble_solution(std::shared_ptr<const PotentialModel> model,
                                           double k, double q, const FlowState& st,
                                           std::optional<double> alpha) {
  const auto [kappa, branch] = split_branch(k);
  WavetrainSolution sol;
  sol.model_name = model->name();
  sol.k = k;
  sol.kappa = kappa;
  sol.branch = branch;
  sol.q = q;
  sol.gamma = st.gamma;
  sol.alpha = alpha;
  sol.sigma = st.sigma;
  sol.omega = kappa * st.sigma;
  sol.eta = st.eta;
  sol.psi_prime_at_q = model->psi1(q);
  sol.v = st.eta + sol.psi_prime_at_q;
  sol.iterations = st.iter;
  sol.converged = st.converged;
  sol.residual = st.residual;
  sol.f_value = st.f_value;
  sol.w_value = st.w_value;

  // phase normalization: profiles are defined up to shifts; move the maximum to phi = 0
  const int m = st.q_profile.size();
  int imax = 0;
  for (int i = 1; i < m; ++i)
    if (st.q_profile[i] > st.q_profile[imax]) imax = i;
  sol.Q = rotate(st.q_profile, imax - m / 2);

  sol.V = sol.Q;
  for (double& x : sol.V.values) x = model->psi_q_prime(q, x) - st.eta;
  sol.U = sol.V;
  for (double& x : sol.U.values) x += sol.v;

  sol.cone_dist = cone_distance(sol.Q);

  // primal-side cross-check: omega dV/dphi against nabla_k phi'(v + V),
  // with phi' evaluated through the actual Legendre inversion
  Profile flux_prof = sol.U;
  std::optional<double> guess;
  for (double& x : flux_prof.values) {
    x = model->flux(x, guess);
    guess = x;
  }
  Profile lhs = periodic_derivative4(sol.V);
  for (double& x : lhs.values) x *= sol.omega;
  Profile rhs = centered_difference(flux_prof, k);
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    const double d = lhs[i] - rhs[i];
    acc += d * d;
  }
  sol.primal_residual = std::sqrt(acc / m) / std::max(norm2(rhs), 1e-300);
  return sol;
}

}  // namespace detail

/// Solve for a wavetrain at wave number k in (0, pi): select the branch,
/// run the constrained gradient flow, and assemble the full solution.
///
/// Exactly one of gamma / alpha must be given. With allow_unconverged the
/// best state is assembled (converged = false) instead of throwing.
inline WavetrainSolution solve_wavetrain(std::shared_ptr<const PotentialModel> model,
                                         double k, double q,
                                         std::optional<double> gamma,
                                         std::optional<double> alpha,
                                         const WavetrainNumerics& numerics = {},
                                         bool allow_unconverged = false,
                                         const FlowObserver& observer = {}) {
  if (!model) throw InvalidParams("wavetrain needs a potential model");
  if (!(k > 0.0) || !(k < pi))
    throw DegenerateWaveNumber(
        "wave number must lie strictly inside (0, pi); k = 0 gives constants and "
        "k = pi binary oscillations");
  if (gamma.has_value() == alpha.has_value())
    throw InvalidParams("give exactly one of gamma or alpha");
  if (numerics.snap_k) k = snap_to_grid(k, PeriodicGrid(numerics.grid_size));

  const auto [kappa, branch] = detail::split_branch(k);
  FlowParams params;
  params.model = model;
  params.q = q;
  params.kappa = kappa;
  params.branch = branch;
  params.gamma = gamma;
  params.alpha = alpha;
  params.grid_size = numerics.grid_size;
  params.tau = numerics.tau;
  params.tol = numerics.tol;
  params.max_iters = numerics.max_iters;
  params.single_newton = numerics.single_newton;

  try {
    FlowState st = solve_flow(params, observer);
    return detail::assemble_solution(model, k, q, st, alpha);
  } catch (const NotConverged& e) {
    if (!allow_unconverged) throw;
    return detail::assemble_solution(model, k, q, e.state, alpha);
  }
}

/// Closed-form harmonic wavetrain for the linear model psi'' = c: the dual
/// profile is alpha cos, the dispersion relation gives omega = sin(k)/c, and
/// sigma = omega / kappa on either branch.
inline WavetrainSolution harmonic_solution(double c, double k, double q, double alpha,
                                           int grid_size = 200) {
  if (!(k > 0.0) || !(k < pi)) throw DegenerateWaveNumber("k must lie in (0, pi)");
  auto model = std::make_shared<const PotentialModel>(builtin::linear(c));
  const auto [kappa, branch] = detail::split_branch(k);
  PeriodicGrid grid(grid_size);
  FlowState st;
  st.q_profile = make_profile(grid, [alpha](double phi) { return alpha * std::cos(phi); });
  subtract_mean(st.q_profile);
  st.gamma = 0.25 * c * alpha * alpha;
  st.sigma = std::sin(k) / (c * kappa);
  st.eta = 0.0;
  st.w_value = st.gamma;
  st.f_value = functional_f(st.q_profile, kappa, branch);
  st.residual = alpha == 0.0
                    ? 0.0
                    : residual_of(st.q_profile, st.sigma, st.eta, *model, q, kappa, branch);
  st.converged = true;
  return detail::assemble_solution(model, k, q, st, alpha);
}

/// Result of the planar-ODE construction of quarter-period wavetrains (k = pi/2).
struct PlanarOdeResult {
  Profile v_profile;         // carrier oscillation V on the grid, maximum at phi = 0
  double omega = 0.0;        // frequency recovered from the orbit period
  double period = 0.0;       // period of the unscaled planar orbit
  double energy_drift = 0.0; // relative drift of the conserved quantity
};

/// Numerical knobs for the planar ODE oracle.
struct PlanarOdeNumerics {
  int grid_size = 200;
  double scan_dt = 0.002;
  int substeps_per_node = 32;
  double max_time = 500.0;
};

/// Integrate the planar Hamiltonian system equivalent to the k = pi/2
/// wavetrain equation:
///   V' = g(W),  W' = -g(V),  g(x) = (phi'(v+x) - phi'(v-x)) / 2,
/// starting from (V0, 0). The closed orbit's period T gives omega = 2 pi / T,
/// and the profile is the orbit resampled onto the 2 pi cell.
inline PlanarOdeResult planar_ode_wavetrain(const PotentialModel& model, double v,
                                            double v0,
                                            const PlanarOdeNumerics& numerics = {}) {
  if (!(v0 > 0.0)) throw InvalidParams("planar oracle needs a positive amplitude");
  std::optional<double> guess_p, guess_m;
  auto g = [&](double x) {
    const double a = model.flux(v + x, guess_p);
    guess_p = a;
    const double b = model.flux(v - x, guess_m);
    guess_m = b;
    return 0.5 * (a - b);
  };
  using State = std::array<double, 2>;
  auto deriv = [&](const State& y) { return State{g(y[1]), -g(y[0])}; };
  auto rk4 = [&](State y, double h) {
    const State k1 = deriv(y);
    const State k2 = deriv({y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
    const State k3 = deriv({y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
    const State k4 = deriv({y[0] + h * k3[0], y[1] + h * k3[1]});
    return State{y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                 y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
  };

  // scan for the first return: the orbit runs clockwise from (V0, 0), so the
  // closing crossing has W passing downward through zero with V > 0
  const double h = numerics.scan_dt;
  State y{v0, 0.0};
  State prev = y;
  double t = 0.0;
  double period = -1.0;
  while (t < numerics.max_time) {
    State next = rk4(y, h);
    t += h;
    if (t > 2.0 * h && prev[1] > 0.0 && next[1] <= 0.0 && next[0] > 0.0) {
      double ta = t - h, tb = t;
      State ya = prev;
      for (int it = 0; it < 80 && (tb - ta) > 1e-14; ++it) {
        const double tm = 0.5 * (ta + tb);
        State ym = ya;
        const int nss = 4;
        const double hh = (tm - ta) / nss;
        for (int s = 0; s < nss; ++s) ym = rk4(ym, hh);
        if (ym[1] > 0.0) {
          ta = tm;
          ya = ym;
        } else {
          tb = tm;
        }
      }
      period = 0.5 * (ta + tb);
      break;
    }
    prev = y = next;
  }
  if (period <= 0.0)
    throw NoClosedOrbit("planar orbit did not close within the time budget (is the "
                        "symmetrized potential convex?)");

  PlanarOdeResult out;
  out.period = period;
  out.omega = two_pi / period;

  // resample one full revolution so node j holds V(j * period / M)
  const int m = numerics.grid_size;
  PeriodicGrid grid(m);
  std::vector<double> vals(m);
  vals[0] = v0;
  const int sub = numerics.substeps_per_node;
  const double hh = period / (static_cast<double>(m) * sub);
  State yy{v0, 0.0};
  auto phi_sym = [&](double x) {
    return 0.5 * (model.flux_potential(v + x) + model.flux_potential(v - x));
  };
  const double e0 = phi_sym(v0) + phi_sym(0.0);
  for (int j = 1; j <= m; ++j) {
    for (int s = 0; s < sub; ++s) yy = rk4(yy, hh);
    if (j < m) vals[j] = yy[0];
  }
  const double e1 = phi_sym(yy[0]) + phi_sym(yy[1]);
  out.energy_drift = std::abs(e1 - e0) / std::max(std::abs(e0), 1e-300);

  // node phi_i = -pi + 2 pi i / M sits at arc position ((i + M/2) mod M) / M
  Profile prof = zero_profile(grid);
  for (int i = 0; i < m; ++i) prof[i] = vals[(i + m / 2) % m];
  out.v_profile = std::move(prof);
  return out;
}

}  // namespace latwave
