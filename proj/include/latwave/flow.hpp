#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "latwave/errors.hpp"
#include "latwave/grid.hpp"
#include "latwave/potentials.hpp"

namespace latwave {

/// Parameters of one constrained gradient-flow run.
struct FlowParams {
  std::shared_ptr<const PotentialModel> model;
  double q = 0.0;
  double kappa = 0.0;  // normalized wave number in (0, pi/2]
  Branch branch = Branch::low;
  std::optional<double> gamma;  // constraint level (> 0)
  std::optional<double> alpha;  // initial amplitude; determines gamma if set
  int grid_size = 200;
  double tau = 0.1;
  double tol = 1e-8;
  long max_iters = 500000;
  bool single_newton = false;  // one Newton step per renormalization
};

/// Current state of the flow iteration.
struct FlowState {
  Profile q_profile;  // mean-zero dual profile
  long iter = 0;
  double f_value = 0.0;   // objective (1/2) <Q, B Q>
  double w_value = 0.0;   // constraint functional mean psi_q(Q)
  double sigma = 0.0;     // dynamical multiplier, phase speed at stationarity
  double eta = 0.0;       // dynamical multiplier, mean of psi_q'(Q)
  double residual = 0.0;  // relative stationarity defect
  double gamma = 0.0;     // enforced constraint level
  bool converged = false;
};

/// Thrown when the iteration cap is reached; carries the best state seen.
class NotConverged : public Error {
 public:
  NotConverged(std::string what, FlowState best)
      : Error(std::move(what)), state(std::move(best)) {}
  FlowState state;
};

using FlowObserver = std::function<void(const FlowState&)>;

/// Objective functional (1/2) <Q, B Q> with the branch operator.
inline double functional_f(const Profile& q_profile, double kappa, Branch branch) {
  return 0.5 * inner(q_profile, branch_average(q_profile, kappa, branch));
}

/// Constraint functional: mean of psi_q over the profile samples.
inline double functional_w(const Profile& q_profile, const PotentialModel& model,
                           double q) {
  double s = 0.0;
  for (double v : q_profile.values) s += model.psi_q(q, v);
  return s / q_profile.size();
}

/// Multiplier eta(Q) = mean psi_q'(Q).
inline double eta_of(const Profile& q_profile, const PotentialModel& model, double q) {
  double s = 0.0;
  for (double v : q_profile.values) s += model.psi_q_prime(q, v);
  return s / q_profile.size();
}

/// Constraint gradient P(Q) = psi_q'(Q) - eta(Q); mean-zero by construction.
inline Profile p_of(const Profile& q_profile, const PotentialModel& model, double q) {
  Profile out = q_profile;
  for (double& v : out.values) v = model.psi_q_prime(q, v);
  const double eta = mean(out);
  for (double& v : out.values) v -= eta;
  return out;
}

namespace detail {

inline double sigma_from(const Profile& p, const Profile& bq, const Profile& q_prof) {
  const double np2 = inner(p, p);
  if (std::sqrt(np2) <= 1e-14 * (1.0 + norm2(q_prof)))
    throw ZeroProfile("constraint gradient vanishes; profile is (numerically) zero");
  return inner(p, bq) / np2;
}

}  // namespace detail

/// Multiplier sigma(Q) = <P(Q), B Q> / ||P(Q)||^2.
inline double sigma_of(const Profile& q_profile, const PotentialModel& model, double q,
                       double kappa, Branch branch) {
  Profile p = p_of(q_profile, model, q);
  Profile bq = branch_average(q_profile, kappa, branch);
  return detail::sigma_from(p, bq, q_profile);
}

/// Relative stationarity defect || sigma (psi_q'(Q) - eta) - B Q || / ||B Q||.
inline double residual_of(const Profile& q_profile, double sigma, double eta,
                          const PotentialModel& model, double q, double kappa,
                          Branch branch) {
  Profile bq = branch_average(q_profile, kappa, branch);
  double acc = 0.0;
  for (int i = 0; i < q_profile.size(); ++i) {
    const double d = sigma * (model.psi_q_prime(q, q_profile[i]) - eta) - bq[i];
    acc += d * d;
  }
  return std::sqrt(acc / q_profile.size()) / std::max(norm2(bq), 1e-300);
}

/// Rescale Q -> lambda Q so that the constraint functional equals gamma.
///
/// The first factor is the single Newton step
///   lambda = 1 - (W(Q) - gamma) / <psi_q'(Q), Q>;
/// unless single_newton is set, Newton is iterated until |W - gamma| <= 1e-10 gamma.
inline Profile renormalize(const Profile& q_profile, double gamma,
                           const PotentialModel& model, double q,
                           bool single_newton = false) {
  if (!(gamma > 0.0)) throw InvalidParams("renormalization needs gamma > 0");
  Profile out = q_profile;
  auto w_of = [&](double lam) {
    double s = 0.0;
    for (double v : q_profile.values) s += model.psi_q(q, lam * v);
    return s / q_profile.size();
  };
  auto slope_of = [&](double lam) {
    // d/dlambda W(lambda Q) = <psi_q'(lambda Q), Q>
    double s = 0.0;
    for (double v : q_profile.values) s += model.psi_q_prime(q, lam * v) * v;
    return s / q_profile.size();
  };
  double lam = 1.0;
  for (int it = 0; it < 64; ++it) {
    const double w = w_of(lam);
    if (it > 0 && std::abs(w - gamma) <= 1e-10 * gamma) break;
    const double slope = slope_of(lam);
    if (!(slope > 0.0)) {
      if (!model.nonuniform())
        throw DegenerateNewton("nonpositive constraint slope <psi_q'(Q), Q>");
      // degenerate curvature: fall back to bisection in lambda
      double lo = 0.0, hi = std::max(1.0, 2.0 * lam);
      while (w_of(hi) < gamma) hi *= 2.0;
      for (int b = 0; b < 200; ++b) {
        const double mid = 0.5 * (lo + hi);
        (w_of(mid) < gamma ? lo : hi) = mid;
      }
      lam = 0.5 * (lo + hi);
      break;
    }
    lam -= (w - gamma) / slope;
    if (!(lam > 0.0)) lam = 1e-8;
    if (single_newton && it == 0) break;
  }
  for (double& v : out.values) v *= lam;
  return out;
}

namespace detail {

/// Shared driver: owns the fused branch operator and the stepping logic.
class FlowDriver {
 public:
  FlowDriver(const FlowParams& params, PeriodicGrid grid)
      : params_(params),
        grid_(grid),
        op_(branch_operator(grid, params.kappa, params.branch)) {
    if (!params_.model) throw InvalidParams("flow needs a potential model");
    if (!params_.model->is_dual())
      throw UnsupportedSide("the gradient flow runs on dual-side models only");
  }

  Profile apply_op(const Profile& p) const {
    Profile out = op_.apply(p);
    subtract_mean(out);
    return out;
  }

  void refresh(FlowState& st, const Profile& bq) const {
    const PotentialModel& m = *params_.model;
    Profile p = p_of(st.q_profile, m, params_.q);
    st.eta = eta_of(st.q_profile, m, params_.q);
    st.sigma = sigma_from(p, bq, st.q_profile);
    st.w_value = functional_w(st.q_profile, m, params_.q);
    st.f_value = 0.5 * inner(st.q_profile, bq);
    double acc = 0.0;
    for (int i = 0; i < p.size(); ++i) {
      const double d = st.sigma * p[i] - bq[i];
      acc += d * d;
    }
    st.residual = std::sqrt(acc / p.size()) / std::max(norm2(bq), 1e-300);
  }

  // One accepted Euler step with monotonicity-guarded local step halving.
  // Returns the operator image of the new profile for reuse.
  Profile step(FlowState& st, const Profile& bq) const {
    const PotentialModel& m = *params_.model;
    Profile p = p_of(st.q_profile, m, params_.q);
    const double sigma = sigma_from(p, bq, st.q_profile);
    double tau_local = params_.tau;
    for (;;) {
      Profile next = st.q_profile;
      for (int i = 0; i < next.size(); ++i)
        next[i] = (1.0 - tau_local) * st.q_profile[i] + tau_local * bq[i] -
                  tau_local * sigma * p[i];
      subtract_mean(next);
      next = renormalize(next, st.gamma, m, params_.q, params_.single_newton);
      Profile bq_next = apply_op(next);
      const double f_next = 0.5 * inner(next, bq_next);
      if (f_next >= st.f_value - 1e-12) {
        st.q_profile = std::move(next);
        ++st.iter;
        return bq_next;
      }
      tau_local *= 0.5;
      if (tau_local < 1e-8)
        throw StalledFlow("objective kept decreasing; local step fell below 1e-8");
    }
  }

 private:
  const FlowParams& params_;
  PeriodicGrid grid_;
  CirculantOperator op_;
};

inline void validate(const FlowParams& params) {
  if (!params.model) throw InvalidParams("flow needs a potential model");
  if (!(params.kappa > 0.0) || !(params.kappa <= pi / 2 + 1e-15))
    throw KOutOfRange("kappa must lie in (0, pi/2]");
  if (!(params.tau > 0.0) || !(params.tau < 1.0))
    throw InvalidParams("flow step tau must lie in (0, 1)");
  if (params.gamma && !(*params.gamma > 0.0))
    throw InvalidParams("constraint level gamma must be positive");
  if (params.alpha && !(*params.alpha > 0.0))
    throw InvalidParams("initial amplitude alpha must be positive");
  if (!params.gamma && !params.alpha)
    throw InvalidParams("either gamma or alpha must be given");
}

}  // namespace detail

/// Initial amplitude from a constraint level: solves mean psi_q(alpha cos) = gamma
/// by bisection (the left side is strictly increasing in alpha).
inline double alpha_from_gamma(const PotentialModel& model, double q, double gamma,
                               PeriodicGrid grid) {
  if (!(gamma > 0.0)) throw InvalidParams("gamma must be positive");
  auto w_of = [&](double a) {
    double s = 0.0;
    for (int i = 0; i < grid.size; ++i) s += model.psi_q(q, a * std::cos(grid.node(i)));
    return s / grid.size;
  };
  double hi = 1.0;
  int guard = 0;
  while (w_of(hi) < gamma) {
    hi *= 2.0;
    if (++guard > 60) throw InvalidParams("gamma not reachable by cosine data");
  }
  double lo = 0.0;
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (w_of(mid) < gamma ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// One step of the explicit Euler map with renormalization and step rejection.
inline FlowState euler_step(const FlowState& state, const FlowParams& params) {
  detail::FlowDriver driver(params, state.q_profile.grid);
  FlowState st = state;
  if (params.tau == 0.0) return st;  // identity map
  Profile bq = driver.apply_op(st.q_profile);
  driver.refresh(st, bq);
  bq = driver.step(st, bq);
  driver.refresh(st, bq);
  return st;
}

/// Run the constrained gradient flow from the cosine initial profile until the
/// relative stationarity residual drops below params.tol.
///
/// The observer, when given, sees every iterate (including the initial one)
/// after its diagnostics are computed. Throws NotConverged (carrying the best
/// state) when the iteration cap is reached.
inline FlowState solve_flow(const FlowParams& params, const FlowObserver& observer = {}) {
  detail::validate(params);
  PeriodicGrid grid(params.grid_size);
  const PotentialModel& m = *params.model;

  double alpha = params.alpha ? *params.alpha
                              : alpha_from_gamma(m, params.q, *params.gamma, grid);
  Profile q0 = make_profile(grid, [alpha](double phi) { return alpha * std::cos(phi); });
  subtract_mean(q0);

  FlowState st;
  st.gamma = params.gamma ? *params.gamma : functional_w(q0, m, params.q);
  st.q_profile = params.gamma ? renormalize(q0, st.gamma, m, params.q) : std::move(q0);

  detail::FlowDriver driver(params, grid);
  Profile bq = driver.apply_op(st.q_profile);
  for (;;) {
    driver.refresh(st, bq);
    if (observer) observer(st);
    if (st.residual <= params.tol) {
      st.converged = true;
      return st;
    }
    if (st.iter >= params.max_iters)
      throw NotConverged("flow did not reach tol " + std::to_string(params.tol) +
                             " within " + std::to_string(params.max_iters) +
                             " iterations (residual " + std::to_string(st.residual) + ")",
                         st);
    bq = driver.step(st, bq);
  }
}

}  // namespace latwave
