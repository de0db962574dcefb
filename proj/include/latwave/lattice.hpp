#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "latwave/errors.hpp"
#include "latwave/grid.hpp"
#include "latwave/potentials.hpp"
#include "latwave/wavetrain.hpp"

namespace latwave {

/// Two consecutive time slices of the lattice 2 du_j/dt + phi'(u_{j+1}) - phi'(u_{j-1}) = 0
/// on a periodic ring of J sites, advanced by the two-step leapfrog scheme.
struct LatticeState {
  std::shared_ptr<const PotentialModel> model;
  std::vector<double> u_prev, u_curr;  // slices at t - h and t
  double t = 0.0;
  double h = 0.0;
  long step_index = 0;  // number of leapfrog steps taken since bootstrap

  int sites() const { return static_cast<int>(u_curr.size()); }
};

struct LatticeDiag {
  long step;
  double t, tau;
  double sum_even_slice, sum_odd_slice;  // site sums of the even/odd time slices
  double hamiltonian;                    // sum of phi(u_j) over the current slice
  double total_variation;
  double oscillation;  // mean squared second difference
};

struct LatticeSnapshot {
  long step;
  double t, tau;
  std::vector<double> u;
};

/// Thrown when a slice exceeds the blow-up threshold. Carries the last good
/// slice; run_lattice attaches whatever snapshots and diagnostics it had
/// already collected before rethrowing.
class BlowUp : public Error {
 public:
  BlowUp(std::string what, std::vector<double> last, double time)
      : Error(std::move(what)), last_u(std::move(last)), t(time) {}
  std::vector<double> last_u;
  double t;
  std::vector<LatticeSnapshot> snapshots;
  std::vector<LatticeDiag> series;
};

namespace detail {

// Flux of a whole slice with per-site warm starts (dual models invert psi').
class SliceFlux {
 public:
  explicit SliceFlux(const PotentialModel& model) : model_(model) {}

  void eval(const std::vector<double>& u, std::vector<double>& out) {
    out.resize(u.size());
    if (guesses_.size() != u.size()) guesses_.assign(u.size(), std::optional<double>{});
    for (std::size_t j = 0; j < u.size(); ++j) {
      out[j] = model_.flux(u[j], guesses_[j]);
      guesses_[j] = out[j];
    }
  }

 private:
  const PotentialModel& model_;
  std::vector<std::optional<double>> guesses_;
};

}  // namespace detail

/// Right-hand side du_j/dt = -(phi'(u_{j+1}) - phi'(u_{j-1})) / 2 with periodic indexing.
inline std::vector<double> lattice_rhs(const PotentialModel& model,
                                       const std::vector<double>& u) {
  const int j_count = static_cast<int>(u.size());
  if (j_count < 3) throw InvalidParams("lattice needs at least 3 sites");
  std::vector<double> flux(u.size()), out(u.size());
  std::optional<double> guess;
  for (std::size_t j = 0; j < u.size(); ++j) {
    flux[j] = model.flux(u[j], guess);
    guess = flux[j];
  }
  for (int j = 0; j < j_count; ++j)
    out[j] = -0.5 * (flux[(j + 1) % j_count] - flux[(j - 1 + j_count) % j_count]);
  return out;
}

/// Build the second slice with one classical RK4 step, so the startup error
/// O(h^5) stays below the second-order leapfrog error.
inline LatticeState bootstrap(std::shared_ptr<const PotentialModel> model,
                              std::vector<double> u0, double h) {
  LatticeState st;
  st.model = std::move(model);
  st.h = h;
  st.t = h;
  const auto& m = *st.model;
  if (h == 0.0) {
    st.u_prev = u0;
    st.u_curr = std::move(u0);
    st.t = 0.0;
    return st;
  }
  const std::size_t n = u0.size();
  auto axpy = [&](const std::vector<double>& base, double a,
                  const std::vector<double>& d) {
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = base[j] + a * d[j];
    return out;
  };
  std::vector<double> k1 = lattice_rhs(m, u0);
  std::vector<double> k2 = lattice_rhs(m, axpy(u0, 0.5 * h, k1));
  std::vector<double> k3 = lattice_rhs(m, axpy(u0, 0.5 * h, k2));
  std::vector<double> k4 = lattice_rhs(m, axpy(u0, h, k3));
  std::vector<double> u1(n);
  for (std::size_t j = 0; j < n; ++j)
    u1[j] = u0[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  st.u_prev = std::move(u0);
  st.u_curr = std::move(u1);
  return st;
}

/// One leapfrog step u_next = u_prev - h (phi'(u_{j+1}) - phi'(u_{j-1})); the
/// slices rotate and t advances by h.
inline void leapfrog_step(LatticeState& state, detail::SliceFlux* flux_cache = nullptr,
                          std::vector<double>* scratch = nullptr) {
  const int j_count = state.sites();
  std::vector<double> local_flux;
  std::vector<double>& flux = scratch ? *scratch : local_flux;
  if (flux_cache) {
    flux_cache->eval(state.u_curr, flux);
  } else {
    flux.resize(state.u_curr.size());
    std::optional<double> guess;
    for (int j = 0; j < j_count; ++j) {
      flux[j] = state.model->flux(state.u_curr[j], guess);
      guess = flux[j];
    }
  }
  std::vector<double> next(state.u_curr.size());
  const double h = state.h;
  for (int j = 0; j < j_count; ++j) {
    next[j] = state.u_prev[j] -
              h * (flux[(j + 1) % j_count] - flux[(j - 1 + j_count) % j_count]);
  }
  for (double x : next) {
    if (!(std::abs(x) <= 1e6))
      throw BlowUp("lattice value exceeded 1e6 at t = " + std::to_string(state.t),
                   state.u_curr, state.t);
  }
  state.u_prev = std::move(state.u_curr);
  state.u_curr = std::move(next);
  state.t += h;
  ++state.step_index;
}

struct LatticeRun {
  std::vector<LatticeSnapshot> snapshots;
  std::vector<LatticeDiag> series;
  double cfl_max = 0.0;  // max over sampled slices of h * |phi''(u)|
  std::vector<std::string> warnings;
  LatticeState final_state;
};

struct LatticeRunParams {
  long steps = 0;
  long snapshot_every = 0;  // 0: record only the initial and final slices
  long diag_every = 100;
  double cfl_cap = 0.2;
  std::vector<long> snapshot_steps;  // extra explicit snapshot indices
};

namespace detail {

inline LatticeDiag diagnose(const LatticeState& st, double eps) {
  LatticeDiag d;
  d.step = st.step_index;
  d.t = st.t;
  d.tau = eps * st.t;
  const auto& cur = st.u_curr;
  const auto& prv = st.u_prev;
  const int j_count = st.sites();
  double sc = 0.0, sp = 0.0, ham = 0.0, tv = 0.0, osc = 0.0;
  for (int j = 0; j < j_count; ++j) {
    sc += cur[j];
    sp += prv[j];
    ham += st.model->flux_potential(cur[j]);
    tv += std::abs(cur[(j + 1) % j_count] - cur[j]);
    const double dd = cur[(j + 1) % j_count] - 2.0 * cur[j] + cur[(j - 1 + j_count) % j_count];
    osc += dd * dd;
  }
  // the time-slice parity of u_curr alternates with the step index
  const bool curr_is_even = (st.step_index % 2 == 0);
  d.sum_even_slice = curr_is_even ? sc : sp;
  d.sum_odd_slice = curr_is_even ? sp : sc;
  d.hamiltonian = ham;
  d.total_variation = tv;
  d.oscillation = osc / j_count;
  return d;
}

inline double cfl_of(const LatticeState& st) {
  double worst = 0.0;
  for (double u : st.u_curr) worst = std::max(worst, std::abs(st.model->flux_second(u)));
  return st.h * worst;
}

}  // namespace detail

/// Evolve the lattice, collecting snapshots and a diagnostics time series.
/// The macroscopic time is tau = eps * t with eps = 1 / J.
///
/// A blow-up rethrows BlowUp after attaching the partial run record to the
/// exception message context; the last good slice travels with the exception.
inline LatticeRun run_lattice(LatticeState state, const LatticeRunParams& params) {
  LatticeRun run;
  const double eps = 1.0 / state.sites();
  const double cfl0 = detail::cfl_of(state);
  run.cfl_max = cfl0;
  if (cfl0 > params.cfl_cap)
    run.warnings.push_back("step size violates the stability heuristic: h*max|phi''| = " +
                           std::to_string(cfl0) + " > " + std::to_string(params.cfl_cap));

  auto want_snapshot = [&](long s) {
    if (params.snapshot_every > 0 && s % params.snapshot_every == 0) return true;
    for (long w : params.snapshot_steps)
      if (w == s) return true;
    return false;
  };
  auto record = [&](bool snap) {
    if (snap)
      run.snapshots.push_back({state.step_index, state.t, eps * state.t, state.u_curr});
    run.series.push_back(detail::diagnose(state, eps));
  };

  record(true);  // initial slice
  detail::SliceFlux cache(*state.model);
  std::vector<double> scratch;
  for (long s = 1; s <= params.steps; ++s) {
    try {
      leapfrog_step(state, &cache, &scratch);
    } catch (BlowUp& e) {
      e.snapshots = std::move(run.snapshots);
      e.series = std::move(run.series);
      throw;
    }
    const bool snap = want_snapshot(s) || s == params.steps;
    const bool diag = params.diag_every > 0 && s % params.diag_every == 0;
    if (snap || diag || s == params.steps) record(snap);
    if (snap) run.cfl_max = std::max(run.cfl_max, detail::cfl_of(state));
  }
  run.final_state = std::move(state);
  return run;
}

/// Long-wave initial data u_j = f(j / N) for a smooth 1-periodic macroscopic profile.
inline std::vector<double> longwave_ic(int n_sites, const std::function<double(double)>& f) {
  if (n_sites < 16) throw InvalidParams("long-wave data needs at least 16 sites");
  std::vector<double> u(n_sites);
  for (int j = 0; j < n_sites; ++j) u[j] = f(static_cast<double>(j) / n_sites);
  return u;
}

/// Seed a lattice ring of J sites with the carrier profile: u_j = U(k j mod 2 pi).
///
/// The wave number must satisfy k = 2 pi p / J so that the data is J-periodic;
/// in strict mode a mismatch throws IncommensurateK. The profile is evaluated
/// through its trigonometric interpolant (exact at profile nodes).
inline std::vector<double> wavetrain_ic(const WavetrainSolution& sol, int j_count, int p,
                                        bool strict = true) {
  const double k_comm = two_pi * p / j_count;
  if (std::abs(k_comm - sol.k) > 1e-9) {
    if (strict)
      throw IncommensurateK("k = " + std::to_string(sol.k) + " is not 2*pi*" +
                            std::to_string(p) + "/" + std::to_string(j_count));
  }
  TrigInterpolant u_interp(sol.U);
  std::vector<double> u(j_count);
  for (int j = 0; j < j_count; ++j) {
    double phase = std::fmod(sol.k * j, two_pi);
    if (phase >= pi) phase -= two_pi;
    if (phase < -pi) phase += two_pi;
    u[j] = u_interp(phase);
  }
  return u;
}

/// Reference slice U(k j - omega t) for advection comparisons.
inline std::vector<double> wavetrain_reference(const WavetrainSolution& sol, int j_count,
                                               double t) {
  TrigInterpolant u_interp(sol.U);
  std::vector<double> u(j_count);
  for (int j = 0; j < j_count; ++j) {
    double phase = std::fmod(sol.k * j - sol.omega * t, two_pi);
    if (phase >= pi) phase -= two_pi;
    if (phase < -pi) phase += two_pi;
    u[j] = u_interp(phase);
  }
  return u;
}

/// Relative l2 distance between two slices.
inline double slice_rel_error(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    num += (a[j] - b[j]) * (a[j] - b[j]);
    den += b[j] * b[j];
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

}  // namespace latwave
