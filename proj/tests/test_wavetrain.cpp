#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <memory>

#include "latwave/wavetrain.hpp"

using namespace latwave;

namespace {

std::shared_ptr<const PotentialModel> model_of(const std::string& name) {
  return std::make_shared<const PotentialModel>(registry(name));
}

}  // namespace

TEST_CASE("amplitude to constraint level") {
  auto lin = model_of("linear:1");
  CHECK(amplitude_to_gamma(*lin, 0.0, 0.0) == 0.0);
  const double alpha = 1.3;
  CHECK(amplitude_to_gamma(*lin, 0.0, alpha) ==
        Catch::Approx(alpha * alpha / 4.0).margin(1e-13));
  auto ex1 = model_of("ex1");
  const double g5 = amplitude_to_gamma(*ex1, 0.0, 5.0);
  CHECK(g5 >= 3.125);
  CHECK(g5 <= 6.25);
  CHECK(amplitude_to_gamma(*ex1, 0.0, 5.0) > amplitude_to_gamma(*ex1, 0.0, 4.0));
  CHECK_THROWS_AS(amplitude_to_gamma(*ex1, 0.0, -1.0), InvalidParams);
}

TEST_CASE("harmonic closed form and branch bookkeeping") {
  WavetrainSolution sol = harmonic_solution(1.0, pi / 2, 0.0, 1.0);
  CHECK(sol.omega == Catch::Approx(1.0));
  CHECK(sol.sigma == Catch::Approx(2.0 / pi));
  CHECK(sol.branch == Branch::low);
  CHECK(sol.residual <= 1e-12);

  // both k and pi - k carry the same frequency sin(k)/c
  WavetrainSolution lo = harmonic_solution(2.0, pi / 3, 0.5, 1.0);
  WavetrainSolution hi = harmonic_solution(2.0, pi - pi / 3, 0.5, 1.0);
  CHECK(lo.omega == Catch::Approx(std::sin(pi / 3) / 2.0).margin(1e-14));
  CHECK(hi.omega == Catch::Approx(lo.omega).margin(1e-14));
  CHECK(hi.branch == Branch::high);
  CHECK(hi.kappa == Catch::Approx(pi / 3));
  CHECK(lo.v == Catch::Approx(2.0 * 0.5));  // v = psi'(q) = c q

  WavetrainSolution still = harmonic_solution(1.0, pi / 4, 0.0, 0.0);
  CHECK(max_abs(still.V) == 0.0);
}

TEST_CASE("solve_wavetrain on the linear model reproduces the dispersion relation") {
  auto lin = model_of("linear:1");

  // on-grid wave number: the discrete operator carries the exact eigenvalue
  const double k_on = 33 * two_pi / 200;
  WavetrainSolution sol = solve_wavetrain(lin, k_on, 0.0, {}, 1.0);
  CHECK(sol.converged);
  CHECK(sol.omega == Catch::Approx(std::sin(k_on)).margin(1e-10));
  Profile expect = make_profile(sol.V.grid, [](double phi) { return std::cos(phi); });
  subtract_mean(expect);
  for (int i = 0; i < sol.V.size(); ++i)
    CHECK(sol.V[i] == Catch::Approx(expect[i]).margin(1e-9));
  CHECK(sol.primal_residual <= 1e-4);

  // off-grid wave number: interpolation perturbs the eigenvalue at O(spacing^2)
  WavetrainSolution off = solve_wavetrain(lin, pi / 3, 0.0, {}, 1.0);
  CHECK(off.converged);
  CHECK(off.omega == Catch::Approx(std::sin(pi / 3)).margin(2e-4));
}

TEST_CASE("degenerate wave numbers are rejected") {
  auto lin = model_of("linear:1");
  CHECK_THROWS_AS(solve_wavetrain(lin, 0.0, 0.0, {}, 1.0), DegenerateWaveNumber);
  CHECK_THROWS_AS(solve_wavetrain(lin, pi, 0.0, {}, 1.0), DegenerateWaveNumber);
  CHECK_THROWS_AS(solve_wavetrain(lin, pi / 4, 0.0, {}, {}), InvalidParams);
  CHECK_THROWS_AS(solve_wavetrain(lin, pi / 4, 0.0, 0.25, 1.0), InvalidParams);
}

TEST_CASE("assembled solution satisfies the defining identities") {
  auto ex1 = model_of("ex1");
  WavetrainSolution sol = solve_wavetrain(ex1, pi / 4, 0.0, {}, 5.0);
  REQUIRE(sol.converged);
  CHECK(sol.omega == Catch::Approx(sol.kappa * sol.sigma));
  CHECK(sol.omega > 0.0);
  CHECK(sol.sigma > 0.0);
  CHECK(std::abs(mean(sol.V)) <= 1e-10 * (1.0 + max_abs(sol.V)));
  CHECK(sol.v == Catch::Approx(sol.eta + sol.psi_prime_at_q));

  // V = psi_q'(Q) - eta pointwise
  for (int i = 0; i < sol.Q.size(); ++i)
    CHECK(sol.V[i] ==
          Catch::Approx(ex1->psi_q_prime(0.0, sol.Q[i]) - sol.eta).margin(1e-12));

  // dual round trip: flux(v + V) - mean(flux(v + V)) = Q
  Profile round = sol.U;
  for (double& x : round.values) x = ex1->flux(x);
  const double q_mean = mean(round);
  CHECK(q_mean == Catch::Approx(sol.q).margin(1e-8));
  for (int i = 0; i < round.size(); ++i)
    CHECK(round[i] - q_mean == Catch::Approx(sol.Q[i]).margin(1e-8 * (1 + max_abs(sol.Q))));

  // primal equation cross-check at the discretization scale
  CHECK(sol.primal_residual <= 1e-3);
  CHECK(sol.cone_dist <= 1e-6);
}

TEST_CASE("carrier oscillation is antiperiodic at the quarter wave number") {
  // V(phi + pi) = -V(phi) holds for every convex model at k = pi/2,
  // including the asymmetric one
  auto ex2 = model_of("ex2");
  WavetrainSolution sol = solve_wavetrain(ex2, pi / 2, 0.0, {}, 3.0);
  REQUIRE(sol.converged);
  Profile shifted = shift_pi(sol.V);
  double defect = 0.0;
  for (int i = 0; i < sol.V.size(); ++i)
    defect = std::max(defect, std::abs(sol.V[i] + shifted[i]));
  CHECK(defect <= 1e-6 * max_abs(sol.V));

  // the dual profile itself is NOT antiperiodic for an asymmetric model
  Profile q_shift = shift_pi(sol.Q);
  double q_defect = 0.0;
  for (int i = 0; i < sol.Q.size(); ++i)
    q_defect = std::max(q_defect, std::abs(sol.Q[i] + q_shift[i]));
  CHECK(q_defect > 1e-3 * max_abs(sol.Q));
}

TEST_CASE("snap-k rounds the wave number onto the grid") {
  auto lin = model_of("linear:1");
  WavetrainNumerics num;
  num.snap_k = true;
  WavetrainSolution sol = solve_wavetrain(lin, 0.786, 0.0, {}, 1.0, num);
  CHECK(sol.k == Catch::Approx(25 * two_pi / 200));
}

TEST_CASE("planar ODE oracle: harmonic circle") {
  auto lin = model_of("linear:1");  // flux is the identity, so the orbit is a circle
  PlanarOdeResult ode = planar_ode_wavetrain(*lin, 0.0, 0.75);
  CHECK(ode.period == Catch::Approx(two_pi).margin(1e-9));
  CHECK(ode.omega == Catch::Approx(1.0).margin(1e-9));
  CHECK(ode.energy_drift <= 1e-10);
  Profile expect = make_profile(ode.v_profile.grid,
                                [](double phi) { return 0.75 * std::cos(phi); });
  for (int i = 0; i < expect.size(); ++i)
    CHECK(ode.v_profile[i] == Catch::Approx(expect[i]).margin(1e-8));
}

TEST_CASE("planar ODE oracle input validation") {
  auto lin = model_of("linear:1");
  CHECK_THROWS_AS(planar_ode_wavetrain(*lin, 0.0, -1.0), InvalidParams);
}

TEST_CASE("fourth-order periodic derivative") {
  PeriodicGrid g(64);
  Profile p = make_profile(g, [](double phi) { return std::sin(2 * phi); });
  Profile d = periodic_derivative4(p);
  for (int i = 0; i < g.size; ++i)
    CHECK(d[i] == Catch::Approx(2 * std::cos(2 * g.node(i))).margin(1e-4));
}
