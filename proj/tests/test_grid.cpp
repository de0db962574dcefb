#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "latwave/grid.hpp"

using namespace latwave;

namespace {

Profile cosine(PeriodicGrid g, double amplitude = 1.0, int mode = 1) {
  return make_profile(g, [=](double phi) { return amplitude * std::cos(mode * phi); });
}

}  // namespace

TEST_CASE("grid construction rejects odd or tiny sizes") {
  CHECK_THROWS_AS(PeriodicGrid(7), OddGrid);
  CHECK_THROWS_AS(PeriodicGrid(2), OddGrid);
  PeriodicGrid g(8);
  CHECK(g.spacing() == Catch::Approx(two_pi / 8));
  CHECK(g.node(0) == -pi);
  CHECK(g.node(4) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("mean of basic profiles") {
  PeriodicGrid g(64);
  CHECK(mean(Profile(g, std::vector<double>(64, 3.25))) == 3.25);
  CHECK(std::abs(mean(cosine(g))) <= 1e-15);
  Profile c2 = make_profile(g, [](double phi) { return std::cos(phi) * std::cos(phi); });
  CHECK(mean(c2) == Catch::Approx(0.5).margin(1e-14));
}

TEST_CASE("pairing is the normalized discrete inner product") {
  PeriodicGrid g(100);
  Profile c = cosine(g);
  Profile s = make_profile(g, [](double phi) { return std::sin(phi); });
  CHECK(inner(c, c) == Catch::Approx(0.5).margin(1e-14));
  CHECK(std::abs(inner(c, s)) <= 1e-14);
  CHECK(inner(s, s) >= 0.0);
  PeriodicGrid other(64);
  CHECK_THROWS_AS(inner(c, cosine(other)), GridMismatch);
}

TEST_CASE("half-period shift is an exact involution") {
  PeriodicGrid g(32);
  Profile c = cosine(g);
  Profile shifted = shift_pi(c);
  // the rotation itself is exact; cos(phi + pi) and -cos(phi) agree to rounding
  for (int i = 0; i < g.size; ++i)
    CHECK(shifted[i] == Catch::Approx(-c[i]).margin(1e-15));
  for (int i = 0; i < g.size; ++i) CHECK(shifted[i] == c[(i + 16) % 32]);
  Profile twice = shift_pi(shifted);
  for (int i = 0; i < g.size; ++i) CHECK(twice[i] == c[i]);
  Profile constant(g, std::vector<double>(g.size, 2.0));
  Profile cshift = shift_pi(constant);
  for (int i = 0; i < g.size; ++i) CHECK(cshift[i] == 2.0);
}

TEST_CASE("windowed average reproduces the cosine eigenpair") {
  PeriodicGrid g(200);
  Profile c = cosine(g);
  for (double k : {pi / 4, pi / 2, 3.0 * g.spacing()}) {
    Profile out = sliding_average(c, k);
    for (int i = 0; i < g.size; ++i)
      CHECK(out[i] == Catch::Approx(std::sin(k) * c[i]).margin(1e-12));
  }
  Profile z = zero_profile(g);
  Profile out = sliding_average(z, 0.7);
  for (int i = 0; i < g.size; ++i) CHECK(out[i] == 0.0);
  CHECK_THROWS_AS(sliding_average(c, 0.0), KOutOfRange);
  CHECK_THROWS_AS(sliding_average(c, pi), KOutOfRange);
  // windows that snap onto a degenerate operator are rejected, not averaged
  CHECK_THROWS_AS(sliding_average(c, 1e-13), KOutOfRange);
  CHECK_THROWS_AS(sliding_average(c, pi - 1e-13), KOutOfRange);
  CHECK_NOTHROW(sliding_average(c, pi - g.spacing()));
  CHECK_NOTHROW(sliding_average(c, 0.5 * g.spacing()));
}

TEST_CASE("windowed average of a constant is k times the constant") {
  PeriodicGrid g(40);
  Profile constant(g, std::vector<double>(g.size, 1.5));
  const double k = 5 * g.spacing();
  Profile out = sliding_average(constant, k);
  for (int i = 0; i < g.size; ++i) CHECK(out[i] == Catch::Approx(k * 1.5).margin(1e-13));
}

TEST_CASE("windowed average is symmetric for the pairing") {
  PeriodicGrid g(128);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 10; ++trial) {
    Profile p1 = make_profile(g, [&](double) { return gauss(rng); });
    Profile p2 = make_profile(g, [&](double) { return gauss(rng); });
    subtract_mean(p1);
    subtract_mean(p2);
    const double k = trial % 2 == 0 ? 17 * g.spacing() : 0.9371;
    CHECK(inner(p1, sliding_average(p2, k)) ==
          Catch::Approx(inner(sliding_average(p1, k), p2)).margin(1e-12));
  }
}

TEST_CASE("window reflection identity on mean-zero profiles") {
  PeriodicGrid g(96);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  Profile p = make_profile(g, [&](double) { return gauss(rng); });
  subtract_mean(p);
  const double k = 13 * g.spacing();
  Profile lhs = sliding_average(p, pi - k);
  Profile rhs = sliding_average(shift_pi(p), k);
  for (int i = 0; i < g.size; ++i)
    CHECK(lhs[i] == Catch::Approx(-rhs[i]).margin(1e-12));
}

TEST_CASE("branch operators: values and the composition definition") {
  PeriodicGrid g(400);
  Profile c = cosine(g);
  subtract_mean(c);

  const double kappa = pi / 2;
  Profile bh = branch_average(c, kappa, Branch::low);
  for (int i = 0; i < g.size; ++i)
    CHECK(bh[i] == Catch::Approx((2.0 / pi) * c[i]).margin(1e-12));
  CHECK(inner(c, bh) == Catch::Approx(1.0 / pi).margin(1e-12));

  // the high-branch operator is the low branch applied to -shift_pi(P)
  for (double kap : {pi / 8, pi / 4, pi / 2}) {
    Profile bt = branch_average(c, kap, Branch::high);
    Profile neg_shift = shift_pi(c);
    for (double& v : neg_shift.values) v = -v;
    Profile via_low = branch_average(neg_shift, kap, Branch::low);
    for (int i = 0; i < g.size; ++i)
      CHECK(bt[i] == Catch::Approx(via_low[i]).margin(1e-14));
    CHECK(inner(c, bt) ==
          Catch::Approx(std::sin(kap) / (2.0 * kap)).margin(1e-12));
  }

  Profile nonzero(g, std::vector<double>(g.size, 1.0));
  CHECK_THROWS_AS(branch_average(nonzero, pi / 4, Branch::high), MeanNotZero);
  CHECK_THROWS_AS(branch_average(c, pi, Branch::low), KOutOfRange);
}

TEST_CASE("fused branch kernel agrees with the composed definition") {
  PeriodicGrid g(200);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  Profile p = make_profile(g, [&](double) { return gauss(rng); });
  subtract_mean(p);
  for (Branch b : {Branch::low, Branch::high}) {
    for (double kap : {pi / 8, 0.61}) {
      Profile direct = branch_average(p, kap, b);
      Profile fused = branch_operator(g, kap, b).apply(p);
      subtract_mean(fused);
      for (int i = 0; i < g.size; ++i)
        CHECK(fused[i] == Catch::Approx(direct[i]).margin(1e-13));
    }
  }
}

TEST_CASE("centred difference: trigonometric identity and telescoping") {
  PeriodicGrid g(200);
  Profile c = cosine(g);
  const double k = 40 * g.spacing();
  Profile d = centered_difference(c, k);
  for (int i = 0; i < g.size; ++i)
    CHECK(d[i] ==
          Catch::Approx(-std::sin(k) * std::sin(g.node(i))).margin(1e-13));

  Profile constant(g, std::vector<double>(g.size, 4.0));
  Profile dc = centered_difference(constant, 0.7);
  for (int i = 0; i < g.size; ++i) CHECK(dc[i] == 0.0);

  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  Profile p = make_profile(g, [&](double) { return gauss(rng); });
  CHECK(std::abs(mean(centered_difference(p, 0.9))) <= 1e-14);
}

TEST_CASE("cone distance classifies the basic shapes") {
  PeriodicGrid g(100);
  CHECK(cone_distance(cosine(g)) <= 1e-15);
  Profile s = make_profile(g, [](double phi) { return std::sin(phi); });
  subtract_mean(s);
  CHECK(cone_distance(s) > 0.5);
  Profile c2 = cosine(g, 1.0, 2);
  subtract_mean(c2);
  CHECK(cone_distance(c2) > 0.1);
}

TEST_CASE("snap to grid rounds to the nearest node multiple") {
  PeriodicGrid g(200);
  CHECK(snap_to_grid(0.786, g) == Catch::Approx(25 * g.spacing()));
  CHECK(snap_to_grid(25 * g.spacing(), g) == Catch::Approx(25 * g.spacing()));
}

TEST_CASE("trigonometric interpolant reproduces nodes and band-limited data") {
  PeriodicGrid g(64);
  Profile p = make_profile(g, [](double phi) {
    return 1.3 + std::cos(phi) - 0.4 * std::sin(3 * phi) + 0.2 * std::cos(7 * phi);
  });
  TrigInterpolant f(p);
  for (int i = 0; i < g.size; ++i)
    CHECK(f(g.node(i)) == Catch::Approx(p[i]).margin(1e-12));
  // band-limited data is reproduced everywhere, not just at nodes
  for (double phi : {0.123, -2.5, 3.0})
    CHECK(f(phi) == Catch::Approx(1.3 + std::cos(phi) - 0.4 * std::sin(3 * phi) +
                                  0.2 * std::cos(7 * phi))
                        .margin(1e-12));
}

TEST_CASE("rotation moves the requested index to the origin slot") {
  PeriodicGrid g(8);
  Profile p = make_profile(g, [](double phi) { return phi; });
  Profile r = rotate(p, 3);
  for (int i = 0; i < g.size; ++i) CHECK(r[i] == p[(i + 3) % g.size]);
}
