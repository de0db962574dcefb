#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <filesystem>
#include <limits>
#include <memory>

#include "latwave/io.hpp"

using namespace latwave;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  fs::path dir = fs::temp_directory_path() / "latwave_io_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("profile CSV round trip preserves bits and node convention") {
  PeriodicGrid g(48);
  Profile p = make_profile(g, [](double phi) { return std::exp(std::cos(phi)) - 1.1; });
  const fs::path path = temp_dir() / "profile.csv";
  write_profile_csv(path, p);
  Profile back = read_profile_csv(path);
  REQUIRE(back.size() == p.size());
  for (int i = 0; i < p.size(); ++i) CHECK(back[i] == p[i]);

  // a file with a wrong node column is rejected
  const fs::path bad = temp_dir() / "bad.csv";
  atomic_write_text(bad, "phi,value\n0.0,1.0\n0.5,2.0\n1.0,3.0\n1.5,4.0\n");
  CHECK_THROWS_AS(read_profile_csv(bad), IoError);
}

TEST_CASE("profile JSON round trip validates sizes") {
  PeriodicGrid g(16);
  Profile p = make_profile(g, [](double phi) { return std::sin(phi); });
  json j = profile_to_json(p);
  Profile back = profile_from_json(j);
  for (int i = 0; i < p.size(); ++i) CHECK(back[i] == p[i]);

  j["values"] = std::vector<double>{1.0, 2.0};
  CHECK_THROWS_AS(profile_from_json(j), IoError);

  json bad = profile_to_json(p);
  bad["values"][3] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(profile_from_json(bad), IoError);
}

TEST_CASE("wavetrain JSON round trip reconstructs the derived profiles") {
  auto lin = std::make_shared<const PotentialModel>(registry("linear:1"));
  WavetrainSolution sol = solve_wavetrain(lin, pi / 3, 0.0, {}, 1.0);
  const fs::path dir = temp_dir();
  write_wavetrain(dir, "wt", sol);
  REQUIRE(fs::exists(dir / "wt.json"));
  REQUIRE(fs::exists(dir / "wt_profile.csv"));

  WavetrainSolution back = wavetrain_from_json(json::parse(read_text(dir / "wt.json")));
  CHECK(back.k == sol.k);
  CHECK(back.sigma == sol.sigma);
  CHECK(back.omega == sol.omega);
  CHECK(back.gamma == sol.gamma);
  CHECK(back.converged == sol.converged);
  for (int i = 0; i < sol.Q.size(); ++i) {
    CHECK(back.Q[i] == sol.Q[i]);
    CHECK(back.U[i] == Catch::Approx(sol.U[i]).margin(1e-14));
  }
}

TEST_CASE("solutions over expression-defined models survive the JSON round trip") {
  auto custom = std::make_shared<const PotentialModel>(registry("psi2:0.5+0.5*exp(-x^2)"));
  WavetrainSolution sol = solve_wavetrain(custom, pi / 2, 0.0, {}, 2.0);
  const fs::path dir = temp_dir();
  write_wavetrain(dir, "custom", sol);
  WavetrainSolution back =
      wavetrain_from_json(json::parse(read_text(dir / "custom.json")));
  CHECK(back.model_name == sol.model_name);
  for (int i = 0; i < sol.V.size(); ++i)
    CHECK(back.V[i] == Catch::Approx(sol.V[i]).margin(1e-12));
}

TEST_CASE("atomic write leaves no temporary file behind") {
  const fs::path path = temp_dir() / "atomic.txt";
  atomic_write_text(path, "payload");
  CHECK(read_text(path) == "payload");
  CHECK_FALSE(fs::exists(path.string() + ".tmp"));
}

TEST_CASE("snapshot and diagnostics writers emit headed CSV") {
  const fs::path dir = temp_dir();
  LatticeSnapshot snap{3, 0.3, 0.01, {1.0, 2.0, 3.0}};
  write_snapshot_csv(dir / "snap.csv", snap);
  const std::string text = read_text(dir / "snap.csv");
  CHECK(text.rfind("j,u\n", 0) == 0);

  std::vector<double> ref = {1.0, 2.0, 2.5};
  write_snapshot_csv(dir / "snap_ref.csv", snap, &ref);
  CHECK(read_text(dir / "snap_ref.csv").rfind("j,u,u_ref\n", 0) == 0);

  std::vector<LatticeDiag> series(2);
  series[0] = {0, 0.0, 0.0, 1.0, 1.0, 5.0, 0.1, 1e-6};
  series[1] = {10, 0.1, 0.001, 1.0, 1.0, 5.0, 0.1, 2e-6};
  write_diagnostics_csv(dir / "diag.csv", series);
  CHECK(read_text(dir / "diag.csv")
            .rfind("step,t,tau,sum_even_slice,sum_odd_slice,hamiltonian,", 0) == 0);
}
