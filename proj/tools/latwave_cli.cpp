// latwave command line: solve wavetrains, run lattices, sweep wave numbers,
// and validate the numerical invariants. All outputs are plain JSON/CSV files
// meant for external plotting.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "latwave/checks.hpp"
#include "latwave/latwave.hpp"

namespace fs = std::filesystem;
using namespace latwave;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 1;
constexpr int exit_partial = 2;

std::shared_ptr<const PotentialModel> load_model(const std::string& name) {
  return std::make_shared<const PotentialModel>(registry(name));
}

struct WavetrainCli {
  std::string model = "ex1";
  double k = pi / 4;
  double q = 0.0;
  std::optional<double> alpha, gamma;
  int grid_size = 200;
  double tau = 0.1;
  double tol = 1e-8;
  long max_iters = 500000;
  bool single_newton = false;
  bool snap_k = false;
  std::string out = "out";
  std::string stem = "wavetrain";
};

int run_wavetrain(const WavetrainCli& cli) {
  auto model = load_model(cli.model);
  WavetrainNumerics num{cli.grid_size, cli.tau, cli.tol, cli.max_iters,
                        cli.single_newton, cli.snap_k};
  std::vector<double> residual_history;
  FlowObserver observer = [&](const FlowState& st) {
    residual_history.push_back(st.residual);
  };
  WavetrainSolution sol = solve_wavetrain(model, cli.k, cli.q, cli.gamma, cli.alpha, num,
                                          /*allow_unconverged=*/true, observer);
  fs::path jpath = write_wavetrain(cli.out, cli.stem, sol, &residual_history);
  {
    json j = json::parse(read_text(jpath));
    j["numerics"] = {{"tau", cli.tau},
                     {"tol", cli.tol},
                     {"max_iters", cli.max_iters},
                     {"single_newton", cli.single_newton},
                     {"snap_k", cli.snap_k}};
    atomic_write_text(jpath, j.dump(2) + "\n");
  }
  std::cout << (sol.converged ? "converged" : "NOT converged") << " after "
            << sol.iterations << " iterations: residual " << sol.residual
            << ", sigma " << sol.sigma << ", omega " << sol.omega << ", v " << sol.v
            << "\nwrote " << jpath.string() << std::endl;
  return sol.converged ? exit_ok : exit_partial;
}

struct LatticeCli {
  std::string model = "quartic";
  int sites = 400;
  double h = 0.0;  // 0: choose from the stability heuristic
  std::string ic = "longwave:1-0.65*sin(2*pi*x)";
  double tau_end = 0.30;
  std::optional<double> t_end;
  long steps = -1;
  int snapshot_count = 6;
  long diag_every = 100;
  double cfl_cap = 0.2;
  std::string out = "out";
  std::string stem = "lattice";
  bool strict_commensurate = true;
};

int run_lattice_cmd(const LatticeCli& cli) {
  auto model = load_model(cli.model);

  std::vector<double> u0;
  std::optional<WavetrainSolution> wave;
  if (cli.ic.rfind("longwave:", 0) == 0) {
    Expression expr = Expression::parse(cli.ic.substr(9));
    u0 = longwave_ic(cli.sites, [&expr](double xi) { return expr(xi); });
  } else if (cli.ic.rfind("wavetrain:", 0) == 0) {
    // wavetrain:<solution.json>:<p>
    const std::string rest = cli.ic.substr(10);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos)
      throw ParseError("wavetrain initial data needs <file>:<p>");
    const std::string file = rest.substr(0, colon);
    const int p = std::stoi(rest.substr(colon + 1));
    wave = wavetrain_from_json(json::parse(read_text(file)));
    u0 = wavetrain_ic(*wave, cli.sites, p, cli.strict_commensurate);
  } else if (cli.ic.rfind("constant:", 0) == 0) {
    u0.assign(cli.sites, std::stod(cli.ic.substr(9)));
  } else {
    throw ParseError("initial data must be longwave:<expr>, wavetrain:<file>:<p>, or "
                     "constant:<value>");
  }

  double h = cli.h;
  if (h <= 0.0) {
    double curvature = 1e-12;
    for (double u : u0) curvature = std::max(curvature, std::abs(model->flux_second(u)));
    h = cli.cfl_cap / (2.0 * curvature);
  }

  const double eps = 1.0 / cli.sites;
  long steps = cli.steps;
  if (steps < 0) {
    const double t_total = cli.t_end ? *cli.t_end : cli.tau_end / eps;
    steps = std::lround(t_total / h);
  }

  LatticeRunParams run_params;
  run_params.steps = std::max<long>(0, steps - 1);  // the bootstrap takes the first step
  run_params.diag_every = cli.diag_every;
  run_params.cfl_cap = cli.cfl_cap;
  for (int i = 1; i <= cli.snapshot_count; ++i)
    run_params.snapshot_steps.push_back(std::max<long>(1, std::lround(
        static_cast<double>(steps) * i / cli.snapshot_count) - 1));

  int status = exit_ok;
  LatticeRun run;
  // a zero-step request reports the untouched initial slice
  LatticeState init = bootstrap(model, std::move(u0), steps > 0 ? h : 0.0);
  init.h = h;
  try {
    run = run_lattice(std::move(init), run_params);
  } catch (BlowUp& e) {
    std::cerr << "blow-up at t = " << e.t << "; writing partial record" << std::endl;
    status = exit_partial;
    run.final_state.model = model;
    run.snapshots = std::move(e.snapshots);
    run.series = std::move(e.series);
    run.snapshots.push_back({-1, e.t, eps * e.t, e.last_u});
  }
  for (const auto& w : run.warnings) std::cerr << "warning: " << w << std::endl;

  fs::create_directories(cli.out);
  json manifest{{"model", cli.model}, {"sites", cli.sites},     {"h", h},
                {"eps", eps},         {"steps", steps},         {"cfl_max", run.cfl_max},
                {"ic", cli.ic},       {"warnings", run.warnings}};
  json snaps = json::array();
  for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
    const auto& s = run.snapshots[i];
    char name[64];
    std::snprintf(name, sizeof(name), "%s_snap%03zu.csv", cli.stem.c_str(), i);
    std::optional<std::vector<double>> ref;
    json entry{{"file", name}, {"t", s.t}, {"tau", s.tau}, {"step", s.step}};
    if (wave) {
      ref = wavetrain_reference(*wave, cli.sites, s.t);
      entry["advection_rel_l2_error"] = slice_rel_error(s.u, *ref);
    }
    write_snapshot_csv(fs::path(cli.out) / name, s, ref ? &*ref : nullptr);
    snaps.push_back(std::move(entry));
  }
  manifest["snapshots"] = std::move(snaps);
  const std::string diag_name = cli.stem + "_diagnostics.csv";
  write_diagnostics_csv(fs::path(cli.out) / diag_name, run.series);
  manifest["diagnostics"] = diag_name;
  atomic_write_text(fs::path(cli.out) / (cli.stem + ".json"), manifest.dump(2) + "\n");
  std::cout << "wrote " << (fs::path(cli.out) / (cli.stem + ".json")).string() << std::endl;
  return status;
}

struct SweepCli {
  std::string model = "ex1";
  std::vector<double> k_list;
  std::string k_range;  // lo:hi:n
  std::vector<double> q_list{0.0};
  std::vector<double> alpha_list, gamma_list;
  int grid_size = 200;
  double tau = 0.1;
  double tol = 1e-8;
  long max_iters = 500000;
  bool snap_k = false;
  unsigned jobs = 0;
  std::string out = "out";
};

int run_sweep(const SweepCli& cli) {
  std::vector<double> ks = cli.k_list;
  if (!cli.k_range.empty()) {
    std::istringstream ss(cli.k_range);
    std::string lo_s, hi_s, n_s;
    if (!std::getline(ss, lo_s, ':') || !std::getline(ss, hi_s, ':') ||
        !std::getline(ss, n_s, ':'))
      throw ParseError("k range must be lo:hi:count");
    const double lo = std::stod(lo_s), hi = std::stod(hi_s);
    const int n = std::stoi(n_s);
    for (int i = 0; i < n; ++i)
      ks.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  }
  if (ks.empty()) {
    std::cerr << "sweep needs a nonempty wave-number list" << std::endl;
    return exit_config;
  }
  if (!cli.alpha_list.empty() && !cli.gamma_list.empty()) {
    std::cerr << "give either an alpha list or a gamma list, not both" << std::endl;
    return exit_config;
  }
  const bool use_gamma = !cli.gamma_list.empty();
  const std::vector<double>& levels = use_gamma ? cli.gamma_list : cli.alpha_list;
  if (levels.empty()) {
    std::cerr << "sweep needs --alpha or --gamma values" << std::endl;
    return exit_config;
  }

  auto model = load_model(cli.model);
  WavetrainNumerics num{cli.grid_size, cli.tau, cli.tol, cli.max_iters, false, cli.snap_k};

  struct Point {
    double k, q;
    std::optional<double> alpha, gamma;
    std::optional<WavetrainSolution> sol;
    std::string error;
  };
  std::vector<Point> points;
  for (double q : cli.q_list)
    for (double level : levels)
      for (double k : ks) {
        Point pt;
        pt.k = k;
        pt.q = q;
        if (use_gamma)
          pt.gamma = level;
        else
          pt.alpha = level;
        points.push_back(pt);
      }

  const unsigned workers =
      cli.jobs > 0 ? cli.jobs
                   : std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                     static_cast<unsigned>(ks.size())));
  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= points.size()) return;
      try {
        points[i].sol = solve_wavetrain(model, points[i].k, points[i].q,
                                        points[i].gamma, points[i].alpha, num,
                                        /*allow_unconverged=*/true);
      } catch (const Error& e) {
        points[i].error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  fs::create_directories(cli.out);
  std::string csv =
      "k,q,kappa,branch,sigma,omega,eta,v,gamma,residual,primal_residual,cone_distance,"
      "iterations,converged,symmetry_defect\n";
  int failures = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& pt = points[i];
    if (!pt.sol || !pt.sol->converged) {
      ++failures;
      std::cerr << "failed point: k = " << pt.k << ", q = " << pt.q
                << (pt.sol ? " (not converged)" : (": " + pt.error)) << std::endl;
    }
    if (!pt.sol) continue;
    const auto& s = *pt.sol;
    char stem[64];
    std::snprintf(stem, sizeof(stem), "sweep_%03zu", i);
    write_wavetrain(cli.out, stem, s);

    // profile distance to the partner point at pi - k, when present in the sweep
    std::string sym = "";
    for (const auto& other : points) {
      if (!other.sol || other.q != pt.q || other.sol->gamma != s.gamma) continue;
      if (std::abs((pi - other.k) - pt.k) < 1e-9 && &other != &pt) {
        Profile diff = s.Q;
        for (int m = 0; m < diff.size(); ++m) diff[m] -= other.sol->Q[m];
        sym = format_double(norm2(diff) / std::max(norm2(s.Q), 1e-300));
        break;
      }
    }
    csv += format_double(s.k) + "," + format_double(s.q) + "," +
           format_double(s.kappa) + "," + to_string(s.branch) + "," +
           format_double(s.sigma) + "," + format_double(s.omega) + "," +
           format_double(s.eta) + "," + format_double(s.v) + "," +
           format_double(s.gamma) + "," + format_double(s.residual) + "," +
           format_double(s.primal_residual) + "," + format_double(s.cone_dist) + "," +
           std::to_string(s.iterations) + "," + (s.converged ? "1" : "0") + "," +
           sym + "\n";
  }
  atomic_write_text(fs::path(cli.out) / "sweep_summary.csv", csv);
  std::cout << "wrote " << (fs::path(cli.out) / "sweep_summary.csv").string();
  if (failures) std::cout << " (" << failures << " point(s) failed)";
  std::cout << std::endl;
  return failures == 0 ? exit_ok : exit_partial;
}

int run_validate(const std::string& suite, std::uint64_t seed, bool acceptance_only) {
  auto results = checks::run_checks(suite, seed, acceptance_only);
  if (results.empty()) {
    std::cerr << "no checks matched suite '" << suite << "'" << std::endl;
    return exit_config;
  }
  bool all = true;
  for (const auto& r : results) {
    all = all && r.pass;
    std::printf("[%s] %-4s %-32s %6.2fs  %s\n", r.pass ? "PASS" : "FAIL", r.id.c_str(),
                r.name.c_str(), r.seconds, r.detail.c_str());
  }
  std::printf("%zu/%zu checks passed\n",
              static_cast<std::size_t>(std::count_if(results.begin(), results.end(),
                                                     [](const auto& r) { return r.pass; })),
              results.size());
  return all ? exit_ok : exit_partial;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wavetrains and dispersive shocks in lattice conservation laws"};
  app.footer(
      "File formats:\n"
      "  wavetrain profile CSV: phi [rad], Q, V, U (carrier values at phase phi)\n"
      "  lattice snapshot CSV:  j (site index), u (site value), u_ref (advection target)\n"
      "  diagnostics CSV:       step, t (lattice time), tau = t/N (macroscopic time),\n"
      "                         sum_even_slice, sum_odd_slice, hamiltonian,\n"
      "                         total_variation, oscillation (mean squared 2nd difference)\n"
      "  sweep summary CSV:     k, kappa [rad], branch, sigma (phase speed),\n"
      "                         omega = kappa*sigma, eta, v, gamma, residuals, iterations\n"
      "Exit codes: 0 success, 1 bad configuration, 2 partial results written.");
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a [subcommand]-sectioned key = value file");
  app.allow_config_extras(false);

  WavetrainCli wt;
  auto* wt_cmd = app.add_subcommand("wavetrain", "solve one periodic travelling wave");
  wt_cmd->configurable();
  wt_cmd->add_option("--model", wt.model,
                     "ex1 | ex2 | ex3 | quartic | kvm | linear:<c> | psi2:<expr> | "
                     "phi1:<expr>");
  wt_cmd->add_option("--k", wt.k, "wave number in (0, pi)")->required();
  wt_cmd->add_option("--q", wt.q, "dual shift parameter");
  wt_cmd->add_option("--alpha", wt.alpha, "initial cosine amplitude (sets gamma)");
  wt_cmd->add_option("--gamma", wt.gamma, "constraint level (> 0)");
  wt_cmd->add_option("--M", wt.grid_size, "samples per periodicity cell");
  wt_cmd->add_option("--tau", wt.tau, "flow step in (0, 1)");
  wt_cmd->add_option("--tol", wt.tol, "relative residual tolerance");
  wt_cmd->add_option("--max-iters", wt.max_iters, "iteration cap");
  wt_cmd->add_flag("--single-newton", wt.single_newton,
                   "one Newton step per renormalization");
  wt_cmd->add_flag("--snap-k", wt.snap_k, "round k to the nearest grid multiple");
  wt_cmd->add_option("--out", wt.out, "output directory");
  wt_cmd->add_option("--stem", wt.stem, "output file stem");

  LatticeCli lat;
  auto* lat_cmd = app.add_subcommand("lattice", "evolve the periodic lattice");
  lat_cmd->configurable();
  lat_cmd->add_option("--model", lat.model, "flux model (primal or dual side)");
  lat_cmd->add_option("--N,--sites", lat.sites, "number of lattice sites");
  lat_cmd->add_option("--dt", lat.h, "time step (0: stability heuristic)");
  lat_cmd->add_option("--ic", lat.ic,
                      "longwave:<expr(x)> | wavetrain:<file>:<p> | constant:<v>");
  lat_cmd->add_option("--tau-end", lat.tau_end, "macroscopic end time tau = t/N");
  lat_cmd->add_option("--t-end", lat.t_end, "microscopic end time (overrides tau-end)");
  lat_cmd->add_option("--steps", lat.steps, "explicit step count (overrides end times)");
  lat_cmd->add_option("--snapshots", lat.snapshot_count, "evenly spaced snapshot count");
  lat_cmd->add_option("--diag-every", lat.diag_every, "diagnostics sampling stride");
  lat_cmd->add_option("--cfl-cap", lat.cfl_cap, "stability heuristic h * max|phi''|");
  lat_cmd->add_flag("!--no-strict-k", lat.strict_commensurate,
                    "allow incommensurate wavetrain seeding");
  lat_cmd->add_option("--out", lat.out, "output directory");
  lat_cmd->add_option("--stem", lat.stem, "output file stem");

  SweepCli sw;
  auto* sw_cmd = app.add_subcommand("sweep", "solve wavetrains for several wave numbers");
  sw_cmd->configurable();
  sw_cmd->add_option("--model", sw.model, "dual-side model");
  sw_cmd->add_option("--k-list", sw.k_list, "explicit wave numbers")->delimiter(',');
  sw_cmd->add_option("--k-range", sw.k_range, "lo:hi:count");
  sw_cmd->add_option("--q,--q-list", sw.q_list, "dual shift parameter(s)")
      ->delimiter(',');
  sw_cmd->add_option("--alpha,--alpha-list", sw.alpha_list,
                     "initial cosine amplitude(s)")
      ->delimiter(',');
  sw_cmd->add_option("--gamma,--gamma-list", sw.gamma_list, "constraint level(s)")
      ->delimiter(',');
  sw_cmd->add_option("--M", sw.grid_size, "samples per periodicity cell");
  sw_cmd->add_option("--tau", sw.tau, "flow step");
  sw_cmd->add_option("--tol", sw.tol, "relative residual tolerance");
  sw_cmd->add_option("--max-iters", sw.max_iters, "iteration cap");
  sw_cmd->add_flag("--snap-k", sw.snap_k, "round each k to the nearest grid multiple");
  sw_cmd->add_option("--jobs", sw.jobs, "worker cap (0: hardware concurrency)");
  sw_cmd->add_option("--out", sw.out, "output directory");

  std::string suite;
  std::uint64_t seed = 0;
  bool acceptance_only = false;
  auto* val_cmd = app.add_subcommand("validate", "run the invariant and acceptance checks");
  val_cmd->configurable();
  val_cmd->add_option("--suite", suite,
                      "operators | potentials | flow | symmetry | oracle | lattice | "
                      "shock | robustness");
  val_cmd->add_option("--seed", seed, "seed for randomized property checks");
  val_cmd->add_flag("--acceptance-only", acceptance_only, "run only the A* criteria");

  CLI11_PARSE(app, argc, argv);

  try {
    if (wt_cmd->parsed()) return run_wavetrain(wt);
    if (lat_cmd->parsed()) return run_lattice_cmd(lat);
    if (sw_cmd->parsed()) return run_sweep(sw);
    if (val_cmd->parsed()) return run_validate(suite, seed, acceptance_only);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return exit_config;
  }
  return exit_config;
}
