#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "latwave/errors.hpp"
#include "latwave/grid.hpp"
#include "latwave/lattice.hpp"
#include "latwave/wavetrain.hpp"

namespace latwave {

using json = nlohmann::json;

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// Write a file atomically: stage into a sibling temp file, then rename.
inline void atomic_write_text(const std::filesystem::path& path, const std::string& text) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << text;
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- profiles ----

inline json profile_to_json(const Profile& p) {
  return json{{"grid_size", p.grid.size}, {"values", p.values}};
}

inline void require_finite(const std::vector<double>& values) {
  for (double v : values)
    if (!std::isfinite(v)) throw IoError("profile contains a non-finite sample");
}

inline Profile profile_from_json(const json& j) {
  const int m = j.at("grid_size").get<int>();
  PeriodicGrid grid(m);
  std::vector<double> values = j.at("values").get<std::vector<double>>();
  if (static_cast<int>(values.size()) != m)
    throw IoError("profile value count does not match grid_size");
  require_finite(values);
  return Profile(grid, std::move(values));
}

inline void write_profile_csv(const std::filesystem::path& path, const Profile& p) {
  std::string text = "phi,value\n";
  for (int i = 0; i < p.size(); ++i)
    text += format_double(p.grid.node(i)) + "," + format_double(p[i]) + "\n";
  atomic_write_text(path, text);
}

inline Profile read_profile_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty profile file " + path.string());
  std::vector<double> phis, values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw IoError("malformed CSV row: " + line);
    phis.push_back(std::stod(line.substr(0, comma)));
    values.push_back(std::stod(line.substr(comma + 1)));
  }
  PeriodicGrid grid(static_cast<int>(values.size()));
  for (std::size_t i = 0; i < phis.size(); ++i)
    if (std::abs(phis[i] - grid.node(static_cast<int>(i))) > 1e-9)
      throw IoError("node column does not follow the -pi + 2*pi*i/M convention");
  require_finite(values);
  return Profile(grid, std::move(values));
}

// ---- wavetrain solutions ----

inline json wavetrain_to_json(const WavetrainSolution& sol,
                              const std::string& profile_csv_ref = {}) {
  json j{{"model", sol.model_name},
         {"k", sol.k},
         {"kappa", sol.kappa},
         {"branch", to_string(sol.branch)},
         {"q", sol.q},
         {"gamma", sol.gamma},
         {"sigma", sol.sigma},
         {"omega", sol.omega},
         {"eta", sol.eta},
         {"v", sol.v},
         {"F", sol.f_value},
         {"W", sol.w_value},
         {"residual", sol.residual},
         {"primal_residual", sol.primal_residual},
         {"cone_distance", sol.cone_dist},
         {"iterations", sol.iterations},
         {"converged", sol.converged},
         {"grid_size", sol.Q.grid.size},
         {"normalization",
          {{"convention", "psi_prime(0) = 0"}, {"psi_prime_at_q", sol.psi_prime_at_q}}}};
  if (sol.alpha) j["alpha"] = *sol.alpha;
  if (!profile_csv_ref.empty()) j["profile_csv"] = profile_csv_ref;
  j["Q"] = profile_to_json(sol.Q);
  return j;
}

inline WavetrainSolution wavetrain_from_json(const json& j) {
  WavetrainSolution sol;
  sol.model_name = j.at("model").get<std::string>();
  sol.k = j.at("k").get<double>();
  sol.kappa = j.at("kappa").get<double>();
  sol.branch = j.at("branch").get<std::string>() == "low" ? Branch::low : Branch::high;
  sol.q = j.at("q").get<double>();
  sol.gamma = j.at("gamma").get<double>();
  sol.sigma = j.at("sigma").get<double>();
  sol.omega = j.at("omega").get<double>();
  sol.eta = j.at("eta").get<double>();
  sol.v = j.at("v").get<double>();
  sol.residual = j.at("residual").get<double>();
  sol.f_value = j.value("F", 0.0);
  sol.w_value = j.value("W", 0.0);
  sol.primal_residual = j.at("primal_residual").get<double>();
  sol.cone_dist = j.at("cone_distance").get<double>();
  sol.iterations = j.at("iterations").get<long>();
  sol.converged = j.at("converged").get<bool>();
  if (j.contains("alpha")) sol.alpha = j.at("alpha").get<double>();
  sol.psi_prime_at_q = j.at("normalization").at("psi_prime_at_q").get<double>();
  sol.Q = profile_from_json(j.at("Q"));
  // reconstruct the derived profiles from the model
  auto model = std::make_shared<const PotentialModel>(registry(sol.model_name));
  sol.V = sol.Q;
  for (double& x : sol.V.values) x = model->psi_q_prime(sol.q, x) - sol.eta;
  sol.U = sol.V;
  for (double& x : sol.U.values) x += sol.v;
  return sol;
}

/// Write <stem>.json and <stem>_profile.csv (columns phi, Q, V, U).
inline std::filesystem::path write_wavetrain(const std::filesystem::path& dir,
                                             const std::string& stem,
                                             const WavetrainSolution& sol,
                                             const std::vector<double>* residual_history =
                                                 nullptr) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string csv_name = stem + "_profile.csv";
  std::string text = "phi,Q,V,U\n";
  for (int i = 0; i < sol.Q.size(); ++i)
    text += format_double(sol.Q.grid.node(i)) + "," + format_double(sol.Q[i]) + "," +
            format_double(sol.V[i]) + "," + format_double(sol.U[i]) + "\n";
  atomic_write_text(dir / csv_name, text);

  json j = wavetrain_to_json(sol, csv_name);
  if (residual_history) {
    // decimate to at most 512 entries
    const std::size_t n = residual_history->size();
    const std::size_t stride = n <= 512 ? 1 : (n + 511) / 512;
    json hist = json::array();
    for (std::size_t i = 0; i < n; i += stride)
      hist.push_back(json::array({i, (*residual_history)[i]}));
    j["residual_history"] = std::move(hist);
  }
  const fs::path jpath = dir / (stem + ".json");
  atomic_write_text(jpath, j.dump(2) + "\n");
  return jpath;
}

// ---- lattice runs ----

inline void write_snapshot_csv(const std::filesystem::path& path,
                               const LatticeSnapshot& snap,
                               const std::vector<double>* reference = nullptr) {
  std::string text = reference ? "j,u,u_ref\n" : "j,u\n";
  for (std::size_t j = 0; j < snap.u.size(); ++j) {
    text += std::to_string(j) + "," + format_double(snap.u[j]);
    if (reference) text += "," + format_double((*reference)[j]);
    text += "\n";
  }
  atomic_write_text(path, text);
}

inline void write_diagnostics_csv(const std::filesystem::path& path,
                                  const std::vector<LatticeDiag>& series) {
  std::string text =
      "step,t,tau,sum_even_slice,sum_odd_slice,hamiltonian,total_variation,oscillation\n";
  for (const auto& d : series) {
    text += std::to_string(d.step) + "," + format_double(d.t) + "," +
            format_double(d.tau) + "," + format_double(d.sum_even_slice) + "," +
            format_double(d.sum_odd_slice) + "," + format_double(d.hamiltonian) + "," +
            format_double(d.total_variation) + "," + format_double(d.oscillation) + "\n";
  }
  atomic_write_text(path, text);
}

}  // namespace latwave
