#pragma once

#include <cmath>
#include <numbers>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "latwave/errors.hpp"
#include "latwave/expression.hpp"

namespace latwave {

namespace detail {

// 12-point Gauss-Legendre rule on [-1, 1] (positive half, symmetric).
inline constexpr double gl_x[6] = {
    0.1252334085114689, 0.3678314989981802, 0.5873179542866175,
    0.7699026741943047, 0.9041172563704749, 0.9815606342467192};
inline constexpr double gl_w[6] = {
    0.2491470458134028, 0.2334925365383548, 0.2031674267230659,
    0.1600783285433462, 0.1069393259953184, 0.0471753363865118};

inline double gauss12(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 6; ++i)
    s += gl_w[i] * (f(c + h * gl_x[i]) + f(c - h * gl_x[i]));
  return h * s;
}

}  // namespace detail

/// Antiderivative F(x) = int_0^x f with cached node values on [-R, R].
///
/// Node values are accumulated cell by cell with a 12-point Gauss rule;
/// evaluation adds the partial-cell integral, so the result is accurate to
/// roughly machine precision for smooth f. Construction verifies a sample of
/// cells against a refined rule and throws QuadratureFailure on disagreement.
class Antiderivative {
 public:
  Antiderivative(std::function<double(double)> f, double half_range, int cells)
      : f_(std::move(f)), half_range_(half_range), cells_(cells) {
    if (cells_ < 2 || cells_ % 2 != 0)
      throw QuadratureFailure("cell count must be even and >= 2");
    h_ = 2.0 * half_range_ / cells_;
    nodes_.assign(cells_ + 1, 0.0);
    const int mid = cells_ / 2;  // node at x = 0
    for (int j = mid; j < cells_; ++j)
      nodes_[j + 1] = nodes_[j] + detail::gauss12(f_, node(j), node(j + 1));
    for (int j = mid; j > 0; --j)
      nodes_[j - 1] = nodes_[j] - detail::gauss12(f_, node(j - 1), node(j));
    verify();
  }

  double half_range() const { return half_range_; }

  double operator()(double x) const {
    if (!(std::abs(x) <= half_range_))
      throw RangeCap("potential evaluation outside cached range |x| <= " +
                     std::to_string(half_range_));
    int j = static_cast<int>(std::floor((x + half_range_) / h_));
    j = std::max(0, std::min(cells_ - 1, j));
    return nodes_[j] + detail::gauss12(f_, node(j), x);
  }

 private:
  double node(int j) const { return -half_range_ + j * h_; }

  void verify() const {
    for (int j = 0; j < cells_; j += std::max(1, cells_ / 16)) {
      const double a = node(j), b = node(j + 1), m = 0.5 * (a + b);
      const double coarse = detail::gauss12(f_, a, b);
      const double fine = detail::gauss12(f_, a, m) + detail::gauss12(f_, m, b);
      if (std::abs(coarse - fine) > 1e-12 * std::max(1.0, std::abs(fine)))
        throw QuadratureFailure("antiderivative cell at x=" + std::to_string(a) +
                                " did not meet the 1e-12 tolerance");
    }
  }

  std::function<double(double)> f_;
  double half_range_, h_;
  int cells_;
  std::vector<double> nodes_;
};

enum class PotentialSide { dual, primal };

/// A convex flux potential and its Legendre dual, normalized so that the dual
/// derivative vanishes at zero: psi(0) = psi1(0) = 0. Dual-side models are
/// defined through the curvature psi2; primal-side models through the flux
/// phi1 and its potential phi. The two sides are linked by the inverse-function
/// relation flux = psi1^{-1}, solved by safeguarded Newton when needed.
///
/// Models are immutable after construction; all cached tables are built
/// eagerly, so const access is safe from concurrent workers.
class PotentialModel {
 public:
  using Fn = std::function<double(double)>;
  struct Bounds {
    double low, high;  // 0 < low <= psi2 <= high
  };

  static PotentialModel dual(std::string name, Fn psi2, Fn psi1, Fn psi,
                             std::optional<Bounds> bounds, bool nonuniform,
                             double cap = std::numeric_limits<double>::infinity()) {
    PotentialModel m;
    m.name_ = std::move(name);
    m.side_ = PotentialSide::dual;
    m.psi2_ = std::move(psi2);
    m.psi1_ = std::move(psi1);
    m.psi_ = std::move(psi);
    m.bounds_ = bounds;
    m.nonuniform_ = nonuniform;
    m.cap_ = cap;
    return m;
  }

  /// Dual-side model from psi2 alone; psi1 and psi are reconstructed through
  /// cached antiderivative tables on |zeta| <= cap.
  static PotentialModel dual_tabulated(std::string name, Fn psi2,
                                       std::optional<Bounds> bounds = {},
                                       double cap = 50.0, int cells = 800) {
    auto table1 = std::make_shared<Antiderivative>(psi2, cap, cells);
    auto table0 = std::make_shared<Antiderivative>(
        [table1](double x) { return (*table1)(x); }, cap, cells);
    bool nonuniform = false;
    double probe_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 2000; ++i) {
      const double z = -cap + 2.0 * cap * i / 2000;
      probe_min = std::min(probe_min, psi2(z));
    }
    if (probe_min < -1e-9)
      throw InvalidModel("dual curvature must be nonnegative (model '" + name + "')");
    nonuniform = probe_min <= 1e-9;
    return dual(std::move(name), std::move(psi2),
                [table1](double z) { return (*table1)(z); },
                [table0](double z) { return (*table0)(z); }, bounds, nonuniform, cap);
  }

  static PotentialModel primal(std::string name, Fn phi, Fn phi1, Fn phi2,
                               double cap = std::numeric_limits<double>::infinity()) {
    PotentialModel m;
    m.name_ = std::move(name);
    m.side_ = PotentialSide::primal;
    m.phi_ = std::move(phi);
    m.phi1_ = std::move(phi1);
    m.phi2_ = std::move(phi2);
    m.cap_ = cap;
    return m;
  }

  const std::string& name() const { return name_; }
  PotentialSide side() const { return side_; }
  bool is_dual() const { return side_ == PotentialSide::dual; }
  bool nonuniform() const { return nonuniform_; }
  const std::optional<Bounds>& bounds() const { return bounds_; }
  double cap() const { return cap_; }

  /// psi''(zeta), the dual curvature.
  double psi2(double z) const {
    require_dual("psi2");
    check_cap(z);
    return psi2_(z);
  }
  /// psi'(zeta) with psi'(0) = 0.
  double psi1(double z) const {
    require_dual("psi1");
    check_cap(z);
    return psi1_(z);
  }
  /// psi(zeta) with psi(0) = 0.
  double psi(double z) const {
    require_dual("psi");
    check_cap(z);
    return psi_(z);
  }

  /// Shifted dual derivative psi_q'(zeta) = psi'(q + zeta) - psi'(q).
  double psi_q_prime(double q, double z) const { return psi1(q + z) - psi1(q); }
  /// Shifted dual potential psi_q(zeta) = psi(q + zeta) - psi(q) - psi'(q) zeta.
  double psi_q(double q, double z) const { return psi(q + z) - psi(q) - psi1(q) * z; }

  /// Primal flux phi'(w). For dual-side models this inverts psi' by
  /// safeguarded Newton to |psi'(z) - w| <= 1e-12; an optional warm-start
  /// guess skips the bracketing phase when it already converges.
  double flux(double w, std::optional<double> guess = {}) const {
    if (side_ == PotentialSide::primal) return phi1_(w);
    if (guess) {
      double z = *guess;
      for (int it = 0; it < 8; ++it) {
        if (std::abs(z) > cap_) break;
        const double f = psi1_(z) - w;
        if (std::abs(f) <= 1e-12) return z;
        const double d = psi2_(z);
        if (!(d > 1e-14)) break;
        z -= f / d;
      }
    }
    return invert_psi1(w);
  }

  /// Primal potential phi(u); for dual models through the duality formula
  /// phi(u) = u z - psi(z) at z = phi'(u).
  double flux_potential(double u) const {
    if (side_ == PotentialSide::primal) return phi_(u);
    const double z = flux(u);
    return u * z - psi_(z);
  }

  /// Primal curvature phi''(u), used by step-size heuristics.
  double flux_second(double u) const {
    if (side_ == PotentialSide::primal) return phi2_(u);
    const double d = psi2_(flux(u));
    if (!(d > 1e-300)) return std::numeric_limits<double>::infinity();
    return 1.0 / d;
  }

 private:
  PotentialModel() = default;

  void require_dual(const char* op) const {
    if (side_ != PotentialSide::dual)
      throw UnsupportedSide(std::string(op) + " requires a dual-side model; '" +
                            name_ + "' is primal-side");
  }
  void check_cap(double z) const {
    if (!(std::abs(z) <= cap_))
      throw RangeCap("dual argument " + std::to_string(z) +
                     " exceeds the evaluation cap |zeta| <= " + std::to_string(cap_) +
                     " for model '" + name_ + "'");
  }

  double invert_psi1(double w) const {
    double lo = -1.0, hi = 1.0;
    while (psi1_(lo) > w) {
      lo *= 2.0;
      if (lo < -cap_) throw RootBracketFailure("no bracket below for flux(" +
                                               std::to_string(w) + ")");
    }
    while (psi1_(hi) < w) {
      hi *= 2.0;
      if (hi > cap_) throw RootBracketFailure("no bracket above for flux(" +
                                              std::to_string(w) + ")");
    }
    double z = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const double f = psi1_(z) - w;
      if (std::abs(f) <= 1e-12) return z;
      if (f > 0.0)
        hi = z;
      else
        lo = z;
      if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                         std::max(1.0, std::abs(z)))
        return z;  // interval exhausted in double precision
      const double d = psi2_(z);
      double zn = (d > 1e-14) ? z - f / d : 0.5 * (lo + hi);
      if (!(zn > lo && zn < hi)) zn = 0.5 * (lo + hi);
      z = zn;
    }
    return z;
  }

  std::string name_;
  PotentialSide side_ = PotentialSide::dual;
  bool nonuniform_ = false;
  std::optional<Bounds> bounds_;
  double cap_ = std::numeric_limits<double>::infinity();
  Fn psi2_, psi1_, psi_;
  Fn phi_, phi1_, phi2_;
};

namespace builtin {

inline PotentialModel ex1() {
  const double sq = std::sqrt(std::numbers::pi);
  return PotentialModel::dual(
      "ex1", [](double z) { return 0.5 + 0.5 * std::exp(-z * z); },
      [sq](double z) { return 0.5 * z + 0.25 * sq * std::erf(z); },
      [sq](double z) {
        return 0.25 * z * z + 0.25 * sq * z * std::erf(z) +
               0.25 * (std::exp(-z * z) - 1.0);
      },
      PotentialModel::Bounds{0.5, 1.0}, false);
}

inline PotentialModel ex2() {
  return PotentialModel::dual_tabulated(
      "ex2", [](double z) { return 1.0 - std::atan(2.0 * z) / std::numbers::pi; },
      PotentialModel::Bounds{0.5, 1.5});
}

inline PotentialModel ex3() {
  return PotentialModel::dual(
      "ex3", [](double z) { return 0.25 * std::exp(2.0 * z) - 0.5 * z - 0.25; },
      [](double z) { return 0.125 * (std::exp(2.0 * z) - 1.0) - 0.25 * z * z - 0.25 * z; },
      [](double z) {
        return (std::exp(2.0 * z) - 1.0) / 16.0 - z / 8.0 - z * z * z / 12.0 -
               z * z / 8.0;
      },
      std::nullopt, /*nonuniform=*/true, /*cap=*/50.0);
}

inline PotentialModel quartic() {
  return PotentialModel::primal(
      "quartic", [](double u) { return 0.5 * u * u + 0.25 * u * u * u * u; },
      [](double u) { return u + u * u * u; }, [](double u) { return 1.0 + 3.0 * u * u; });
}

inline PotentialModel kvm() {
  return PotentialModel::primal(
      "kvm", [](double u) { return std::exp(u) - 1.0; },
      [](double u) { return std::exp(u); }, [](double u) { return std::exp(u); });
}

inline PotentialModel linear(double c) {
  if (!(c > 0.0)) throw InvalidModel("linear model needs c > 0");
  return PotentialModel::dual(
      "linear:" + std::to_string(c), [c](double) { return c; },
      [c](double z) { return c * z; }, [c](double z) { return 0.5 * c * z * z; },
      PotentialModel::Bounds{c, c}, false);
}

}  // namespace builtin

/// Look up or construct a model by name.
///
/// Accepted: ex1 | ex2 | ex3 | quartic | kvm | linear:<c> (also linear(<c>)) |
/// psi2:<expression> (dual side, tabulated) | phi1:<expression> (primal side,
/// potential tabulated). Expressions use the mini-grammar from Expression.
inline PotentialModel registry(const std::string& name) {
  if (name == "ex1") return builtin::ex1();
  if (name == "ex2") return builtin::ex2();
  if (name == "ex3") return builtin::ex3();
  if (name == "quartic") return builtin::quartic();
  if (name == "kvm") return builtin::kvm();
  if (name.rfind("linear:", 0) == 0 ||
      (name.rfind("linear(", 0) == 0 && name.back() == ')')) {
    std::string arg = name[6] == ':' ? name.substr(7)
                                     : name.substr(7, name.size() - 8);
    try {
      return builtin::linear(std::stod(arg));
    } catch (const std::invalid_argument&) {
      throw UnknownModel("bad linear parameter '" + arg + "'");
    }
  }
  if (name.rfind("psi2:", 0) == 0) {
    auto expr = std::make_shared<Expression>(Expression::parse(name.substr(5)));
    return PotentialModel::dual_tabulated(name,
                                          [expr](double z) { return (*expr)(z); });
  }
  if (name.rfind("phi1:", 0) == 0) {
    auto expr = std::make_shared<Expression>(Expression::parse(name.substr(5)));
    auto phi = std::make_shared<Antiderivative>(
        [expr](double u) { return (*expr)(u); }, 50.0, 800);
    return PotentialModel::primal(
        name, [phi](double u) { return (*phi)(u); },
        [expr](double u) { return (*expr)(u); },
        [expr](double u) {
          const double h = 1e-5 * std::max(1.0, std::abs(u));
          return ((*expr)(u + h) - (*expr)(u - h)) / (2.0 * h);
        },
        50.0);
  }
  throw UnknownModel("unknown model '" + name + "'");
}

}  // namespace latwave
