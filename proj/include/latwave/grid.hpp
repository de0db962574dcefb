#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include "latwave/errors.hpp"

namespace latwave {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Uniform grid on the periodicity cell [-pi, pi), nodes phi_i = -pi + 2*pi*i/M.
///
/// The sample count must be even so that phi + pi is again a grid point.
/// Nodes are recomputed from M on demand; nothing floating is stored.
struct PeriodicGrid {
  int size = 0;

  PeriodicGrid() = default;
  explicit PeriodicGrid(int m) : size(m) {
    if (m < 4 || m % 2 != 0)
      throw OddGrid("grid size must be even and >= 4, got " + std::to_string(m));
  }

  double spacing() const { return two_pi / size; }
  double node(int i) const { return -pi + two_pi * i / size; }
  bool operator==(const PeriodicGrid&) const = default;
};

/// Samples of a 2*pi-periodic function on a PeriodicGrid.
struct Profile {
  PeriodicGrid grid;
  std::vector<double> values;

  Profile() = default;
  Profile(PeriodicGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (static_cast<int>(values.size()) != grid.size)
      throw GridMismatch("profile has " + std::to_string(values.size()) +
                         " samples on a grid of size " + std::to_string(grid.size));
  }

  int size() const { return grid.size; }
  double& operator[](int i) { return values[i]; }
  double operator[](int i) const { return values[i]; }
};

inline Profile make_profile(PeriodicGrid g, const std::function<double(double)>& f) {
  std::vector<double> v(g.size);
  for (int i = 0; i < g.size; ++i) v[i] = f(g.node(i));
  return Profile(g, std::move(v));
}

inline Profile zero_profile(PeriodicGrid g) {
  return Profile(g, std::vector<double>(g.size, 0.0));
}

inline void require_same_grid(const Profile& a, const Profile& b) {
  if (!(a.grid == b.grid)) throw GridMismatch("profiles live on different grids");
}

/// Normalized integral mean, the uniform-grid Riemann sum of the cell average.
inline double mean(const Profile& p) {
  double s = 0.0;
  for (double v : p.values) s += v;
  return s / p.size();
}

/// Normalized pairing <a, b> = mean(a * b).
inline double inner(const Profile& a, const Profile& b) {
  require_same_grid(a, b);
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s / a.size();
}

inline double norm2(const Profile& p) { return std::sqrt(inner(p, p)); }

inline double max_abs(const Profile& p) {
  double m = 0.0;
  for (double v : p.values) m = std::max(m, std::abs(v));
  return m;
}

inline void subtract_mean(Profile& p) {
  double m = mean(p);
  for (double& v : p.values) v -= m;
}

/// Rotation by half a period: (TP)(phi) = P(phi + pi). An involution.
inline Profile shift_pi(const Profile& p) {
  const int m = p.size();
  Profile out = p;
  const int half = m / 2;
  for (int i = 0; i < m; ++i) out[i] = p[(i + half) % m];
  return out;
}

/// Rotate samples so that index `shift` moves to index 0.
inline Profile rotate(const Profile& p, int shift) {
  const int m = p.size();
  shift = ((shift % m) + m) % m;
  Profile out = p;
  for (int i = 0; i < m; ++i) out[i] = p[(i + shift) % m];
  return out;
}

namespace detail {

// Decompose k into whole grid steps r plus fractional part w in [0, 1).
// Near-integer ratios are snapped so that nominally on-grid wave numbers
// (k = m * spacing computed in floating point) take the exact-lookup path.
struct GridOffset {
  long long whole;
  double frac;
  bool on_grid;
};

inline GridOffset split_offset(double k, double spacing) {
  const double x = k / spacing;
  double r = std::floor(x);
  double w = x - r;
  constexpr double snap = 1e-9;
  if (w < snap) {
    w = 0.0;
  } else if (w > 1.0 - snap) {
    w = 0.0;
    r += 1.0;
  }
  return {static_cast<long long>(r), w, w == 0.0};
}

// cos/sin of 2*pi*j/M with exact argument reduction of the integer j.
inline double cos_frac(long long j, int m) {
  long long r = j % m;
  if (r < 0) r += m;
  return std::cos(two_pi * static_cast<double>(r) / m);
}

}  // namespace detail

/// Snap a wave number to the nearest grid multiple of 2*pi/M.
inline double snap_to_grid(double k, const PeriodicGrid& g) {
  return std::round(k / g.spacing()) * g.spacing();
}

/// Translation-invariant (circulant) operator on profiles, stored as its kernel.
///
/// An operator with real Fourier symbol s_n (n = 0..M/2, even in n) acts as a
/// circular convolution with kernel
///   c_d = (1/M) [ s_0 + 2 sum_{n=1}^{M/2-1} s_n cos(2 pi n d / M) + s_{M/2} cos(pi d) ],
/// which is symmetric with respect to the normalized pairing.
class CirculantOperator {
 public:
  CirculantOperator(PeriodicGrid grid, const std::vector<double>& symbol)
      : grid_(grid), kernel_(grid.size) {
    const int m = grid.size;
    const int half = m / 2;
    if (static_cast<int>(symbol.size()) != half + 1)
      throw GridMismatch("symbol length must be M/2 + 1");
    for (int d = 0; d < m; ++d) {
      long double acc = symbol[0];
      for (int n = 1; n < half; ++n)
        acc += 2.0L * symbol[n] * detail::cos_frac(static_cast<long long>(n) * d, m);
      acc += static_cast<long double>(symbol[half]) * ((d % 2 == 0) ? 1.0L : -1.0L);
      kernel_[d] = static_cast<double>(acc / m);
    }
  }

  const PeriodicGrid& grid() const { return grid_; }
  const std::vector<double>& kernel() const { return kernel_; }

  Profile apply(const Profile& p) const {
    if (!(p.grid == grid_)) throw GridMismatch("operator and profile grids differ");
    const int m = grid_.size;
    Profile out = zero_profile(grid_);
    for (int i = 0; i < m; ++i) {
      double acc = 0.0;
      // out_i = sum_d kernel_d * p_{(i-d) mod M}, split to avoid modulo in the loop
      int j = i;
      for (int d = 0; d <= i; ++d, --j) acc += kernel_[d] * p[j];
      j = m - 1;
      for (int d = i + 1; d < m; ++d, --j) acc += kernel_[d] * p[j];
      out[i] = acc;
    }
    return out;
  }

 private:
  PeriodicGrid grid_;
  std::vector<double> kernel_;
};

/// Fourier symbol of the windowed average (A_k P)(phi) = (1/2) int_{phi-k}^{phi+k} P.
///
/// The average is evaluated through the antiderivative of the trigonometric
/// interpolant of the samples; for off-grid k the antiderivative is linearly
/// interpolated between nodes, which gives the O(spacing^2) error model. For
/// on-grid k the lookup is exact, so trigonometric polynomials up to the
/// Nyquist mode are averaged exactly.
inline std::vector<double> sliding_average_symbol(const PeriodicGrid& g, double k) {
  if (!(k > 0.0) || !(k < pi)) throw KOutOfRange("window k must lie in (0, pi)");
  const int half = g.size / 2;
  const double dphi = g.spacing();
  const auto off = detail::split_offset(k, dphi);
  if (off.whole == 0 && off.on_grid)
    throw KOutOfRange("window is below the grid resolution");
  if (off.whole >= half && off.on_grid)
    throw KOutOfRange("window reaches the half-period, where the average degenerates");
  std::vector<double> s(half + 1);
  s[0] = (off.whole + off.frac) * dphi;  // response to the constant mode
  const int m = g.size;
  auto sin_frac = [m](long long j) {
    long long r = j % m;
    if (r < 0) r += m;
    return std::sin(two_pi * static_cast<double>(r) / m);
  };
  for (int n = 1; n <= half; ++n) {
    const double lo = sin_frac(n * off.whole);
    const double hi = sin_frac(n * (off.whole + 1));
    s[n] = ((1.0 - off.frac) * lo + off.frac * hi) / n;
  }
  return s;
}

/// Build the windowed-average operator for 0 < k < pi.
inline CirculantOperator sliding_average_operator(const PeriodicGrid& g, double k) {
  return CirculantOperator(g, sliding_average_symbol(g, k));
}

/// (A_k P)(phi) = (1/2) int_{phi-k}^{phi+k} P. Mean-zero inputs give mean-zero
/// outputs; any residual mean from rounding is subtracted.
inline Profile sliding_average(const Profile& p, double k) {
  Profile out = sliding_average_operator(p.grid, k).apply(p);
  if (std::abs(mean(p)) <= 1e-10 * (1.0 + max_abs(p))) subtract_mean(out);
  return out;
}

/// Branch of the normalized wavetrain equation.
/// low:  wave number k = kappa <= pi/2, operator kappa^{-1} A_kappa.
/// high: wave number k = pi - kappa >= pi/2, operator -kappa^{-1} A_kappa T.
enum class Branch { low, high };

inline const char* to_string(Branch b) { return b == Branch::low ? "low" : "high"; }

inline void require_kappa(double kappa) {
  if (!(kappa > 0.0) || !(kappa <= pi / 2 + 1e-15))
    throw KOutOfRange("kappa must lie in (0, pi/2]");
}

/// Normalized averaging operator kappa^{-1} A_kappa (low branch).
inline Profile scaled_average(const Profile& p, double kappa) {
  require_kappa(kappa);
  Profile out = sliding_average(p, kappa);
  for (double& v : out.values) v /= kappa;
  return out;
}

/// Reflected normalized operator -kappa^{-1} A_kappa T (high branch).
/// Requires a mean-zero input profile.
inline Profile reflected_average(const Profile& p, double kappa) {
  require_kappa(kappa);
  if (std::abs(mean(p)) > 1e-10)
    throw MeanNotZero("high-branch average requires a mean-zero profile");
  Profile out = sliding_average(shift_pi(p), kappa);
  for (double& v : out.values) v = -v / kappa;
  return out;
}

inline Profile branch_average(const Profile& p, double kappa, Branch b) {
  return b == Branch::low ? scaled_average(p, kappa) : reflected_average(p, kappa);
}

/// Build the fused branch operator as a single circulant kernel.
inline CirculantOperator branch_operator(const PeriodicGrid& g, double kappa, Branch b) {
  require_kappa(kappa);
  std::vector<double> s = sliding_average_symbol(g, kappa);
  if (b == Branch::low) {
    for (double& v : s) v /= kappa;
  } else {
    // -A_kappa T has symbol -(-1)^n s_n
    for (std::size_t n = 0; n < s.size(); ++n)
      s[n] *= (n % 2 == 0 ? -1.0 : 1.0) / kappa;
  }
  return CirculantOperator(g, s);
}

namespace detail {

// Linearly interpolated sample lookup p(phi_i + delta), on-grid offsets exact.
inline Profile sample_shift(const Profile& p, double delta) {
  const int m = p.size();
  const auto off = split_offset(delta, p.grid.spacing());
  Profile out = p;
  for (int i = 0; i < m; ++i) {
    long long j = (static_cast<long long>(i) + off.whole) % m;
    if (j < 0) j += m;
    if (off.on_grid) {
      out[i] = p[static_cast<int>(j)];
    } else {
      int j1 = static_cast<int>((j + 1) % m);
      out[i] = (1.0 - off.frac) * p[static_cast<int>(j)] + off.frac * p[j1];
    }
  }
  return out;
}

}  // namespace detail

/// Centred difference (nabla_k P)(phi) = (P(phi+k) - P(phi-k)) / 2 with the same
/// on-grid / interpolated lookup convention as the windowed average.
inline Profile centered_difference(const Profile& p, double k) {
  if (!(k > 0.0) || !(k < pi)) throw KOutOfRange("offset k must lie in (0, pi)");
  Profile fwd = detail::sample_shift(p, k);
  Profile bwd = detail::sample_shift(p, -k);
  Profile out = zero_profile(p.grid);
  for (int i = 0; i < p.size(); ++i) out[i] = 0.5 * (fwd[i] - bwd[i]);
  return out;
}

/// Distance to the cone of admissible profiles: even, unimodal with the maximum
/// at phi = 0 and minimum at phi = +-pi, and zero average. Returns the largest
/// of the three defects, normalized by (1 + max|P|).
inline double cone_distance(const Profile& p) {
  const int m = p.size();
  const int half = m / 2;
  const double scale = 1.0 + max_abs(p);
  double d_mean = std::abs(mean(p));
  double d_even = 0.0;
  for (int i = 1; i < m; ++i) d_even = std::max(d_even, std::abs(p[i] - p[m - i]));
  // non-decreasing from phi = -pi (index 0) up to phi = 0 (index M/2);
  // the defect is the largest drawdown below the running maximum
  double d_mono = 0.0, running = p[0];
  for (int i = 1; i <= half; ++i) {
    d_mono = std::max(d_mono, running - p[i]);
    running = std::max(running, p[i]);
  }
  return std::max({d_mean, d_even, d_mono}) / scale;
}

/// Trigonometric interpolant through the samples of a profile; evaluates the
/// unique band-limited representative at arbitrary phase.
class TrigInterpolant {
 public:
  explicit TrigInterpolant(const Profile& p) {
    const int m = p.size();
    const int half = m / 2;
    cos_coef_.assign(half + 1, 0.0);
    sin_coef_.assign(half + 1, 0.0);
    for (int n = 0; n <= half; ++n) {
      long double ca = 0.0L, sa = 0.0L;
      const double sign = (n % 2 == 0) ? 1.0 : -1.0;  // cos(n phi_i) = (-1)^n cos(2 pi n i / M)
      for (int i = 0; i < m; ++i) {
        long long r = (static_cast<long long>(n) * i) % m;
        const double ang = two_pi * static_cast<double>(r) / m;
        ca += p[i] * sign * std::cos(ang);
        sa += p[i] * sign * std::sin(ang);
      }
      cos_coef_[n] = static_cast<double>(2.0L * ca / m);
      sin_coef_[n] = static_cast<double>(2.0L * sa / m);
    }
  }

  double operator()(double phi) const {
    const int half = static_cast<int>(cos_coef_.size()) - 1;
    double acc = 0.5 * cos_coef_[0];
    for (int n = 1; n < half; ++n)
      acc += cos_coef_[n] * std::cos(n * phi) + sin_coef_[n] * std::sin(n * phi);
    acc += 0.5 * cos_coef_[half] * std::cos(half * phi);
    return acc;
  }

 private:
  std::vector<double> cos_coef_, sin_coef_;
};

}  // namespace latwave
