// Independent reference implementations used only by the tests. These
// deliberately take the naive textbook route (normal equations, explicit
// Euler, direct bilinear formula) so they share no code path with the
// library implementations they check.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace oracles {

/// Least-squares polynomial fit via normal equations (A^T A c = A^T y)
/// solved with Gaussian elimination and partial pivoting.
inline std::vector<double> polyfit_normal_equations(std::span<const double> x,
                                                    std::span<const double> y, int degree) {
  const std::size_t n = x.size();
  const std::size_t m = static_cast<std::size_t>(degree) + 1;
  std::vector<double> ata(m * m, 0.0), aty(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(m);
    double v = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
      row[j] = v;
      v *= x[i];
    }
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t k = 0; k < m; ++k) ata[j * m + k] += row[j] * row[k];
      aty[j] += row[j] * y[i];
    }
  }
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::abs(ata[r * m + col]) > std::abs(ata[piv * m + col])) piv = r;
    if (ata[piv * m + col] == 0.0) throw std::runtime_error("oracle: singular normal equations");
    if (piv != col) {
      for (std::size_t k = 0; k < m; ++k) std::swap(ata[piv * m + k], ata[col * m + k]);
      std::swap(aty[piv], aty[col]);
    }
    for (std::size_t r = col + 1; r < m; ++r) {
      const double f = ata[r * m + col] / ata[col * m + col];
      for (std::size_t k = col; k < m; ++k) ata[r * m + k] -= f * ata[col * m + k];
      aty[r] -= f * aty[col];
    }
  }
  std::vector<double> c(m);
  for (std::size_t col = m; col-- > 0;) {
    double s = aty[col];
    for (std::size_t k = col + 1; k < m; ++k) s -= ata[col * m + k] * c[k];
    c[col] = s / ata[col * m + col];
  }
  return c;
}

/// Fall delay by brute-force explicit Euler on C dv/dt = -i(vgs(t), v):
/// fixed 1 fs steps, 50% crossings by linear interpolation.
inline double euler_tphl(const std::function<double(double, double)>& current, double vdd,
                         double c_load, double t_rise, double t_start, double dt = 1e-15) {
  auto vin = [&](double t) {
    if (t < t_start) return 0.0;
    if (t_rise <= 0.0) return vdd;
    const double s = (t - t_start) / t_rise;
    return s >= 1.0 ? vdd : vdd * s;
  };
  const double target = 0.5 * vdd;
  double t = 0.0, v = vdd;
  for (long k = 0; k < 500'000'000L; ++k) {
    const double vn = v - dt * current(vin(t), v) / c_load;
    if (vn <= target) {
      const double t_out50 = t + dt * (v - target) / (v - vn);
      return t_out50 - (t_start + 0.5 * t_rise);
    }
    t += dt;
    v = vn;
  }
  throw std::runtime_error("oracle: euler integration did not reach the crossing");
}

/// Textbook bilinear interpolation on one cell.
inline double bilinear(double x1, double x2, double y1, double y2, double q11, double q21,
                       double q12, double q22, double x, double y) {
  return (q11 * (x2 - x) * (y2 - y) + q21 * (x - x1) * (y2 - y) + q12 * (x2 - x) * (y - y1) +
          q22 * (x - x1) * (y - y1)) /
         ((x2 - x1) * (y2 - y1));
}

/// Trapezoidal integral of the sampled current; pairs with the charge
/// C * (v(0) - v(end)) removed from the load.
template <typename Samples>
inline double trapezoid_charge(const Samples& samples) {
  double q = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i)
    q += 0.5 * (samples[i].i_dn + samples[i - 1].i_dn) * (samples[i].t - samples[i - 1].t);
  return q;
}

}  // namespace oracles
