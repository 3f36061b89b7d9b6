#include "invchar/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "invchar/errors.hpp"

namespace invchar {

namespace {

GoodnessOfFit gof_impl(std::span<const double> y, std::span<const double> yhat, int n_params) {
  const std::size_t n = y.size();
  GoodnessOfFit g;
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);

  double sst = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - yhat[i];
    g.sse += r * r;
    const double d = y[i] - mean;
    sst += d * d;
    scale += y[i] * y[i];
  }

  const long dof = static_cast<long>(n) - n_params;
  g.rmse = dof > 0 ? std::sqrt(g.sse / static_cast<double>(dof)) : 0.0;

  // Treat variance below rounding noise as exactly zero.
  const double zero = scale * 1e-28 + std::numeric_limits<double>::min();
  if (sst > zero) {
    g.r2 = 1.0 - g.sse / sst;
  } else if (g.sse <= zero) {
    g.r2 = 1.0;
  } else {
    throw DegenerateDataError("gof: y has zero variance but the fit has residual");
  }
  return g;
}

}  // namespace

GoodnessOfFit gof(std::span<const double> y, std::span<const double> yhat, int n_params) {
  if (y.size() != yhat.size()) throw DomainError("gof: y/yhat size mismatch");
  if (!(static_cast<long>(y.size()) > n_params))
    throw DomainError("gof: need more samples than fitted parameters");
  if (n_params < 0) throw DomainError("gof: n_params must be >= 0");
  return gof_impl(y, yhat, n_params);
}

double poly_eval(const Polynomial& p, double x) {
  if (p.coeffs.empty()) throw DomainError("poly_eval: empty polynomial");
  double acc = 0.0;
  for (std::size_t k = p.coeffs.size(); k-- > 0;) acc = acc * x + p.coeffs[k];
  return acc;
}

PolyFitResult polyfit(std::span<const double> x, std::span<const double> y, int degree) {
  if (degree < 0) throw DomainError("polyfit: degree must be >= 0");
  const std::size_t n = x.size();
  const std::size_t m = static_cast<std::size_t>(degree) + 1;
  if (y.size() != n) throw DomainError("polyfit: x/y size mismatch");
  if (n < m) throw DomainError("polyfit: need at least degree+1 samples");

  // Vandermonde design matrix, row-major n x m.
  std::vector<double> a(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    double v = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
      a[i * m + j] = v;
      v *= x[i];
    }
  }
  std::vector<double> b(y.begin(), y.end());

  std::vector<double> col_scale(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i * m + j] * a[i * m + j];
    col_scale[j] = std::sqrt(s);
  }

  // Householder QR, reflections applied to b as we go.
  std::vector<double> v(n);
  for (std::size_t k = 0; k < m; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < n; ++i) norm += a[i * m + k] * a[i * m + k];
    norm = std::sqrt(norm);
    if (!(norm > col_scale[k] * 1e-12) || col_scale[k] == 0.0)
      throw RankDeficientError("polyfit: design matrix is rank deficient at column " +
                               std::to_string(k));
    const double alpha = a[k * m + k] > 0.0 ? -norm : norm;
    double vnorm2 = 0.0;
    v[k] = a[k * m + k] - alpha;
    vnorm2 += v[k] * v[k];
    for (std::size_t i = k + 1; i < n; ++i) {
      v[i] = a[i * m + k];
      vnorm2 += v[i] * v[i];
    }
    a[k * m + k] = alpha;
    for (std::size_t i = k + 1; i < n; ++i) a[i * m + k] = 0.0;
    if (vnorm2 == 0.0) continue;
    for (std::size_t j = k + 1; j < m; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < n; ++i) dot += v[i] * a[i * m + j];
      const double f = 2.0 * dot / vnorm2;
      for (std::size_t i = k; i < n; ++i) a[i * m + j] -= f * v[i];
    }
    double dot = 0.0;
    for (std::size_t i = k; i < n; ++i) dot += v[i] * b[i];
    const double f = 2.0 * dot / vnorm2;
    for (std::size_t i = k; i < n; ++i) b[i] -= f * v[i];
  }

  PolyFitResult res;
  res.poly.coeffs.assign(m, 0.0);
  for (std::size_t k = m; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < m; ++j) s -= a[k * m + j] * res.poly.coeffs[j];
    res.poly.coeffs[k] = s / a[k * m + k];
  }

  std::vector<double> yhat(n);
  for (std::size_t i = 0; i < n; ++i) yhat[i] = poly_eval(res.poly, x[i]);
  res.gof = gof_impl(y, yhat, static_cast<int>(m));
  return res;
}

namespace {

std::vector<double> sorted_unique(std::span<const double> raw, const char* axis) {
  if (raw.empty()) throw DegenerateAxisError(std::string("surface: empty ") + axis + " axis");
  std::vector<double> v(raw.begin(), raw.end());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  if (v.size() < 2)
    throw DegenerateAxisError(std::string("surface: need at least 2 distinct ") + axis +
                              " values");
  for (double q : v)
    if (!std::isfinite(q))
      throw DomainError(std::string("surface: non-finite ") + axis + " coordinate");
  return v;
}

std::size_t exact_index(const std::vector<double>& axis, double q, const char* name) {
  auto it = std::lower_bound(axis.begin(), axis.end(), q);
  if (it == axis.end() || *it != q)
    throw DomainError(std::string("surface: sample ") + name + " coordinate is not on the axis");
  return static_cast<std::size_t>(it - axis.begin());
}

// Cell whose bilinear form evaluates q; clamped to the boundary cells so
// out-of-hull queries extrapolate the nearest cell.
std::size_t cell_index(const std::vector<double>& axis, double q) {
  const std::size_t n = axis.size();
  auto it = std::upper_bound(axis.begin(), axis.end(), q);
  if (it == axis.begin()) return 0;
  std::size_t i = static_cast<std::size_t>(it - axis.begin()) - 1;
  return std::min(i, n - 2);
}

}  // namespace

GridSurface surface_build(std::span<const double> xs_raw, std::span<const double> ys_raw,
                          std::span<const GridSample> samples) {
  GridSurface s;
  s.xs = sorted_unique(xs_raw, "x");
  s.ys = sorted_unique(ys_raw, "y");
  const std::size_t nx = s.xs.size();
  const std::size_t ny = s.ys.size();
  s.zs.assign(nx * ny, 0.0);
  std::vector<char> filled(nx * ny, 0);

  for (const GridSample& g : samples) {
    if (!std::isfinite(g.z)) throw DomainError("surface: non-finite sample value");
    const std::size_t i = exact_index(s.xs, g.x, "x");
    const std::size_t j = exact_index(s.ys, g.y, "y");
    const std::size_t idx = i * ny + j;
    if (filled[idx]) {
      if (s.zs[idx] != g.z) {
        char msg[128];
        std::snprintf(msg, sizeof(msg),
                      "surface: conflicting samples at node (%.9g, %.9g)", g.x, g.y);
        throw DuplicateSampleError(msg);
      }
      continue;
    }
    s.zs[idx] = g.z;
    filled[idx] = 1;
  }

  std::vector<std::pair<double, double>> missing;
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j)
      if (!filled[i * ny + j]) missing.emplace_back(s.xs[i], s.ys[j]);
  if (!missing.empty()) {
    std::string msg = "surface: incomplete grid, missing";
    const std::size_t shown = std::min<std::size_t>(missing.size(), 8);
    for (std::size_t k = 0; k < shown; ++k) {
      char cell[64];
      std::snprintf(cell, sizeof(cell), " (%.9g, %.9g)", missing[k].first, missing[k].second);
      msg += cell;
    }
    if (missing.size() > shown)
      msg += " and " + std::to_string(missing.size() - shown) + " more";
    throw IncompleteGridError(msg, std::move(missing));
  }
  return s;
}

SurfaceValue surface_eval(const GridSurface& s, double x, double y) {
  if (s.xs.size() < 2 || s.ys.size() < 2 || s.zs.size() != s.xs.size() * s.ys.size())
    throw DomainError("surface: malformed grid");
  const std::size_t i = cell_index(s.xs, x);
  const std::size_t j = cell_index(s.ys, y);
  const double tx = (x - s.xs[i]) / (s.xs[i + 1] - s.xs[i]);
  const double ty = (y - s.ys[j]) / (s.ys[j + 1] - s.ys[j]);
  const double z00 = s.at(i, j);
  const double z10 = s.at(i + 1, j);
  const double z01 = s.at(i, j + 1);
  const double z11 = s.at(i + 1, j + 1);
  SurfaceValue out;
  out.value = z00 * (1.0 - tx) * (1.0 - ty) + z10 * tx * (1.0 - ty) +
              z01 * (1.0 - tx) * ty + z11 * tx * ty;
  out.extrapolated = x < s.xs.front() || x > s.xs.back() || y < s.ys.front() || y > s.ys.back();
  return out;
}

void to_json(nlohmann::ordered_json& j, const Polynomial& p) {
  j = nlohmann::ordered_json{{"coefficients", p.coeffs}};
}

void from_json(const nlohmann::ordered_json& j, Polynomial& p) {
  j.at("coefficients").get_to(p.coeffs);
  if (p.coeffs.empty()) throw IoError("polynomial: empty coefficient list");
}

void to_json(nlohmann::ordered_json& j, const GridSurface& s) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < s.xs.size(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < s.ys.size(); ++k) row.push_back(s.at(i, k));
    rows.push_back(std::move(row));
  }
  j = nlohmann::ordered_json{{"xs", s.xs}, {"ys", s.ys}, {"zs", std::move(rows)}};
}

void from_json(const nlohmann::ordered_json& j, GridSurface& s) {
  j.at("xs").get_to(s.xs);
  j.at("ys").get_to(s.ys);
  const auto& rows = j.at("zs");
  if (rows.size() != s.xs.size()) throw IoError("surface: zs row count does not match xs");
  s.zs.clear();
  s.zs.reserve(s.xs.size() * s.ys.size());
  for (const auto& row : rows) {
    if (row.size() != s.ys.size()) throw IoError("surface: zs column count does not match ys");
    for (const auto& v : row) s.zs.push_back(v.get<double>());
  }
  if (!std::is_sorted(s.xs.begin(), s.xs.end()) ||
      std::adjacent_find(s.xs.begin(), s.xs.end()) != s.xs.end() ||
      !std::is_sorted(s.ys.begin(), s.ys.end()) ||
      std::adjacent_find(s.ys.begin(), s.ys.end()) != s.ys.end())
    throw IoError("surface: axes must be strictly increasing");
}

}  // namespace invchar
