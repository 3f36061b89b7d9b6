#pragma once

#include <span>
#include <vector>

#include <json.hpp>

namespace invchar {

/// Real polynomial, ascending-degree coefficients (coeffs[k] multiplies x^k).
struct Polynomial {
  std::vector<double> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

struct GoodnessOfFit {
  double sse = 0.0;   // sum of squared errors
  double rmse = 0.0;  // sqrt(sse / (n - n_params))
  double r2 = 0.0;    // coefficient of determination
};

struct PolyFitResult {
  Polynomial poly;
  GoodnessOfFit gof;
};

/// Least-squares polynomial fit, solved by Householder QR of the
/// Vandermonde system (not via normal equations). Throws RankDeficientError
/// when the design matrix loses rank, e.g. duplicate x with too high a degree.
PolyFitResult polyfit(std::span<const double> x, std::span<const double> y, int degree);

/// Horner evaluation.
double poly_eval(const Polynomial& p, double x);

/// Fit statistics for predictions yhat of data y with n_params fitted
/// parameters. Requires y.size() > n_params. When y has zero variance,
/// r2 is 1 for a zero-residual fit and DegenerateDataError otherwise.
GoodnessOfFit gof(std::span<const double> y, std::span<const double> yhat, int n_params);

/// Rectangular sample grid with strictly increasing axes;
/// zs is row-major, zs[i * ys.size() + j] belongs to (xs[i], ys[j]).
struct GridSurface {
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> zs;

  double at(std::size_t i, std::size_t j) const { return zs[i * ys.size() + j]; }
};

struct GridSample {
  double x;
  double y;
  double z;
};

struct SurfaceValue {
  double value = 0.0;
  bool extrapolated = false;
};

/// Assembles a GridSurface from scattered (x, y, z) samples whose (x, y)
/// pairs must cover the full Cartesian grid of the distinct sorted values
/// in xs_raw and ys_raw. Missing nodes raise IncompleteGridError (listing
/// the absent cells), conflicting duplicates raise DuplicateSampleError.
GridSurface surface_build(std::span<const double> xs_raw, std::span<const double> ys_raw,
                          std::span<const GridSample> samples);

/// Bilinear interpolation inside the grid hull; outside it the nearest
/// boundary cell is extended linearly and the result is flagged.
/// Queries at grid nodes return the stored value exactly.
SurfaceValue surface_eval(const GridSurface& s, double x, double y);

void to_json(nlohmann::ordered_json& j, const Polynomial& p);
void from_json(const nlohmann::ordered_json& j, Polynomial& p);
void to_json(nlohmann::ordered_json& j, const GridSurface& s);
void from_json(const nlohmann::ordered_json& j, GridSurface& s);

}  // namespace invchar
