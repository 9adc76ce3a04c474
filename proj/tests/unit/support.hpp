#pragma once
// Shared fixtures and independent reference computations for the unit tests.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "tvcert/grid.hpp"

namespace tvtest {

using namespace tvcert;

inline ScalarField random_scalar(const DomainPtr& d, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  ScalarField u(d);
  for (std::size_t k = 0; k < u.size(); ++k)
    if (d->mask()[k]) u[k] = n(rng);
  return u;
}

inline VectorField random_vector(const DomainPtr& d, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  VectorField g(d);
  for (std::size_t k = 0; k < g.size(); ++k) {
    g.x()[k] = n(rng);
    g.y()[k] = n(rng);
  }
  return g;
}

inline ScalarField ones_on(const DomainPtr& d) {
  ScalarField u(d);
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = d->mask()[k] ? 1.0 : 0.0;
  return u;
}

/// Forward difference by direct loops; zero on faces that leave the mask.
inline void reference_gradient(const ScalarField& u, std::vector<double>& gx, std::vector<double>& gy) {
  const GridDomain& d = u.domain();
  const double h = d.spacing();
  gx.assign(u.size(), 0.0);
  gy.assign(u.size(), 0.0);
  for (int i = 0; i < d.height(); ++i)
    for (int j = 0; j < d.width(); ++j) {
      if (!d.inside(i, j)) continue;
      const std::size_t k = d.index(i, j);
      if (j + 1 < d.width() && d.inside(i, j + 1)) gx[k] = (u(i, j + 1) - u(i, j)) / h;
      if (i + 1 < d.height() && d.inside(i + 1, j)) gy[k] = (u(i + 1, j) - u(i, j)) / h;
    }
}

inline double reference_tv(const ScalarField& u) {
  std::vector<double> gx, gy;
  reference_gradient(u, gx, gy);
  const double h = u.domain().spacing();
  long double s = 0.0L;
  for (std::size_t k = 0; k < u.size(); ++k) s += std::hypot(gx[k], gy[k]);
  return static_cast<double>(s) * h * h;
}

/// Anti-aliased disc indicator over a three-pixel ramp.
inline ScalarField smoothed_disc(const DomainPtr& d, double cx, double cy, double r, double width_px = 3.0) {
  ScalarField u(d);
  const double h = d->spacing();
  for (int i = 0; i < d->height(); ++i)
    for (int j = 0; j < d->width(); ++j) {
      const double sd = std::hypot(d->x_center(j) - cx, d->y_center(i) - cy) - r;
      u(i, j) = std::clamp(0.5 - sd / (width_px * h), 0.0, 1.0);
    }
  return u;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace tvtest
