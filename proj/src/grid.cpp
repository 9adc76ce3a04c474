#include "tvcert/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tvcert/kernels.hpp"
#include "tvcert/parallel.hpp"
#include "tvcert/summation.hpp"

namespace tvcert {

GridDomain::GridDomain(int height, int width, double spacing)
    : GridDomain(height, width, spacing,
                 std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(height, 0)) *
                                               std::max(width, 0),
                                           1)) {}

GridDomain::GridDomain(int height, int width, double spacing, std::vector<std::uint8_t> mask)
    : height_(height), width_(width), spacing_(spacing), mask_(std::move(mask)) {
  if (height_ <= 0 || width_ <= 0) throw std::invalid_argument("grid dimensions must be positive");
  if (!(spacing_ > 0.0) || !std::isfinite(spacing_))
    throw std::invalid_argument("grid spacing must be positive and finite");
  if (mask_.size() != size()) throw std::invalid_argument("mask size does not match grid");
  build();
}

void GridDomain::build() {
  for (auto& m : mask_) m = m ? 1 : 0;
  mask_count_ = static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), 1));

  bool has_interior = false;
  for (int i = 0; i < height_ && !has_interior; ++i)
    for (int j = 0; j < width_; ++j)
      if (inside(i, j) && inside(i - 1, j) && inside(i + 1, j) && inside(i, j - 1) &&
          inside(i, j + 1)) {
        has_interior = true;
        break;
      }
  if (!has_interior) throw std::invalid_argument("mask has no interior pixel");

  valid_x_.assign(size(), 0.0);
  valid_y_.assign(size(), 0.0);
  for (int i = 0; i < height_; ++i)
    for (int j = 0; j < width_; ++j) {
      const std::size_t k = index(i, j);
      if (!mask_[k]) continue;
      if (inside(i, j + 1)) valid_x_[k] = 1.0;
      if (inside(i + 1, j)) valid_y_[k] = 1.0;
    }
  boundary_edges_ = compute_boundary_edges(*this);

  // Two-pass chessboard distance transform; outside the grid counts as exterior.
  exterior_distance_.assign(size(), 0);
  for (int i = 0; i < height_; ++i)
    for (int j = 0; j < width_; ++j)
      if (mask_[index(i, j)])
        exterior_distance_[index(i, j)] =
            std::min({i + 1, height_ - i, j + 1, width_ - j});
  auto relax = [&](int i, int j, int di, int dj) {
    const int r = i + di;
    const int c = j + dj;
    if (r < 0 || c < 0 || r >= height_ || c >= width_) return;
    int& d = exterior_distance_[index(i, j)];
    d = std::min(d, exterior_distance_[index(r, c)] + 1);
  };
  for (int i = 0; i < height_; ++i)
    for (int j = 0; j < width_; ++j) {
      if (!mask_[index(i, j)]) continue;
      relax(i, j, -1, -1);
      relax(i, j, -1, 0);
      relax(i, j, -1, 1);
      relax(i, j, 0, -1);
    }
  for (int i = height_ - 1; i >= 0; --i)
    for (int j = width_ - 1; j >= 0; --j) {
      if (!mask_[index(i, j)]) continue;
      relax(i, j, 1, 1);
      relax(i, j, 1, 0);
      relax(i, j, 1, -1);
      relax(i, j, 0, 1);
    }
}

bool GridDomain::operator==(const GridDomain& other) const {
  return height_ == other.height_ && width_ == other.width_ && spacing_ == other.spacing_ &&
         mask_ == other.mask_;
}

std::vector<BoundaryEdge> compute_boundary_edges(const GridDomain& domain) {
  std::vector<BoundaryEdge> edges;
  for (int i = 0; i < domain.height(); ++i)
    for (int j = 0; j < domain.width(); ++j) {
      if (!domain.inside(i, j)) continue;
      if (!domain.inside(i, j + 1)) edges.push_back({i, j, Direction::east});
      if (!domain.inside(i, j - 1)) edges.push_back({i, j, Direction::west});
      if (!domain.inside(i + 1, j)) edges.push_back({i, j, Direction::south});
      if (!domain.inside(i - 1, j)) edges.push_back({i, j, Direction::north});
    }
  return edges;
}

DomainPtr make_domain(int height, int width, double spacing) {
  return std::make_shared<const GridDomain>(height, width, spacing);
}

DomainPtr make_domain(int height, int width, double spacing, std::vector<std::uint8_t> mask) {
  return std::make_shared<const GridDomain>(height, width, spacing, std::move(mask));
}

bool same_domain(const DomainPtr& a, const DomainPtr& b) {
  return a == b || (a && b && *a == *b);
}

// --- ScalarField ---------------------------------------------------------

ScalarField::ScalarField(DomainPtr domain) : domain_(std::move(domain)) {
  values_.assign(domain_->size(), 0.0);
}

ScalarField::ScalarField(DomainPtr domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (values_.size() != domain_->size())
    throw std::invalid_argument("scalar field size does not match its domain");
  validate();
}

void ScalarField::validate() {
  const auto mask = domain_->mask();
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!mask[k]) {
      values_[k] = 0.0;
    } else if (!std::isfinite(values_[k])) {
      throw std::invalid_argument("scalar field has a non-finite value at pixel " +
                                  std::to_string(k));
    }
  }
}

// --- VectorField ---------------------------------------------------------

VectorField::VectorField(DomainPtr domain) : domain_(std::move(domain)) {
  x_.assign(domain_->size(), 0.0);
  y_.assign(domain_->size(), 0.0);
}

VectorField::VectorField(DomainPtr domain, std::vector<double> x, std::vector<double> y)
    : domain_(std::move(domain)), x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != domain_->size() || y_.size() != domain_->size())
    throw std::invalid_argument("vector field size does not match its domain");
  const auto mask = domain_->mask();
  for (std::size_t k = 0; k < x_.size(); ++k) {
    if (!mask[k]) {
      x_[k] = 0.0;
      y_[k] = 0.0;
    } else if (!std::isfinite(x_[k]) || !std::isfinite(y_[k])) {
      throw std::invalid_argument("vector field has a non-finite value at pixel " +
                                  std::to_string(k));
    }
  }
}

double VectorField::sup_norm() const {
  double best = 0.0;
  for (std::size_t k = 0; k < x_.size(); ++k) best = std::max(best, std::hypot(x_[k], y_[k]));
  return best;
}

bool VectorField::zero_extension_compatible(double tol) const {
  const auto vx = domain_->valid_x();
  const auto vy = domain_->valid_y();
  for (std::size_t k = 0; k < x_.size(); ++k) {
    if (vx[k] == 0.0 && std::abs(x_[k]) > tol) return false;
    if (vy[k] == 0.0 && std::abs(y_[k]) > tol) return false;
  }
  return true;
}

VectorField VectorField::truncated_to_compatible() const {
  VectorField out = *this;
  const auto vx = domain_->valid_x();
  const auto vy = domain_->valid_y();
  for (std::size_t k = 0; k < x_.size(); ++k) {
    if (vx[k] == 0.0) out.x_[k] = 0.0;
    if (vy[k] == 0.0) out.y_[k] = 0.0;
  }
  return out;
}

double GradientMeasure::total_mass() const { return pairwise_sum(weight); }

// --- operators -----------------------------------------------------------

VectorField discrete_gradient(const ScalarField& u) {
  const GridDomain& d = u.domain();
  VectorField g(u.domain_ptr());
  const auto& k = kernels::active();
  const double inv_h = 1.0 / d.spacing();
  const double* src = u.values().data();
  double* gx = g.x().data();
  double* gy = g.y().data();
  parallel_chunks(d.size(), [&](std::size_t b, std::size_t e) {
    k.forward_gradient(src, d.valid_x().data(), d.valid_y().data(), inv_h, d.width(), d.size(),
                       b, e, gx, gy);
  });
  return g;
}

ScalarField discrete_divergence(const VectorField& g) {
  const GridDomain& d = g.domain();
  ScalarField out(g.domain_ptr());
  const auto& k = kernels::active();
  const double inv_h = 1.0 / d.spacing();
  double* dst = out.values().data();
  parallel_chunks(d.size(), [&](std::size_t b, std::size_t e) {
    k.backward_divergence(g.x().data(), g.y().data(), d.valid_x().data(), d.valid_y().data(),
                          inv_h, d.width(), d.size(), b, e, dst);
  });
  return out;
}

ScalarField flux_divergence(const VectorField& g) {
  ScalarField out = discrete_divergence(g);
  const GridDomain& d = g.domain();
  const double inv_h = 1.0 / d.spacing();
  for (const BoundaryEdge& e : d.boundary_edges()) {
    const std::size_t k = d.index(e.row, e.col);
    if (e.outward == Direction::east) out[k] += g.x()[k] * inv_h;
    if (e.outward == Direction::south) out[k] += g.y()[k] * inv_h;
  }
  return out;
}

std::vector<double> gradient_magnitude(const ScalarField& u) {
  const VectorField g = discrete_gradient(u);
  std::vector<double> mag(g.size());
  const auto& k = kernels::active();
  parallel_chunks(g.size(), [&](std::size_t b, std::size_t e) {
    k.pixel_norm(g.x().data(), g.y().data(), b, e, mag.data());
  });
  return mag;
}

double discrete_tv(const ScalarField& u) {
  const double h2 = u.domain().spacing() * u.domain().spacing();
  return h2 * pairwise_sum(gradient_magnitude(u));
}

double default_eps_zero(const ScalarField& u) {
  const auto mag = gradient_magnitude(u);
  const double peak = mag.empty() ? 0.0 : *std::max_element(mag.begin(), mag.end());
  return 1e-9 * peak;
}

GradientMeasure gradient_measure(const ScalarField& u, double eps_zero) {
  if (eps_zero < 0.0) throw std::invalid_argument("eps_zero must be non-negative");
  const VectorField g = discrete_gradient(u);
  const double h2 = u.domain().spacing() * u.domain().spacing();
  GradientMeasure mu;
  mu.domain = u.domain_ptr();
  mu.eps_zero = eps_zero;
  mu.weight.assign(g.size(), 0.0);
  mu.direction_x.assign(g.size(), 0.0);
  mu.direction_y.assign(g.size(), 0.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double n = std::sqrt(g.x()[k] * g.x()[k] + g.y()[k] * g.y()[k]);
    if (n > eps_zero && n > 0.0) {
      mu.weight[k] = h2 * n;
      mu.direction_x[k] = g.x()[k] / n;
      mu.direction_y[k] = g.y()[k] / n;
    }
  }
  return mu;
}

double inner(const ScalarField& a, const ScalarField& b) {
  if (!same_domain(a.domain_ptr(), b.domain_ptr())) throw std::invalid_argument("inner product across domains");
  std::vector<double> prod(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) prod[k] = a[k] * b[k];
  const double h = a.domain().spacing();
  return h * h * pairwise_sum(prod);
}

double inner(const VectorField& a, const VectorField& b) {
  if (!same_domain(a.domain_ptr(), b.domain_ptr())) throw std::invalid_argument("inner product across domains");
  std::vector<double> prod(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) prod[k] = a.x()[k] * b.x()[k] + a.y()[k] * b.y()[k];
  const double h = a.domain().spacing();
  return h * h * pairwise_sum(prod);
}

double l2_norm(const ScalarField& a) { return std::sqrt(inner(a, a)); }
double l2_norm(const VectorField& a) { return std::sqrt(inner(a, a)); }

}  // namespace tvcert
