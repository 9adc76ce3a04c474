#pragma once
// Discrete BV calculus on pixel grids.
//
// Storage convention: the x-component of a vector field at pixel (i, j) lives on
// the face between (i, j) and (i, j+1); the y-component on the face between
// (i, j) and (i+1, j). Forward differences are taken only across faces whose
// two pixels are both inside the mask (homogeneous Neumann truncation), and the
// divergence is the exact negative adjoint of that gradient with respect to the
// h^2-weighted inner products.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace tvcert {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

enum class Direction : std::uint8_t { east, west, south, north };

/// A mask transition: pixel (row, col) is inside, its neighbour in `outward` is not.
struct BoundaryEdge {
  int row = 0;
  int col = 0;
  Direction outward = Direction::east;
};

class GridDomain {
 public:
  /// Full rectangular mask.
  GridDomain(int height, int width, double spacing);
  /// Row-major mask, true = inside.
  GridDomain(int height, int width, double spacing, std::vector<std::uint8_t> mask);

  int height() const { return height_; }
  int width() const { return width_; }
  double spacing() const { return spacing_; }
  std::size_t size() const { return static_cast<std::size_t>(height_) * width_; }
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * width_ + col;
  }
  bool inside(int row, int col) const {
    return row >= 0 && col >= 0 && row < height_ && col < width_ && mask_[index(row, col)] != 0;
  }
  std::span<const std::uint8_t> mask() const { return mask_; }
  std::size_t mask_count() const { return mask_count_; }

  /// 1.0 where the forward x- (resp. y-) face of the pixel joins two mask pixels.
  std::span<const double> valid_x() const { return valid_x_; }
  std::span<const double> valid_y() const { return valid_y_; }

  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }

  /// Chessboard distance (in pixels) from each mask pixel to the nearest pixel
  /// outside the mask or outside the grid; 0 outside the mask.
  const std::vector<int>& exterior_distance() const { return exterior_distance_; }

  /// Pixel-centre coordinates: x = (col + 1/2) h, y = (row + 1/2) h.
  double x_center(int col) const { return (col + 0.5) * spacing_; }
  double y_center(int row) const { return (row + 0.5) * spacing_; }

  bool operator==(const GridDomain& other) const;

 private:
  void build();

  int height_;
  int width_;
  double spacing_;
  std::vector<std::uint8_t> mask_;
  std::size_t mask_count_ = 0;
  std::vector<double> valid_x_;
  std::vector<double> valid_y_;
  std::vector<BoundaryEdge> boundary_edges_;
  std::vector<int> exterior_distance_;
};

using DomainPtr = std::shared_ptr<const GridDomain>;

DomainPtr make_domain(int height, int width, double spacing);
DomainPtr make_domain(int height, int width, double spacing, std::vector<std::uint8_t> mask);

/// Recomputes boundary edges from a mask; used to check idempotence.
std::vector<BoundaryEdge> compute_boundary_edges(const GridDomain& domain);

bool same_domain(const DomainPtr& a, const DomainPtr& b);

class ScalarField {
 public:
  explicit ScalarField(DomainPtr domain);
  ScalarField(DomainPtr domain, std::vector<double> values);

  const GridDomain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator()(int row, int col) { return values_[domain_->index(row, col)]; }
  double operator()(int row, int col) const { return values_[domain_->index(row, col)]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }
  std::size_t size() const { return values_.size(); }

  /// Zeroes values outside the mask and rejects non-finite values inside it.
  void validate();

 private:
  DomainPtr domain_;
  std::vector<double> values_;
};

class VectorField {
 public:
  explicit VectorField(DomainPtr domain);
  VectorField(DomainPtr domain, std::vector<double> x, std::vector<double> y);

  const GridDomain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  std::span<double> x() { return x_; }
  std::span<double> y() { return y_; }
  std::span<const double> x() const { return x_; }
  std::span<const double> y() const { return y_; }
  Vec2 at(std::size_t k) const { return {x_[k], y_[k]}; }
  void set(std::size_t k, Vec2 v) {
    x_[k] = v.x;
    y_[k] = v.y;
  }
  std::size_t size() const { return x_.size(); }

  /// max over pixels of the Euclidean norm.
  double sup_norm() const;

  /// Components vanish on every face that leaves the mask (discrete W_0 membership).
  bool zero_extension_compatible(double tol = 0.0) const;

  /// Copy with every face that leaves the mask zeroed.
  VectorField truncated_to_compatible() const;

 private:
  DomainPtr domain_;
  std::vector<double> x_;
  std::vector<double> y_;
};

struct GradientMeasure {
  DomainPtr domain;
  std::vector<double> weight;       // h^2 |grad_h u| where above eps_zero, else 0
  std::vector<double> direction_x;  // sigma_u, defined where weight > 0
  std::vector<double> direction_y;
  double eps_zero = 0.0;

  double total_mass() const;
  bool supported(std::size_t k) const { return weight[k] > 0.0; }
};

VectorField discrete_gradient(const ScalarField& u);
ScalarField discrete_divergence(const VectorField& g);

/// Divergence of the zero-extended field: discrete_divergence plus the outward
/// flux of components sitting on faces that leave the mask. Coincides with
/// discrete_divergence on zero-extension-compatible fields.
ScalarField flux_divergence(const VectorField& g);

/// Per-pixel Euclidean norm |grad_h u|.
std::vector<double> gradient_magnitude(const ScalarField& u);

double discrete_tv(const ScalarField& u);

/// 1e-9 * max |grad_h u|.
double default_eps_zero(const ScalarField& u);

GradientMeasure gradient_measure(const ScalarField& u, double eps_zero);

/// h^2-weighted inner products.
double inner(const ScalarField& a, const ScalarField& b);
double inner(const VectorField& a, const VectorField& b);
double l2_norm(const ScalarField& a);
double l2_norm(const VectorField& a);

}  // namespace tvcert
