#include "tvcert/dual_fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tvcert/kernels.hpp"
#include "tvcert/summation.hpp"

namespace tvcert {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double chebyshev(Vec2 a, Vec2 b) { return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)); }

Vec2 pixel_center(const GridDomain& d, int row, int col) {
  return {d.x_center(col), d.y_center(row)};
}

/// Inward direction of a boundary pixel: normalized sum of the inward normals
/// of its boundary faces.
Vec2 inward_direction(const GridDomain& d, int row, int col) {
  Vec2 sum;
  Vec2 first;
  bool have_first = false;
  auto add = [&](bool outside, Vec2 n) {
    if (!outside) return;
    sum.x += n.x;
    sum.y += n.y;
    if (!have_first) {
      first = n;
      have_first = true;
    }
  };
  add(!d.inside(row, col + 1), {-1.0, 0.0});
  add(!d.inside(row, col - 1), {1.0, 0.0});
  add(!d.inside(row + 1, col), {0.0, -1.0});
  add(!d.inside(row - 1, col), {0.0, 1.0});
  const double n = std::hypot(sum.x, sum.y);
  if (n == 0.0) return first;
  return {sum.x / n, sum.y / n};
}

bool is_boundary_pixel(const GridDomain& d, int row, int col) {
  return d.inside(row, col) && (!d.inside(row, col + 1) || !d.inside(row, col - 1) ||
                                !d.inside(row + 1, col) || !d.inside(row - 1, col));
}

struct Stencil {
  std::vector<int> di;
  std::vector<int> dj;
  std::vector<std::ptrdiff_t> offset;
  std::vector<double> weight;
  int reach = 0;
};

/// Kernel taps for an output pixel whose kernel centre sits at `shift` (in
/// pixel units, x = columns, y = rows) with radius `radius` pixels.
Stencil make_stencil(Vec2 shift, double radius, int width) {
  Stencil s;
  const int i_lo = static_cast<int>(std::floor(shift.y - radius));
  const int i_hi = static_cast<int>(std::ceil(shift.y + radius));
  const int j_lo = static_cast<int>(std::floor(shift.x - radius));
  const int j_hi = static_cast<int>(std::ceil(shift.x + radius));
  double total = 0.0;
  for (int i = i_lo; i <= i_hi; ++i)
    for (int j = j_lo; j <= j_hi; ++j) {
      const double w = bump(std::hypot(j - shift.x, i - shift.y) / radius);
      if (w <= 0.0) continue;
      s.di.push_back(i);
      s.dj.push_back(j);
      s.weight.push_back(w);
      total += w;
    }
  if (s.weight.empty()) {
    s.di.push_back(static_cast<int>(std::lround(shift.y)));
    s.dj.push_back(static_cast<int>(std::lround(shift.x)));
    s.weight.push_back(1.0);
    total = 1.0;
  }
  for (std::size_t t = 0; t < s.weight.size(); ++t) {
    s.weight[t] /= total;
    s.offset.push_back(static_cast<std::ptrdiff_t>(s.di[t]) * width + s.dj[t]);
    s.reach = std::max({s.reach, std::abs(s.di[t]), std::abs(s.dj[t])});
  }
  return s;
}

/// Kernel average of `plane` at pixel (row, col); taps outside the mask are
/// dropped and the remaining weights renormalized.
double apply_stencil(const GridDomain& d, const Stencil& s, const double* plane, int row,
                     int col) {
  const std::size_t k = d.index(row, col);
  double acc = 0.0;
  if (d.exterior_distance()[k] > s.reach) {
    for (std::size_t t = 0; t < s.weight.size(); ++t)
      acc = acc + s.weight[t] * plane[static_cast<std::ptrdiff_t>(k) + s.offset[t]];
    return acc;
  }
  double mass = 0.0;
  bool all_inside = true;
  for (std::size_t t = 0; t < s.weight.size(); ++t) {
    if (!d.inside(row + s.di[t], col + s.dj[t])) {
      all_inside = false;
      continue;
    }
    acc = acc + s.weight[t] * plane[static_cast<std::ptrdiff_t>(k) + s.offset[t]];
    mass += s.weight[t];
  }
  if (all_inside) return acc;
  if (mass <= 0.0) return plane[k];
  return acc / mass;
}

struct Layers {
  PartitionOfUnity partition;
  Stencil interior;
  std::vector<Stencil> charts;
};

Layers build_layers(const GridDomain& d, const MollifierSpec& spec) {
  spec.validate(d);
  Layers layers;
  layers.partition = build_partition(d, spec);
  const double h = d.spacing();
  const double radius = spec.epsilon / h;
  layers.interior = make_stencil({0.0, 0.0}, radius, d.width());
  for (const Chart& c : spec.charts) {
    const double s = c.alpha() * spec.epsilon / h;
    layers.charts.push_back(make_stencil({s * c.inward.x, s * c.inward.y}, radius, d.width()));
  }
  return layers;
}

void mollify_plane(const GridDomain& d, const Layers& layers, const double* in, double* out) {
  const std::size_t n = d.size();
  std::fill(out, out + n, 0.0);
  std::vector<std::uint8_t> done(n, 0);
  const auto& zeta0 = layers.partition.interior;
  const auto& dist = d.exterior_distance();
  const Stencil& st = layers.interior;
  const auto& k = kernels::active();

  // Bulk: pixels fully owned by the centred layer with every tap inside the mask.
  for (int i = 0; i < d.height(); ++i) {
    int j = 0;
    while (j < d.width()) {
      const std::size_t p = d.index(i, j);
      if (zeta0[p] == 1.0 && dist[p] > st.reach) {
        int e = j + 1;
        while (e < d.width() && zeta0[d.index(i, e)] == 1.0 && dist[d.index(i, e)] > st.reach) ++e;
        k.stencil(in, st.offset.data(), st.weight.data(), st.weight.size(), p, d.index(i, e), out);
        std::fill(done.begin() + p, done.begin() + d.index(i, e), 1);
        j = e;
      } else {
        ++j;
      }
    }
  }
  for (int i = 0; i < d.height(); ++i)
    for (int j = 0; j < d.width(); ++j) {
      const std::size_t p = d.index(i, j);
      if (done[p] || zeta0[p] <= 0.0) continue;
      out[p] += zeta0[p] * apply_stencil(d, st, in, i, j);
    }
  for (std::size_t c = 0; c < layers.charts.size(); ++c) {
    const auto& layer = layers.partition.charts[c];
    for (std::size_t t = 0; t < layer.pixels.size(); ++t) {
      const std::size_t p = layer.pixels[t];
      if (done[p]) continue;
      const int i = static_cast<int>(p / d.width());
      const int j = static_cast<int>(p % d.width());
      out[p] += layer.weights[t] * apply_stencil(d, layers.charts[c], in, i, j);
    }
  }
}

}  // namespace

double bump(double radius) {
  if (radius >= 1.0) return 0.0;
  return std::exp(1.0 / (radius * radius - 1.0));
}

void MollifierSpec::validate(const GridDomain& domain) const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("mollifier radius must be positive");
  if (!(epsilon < interior_band))
    throw std::invalid_argument("mollifier radius must be below the interior band");
  for (const Chart& c : charts) {
    if (c.lipschitz < 0.0) throw std::invalid_argument("chart Lipschitz bound must be >= 0");
    const double bound = c.half_width / (2.0 * (c.alpha() + 1.0));
    if (!(epsilon < bound))
      throw std::invalid_argument("mollifier radius " + std::to_string(epsilon) +
                                  " violates eps < r/(2(alpha+1)) = " + std::to_string(bound));
  }
  for (int i = 0; i < domain.height(); ++i)
    for (int j = 0; j < domain.width(); ++j) {
      if (!is_boundary_pixel(domain, i, j)) continue;
      const Vec2 p = pixel_center(domain, i, j);
      const bool covered = std::any_of(charts.begin(), charts.end(), [&](const Chart& c) {
        return chebyshev(p, c.center) < 0.5 * c.half_width;
      });
      if (!covered)
        throw std::invalid_argument("boundary pixel (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ") is not covered by any chart");
    }
}

MollifierSpec MollifierSpec::with_epsilon(double eps) const {
  MollifierSpec out = *this;
  out.epsilon = eps;
  return out;
}

MollifierSpec make_mollifier_spec(const GridDomain& domain, double epsilon, double epsilon_max) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("mollifier radius must be positive");
  epsilon_max = std::max(epsilon, epsilon_max);
  const double h = domain.spacing();

  struct Seed {
    Vec2 position;
    Vec2 inward;
  };
  std::vector<Seed> seeds;
  for (int i = 0; i < domain.height(); ++i)
    for (int j = 0; j < domain.width(); ++j) {
      if (!is_boundary_pixel(domain, i, j)) continue;
      seeds.push_back({pixel_center(domain, i, j), inward_direction(domain, i, j)});
    }

  MollifierSpec spec;
  spec.epsilon = epsilon;
  // The centred layer only needs its kernel to stay inside the mask; 2 eps_max
  // leaves one kernel radius of slack for the blend zone [a, 2a].
  spec.interior_band = 2.0 * epsilon_max;
  const double r = 4.0 * spec.interior_band + 2.0 * h;
  for (const Seed& s : seeds) {
    const bool covered = std::any_of(spec.charts.begin(), spec.charts.end(), [&](const Chart& c) {
      return c.inward.x == s.inward.x && c.inward.y == s.inward.y &&
             chebyshev(c.center, s.position) <= 0.25 * r;
    });
    if (covered) continue;
    const bool diagonal = s.inward.x != 0.0 && s.inward.y != 0.0;
    spec.charts.push_back({s.position, r, s.inward, diagonal ? 1.0 : 0.0});
  }
  return spec;
}

PartitionOfUnity build_partition(const GridDomain& d, const MollifierSpec& spec) {
  const double h = d.spacing();
  const double a = spec.interior_band;
  const auto& dist = d.exterior_distance();
  const auto mask = d.mask();
  PartitionOfUnity pu;
  pu.interior.assign(d.size(), 0.0);
  std::vector<double> total(d.size(), 0.0);
  for (std::size_t p = 0; p < d.size(); ++p) {
    if (!mask[p]) continue;
    pu.interior[p] = clamp01((dist[p] * h - a) / a);
    total[p] = pu.interior[p];
  }
  pu.charts.resize(spec.charts.size());
  for (std::size_t c = 0; c < spec.charts.size(); ++c) {
    const Chart& chart = spec.charts[c];
    const double core = 0.5 * chart.half_width;
    const int i_lo = std::max(0, static_cast<int>(std::floor((chart.center.y - core) / h - 0.5)));
    const int i_hi = std::min(d.height() - 1, static_cast<int>(std::ceil((chart.center.y + core) / h - 0.5)));
    const int j_lo = std::max(0, static_cast<int>(std::floor((chart.center.x - core) / h - 0.5)));
    const int j_hi = std::min(d.width() - 1, static_cast<int>(std::ceil((chart.center.x + core) / h - 0.5)));
    auto& layer = pu.charts[c];
    for (int i = i_lo; i <= i_hi; ++i)
      for (int j = j_lo; j <= j_hi; ++j) {
        const std::size_t p = d.index(i, j);
        if (!mask[p]) continue;
        const double near_boundary = clamp01((2.0 * a - dist[p] * h) / a);
        const double in_cube =
            clamp01((core - chebyshev(pixel_center(d, i, j), chart.center)) / (0.5 * core));
        const double w = near_boundary * in_cube;
        if (w <= 0.0) continue;
        layer.pixels.push_back(static_cast<std::uint32_t>(p));
        layer.weights.push_back(w);
        total[p] += w;
      }
  }
  for (std::size_t p = 0; p < d.size(); ++p) {
    if (!mask[p]) continue;
    if (!(total[p] > 0.0))
      throw std::invalid_argument("partition of unity vanishes at pixel " + std::to_string(p));
    pu.interior[p] /= total[p];
  }
  for (auto& layer : pu.charts)
    for (std::size_t t = 0; t < layer.pixels.size(); ++t) layer.weights[t] /= total[layer.pixels[t]];
  return pu;
}

double WqDivNorm::value() const {
  return std::pow(std::pow(field_part, q) + std::pow(div_part, q), 1.0 / q);
}

WqDivNorm wq_div_norm(const VectorField& g, double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw std::invalid_argument("q must be in [1, inf)");
  const double h2 = g.domain().spacing() * g.domain().spacing();
  const ScalarField div = discrete_divergence(g);
  std::vector<double> field(g.size());
  std::vector<double> dv(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    field[k] = std::pow(std::hypot(g.x()[k], g.y()[k]), q);
    dv[k] = std::pow(std::abs(div[k]), q);
  }
  WqDivNorm out;
  out.q = q;
  out.field_part = std::pow(h2 * pairwise_sum(field), 1.0 / q);
  out.div_part = std::pow(h2 * pairwise_sum(dv), 1.0 / q);
  return out;
}

WqDivNorm wq_div_distance(const VectorField& a, const VectorField& b, double q) {
  if (!same_domain(a.domain_ptr(), b.domain_ptr()))
    throw std::invalid_argument("fields live on different domains");
  VectorField diff(a.domain_ptr());
  for (std::size_t k = 0; k < a.size(); ++k) {
    diff.x()[k] = a.x()[k] - b.x()[k];
    diff.y()[k] = a.y()[k] - b.y()[k];
  }
  return wq_div_norm(diff, q);
}

VectorField project_unit_ball(const VectorField& g) {
  VectorField out = g;
  kernels::active().project_ball(out.x().data(), out.y().data(), 0, out.size());
  return out;
}

VectorField mollify_boundary_aware(const VectorField& g, const MollifierSpec& spec) {
  const GridDomain& d = g.domain();
  const Layers layers = build_layers(d, spec);
  VectorField out(g.domain_ptr());
  mollify_plane(d, layers, g.x().data(), out.x().data());
  mollify_plane(d, layers, g.y().data(), out.y().data());
  return out;
}

ScalarField mollify_boundary_aware(const ScalarField& s, const MollifierSpec& spec) {
  const GridDomain& d = s.domain();
  const Layers layers = build_layers(d, spec);
  ScalarField out(s.domain_ptr());
  mollify_plane(d, layers, s.values().data(), out.values().data());
  return out;
}

std::vector<double> mollifier_mass(const GridDomain& d, const MollifierSpec& spec) {
  const Layers layers = build_layers(d, spec);
  std::vector<double> ones(d.size(), 0.0);
  for (std::size_t p = 0; p < d.size(); ++p) ones[p] = d.mask()[p] ? 1.0 : 0.0;
  std::vector<double> out(d.size());
  mollify_plane(d, layers, ones.data(), out.data());
  return out;
}

std::vector<double> dyadic_schedule(double epsilon0, double spacing) {
  if (!(epsilon0 > 0.0) || !(spacing > 0.0))
    throw std::invalid_argument("schedule needs positive radius and spacing");
  std::vector<double> out{epsilon0};
  while (out.back() > spacing * (1.0 + 1e-12)) out.push_back(out.back() / 2.0);
  return out;
}

}  // namespace tvcert
