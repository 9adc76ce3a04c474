#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "tvcert/kernels.hpp"
#include "tvcert/parallel.hpp"
#include "tvcert/subdiff_certify.hpp"
#include "tvcert/summation.hpp"

namespace tvcert {

IterationLimit::IterationLimit(std::string_view what, RofSolution last)
    : std::runtime_error(std::string(what)),
      last_(std::make_shared<const RofSolution>(std::move(last))) {}

namespace {

// Sum over chunks of fn(begin, end); chunk partials are combined pairwise so
// the result does not depend on the thread count.
template <class Fn>
double chunked_sum(std::size_t n, Fn&& fn) {
  constexpr std::size_t kChunk = 1 << 15;
  std::vector<double> partial((n + kChunk - 1) / kChunk, 0.0);
  parallel_chunks(n, [&](std::size_t b, std::size_t e) { partial[b / kChunk] = fn(b, e); });
  return pairwise_sum(partial);
}

struct Workspace {
  const GridDomain& d;
  const kernels::KernelTable& k;
  double inv_h;

  void divergence(const std::vector<double>& gx, const std::vector<double>& gy,
                  std::vector<double>& out) const {
    parallel_chunks(d.size(), [&](std::size_t b, std::size_t e) {
      k.backward_divergence(gx.data(), gy.data(), d.valid_x().data(), d.valid_y().data(), inv_h,
                            d.width(), d.size(), b, e, out.data());
    });
  }
};

RofSolution finish(const ScalarField& u0, double lambda, const std::vector<double>& gx,
                   const std::vector<double>& gy, int iterations, double& roundoff) {
  VectorField g(u0.domain_ptr(), gx, gy);
  const ScalarField div = discrete_divergence(g);
  ScalarField u(u0.domain_ptr());
  const double c = 1.0 / (2.0 * lambda);
  for (std::size_t p = 0; p < u.size(); ++p) u[p] = u0[p] + c * div[p];
  const double tv = discrete_tv(u);
  RofSolution sol{u, std::move(g), 0.0, 0.0, 0.0, iterations};
  sol.gap = std::max(0.0, tv + inner(u, div));
  // Rounding level of the gap evaluation; below it the gap carries no signal.
  // Each |grad u| carries an error of about eps |u| / h, each u div g term eps |u div g|.
  const double h = u0.domain().spacing();
  std::vector<double> mag(u.size());
  for (std::size_t p = 0; p < u.size(); ++p) mag[p] = std::abs(u[p]) * (h * std::abs(div[p]) + 1.0);
  roundoff = 64.0 * std::numeric_limits<double>::epsilon() * (tv + h * pairwise_sum(mag));
  ScalarField diff(u0.domain_ptr());
  for (std::size_t p = 0; p < u.size(); ++p) diff[p] = u[p] - u0[p];
  sol.primal = tv + lambda * inner(diff, diff);
  sol.scale = tv + l2_norm(div) * l2_norm(u);
  return sol;
}

}  // namespace

RofSolution solve_rof(const ScalarField& u0, double lambda, const RofOptions& opt,
                      const VectorField* warm_start) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be > 0");
  if (!(opt.tol_gap > 0.0)) throw std::invalid_argument("tol_gap must be > 0");
  if (opt.max_iter < 0 || opt.check_every < 1) throw std::invalid_argument("bad iteration limits");
  const GridDomain& d = u0.domain();
  const std::size_t n = d.size();
  const double h = d.spacing();
  const Workspace ws{d, kernels::active(), 1.0 / h};
  const double step = h * h / 8.0;

  std::vector<double> gx(n, 0.0), gy(n, 0.0);
  // A constant datum is its own minimizer with g = 0; a warm start would only
  // perturb it.
  double roundoff = 0.0;
  if (discrete_tv(u0) == 0.0) return finish(u0, lambda, gx, gy, 0, roundoff);
  if (warm_start) {
    if (!same_domain(warm_start->domain_ptr(), u0.domain_ptr()))
      throw std::invalid_argument("warm start lives on a different domain");
    const VectorField w = project_unit_ball(warm_start->truncated_to_compatible());
    std::copy(w.x().begin(), w.x().end(), gx.begin());
    std::copy(w.y().begin(), w.y().end(), gy.begin());
  }
  std::vector<double> px = gx, py = gy, yx = gx, yy = gy;
  std::vector<double> div(n), w(n), wx(n), wy(n);
  const double* src = u0.values().data();
  double t = 1.0;

  for (int it = 0;; ++it) {
    if (it % opt.check_every == 0 || it == opt.max_iter) {
      RofSolution sol = finish(u0, lambda, gx, gy, it, roundoff);
      if (sol.gap <= opt.tol_gap * sol.scale || sol.gap <= roundoff) return sol;
      if (it >= opt.max_iter)
        throw IterationLimit("ROF solver hit the iteration limit (" + std::to_string(it) +
                                 ") with relative gap " + std::to_string(sol.gap / sol.scale),
                             std::move(sol));
    }
    ws.divergence(yx, yy, div);
    parallel_chunks(n, [&](std::size_t b, std::size_t e) {
      ws.k.axpy(div.data(), src, 2.0 * lambda, b, e, w.data());
    });
    parallel_chunks(n, [&](std::size_t b, std::size_t e) {
      ws.k.forward_gradient(w.data(), d.valid_x().data(), d.valid_y().data(), ws.inv_h, d.width(),
                            n, b, e, wx.data(), wy.data());
    });
    std::swap(px, gx);
    std::swap(py, gy);
    parallel_chunks(n, [&](std::size_t b, std::size_t e) {
      std::memcpy(gx.data() + b, yx.data() + b, (e - b) * sizeof(double));
      std::memcpy(gy.data() + b, yy.data() + b, (e - b) * sizeof(double));
      ws.k.ascent_project(gx.data(), gy.data(), wx.data(), wy.data(), step, d.valid_x().data(),
                          d.valid_y().data(), b, e);
    });
    // Gradient-based restart: drop the momentum when it points uphill.
    const double uphill = chunked_sum(n, [&](std::size_t b, std::size_t e) {
      double s = 0.0;
      for (std::size_t p = b; p < e; ++p)
        s += (yx[p] - gx[p]) * (gx[p] - px[p]) + (yy[p] - gy[p]) * (gy[p] - py[p]);
      return s;
    });
    double beta = 0.0;
    if (uphill > 0.0) {
      t = 1.0;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      beta = (t - 1.0) / t_next;
      t = t_next;
    }
    parallel_chunks(n, [&](std::size_t b, std::size_t e) {
      ws.k.extrapolate(gx.data(), px.data(), beta, b, e, yx.data());
      ws.k.extrapolate(gy.data(), py.data(), beta, b, e, yy.data());
    });
  }
}

}  // namespace tvcert
