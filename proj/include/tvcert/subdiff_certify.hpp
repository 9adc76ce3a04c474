#pragma once
// ROF solver and the subdifferential certificate for a claimed pair (u, u*).
//
// A pair is certified when a dual field g with ||g||_inf <= 1, vanishing on
// faces that leave the mask, reproduces u* = -div g and aligns with the
// direction of Du. The alignment is tested twice: through the integral
// identity TV(u) = -<u, div g>, and through the full trace Tg = sigma_u.

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "tvcert/dual_fields.hpp"
#include "tvcert/grid.hpp"
#include "tvcert/trace_ops.hpp"

namespace tvcert {

// --- ROF ---------------------------------------------------------------------

struct RofSolution {
  ScalarField u;
  VectorField g;
  double gap = 0.0;      // TV(u) + <u, div g>
  double primal = 0.0;   // TV(u) + lambda ||u - u0||^2
  /// TV(u) + ||div g|| ||u||. Every subgradient-inequality violation of
  /// (u, -div g) is at most `gap`, so gap / scale bounds the oracle's ratio.
  double scale = 0.0;
  int iterations = 0;
};

class IterationLimit : public std::runtime_error {
 public:
  IterationLimit(std::string_view what, RofSolution last);
  const RofSolution& last() const { return *last_; }
  double gap() const { return last_->gap; }

 private:
  std::shared_ptr<const RofSolution> last_;
};

struct RofOptions {
  double tol_gap = 1e-8;  // relative: gap <= tol_gap * scale
  int max_iter = 200000;
  int check_every = 10;
};

/// min_u TV(u) + lambda ||u - u0||^2 by accelerated projected gradient on the
/// dual with adaptive restart. The returned pair satisfies
/// 2 lambda (u - u0) = div g up to rounding. Throws IterationLimit.
RofSolution solve_rof(const ScalarField& u0, double lambda, const RofOptions& options,
                      const VectorField* warm_start = nullptr);

inline RofSolution solve_rof(const ScalarField& u0, double lambda, double tol_gap, int max_iter) {
  return solve_rof(u0, lambda, RofOptions{tol_gap, max_iter, 10});
}

// --- regions -----------------------------------------------------------------

enum class Region : std::uint8_t { zero, smooth, jump };

struct RegionStats {
  std::size_t count = 0;
  double weight = 0.0;      // |Du| mass carried by the region
  double mean_error = 0.0;  // |Du|-weighted mean of |Tg - target|
  double max_error = 0.0;
};

struct RegionReport {
  double jump_thresh = 0.0;
  double eps_zero = 0.0;
  std::vector<Region> label;
  /// On jump pixels: nu_u = sigma_u and the two-pixel value gap h |grad u|.
  std::vector<double> jump_normal_x;
  std::vector<double> jump_normal_y;
  std::vector<double> jump_gap;
  RegionStats smooth;
  RegionStats jump;
  RegionStats zero;
};

/// 10 * mean |grad_h u| * h over mask pixels.
double default_jump_thresh(const ScalarField& u);

/// Throws std::invalid_argument for jump_thresh <= 0.
RegionReport classify_regions(const ScalarField& u, const GradientMeasure& mu, double jump_thresh);

/// Fills the per-region alignment errors of a full trace against sigma_u.
void region_alignment(RegionReport& report, const TraceResult& trace);

// --- certificate ---------------------------------------------------------------

enum class Verdict { certified, refuted, inconclusive };
std::string_view to_string(Verdict v);

struct Tolerances {
  double tol_f = 1e-9;      // sup-norm excess
  double tol_d = 1e-6;      // relative ||u* + div g||
  double tol_i = 1e-3;      // integral residual
  double tol_t = 5e-2;      // full-trace residual
  double tol_trace = 1e-4;  // Cauchy tolerance of the trace schedule
  double tol_s = 1e-8;      // oracle, relative to its scale
  double zero_ext = 1e-12;  // |component| allowed on faces leaving the mask
  double jump_thresh = 0.0; // 0 = default_jump_thresh(u)
  double eps_zero = -1.0;   // < 0 = default_eps_zero(u)
};

struct Certificate {
  ScalarField u;
  ScalarField u_star;
  VectorField g;
  double tv = 0.0;
  double feasibility = 0.0;
  bool zero_ext_ok = false;
  double div_match = 0.0;
  double integral_residual = 0.0;
  double fulltrace_residual = 0.0;
  TraceResult trace;
  RegionReport regions;
  Tolerances tols;
  bool structure_ok = false;
  bool integral_ok = false;
  bool trace_ok = false;
  /// Both characterizations reach the same conclusion.
  bool criteria_agree = false;
  Verdict verdict = Verdict::inconclusive;
};

/// Throws std::invalid_argument for mismatched domains.
Certificate certify(const ScalarField& u, const ScalarField& u_star, const VectorField& g,
                    const MollifierSpec& spec, const Tolerances& tols = {});

/// Certificate of an ROF solution: u* = 2 lambda (u0 - u).
Certificate certify_rof(const ScalarField& u0, double lambda, const RofSolution& sol,
                        const MollifierSpec& spec, const Tolerances& tols = {});

// --- subgradient oracle ----------------------------------------------------------

enum class SampleFamily : std::uint8_t { identity, gaussian, scaled, piecewise_constant };
std::string_view to_string(SampleFamily f);

struct OracleResult {
  double worst = 0.0;  // max over samples of TV(u) + <u*, v - u> - TV(v)
  double scale = 0.0;  // TV(u) + ||u*|| ||u||
  std::size_t samples = 0;
  SampleFamily worst_family = SampleFamily::identity;

  bool passes(double tol_s) const { return worst <= tol_s * scale; }
};

/// Sample 0 is v = u; the rest cycle through Gaussian fields, t u and
/// piecewise-constant rectangle perturbations of u, drawn from mt19937_64(seed).
OracleResult subgradient_oracle(const ScalarField& u, const ScalarField& u_star,
                                std::size_t samples, std::uint64_t seed);

// --- interval constraints ------------------------------------------------------------

/// Orthonormal linear map on the pixel plane with its exact inverse (transpose).
class OrthonormalTransform {
 public:
  virtual ~OrthonormalTransform() = default;
  virtual std::string_view name() const = 0;
  virtual void forward(std::span<const double> in, std::span<double> out) const = 0;
  virtual void inverse(std::span<const double> in, std::span<double> out) const = 0;
};

/// Blockwise 8x8 orthonormal DCT-II; coefficients are stored at the pixel
/// positions of their block.
class BlockDct8 final : public OrthonormalTransform {
 public:
  BlockDct8(int height, int width);
  std::string_view name() const override { return "block_dct8"; }
  void forward(std::span<const double> in, std::span<double> out) const override;
  void inverse(std::span<const double> in, std::span<double> out) const override;

 private:
  void apply(std::span<const double> in, std::span<double> out, bool transpose) const;
  int height_;
  int width_;
  double basis_[8][8];
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

enum class BoundState : std::uint8_t { fixed, upper, lower, interior };
std::string_view to_string(BoundState s);

struct SignCheck {
  std::size_t index = 0;
  BoundState state = BoundState::interior;
  double coefficient = 0.0;  // (div g, a_n)
  bool ok = true;
};

struct IntervalCertificate {
  double tv = 0.0;
  double feasibility = 0.0;
  bool zero_ext_ok = false;
  double integral_residual = 0.0;
  double fulltrace_residual = 0.0;
  TraceResult trace;
  std::vector<SignCheck> signs;
  double sign_tol = 0.0;
  std::size_t sign_failures = 0;
  Tolerances tols;
  bool structure_ok = false;
  bool integral_ok = false;
  bool trace_ok = false;
  Verdict verdict = Verdict::inconclusive;
};

/// Throws std::invalid_argument if Au leaves some interval by more than the
/// activity tolerance or the sizes do not match.
IntervalCertificate certify_interval_constrained(const ScalarField& u,
                                                 const OrthonormalTransform& transform,
                                                 std::span<const Interval> intervals,
                                                 const VectorField& g, const MollifierSpec& spec,
                                                 const Tolerances& tols = {});

}  // namespace tvcert
