#pragma once
#include <cstddef>
#include <span>

namespace tvcert {

/// Pairwise (cascade) summation with a fixed split, so results are
/// reproducible bit for bit and the rounding error grows as O(log n).
double pairwise_sum(std::span<const double> values);

}  // namespace tvcert
