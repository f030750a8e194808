#pragma once

#include <cstddef>

namespace cuspfit::detail {

/// Candidate filter for the tangent-point pair search. For block entries
/// j < n computes score[j] = max(|n.d| - t*|d|^2, coincident2 - |d|^2)
/// with d = q - p_j; an entry is a candidate iff its score is >= 0.
/// Returns the number of candidates in the block. Plain element-wise IEEE
/// arithmetic (no fused contractions), so results match a scalar loop
/// bit for bit; hot on AVX2 hosts via multi-versioning.
int tpe_filter_block(const double* xs, const double* ys, const double* zs,
                     std::size_t n, double qx, double qy, double qz,
                     double nx, double ny, double nz, double t,
                     double coincident2, double* score);

}  // namespace cuspfit::detail
