#include "tpe_filter.hpp"

#include <cmath>

#if (defined(__x86_64__) || defined(__i386__)) && \
    (defined(__GNUC__) && !defined(__clang__))
#define CUSPFIT_TARGET_CLONES __attribute__((target_clones("avx2", "default")))
#else
#define CUSPFIT_TARGET_CLONES
#endif

namespace cuspfit::detail {

CUSPFIT_TARGET_CLONES
int tpe_filter_block(const double* xs, const double* ys, const double* zs,
                     std::size_t n, double qx, double qy, double qz,
                     double nx, double ny, double nz, double t,
                     double coincident2, double* score) {
  for (std::size_t j = 0; j < n; ++j) {
    const double dx = qx - xs[j];
    const double dy = qy - ys[j];
    const double dz = qz - zs[j];
    const double d2 = dx * dx + dy * dy + dz * dz;
    const double h = std::fabs(nx * dx + ny * dy + nz * dz);
    const double s1 = h - t * d2;
    const double s2 = coincident2 - d2;
    score[j] = s1 > s2 ? s1 : s2;
  }
  int count = 0;
  for (std::size_t j = 0; j < n; ++j) count += score[j] >= 0.0 ? 1 : 0;
  return count;
}

}  // namespace cuspfit::detail
