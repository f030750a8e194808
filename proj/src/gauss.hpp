#pragma once

#include <vector>

namespace cuspfit {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Rule of the given order (number of points), computed once and cached.
const GaussRule& gauss_rule(int order);

}  // namespace cuspfit
