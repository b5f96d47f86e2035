#pragma once

#include <vector>

namespace pendlim {

/// Gauss-Legendre nodes and weights on [-1, 1], ascending nodes.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Newton iteration on the Legendre recurrence; valid for any order >= 1.
GaussLegendreRule gauss_legendre(int order);

}  // namespace pendlim
