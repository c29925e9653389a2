#pragma once

#include <vector>

namespace hexvessel {

struct GaussRule {
  std::vector<double> points;   // on [0, 1]
  std::vector<double> weights;  // sum to 1
};

/// Gauss-Legendre rule with `n` points mapped to the unit interval.
GaussRule gauss_legendre(int n);

}  // namespace hexvessel
