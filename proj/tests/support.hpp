#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "kvwave/mesh.hpp"

namespace kvwave::testing {

inline Parameters standard_params(double c1 = 1.0, double c2 = 1.0, double c3 = 1.0,
                               double delta = 0.0) {
  Parameters p;
  p.c1_sq = c1;
  p.c2_sq = c2;
  p.c3_sq = c3;
  p.delta = delta;
  p.alpha = 1.0;
  p.beta = 2.0;
  p.length = 3.0;
  p.t_final = 10000.0;
  return p;
}

inline Mesh standard_mesh(const Parameters& p) { return build_mesh(p, 20, 10, 20); }

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace kvwave::testing
