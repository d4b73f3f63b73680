#pragma once

#include <vector>

#include "hyperksh/core.hpp"

namespace test_support {

inline std::vector<hyperksh::PhasePoint> grid(double lo, double hi, int n) {
  std::vector<hyperksh::PhasePoint> pts;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      pts.push_back({lo + (hi - lo) * i / (n - 1), lo + (hi - lo) * j / (n - 1)});
    }
  }
  return pts;
}

template <class F, class G>
double max_diff(const F& f, const G& g, const std::vector<hyperksh::PhasePoint>& pts) {
  double worst = 0.0;
  for (const auto& z : pts) worst = std::max(worst, std::abs(f(z.x, z.p) - g(z.x, z.p)));
  return worst;
}

}  // namespace test_support
