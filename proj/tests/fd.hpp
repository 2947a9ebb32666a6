#pragma once

#include <functional>

namespace fd {

// Eighth-order central differences; h around 1e-2 keeps round-off near 1e-12.
inline double d1(const std::function<double(double)>& f, double x, double h) {
  static constexpr double c[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  double s = 0.0;
  for (int k = 0; k < 4; ++k) s += c[k] * (f(x + (k + 1) * h) - f(x - (k + 1) * h));
  return s / h;
}

inline double d2(const std::function<double(double)>& f, double x, double h) {
  static constexpr double c[4] = {8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
  double s = -205.0 / 72.0 * f(x);
  for (int k = 0; k < 4; ++k) s += c[k] * (f(x + (k + 1) * h) + f(x - (k + 1) * h));
  return s / (h * h);
}

}  // namespace fd
