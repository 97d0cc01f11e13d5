#pragma once

#include <cmath>
#include <cstddef>

#include "frapm/kernels.hpp"
#include "frapm/summation.hpp"

namespace frapm::detail {

inline double rk4_advance(double x, const SizeFunction& b, double dt, int substeps) {
  const double h = dt / substeps;
  for (int s = 0; s < substeps; ++s) {
    const double k1 = b(x);
    const double k2 = b(x + 0.5 * h * k1);
    const double k3 = b(x + 0.5 * h * k2);
    const double k4 = b(x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

inline void forcing_group(const GroupedEntries& e, std::span<const double> times, double sign,
                          std::size_t g, double* out) {
  const std::size_t begin = e.offsets[g], end = e.offsets[g + 1];
  for (std::size_t l = 0; l < times.size(); ++l) {
    CompensatedSum s;
    for (std::size_t k = begin; k < end; ++k) {
      const double f = times[l] == 0.0 ? 1.0 : std::exp(sign * e.rates[k] * times[l]);
      s.add(e.weights[k] * f);
    }
    out[l] = s.value();
  }
}

inline double newborn_rhs_one(std::span<const double> y, std::span<const double> rates, double sign,
                              std::span<const double> forcing, const Coupling& c, std::size_t i) {
  CompensatedSum s;
  s.add(forcing[i]);
  for (std::size_t k = c.offsets[i]; k < c.offsets[i + 1]; ++k) s.add(c.weights[k] * y[c.sources[k]]);
  s.add(sign * rates[i] * y[i]);
  return s.value();
}

}  // namespace frapm::detail
