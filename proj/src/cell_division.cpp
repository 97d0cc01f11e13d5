#include "frapm/cell_division.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "frapm/errors.hpp"

namespace frapm::cell_division {

namespace {

void check_domain(double y, const char* what) {
  if (!(y >= kMinDivisionSize && y <= kMaxDivisionSize)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << "(" << y << ") is defined on [1/4, 1] only";
    throw Error(ErrorKind::OutOfDomain, msg.str());
  }
}

}  // namespace

double growth(double x) { return 0.1 * (1.0 - x); }

double g_fertility(double y) {
  check_domain(y, "g");
  if (y <= kJunction) {
    const double w = -2.0 / 3.0 + 8.0 / 3.0 * y;
    return 160.0 / 117.0 * w * w * w;
  }
  const double u = y - kJunction;
  return 640.0 / 117.0 * (-1.0 + 2.0 * y + 16.0 / 3.0 * u * u) +
         5120.0 / 9.0 * u * u * u * (8.0 / 3.0 * y - 11.0 / 3.0);
}

double g_integral(double y) {
  check_domain(y, "G");
  // First piece: d/dy w = 8/3, so the antiderivative is (160/117)(3/32) w^4.
  auto first = [](double v) {
    const double w = -2.0 / 3.0 + 8.0 / 3.0 * v;
    const double w2 = w * w;
    return 160.0 / 117.0 * 3.0 / 32.0 * w2 * w2;
  };
  if (y <= kJunction) return first(y);
  // Second piece in u = y - 5/8: -1 + 2y = 1/4 + 2u and 8y/3 - 11/3 = 8u/3 - 2.
  const double u = y - kJunction;
  const double u2 = u * u, u3 = u2 * u, u4 = u2 * u2, u5 = u4 * u;
  const double second = 640.0 / 117.0 * (u / 4.0 + u2 + 16.0 / 9.0 * u3) +
                        5120.0 / 9.0 * (8.0 / 15.0 * u5 - 0.5 * u4);
  return first(kJunction) + second;
}

double beta_division(double y) {
  if (!(y >= kMinDivisionSize && y <= kMaxDivisionSize)) return 0.0;
  const double numerator = growth(y) * g_fertility(y);
  double denominator = 1.0 - g_integral(y);
  if (denominator < kDenominatorFloor) denominator = kDenominatorFloor;
  return std::clamp(numerator / denominator, -kRateCap, kRateCap);
}

double mu0_density(double x) {
  constexpr double lo = 0.5 * kMinDivisionSize;
  if (!(x >= lo && x <= 1.0)) return 0.0;
  const double s = x - lo;
  return (1.0 - x) * s * s * s;
}

double mu0_total_mass() {
  const double r = 7.0 / 8.0;
  return r * r * r * r * r / 20.0;
}

ModelSpec make_model() {
  ModelSpec spec;
  spec.id = "cell-division";
  spec.growth = autonomous(growth);
  spec.death = autonomous(beta_division);
  spec.births.push_back(
      {autonomous([](double y) { return 2.0 * beta_division(y); }), [](double y) { return 0.5 * y; }});
  spec.support_lo = 0.5 * kMinDivisionSize;
  spec.support_hi = kMaxDivisionSize;
  spec.propagation_bound = 1.0;
  spec.initial_density = mu0_density;
  spec.diagnostics = [] {
    std::ostringstream s;
    s.precision(12);
    s << "G(x_max) = " << g_integral(kMaxDivisionSize) << ", g(x_max) = " << g_fertility(kMaxDivisionSize);
    return std::vector<std::string>{s.str()};
  };
  return spec;
}

}  // namespace frapm::cell_division
