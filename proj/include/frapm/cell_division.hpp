#pragma once

#include "frapm/model.hpp"

// Symmetric cell division: cells grow at b(x) = 0.1 (1 - x), divide at rate
// beta(y) into two daughters of size y / 2, and the mother is removed
// (c = beta, beta_1 = 2 beta). Reproduction is possible on [x0, x_max].
namespace frapm::cell_division {

inline constexpr double kMinDivisionSize = 0.25;  // x0
inline constexpr double kMaxDivisionSize = 1.0;   // x_max
inline constexpr double kJunction = 0.625;        // (x0 + 1) / 2

// Guard for 1 - G(y) in the division rate.
inline constexpr double kDenominatorFloor = 1e-12;
inline constexpr double kRateCap = 1e6;

double growth(double x);

/// Fertility density g; throws OutOfDomain outside [x0, x_max].
double g_fertility(double y);

/// G(y) = integral of g over [x0, y], from closed-form antiderivatives.
double g_integral(double y);

/// b(y) g(y) / (1 - G(y)) on [x0, x_max], zero elsewhere.
double beta_division(double y);

/// (1 - x)(x - x0/2)^3 on [x0/2, 1], zero elsewhere.
double mu0_density(double x);

/// (7/8)^5 / 20.
double mu0_total_mass();

ModelSpec make_model();

}  // namespace frapm::cell_division
