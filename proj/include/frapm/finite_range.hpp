#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace frapm {

using SizeFunction = std::function<double(double)>;

/// Finite Range Approximation f^eps of a sublinear Lipschitz map f on [0, M).
///
/// f^eps(x) = eps * floor(f(x) / eps) on [0, M); outside, x < 0 evaluates as
/// x = 0 and x >= M as the last double below M. The image is the value grid
/// {0, eps, ..., (J-1) eps} with J = M/eps when that is an integer and
/// floor(M/eps) + 1 otherwise.
class QuantizedMap {
 public:
  QuantizedMap(SizeFunction f, double epsilon, double cap);

  double epsilon() const { return epsilon_; }
  double cap() const { return cap_; }
  std::size_t grid_size() const { return grid_size_; }
  const SizeFunction& source() const { return f_; }

  /// Grid index j (0-based) with f^eps(x) = j * eps.
  std::size_t slot(double x) const;
  double eval(double x) const { return grid_value(slot(x)); }
  double operator()(double x) const { return eval(x); }

  /// a_{j+1} = j * eps; the solver places newborns exactly here.
  double grid_value(std::size_t j) const { return static_cast<double>(j) * epsilon_; }

 private:
  SizeFunction f_;
  double epsilon_;
  double cap_;
  std::size_t grid_size_;
};

/// J for a given (eps, M), following the integer / non-integer case split.
std::size_t fra_grid_size(double epsilon, double cap);

/// Validates (eps, M), spot-checks f(x) <= x on a sample grid of [0, M) and
/// returns the quantized map. Throws InvalidParam / SublinearityViolated.
QuantizedMap build_quantized(SizeFunction f, double epsilon, double cap);

inline constexpr int kSublinearitySamples = 1025;

std::vector<double> value_grid(const QuantizedMap& q);

/// Continuous piecewise-linear map through sorted knots, constant outside.
class PiecewiseLinearMap {
 public:
  struct Knot {
    double x;
    double value;
  };

  explicit PiecewiseLinearMap(std::vector<Knot> knots);

  std::span<const Knot> knots() const { return knots_; }
  double eval(double x) const;
  double operator()(double x) const { return eval(x); }

 private:
  std::vector<Knot> knots_;
};

/// Lipschitz modification of f^eps that agrees with it on every point of D:
/// constant a_i from the start of each constancy interval to its last point of
/// D, then linear up to the start of the next interval that contains a point
/// of D. Intervals without points of D are bridged by that linear segment.
///
/// Test-side tool; the solver evaluates f^eps directly.
PiecewiseLinearMap build_fbar(const QuantizedMap& q, std::span<const double> locations);

}  // namespace frapm
