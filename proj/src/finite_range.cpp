#include "frapm/finite_range.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "frapm/errors.hpp"

namespace frapm {

std::size_t fra_grid_size(double epsilon, double cap) {
  const double ratio = cap / epsilon;
  const double nearest = std::round(ratio);
  if (nearest >= 1.0 && std::abs(ratio - nearest) <= 1e-9 * nearest)
    return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::floor(ratio)) + 1;
}

QuantizedMap::QuantizedMap(SizeFunction f, double epsilon, double cap)
    : f_(std::move(f)), epsilon_(epsilon), cap_(cap) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw Error(ErrorKind::InvalidParam, "epsilon must be positive");
  if (!(cap > 0.0) || !std::isfinite(cap))
    throw Error(ErrorKind::InvalidParam, "cap M must be positive");
  if (!f_) throw Error(ErrorKind::InvalidParam, "placement map is empty");
  grid_size_ = fra_grid_size(epsilon, cap);
}

std::size_t QuantizedMap::slot(double x) const {
  double arg = x;
  if (!(x >= 0.0))
    arg = 0.0;
  else if (x >= cap_)
    arg = std::nextafter(cap_, 0.0);
  const double fx = f_(arg);
  if (!(fx > 0.0)) return 0;
  double j = std::floor(fx / epsilon_);
  // The division may round across an integer; settle on the exact cell.
  if (j * epsilon_ > fx) j -= 1.0;
  if ((j + 1.0) * epsilon_ <= fx) j += 1.0;
  const double last = static_cast<double>(grid_size_ - 1);
  if (j > last) j = last;
  if (j < 0.0) j = 0.0;
  return static_cast<std::size_t>(j);
}

QuantizedMap build_quantized(SizeFunction f, double epsilon, double cap) {
  QuantizedMap q(std::move(f), epsilon, cap);
  for (int i = 0; i < kSublinearitySamples; ++i) {
    const double x = cap * static_cast<double>(i) / kSublinearitySamples;
    const double fx = q.source()(x);
    if (fx > x + 1e-12) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "f(" << x << ") = " << fx << " exceeds x";
      throw Error(ErrorKind::SublinearityViolated, msg.str());
    }
  }
  return q;
}

std::vector<double> value_grid(const QuantizedMap& q) {
  std::vector<double> out(q.grid_size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = q.grid_value(j);
  return out;
}

PiecewiseLinearMap::PiecewiseLinearMap(std::vector<Knot> knots) : knots_(std::move(knots)) {
  if (knots_.empty()) throw Error(ErrorKind::InvalidParam, "piecewise-linear map needs a knot");
  for (std::size_t i = 1; i < knots_.size(); ++i)
    if (!(knots_[i - 1].x <= knots_[i].x))
      throw Error(ErrorKind::InvalidParam, "knots must be sorted");
}

double PiecewiseLinearMap::eval(double x) const {
  if (x <= knots_.front().x) return knots_.front().value;
  if (x >= knots_.back().x) return knots_.back().value;
  auto hi = std::upper_bound(knots_.begin(), knots_.end(), x,
                             [](double v, const Knot& k) { return v < k.x; });
  auto lo = hi - 1;
  if (x == lo->x || hi->x == lo->x) return lo->value;
  const double t = (x - lo->x) / (hi->x - lo->x);
  return lo->value + t * (hi->value - lo->value);
}

namespace {

// Left end of the constancy interval of `value` that contains `inside`,
// searched for in (outside, inside]. Assumes one transition in between.
double interval_start(const QuantizedMap& q, double outside, double inside, double value) {
  double lo = outside, hi = inside;
  for (int it = 0; it < 200; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (q.eval(mid) == value)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace

PiecewiseLinearMap build_fbar(const QuantizedMap& q, std::span<const double> locations) {
  if (locations.empty()) throw Error(ErrorKind::EmptyLocationSet, "build_fbar needs locations");
  std::vector<double> d(locations.begin(), locations.end());
  std::sort(d.begin(), d.end());
  d.erase(std::unique(d.begin(), d.end()), d.end());

  struct Run {
    double first, last, value;
  };
  std::vector<Run> runs;
  for (double x : d) {
    const double v = q.eval(x);
    if (!runs.empty() && runs.back().value == v)
      runs.back().last = x;
    else
      runs.push_back({x, x, v});
  }

  std::vector<PiecewiseLinearMap::Knot> knots;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    double start = runs[i].first;
    if (i > 0) start = interval_start(q, runs[i - 1].last, runs[i].first, runs[i].value);
    knots.push_back({start, runs[i].value});
    if (runs[i].last > start) knots.push_back({runs[i].last, runs[i].value});
  }
  return PiecewiseLinearMap(std::move(knots));
}

}  // namespace frapm
