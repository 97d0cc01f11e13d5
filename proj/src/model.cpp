#include "frapm/model.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

namespace frapm {

CoefficientMap autonomous(SizeFunction f) {
  return [f = std::move(f)](double, const ParticleMeasure&) { return f; };
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::SublinearityViolated: return "SublinearityViolated";
    case ViolationKind::BoundaryInflowViolated: return "BoundaryInflowViolated";
    case ViolationKind::NonFiniteCoefficient: return "NonFiniteCoefficient";
    case ViolationKind::InvalidSupport: return "InvalidSupport";
  }
  return "Unknown";
}

namespace {

std::string describe(const char* what, double x, double v) {
  std::ostringstream s;
  s.precision(10);
  s << what << " at x = " << x << ": " << v;
  return s.str();
}

ParticleMeasure random_probe(std::mt19937_64& rng, double hi) {
  std::uniform_int_distribution<int> count(1, 6);
  std::uniform_real_distribution<double> loc(0.0, hi);
  std::uniform_real_distribution<double> mass(0.0, 1.0);
  std::vector<Particle> ps(static_cast<std::size_t>(count(rng)));
  for (auto& p : ps) p = {loc(rng), mass(rng)};
  return canonicalize(ParticleMeasure(std::move(ps)));
}

}  // namespace

ValidationReport validate(const ModelSpec& spec, int samples, std::uint64_t seed) {
  ValidationReport report;
  const double M = spec.propagation_bound;
  if (!(M > 0.0) || !(spec.support_lo < spec.support_hi) || spec.support_lo < 0.0 ||
      spec.support_hi > M) {
    report.violations.push_back({ViolationKind::InvalidSupport, spec.support_hi,
                                 "need 0 <= support_lo < support_hi <= M"});
  }
  if (samples < 1) samples = 1;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> time(0.0, 1.0);

  // Deterministic probe first, then randomized (t, mu).
  std::vector<std::pair<double, ParticleMeasure>> probes;
  probes.emplace_back(0.0, ParticleMeasure({{0.5 * (spec.support_lo + spec.support_hi), 1.0}}));
  for (int i = 0; i < 4; ++i) probes.emplace_back(time(rng), random_probe(rng, M));

  double min_death = INFINITY, min_birth = INFINITY;
  double min_death_x = 0.0, min_birth_x = 0.0;

  for (const auto& [t, mu] : probes) {
    const SizeFunction b = spec.growth(t, mu);
    const double b0 = b(0.0);
    if (!std::isfinite(b0))
      report.violations.push_back({ViolationKind::NonFiniteCoefficient, 0.0, describe("b", 0.0, b0)});
    else if (b0 < 0.0)
      report.violations.push_back(
          {ViolationKind::BoundaryInflowViolated, 0.0, describe("b(t, mu)(0) < 0", 0.0, b0)});

    const SizeFunction c = spec.death(t, mu);
    std::vector<SizeFunction> betas;
    for (const auto& br : spec.births) betas.push_back(br.intensity(t, mu));

    for (int i = 0; i < samples; ++i) {
      const double x = M * static_cast<double>(i) / samples;
      const double bx = b(x), cx = c(x);
      if (!std::isfinite(bx))
        report.violations.push_back({ViolationKind::NonFiniteCoefficient, x, describe("b", x, bx)});
      if (!std::isfinite(cx))
        report.violations.push_back({ViolationKind::NonFiniteCoefficient, x, describe("c", x, cx)});
      else if (cx < min_death) {
        min_death = cx;
        min_death_x = x;
      }
      for (const auto& beta : betas) {
        const double v = beta(x);
        if (!std::isfinite(v))
          report.violations.push_back({ViolationKind::NonFiniteCoefficient, x, describe("beta", x, v)});
        else if (v < min_birth) {
          min_birth = v;
          min_birth_x = x;
        }
      }
    }
  }

  for (std::size_t p = 0; p < spec.births.size(); ++p) {
    const auto& f = spec.births[p].placement;
    for (int i = 0; i < samples; ++i) {
      const double x = M * static_cast<double>(i) / samples;
      const double fx = f(x);
      if (!std::isfinite(fx))
        report.violations.push_back({ViolationKind::NonFiniteCoefficient, x, describe("f", x, fx)});
      else if (fx > x + 1e-12)
        report.violations.push_back({ViolationKind::SublinearityViolated, x,
                                     "branch " + std::to_string(p + 1) + ": " +
                                         describe("f_p(x) > x", x, fx)});
    }
  }

  if (min_death < 0.0) report.warnings.push_back(describe("death rate negative, min", min_death_x, min_death));
  if (min_birth < 0.0) report.warnings.push_back(describe("birth intensity negative, min", min_birth_x, min_birth));
  if (spec.diagnostics)
    for (auto& n : spec.diagnostics()) report.notes.push_back(std::move(n));
  return report;
}

void print_report(std::ostream& os, const ValidationReport& report) {
  os << "violations: " << report.violations.size() << "\n";
  for (const auto& v : report.violations) os << "  " << to_string(v.kind) << ": " << v.detail << "\n";
  for (const auto& w : report.warnings) os << "warning: " << w << "\n";
  for (const auto& n : report.notes) os << "note: " << n << "\n";
}

}  // namespace frapm
