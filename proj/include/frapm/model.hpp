#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "frapm/finite_range.hpp"
#include "frapm/measures.hpp"

namespace frapm {

/// Coefficient of the model equation: for a time and a population state,
/// a function of size. The solver freezes it once per step.
using CoefficientMap = std::function<SizeFunction(double t, const ParticleMeasure& mu)>;

/// Wraps a state-independent size function as a coefficient map.
CoefficientMap autonomous(SizeFunction f);

struct BirthBranch {
  CoefficientMap intensity;  // beta_p, 1/time
  SizeFunction placement;    // f_p, child size for a parent of size y
};

struct ModelSpec {
  std::string id;
  CoefficientMap growth;  // b, size/time
  CoefficientMap death;   // c, 1/time
  std::vector<BirthBranch> births;
  double support_lo = 0.0;  // initial data support
  double support_hi = 1.0;
  double propagation_bound = 1.0;  // M
  SizeFunction initial_density;    // optional
  std::function<std::vector<std::string>()> diagnostics;  // optional notes for validate

  std::size_t branch_count() const { return births.size(); }
};

enum class ViolationKind {
  SublinearityViolated,
  BoundaryInflowViolated,
  NonFiniteCoefficient,
  InvalidSupport,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  double location;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<std::string> warnings;  // e.g. negative death or birth rates
  std::vector<std::string> notes;

  bool ok() const { return violations.empty(); }
};

/// Samples the structural assumptions on a grid of [0, M) and on randomized
/// (t, mu) probes. Only f_p(x) <= x, b(t, mu)(0) >= 0, finiteness and a sane
/// support count as violations; sign problems of c and beta_p are warnings.
ValidationReport validate(const ModelSpec& spec, int samples, std::uint64_t seed = 12345);

void print_report(std::ostream& os, const ValidationReport& report);

}  // namespace frapm
