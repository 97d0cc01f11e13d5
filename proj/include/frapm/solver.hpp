#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "frapm/finite_range.hpp"
#include "frapm/kernels.hpp"
#include "frapm/measures.hpp"
#include "frapm/model.hpp"

namespace frapm {

enum class NegativeMassPolicy {
  Clamp,  // newborn masses below zero are set to zero and counted
  Error,  // masses below -kNegativeMassTolerance raise NegativeMass
};

inline constexpr double kNegativeMassTolerance = 1e-14;

struct SimConfig {
  double T = 1.0;
  int steps = 10;  // N; dt = T / N
  double epsilon = 1e-2;
  double cap = 1.0;  // FRA range and propagation bound M
  double dx = 0.1;   // initial-data spacing
  int ode_substeps = 1;
  bool create_all_newborns = false;
  double newborn_mass_floor = 0.0;
  // Death term sign as printed in the birth/death ODE system (+c m) instead of decay.
  bool paper_sign = false;
  NegativeMassPolicy negative_mass = NegativeMassPolicy::Clamp;
  Backend backend = Backend::Parallel;
  int threads = 0;  // <= 0: machine default

  double dt() const { return T / steps; }
};

/// Throws InvalidParam on T <= 0, N < 0, eps <= 0, M <= 0, dx <= 0 or substeps < 1.
void check_config(const SimConfig& cfg);

struct StepTrace {
  int k = 0;
  double t = 0.0;  // t_{k+1}
  std::size_t count_before = 0;
  std::size_t count_after = 0;
  double mass_before = 0.0;
  double mass_after = 0.0;
  std::size_t newborns = 0;
  std::size_t clamped = 0;
  double wall_ms = 0.0;
};

struct BirthDeathStats {
  std::size_t newborns = 0;  // particles appended this step
  std::size_t clamped = 0;   // newborn masses raised to zero
};

/// Step 1: every location advanced by RK4 on dx/dt = b(x); masses and order kept.
/// Throws NonFiniteLocation when a trajectory leaves [0, inf).
ParticleMeasure step_transport(const ParticleMeasure& mu, const SizeFunction& b, double dt,
                               int substeps, Backend backend = Backend::Parallel);

/// Step 2: masses of the transported measure decay exactly (m e^{-c dt});
/// newborn slots on the FRA grid integrate their inflow with RK4, including
/// inflow from other newborns of the same step. The result is sorted.
ParticleMeasure step_birth_death(const ParticleMeasure& transported, const SizeFunction& death,
                                 std::span<const SizeFunction> birth_rates,
                                 std::span<const QuantizedMap> placements, double dt,
                                 const SimConfig& cfg, BirthDeathStats* stats = nullptr);

struct RunResult {
  ParticleMeasure final_measure;
  std::vector<StepTrace> trace;
};

/// Alternates the two steps for k = 0..N-1. Growth is frozen on mu_k, death
/// and birth rates on the transported measure. Errors carry the step index.
RunResult run(const ModelSpec& model, const SimConfig& cfg, const ParticleMeasure& initial);

/// The model's initial density discretized on its support with spacing dx.
ParticleMeasure initial_measure(const ModelSpec& model, double dx);

struct OracleCheck {
  std::string label;
  double expected;
  double actual;
  bool ok;
};

/// Two full steps of the scheme on a hand-solvable model (constant b, c and
/// beta, f = 0, eps = M) compared against closed forms within 1e-10.
std::vector<OracleCheck> two_particle_oracle();

}  // namespace frapm
