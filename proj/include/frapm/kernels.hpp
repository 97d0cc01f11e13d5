#pragma once

#include <cstddef>
#include <span>

#include "frapm/finite_range.hpp"
#include "frapm/measures.hpp"

// Data-parallel inner loops of the stepper. Each kernel has a serial
// reference (frapm::serial) and an OpenMP version (frapm::parallel) that must
// agree bit for bit; per-element arithmetic is shared through
// kernels_detail.hpp and every reduction runs in a fixed order inside one
// work item.
namespace frapm {

enum class Backend { Serial, Parallel };

/// Grouped sparse data in CSR layout: group g owns entries [offsets[g], offsets[g+1]).
struct GroupedEntries {
  std::span<const std::size_t> offsets;
  std::span<const double> weights;
  std::span<const double> rates;
};

struct Coupling {
  std::span<const std::size_t> offsets;  // per target
  std::span<const std::size_t> sources;
  std::span<const double> weights;
};

namespace serial {
/// Classical RK4 on dx/dt = b(x) with `substeps` steps of dt / substeps; masses copied.
void transport(std::span<const Particle> in, std::span<Particle> out, const SizeFunction& b,
               double dt, int substeps);
/// out[i] = f(location_i).
void sample(std::span<const Particle> ps, const SizeFunction& f, std::span<double> out);
/// mass_i * exp(sign * rate_i * dt); locations copied.
void decay(std::span<const Particle> in, std::span<const double> rates, double dt, double sign,
           std::span<Particle> out);
/// out[g * T + l] = sum_e weight_e * exp(sign * rate_e * times[l]), compensated, in entry order.
void grouped_forcing(const GroupedEntries& entries, std::span<const double> times, double sign,
                     std::span<double> out);
/// out[i] = forcing_i + sum_e w_e * y[src_e] + sign * rate_i * y_i, compensated.
void newborn_rhs(std::span<const double> y, std::span<const double> rates, double sign,
                 std::span<const double> forcing, const Coupling& coupling, std::span<double> out);
}  // namespace serial

namespace parallel {
/// Classical RK4 on dx/dt = b(x) with `substeps` steps of dt / substeps; masses copied.
void transport(std::span<const Particle> in, std::span<Particle> out, const SizeFunction& b,
               double dt, int substeps);
/// out[i] = f(location_i).
void sample(std::span<const Particle> ps, const SizeFunction& f, std::span<double> out);
/// mass_i * exp(sign * rate_i * dt); locations copied.
void decay(std::span<const Particle> in, std::span<const double> rates, double dt, double sign,
           std::span<Particle> out);
/// out[g * T + l] = sum_e weight_e * exp(sign * rate_e * times[l]), compensated, in entry order.
void grouped_forcing(const GroupedEntries& entries, std::span<const double> times, double sign,
                     std::span<double> out);
/// out[i] = forcing_i + sum_e w_e * y[src_e] + sign * rate_i * y_i, compensated.
void newborn_rhs(std::span<const double> y, std::span<const double> rates, double sign,
                 std::span<const double> forcing, const Coupling& coupling, std::span<double> out);

/// Threads the parallel backend will use (1 without OpenMP).
int max_threads();
/// Caps the parallel backend; n <= 0 restores the machine default.
void set_threads(int n);
}  // namespace parallel

// Backend dispatch.
void transport(Backend be, std::span<const Particle> in, std::span<Particle> out,
               const SizeFunction& b, double dt, int substeps);
void sample(Backend be, std::span<const Particle> ps, const SizeFunction& f, std::span<double> out);
void decay(Backend be, std::span<const Particle> in, std::span<const double> rates, double dt,
           double sign, std::span<Particle> out);
void grouped_forcing(Backend be, const GroupedEntries& entries, std::span<const double> times,
                     double sign, std::span<double> out);
void newborn_rhs(Backend be, std::span<const double> y, std::span<const double> rates, double sign,
                 std::span<const double> forcing, const Coupling& coupling, std::span<double> out);

}  // namespace frapm
