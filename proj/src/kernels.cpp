#include "frapm/kernels.hpp"

namespace frapm {

void transport(Backend be, std::span<const Particle> in, std::span<Particle> out,
               const SizeFunction& b, double dt, int substeps) {
  if (be == Backend::Serial)
    serial::transport(in, out, b, dt, substeps);
  else
    parallel::transport(in, out, b, dt, substeps);
}

void sample(Backend be, std::span<const Particle> ps, const SizeFunction& f, std::span<double> out) {
  if (be == Backend::Serial)
    serial::sample(ps, f, out);
  else
    parallel::sample(ps, f, out);
}

void decay(Backend be, std::span<const Particle> in, std::span<const double> rates, double dt,
           double sign, std::span<Particle> out) {
  if (be == Backend::Serial)
    serial::decay(in, rates, dt, sign, out);
  else
    parallel::decay(in, rates, dt, sign, out);
}

void grouped_forcing(Backend be, const GroupedEntries& entries, std::span<const double> times,
                     double sign, std::span<double> out) {
  if (be == Backend::Serial)
    serial::grouped_forcing(entries, times, sign, out);
  else
    parallel::grouped_forcing(entries, times, sign, out);
}

void newborn_rhs(Backend be, std::span<const double> y, std::span<const double> rates, double sign,
                 std::span<const double> forcing, const Coupling& coupling, std::span<double> out) {
  if (be == Backend::Serial)
    serial::newborn_rhs(y, rates, sign, forcing, coupling, out);
  else
    parallel::newborn_rhs(y, rates, sign, forcing, coupling, out);
}

}  // namespace frapm
