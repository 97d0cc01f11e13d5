#include "kernels_detail.hpp"

namespace frapm::serial {

void transport(std::span<const Particle> in, std::span<Particle> out, const SizeFunction& b,
               double dt, int substeps) {
  for (std::size_t i = 0; i < in.size(); ++i)
    out[i] = {detail::rk4_advance(in[i].location, b, dt, substeps), in[i].mass};
}

void sample(std::span<const Particle> ps, const SizeFunction& f, std::span<double> out) {
  for (std::size_t i = 0; i < ps.size(); ++i) out[i] = f(ps[i].location);
}

void decay(std::span<const Particle> in, std::span<const double> rates, double dt, double sign,
           std::span<Particle> out) {
  for (std::size_t i = 0; i < in.size(); ++i)
    out[i] = {in[i].location, in[i].mass * std::exp(sign * rates[i] * dt)};
}

void grouped_forcing(const GroupedEntries& entries, std::span<const double> times, double sign,
                     std::span<double> out) {
  const std::size_t groups = entries.offsets.size() - 1;
  for (std::size_t g = 0; g < groups; ++g)
    detail::forcing_group(entries, times, sign, g, out.data() + g * times.size());
}

void newborn_rhs(std::span<const double> y, std::span<const double> rates, double sign,
                 std::span<const double> forcing, const Coupling& coupling, std::span<double> out) {
  for (std::size_t i = 0; i < y.size(); ++i)
    out[i] = detail::newborn_rhs_one(y, rates, sign, forcing, coupling, i);
}

}  // namespace frapm::serial
