#include "kernels_detail.hpp"

#ifdef FRAPM_HAVE_OPENMP
#include <omp.h>
#endif

namespace frapm::parallel {

namespace {
// Below this many items the fork/join costs more than the loop.
constexpr std::ptrdiff_t kMinParallel = 2048;
}  // namespace

int max_threads() {
#ifdef FRAPM_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef FRAPM_HAVE_OPENMP
  if (n <= 0) n = omp_get_num_procs();
  omp_set_num_threads(n);
#else
  (void)n;
#endif
}

void transport(std::span<const Particle> in, std::span<Particle> out, const SizeFunction& b,
               double dt, int substeps) {
  const auto n = static_cast<std::ptrdiff_t>(in.size());
#pragma omp parallel for schedule(static) if (n >= kMinParallel)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[i] = {detail::rk4_advance(in[i].location, b, dt, substeps), in[i].mass};
}

void sample(std::span<const Particle> ps, const SizeFunction& f, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(ps.size());
#pragma omp parallel for schedule(static) if (n >= kMinParallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = f(ps[i].location);
}

void decay(std::span<const Particle> in, std::span<const double> rates, double dt, double sign,
           std::span<Particle> out) {
  const auto n = static_cast<std::ptrdiff_t>(in.size());
#pragma omp parallel for schedule(static) if (n >= kMinParallel)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[i] = {in[i].location, in[i].mass * std::exp(sign * rates[i] * dt)};
}

void grouped_forcing(const GroupedEntries& entries, std::span<const double> times, double sign,
                     std::span<double> out) {
  const auto groups = static_cast<std::ptrdiff_t>(entries.offsets.size() - 1);
  const auto work = static_cast<std::ptrdiff_t>(entries.weights.size());
  // Groups vary a lot in size; dynamic scheduling keeps threads busy.
#pragma omp parallel for schedule(dynamic, 16) if (work >= kMinParallel)
  for (std::ptrdiff_t g = 0; g < groups; ++g)
    detail::forcing_group(entries, times, sign, static_cast<std::size_t>(g),
                          out.data() + static_cast<std::size_t>(g) * times.size());
}

void newborn_rhs(std::span<const double> y, std::span<const double> rates, double sign,
                 std::span<const double> forcing, const Coupling& coupling, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(y.size());
#pragma omp parallel for schedule(static) if (n >= kMinParallel)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[i] = detail::newborn_rhs_one(y, rates, sign, forcing, coupling, static_cast<std::size_t>(i));
}

}  // namespace frapm::parallel
