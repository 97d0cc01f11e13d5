#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "frapm/kernels.hpp"

using namespace frapm;

namespace {

bool same_bits(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool same_bits(std::span<const Particle> a, std::span<const Particle> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(Particle)) == 0;
}

std::vector<Particle> random_particles(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> loc(0.0, 1.0), mass(0.0, 1e-3);
  std::vector<Particle> ps(n);
  for (auto& p : ps) p = {loc(rng), mass(rng)};
  return ps;
}

struct ThreadGuard {
  explicit ThreadGuard(int n) { parallel::set_threads(n); }
  ~ThreadGuard() { parallel::set_threads(0); }
};

}  // namespace

TEST_CASE("transport kernel integrates the linear growth law") {
  const SizeFunction b = [](double x) { return 0.1 * (1.0 - x); };
  std::vector<Particle> in{{0.5, 1.0}}, out(1);
  serial::transport(in, out, b, 0.1, 1);
  CHECK(std::abs(out[0].location - (1.0 - 0.5 * std::exp(-0.01))) < 1e-10);
  CHECK(out[0].mass == 1.0);
}

TEST_CASE("parallel kernels reproduce the serial ones bit for bit") {
  ThreadGuard guard(4);
  std::mt19937_64 rng(5);
  const std::size_t n = 50000;
  const std::vector<Particle> ps = random_particles(n, rng);
  const SizeFunction b = [](double x) { return 0.1 * (1.0 - x); };
  const SizeFunction c = [](double x) { return std::sin(7.0 * x) + 0.3; };

  SUBCASE("transport") {
    std::vector<Particle> s(n), p(n);
    serial::transport(ps, s, b, 0.0125, 3);
    parallel::transport(ps, p, b, 0.0125, 3);
    CHECK(same_bits(s, p));
  }
  SUBCASE("sample and decay") {
    std::vector<double> rs(n), rp(n);
    serial::sample(ps, c, rs);
    parallel::sample(ps, c, rp);
    CHECK(same_bits(rs, rp));
    std::vector<Particle> s(n), p(n);
    serial::decay(ps, rs, 0.05, -1.0, s);
    parallel::decay(ps, rs, 0.05, -1.0, p);
    CHECK(same_bits(s, p));
  }
  SUBCASE("grouped forcing and newborn right-hand side") {
    const std::size_t groups = 3000;
    std::uniform_int_distribution<std::size_t> size(0, 40);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::size_t> offsets{0};
    std::vector<double> w, r;
    for (std::size_t g = 0; g < groups; ++g) {
      const std::size_t k = size(rng);
      for (std::size_t e = 0; e < k; ++e) {
        w.push_back(u(rng));
        r.push_back(u(rng) + 1.0);
      }
      offsets.push_back(w.size());
    }
    const std::vector<double> times{0.0, 0.025, 0.05};
    std::vector<double> fs(groups * times.size()), fp(groups * times.size());
    const GroupedEntries entries{offsets, w, r};
    serial::grouped_forcing(entries, times, -1.0, fs);
    parallel::grouped_forcing(entries, times, -1.0, fp);
    CHECK(same_bits(fs, fp));

    std::vector<std::size_t> c_off{0}, src;
    std::vector<double> cw;
    std::uniform_int_distribution<std::size_t> pick(0, groups - 1), links(0, 3);
    for (std::size_t g = 0; g < groups; ++g) {
      for (std::size_t e = links(rng); e > 0; --e) {
        src.push_back(pick(rng));
        cw.push_back(u(rng));
      }
      c_off.push_back(src.size());
    }
    std::vector<double> y(groups), rates(groups), forcing(groups);
    for (std::size_t g = 0; g < groups; ++g) {
      y[g] = u(rng);
      rates[g] = u(rng);
      forcing[g] = fs[g * times.size() + 1];
    }
    const Coupling coupling{c_off, src, cw};
    std::vector<double> os(groups), op(groups);
    serial::newborn_rhs(y, rates, -1.0, forcing, coupling, os);
    parallel::newborn_rhs(y, rates, -1.0, forcing, coupling, op);
    CHECK(same_bits(os, op));
  }
}

TEST_CASE("grouped forcing sums weighted exponentials") {
  const std::vector<std::size_t> offsets{0, 2, 2, 3};
  const std::vector<double> w{1.0, 2.0, 3.0}, r{0.5, 1.0, 2.0};
  const std::vector<double> times{0.0, 0.5};
  std::vector<double> out(6);
  serial::grouped_forcing(GroupedEntries{offsets, w, r}, times, -1.0, out);
  CHECK(out[0] == 3.0);
  CHECK(out[1] == doctest::Approx(std::exp(-0.25) + 2.0 * std::exp(-0.5)));
  CHECK(out[2] == 0.0);
  CHECK(out[3] == 0.0);
  CHECK(out[4] == 3.0);
  CHECK(out[5] == doctest::Approx(3.0 * std::exp(-1.0)));
}

TEST_CASE("thread cap is adjustable") {
  parallel::set_threads(3);
#ifdef FRAPM_HAVE_OPENMP
  CHECK(parallel::max_threads() == 3);
#else
  CHECK(parallel::max_threads() == 1);
#endif
  parallel::set_threads(0);
  CHECK(parallel::max_threads() >= 1);
}

TEST_CASE("backend dispatch routes to both implementations") {
  std::mt19937_64 rng(8);
  const std::vector<Particle> ps = random_particles(4096, rng);
  const SizeFunction b = [](double x) { return 0.2 - 0.1 * x; };
  std::vector<Particle> s(ps.size()), p(ps.size());
  transport(Backend::Serial, ps, s, b, 0.1, 2);
  transport(Backend::Parallel, ps, p, b, 0.1, 2);
  CHECK(same_bits(s, p));
}
