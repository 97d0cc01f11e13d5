#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "frapm/cell_division.hpp"
#include "frapm/errors.hpp"
#include "frapm/solver.hpp"

using namespace frapm;

namespace {

ModelSpec constant_model(double b, double c, double beta, SizeFunction f) {
  ModelSpec m;
  m.id = "constant";
  m.growth = autonomous([b](double) { return b; });
  m.death = autonomous([c](double) { return c; });
  m.births.push_back({autonomous([beta](double) { return beta; }), std::move(f)});
  m.support_lo = 0.0;
  m.support_hi = 1.0;
  m.propagation_bound = 1.0;
  return m;
}

SimConfig config(double T, int N, double eps, double dx = 0.1) {
  SimConfig cfg;
  cfg.T = T;
  cfg.steps = N;
  cfg.epsilon = eps;
  cfg.cap = 1.0;
  cfg.dx = dx;
  return cfg;
}

std::string dump(const ParticleMeasure& mu) {
  std::ostringstream os;
  write_particles(os, mu);
  return os.str();
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::IoError;
}

const SizeFunction half = [](double y) { return 0.5 * y; };

}  // namespace

TEST_CASE("transport step") {
  const ParticleMeasure mu({{0.1, 1.0}, {0.5, 2.0}, {0.9, 0.5}});
  SUBCASE("zero field") {
    CHECK(step_transport(mu, [](double) { return 0.0; }, 0.3, 1) == mu);
  }
  SUBCASE("unit field shifts exactly") {
    const ParticleMeasure out = step_transport(mu, [](double) { return 1.0; }, 0.5, 1);
    for (std::size_t i = 0; i < mu.size(); ++i) {
      CHECK(out.particles()[i].location == mu.particles()[i].location + 0.5);
      CHECK(out.particles()[i].mass == mu.particles()[i].mass);
    }
  }
  SUBCASE("linear growth law against its closed form") {
    const ParticleMeasure one({{0.5, 1.0}});
    for (Backend be : {Backend::Serial, Backend::Parallel}) {
      const ParticleMeasure out = step_transport(one, cell_division::growth, 0.1, 1, be);
      CHECK(std::abs(out.particles()[0].location - (1.0 - 0.5 * std::exp(-0.01))) < 1e-10);
      CHECK(std::abs(out.particles()[0].location - 0.50497504) < 1e-7);
    }
  }
  SUBCASE("particles leaving the half-line") {
    CHECK(kind_of([&] { (void)step_transport(mu, [](double) { return -1.0; }, 0.5, 1); }) ==
          ErrorKind::NonFiniteLocation);
    CHECK(kind_of([&] { (void)step_transport(mu, [](double x) { return 1.0 / (x - 0.5); }, 0.1, 1); }) ==
          ErrorKind::NonFiniteLocation);
  }
  SUBCASE("order is preserved for the cell-division growth law") {
    const ParticleMeasure init = discretize_density(cell_division::mu0_density, 0.125, 1.0, 1e-3);
    const ParticleMeasure out = step_transport(init, cell_division::growth, 0.1, 1);
    CHECK(out.is_sorted());
  }
}

TEST_CASE("birth/death step: pure decay") {
  const ParticleMeasure mu({{0.2, 1.0}, {0.6, 3.0}});
  const std::vector<SizeFunction> betas{[](double) { return 0.0; }};
  const std::vector<QuantizedMap> maps{build_quantized(half, 0.1, 1.0)};
  const double gamma = 0.7, dt = 0.2;
  SimConfig cfg = config(1.0, 5, 0.1);
  const ParticleMeasure out = step_birth_death(mu, [gamma](double) { return gamma; }, betas, maps, dt, cfg);
  REQUIRE(out.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(out.particles()[i].location == mu.particles()[i].location);
    CHECK(out.particles()[i].mass == doctest::Approx(mu.particles()[i].mass * std::exp(-gamma * dt)).epsilon(1e-15));
  }
  SUBCASE("printed sign grows instead") {
    cfg.paper_sign = true;
    const ParticleMeasure up = step_birth_death(mu, [gamma](double) { return gamma; }, betas, maps, dt, cfg);
    CHECK(up.particles()[0].mass == doctest::Approx(std::exp(gamma * dt)));
  }
  SUBCASE("all newborn slots present with zero mass") {
    cfg.create_all_newborns = true;
    const ParticleMeasure all = step_birth_death(mu, [gamma](double) { return gamma; }, betas, maps, dt, cfg);
    CHECK(all.size() == 2 + 10);
    CHECK(all.total_mass() == doctest::Approx(out.total_mass()).epsilon(1e-15));
  }
}

TEST_CASE("birth/death step: single parent with constant intensity") {
  // c = 0: the first-generation newborn gains beta m dt; its own child beta^2 m dt^2 / 2.
  const double y = 0.8, m = 2.0, beta = 0.7, dt = 0.1;
  const ParticleMeasure mu({{y, m}});
  const std::vector<SizeFunction> betas{[beta](double) { return beta; }};
  const std::vector<QuantizedMap> maps{build_quantized(half, 0.1, 1.0)};
  BirthDeathStats st;
  const ParticleMeasure out =
      step_birth_death(mu, [](double) { return 0.0; }, betas, maps, dt, config(1.0, 10, 0.1), &st);
  // Chain 0.8 -> 0.4 -> 0.2 -> 0.1 -> 0.0 -> 0.0 (self-coupled).
  double at04 = -1.0, at02 = -1.0;
  for (const Particle& p : out.particles()) {
    if (p.location == maps[0].grid_value(4)) at04 = p.mass;
    if (p.location == maps[0].grid_value(2)) at02 = p.mass;
  }
  CHECK(at04 == doctest::Approx(beta * m * dt).epsilon(1e-14));
  CHECK(at02 == doctest::Approx(beta * beta * m * dt * dt / 2.0).epsilon(1e-13));
  CHECK(out.particles().back() == Particle{y, m});
  CHECK(st.newborns == 4);
  CHECK(st.clamped == 0);
}

TEST_CASE("birth/death step: negative inflow") {
  // Two parents share a slot; the heavy one has a negative intensity.
  const ParticleMeasure mu({{0.80, 0.1}, {0.82, 5.0}});
  // Zero below 0.7 so the clamped slot has no descendants.
  const std::vector<SizeFunction> betas{[](double x) { return x < 0.7 ? 0.0 : (x < 0.81 ? 1.0 : -1.0); }};
  const std::vector<QuantizedMap> maps{build_quantized(half, 0.1, 1.0)};
  SimConfig cfg = config(1.0, 10, 0.1);
  BirthDeathStats st;
  const ParticleMeasure out = step_birth_death(mu, [](double) { return 0.0; }, betas, maps, 0.1, cfg, &st);
  CHECK(st.clamped == 1);
  for (const Particle& p : out.particles()) CHECK(p.mass >= 0.0);
  cfg.negative_mass = NegativeMassPolicy::Error;
  CHECK(kind_of([&] { (void)step_birth_death(mu, [](double) { return 0.0; }, betas, maps, 0.1, cfg); }) ==
        ErrorKind::NegativeMass);
}

TEST_CASE("newborn mass floor drops light newborns") {
  const ParticleMeasure mu({{0.8, 1e-6}, {0.5, 1.0}});
  const std::vector<SizeFunction> betas{[](double x) { return x > 0.7 ? 1.0 : 0.0; }};
  const std::vector<QuantizedMap> maps{build_quantized(half, 0.1, 1.0)};
  SimConfig cfg = config(1.0, 10, 0.1);
  CHECK(step_birth_death(mu, [](double) { return 0.0; }, betas, maps, 0.1, cfg).size() == 3);
  cfg.newborn_mass_floor = 1e-3;
  CHECK(step_birth_death(mu, [](double) { return 0.0; }, betas, maps, 0.1, cfg).size() == 2);
}

TEST_CASE("two-particle oracle transcript") {
  const auto checks = two_particle_oracle();
  CHECK(checks.size() == 16);
  for (const OracleCheck& c : checks) {
    INFO(c.label << ": expected " << c.expected << ", got " << c.actual);
    CHECK(c.ok);
  }
}

TEST_CASE("mass is nondecreasing when each death spawns two children") {
  // c = beta, birth intensity 2 beta, newborns at the origin.
  const double beta = 0.3;
  const ModelSpec m = constant_model(0.5, beta, 2.0 * beta, [](double) { return 0.0; });
  SimConfig cfg = config(0.1, 2, 2.0);
  cfg.cap = 2.0;
  const ParticleMeasure mu0({{0.3, 0.7}, {0.6, 0.4}});
  const RunResult r = run(m, cfg, mu0);
  for (const StepTrace& t : r.trace) CHECK(t.mass_after >= t.mass_before);
}

TEST_CASE("run basics") {
  const ModelSpec cd = cell_division::make_model();
  const ParticleMeasure mu0 = initial_measure(cd, 0.1);
  SUBCASE("no steps returns the initial measure") {
    const RunResult r = run(cd, config(1.0, 0, 1e-2), mu0);
    CHECK(r.final_measure == mu0);
    CHECK(r.trace.empty());
  }
  SUBCASE("identity dynamics") {
    const ModelSpec id = constant_model(0.0, 0.0, 0.0, half);
    CHECK(run(id, config(1.0, 7, 1e-2), mu0).final_measure == mu0);
    SimConfig all = config(1.0, 3, 0.25);
    all.create_all_newborns = true;
    const ParticleMeasure out = run(id, all, mu0).final_measure;
    CHECK(out.size() == mu0.size() + 3 * 4);
    std::vector<Particle> heavy;
    for (const Particle& p : out.particles())
      if (p.mass > 0.0) heavy.push_back(p);
    CHECK(ParticleMeasure(heavy) == mu0);
  }
  SUBCASE("trace bookkeeping") {
    const RunResult r = run(cd, config(1.0, 10, 1e-2), mu0);
    REQUIRE(r.trace.size() == 10);
    CHECK(r.trace.front().count_before == mu0.size());
    CHECK(r.trace.back().t == doctest::Approx(1.0));
    for (std::size_t k = 1; k < r.trace.size(); ++k) {
      CHECK(r.trace[k].count_before == r.trace[k - 1].count_after);
      CHECK(r.trace[k].mass_before == r.trace[k - 1].mass_after);
    }
    CHECK(r.final_measure.is_sorted());
  }
  SUBCASE("errors name the step") {
    const ModelSpec shrink = constant_model(-1.0, 0.0, 0.0, half);
    const ParticleMeasure one({{0.25, 1.0}});
    try {
      (void)run(shrink, config(1.0, 10, 1e-2), one);
      FAIL("expected NonFiniteLocation");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NonFiniteLocation);
      REQUIRE(e.step().has_value());
      CHECK(*e.step() == 2);
      CHECK(std::string(e.what()).find("step 2") != std::string::npos);
    }
  }
  SUBCASE("bad configuration") {
    CHECK(kind_of([&] { (void)run(cd, config(-1.0, 10, 1e-2), mu0); }) == ErrorKind::InvalidParam);
    CHECK(kind_of([&] { (void)run(cd, config(1.0, 10, 0.0), mu0); }) == ErrorKind::InvalidParam);
    SimConfig bad = config(1.0, 10, 1e-2);
    bad.ode_substeps = 0;
    CHECK(kind_of([&] { (void)run(cd, bad, mu0); }) == ErrorKind::InvalidParam);
  }
}

TEST_CASE("runs are deterministic and backend independent") {
  const ModelSpec cd = cell_division::make_model();
  const ParticleMeasure mu0 = initial_measure(cd, 0.0125);
  SimConfig cfg = config(1.0, 80, 1e-3, 0.0125);
  parallel::set_threads(4);
  const std::string a = dump(run(cd, cfg, mu0).final_measure);
  const std::string b = dump(run(cd, cfg, mu0).final_measure);
  cfg.backend = Backend::Serial;
  const std::string s = dump(run(cd, cfg, mu0).final_measure);
  parallel::set_threads(0);
  CHECK(a == b);
  CHECK(a == s);
}

TEST_CASE("substeps refine the newborn integration") {
  // Self-coupled slot at the origin: y' = (beta - c) y + beta S e^{-c t}.
  const double c = 2.0, beta = 3.0, dt = 0.5, m = 1.0;
  const ModelSpec mdl = constant_model(0.0, c, beta, [](double) { return 0.0; });
  const ParticleMeasure mu({{0.5, m}});
  const double exact = m * std::exp(-c * dt) * (std::exp(beta * dt) - 1.0);
  double prev_err = INFINITY;
  for (int s : {1, 2, 4, 8}) {
    SimConfig cfg = config(dt, 1, 1.0);
    cfg.ode_substeps = s;
    const ParticleMeasure out = run(mdl, cfg, mu).final_measure;
    REQUIRE(out.particles()[0].location == 0.0);
    const double err = std::abs(out.particles()[0].mass - exact);
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 1e-6);
}

TEST_CASE("newborns land on the value grid") {
  const ModelSpec cd = cell_division::make_model();
  for (double eps : {1e-2, 3e-2, 0.07}) {
    const QuantizedMap q = build_quantized(half, eps, 1.0);
    const std::vector<QuantizedMap> maps{q};
    ParticleMeasure mu = initial_measure(cd, 0.05);
    for (int k = 0; k < 5; ++k) {
      const ParticleMeasure bar = step_transport(mu, cell_division::growth, 0.1, 1);
      const std::vector<SizeFunction> betas{cd.births[0].intensity(0.0, bar)};
      const ParticleMeasure next = step_birth_death(bar, cell_division::beta_division, betas, maps, 0.1,
                                                    config(1.0, 10, eps));
      const std::vector<double> grid = value_grid(q);
      for (const Particle& p : next.particles()) {
        bool transported = false;
        for (const Particle& old : bar.particles()) transported = transported || old.location == p.location;
        if (!transported) CHECK(std::find(grid.begin(), grid.end(), p.location) != grid.end());
      }
      mu = next;
    }
  }
}

TEST_CASE("pure transport keeps the total mass bit for bit") {
  const ModelSpec m = constant_model(0.0, 0.0, 0.0, half);
  ModelSpec grow = m;
  grow.growth = autonomous(cell_division::growth);
  const ParticleMeasure mu0 = initial_measure(cell_division::make_model(), 0.01);
  const RunResult r = run(grow, config(1.0, 100, 1e-2, 0.01), mu0);
  const double m0 = mu0.total_mass();
  for (const StepTrace& t : r.trace) CHECK(t.mass_after == m0);
}
