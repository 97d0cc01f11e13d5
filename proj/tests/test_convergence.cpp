#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "frapm/cell_division.hpp"
#include "frapm/convergence.hpp"
#include "frapm/errors.hpp"

using namespace frapm;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::path(FRAPM_TEST_DATA_DIR) / name;
  fs::remove_all(p);
  return p;
}

ModelSpec transport_only() {
  ModelSpec m = cell_division::make_model();
  m.id = "transport-only";
  m.death = autonomous([](double) { return 0.0; });
  m.births[0].intensity = autonomous([](double) { return 0.0; });
  return m;
}

}  // namespace

TEST_CASE("step counts must be integral") {
  CHECK(step_count(1.0, 0.1) == 10);
  CHECK(step_count(1.0, 7.8125e-4) == 1280);
  CHECK(step_count(1.0, 1.5625e-3) == 640);
  try {
    (void)step_count(1.0, 0.3);
    FAIL("expected NonIntegralStepCount");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonIntegralStepCount);
  }
  CHECK_THROWS_AS(step_count(1.0, 0.0), Error);
}

TEST_CASE("orders from consecutive errors") {
  std::vector<ConvergenceRow> rows{{0.1, 4.0, {}}, {0.05, 2.0, {}}, {0.025, 0.5, {}}};
  fill_orders(rows);
  CHECK_FALSE(rows[0].q.has_value());
  CHECK(*rows[1].q == doctest::Approx(1.0));
  CHECK(*rows[2].q == doctest::Approx(2.0));
}

TEST_CASE("CSV round-trips and tables render") {
  ConvergenceReport rep;
  rep.model_id = "m";
  rep.epsilon = 1e-3;
  rep.reference = kDeskReference;
  std::stringstream empty;
  write_csv(empty, rep);
  CHECK(empty.str() == "dt,err,q\n");
  CHECK(read_csv(empty).empty());

  rep.rows = {{0.1, 1.0391193492677439e-3, {}}, {0.05, 8.823037689904696e-4, {}}, {0.025, 1.559106188788983e-4, {}}};
  fill_orders(rep.rows);
  std::stringstream ss;
  write_csv(ss, rep);
  const auto back = read_csv(ss);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].dt == rep.rows[i].dt);
    CHECK(back[i].err == rep.rows[i].err);
    CHECK(back[i].q == rep.rows[i].q);
  }
  std::ostringstream table, plot;
  write_table(table, rep);
  write_plot_data(plot, rep);
  CHECK(table.str().find("2.5005") != std::string::npos);
  std::istringstream pd(plot.str());
  std::string header;
  std::getline(pd, header);
  CHECK(header == "# dt err");
  double dt = 0, err = 0;
  for (int i = 0; i < 3; ++i) pd >> dt >> err;
  CHECK(dt == 0.025);
  CHECK(err == rep.rows[2].err);

  std::stringstream bad("dt,err\n");
  CHECK_THROWS_AS(read_csv(bad), Error);
  std::stringstream junk("dt,err,q\n0.1,abc,\n");
  CHECK_THROWS_AS(read_csv(junk), Error);
}

TEST_CASE("reference solutions are cached by content") {
  const ModelSpec m = cell_division::make_model();
  HarnessOptions opts;
  opts.cache_dir = fresh_dir("cache-test").string();
  const ReferenceParams ref{0.05, 1e-2, 0.05};
  const ParticleMeasure first = reference_solution(m, 1.0, ref, opts);
  const fs::path file = fs::path(opts.cache_dir) / ("ref-" + reference_cache_key(m, 1.0, ref, opts) + ".particles");
  CHECK(fs::exists(file));
  const ParticleMeasure second = reference_solution(m, 1.0, ref, opts);
  CHECK(first == second);

  CHECK(reference_cache_key(m, 1.0, ref, opts) != reference_cache_key(m, 1.0, {0.05, 2e-2, 0.05}, opts));
  HarnessOptions strict = opts;
  strict.negative_mass = NegativeMassPolicy::Error;
  CHECK(reference_cache_key(m, 1.0, ref, opts) != reference_cache_key(m, 1.0, ref, strict));

  SUBCASE("a reference compared with itself has zero error") {
    CHECK(error_at(m, 1.0, 0.05, 1e-2, first, opts) == 0.0);
  }
  SUBCASE("non-integral ladders are refused") {
    CHECK_THROWS_AS(error_at(m, 1.0, 0.3, 1e-2, first, opts), Error);
  }
}

TEST_CASE("cache directory falls back to the environment") {
  ::setenv("FRA_CACHE_DIR", "/tmp/somewhere", 1);
  CHECK(default_cache_dir() == "/tmp/somewhere");
  ::unsetenv("FRA_CACHE_DIR");
  CHECK(default_cache_dir() == ".fra-cache");
}

TEST_CASE("order table halves dt down the rows") {
  const ModelSpec m = transport_only();
  const ReferenceParams ref{7.8125e-4, 1e-2, 7.8125e-4};
  const ParticleMeasure mu_ref = reference_solution(m, 1.0, ref);
  const ConvergenceReport rep = order_table(m, 1.0, 0.1, 7, 1e-2, mu_ref, ref);
  REQUIRE(rep.rows.size() == 8);
  CHECK_FALSE(rep.rows[0].q.has_value());
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    CHECK(rep.rows[i].dt == rep.rows[i - 1].dt / 2.0);
    CHECK(rep.rows[i].q.has_value());
  }
  CHECK(rep.rows.back().err == 0.0);
  CHECK_THROWS_AS(order_table(m, 1.0, 0.1, 0, 1e-2, mu_ref, ref), Error);
}
