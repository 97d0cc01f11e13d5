#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "frapm/measures.hpp"
#include "frapm/model.hpp"
#include "frapm/solver.hpp"

namespace frapm {

struct ReferenceParams {
  double dt;
  double epsilon;
  double dx;
};

// One halving below the finest ladder rows the desk studies use.
inline constexpr ReferenceParams kDeskReference{1.5625e-3, 1e-4, 1.5625e-3};
inline constexpr ReferenceParams kPaperReference{7.8125e-4, 3.90625e-5, 7.8125e-4};

struct HarnessOptions {
  std::string cache_dir;  // empty: no disk cache
  Backend backend = Backend::Parallel;
  int threads = 0;
  bool paper_sign = false;
  NegativeMassPolicy negative_mass = NegativeMassPolicy::Clamp;
  std::function<void(const std::string&)> log;  // progress lines, optional
};

/// $FRA_CACHE_DIR when set, else ".fra-cache".
std::string default_cache_dir();

/// Solver configuration for one run of `model` at the given parameters; M is
/// the model's propagation bound.
SimConfig make_config(const ModelSpec& model, double T, double dt, double epsilon, double dx,
                      const HarnessOptions& opts);

/// N = T / dt; NonIntegralStepCount unless the ratio is an integer within 1e-9.
int step_count(double T, double dt);

/// Fine-parameter run from the model's initial density, cached on disk under
/// a hash of (model id, T, parameters, sign convention, mass policy).
ParticleMeasure reference_solution(const ModelSpec& model, double T, const ReferenceParams& ref,
                                   const HarnessOptions& opts = {});
std::string reference_cache_key(const ModelSpec& model, double T, const ReferenceParams& ref,
                                const HarnessOptions& opts);

/// rho(reference, mu_N) for a run with dx = dt.
double error_at(const ModelSpec& model, double T, double dt, double epsilon,
                const ParticleMeasure& reference, const HarnessOptions& opts = {});

struct ConvergenceRow {
  double dt;
  double err;
  std::optional<double> q;  // log2(err(2 dt) / err(dt)); absent on the first row
};

struct ConvergenceReport {
  std::string model_id;
  double T = 1.0;
  double epsilon = 0.0;
  ReferenceParams reference{};
  double wall_seconds = 0.0;
  std::vector<ConvergenceRow> rows;
};

/// Fills q for rows 2.. from consecutive errors.
void fill_orders(std::vector<ConvergenceRow>& rows);

/// Rows dt_max, dt_max/2, ..., dt_max/2^halvings against one reference.
ConvergenceReport order_table(const ModelSpec& model, double T, double dt_max, int halvings,
                              double epsilon, const ParticleMeasure& reference,
                              const ReferenceParams& ref, const HarnessOptions& opts = {});

// "dt,err,q" with 17 significant digits; q empty on the first row.
void write_csv(std::ostream& os, const ConvergenceReport& report);
std::vector<ConvergenceRow> read_csv(std::istream& is);
/// Aligned three-column table (dt, Err, q) with a short parameter header.
void write_table(std::ostream& os, const ConvergenceReport& report);
/// Whitespace-separated "dt err" columns for a log-log plot.
void write_plot_data(std::ostream& os, const ConvergenceReport& report);

}  // namespace frapm
