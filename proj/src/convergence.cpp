#include "frapm/convergence.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "frapm/errors.hpp"
#include "frapm/io.hpp"

namespace frapm {

namespace {

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void say(const HarnessOptions& opts, const std::string& line) {
  if (opts.log) opts.log(line);
}

}  // namespace

std::string default_cache_dir() {
  if (const char* env = std::getenv("FRA_CACHE_DIR"); env && *env) return env;
  return ".fra-cache";
}

SimConfig make_config(const ModelSpec& model, double T, double dt, double epsilon, double dx,
                      const HarnessOptions& opts) {
  SimConfig cfg;
  cfg.T = T;
  cfg.steps = step_count(T, dt);
  cfg.epsilon = epsilon;
  cfg.cap = model.propagation_bound;
  cfg.dx = dx;
  cfg.paper_sign = opts.paper_sign;
  cfg.negative_mass = opts.negative_mass;
  cfg.backend = opts.backend;
  cfg.threads = opts.threads;
  return cfg;
}

int step_count(double T, double dt) {
  if (!(T > 0.0) || !(dt > 0.0))
    throw Error(ErrorKind::InvalidParam, "T and dt must be positive");
  const double ratio = T / dt;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-9 * std::max(1.0, n))
    throw Error(ErrorKind::NonIntegralStepCount, "T / dt = " + g17(ratio) + " is not an integer");
  return static_cast<int>(n);
}

std::string reference_cache_key(const ModelSpec& model, double T, const ReferenceParams& ref,
                                const HarnessOptions& opts) {
  const std::string canon = model.id + "|T=" + g17(T) + "|dt=" + g17(ref.dt) + "|eps=" +
                            g17(ref.epsilon) + "|dx=" + g17(ref.dx) + "|M=" +
                            g17(model.propagation_bound) + "|sign=" + (opts.paper_sign ? "paper" : "decay") +
                            "|mass=" + (opts.negative_mass == NegativeMassPolicy::Clamp ? "clamp" : "strict");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canon)));
  return buf;
}

ParticleMeasure reference_solution(const ModelSpec& model, double T, const ReferenceParams& ref,
                                   const HarnessOptions& opts) {
  namespace fs = std::filesystem;
  fs::path path;
  if (!opts.cache_dir.empty()) {
    path = fs::path(opts.cache_dir) / ("ref-" + reference_cache_key(model, T, ref, opts) + ".particles");
    if (std::ifstream in(path); in) {
      say(opts, "reference: cached " + path.string());
      return read_particles(in);
    }
  }
  say(opts, "reference: computing dt=" + g17(ref.dt) + " eps=" + g17(ref.epsilon) + " dx=" + g17(ref.dx));
  const SimConfig cfg = make_config(model, T, ref.dt, ref.epsilon, ref.dx, opts);
  ParticleMeasure mu = run(model, cfg, initial_measure(model, ref.dx)).final_measure;
  if (!path.empty()) {
    write_file_atomic(path.string(), [&](std::ostream& os) { write_particles(os, mu); });
    say(opts, "reference: stored " + path.string());
  }
  return mu;
}

double error_at(const ModelSpec& model, double T, double dt, double epsilon,
                const ParticleMeasure& reference, const HarnessOptions& opts) {
  const SimConfig cfg = make_config(model, T, dt, epsilon, dt, opts);
  const ParticleMeasure mu = run(model, cfg, initial_measure(model, dt)).final_measure;
  return rho_distance(reference, mu);
}

void fill_orders(std::vector<ConvergenceRow>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i == 0) {
      rows[i].q.reset();
      continue;
    }
    rows[i].q = std::log2(rows[i - 1].err / rows[i].err);
  }
}

ConvergenceReport order_table(const ModelSpec& model, double T, double dt_max, int halvings,
                              double epsilon, const ParticleMeasure& reference,
                              const ReferenceParams& ref, const HarnessOptions& opts) {
  if (halvings < 1) throw Error(ErrorKind::InvalidParam, "halvings must be at least 1");
  const auto start = std::chrono::steady_clock::now();
  ConvergenceReport report;
  report.model_id = model.id;
  report.T = T;
  report.epsilon = epsilon;
  report.reference = ref;
  for (int h = 0; h <= halvings; ++h) {
    const double dt = std::ldexp(dt_max, -h);
    const double err = error_at(model, T, dt, epsilon, reference, opts);
    say(opts, "row dt=" + g17(dt) + " err=" + g17(err));
    report.rows.push_back({dt, err, std::nullopt});
  }
  fill_orders(report.rows);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void write_csv(std::ostream& os, const ConvergenceReport& report) {
  os << "dt,err,q\n";
  for (const ConvergenceRow& r : report.rows)
    os << g17(r.dt) << ',' << g17(r.err) << ',' << (r.q ? g17(*r.q) : "") << '\n';
}

std::vector<ConvergenceRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "dt,err,q")
    throw Error(ErrorKind::ParseError, "expected header 'dt,err,q'");
  std::vector<ConvergenceRow> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos)
      throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": expected three fields");
    try {
      ConvergenceRow r{std::stod(line.substr(0, c1)), std::stod(line.substr(c1 + 1, c2 - c1 - 1)), std::nullopt};
      const std::string q = line.substr(c2 + 1);
      if (!q.empty()) r.q = std::stod(q);
      rows.push_back(r);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": bad number");
    }
  }
  return rows;
}

void write_table(std::ostream& os, const ConvergenceReport& report) {
  char buf[128];
  os << "model " << report.model_id << "  T = " << g17(report.T) << "  epsilon = " << g17(report.epsilon)
     << "\nreference dt = " << g17(report.reference.dt) << "  epsilon = " << g17(report.reference.epsilon)
     << "  dx = " << g17(report.reference.dx) << '\n';
  std::snprintf(buf, sizeof buf, "%-14s %-24s %s\n", "dt", "Err", "q");
  os << buf;
  for (const ConvergenceRow& r : report.rows) {
    if (r.q)
      std::snprintf(buf, sizeof buf, "%-14.8g %-24.16e %.16f\n", r.dt, r.err, *r.q);
    else
      std::snprintf(buf, sizeof buf, "%-14.8g %-24.16e %s\n", r.dt, r.err, "-");
    os << buf;
  }
}

void write_plot_data(std::ostream& os, const ConvergenceReport& report) {
  os << "# dt err\n";
  for (const ConvergenceRow& r : report.rows) os << g17(r.dt) << ' ' << g17(r.err) << '\n';
}

}  // namespace frapm
