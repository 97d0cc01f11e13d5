#include "frapm/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "frapm/cell_division.hpp"
#include "frapm/convergence.hpp"
#include "frapm/errors.hpp"
#include "frapm/finite_range.hpp"
#include "frapm/io.hpp"
#include "frapm/kernels.hpp"
#include "frapm/measures.hpp"
#include "frapm/model.hpp"
#include "frapm/model_file.hpp"
#include "frapm/solver.hpp"

namespace frapm {

namespace {

struct ModelArgs {
  std::string name = "cell-division";
  std::string file;
};

struct RunArgs {
  ModelArgs model;
  double T = 1.0;
  double dt = 0.0;
  double epsilon = 0.0;
  double dx = 0.0;  // 0: same as dt
  int substeps = 1;
  bool all_newborns = false;
  double mass_floor = 0.0;
  bool paper_sign = false;
  bool strict_mass = false;
  bool serial = false;
  int threads = 0;
  std::string out;
  std::string trace;
};

struct ConvergenceArgs {
  ModelArgs model;
  double T = 1.0;
  double dt_max = 0.1;
  int halvings = 7;
  double epsilon = 0.0;
  bool paper_reference = false;
  bool paper_sign = false;
  bool strict_mass = false;
  int threads = 0;
  std::string out_csv;
  std::string out_table;
  std::string out_plot;
  std::string cache_dir;
};

struct DistanceArgs {
  std::string a, b;
};

struct InspectArgs {
  ModelArgs model;
  int branch = 1;
  double epsilon = 0.0;
  double cap = 0.0;  // 0: model bound
  int samples = 100001;
};

struct ValidateArgs {
  ModelArgs model;
  int samples = 1001;
  unsigned long long seed = 12345;
};

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ModelSpec resolve_model(const ModelArgs& m) {
  if (!m.file.empty()) return load_model_file(m.file);
  if (m.name == "cell-division") return cell_division::make_model();
  throw Error(ErrorKind::InvalidParam, "unknown built-in model '" + m.name + "' (known: cell-division)");
}

void add_model_flags(CLI::App* sub, ModelArgs& m) {
  sub->add_option("--model", m.name, "Built-in model name")->default_val("cell-division");
  sub->add_option("--model-file", m.file, "Model description file (key = value, piecewise polynomials)")
      ->check(CLI::ExistingFile);
}

ParticleMeasure read_dump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  return read_particles(in);
}

int run_cmd(const RunArgs& a) {
  const ModelSpec model = resolve_model(a.model);
  const double dx = a.dx > 0.0 ? a.dx : a.dt;
  SimConfig cfg;
  cfg.T = a.T;
  cfg.steps = step_count(a.T, a.dt);
  cfg.epsilon = a.epsilon;
  cfg.cap = model.propagation_bound;
  cfg.dx = dx;
  cfg.ode_substeps = a.substeps;
  cfg.create_all_newborns = a.all_newborns;
  cfg.newborn_mass_floor = a.mass_floor;
  cfg.paper_sign = a.paper_sign;
  cfg.negative_mass = a.strict_mass ? NegativeMassPolicy::Error : NegativeMassPolicy::Clamp;
  cfg.backend = a.serial ? Backend::Serial : Backend::Parallel;
  cfg.threads = a.threads;
  check_config(cfg);

  const RunResult res = run(model, cfg, initial_measure(model, dx));
  if (!a.out.empty())
    write_file_atomic(a.out, [&](std::ostream& os) { write_particles(os, res.final_measure); });
  if (!a.trace.empty()) {
    write_file_atomic(a.trace, [&](std::ostream& os) {
      os << "k,t,count,mass,wall_ms\n";
      for (const StepTrace& t : res.trace)
        os << t.k << ',' << g17(t.t) << ',' << t.count_after << ',' << g17(t.mass_after) << ','
           << g17(t.wall_ms) << '\n';
    });
  }
  std::size_t clamped = 0;
  for (const StepTrace& t : res.trace) clamped += t.clamped;
  std::cout << "steps " << cfg.steps << "  particles " << res.final_measure.size() << "  total_mass "
            << g17(res.final_measure.total_mass()) << "  clamped_newborns " << clamped << '\n';
  return 0;
}

int convergence_cmd(const ConvergenceArgs& a) {
  const ModelSpec model = resolve_model(a.model);
  HarnessOptions opts;
  opts.cache_dir = a.cache_dir.empty() ? default_cache_dir() : a.cache_dir;
  opts.threads = a.threads;
  opts.paper_sign = a.paper_sign;
  opts.negative_mass = a.strict_mass ? NegativeMassPolicy::Error : NegativeMassPolicy::Clamp;
  opts.log = [](const std::string& line) { std::cerr << line << '\n'; };
  if (a.threads > 0) parallel::set_threads(a.threads);

  const ReferenceParams ref = a.paper_reference ? kPaperReference : kDeskReference;
  const ParticleMeasure mu_ref = reference_solution(model, a.T, ref, opts);
  const ConvergenceReport report = order_table(model, a.T, a.dt_max, a.halvings, a.epsilon, mu_ref, ref, opts);

  write_table(std::cout, report);
  if (!a.out_csv.empty()) write_file_atomic(a.out_csv, [&](std::ostream& os) { write_csv(os, report); });
  if (!a.out_table.empty()) write_file_atomic(a.out_table, [&](std::ostream& os) { write_table(os, report); });
  if (!a.out_plot.empty()) write_file_atomic(a.out_plot, [&](std::ostream& os) { write_plot_data(os, report); });
  return 0;
}

int distance_cmd(const DistanceArgs& a) {
  const ParticleMeasure mu = read_dump(a.a);
  const ParticleMeasure nu = read_dump(a.b);
  std::cout << "rho " << g17(rho_distance(mu, nu)) << '\n';
  if (mu.total_mass() > 0.0 && nu.total_mass() > 0.0)
    std::cout << "w1 " << g17(w1_normalized(mu, nu)) << '\n';
  return 0;
}

int inspect_cmd(const InspectArgs& a) {
  const ModelSpec model = resolve_model(a.model);
  if (a.branch < 1 || static_cast<std::size_t>(a.branch) > model.births.size())
    throw Error(ErrorKind::InvalidParam, "model '" + model.id + "' has " +
                                             std::to_string(model.births.size()) + " birth branch(es)");
  const double cap = a.cap > 0.0 ? a.cap : model.propagation_bound;
  const SizeFunction& f = model.births[static_cast<std::size_t>(a.branch - 1)].placement;
  const QuantizedMap q = build_quantized(f, a.epsilon, cap);

  std::vector<std::size_t> hits(q.grid_size(), 0);
  double sup = 0.0;
  for (int i = 0; i < a.samples; ++i) {
    const double x = cap * static_cast<double>(i) / static_cast<double>(a.samples);
    ++hits[q.slot(x)];
    sup = std::max(sup, std::abs(f(x) - q.eval(x)));
  }
  char buf[96];
  std::cout << "model " << model.id << "  branch " << a.branch << "  epsilon " << g17(a.epsilon) << "  M "
            << g17(cap) << "  J " << q.grid_size() << '\n';
  std::snprintf(buf, sizeof buf, "%-8s %-24s %s\n", "j", "a_j", "preimage_samples");
  std::cout << buf;
  for (std::size_t j = 0; j < q.grid_size(); ++j) {
    std::snprintf(buf, sizeof buf, "%-8zu %-24.17g %zu\n", j, q.grid_value(j), hits[j]);
    std::cout << buf;
  }
  std::cout << "sup |f - f_eps| over " << a.samples << " samples of [0, M): " << g17(sup) << '\n';
  return 0;
}

int validate_cmd(const ValidateArgs& a) {
  const ModelSpec model = resolve_model(a.model);
  const ValidationReport report = validate(model, a.samples, a.seed);
  print_report(std::cout, report);
  return report.ok() ? 0 : kExitInvariant;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::NegativeMass:
    case ErrorKind::NonFiniteLocation:
    case ErrorKind::InvalidParticle:
    case ErrorKind::SublinearityViolated:
      return kExitInvariant;
    case ErrorKind::InvalidParam:
    case ErrorKind::NonIntegralStepCount:
      return kExitUsage;
    default:
      return kExitRuntime;
  }
}

// Long option names given on the command line, without leading dashes.
std::vector<std::string> given_flags(int argc, char** argv) {
  std::vector<std::string> out;
  for (int i = 1; i < argc; ++i) {
    std::string_view s(argv[i]);
    if (s.size() > 2 && s.substr(0, 2) == "--") {
      s.remove_prefix(2);
      out.emplace_back(s.substr(0, s.find('=')));
    }
  }
  return out;
}

}  // namespace

int parse_and_dispatch(int argc, char** argv) {
  CLI::App app{"Splitting-particle solver with finite range approximation for size-structured populations"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  RunArgs ra;
  ConvergenceArgs ca;
  DistanceArgs da;
  InspectArgs ia;
  ValidateArgs va;
  std::string config;

  CLI::App* run_sub = app.add_subcommand("run", "Run the scheme from the model's initial density up to time T");
  add_model_flags(run_sub, ra.model);
  run_sub->add_option("--T", ra.T, "Final time (time units)")->default_val(1.0)->check(CLI::PositiveNumber);
  run_sub->add_option("--dt", ra.dt, "Time step (time units); T/dt must be an integer")
      ->required()->check(CLI::PositiveNumber);
  run_sub->add_option("--epsilon", ra.epsilon, "FRA value-grid step (size units)")
      ->required()->check(CLI::PositiveNumber);
  run_sub->add_option("--dx", ra.dx, "Initial-data particle spacing (size units); defaults to dt")
      ->check(CLI::PositiveNumber);
  run_sub->add_option("--substeps", ra.substeps, "RK4 substeps per time step")->default_val(1)->check(CLI::PositiveNumber);
  run_sub->add_flag("--all-newborns", ra.all_newborns, "Create a newborn at every grid value each step, even with zero mass");
  run_sub->add_option("--mass-floor", ra.mass_floor, "Drop newborns lighter than this (population units)")
      ->default_val(0.0)->check(CLI::NonNegativeNumber);
  run_sub->add_flag("--paper-sign", ra.paper_sign, "Use +c m in the mass equations instead of decay");
  run_sub->add_flag("--strict-mass", ra.strict_mass, "Fail on negative newborn mass instead of clamping to 0");
  run_sub->add_flag("--serial", ra.serial, "Use the serial reference kernels");
  run_sub->add_option("--threads", ra.threads, "Worker threads (0: all cores)")->default_val(0)->check(CLI::NonNegativeNumber);
  run_sub->add_option("--out", ra.out, "Particle dump of the final measure");
  run_sub->add_option("--trace", ra.trace, "Per-step CSV: k, t (time units), count, mass (population units), wall_ms");
  run_sub->add_option("--config", config, "key = value file mirroring these flags; flags win")->check(CLI::ExistingFile);

  CLI::App* conv_sub = app.add_subcommand("convergence", "Error ladder against a fine reference solution");
  add_model_flags(conv_sub, ca.model);
  conv_sub->add_option("--T", ca.T, "Final time (time units)")->default_val(1.0)->check(CLI::PositiveNumber);
  conv_sub->add_option("--dt-max", ca.dt_max, "Coarsest time step (time units)")->default_val(0.1)->check(CLI::PositiveNumber);
  conv_sub->add_option("--halvings", ca.halvings, "Number of dt halvings; rows = halvings + 1")
      ->default_val(7)->check(CLI::PositiveNumber);
  conv_sub->add_option("--epsilon", ca.epsilon, "FRA value-grid step (size units)")
      ->required()->check(CLI::PositiveNumber);
  conv_sub->add_flag("--paper-reference", ca.paper_reference,
                     "Reference at eps = 3.90625e-5, dt = dx = 7.8125e-4 instead of eps = 1e-4, dt = dx = 1.5625e-3");
  conv_sub->add_flag("--paper-sign", ca.paper_sign, "Use +c m in the mass equations instead of decay");
  conv_sub->add_flag("--strict-mass", ca.strict_mass, "Fail on negative newborn mass instead of clamping to 0");
  conv_sub->add_option("--threads", ca.threads, "Worker threads (0: all cores)")->default_val(0)->check(CLI::NonNegativeNumber);
  conv_sub->add_option("--out-csv", ca.out_csv, "CSV with columns dt, err, q");
  conv_sub->add_option("--out-table", ca.out_table, "Aligned text table");
  conv_sub->add_option("--out-plot", ca.out_plot, "Plot data: dt err");
  conv_sub->add_option("--cache-dir", ca.cache_dir, "Reference cache directory (default $FRA_CACHE_DIR or .fra-cache)");
  conv_sub->add_option("--config", config, "key = value file mirroring these flags; flags win")->check(CLI::ExistingFile);

  CLI::App* dist_sub = app.add_subcommand("distance", "rho and normalized W1 between two particle dumps");
  dist_sub->add_option("a", da.a, "First particle dump")->required()->check(CLI::ExistingFile);
  dist_sub->add_option("b", da.b, "Second particle dump")->required()->check(CLI::ExistingFile);

  CLI::App* fra_sub = app.add_subcommand("fra-inspect", "Value grid and preimage counts of a quantized placement map");
  add_model_flags(fra_sub, ia.model);
  fra_sub->add_option("--branch", ia.branch, "Birth branch p (1-based)")->default_val(1)->check(CLI::PositiveNumber);
  fra_sub->add_option("--epsilon", ia.epsilon, "FRA value-grid step (size units)")->required()->check(CLI::PositiveNumber);
  fra_sub->add_option("--M", ia.cap, "Range [0, M) (size units); defaults to the model bound")->check(CLI::PositiveNumber);
  fra_sub->add_option("--samples", ia.samples, "Uniform sample points in [0, M)")->default_val(100001)->check(CLI::PositiveNumber);
  fra_sub->add_option("--config", config, "key = value file mirroring these flags; flags win")->check(CLI::ExistingFile);

  CLI::App* val_sub = app.add_subcommand("validate-model", "Check a model against the scheme's structural assumptions");
  add_model_flags(val_sub, va.model);
  val_sub->add_option("--samples", va.samples, "Grid points per check on [0, M)")->default_val(1001)->check(CLI::PositiveNumber);
  val_sub->add_option("--seed", va.seed, "Seed for the randomized (t, mu) probes")->default_val(12345);
  val_sub->add_option("--config", config, "key = value file mirroring these flags; flags win")->check(CLI::ExistingFile);

  // Config-file keys become flags placed before the command-line ones; a key
  // that is also given on the command line is skipped so the flag wins.
  std::vector<std::string> args(argv, argv + argc);
  for (int i = 1; i + 1 < argc; ++i) {
    const std::string_view s(argv[i]);
    if (s == "--config" || s.rfind("--config=", 0) == 0) {
      const std::string path = s == "--config" ? argv[i + 1] : std::string(s.substr(9));
      CLI::App* sub = nullptr;
      for (int j = 1; j < argc && !sub; ++j)
        for (CLI::App* cand : app.get_subcommands({}))
          if (cand->get_name() == argv[j]) sub = cand;
      if (!sub) break;
      std::ifstream in(path);
      if (!in) {
        std::cerr << "error: cannot open config file " << path << '\n';
        return kExitUsage;
      }
      std::stringstream text;
      text << in.rdbuf();
      std::vector<std::pair<std::string, std::string>> kv;
      try {
        kv = parse_key_values(text.str());
      } catch (const Error& e) {
        std::cerr << "error: " << path << ": " << e.what() << '\n';
        return kExitUsage;
      }
      const std::vector<std::string> given = given_flags(argc, argv);
      std::vector<std::string> extra;
      for (const auto& [key, value] : kv) {
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (!opt || key == "config") {
          std::cerr << "error: " << path << ": unknown key '" << key << "' for " << sub->get_name() << '\n';
          return kExitUsage;
        }
        if (std::find(given.begin(), given.end(), key) != given.end()) continue;
        if (opt->get_expected_min() == 0) {
          if (value == "true" || value == "1" || value == "on") extra.push_back("--" + key);
          else if (!(value == "false" || value == "0" || value == "off")) {
            std::cerr << "error: " << path << ": flag '" << key << "' expects true or false\n";
            return kExitUsage;
          }
        } else {
          extra.push_back("--" + key);
          extra.push_back(value);
        }
      }
      const auto pos = std::find(args.begin() + 1, args.end(), sub->get_name());
      args.insert(pos + 1, extra.begin(), extra.end());
      break;
    }
  }
  std::vector<char*> cargv;
  for (std::string& s : args) cargv.push_back(s.data());

  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? code : kExitUsage;
  }

  try {
    if (run_sub->parsed()) return run_cmd(ra);
    if (conv_sub->parsed()) return convergence_cmd(ca);
    if (dist_sub->parsed()) return distance_cmd(da);
    if (fra_sub->parsed()) return inspect_cmd(ia);
    if (val_sub->parsed()) return validate_cmd(va);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace frapm
