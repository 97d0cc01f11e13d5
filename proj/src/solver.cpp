#include "frapm/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>

#include "frapm/errors.hpp"

namespace frapm {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// CSR layout from (group, payload) pairs, keeping the insertion order inside a group.
template <class Payload>
void bucket(std::size_t groups, const std::vector<std::size_t>& group_of,
            const std::vector<Payload>& items, std::vector<std::size_t>& offsets,
            std::vector<Payload>& out) {
  offsets.assign(groups + 1, 0);
  for (std::size_t g : group_of) ++offsets[g + 1];
  for (std::size_t g = 0; g < groups; ++g) offsets[g + 1] += offsets[g];
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  out.resize(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) out[cursor[group_of[i]]++] = items[i];
}

struct ParentEntry {
  double weight;
  double rate;
};

struct Link {
  std::size_t source;
  double weight;
};

}  // namespace

void check_config(const SimConfig& cfg) {
  auto bad = [](const std::string& what) { throw Error(ErrorKind::InvalidParam, what); };
  if (!(cfg.T > 0.0) || !std::isfinite(cfg.T)) bad("T must be positive, got " + num(cfg.T));
  if (cfg.steps < 0) bad("N must be nonnegative, got " + std::to_string(cfg.steps));
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) bad("epsilon must be positive, got " + num(cfg.epsilon));
  if (!(cfg.cap > 0.0) || !std::isfinite(cfg.cap)) bad("M must be positive, got " + num(cfg.cap));
  if (!(cfg.dx > 0.0) || !std::isfinite(cfg.dx)) bad("dx must be positive, got " + num(cfg.dx));
  if (cfg.ode_substeps < 1) bad("substeps must be at least 1");
  if (!(cfg.newborn_mass_floor >= 0.0)) bad("newborn mass floor must be nonnegative");
}

ParticleMeasure step_transport(const ParticleMeasure& mu, const SizeFunction& b, double dt,
                               int substeps, Backend backend) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidParam, "dt must be positive");
  if (substeps < 1) throw Error(ErrorKind::InvalidParam, "substeps must be at least 1");
  std::vector<Particle> out(mu.size());
  transport(backend, mu.particles(), out, b, dt, substeps);
  for (const Particle& p : out) {
    if (!std::isfinite(p.location) || p.location < 0.0)
      throw Error(ErrorKind::NonFiniteLocation, "transported location " + num(p.location));
  }
  return ParticleMeasure(std::move(out));
}

ParticleMeasure step_birth_death(const ParticleMeasure& transported, const SizeFunction& death,
                                 std::span<const SizeFunction> birth_rates,
                                 std::span<const QuantizedMap> placements, double dt,
                                 const SimConfig& cfg, BirthDeathStats* stats) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidParam, "dt must be positive");
  if (birth_rates.size() != placements.size())
    throw Error(ErrorKind::InvalidParam, "one placement map per birth branch required");
  for (const QuantizedMap& q : placements) {
    if (q.epsilon() != placements[0].epsilon() || q.cap() != placements[0].cap())
      throw Error(ErrorKind::InvalidParam, "placement maps must share epsilon and M");
  }
  const Backend be = cfg.backend;
  const double sign = cfg.paper_sign ? 1.0 : -1.0;
  const std::size_t r = placements.size();

  // Parents are visited in sorted-location order so the forcing sums are reproducible.
  std::vector<Particle> parents(transported.particles().begin(), transported.particles().end());
  if (!transported.is_sorted())
    std::stable_sort(parents.begin(), parents.end(),
                     [](const Particle& a, const Particle& b) { return a.location < b.location; });
  const std::size_t n = parents.size();

  std::vector<double> rates(n);
  sample(be, parents, death, rates);

  std::vector<Particle> existing(n);
  decay(be, parents, rates, dt, sign, existing);

  // Entries in (parent, branch) order.
  std::vector<std::size_t> entry_slot;
  std::vector<ParentEntry> entries;
  std::vector<std::size_t> seed_slots;
  {
    std::vector<std::vector<double>> beta(r, std::vector<double>(n)), slot_d(r, std::vector<double>(n));
    for (std::size_t p = 0; p < r; ++p) {
      const QuantizedMap& q = placements[p];
      sample(be, parents, birth_rates[p], beta[p]);
      sample(be, parents, [&q](double x) { return static_cast<double>(q.slot(x)); }, slot_d[p]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t p = 0; p < r; ++p) {
        const double bi = beta[p][i];
        if (bi == 0.0) continue;
        const auto s = static_cast<std::size_t>(slot_d[p][i]);
        if (bi > 0.0) seed_slots.push_back(s);
        entry_slot.push_back(s);
        entries.push_back({bi * parents[i].mass, rates[i]});
      }
    }
  }

  // Active slots: targets of a parent with positive intensity, closed under
  // newborns that are themselves parents within the step.
  std::set<std::size_t> active(seed_slots.begin(), seed_slots.end());
  {
    std::vector<std::size_t> frontier(active.begin(), active.end());
    while (!frontier.empty()) {
      const std::size_t s = frontier.back();
      frontier.pop_back();
      const double a = placements[0].grid_value(s);
      for (std::size_t p = 0; p < r; ++p) {
        if (!(birth_rates[p](a) > 0.0)) continue;
        const std::size_t t = placements[p].slot(a);
        if (active.insert(t).second) frontier.push_back(t);
      }
    }
  }
  const std::vector<std::size_t> slots(active.begin(), active.end());
  const std::size_t K = slots.size();
  auto local = [&](std::size_t s) -> std::ptrdiff_t {
    auto it = std::lower_bound(slots.begin(), slots.end(), s);
    return (it != slots.end() && *it == s) ? it - slots.begin() : -1;
  };

  std::vector<double> y(K, 0.0);
  std::size_t clamped = 0;
  if (K > 0) {
    // Forcing from existing parents at every RK4 stage time.
    std::vector<std::size_t> group_of;
    std::vector<ParentEntry> kept;
    group_of.reserve(entries.size());
    kept.reserve(entries.size());
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const auto l = local(entry_slot[e]);
      if (l < 0) continue;
      group_of.push_back(static_cast<std::size_t>(l));
      kept.push_back(entries[e]);
    }
    std::vector<std::size_t> f_offsets;
    std::vector<ParentEntry> grouped;
    bucket(K, group_of, kept, f_offsets, grouped);
    std::vector<double> gw(grouped.size()), gr(grouped.size());
    for (std::size_t e = 0; e < grouped.size(); ++e) {
      gw[e] = grouped[e].weight;
      gr[e] = grouped[e].rate;
    }
    const int S = cfg.ode_substeps;
    const double h = dt / S;
    const std::size_t T = 2 * static_cast<std::size_t>(S) + 1;
    std::vector<double> times(T);
    for (std::size_t l = 0; l < T; ++l) times[l] = static_cast<double>(l) * (h / 2.0);
    std::vector<double> forcing(K * T);
    grouped_forcing(be, GroupedEntries{f_offsets, gw, gr}, times, sign, forcing);

    // Newborn rates and newborn-to-newborn coupling.
    std::vector<double> nb_rates(K);
    std::vector<std::size_t> target_of;
    std::vector<Link> links;
    for (std::size_t q = 0; q < K; ++q) {
      const double a = placements[0].grid_value(slots[q]);
      nb_rates[q] = death(a);
      for (std::size_t p = 0; p < r; ++p) {
        const double w = birth_rates[p](a);
        if (w == 0.0) continue;
        const auto t = local(placements[p].slot(a));
        if (t < 0) continue;
        target_of.push_back(static_cast<std::size_t>(t));
        links.push_back({q, w});
      }
    }
    std::vector<std::size_t> c_offsets;
    std::vector<Link> by_target;
    bucket(K, target_of, links, c_offsets, by_target);
    std::vector<std::size_t> c_src(by_target.size());
    std::vector<double> c_w(by_target.size());
    for (std::size_t e = 0; e < by_target.size(); ++e) {
      c_src[e] = by_target[e].source;
      c_w[e] = by_target[e].weight;
    }
    const Coupling coupling{c_offsets, c_src, c_w};

    std::vector<double> col(K), k1(K), k2(K), k3(K), k4(K), tmp(K);
    auto column = [&](std::size_t l) {
      for (std::size_t g = 0; g < K; ++g) col[g] = forcing[g * T + l];
    };
    for (int s = 0; s < S; ++s) {
      const std::size_t l0 = 2 * static_cast<std::size_t>(s);
      column(l0);
      newborn_rhs(be, y, nb_rates, sign, col, coupling, k1);
      column(l0 + 1);
      for (std::size_t i = 0; i < K; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
      newborn_rhs(be, tmp, nb_rates, sign, col, coupling, k2);
      for (std::size_t i = 0; i < K; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
      newborn_rhs(be, tmp, nb_rates, sign, col, coupling, k3);
      column(l0 + 2);
      for (std::size_t i = 0; i < K; ++i) tmp[i] = y[i] + h * k3[i];
      newborn_rhs(be, tmp, nb_rates, sign, col, coupling, k4);
      for (std::size_t i = 0; i < K; ++i)
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    for (std::size_t i = 0; i < K; ++i) {
      if (!std::isfinite(y[i]))
        throw Error(ErrorKind::NegativeMass, "non-finite newborn mass at " + num(placements[0].grid_value(slots[i])));
      if (y[i] >= 0.0) continue;
      if (cfg.negative_mass == NegativeMassPolicy::Error && y[i] < -kNegativeMassTolerance)
        throw Error(ErrorKind::NegativeMass,
                    "newborn mass " + num(y[i]) + " at " + num(placements[0].grid_value(slots[i])));
      y[i] = 0.0;
      ++clamped;
    }
  }

  std::vector<Particle> newborns;
  if (cfg.create_all_newborns && r > 0) {
    const std::size_t J = placements[0].grid_size();
    newborns.reserve(J);
    std::size_t q = 0;
    for (std::size_t j = 0; j < J; ++j) {
      double m = 0.0;
      if (q < K && slots[q] == j) m = y[q++];
      newborns.push_back({placements[0].grid_value(j), m});
    }
  } else {
    newborns.reserve(K);
    for (std::size_t q = 0; q < K; ++q) {
      if (cfg.newborn_mass_floor > 0.0 && y[q] < cfg.newborn_mass_floor) continue;
      newborns.push_back({placements[0].grid_value(slots[q]), y[q]});
    }
  }

  std::vector<Particle> merged;
  merged.reserve(existing.size() + newborns.size());
  std::merge(existing.begin(), existing.end(), newborns.begin(), newborns.end(),
             std::back_inserter(merged),
             [](const Particle& a, const Particle& b) { return a.location < b.location; });
  if (!cfg.create_all_newborns) {
    // Bit-identical locations collapse into one atom; the count law needs them kept apart.
    std::size_t w = 0;
    for (std::size_t i = 0; i < merged.size(); ++i) {
      if (w > 0 && merged[w - 1].location == merged[i].location)
        merged[w - 1].mass += merged[i].mass;
      else
        merged[w++] = merged[i];
    }
    merged.resize(w);
  }
  if (stats) {
    stats->newborns = newborns.size();
    stats->clamped = clamped;
  }
  return ParticleMeasure(std::move(merged));
}

RunResult run(const ModelSpec& model, const SimConfig& cfg, const ParticleMeasure& initial) {
  check_config(cfg);
  if (cfg.threads > 0) parallel::set_threads(cfg.threads);
  RunResult result;
  result.final_measure = initial.is_sorted() ? initial : canonicalize(initial);
  if (cfg.steps == 0) {
    result.final_measure = initial;
    return result;
  }
  std::vector<QuantizedMap> maps;
  maps.reserve(model.births.size());
  for (const BirthBranch& br : model.births) maps.push_back(build_quantized(br.placement, cfg.epsilon, cfg.cap));

  const double dt = cfg.dt();
  ParticleMeasure& mu = result.final_measure;
  result.trace.reserve(static_cast<std::size_t>(cfg.steps));
  for (int k = 0; k < cfg.steps; ++k) {
    const auto start = std::chrono::steady_clock::now();
    const double tk = static_cast<double>(k) * dt;
    StepTrace tr;
    tr.k = k;
    tr.t = static_cast<double>(k + 1) * dt;
    tr.count_before = mu.size();
    tr.mass_before = mu.total_mass();
    try {
      const SizeFunction b = model.growth(tk, mu);
      ParticleMeasure bar = step_transport(mu, b, dt, cfg.ode_substeps, cfg.backend);
      const SizeFunction c = model.death(tk, bar);
      std::vector<SizeFunction> betas;
      betas.reserve(model.births.size());
      for (const BirthBranch& br : model.births) betas.push_back(br.intensity(tk, bar));
      BirthDeathStats st;
      mu = step_birth_death(bar, c, betas, maps, dt, cfg, &st);
      tr.newborns = st.newborns;
      tr.clamped = st.clamped;
    } catch (const Error& e) {
      throw Error::at_step(e, k);
    }
    tr.count_after = mu.size();
    tr.mass_after = mu.total_mass();
    tr.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    result.trace.push_back(tr);
  }
  return result;
}

ParticleMeasure initial_measure(const ModelSpec& model, double dx) {
  if (!model.initial_density)
    throw Error(ErrorKind::InvalidParam, "model '" + model.id + "' has no initial density");
  return discretize_density(model.initial_density, model.support_lo, model.support_hi, dx);
}

std::vector<OracleCheck> two_particle_oracle() {
  // Constant rates; f = 0 with eps = M puts every newborn at 0, where it is
  // itself a parent of the same slot. With S the parent mass at the start of
  // a step, the slot solves y' = (beta - c) y + beta S e^{-c s}, y(0) = 0:
  //   y(dt) = S e^{-c dt} (e^{beta dt} - 1).
  const double b = 0.5, c = 0.3, beta = 0.2, dt = 0.05, M = 2.0;
  const double x1 = 0.3, x2 = 0.6, m1 = 0.7, m2 = 0.4;

  ModelSpec model;
  model.id = "two-particle-oracle";
  model.growth = autonomous([b](double) { return b; });
  model.death = autonomous([c](double) { return c; });
  model.births.push_back({autonomous([beta](double) { return beta; }), [](double) { return 0.0; }});
  model.support_lo = 0.0;
  model.support_hi = M;
  model.propagation_bound = M;

  SimConfig cfg;
  cfg.T = 2 * dt;
  cfg.steps = 2;
  cfg.epsilon = M;
  cfg.cap = M;
  cfg.dx = dt;
  cfg.backend = Backend::Serial;
  const ParticleMeasure mu0({{x1, m1}, {x2, m2}});

  const double e = std::exp(-c * dt), g = std::exp(beta * dt) - 1.0;
  const double y1 = (m1 + m2) * e * g;
  const double s2 = (m1 + m2) * e + y1;
  const double y2 = s2 * e * g;

  std::vector<OracleCheck> out;
  auto check = [&out](std::string label, double expected, double actual) {
    out.push_back({std::move(label), expected, actual, std::abs(expected - actual) <= 1e-10});
  };

  SimConfig one = cfg;
  one.T = dt;
  one.steps = 1;
  const ParticleMeasure mu1 = run(model, one, mu0).final_measure;
  const ParticleMeasure mu2 = run(model, cfg, mu0).final_measure;

  check("step 1 count", 3, static_cast<double>(mu1.size()));
  if (mu1.size() == 3) {
    const auto p = mu1.particles();
    check("step 1 newborn location", 0.0, p[0].location);
    check("step 1 newborn mass", y1, p[0].mass);
    check("step 1 particle 1 location", x1 + b * dt, p[1].location);
    check("step 1 particle 1 mass", m1 * e, p[1].mass);
    check("step 1 particle 2 location", x2 + b * dt, p[2].location);
    check("step 1 particle 2 mass", m2 * e, p[2].mass);
  }
  check("step 2 count", 4, static_cast<double>(mu2.size()));
  if (mu2.size() == 4) {
    const auto p = mu2.particles();
    check("step 2 newborn location", 0.0, p[0].location);
    check("step 2 newborn mass", y2, p[0].mass);
    check("step 2 first newborn location", b * dt, p[1].location);
    check("step 2 first newborn mass", y1 * e, p[1].mass);
    check("step 2 particle 1 location", x1 + 2 * b * dt, p[2].location);
    check("step 2 particle 1 mass", m1 * e * e, p[2].mass);
    check("step 2 particle 2 location", x2 + 2 * b * dt, p[3].location);
    check("step 2 particle 2 mass", m2 * e * e, p[3].mass);
  }
  return out;
}

}  // namespace frapm
