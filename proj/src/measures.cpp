#include "frapm/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "frapm/errors.hpp"
#include "frapm/summation.hpp"

namespace frapm {

ParticleMeasure::ParticleMeasure(std::vector<Particle> particles)
    : particles_(std::move(particles)) {
  for (std::size_t i = 0; i < particles_.size(); ++i) {
    const auto& p = particles_[i];
    if (!std::isfinite(p.location) || !std::isfinite(p.mass) || p.location < 0.0 ||
        p.mass < 0.0) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "particle " << i << " (location " << p.location << ", mass " << p.mass
          << ") must be finite and nonnegative";
      throw Error(ErrorKind::InvalidParticle, msg.str());
    }
  }
}

double ParticleMeasure::total_mass() const {
  CompensatedSum s;
  for (const auto& p : particles_) s.add(p.mass);
  return s.value();
}

bool ParticleMeasure::is_sorted() const {
  return std::is_sorted(particles_.begin(), particles_.end(),
                        [](const Particle& a, const Particle& b) { return a.location < b.location; });
}

double total_mass(const ParticleMeasure& mu) { return mu.total_mass(); }

ParticleMeasure canonicalize(const ParticleMeasure& mu) {
  std::vector<Particle> ps(mu.particles().begin(), mu.particles().end());
  std::stable_sort(ps.begin(), ps.end(),
                   [](const Particle& a, const Particle& b) { return a.location < b.location; });
  std::vector<Particle> out;
  out.reserve(ps.size());
  for (const auto& p : ps) {
    if (!out.empty() && out.back().location == p.location)
      out.back().mass += p.mass;
    else
      out.push_back(p);
  }
  return ParticleMeasure(std::move(out));
}

namespace {

std::vector<Particle> sorted_copy(const ParticleMeasure& mu) {
  std::vector<Particle> ps(mu.particles().begin(), mu.particles().end());
  if (!mu.is_sorted())
    std::stable_sort(ps.begin(), ps.end(),
                     [](const Particle& a, const Particle& b) { return a.location < b.location; });
  return ps;
}

}  // namespace

double w1_normalized(const ParticleMeasure& mu, const ParticleMeasure& nu) {
  const double ma = mu.total_mass();
  const double mb = nu.total_mass();
  if (!(ma > 0.0) || !(mb > 0.0))
    throw Error(ErrorKind::ZeroMassMeasure, "w1_normalized needs two measures of positive mass");

  const auto a = sorted_copy(mu);
  const auto b = sorted_copy(nu);

  // Running (unnormalized) CDFs; |Fa/ma - Fb/mb| is constant between breakpoints.
  CompensatedSum fa, fb, integral;
  std::size_t i = 0, j = 0;
  double prev = 0.0;
  bool started = false;
  while (i < a.size() || j < b.size()) {
    double x;
    if (j >= b.size() || (i < a.size() && a[i].location <= b[j].location))
      x = a[i].location;
    else
      x = b[j].location;
    if (started) integral.add(std::abs(fa.value() / ma - fb.value() / mb) * (x - prev));
    while (i < a.size() && a[i].location == x) fa.add(a[i++].mass);
    while (j < b.size() && b[j].location == x) fb.add(b[j++].mass);
    prev = x;
    started = true;
  }
  return integral.value();
}

double rho_distance(const ParticleMeasure& mu, const ParticleMeasure& nu) {
  const double ma = mu.total_mass();
  const double mb = nu.total_mass();
  const double gap = std::abs(ma - mb);
  if (ma == 0.0 || mb == 0.0) return gap;
  return std::min(ma, mb) * w1_normalized(mu, nu) + gap;
}

double w1_bruteforce_oracle(const ParticleMeasure& mu, const ParticleMeasure& nu) {
  if (mu.size() > kOracleMaxParticles || nu.size() > kOracleMaxParticles)
    throw Error(ErrorKind::TooLarge, "oracle handles at most 8 particles per measure");
  const double ma = mu.total_mass();
  const double mb = nu.total_mass();
  if (!(ma > 0.0) || !(mb > 0.0))
    throw Error(ErrorKind::ZeroMassMeasure, "oracle needs two measures of positive mass");

  auto a = sorted_copy(mu);
  auto b = sorted_copy(nu);
  std::vector<double> supply, demand;
  for (const auto& p : a) supply.push_back(p.mass / ma);
  for (const auto& p : b) demand.push_back(p.mass / mb);

  // North-west corner on sorted supports is an optimal plan in one dimension.
  double cost = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double flow = std::min(supply[i], demand[j]);
    cost += flow * std::abs(a[i].location - b[j].location);
    supply[i] -= flow;
    demand[j] -= flow;
    if (supply[i] <= demand[j])
      ++i;
    else
      ++j;
  }
  return cost;
}

ParticleMeasure discretize_density(const std::function<double(double)>& density, double lo,
                                   double hi, double dx) {
  if (!(lo < hi)) throw Error(ErrorKind::InvalidInterval, "discretize_density needs lo < hi");
  if (!(dx > 0.0) || !std::isfinite(dx))
    throw Error(ErrorKind::InvalidParam, "discretize_density needs dx > 0");

  const double ratio = (hi - lo) / dx;
  const auto cells = static_cast<std::size_t>(std::ceil(ratio - 1e-9));
  std::vector<Particle> out;
  out.reserve(cells);
  constexpr int n = kSimpsonSubdivisions;
  for (std::size_t i = 0; i < cells; ++i) {
    const double a = lo + static_cast<double>(i) * dx;
    const double b = (i + 1 == cells) ? hi : std::min(hi, lo + static_cast<double>(i + 1) * dx);
    const double h = (b - a) / n;
    double sum = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double x = (k == n) ? b : a + k * h;
      const double v = density(x);
      if (v < 0.0 || !std::isfinite(v)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "density(" << x << ") = " << v;
        throw Error(ErrorKind::NegativeDensity, msg.str());
      }
      const double w = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
      sum += w * v;
    }
    out.push_back({0.5 * (a + b), sum * h / 3.0});
  }
  return ParticleMeasure(std::move(out));
}

void write_particles(std::ostream& os, const ParticleMeasure& mu) {
  const auto ps = sorted_copy(mu);
  char buf[96];
  std::snprintf(buf, sizeof buf, "# particles %zu total_mass %.17g\n", ps.size(), mu.total_mass());
  os << buf;
  for (const auto& p : ps) {
    std::snprintf(buf, sizeof buf, "%.17g\t%.17g\n", p.location, p.mass);
    os << buf;
  }
  if (!os) throw Error(ErrorKind::IoError, "failed writing particle dump");
}

ParticleMeasure read_particles(std::istream& is) {
  std::string line;
  std::vector<Particle> ps;
  long long declared = -1;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string word;
      while (hs >> word)
        if (word == "particles") hs >> declared;
      continue;
    }
    std::istringstream ls(line);
    Particle p;
    if (!(ls >> p.location >> p.mass))
      throw Error(ErrorKind::ParseError, "bad particle line " + std::to_string(lineno));
    ps.push_back(p);
  }
  if (declared >= 0 && static_cast<std::size_t>(declared) != ps.size())
    throw Error(ErrorKind::ParseError, "header declares " + std::to_string(declared) +
                                           " particles, found " + std::to_string(ps.size()));
  return ParticleMeasure(std::move(ps));
}

}  // namespace frapm
