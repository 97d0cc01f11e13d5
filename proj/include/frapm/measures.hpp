#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace frapm {

struct Particle {
  double location = 0.0;  // size units
  double mass = 0.0;      // population units

  friend bool operator==(const Particle&, const Particle&) = default;
};

/// Finite sum of weighted Dirac masses on the half-line.
///
/// Every location and mass is finite and nonnegative; the constructor rejects
/// anything else with ErrorKind::InvalidParticle. Particle order is whatever
/// the producer chose; `canonicalize` gives the sorted, merged form.
class ParticleMeasure {
 public:
  ParticleMeasure() = default;
  explicit ParticleMeasure(std::vector<Particle> particles);

  std::span<const Particle> particles() const { return particles_; }
  std::size_t size() const { return particles_.size(); }
  bool empty() const { return particles_.empty(); }

  double total_mass() const;
  bool is_sorted() const;

  friend bool operator==(const ParticleMeasure&, const ParticleMeasure&) = default;

 private:
  std::vector<Particle> particles_;
};

double total_mass(const ParticleMeasure& mu);

/// Sorted by location; atoms at bit-identical locations merged by mass addition.
ParticleMeasure canonicalize(const ParticleMeasure& mu);

/// Exact 1-Wasserstein distance between mu/M_mu and nu/M_nu, from a sweep over
/// the merged breakpoints of the two piecewise-constant CDFs.
double w1_normalized(const ParticleMeasure& mu, const ParticleMeasure& nu);

/// min(M_mu, M_nu) * W1(mu/M_mu, nu/M_nu) + |M_mu - M_nu|. When either mass is
/// zero only the mass gap remains.
double rho_distance(const ParticleMeasure& mu, const ParticleMeasure& nu);

/// Optimal transport cost between the normalized measures via the sorted
/// (north-west corner) coupling. Independent of the CDF sweep; limited to
/// `kOracleMaxParticles` particles per side.
inline constexpr std::size_t kOracleMaxParticles = 8;
double w1_bruteforce_oracle(const ParticleMeasure& mu, const ParticleMeasure& nu);

/// One particle per cell [lo + i dx, lo + (i+1) dx) placed at the cell midpoint
/// with the cell integral of `density` as mass (composite Simpson, 16
/// subintervals). A trailing partial cell is clipped to `hi`.
ParticleMeasure discretize_density(const std::function<double(double)>& density,
                                   double lo, double hi, double dx);

inline constexpr int kSimpsonSubdivisions = 16;

// Particle dump: "# particles N total_mass M" then "location<TAB>mass" lines,
// 17 significant digits, sorted by location.
void write_particles(std::ostream& os, const ParticleMeasure& mu);
ParticleMeasure read_particles(std::istream& is);

}  // namespace frapm
