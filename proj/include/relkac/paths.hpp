#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "relkac/types.hpp"

namespace relkac {

// Reproducible random stream keyed by (seed, stream index).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  double uniform();  // in (0, 1)
  double normal();
  double exponential();  // mean 1

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_, stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

struct BrownianPath {
  std::vector<double> times;
  std::vector<Point> values;
};

struct SubordinatorPath {
  std::vector<double> times;
  std::vector<double> values;  // T(times[k]), nondecreasing, T(0) = 0
};

struct JumpRecord {
  double time;
  Point jump;    // y
  Point before;  // X(s-)
};

// Gaussian surrogate increment for the compensated jumps below the cutoff.
struct DiffusionPiece {
  double time;
  double dt;
  Point start;
  Point increment;
};

struct CadlagPath {
  Point x0;
  double t_end = 0.0;
  std::vector<double> times;      // uniform grid 0 = t_0 < ... < t_n = t_end
  std::vector<Point> skeleton;    // X(t_j)
  std::vector<JumpRecord> jumps;  // |y| > eps_cut, time ordered
  std::vector<DiffusionPiece> diffusion;
  double eps_cut = 0.0;  // 0: no jump records (subordinated sampler)

  int slices() const { return static_cast<int>(times.size()) - 1; }
  const Point& end() const { return skeleton.back(); }
};

struct SubordinatedSample {
  CadlagPath path;
  SubordinatorPath subordinator;
  BrownianPath brownian;          // empty unless refined
  std::vector<int> outer_index;   // brownian index of T(t_j)
};

BrownianPath sample_brownian(const Point& x0, double dt, int K, RngStream& rng);

// Inverse Gaussian with mean mu and shape lambda (Michael-Schucany-Haas).
double sample_inverse_gaussian(double mu, double lambda, RngStream& rng);
// Increment of the subordinator over a time step tau.
double sample_subordinator_increment(double tau, double m, RngStream& rng);

SubordinatorPath sample_subordinator(const std::vector<double>& t_grid, double m, RngStream& rng);

struct SubordinatedOptions {
  bool refine_brownian = true;
  int brownian_steps = 512;  // dt_B = T(t) / brownian_steps
};

SubordinatedSample sample_subordinated(const Point& x0, const std::vector<double>& t_grid, double m,
                                       RngStream& rng, const SubordinatedOptions& opt = {});

std::vector<double> uniform_grid(double t, int n);

// Shift every spatial record of a path by x (paths are sampled from 0).
void translate(CadlagPath& path, const Point& x);
void translate(SubordinatedSample& sample, const Point& x);

// Compound-Poisson law of the jumps with |y| > eps plus the Gaussian
// small-jump surrogate. Build once and share between paths.
class JumpLaw {
 public:
  JumpLaw(const MassDim& md, double eps_cut, int knots = 2048);

  const MassDim& mass_dim() const { return md_; }
  double cutoff() const { return eps_; }
  double intensity() const { return lambda_; }             // Lambda_eps
  double small_jump_variance() const { return sigma2_; }   // per axis, per unit time
  double tabulation_error() const { return tab_error_; }
  double quadrature_error() const { return quad_error_; }

  // int over r_lo < |y| < r_hi of n(y) dy
  double radial_mass(double r_lo, double r_hi) const;
  double sample_radius(RngStream& rng) const;
  Point sample_direction(RngStream& rng) const;
  Point sample_jump(RngStream& rng) const;

 private:
  double radial_density(double r) const;  // |S^{d-1}| r^{d-1} n(r)
  double cell_mass(double a, double b, int nodes) const;

  MassDim md_;
  double eps_;
  double r_max_;
  std::vector<double> knots_, cum_, power_;
  double table_mass_ = 0.0;
  double tail_mass_ = 0.0;
  double lambda_ = 0.0;
  double sigma2_ = 0.0;
  double tab_error_ = 0.0;
  double quad_error_ = 0.0;
};

CadlagPath sample_levy_jumps(const Point& x0, double t, const JumpLaw& law, double dt, RngStream& rng);
CadlagPath sample_levy_jumps(const Point& x0, double t, double m, int d, double eps_cut, double dt,
                             RngStream& rng);

struct Annulus {
  double r_lo = 0.0;
  double r_hi = 0.0;
};

// Number of recorded jumps with s in (t_lo, t_hi] and r_lo < |y| < r_hi.
int counting_measure(const CadlagPath& path, double t_lo, double t_hi, const Annulus& U);

}  // namespace relkac
