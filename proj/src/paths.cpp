#include "relkac/paths.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "relkac/quadrature.hpp"
#include "relkac/specfun.hpp"

namespace relkac {

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x5bd1e995u};
  engine_.seed(seq);
}

double RngStream::uniform() {
  // 53-bit mantissa, shifted off zero.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return normal_(engine_); }

double RngStream::exponential() { return -std::log(uniform()); }

BrownianPath sample_brownian(const Point& x0, double dt, int K, RngStream& rng) {
  if (!(dt > 0.0) || K < 1) throw DomainError("sample_brownian: need dt > 0 and K >= 1");
  BrownianPath b;
  b.times.reserve(K + 1);
  b.values.reserve(K + 1);
  b.times.push_back(0.0);
  b.values.push_back(x0);
  const double s = std::sqrt(dt);
  Point x = x0;
  for (int k = 1; k <= K; ++k) {
    for (int a = 0; a < x.size(); ++a) x[a] += s * rng.normal();
    b.times.push_back(k * dt);
    b.values.push_back(x);
  }
  return b;
}

double sample_inverse_gaussian(double mu, double lambda, RngStream& rng) {
  const double z = rng.normal();
  const double nu = z * z;
  const double a = mu * nu / (2.0 * lambda);
  // mu (1 + a - sqrt(2a + a^2)) without cancellation
  const double x = mu / (1.0 + a + std::sqrt(a * (2.0 + a)));
  return rng.uniform() <= mu / (mu + x) ? x : mu * mu / x;
}

double sample_subordinator_increment(double tau, double m, RngStream& rng) {
  if (!(tau > 0.0)) throw DomainError("subordinator increment: tau must be > 0");
  if (m == 0.0) {
    const double z = rng.normal();
    return tau * tau / (z * z);
  }
  return sample_inverse_gaussian(tau / m, tau * tau, rng);
}

SubordinatorPath sample_subordinator(const std::vector<double>& t_grid, double m, RngStream& rng) {
  if (!(m >= 0.0)) throw DomainError("sample_subordinator: m must be >= 0");
  if (t_grid.empty() || t_grid.front() != 0.0) throw DomainError("sample_subordinator: grid must start at 0");
  SubordinatorPath p;
  p.times = t_grid;
  p.values.reserve(t_grid.size());
  p.values.push_back(0.0);
  for (size_t k = 1; k < t_grid.size(); ++k) {
    const double tau = t_grid[k] - t_grid[k - 1];
    if (!(tau > 0.0)) throw DomainError("sample_subordinator: grid must be increasing");
    p.values.push_back(p.values.back() + sample_subordinator_increment(tau, m, rng));
  }
  return p;
}

std::vector<double> uniform_grid(double t, int n) {
  if (!(t > 0.0) || n < 1) throw DomainError("uniform_grid: need t > 0 and n >= 1");
  std::vector<double> g(n + 1);
  for (int j = 0; j <= n; ++j) g[j] = t * j / n;
  g[n] = t;
  return g;
}

void translate(CadlagPath& path, const Point& x) {
  path.x0 += x;
  for (auto& p : path.skeleton) p += x;
  for (auto& j : path.jumps) j.before += x;
  for (auto& piece : path.diffusion) piece.start += x;
}

void translate(SubordinatedSample& sample, const Point& x) {
  translate(sample.path, x);
  for (auto& p : sample.brownian.values) p += x;
}

SubordinatedSample sample_subordinated(const Point& x0, const std::vector<double>& t_grid, double m,
                                       RngStream& rng, const SubordinatedOptions& opt) {
  SubordinatedSample out;
  out.subordinator = sample_subordinator(t_grid, m, rng);
  const auto& T = out.subordinator.values;
  const int n = static_cast<int>(t_grid.size()) - 1;
  const int d = static_cast<int>(x0.size());
  CadlagPath& path = out.path;
  path.x0 = x0;
  path.t_end = t_grid.back();
  path.times = t_grid;
  path.skeleton.reserve(n + 1);
  path.skeleton.push_back(x0);
  if (!opt.refine_brownian) {
    Point x = x0;
    for (int j = 1; j <= n; ++j) {
      const double s = std::sqrt(T[j] - T[j - 1]);
      for (int a = 0; a < d; ++a) x[a] += s * rng.normal();
      path.skeleton.push_back(x);
    }
    return out;
  }
  const double dtb = T[n] / std::max(1, opt.brownian_steps);
  BrownianPath& b = out.brownian;
  b.times.push_back(0.0);
  b.values.push_back(x0);
  out.outer_index.push_back(0);
  Point x = x0;
  for (int j = 1; j <= n; ++j) {
    const double dT = T[j] - T[j - 1];
    const int k = std::max(1, static_cast<int>(std::ceil(dT / dtb - 1e-9)));
    const double step = dT / k;
    const double s = std::sqrt(step);
    for (int i = 1; i <= k; ++i) {
      for (int a = 0; a < d; ++a) x[a] += s * rng.normal();
      b.times.push_back(i == k ? T[j] : T[j - 1] + i * step);
      b.values.push_back(x);
    }
    out.outer_index.push_back(static_cast<int>(b.times.size()) - 1);
    path.skeleton.push_back(x);
  }
  return out;
}

// ---- jump law ------------------------------------------------------------

double JumpLaw::radial_density(double r) const {
  return sphere_area(md_.d) * std::pow(r, md_.d - 1) * levy_density(r, md_);
}

double JumpLaw::cell_mass(double a, double b, int nodes) const {
  // substitute r = e^u to flatten the power-law decay
  const double la = std::log(a), lb = std::log(b);
  return integrate_gl([&](double u) {
    const double r = std::exp(u);
    return radial_density(r) * r;
  }, la, lb, nodes);
}

JumpLaw::JumpLaw(const MassDim& md, double eps_cut, int knots) : md_(md), eps_(eps_cut) {
  md.validate();
  if (!(eps_cut > 0.0 && eps_cut < 1.0)) throw DomainError("JumpLaw: need 0 < eps_cut < 1");
  if (knots < 16) throw DomainError("JumpLaw: too few knots");
  const double S = sphere_area(md.d);
  const double cd = std::tgamma(0.5 * (md.d + 1)) / std::pow(std::numbers::pi, 0.5 * (md.d + 1));
  r_max_ = md.m > 0.0 ? eps_cut + 60.0 / md.m : std::max(1e3, 1e4 * eps_cut);

  knots_.resize(knots + 1);
  const double ratio = std::log(r_max_ / eps_cut);
  for (int i = 0; i <= knots; ++i) knots_[i] = eps_cut * std::exp(ratio * i / knots);
  knots_.front() = eps_cut;
  knots_.back() = r_max_;

  cum_.assign(knots + 1, 0.0);
  power_.assign(knots, 0.0);
  double total16 = 0.0;
  for (int i = 0; i < knots; ++i) {
    const double a = knots_[i], b = knots_[i + 1];
    const double m16 = cell_mass(a, b, 16);
    const double m32 = cell_mass(a, b, 32);
    total16 += m16;
    cum_[i + 1] = cum_[i] + m32;
    const double ra = radial_density(a), rb = radial_density(b);
    power_[i] = (ra > 0.0 && rb > 0.0) ? std::log(rb / ra) / std::log(b / a) : -1.0;
    // power-law model against the true density at the geometric midpoint
    const double mid = std::sqrt(a * b);
    const double model = ra * std::pow(mid / a, power_[i]);
    const double truth = radial_density(mid);
    if (truth > 1e-300) tab_error_ = std::max(tab_error_, std::abs(model - truth) / truth);
  }
  table_mass_ = cum_.back();
  quad_error_ = std::abs(total16 - table_mass_) / table_mass_;
  if (!(table_mass_ > 0.0) || !std::isfinite(table_mass_) || quad_error_ > 1e-10)
    throw QuadratureFailure("JumpLaw: intensity quadrature did not converge");
  // Beyond r_max: exact Pareto tail at m = 0, negligible (e^{-60}) at m > 0.
  tail_mass_ = md.m > 0.0 ? 0.0 : S * cd / r_max_;
  lambda_ = table_mass_ + tail_mass_;

  // per-axis variance rate of the removed small jumps: (1/d) int_{|y|<eps} |y|^2 n(y) dy
  if (md.m == 0.0) {
    sigma2_ = S * cd * eps_cut / md.d;
  } else {
    double acc = 0.0;
    double hi = eps_cut;
    for (int shell = 0; shell < 200; ++shell) {
      const double lo = 0.5 * hi;
      const double part = integrate_gl([&](double r) { return r * r * radial_density(r); }, lo, hi, 16);
      acc += part;
      if (shell > 4 && std::abs(part) < 1e-15 * std::abs(acc)) break;
      hi = lo;
    }
    sigma2_ = acc / md.d;
  }
}

double JumpLaw::radial_mass(double r_lo, double r_hi) const {
  if (!(r_hi > r_lo) || !(r_lo > 0.0)) return 0.0;
  if (md_.m == 0.0) {
    const double cd = std::tgamma(0.5 * (md_.d + 1)) / std::pow(std::numbers::pi, 0.5 * (md_.d + 1));
    const double hi_term = std::isfinite(r_hi) ? 1.0 / r_hi : 0.0;
    return sphere_area(md_.d) * cd * (1.0 / r_lo - hi_term);
  }
  if (!std::isfinite(r_hi)) r_hi = std::max(r_lo * 2.0, r_lo + 60.0 / md_.m);
  const int cells = std::max(8, static_cast<int>(std::ceil(8.0 * std::log(r_hi / r_lo))));
  const double q = std::pow(r_hi / r_lo, 1.0 / cells);
  double acc = 0.0, a = r_lo;
  for (int i = 0; i < cells; ++i) {
    const double b = i + 1 == cells ? r_hi : a * q;
    acc += cell_mass(a, b, 32);
    a = b;
  }
  return acc;
}

double JumpLaw::sample_radius(RngStream& rng) const {
  const double u = rng.uniform() * lambda_;
  if (u >= table_mass_) {
    const double f = (u - table_mass_) / tail_mass_;
    return r_max_ / std::max(1.0 - f, 1e-300);
  }
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  const int k = std::clamp(static_cast<int>(it - cum_.begin()) - 1, 0, static_cast<int>(power_.size()) - 1);
  const double mass = cum_[k + 1] - cum_[k];
  const double f = std::clamp((u - cum_[k]) / mass, 0.0, 1.0);
  const double a = knots_[k], b = knots_[k + 1];
  const double q = power_[k] + 1.0;
  if (std::abs(q) < 1e-12) return a * std::pow(b / a, f);
  const double aq = std::pow(a, q), bq = std::pow(b, q);
  return std::pow(aq + f * (bq - aq), 1.0 / q);
}

Point JumpLaw::sample_direction(RngStream& rng) const {
  const int d = md_.d;
  Point w(d);
  if (d == 1) {
    w[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    return w;
  }
  double n2 = 0.0;
  do {
    for (int a = 0; a < d; ++a) w[a] = rng.normal();
    n2 = w.squaredNorm();
  } while (n2 < 1e-24);
  return w / std::sqrt(n2);
}

Point JumpLaw::sample_jump(RngStream& rng) const {
  const double r = sample_radius(rng);
  return r * sample_direction(rng);
}

CadlagPath sample_levy_jumps(const Point& x0, double t, const JumpLaw& law, double dt, RngStream& rng) {
  if (!(t > 0.0) || !(dt > 0.0)) throw DomainError("sample_levy_jumps: need t > 0 and dt > 0");
  if (x0.size() != law.mass_dim().d) throw DomainError("sample_levy_jumps: dimension mismatch");
  const int K = std::max(1, static_cast<int>(std::ceil(t / dt - 1e-9)));
  CadlagPath p;
  p.x0 = x0;
  p.t_end = t;
  p.eps_cut = law.cutoff();
  p.times = uniform_grid(t, K);
  p.skeleton.reserve(K + 1);
  p.skeleton.push_back(x0);
  const double sig2 = law.small_jump_variance();
  const double lam = law.intensity();
  const int d = static_cast<int>(x0.size());
  Point x = x0;
  double s = 0.0;
  double next_jump = rng.exponential() / lam;
  auto diffuse = [&](double to) {
    const double h = to - s;
    if (h <= 0.0) return;
    Point inc(d);
    const double sd = std::sqrt(sig2 * h);
    for (int a = 0; a < d; ++a) inc[a] = sd * rng.normal();
    p.diffusion.push_back({s, h, x, inc});
    x += inc;
    s = to;
  };
  for (int k = 1; k <= K; ++k) {
    const double target = p.times[k];
    while (next_jump < target) {
      diffuse(next_jump);
      const Point y = law.sample_jump(rng);
      p.jumps.push_back({next_jump, y, x});
      x += y;
      next_jump += rng.exponential() / lam;
    }
    diffuse(target);
    p.skeleton.push_back(x);
  }
  return p;
}

CadlagPath sample_levy_jumps(const Point& x0, double t, double m, int d, double eps_cut, double dt,
                             RngStream& rng) {
  const JumpLaw law(MassDim{m, d}, eps_cut);
  return sample_levy_jumps(x0, t, law, dt, rng);
}

int counting_measure(const CadlagPath& path, double t_lo, double t_hi, const Annulus& U) {
  if (!(t_lo < t_hi)) throw DomainError("counting_measure: need t_lo < t_hi");
  int count = 0;
  for (const auto& j : path.jumps) {
    if (j.time <= t_lo || j.time > t_hi) continue;
    const double r = j.jump.norm();
    if (r > U.r_lo && r < U.r_hi) ++count;
  }
  return count;
}

}  // namespace relkac
