#include "relkac/estimator.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

#include "relkac/actions.hpp"
#include "relkac/parallel.hpp"
#include "relkac/paths.hpp"
#include "relkac/specfun.hpp"

namespace relkac {

// ---- probes --------------------------------------------------------------

ProbeFunction ProbeFunction::gaussian(const Point& center, double width) {
  if (!(width > 0.0)) throw DomainError("gaussian probe: width must be > 0");
  ProbeFunction p;
  p.kind_ = Kind::Gaussian;
  p.center_ = center;
  p.k_ = Point::Zero(center.size());
  p.width_ = width;
  return p;
}

ProbeFunction ProbeFunction::bump(const Point& center, double radius) {
  if (!(radius > 0.0)) throw DomainError("bump probe: radius must be > 0");
  ProbeFunction p = gaussian(center, 1.0);
  p.kind_ = Kind::Bump;
  p.width_ = radius;
  return p;
}

ProbeFunction ProbeFunction::plane_wave_windowed(const Point& center, const Point& k, double width) {
  if (k.size() != center.size()) throw DomainError("plane-wave probe: dimension mismatch");
  ProbeFunction p = gaussian(center, width);
  p.kind_ = Kind::PlaneWaveWindowed;
  p.k_ = k;
  return p;
}

std::string ProbeFunction::name() const {
  switch (kind_) {
    case Kind::Gaussian: return "gaussian";
    case Kind::Bump: return "bump";
    case Kind::PlaneWaveWindowed: return "plane_wave_windowed";
  }
  return "?";
}

ProbeFunction::Kind parse_probe_kind(const std::string& s) {
  if (s == "gaussian") return ProbeFunction::Kind::Gaussian;
  if (s == "bump") return ProbeFunction::Kind::Bump;
  if (s == "plane_wave_windowed") return ProbeFunction::Kind::PlaneWaveWindowed;
  throw ConfigError("unknown probe '" + s + "'");
}

double ProbeFunction::reach() const {
  if (kind_ == Kind::Bump) return width_;
  return width_ * std::sqrt(2.0 * std::log(1e17));
}

Complex ProbeFunction::operator()(const Point& x) const {
  const double r2 = (x - center_).squaredNorm();
  switch (kind_) {
    case Kind::Gaussian: return std::exp(-r2 / (2.0 * width_ * width_));
    case Kind::Bump: {
      const double u = r2 / (width_ * width_);
      return u < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - u)) : 0.0;
    }
    case Kind::PlaneWaveWindowed:
      return std::exp(-r2 / (2.0 * width_ * width_)) * std::polar(1.0, k_.dot(x));
  }
  return 0.0;
}

std::function<Complex(const Point&)> ProbeFunction::gauged(const GaugeFunction& phi, double sign) const {
  ProbeFunction self = *this;
  return [self, phi, sign](const Point& x) { return std::polar(1.0, sign * phi.value(x)) * self(x); };
}

// ---- parameters ----------------------------------------------------------

std::string to_string(ActionForm f) { return f == ActionForm::Sliced ? "sliced" : "jump"; }

ActionForm parse_action_form(const std::string& s) {
  if (s == "sliced") return ActionForm::Sliced;
  if (s == "jump") return ActionForm::Jump;
  throw ConfigError("unknown action form '" + s + "'");
}

std::string to_string(Sampler s) { return s == Sampler::Subordinated ? "subordinated" : "jump"; }

Sampler parse_sampler(const std::string& s) {
  if (s == "subordinated") return Sampler::Subordinated;
  if (s == "jump") return Sampler::Jump;
  throw ConfigError("unknown sampler '" + s + "'");
}

void McParams::validate() const {
  if (n_paths < 2) throw ConfigError("mc.paths must be >= 2");
  if (n_slices < 1) throw ConfigError("mc.slices must be >= 1");
  if (!(eps_cut > 0.0 && eps_cut < 1.0)) throw ConfigError("mc.cutoff must lie in (0, 1)");
  if (brownian_steps < 1) throw ConfigError("mc.brownian_steps must be >= 1");
}

double EstimateReport::stderr_abs() const { return std::hypot(stderr_re, stderr_im); }

// ---- estimator -----------------------------------------------------------

namespace {

constexpr std::uint64_t kControlStreamOffset = std::uint64_t{1} << 32;

struct Moments {
  double n = 0.0;
  Complex sum;
  double sum_re2 = 0.0, sum_im2 = 0.0;

  void add(Complex z) {
    n += 1.0;
    sum += z;
    sum_re2 += z.real() * z.real();
    sum_im2 += z.imag() * z.imag();
  }
  void merge(const Moments& o) {
    n += o.n;
    sum += o.sum;
    sum_re2 += o.sum_re2;
    sum_im2 += o.sum_im2;
  }
  Complex mean() const { return sum / n; }
  double se_re() const {
    const double mu = sum.real() / n;
    return std::sqrt(std::max(0.0, (sum_re2 - n * mu * mu) / (n - 1.0)) / n);
  }
  double se_im() const {
    const double mu = sum.imag() / n;
    return std::sqrt(std::max(0.0, (sum_im2 - n * mu * mu) / (n - 1.0)) / n);
  }
};

struct ChunkResult {
  Moments main, control, diff;
  double max_weight = 0.0;
  std::map<std::string, double> diag;

  void merge(const ChunkResult& o) {
    main.merge(o.main);
    control.merge(o.control);
    diff.merge(o.diff);
    max_weight = std::max(max_weight, o.max_weight);
    for (const auto& [k, v] : o.diag) diag[k] += v;
  }
};

void add_diag(std::map<std::string, double>& acc, const ActionValue& a) {
  for (const auto& [k, v] : a.diagnostics) acc[k] += v;
  acc["real_part"] += a.real_part;
  acc["imag_part"] += a.imag_part;
}

template <class Body>
ChunkResult run_chunks(std::int64_t n_paths, Body&& body) {
  const std::int64_t n_chunks = (n_paths + kChunkSize - 1) / kChunkSize;
  std::vector<ChunkResult> parts(n_chunks);
  parallel_for(static_cast<int>(n_chunks), [&](int c) {
    const std::int64_t begin = c * kChunkSize;
    const std::int64_t count = std::min(kChunkSize, n_paths - begin);
    body(static_cast<std::uint64_t>(c), count, parts[c]);
  });
  ChunkResult total;
  for (const auto& p : parts) total.merge(p);  // fixed order: bit-reproducible
  return total;
}

}  // namespace

EstimateReport estimate(int variant, const FieldSpec& fs, const std::function<Complex(const Point&)>& g,
                        const Point& x, double t, const MassDim& md, const McParams& mc, std::uint64_t seed) {
  md.validate();
  mc.validate();
  if (variant < 1 || variant > 3) throw ConfigError("variant must be 1, 2 or 3");
  if (!(t > 0.0)) throw ConfigError("t must be > 0");
  if (x.size() != md.d || fs.dim() != md.d) throw ConfigError("dimension mismatch between x, fields and mass/dim");
  if (mc.form == ActionForm::Jump && variant == 3) throw ConfigError("the jump form exists for variants 1 and 2 only");

  const Point origin = Point::Zero(md.d);
  const bool sliced_control = mc.control && mc.form == ActionForm::Sliced;
  const int slices = sliced_control ? 2 * mc.n_slices : mc.n_slices;
  const int stride = sliced_control ? 2 : 1;
  const std::vector<double> grid = uniform_grid(t, slices);

  std::optional<JumpLaw> law, law_half;
  std::optional<JumpActionRule> rule, rule_half;
  if (mc.form == ActionForm::Jump) {
    law.emplace(md, mc.eps_cut);
    rule.emplace(md, mc.eps_cut);
    if (mc.control) {
      law_half.emplace(md, 0.5 * mc.eps_cut);
      rule_half.emplace(md, 0.5 * mc.eps_cut);
    }
  }
  const double jump_dt = t / mc.n_slices;

  auto jump_action = [&](const CadlagPath& p, const JumpActionRule& r) {
    return variant == 1 ? action_S1_jump(p, fs, r) : action_S2_jump(p, fs, r);
  };
  auto sliced_action = [&](const CadlagPath& p, int s) {
    return variant == 1 ? action_S1_sliced(p, fs, s) : action_S2_sliced(p, fs, s);
  };

  ChunkResult total = run_chunks(mc.n_paths, [&](std::uint64_t chunk, std::int64_t count, ChunkResult& out) {
    RngStream rng(seed, chunk);
    std::optional<RngStream> rng_half;
    if (law_half) rng_half.emplace(seed, chunk + kControlStreamOffset);
    for (std::int64_t i = 0; i < count; ++i) {
      Complex main, ctrl;
      if (mc.form == ActionForm::Jump) {
        CadlagPath p = sample_levy_jumps(origin, t, *law, jump_dt, rng);
        translate(p, x);
        const ActionValue a = jump_action(p, *rule);
        main = a.weight() * g(p.end());
        add_diag(out.diag, a);
        if (law_half) {
          CadlagPath q = sample_levy_jumps(origin, t, *law_half, jump_dt, *rng_half);
          translate(q, x);
          ctrl = jump_action(q, *rule_half).weight() * g(q.end());
        }
      } else if (variant == 3) {
        SubordinatedSample s = sample_subordinated(origin, grid, md.m, rng, {true, mc.brownian_steps});
        translate(s, x);
        const ActionValue a = action_S3(s.brownian, s.subordinator, fs, stride);
        const Complex gx = g(s.path.end());
        main = a.weight() * gx;
        add_diag(out.diag, a);
        if (sliced_control) ctrl = action_S3(s.brownian, s.subordinator, fs, 1).weight() * gx;
      } else {
        SubordinatedSample s = sample_subordinated(origin, grid, md.m, rng, {false, mc.brownian_steps});
        translate(s, x);
        const ActionValue a = sliced_action(s.path, stride);
        const Complex gx = g(s.path.end());
        main = a.weight() * gx;
        add_diag(out.diag, a);
        if (sliced_control) ctrl = sliced_action(s.path, 1).weight() * gx;
      }
      out.main.add(main);
      out.max_weight = std::max(out.max_weight, std::abs(main));
      if (mc.control) {
        out.control.add(ctrl);
        out.diff.add(ctrl - main);
      }
    }
  });

  EstimateReport r;
  r.variant = variant;
  r.form = mc.form;
  r.x = x;
  r.t = t;
  r.md = md;
  r.mc = mc;
  r.seed = seed;
  r.n_paths = mc.n_paths;
  r.mean = total.main.mean();
  r.stderr_re = total.main.se_re();
  r.stderr_im = total.main.se_im();
  r.max_weight = total.max_weight;
  for (const auto& [k, v] : total.diag) r.diagnostics[k] = v / total.main.n;
  if (mc.control) {
    r.has_control = true;
    r.control_mean = total.control.mean();
    r.control_stderr_re = total.control.se_re();
    r.control_stderr_im = total.control.se_im();
    r.control_shift = r.control_mean - r.mean;
    // paired on shared paths for the sliced control, independent for the cutoff control
    r.control_shift_stderr = sliced_control
                                 ? std::hypot(total.diff.se_re(), total.diff.se_im())
                                 : std::hypot(r.stderr_abs(), std::hypot(r.control_stderr_re, r.control_stderr_im));
  }
  return r;
}

EstimateReport estimate(int variant, const FieldSpec& fs, const ProbeFunction& g, const Point& x, double t,
                        const MassDim& md, const McParams& mc, std::uint64_t seed) {
  if (g.dim() != md.d) throw ConfigError("probe dimension mismatch");
  return estimate(variant, fs, [&g](const Point& y) { return g(y); }, x, t, md, mc, seed);
}

OracleVerdict compare_with_oracle(const EstimateReport& report, Complex lat_value, double lat_tol) {
  OracleVerdict v;
  v.mean = report.mean;
  v.lat_value = lat_value;
  v.lat_tol = lat_tol;
  v.deviation = std::abs(report.mean - lat_value);
  v.stderr = report.stderr_abs();
  v.bound = 3.0 * v.stderr + lat_tol;
  v.pass = v.deviation <= v.bound;
  return v;
}

std::vector<CharfnRow> charfn_suite(Sampler sampler, const MassDim& md, double t, const std::vector<double>& xi_grid,
                                    std::int64_t n_paths, std::uint64_t seed, double eps_cut) {
  md.validate();
  if (!(t > 0.0)) throw ConfigError("t must be > 0");
  if (n_paths < 2) throw ConfigError("n_paths must be >= 2");
  const Point origin = Point::Zero(md.d);
  std::optional<JumpLaw> law;
  if (sampler == Sampler::Jump) law.emplace(md, eps_cut);
  const std::vector<double> grid{0.0, t};
  const int nx = static_cast<int>(xi_grid.size());
  const std::int64_t n_chunks = (n_paths + kChunkSize - 1) / kChunkSize;
  std::vector<std::vector<Moments>> parts(n_chunks, std::vector<Moments>(nx));
  parallel_for(static_cast<int>(n_chunks), [&](int c) {
    RngStream rng(seed, static_cast<std::uint64_t>(c));
    const std::int64_t count = std::min(kChunkSize, n_paths - c * kChunkSize);
    for (std::int64_t i = 0; i < count; ++i) {
      double x1 = 0.0;
      if (sampler == Sampler::Jump) {
        x1 = sample_levy_jumps(origin, t, *law, t, rng).end()[0];
      } else {
        x1 = sample_subordinated(origin, grid, md.m, rng, {false, 1}).path.end()[0];
      }
      for (int k = 0; k < nx; ++k) parts[c][k].add(std::polar(1.0, xi_grid[k] * x1));
    }
  });
  std::vector<CharfnRow> rows;
  for (int k = 0; k < nx; ++k) {
    Moments m;
    for (const auto& p : parts) m.merge(p[k]);
    CharfnRow row;
    row.xi = xi_grid[k];
    row.empirical = m.mean();
    row.exact = std::exp(-t * relativistic_symbol(std::abs(row.xi), md.m));
    row.stderr = std::hypot(m.se_re(), m.se_im());
    const double dev = std::abs(row.empirical - row.exact);
    row.z = row.stderr > 0.0 ? dev / row.stderr : (dev < 1e-14 ? 0.0 : INFINITY);
    rows.push_back(row);
  }
  return rows;
}

// ---- oracle helpers ------------------------------------------------------

Complex lattice_oracle_value(int variant, const FieldSpec& fs, const std::function<Complex(const Point&)>& g,
                             const Point& x, double t, const MassDim& md, const Lattice& lat) {
  if (variant < 1 || variant > 3) throw ConfigError("variant must be 1, 2 or 3");
  const Variant v = variant == 1 ? Variant::H1 : variant == 2 ? Variant::H2 : Variant::H3;
  const LatticeOperator op = add_potential(build_variant(v, lat, fs, md), lat, fs);
  const CVector u = apply_semigroup(op, t, sample_on_lattice(lat, g));
  return interpolate(lat, u, x);
}

Complex free_semigroup_value(const ProbeFunction& g, const Point& x, double t, const MassDim& md) {
  if (md.d > 2) throw DomainError("free_semigroup_value: d <= 2");
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  constexpr double kTol = 1e-13;
  constexpr unsigned kDepth = 20;
  const Point& c = g.center();
  const double R = g.reach();
  // Split the outer interval at the kernel peak when it falls inside.
  auto split_integrate = [&](auto&& f, double a, double b, double peak) {
    if (peak > a && peak < b) return GK::integrate(f, a, peak, kDepth, kTol) + GK::integrate(f, peak, b, kDepth, kTol);
    return GK::integrate(f, a, b, kDepth, kTol);
  };
  auto part = [&](bool imag) {
    if (md.d == 1) {
      auto f = [&](double y) {
        Point p(1);
        p[0] = y;
        const Complex v = free_kernel(x - p, t, md) * g(p);
        return imag ? v.imag() : v.real();
      };
      return split_integrate(f, c[0] - R, c[0] + R, x[0]);
    }
    auto outer = [&](double y0) {
      auto inner = [&](double y1) {
        Point p(2);
        p << y0, y1;
        const Complex v = free_kernel(x - p, t, md) * g(p);
        return imag ? v.imag() : v.real();
      };
      return split_integrate(inner, c[1] - R, c[1] + R, x[1]);
    };
    return split_integrate(outer, c[0] - R, c[0] + R, x[0]);
  };
  return {part(false), part(true)};
}

LatticeTolerance free_case_lat_tol(int variant, const ProbeFunction& g, const Point& x, double t, const MassDim& md,
                                   const Lattice& lat) {
  if (variant < 1 || variant > 3) throw ConfigError("variant must be 1, 2 or 3");
  const LatticeOperator op = variant == 3 ? build_H3(lat, FieldSpec::zero(md.d), md) : build_H0(lat, md);
  LatticeTolerance out;
  out.lattice_free = interpolate(lat, apply_semigroup(op, t, sample_on_lattice(lat, [&g](const Point& y) {
                                   return g(y);
                                 })),
                                 x);
  out.exact_free = free_semigroup_value(g, x, t, md);
  out.lat_tol = std::abs(out.lattice_free - out.exact_free);
  return out;
}

}  // namespace relkac
