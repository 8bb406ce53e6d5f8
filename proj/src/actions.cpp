#include "relkac/actions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "relkac/quadrature.hpp"
#include "relkac/specfun.hpp"

namespace relkac {

namespace {

constexpr int kShellNodes = 8;
constexpr int kMaxInnerShells = 120;
constexpr int kCircleAngles = 16;
constexpr int kPolarNodes = 8;
constexpr int kChordNodes = 8;
constexpr double kAbsFloor = 1e-14;

void check_skeleton(const CadlagPath& path, int stride) {
  const int n = path.slices();
  if (n < 1) throw DomainError("action: path has no slices");
  if (stride < 1 || n % stride != 0) throw DomainError("action: stride must divide the slice count");
}

// chord(a, b) returns the phase increment P(a, b) . (b - a).
template <class Chord>
ActionValue sliced(const CadlagPath& path, const FieldSpec& fs, int stride, Chord&& chord) {
  check_skeleton(path, stride);
  ActionValue out;
  double phase = 0.0, pot = 0.0;
  const int n = path.slices();
  for (int j = stride; j <= n; j += stride) {
    const Point& a = path.skeleton[j - stride];
    const Point& b = path.skeleton[j];
    phase += chord(a, b);
    if (!fs.v_is_zero()) pot += fs.V(0.5 * (a + b)) * (path.times[j] - path.times[j - stride]);
  }
  out.imag_part = phase;
  out.real_part = pot;
  out.diagnostics["phase_sum"] = phase;
  out.diagnostics["potential"] = pot;
  out.diagnostics["slices"] = n / stride;
  return out;
}

// P(x, y) . y for the chosen chord rule. Short chords inside the p.v.
// integral use a fixed rule on A itself, whose error scales with |y|.
double chord_phase(const FieldSpec& fs, const Point& x, const Point& y, ChordRule rule, bool short_chord) {
  if (rule == ChordRule::Midpoint) return fs.A(x + 0.5 * y).dot(y);
  if (short_chord) return line_average_fixed(fs, x, x + y, kChordNodes).dot(y);
  return exact_line_integral(fs, x, x + y);
}

double shell_sum(const FieldSpec& fs, const Point& x, const std::vector<JumpActionRule::Node>& shell,
                 const std::vector<JumpActionRule::Direction>& dirs, ChordRule rule) {
  // Directions come in one hemisphere; the antipode is folded in, which
  // cancels the odd leading singularity of the integrand exactly.
  double acc = 0.0;
  for (const auto& node : shell) {
    double s = 0.0;
    for (const auto& dir : dirs) {
      const Point y = node.r * dir.omega;
      s += dir.w * 0.5 * (chord_phase(fs, x, y, rule, true) + chord_phase(fs, x, -y, rule, true));
    }
    acc += node.w * s;
  }
  return acc;
}

ActionValue jump_action(const CadlagPath& path, const FieldSpec& fs, const JumpActionRule& rule, ChordRule chord) {
  if (!(path.eps_cut > 0.0)) throw DomainError("jump action: path carries no jump records");
  if (std::abs(path.eps_cut - rule.cutoff()) > 1e-15 * rule.cutoff())
    throw DomainError("jump action: rule and path cutoffs differ");
  double large = 0.0, small = 0.0;
  int n_large = 0, n_small = 0;
  for (const auto& j : path.jumps) {
    const double r = j.jump.norm();
    const double p = chord_phase(fs, j.before, j.jump, chord, false);
    if (r >= 1.0) {
      large += p;
      ++n_large;
    } else {
      small += p;
      ++n_small;
    }
  }
  double ito = 0.0, comp = 0.0, inner = 0.0, pot = 0.0;
  int max_shells = 0;
  // Trapezoid in time over the diffusion pieces; a piece end is reused when
  // the next piece starts there (no jump in between).
  Point cached_at;
  PvSplit cached;
  bool have_cache = false;
  auto pv_at = [&](const Point& at) {
    if (!(have_cache && at == cached_at)) {
      cached = pv_compensator(fs, at, rule, chord);
      cached_at = at;
      have_cache = true;
      max_shells = std::max(max_shells, cached.shells);
    }
    return cached;
  };
  for (const auto& piece : path.diffusion) {
    ito += fs.A(piece.start).dot(piece.increment);
    const Point end = piece.start + piece.increment;
    for (const Point* at : {&piece.start, &end}) {
      const PvSplit pv = pv_at(*at);
      comp += 0.5 * piece.dt * pv.outer;
      inner += 0.5 * piece.dt * pv.inner;
      if (!fs.v_is_zero()) pot += 0.5 * piece.dt * fs.V(*at);
    }
  }
  ActionValue out;
  // small - comp is the compensated sum; comp + inner is the p.v. term.
  out.imag_part = large + small + ito + inner;
  out.real_part = pot;
  auto& dg = out.diagnostics;
  dg["jump_sum"] = large;
  dg["compensated_sum"] = small - comp;
  dg["compensator"] = comp;
  dg["pv_term"] = comp + inner;
  dg["ito_sum"] = ito;
  dg["potential"] = pot;
  dg["eps_cut"] = path.eps_cut;
  dg["jumps_large"] = n_large;
  dg["jumps_small"] = n_small;
  dg["pv_shells"] = max_shells;
  return out;
}

}  // namespace

Complex ActionValue::weight() const { return std::exp(-real_part) * std::polar(1.0, -imag_part); }

ActionValue action_S1_sliced(const CadlagPath& path, const FieldSpec& fs, int stride) {
  return sliced(path, fs, stride,
                [&](const Point& a, const Point& b) { return midpoint_eval(fs, a, b).dot(b - a); });
}

ActionValue action_S2_sliced(const CadlagPath& path, const FieldSpec& fs, int stride) {
  return sliced(path, fs, stride, [&](const Point& a, const Point& b) { return exact_line_integral(fs, a, b); });
}

JumpActionRule::JumpActionRule(const MassDim& md, double eps_cut) : md_(md), eps_(eps_cut) {
  md.validate();
  if (!(eps_cut > 0.0 && eps_cut < 1.0)) throw DomainError("JumpActionRule: need 0 < eps_cut < 1");
  const int d = md.d;
  if (d > 3) throw DomainError("JumpActionRule: d <= 3");
  auto make_shell = [&](double lo, double hi) {
    const GaussRule& g = gauss_legendre(kShellNodes);
    std::vector<Node> shell;
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    for (int i = 0; i < kShellNodes; ++i) {
      const double r = c + h * g.nodes[i];
      shell.push_back({r, h * g.weights[i] * std::pow(r, d - 1) * levy_density(r, md)});
    }
    return shell;
  };
  for (double hi = 1.0; hi > eps_cut;) {
    const double lo = std::max(0.5 * hi, eps_cut);
    outer_.push_back(make_shell(lo, hi));
    hi = lo;
  }
  double hi = eps_cut;
  for (int k = 0; k < kMaxInnerShells; ++k) {
    inner_.push_back(make_shell(0.5 * hi, hi));
    hi *= 0.5;
  }

  // Hemisphere of a rule symmetric under omega -> -omega; weights of the full rule.
  if (d == 1) {
    Point w(1);
    w[0] = 1.0;
    dirs_.push_back({w, 1.0});
  } else if (d == 2) {
    for (int k = 0; k < kCircleAngles / 2; ++k) {
      const double th = 2.0 * std::numbers::pi * k / kCircleAngles;
      Point w(2);
      w << std::cos(th), std::sin(th);
      dirs_.push_back({w, 2.0 * std::numbers::pi / kCircleAngles});
    }
  } else {
    const GaussRule& g = gauss_legendre(kPolarNodes);
    for (int i = 0; i < kPolarNodes; ++i) {
      const double ct = g.nodes[i], st = std::sqrt(1.0 - ct * ct);
      for (int k = 0; k < kCircleAngles / 2; ++k) {
        const double ph = 2.0 * std::numbers::pi * k / kCircleAngles;
        Point w(3);
        w << st * std::cos(ph), st * std::sin(ph), ct;
        dirs_.push_back({w, g.weights[i] * 2.0 * std::numbers::pi / kCircleAngles});
      }
    }
  }
  // Fold the antipodal half into the stored weights.
  for (auto& dir : dirs_) dir.w *= 2.0;
}

PvSplit pv_compensator(const FieldSpec& fs, const Point& x, const JumpActionRule& rule, ChordRule chord) {
  PvSplit out;
  for (const auto& shell : rule.outer_shells()) out.outer += shell_sum(fs, x, shell, rule.directions(), chord);
  double acc = 0.0;
  int k = 0;
  for (const auto& shell : rule.inner_shells()) {
    const double part = shell_sum(fs, x, shell, rule.directions(), chord);
    acc += part;
    ++k;
    if (k >= 3 && std::abs(part) <= std::max(JumpActionRule::kCauchyTol * std::abs(acc), kAbsFloor)) {
      out.inner = acc;
      out.shells = k;
      return out;
    }
  }
  throw QuadratureFailure("p.v. compensator did not converge; A is too rough");
}

ActionValue action_S1_jump(const CadlagPath& path, const FieldSpec& fs, const JumpActionRule& rule) {
  return jump_action(path, fs, rule, ChordRule::Midpoint);
}

ActionValue action_S2_jump(const CadlagPath& path, const FieldSpec& fs, const JumpActionRule& rule) {
  return jump_action(path, fs, rule, ChordRule::LineAverage);
}

ActionValue action_S3(const BrownianPath& bpath, const SubordinatorPath& spath, const FieldSpec& fs, int stride) {
  const int K = static_cast<int>(bpath.times.size()) - 1;
  const int n = static_cast<int>(spath.times.size()) - 1;
  if (K < 1 || n < 1) throw DomainError("action_S3: empty path");
  if (stride < 1 || n % stride != 0) throw DomainError("action_S3: stride must divide the slice count");
  double strat = 0.0, ito = 0.0, div_half = 0.0;
  bool have_div = true;
  for (int k = 0; k < K; ++k) {
    const Point& a = bpath.values[k];
    const Point& b = bpath.values[k + 1];
    const Point db = b - a;
    strat += fs.A(0.5 * (a + b)).dot(db);
    ito += fs.A(a).dot(db);
    if (have_div) {
      const auto dv = fs.div_A(a);
      if (dv) {
        div_half += 0.5 * *dv * (bpath.times[k + 1] - bpath.times[k]);
      } else {
        have_div = false;
      }
    }
  }
  // B(T(t_j)) sits exactly on the Brownian grid.
  auto at_time = [&](double s) -> const Point& {
    const auto it = std::lower_bound(bpath.times.begin(), bpath.times.end(), s);
    if (it == bpath.times.end() || *it != s) throw DomainError("action_S3: subordinator time not on Brownian grid");
    return bpath.values[it - bpath.times.begin()];
  };
  double pot = 0.0;
  if (!fs.v_is_zero()) {
    double prev = fs.V(at_time(spath.values[0]));
    for (int j = stride; j <= n; j += stride) {
      const double cur = fs.V(at_time(spath.values[j]));
      pot += 0.5 * (prev + cur) * (spath.times[j] - spath.times[j - stride]);
      prev = cur;
    }
  }
  ActionValue out;
  out.imag_part = strat;
  out.real_part = pot;
  auto& dg = out.diagnostics;
  dg["stratonovich_sum"] = strat;
  dg["ito_sum"] = ito;
  dg["potential"] = pot;
  dg["brownian_steps"] = K;
  if (have_div) {
    dg["half_div_integral"] = div_half;
    dg["ito_stratonovich_gap"] = strat - ito;
  }
  return out;
}

}  // namespace relkac
