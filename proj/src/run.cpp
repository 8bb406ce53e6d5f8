#include "relkac/run.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "relkac/paths.hpp"
#include "relkac/specfun.hpp"
#include "relkac/verify.hpp"

namespace relkac {

namespace {

using nlohmann::json;

json cjson(Complex z) { return json::array({z.real(), z.imag()}); }

json point_json(const Point& p) {
  json a = json::array();
  for (int i = 0; i < p.size(); ++i) a.push_back(p[i]);
  return a;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

// Writes text to path, or to out when path is empty.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    out.flush();
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

// CSV preamble: the resolved configuration as a comment line.
std::string csv_header(const RunConfig& cfg, const std::string& columns) {
  return "# config: " + cfg.to_json().dump() + "\n" + columns + "\n";
}

json envelope(const RunConfig& cfg) {
  json j;
  j["config"] = cfg.to_json();
  j["seed"] = cfg.seed;
  return j;
}

int variant_number(const RunConfig& cfg) {
  switch (parse_variant(cfg.variant)) {
    case Variant::H1: return 1;
    case Variant::H2: return 2;
    case Variant::H3: return 3;
    default: throw ConfigError("variant must be h1, h2 or h3 for path estimates");
  }
}

int run_kernel(const RunConfig& cfg, std::ostream& out) {
  const MassDim md = cfg.mass_dim();
  std::string text = csv_header(cfg, "y,t,k0,n,density");
  for (double t : cfg.kernel_times)
    for (int i = 0; i < cfg.kernel_points; ++i) {
      const double y = cfg.kernel_points == 1
                           ? cfg.kernel_y_min
                           : cfg.kernel_y_min + (cfg.kernel_y_max - cfg.kernel_y_min) * i / (cfg.kernel_points - 1);
      text += fmt(y) + "," + fmt(t) + "," + fmt(free_kernel(y, t, md)) + "," + fmt(levy_density(y, md)) + "," +
              fmt(subordinator_density(y, t, md.m)) + "\n";
    }
  emit(cfg.output_csv, text, out);
  return kExitOk;
}

int run_charfn(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  const Sampler s = parse_sampler(cfg.sampler);
  // Cutoff allowance for the jump sampler, proportional to the cutoff.
  const double allowance = s == Sampler::Jump ? 5e-3 * cfg.sample_cutoff / 0.05 : 0.0;
  const auto rows =
      charfn_suite(s, cfg.mass_dim(), cfg.t, cfg.charfn_xi, cfg.charfn_paths, cfg.seed, cfg.sample_cutoff);
  std::string text = csv_header(cfg, "xi,empirical_re,empirical_im,exact,stderr,z,pass");
  bool all_pass = true;
  for (const auto& r : rows) {
    const bool pass = std::abs(r.empirical - r.exact) <= 3.0 * r.stderr + allowance;
    all_pass = all_pass && pass;
    text += fmt(r.xi) + "," + fmt(r.empirical.real()) + "," + fmt(r.empirical.imag()) + "," + fmt(r.exact) + "," +
            fmt(r.stderr) + "," + fmt(r.z) + "," + (pass ? "1" : "0") + "\n";
  }
  emit(cfg.output_csv, text, out);
  log << (all_pass ? "PASS" : "FAIL") << " characteristic function (" << to_string(s) << " sampler)\n";
  return all_pass ? kExitOk : kExitFail;
}

int run_sample(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  if (cfg.check_charfn) return run_charfn(cfg, out, log);
  const Sampler s = parse_sampler(cfg.sampler);
  const MassDim md = cfg.mass_dim();
  const Point x0 = cfg.point();
  std::string cols = "path,t";
  for (int a = 0; a < cfg.dim; ++a) cols += ",x" + std::to_string(a + 1);
  cols += ",jump";
  std::string text = csv_header(cfg, cols);
  auto row = [&](std::int64_t p, double t, const Point& x, int marker) {
    text += std::to_string(p) + "," + fmt(t);
    for (int a = 0; a < x.size(); ++a) text += "," + fmt(x[a]);
    text += "," + std::to_string(marker) + "\n";
  };
  std::optional<JumpLaw> law;
  if (s == Sampler::Jump) law.emplace(md, cfg.sample_cutoff);
  for (std::int64_t p = 0; p < cfg.sample_paths; ++p) {
    RngStream rng(cfg.seed, static_cast<std::uint64_t>(p));
    CadlagPath path;
    if (s == Sampler::Subordinated) {
      path = sample_subordinated(x0, uniform_grid(cfg.t, cfg.sample_slices), md.m, rng, {false, 1}).path;
    } else {
      path = sample_levy_jumps(x0, cfg.t, *law, cfg.t / cfg.sample_slices, rng);
    }
    // Grid rows carry marker 0; each recorded jump adds a row with X(s) and marker 1.
    std::size_t next_jump = 0;
    for (int j = 0; j <= path.slices(); ++j) {
      while (next_jump < path.jumps.size() && path.jumps[next_jump].time <= path.times[j]) {
        const JumpRecord& jr = path.jumps[next_jump++];
        row(p, jr.time, jr.before + jr.jump, 1);
      }
      row(p, path.times[j], path.skeleton[j], 0);
    }
  }
  emit(cfg.output_csv, text, out);
  return kExitOk;
}

int run_estimate(const RunConfig& cfg, std::ostream& out) {
  const EstimateReport r = estimate(variant_number(cfg), cfg.field_spec(), cfg.probe_function(), cfg.point(), cfg.t,
                                    cfg.mass_dim(), cfg.mc_params(), cfg.seed);
  json j = envelope(cfg);
  j["report"] = to_json(r);
  emit(cfg.output_json, j.dump(2) + "\n", out);
  return kExitOk;
}

int run_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  const Variant v = parse_variant(cfg.variant);
  const MassDim md = cfg.mass_dim();
  const FieldSpec fs = cfg.field_spec();
  const Lattice lat = cfg.lattice();
  const LatticeOperator op = build_variant(v, lat, fs, md);
  json diag;
  diag["variant"] = to_string(v);
  diag["sites"] = lat.size();
  diag["spacing"] = lat.spacing();
  diag["spectral_floor"] = spectral_floor(op);
  diag["hermiticity_defect"] = hermiticity_defect(op.matrix());
  diag["norm"] = hermitian_norm2(op.matrix());
  if (v != Variant::H0) {
    // Gauge probe periodic on the box, so the conjugation is lattice exact.
    const GaugeFunction phi = GaugeFunction::periodic_cubic(cfg.dim, 1.0, cfg.grid_length);
    const GaugeResidual g = gauge_residual_detail(v, fs, phi, lat, md);
    diag["gauge_residual"] = {{"absolute", g.absolute}, {"relative", g.relative()}};
  }
  if (fs.is_linear() && (v == Variant::H1 || v == Variant::H3)) {
    const CoincidenceResidual c = coincidence_residual(fs, lat, md);
    diag["coincidence_residual"] = {{"h1_minus_h3", c.h1_minus_h3}, {"h1sq_minus_d", c.h1sq_minus_d}};
  }
  const ProbeFunction g = cfg.probe_function();
  const CVector g_lat = sample_on_lattice(lat, [&g](const Point& y) { return g(y); });
  const CVector u = apply_semigroup(add_potential(op, lat, fs), cfg.t, g_lat);
  diag["value_at_x"] = cjson(interpolate(lat, u, cfg.point()));

  json j = envelope(cfg);
  j["diagnostics"] = diag;
  if (!cfg.output_csv.empty() || !cfg.output_json.empty()) {
    std::string cols;
    for (int a = 0; a < cfg.dim; ++a) cols += "x" + std::to_string(a + 1) + ",";
    cols += "g_re,g_im,u_re,u_im";
    std::string text = csv_header(cfg, cols);
    for (int i = 0; i < lat.size(); ++i) {
      const Point p = lat.site(i);
      for (int a = 0; a < p.size(); ++a) text += fmt(p[a]) + ",";
      text += fmt(g_lat[i].real()) + "," + fmt(g_lat[i].imag()) + "," + fmt(u[i].real()) + "," + fmt(u[i].imag()) + "\n";
    }
    emit(cfg.output_csv, text, out);
    j["semigroup_csv"] = cfg.output_csv.empty() ? json("stdout") : json(cfg.output_csv);
  } else {
    j["semigroup_csv"] = nullptr;
    log << "note: set an output path to also receive the semigroup columns as CSV\n";
  }
  emit(cfg.output_json, j.dump(2) + "\n", out);
  return kExitOk;
}

int run_compare(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  if (cfg.dim > 2) throw ConfigError("compare: the free-case tolerance study needs dim <= 2");
  const int v = variant_number(cfg);
  const MassDim md = cfg.mass_dim();
  const FieldSpec fs = cfg.field_spec();
  const ProbeFunction g = cfg.probe_function();
  const Lattice lat = cfg.lattice();
  const Point x = cfg.point();
  const EstimateReport r = estimate(v, fs, g, x, cfg.t, md, cfg.mc_params(), cfg.seed);
  const Complex lat_value = lattice_oracle_value(v, fs, [&g](const Point& y) { return g(y); }, x, cfg.t, md, lat);
  const LatticeTolerance tol = free_case_lat_tol(v, g, x, cfg.t, md, lat);
  const OracleVerdict verdict = compare_with_oracle(r, lat_value, tol.lat_tol);
  json j = envelope(cfg);
  j["estimate"] = to_json(r);
  j["oracle"] = {{"value", cjson(lat_value)},
                 {"lat_tol", tol.lat_tol},
                 {"lattice_free", cjson(tol.lattice_free)},
                 {"exact_free", cjson(tol.exact_free)}};
  j["verdict"] = {{"pass", verdict.pass},         {"deviation", verdict.deviation}, {"stderr", verdict.stderr},
                  {"lat_tol", verdict.lat_tol},   {"bound", verdict.bound},         {"result", verdict.pass ? "PASS" : "FAIL"}};
  emit(cfg.output_json, j.dump(2) + "\n", out);
  log << (verdict.pass ? "PASS" : "FAIL") << " h" << v << " deviation " << verdict.deviation << " bound "
      << verdict.bound << "\n";
  return verdict.pass ? kExitOk : kExitFail;
}

int run_verify(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  VerifyOptions opt;
  opt.seed = cfg.seed;
  std::vector<CheckResult> results;
  auto report = [&](const CheckResult& c) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " (%.1f s)", c.seconds);
    log << (c.pass ? "PASS " : "FAIL ") << c.id << " " << c.title << buf << "\n";
    log.flush();
    results.push_back(c);
  };
  if (cfg.all) {
    for (int k = 1; k <= kCriterionCount; ++k) report(acceptance_criterion(k, opt));
  } else {
    for (const auto& c : run_suite(cfg.suite, opt)) report(c);
  }
  bool pass = true;
  json checks = json::array();
  for (const auto& c : results) {
    pass = pass && c.pass;
    checks.push_back(to_json(c));
  }
  json j = envelope(cfg);
  j["checks"] = checks;
  j["pass"] = pass;
  emit(cfg.output_json, j.dump(2) + "\n", out);
  return pass ? kExitOk : kExitFail;
}

}  // namespace

nlohmann::json to_json(const EstimateReport& r) {
  json j;
  j["variant"] = r.variant;
  j["form"] = to_string(r.form);
  j["x"] = point_json(r.x);
  j["t"] = r.t;
  j["mass"] = r.md.m;
  j["dim"] = r.md.d;
  j["mc"] = {{"n_paths", r.mc.n_paths},
             {"n_slices", r.mc.n_slices},
             {"eps_cut", r.mc.eps_cut},
             {"brownian_steps", r.mc.brownian_steps},
             {"control", r.mc.control}};
  j["seed"] = r.seed;
  j["mean"] = cjson(r.mean);
  j["stderr"] = {r.stderr_re, r.stderr_im};
  j["n_paths"] = r.n_paths;
  if (r.has_control) {
    j["control"] = {{"mean", cjson(r.control_mean)},
                    {"stderr", {r.control_stderr_re, r.control_stderr_im}},
                    {"shift", cjson(r.control_shift)},
                    {"shift_stderr", r.control_shift_stderr}};
  }
  j["max_weight"] = r.max_weight;
  j["diagnostics"] = r.diagnostics;
  if (r.oracle) j["oracle"] = cjson(*r.oracle);
  if (r.z_score) j["z_score"] = *r.z_score;
  return j;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  if (cfg.command == "kernel") return run_kernel(cfg, out);
  if (cfg.command == "sample") return run_sample(cfg, out, log);
  if (cfg.command == "estimate") return run_estimate(cfg, out);
  if (cfg.command == "oracle") return run_oracle(cfg, out, log);
  if (cfg.command == "compare") return run_compare(cfg, out, log);
  if (cfg.command == "verify") return run_verify(cfg, out, log);
  throw ConfigError("unknown command '" + cfg.command + "'");
}

int run_guarded(const std::function<RunConfig()>& load, std::ostream& out, std::ostream& log) {
  try {
    return run(load(), out, log);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace relkac
