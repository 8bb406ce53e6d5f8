#include "relkac/config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "relkac/verify.hpp"

namespace relkac {

namespace {

using nlohmann::json;

const std::set<std::string> kCommands{"kernel", "sample", "estimate", "oracle", "compare", "verify"};
const std::set<std::string> kFields{"zero", "constant", "linear", "constant_field", "quadratic_axis", "tanh"};
const std::set<std::string> kPotentials{"zero", "harmonic_capped", "gaussian_well"};
const std::set<std::string> kProbes{"gaussian", "bump", "plane_wave_windowed"};

json toml_to_json(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    json out = json::object();
    for (const auto& [k, v] : *t) out[std::string(k.str())] = toml_to_json(v);
    return out;
  }
  if (const auto* a = node.as_array()) {
    json out = json::array();
    for (const auto& v : *a) out.push_back(toml_to_json(v));
    return out;
  }
  if (const auto* v = node.as_string()) return v->get();
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  throw ConfigError("unsupported TOML value (dates and times are not accepted)");
}

// Reads typed values out of one object, recording every problem and any
// key it never consumed.
class Section {
 public:
  Section(const json& doc, std::string name, std::vector<std::string>& errors) : name_(std::move(name)), errors_(errors) {
    const json* node = &doc;
    if (!name_.empty()) {
      node = doc.contains(name_) ? &doc.at(name_) : nullptr;
    }
    if (node && !node->is_object()) {
      fail("", "must be a table/object");
      node = nullptr;
    }
    if (node) obj_ = *node;
  }
  ~Section() = default;

  void finish(const std::set<std::string>& sections = {}) {
    for (const auto& [k, v] : obj_.items())
      if (!used_.count(k) && !sections.count(k)) fail(k, "unknown key");
  }

  template <class T>
  void get(const std::string& key, T& out) {
    used_.insert(key);
    if (!obj_.contains(key)) return;
    const json& v = obj_.at(key);
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw std::invalid_argument("expected a number");
        out = v.get<double>();
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::invalid_argument("expected a boolean");
        out = v.get<bool>();
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw std::invalid_argument("expected an integer");
        if (std::is_unsigned_v<T> && v.get<std::int64_t>() < 0 && !v.is_number_unsigned())
          throw std::invalid_argument("expected a nonnegative integer");
        out = v.get<T>();
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw std::invalid_argument("expected a string");
        out = v.get<std::string>();
      } else if constexpr (std::is_same_v<T, std::vector<double>>) {
        if (!v.is_array()) throw std::invalid_argument("expected an array of numbers");
        std::vector<double> r;
        for (const auto& e : v) {
          if (!e.is_number()) throw std::invalid_argument("expected an array of numbers");
          r.push_back(e.get<double>());
        }
        out = r;
      } else {
        if (!v.is_array()) throw std::invalid_argument("expected an array of arrays");
        T r;
        for (const auto& row : v) {
          if (!row.is_array()) throw std::invalid_argument("expected an array of arrays");
          std::vector<double> rr;
          for (const auto& e : row) {
            if (!e.is_number()) throw std::invalid_argument("expected numbers");
            rr.push_back(e.get<double>());
          }
          r.push_back(rr);
        }
        out = r;
      }
    } catch (const std::exception& e) {
      fail(key, e.what());
    }
  }

  void fail(const std::string& key, const std::string& msg) {
    std::string where = name_.empty() ? key : (key.empty() ? name_ : name_ + "." + key);
    errors_.push_back(where + ": " + msg);
  }

 private:
  std::string name_;
  json obj_ = json::object();
  std::set<std::string> used_;
  std::vector<std::string>& errors_;
};

void require(bool ok, const std::string& msg, std::vector<std::string>& errors) {
  if (!ok) errors.push_back(msg);
}

Point to_point(const std::vector<double>& v) {
  Point p(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) p[static_cast<int>(i)] = v[i];
  return p;
}

}  // namespace

nlohmann::json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const bool is_toml = path.size() >= 5 && path.compare(path.size() - 5, 5, ".toml") == 0;
  if (is_toml) {
    try {
      return toml_to_json(toml::parse(text, path));
    } catch (const toml::parse_error& e) {
      std::ostringstream msg;
      msg << "TOML parse error in '" << path << "': " << e.description() << " at line " << e.source().begin.line;
      throw ConfigError(msg.str());
    }
  }
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("JSON parse error in '" + path + "': " + e.what());
  }
}

RunConfig load_config(const nlohmann::json& doc) {
  std::vector<std::string> errors;
  RunConfig c;
  if (!doc.is_object()) throw ConfigError("config: top level must be a table/object");

  Section top(doc, "", errors);
  top.get("command", c.command);
  top.get("seed", c.seed);
  top.finish({"physics", "field", "potential", "probe", "mc", "lattice", "kernel", "sample", "verify", "output"});

  Section phys(doc, "physics", errors);
  phys.get("dim", c.dim);
  phys.get("mass", c.mass);
  phys.get("t", c.t);
  phys.get("x", c.x);
  phys.finish();

  Section fld(doc, "field", errors);
  fld.get("family", c.field);
  fld.get("amp", c.field_amp);
  fld.get("a", c.field_a);
  fld.get("matrix", c.field_matrix);
  fld.get("b", c.field_b);
  fld.get("component", c.field_component);
  fld.get("source", c.field_source);
  fld.get("coef", c.field_coef);
  fld.finish();

  Section pot(doc, "potential", errors);
  pot.get("family", c.potential);
  pot.get("omega", c.v_omega);
  pot.get("cap", c.v_cap);
  pot.get("depth", c.v_depth);
  pot.get("width", c.v_width);
  pot.finish();

  Section prb(doc, "probe", errors);
  prb.get("kind", c.probe);
  prb.get("center", c.probe_center);
  prb.get("width", c.probe_width);
  prb.get("radius", c.probe_radius);
  prb.get("k", c.probe_k);
  prb.finish();

  Section mc(doc, "mc", errors);
  mc.get("variant", c.variant);
  mc.get("form", c.form);
  mc.get("paths", c.paths);
  mc.get("slices", c.slices);
  mc.get("cutoff", c.cutoff);
  mc.get("brownian_steps", c.brownian_steps);
  mc.get("control", c.control);
  mc.finish();

  Section lat(doc, "lattice", errors);
  lat.get("n", c.grid_n);
  lat.get("length", c.grid_length);
  lat.finish();

  Section ker(doc, "kernel", errors);
  ker.get("y_min", c.kernel_y_min);
  ker.get("y_max", c.kernel_y_max);
  ker.get("points", c.kernel_points);
  ker.get("t", c.kernel_times);
  ker.finish();

  Section smp(doc, "sample", errors);
  smp.get("sampler", c.sampler);
  smp.get("paths", c.sample_paths);
  smp.get("slices", c.sample_slices);
  smp.get("cutoff", c.sample_cutoff);
  smp.get("check_charfn", c.check_charfn);
  smp.get("xi", c.charfn_xi);
  smp.get("charfn_paths", c.charfn_paths);
  smp.finish();

  Section ver(doc, "verify", errors);
  ver.get("suite", c.suite);
  ver.get("all", c.all);
  ver.finish();

  Section out(doc, "output", errors);
  out.get("json", c.output_json);
  out.get("csv", c.output_csv);
  out.finish();

  // Defaults that depend on the dimension.
  if (c.x.empty()) c.x.assign(std::max(c.dim, 1), 0.0);
  if (c.probe_center.empty()) c.probe_center.assign(std::max(c.dim, 1), 0.0);
  if (c.probe_k.empty()) c.probe_k.assign(std::max(c.dim, 1), 0.0);
  if (c.field_a.empty()) c.field_a.assign(std::max(c.dim, 1), 0.0);
  if (c.dim >= 1 && c.dim <= 3) {
    if (c.grid_n == 0) c.grid_n = std::array<int, 3>{256, 64, 16}[c.dim - 1];
    if (c.grid_length == 0.0) c.grid_length = std::array<double, 3>{32.0, 16.0, 8.0}[c.dim - 1];
  }
  if (c.field_matrix.empty()) c.field_matrix.assign(std::max(c.dim, 1), std::vector<double>(std::max(c.dim, 1), 0.0));

  // Semantic checks.
  require(kCommands.count(c.command) > 0, "command: unknown command '" + c.command + "'", errors);
  require(c.dim >= 1 && c.dim <= 3, "physics.dim: must be 1, 2 or 3", errors);
  require(c.mass >= 0.0, "physics.mass: must be >= 0", errors);
  require(c.t > 0.0, "physics.t: must be > 0", errors);
  require(static_cast<int>(c.x.size()) == c.dim, "physics.x: length must equal dim", errors);
  require(kFields.count(c.field) > 0, "field.family: unknown family '" + c.field + "'", errors);
  require(static_cast<int>(c.field_a.size()) == c.dim, "field.a: length must equal dim", errors);
  bool square = static_cast<int>(c.field_matrix.size()) == c.dim;
  for (const auto& row : c.field_matrix) square = square && static_cast<int>(row.size()) == c.dim;
  require(square, "field.matrix: must be dim x dim", errors);
  require(c.field != "constant_field" || c.dim >= 2, "field.family: constant_field needs dim >= 2", errors);
  require(c.field_component >= 0 && c.field_component < c.dim, "field.component: must lie in [0, dim)", errors);
  require(c.field_source >= 0 && c.field_source < c.dim, "field.source: must lie in [0, dim)", errors);
  require(kPotentials.count(c.potential) > 0, "potential.family: unknown family '" + c.potential + "'", errors);
  require(c.v_omega >= 0.0 && c.v_cap > 0.0, "potential: omega must be >= 0 and cap > 0", errors);
  require(c.v_width > 0.0, "potential.width: must be > 0", errors);
  require(kProbes.count(c.probe) > 0, "probe.kind: unknown kind '" + c.probe + "'", errors);
  require(static_cast<int>(c.probe_center.size()) == c.dim, "probe.center: length must equal dim", errors);
  require(static_cast<int>(c.probe_k.size()) == c.dim, "probe.k: length must equal dim", errors);
  require(c.probe_width > 0.0 && c.probe_radius > 0.0, "probe: width and radius must be > 0", errors);
  try {
    const Variant v = parse_variant(c.variant);
    require(v != Variant::NR, "mc.variant: nr is not a relativistic variant", errors);
    if (c.command == "estimate" || c.command == "compare")
      require(v != Variant::H0, "mc.variant: estimate needs h1, h2 or h3", errors);
  } catch (const ConfigError& e) {
    errors.push_back(std::string("mc.variant: ") + e.what());
  }
  try {
    const ActionForm f = parse_action_form(c.form);
    require(f == ActionForm::Sliced || parse_variant(c.variant) == Variant::H1,
            "mc.form: the jump form exists only for h1", errors);
  } catch (const std::exception& e) {
    errors.push_back(std::string("mc.form: ") + e.what());
  }
  require(c.paths >= 2, "mc.paths: must be >= 2", errors);
  require(c.slices >= 1, "mc.slices: must be >= 1", errors);
  require(c.cutoff > 0.0, "mc.cutoff: must be > 0", errors);
  require(c.brownian_steps >= 1, "mc.brownian_steps: must be >= 1", errors);
  require(c.grid_n >= 4 && c.grid_n % 2 == 0, "lattice.n: must be even and >= 4", errors);
  require(c.grid_length > 0.0, "lattice.length: must be > 0", errors);
  if (c.dim >= 1 && c.dim <= 3 && c.grid_n >= 4) {
    double sites = 1.0;
    for (int a = 0; a < c.dim; ++a) sites *= c.grid_n;
    require(sites <= Lattice::kMaxSites, "lattice.n: n^dim exceeds the dense limit of 4096 sites", errors);
  }
  require(c.kernel_y_min > 0.0 && c.kernel_y_max >= c.kernel_y_min, "kernel: need 0 < y_min <= y_max", errors);
  require(c.kernel_points >= 1, "kernel.points: must be >= 1", errors);
  require(!c.kernel_times.empty(), "kernel.t: must be nonempty", errors);
  for (double t : c.kernel_times) require(t > 0.0, "kernel.t: entries must be > 0", errors);
  try {
    parse_sampler(c.sampler);
  } catch (const std::exception& e) {
    errors.push_back(std::string("sample.sampler: ") + e.what());
  }
  require(c.sample_paths >= 1, "sample.paths: must be >= 1", errors);
  require(c.sample_slices >= 1, "sample.slices: must be >= 1", errors);
  require(c.sample_cutoff > 0.0, "sample.cutoff: must be > 0", errors);
  require(c.charfn_paths >= 2, "sample.charfn_paths: must be >= 2", errors);
  if (c.command == "verify") {
    const auto names = suite_names();
    require(c.all != !c.suite.empty(), "verify: give exactly one of suite or all", errors);
    require(c.suite.empty() || std::find(names.begin(), names.end(), c.suite) != names.end(),
            "verify.suite: unknown suite '" + c.suite + "'", errors);
  }

  if (errors.empty()) {
    try {
      c.field_spec().validate();
    } catch (const std::exception& e) {
      errors.push_back(std::string("field: ") + e.what());
    }
  }
  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return c;
}

Point RunConfig::point() const { return to_point(x); }

FieldSpec RunConfig::field_spec() const {
  FieldSpec fs = FieldSpec::zero(dim);
  if (field == "constant") {
    fs = fs.with_constant(to_point(field_a));
  } else if (field == "linear") {
    Eigen::MatrixXd M(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) M(i, j) = field_matrix[i][j];
    fs = fs.with_linear(M);
  } else if (field == "constant_field") {
    fs = fs.with_constant_field(field_b);
  } else if (field == "quadratic_axis") {
    fs = fs.with_quadratic_axis(field_component, field_source, field_coef);
  } else if (field == "tanh") {
    fs = fs.with_tanh(field_amp);
  }
  if (potential == "harmonic_capped") fs = fs.with_harmonic_capped(v_omega, v_cap);
  if (potential == "gaussian_well") fs = fs.with_gaussian_well(v_depth, v_width);
  return fs;
}

ProbeFunction RunConfig::probe_function() const {
  const Point c = to_point(probe_center);
  if (probe == "bump") return ProbeFunction::bump(c, probe_radius);
  if (probe == "plane_wave_windowed") return ProbeFunction::plane_wave_windowed(c, to_point(probe_k), probe_width);
  return ProbeFunction::gaussian(c, probe_width);
}

McParams RunConfig::mc_params() const {
  McParams p;
  p.n_paths = paths;
  p.n_slices = slices;
  p.eps_cut = cutoff;
  p.brownian_steps = brownian_steps;
  p.form = parse_action_form(form);
  p.control = control;
  return p;
}

Lattice RunConfig::lattice() const { return Lattice(dim, grid_n, grid_length); }

nlohmann::json RunConfig::to_json() const {
  json j;
  j["command"] = command;
  j["seed"] = seed;
  j["physics"] = {{"dim", dim}, {"mass", mass}, {"t", t}, {"x", x}};
  j["field"] = {{"family", field}, {"amp", field_amp}, {"a", field_a},         {"matrix", field_matrix},
                {"b", field_b},    {"component", field_component}, {"source", field_source}, {"coef", field_coef}};
  j["potential"] = {{"family", potential}, {"omega", v_omega}, {"cap", v_cap}, {"depth", v_depth}, {"width", v_width}};
  j["probe"] = {{"kind", probe}, {"center", probe_center}, {"width", probe_width}, {"radius", probe_radius}, {"k", probe_k}};
  j["mc"] = {{"variant", variant}, {"form", form},     {"paths", paths},       {"slices", slices},
             {"cutoff", cutoff},   {"brownian_steps", brownian_steps}, {"control", control}};
  j["lattice"] = {{"n", grid_n}, {"length", grid_length}};
  j["kernel"] = {{"y_min", kernel_y_min}, {"y_max", kernel_y_max}, {"points", kernel_points}, {"t", kernel_times}};
  j["sample"] = {{"sampler", sampler},   {"paths", sample_paths}, {"slices", sample_slices},       {"cutoff", sample_cutoff},
                 {"check_charfn", check_charfn}, {"xi", charfn_xi}, {"charfn_paths", charfn_paths}};
  j["verify"] = {{"suite", suite}, {"all", all}};
  j["output"] = {{"json", output_json}, {"csv", output_csv}};
  return j;
}

}  // namespace relkac
