// relkac: command-line front end.

#include <deque>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relkac/config.hpp"
#include "relkac/run.hpp"

namespace {

using nlohmann::json;

// Registers flags on a subcommand and records, after parsing, which ones
// were given as a JSON patch over the config file.
class Overrides {
 public:
  explicit Overrides(json& patch) : patch_(patch) {}

  template <class T>
  void add(CLI::App* app, const std::string& flag, const std::string& section, const std::string& key,
           const std::string& help) {
    auto& slot = store<T>();
    CLI::Option* opt = app->add_option(flag, slot, help);
    if constexpr (std::is_same_v<T, std::vector<double>>) opt->delimiter(',');
    setters_.push_back([this, opt, &slot, section, key] {
      if (opt->count() > 0) at(section)[key] = slot;
    });
  }

  void add_flag(CLI::App* app, const std::string& flag, const std::string& section, const std::string& key, bool value,
                const std::string& help) {
    CLI::Option* opt = app->add_flag(flag, help);
    setters_.push_back([this, opt, section, key, value] {
      if (opt->count() > 0) at(section)[key] = value;
    });
  }

  // --grid N,L
  void add_grid(CLI::App* app) {
    auto& slot = store<std::string>();
    CLI::Option* opt = app->add_option("--grid", slot, "lattice points per axis and box length, as N,L");
    setters_.push_back([this, opt, &slot] {
      if (opt->count() == 0) return;
      const auto comma = slot.find(',');
      try {
        if (comma == std::string::npos) throw std::invalid_argument("missing comma");
        std::size_t used = 0;
        const int n = std::stoi(slot.substr(0, comma), &used);
        if (used != comma) throw std::invalid_argument("bad N");
        const std::string ls = slot.substr(comma + 1);
        const double l = std::stod(ls, &used);
        if (used != ls.size()) throw std::invalid_argument("bad L");
        at("lattice")["n"] = n;
        at("lattice")["length"] = l;
      } catch (const std::exception&) {
        throw relkac::ConfigError("--grid: expected N,L such as 256,32");
      }
    });
  }

  void apply() const {
    for (const auto& s : setters_) s();
  }

 private:
  template <class T>
  T& store() {
    if constexpr (std::is_same_v<T, double>) return doubles_.emplace_back();
    else if constexpr (std::is_same_v<T, int>) return ints_.emplace_back();
    else if constexpr (std::is_same_v<T, std::int64_t>) return longs_.emplace_back();
    else if constexpr (std::is_same_v<T, std::uint64_t>) return ulongs_.emplace_back();
    else if constexpr (std::is_same_v<T, std::string>) return strings_.emplace_back();
    else return vectors_.emplace_back();
  }
  json& at(const std::string& section) { return section.empty() ? patch_ : patch_[section]; }

  json& patch_;
  std::deque<double> doubles_;
  std::deque<int> ints_;
  std::deque<std::int64_t> longs_;
  std::deque<std::uint64_t> ulongs_;
  std::deque<std::string> strings_;
  std::deque<std::vector<double>> vectors_;
  std::vector<std::function<void()>> setters_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Magnetic relativistic semigroups: lattice oracle and path-integral estimates"};
  app.require_subcommand(1);
  std::string config_path;
  json patch = json::object();
  Overrides ov(patch);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration (.toml or .json)");
    ov.add<std::uint64_t>(sub, "--seed", "", "seed", "overrides the configured seed");
    ov.add<std::string>(sub, "--json", "output", "json", "write the JSON artifact here instead of stdout");
    ov.add<std::string>(sub, "--csv", "output", "csv", "write the CSV artifact here instead of stdout");
    ov.add<int>(sub, "--dim", "physics", "dim", "spatial dimension (1, 2 or 3)");
    ov.add<double>(sub, "--mass", "physics", "mass", "mass m >= 0");
  };
  auto physics = [&](CLI::App* sub) {
    ov.add<double>(sub, "--t,--time", "physics", "t", "time t > 0");
    ov.add<std::vector<double>>(sub, "--x", "physics", "x", "evaluation point, comma separated");
  };
  auto fields = [&](CLI::App* sub) {
    ov.add<std::string>(sub, "--field", "field", "family", "vector potential family");
    ov.add<std::string>(sub, "--potential", "potential", "family", "scalar potential family");
    ov.add<std::string>(sub, "--probe", "probe", "kind", "initial datum");
    ov.add<std::string>(sub, "--variant", "mc", "variant", "operator variant h1, h2 or h3 (oracle also h0)");
  };
  auto montecarlo = [&](CLI::App* sub) {
    ov.add<std::int64_t>(sub, "--paths", "mc", "paths", "number of paths");
    ov.add<int>(sub, "--slices", "mc", "slices", "time slices of the sliced action");
    ov.add<double>(sub, "--cutoff", "mc", "cutoff", "jump cutoff of the jump action");
    ov.add<std::string>(sub, "--form", "mc", "form", "action form: sliced or jump");
    ov.add<int>(sub, "--brownian-steps", "mc", "brownian_steps", "Brownian refinement for h3");
    ov.add_flag(sub, "--no-control", "mc", "control", false, "skip the control column");
  };

  CLI::App* kernel = app.add_subcommand("kernel", "tabulate the free kernel, Levy density and subordinator density");
  common(kernel);
  ov.add<std::vector<double>>(kernel, "--t", "kernel", "t", "times, comma separated");
  ov.add<double>(kernel, "--y-min", "kernel", "y_min", "smallest |y|");
  ov.add<double>(kernel, "--y-max", "kernel", "y_max", "largest |y|");
  ov.add<int>(kernel, "--points", "kernel", "points", "grid points per time");

  CLI::App* sample = app.add_subcommand("sample", "dump sample paths or the characteristic-function table");
  common(sample);
  physics(sample);
  ov.add<std::string>(sample, "--sampler", "sample", "sampler", "subordinated or jump");
  ov.add<std::int64_t>(sample, "--paths", "sample", "paths", "paths to dump");
  ov.add<int>(sample, "--slices", "sample", "slices", "grid slices per path");
  ov.add<double>(sample, "--cutoff", "sample", "cutoff", "jump cutoff");
  ov.add_flag(sample, "--check-charfn", "sample", "check_charfn", true, "emit the empirical vs exact table");
  ov.add<std::int64_t>(sample, "--charfn-paths", "sample", "charfn_paths", "paths for the table");

  CLI::App* estimate = app.add_subcommand("estimate", "Monte Carlo estimate of the semigroup at a point");
  common(estimate);
  physics(estimate);
  fields(estimate);
  montecarlo(estimate);

  CLI::App* oracle = app.add_subcommand("oracle", "lattice operator diagnostics and semigroup columns");
  common(oracle);
  physics(oracle);
  fields(oracle);
  ov.add_grid(oracle);

  CLI::App* compare = app.add_subcommand("compare", "estimate plus lattice oracle with a verdict");
  common(compare);
  physics(compare);
  fields(compare);
  montecarlo(compare);
  ov.add_grid(compare);

  CLI::App* verify = app.add_subcommand("verify", "run a verification suite or the acceptance criteria");
  common(verify);
  ov.add<std::string>(verify, "--suite", "verify", "suite", "suite name");
  ov.add_flag(verify, "--all", "verify", "all", true, "run the acceptance criteria");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : relkac::kExitConfig;
  }

  std::string command;
  for (CLI::App* sub : {kernel, sample, estimate, oracle, compare, verify})
    if (sub->parsed()) command = sub->get_name();

  return relkac::run_guarded(
      [&] {
        json doc = config_path.empty() ? json::object() : relkac::read_config_file(config_path);
        if (!doc.is_object()) throw relkac::ConfigError("config: top level must be a table/object");
        ov.apply();
        patch["command"] = command;
        doc.merge_patch(patch);
        return relkac::load_config(doc);
      },
      std::cout, std::cerr);
}
