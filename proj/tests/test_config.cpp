#include <doctest.h>

#include <sstream>
#include <string>

#include "relkac/config.hpp"
#include "relkac/run.hpp"

using namespace relkac;
using nlohmann::json;

TEST_CASE("schema errors are collected into one ConfigError") {
  try {
    load_config(read_config_file(std::string(TEST_DATA_DIR) + "/bad.toml"));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bogus") != std::string::npos);
    CHECK(msg.find("swirl") != std::string::npos);
    CHECK(msg.find("mass") != std::string::npos);
  }
  CHECK_THROWS_AS(load_config(json::array()), ConfigError);
  CHECK_THROWS_AS(load_config(json{{"command", "dance"}}), ConfigError);
  CHECK_THROWS_AS(load_config(json{{"command", "verify"}}), ConfigError);
  CHECK_THROWS_AS(load_config(json{{"mc", {{"variant", "h2"}, {"form", "jump"}}}}), ConfigError);
}

TEST_CASE("TOML file loads with defaults filled in") {
  const RunConfig c = load_config(read_config_file(std::string(TEST_DATA_DIR) + "/tanh_h2.toml"));
  CHECK(c.command == "estimate");
  CHECK(c.seed == 7);
  CHECK(c.dim == 1);
  CHECK(c.field == "tanh");
  CHECK(c.variant == "h2");
  CHECK(c.paths == 8192);
  CHECK(c.slices == 32);
  CHECK(c.cutoff == 0.1);
  // Round trip through the JSON form.
  const RunConfig d = load_config(c.to_json());
  CHECK(d.to_json() == c.to_json());
}

TEST_CASE("kernel table carries the config header") {
  const RunConfig c = load_config(json{{"command", "kernel"}, {"kernel", {{"points", 5}, {"t", {0.5}}}}});
  std::ostringstream out, log;
  CHECK(run(c, out, log) == kExitOk);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# config: {", 0) == 0);
  std::getline(in, line);
  CHECK(line == "y,t,k0,n,density");
  int rows = 0;
  while (std::getline(in, line)) rows += !line.empty();
  CHECK(rows == 5);
}

TEST_CASE("run_guarded maps failures to exit codes") {
  std::ostringstream out, log;
  CHECK(run_guarded([] { return load_config(json{{"physics", {{"mass", -2.0}}}}); }, out, log) == kExitConfig);
  CHECK(log.str().find("mass") != std::string::npos);
  CHECK(run_guarded([]() -> RunConfig { throw NumericalFailure("boom"); }, out, log) == kExitNumerical);
}
