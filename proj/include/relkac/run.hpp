#pragma once

#include <functional>
#include <iosfwd>

#include <json.hpp>

#include "relkac/config.hpp"
#include "relkac/estimator.hpp"

namespace relkac {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;        // a verdict came out FAIL
inline constexpr int kExitConfig = 2;      // schema or parameter error
inline constexpr int kExitNumerical = 3;   // numerical failure at run time

// Dispatches on cfg.command. Artifacts go to the configured paths or to out;
// progress and verdict lines go to log. Exceptions propagate.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& log);

// Loads the configuration through load() and runs it, mapping exceptions to
// exit statuses with a diagnostic on log.
int run_guarded(const std::function<RunConfig()>& load, std::ostream& out, std::ostream& log);

nlohmann::json to_json(const EstimateReport& r);

}  // namespace relkac
