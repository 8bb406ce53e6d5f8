#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace relkac {

struct CheckResult {
  std::string id;     // "C1".."C7" or "<suite>.<check>"
  std::string title;
  bool pass = false;
  double seconds = 0.0;
  double budget = 0.0;  // wall-clock limit in seconds; 0 means none
  nlohmann::json detail;
};

struct VerifyOptions {
  std::uint64_t seed = 20240611;
};

inline constexpr int kCriterionCount = 7;

// Acceptance criterion k in 1..7.
CheckResult acceptance_criterion(int k, const VerifyOptions& opt = {});
std::vector<CheckResult> run_acceptance(const VerifyOptions& opt = {});

// Module suites: specfun, fields, lattice, paths, actions, estimator.
std::vector<std::string> suite_names();
std::vector<CheckResult> run_suite(const std::string& name, const VerifyOptions& opt = {});

nlohmann::json to_json(const CheckResult& r);

// K_nu(tau) from its integral representation by adaptive Gauss-Kronrod.
double bessel_k_by_quadrature(double nu, double tau);

}  // namespace relkac
