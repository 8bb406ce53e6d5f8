#pragma once

// Helpers shared by the verification sources.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>

#include "relkac/types.hpp"
#include "relkac/verify.hpp"

namespace relkac::detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Running maximum that keeps a NaN once seen, so tolerance checks fail on it.
inline double nanmax(double a, double b) { return (std::isnan(a) || std::isnan(b)) ? NAN : std::max(a, b); }

inline nlohmann::json cjson(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

// Running mean and standard error of real or complex samples.
struct RealMoments {
  double n = 0.0, sum = 0.0, sum2 = 0.0;
  void add(double v) {
    n += 1.0;
    sum += v;
    sum2 += v * v;
  }
  void merge(const RealMoments& o) {
    n += o.n;
    sum += o.sum;
    sum2 += o.sum2;
  }
  double mean() const { return sum / n; }
  double se() const {
    const double mu = mean();
    return std::sqrt(std::max(0.0, (sum2 - n * mu * mu) / (n - 1.0)) / n);
  }
};

struct ComplexMoments {
  RealMoments re, im;
  void add(Complex z) {
    re.add(z.real());
    im.add(z.imag());
  }
  void merge(const ComplexMoments& o) {
    re.merge(o.re);
    im.merge(o.im);
  }
  Complex mean() const { return {re.mean(), im.mean()}; }
  double se() const { return std::hypot(re.se(), im.se()); }
};

inline CheckResult start_check(const std::string& id, const std::string& title, double budget = 0.0) {
  CheckResult r;
  r.id = id;
  r.title = title;
  r.budget = budget;
  r.detail = nlohmann::json::object();
  return r;
}

// Seals a check: numeric verdict combined with the runtime budget.
inline CheckResult finish(CheckResult r, const Stopwatch& sw, bool numeric_pass) {
  r.seconds = sw.seconds();
  const bool in_budget = r.budget <= 0.0 || r.seconds <= r.budget;
  r.detail["numeric_pass"] = numeric_pass;
  if (r.budget > 0.0) r.detail["runtime_budget_s"] = r.budget;
  r.pass = numeric_pass && in_budget;
  return r;
}

// Stream index for sub-experiment k of a check; chunk indices stay below 2^20.
inline std::uint64_t stream_of(std::uint64_t k, std::uint64_t chunk) { return (k << 20) + chunk; }

}  // namespace relkac::detail
