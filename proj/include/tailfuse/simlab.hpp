#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tailfuse/copulas.hpp"
#include "tailfuse/rng.hpp"
#include "tailfuse/transforms.hpp"

namespace tailfuse {

// Alternatives of the two parametric families; monostate is the global null.
struct TypeAAlternative {
  std::vector<double> mu;  // componentwise location shifts, >= 0
  double nu = 5.0;
};
struct TypeBAlternative {
  std::vector<double> beta;  // componentwise exponents, >= 1
};
using AlternativeSpec = std::variant<std::monostate, TypeAAlternative, TypeBAlternative>;

enum class SignalLayout { dense, sparse };

AlternativeSpec make_type_a(std::size_t n, double mu, SignalLayout layout);
AlternativeSpec make_type_b(std::size_t n, double beta_s, SignalLayout layout,
                            double beta_w = 1.5);

// Applies the alternative map to a null draw. TypeA: P_i = sf_t5(qt_t5(1 -
// P~_i) + mu_i); TypeB: P_i = P~_i^beta_i. out may alias p_null.
void gen_alternative(std::span<const double> p_null, const AlternativeSpec& alt,
                     std::span<double> out);

// One copula grid point; tau is carried for reporting.
struct CopulaGridPoint {
  CopulaModel model;
  double tau = 0.0;
};

struct ExperimentConfig {
  std::size_t n = 0;
  std::vector<CopulaGridPoint> copulas;
  std::vector<TransformSpec> transforms;
  std::vector<double> weights;  // empty -> uniform
  std::vector<double> alphas;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  std::uint64_t chunk = 65536;
  AlternativeSpec alternative;
  bool include_bonferroni = true;
  unsigned threads = 0;  // 0 -> hardware parallelism
  const std::atomic<bool>* cancel = nullptr;
};

struct SimResult {
  std::string experiment;  // "null" | "power"
  std::string copula;
  double param = 0.0;
  double tau = 0.0;
  std::size_t n = 0;
  std::string transform;
  double gamma = 0.0;
  double alpha = 0.0;
  std::uint64_t reps = 0;
  std::uint64_t rejections = 0;
  double estimate = 0.0;  // scaled type-I error (null) or power
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::uint64_t bonf_rejections = 0;
  double ratio = 0.0;  // rejections / bonf_rejections
  std::uint64_t seed = 0;
  bool skipped = false;
  std::string skip_reason;
};

struct SweepOutcome {
  std::vector<SimResult> rows;
  bool truncated = false;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Wilson score interval for a binomial proportion.
Interval wilson_ci(std::uint64_t successes, std::uint64_t trials, double level);

// Type-I error sweep under the global null. Deterministic given (config,
// seed, chunk); on_row is invoked from the calling thread as cells complete.
SweepOutcome run_null_sweep(const ExperimentConfig& cfg,
                            const std::function<void(const SimResult&)>& on_row = {});

// Power sweep under a Type-A or Type-B alternative; also reports the weighted
// Bonferroni counterpart on the same draws.
SweepOutcome run_power_sweep(const ExperimentConfig& cfg,
                             const std::function<void(const SimResult&)>& on_row = {});

struct CalibrationSpec {
  bool type_a = true;
  SignalLayout layout = SignalLayout::dense;
  double beta_w = 1.5;
  TransformSpec transform;  // the test whose power is pinned
  double alpha = 0.005;
  double target_power = 0.5;
  double tol = 0.01;
  std::uint64_t pilot_reps = 100000;
};

// Bisects the signal level (mu for Type-A, beta_s for Type-B) until the pilot
// power of the target test reaches target_power within tol. The cell config
// must contain exactly one copula grid point.
double calibrate_signal(const ExperimentConfig& cell, const CalibrationSpec& spec);

}  // namespace tailfuse
