#pragma once

#include <stdexcept>
#include <string>

#include "tailfuse/simlab.hpp"
#include "tailfuse/theory.hpp"

namespace tailfuse {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SweepMode { null_mode, power_mode };

struct RunConfig {
  ExperimentConfig experiment;
  std::string csv_name;  // relative to the output directory
  std::string svg_name;  // empty when no chart was requested
  int verbosity = 1;
};

// Parses and validates the JSON sweep configuration; errors carry the
// offending field path.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text);

// Transform flag grammar: pareto:G | cauchy | trunc_cauchy[:Q0] |
// trunc_t:NU[,Q0].
TransformSpec parse_transform_flag(const std::string& text);

// Ell spec grammar: independence[:N] | comonotone[:N] | logistic:ALPHA[,N] |
// gumbel:THETA,A,B | galambos:THETA,A,B | spectral:FILE. When N is omitted it
// is taken from fallback_n (0 means required).
EllSpec parse_ell_spec(const std::string& text, std::size_t fallback_n);

// Spectral measure JSON: {"atoms": [[...], ...], "masses": [...]}.
SpectralMeasure load_spectral_measure(const std::string& path);

}  // namespace tailfuse
