#include "tailfuse/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tailfuse/copulas.hpp"

namespace tailfuse {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

const json& member(const json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing required field");
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::uint64_t as_count(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    fail(path, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

std::vector<double> as_number_list(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

CopulaGridPoint grid_point_from_tau(const std::string& family, double tau,
                                    double nu, std::size_t n,
                                    const std::string& path) {
  if (!(tau >= 0.0 && tau <= 1.0)) fail(path, "tau must be in [0,1]");
  // Degenerate corners map to the exact models.
  if (tau == 0.0) return {CopulaModel::independence(n), 0.0};
  if (tau == 1.0) return {CopulaModel::comonotone(n), 1.0};
  if (family == "clayton") {
    const double theta = dependence_from_tau(TauFamily::clayton, tau);
    return {CopulaModel::clayton(theta, n), tau};
  }
  const double rho = dependence_from_tau(TauFamily::student_t, tau);
  auto sigma = CorrelationMatrix::equicorrelated(n, rho);
  if (family == "gaussian") return {CopulaModel::gaussian(std::move(sigma)), tau};
  return {CopulaModel::student_t(nu, std::move(sigma)), tau};
}

std::vector<CopulaGridPoint> parse_copula_grid(const json& j, std::size_t n,
                                               const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::string family = member(j, "family", path).get<std::string>();
  if (family == "independence") return {{CopulaModel::independence(n), 0.0}};
  if (family == "comonotone") return {{CopulaModel::comonotone(n), 1.0}};
  if (family != "clayton" && family != "student_t" && family != "gaussian")
    fail(path + ".family", "unknown copula family '" + family + "'");

  double nu = 5.0;
  if (j.contains("nu")) {
    nu = as_number(j["nu"], path + ".nu");
    if (!(nu > 0.0)) fail(path + ".nu", "must be positive");
  }

  std::vector<CopulaGridPoint> grid;
  if (j.contains("tau_grid")) {
    const auto taus = as_number_list(j["tau_grid"], path + ".tau_grid");
    for (std::size_t i = 0; i < taus.size(); ++i)
      grid.push_back(grid_point_from_tau(family, taus[i], nu, n,
                                         path + ".tau_grid[" + std::to_string(i) + "]"));
  } else if (j.contains("params")) {
    const auto params = as_number_list(j["params"], path + ".params");
    for (std::size_t i = 0; i < params.size(); ++i) {
      const std::string p = path + ".params[" + std::to_string(i) + "]";
      if (family == "clayton") {
        const double theta = params[i];
        if (!(theta > 0.0)) fail(p, "clayton theta must be positive");
        grid.push_back({CopulaModel::clayton(theta, n), theta / (2.0 + theta)});
      } else {
        const double rho = params[i];
        if (!(rho > -1.0 && rho < 1.0)) fail(p, "rho must be in (-1,1)");
        auto sigma = CorrelationMatrix::equicorrelated(n, rho);
        const double tau = 2.0 / kPi * std::asin(rho);
        grid.push_back({family == "gaussian"
                            ? CopulaModel::gaussian(std::move(sigma))
                            : CopulaModel::student_t(nu, std::move(sigma)),
                        tau});
      }
    }
  } else {
    fail(path, "needs either tau_grid or params");
  }
  return grid;
}

TransformSpec parse_transform_json(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::string family = member(j, "family", path).get<std::string>();
  double trunc_q = 0.001;
  if (j.contains("trunc_q")) {
    trunc_q = as_number(j["trunc_q"], path + ".trunc_q");
    if (!(trunc_q >= 0.0 && trunc_q < 1.0)) fail(path + ".trunc_q", "must be in [0,1)");
  }
  if (family == "pareto") {
    const double gamma = as_number(member(j, "gamma", path), path + ".gamma");
    if (!(gamma > 0.0)) fail(path + ".gamma", "must be positive");
    return TransformSpec::pareto(gamma);
  }
  if (family == "cauchy") return TransformSpec::cauchy();
  if (family == "trunc_cauchy") return TransformSpec::truncated_cauchy(trunc_q);
  if (family == "trunc_t") {
    const double nu = as_number(member(j, "nu", path), path + ".nu");
    if (!(nu > 0.0)) fail(path + ".nu", "must be positive");
    return TransformSpec::truncated_t(nu, trunc_q);
  }
  fail(path + ".family", "unknown transform family '" + family + "'");
}

AlternativeSpec parse_alternative(const json& j, std::size_t n, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::string type = member(j, "type", path).get<std::string>();
  if (type == "null") return std::monostate{};

  SignalLayout layout = SignalLayout::dense;
  if (j.contains("layout")) {
    const std::string l = j["layout"].get<std::string>();
    if (l == "dense")
      layout = SignalLayout::dense;
    else if (l == "sparse")
      layout = SignalLayout::sparse;
    else
      fail(path + ".layout", "must be 'dense' or 'sparse'");
  }

  if (type == "type_a") {
    const json& mu = member(j, "mu", path);
    if (mu.is_array()) {
      TypeAAlternative alt;
      alt.mu = as_number_list(mu, path + ".mu");
      if (alt.mu.size() != n) fail(path + ".mu", "dimension differs from n");
      for (double m : alt.mu)
        if (!(m >= 0.0)) fail(path + ".mu", "entries must be non-negative");
      return alt;
    }
    const double level = as_number(mu, path + ".mu");
    if (!(level >= 0.0)) fail(path + ".mu", "must be non-negative");
    return make_type_a(n, level, layout);
  }
  if (type == "type_b") {
    double beta_w = 1.5;
    if (j.contains("beta_w")) {
      beta_w = as_number(j["beta_w"], path + ".beta_w");
      if (!(beta_w >= 1.0)) fail(path + ".beta_w", "must be >= 1");
    }
    const json& beta = member(j, "beta", path);
    if (beta.is_array()) {
      TypeBAlternative alt;
      alt.beta = as_number_list(beta, path + ".beta");
      if (alt.beta.size() != n) fail(path + ".beta", "dimension differs from n");
      for (double b : alt.beta)
        if (!(b >= 1.0)) fail(path + ".beta", "entries must be >= 1");
      return alt;
    }
    const double level = as_number(beta, path + ".beta");
    if (!(level >= 1.0)) fail(path + ".beta", "must be >= 1");
    return make_type_b(n, level, layout, beta_w);
  }
  fail(path + ".type", "must be 'null', 'type_a' or 'type_b'");
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");

  RunConfig rc;
  ExperimentConfig& cfg = rc.experiment;

  const std::uint64_t n = as_count(member(j, "n", "config"), "config.n");
  if (n == 0) fail("config.n", "must be at least 1");
  cfg.n = static_cast<std::size_t>(n);

  cfg.copulas = parse_copula_grid(member(j, "copula", "config"), cfg.n, "config.copula");

  const json& transforms = member(j, "transforms", "config");
  if (!transforms.is_array() || transforms.empty())
    fail("config.transforms", "expected a non-empty array");
  for (std::size_t i = 0; i < transforms.size(); ++i)
    cfg.transforms.push_back(parse_transform_json(
        transforms[i], "config.transforms[" + std::to_string(i) + "]"));

  if (j.contains("weights")) {
    cfg.weights = as_number_list(j["weights"], "config.weights");
    if (cfg.weights.size() != cfg.n) fail("config.weights", "dimension differs from n");
    for (double w : cfg.weights)
      if (!(w > 0.0)) fail("config.weights", "entries must be positive");
  }

  cfg.alphas = as_number_list(member(j, "alphas", "config"), "config.alphas");
  for (double a : cfg.alphas)
    if (!(a > 0.0 && a < 1.0)) fail("config.alphas", "entries must be in (0,1)");

  cfg.reps = as_count(member(j, "reps", "config"), "config.reps");
  if (cfg.reps == 0) fail("config.reps", "must be at least 1");
  cfg.seed = as_count(member(j, "seed", "config"), "config.seed");
  if (j.contains("chunk")) {
    cfg.chunk = as_count(j["chunk"], "config.chunk");
    if (cfg.chunk == 0) fail("config.chunk", "must be at least 1");
  }

  cfg.alternative = j.contains("alternative")
                        ? parse_alternative(j["alternative"], cfg.n, "config.alternative")
                        : AlternativeSpec{std::monostate{}};

  rc.csv_name = "sweep.csv";
  if (j.contains("outputs")) {
    const json& out = j["outputs"];
    if (!out.is_object()) fail("config.outputs", "expected an object");
    if (out.contains("csv")) rc.csv_name = out["csv"].get<std::string>();
    if (out.contains("svg")) rc.svg_name = out["svg"].get<std::string>();
  }
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

TransformSpec parse_transform_flag(const std::string& text) {
  const auto colon = text.find(':');
  const std::string family = text.substr(0, colon);
  std::vector<double> params;
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        params.push_back(std::stod(tok));
      } catch (...) {
        throw ConfigError("transform: malformed parameter '" + tok + "'");
      }
    }
  }
  try {
    if (family == "pareto") {
      if (params.size() != 1) throw ConfigError("transform: pareto needs pareto:GAMMA");
      return TransformSpec::pareto(params[0]);
    }
    if (family == "cauchy") {
      if (!params.empty()) throw ConfigError("transform: cauchy takes no parameters");
      return TransformSpec::cauchy();
    }
    if (family == "trunc_cauchy") {
      if (params.size() > 1)
        throw ConfigError("transform: trunc_cauchy takes trunc_cauchy[:Q0]");
      return TransformSpec::truncated_cauchy(params.empty() ? 0.001 : params[0]);
    }
    if (family == "trunc_t") {
      if (params.empty() || params.size() > 2)
        throw ConfigError("transform: trunc_t takes trunc_t:NU[,Q0]");
      return TransformSpec::truncated_t(params[0], params.size() == 2 ? params[1] : 0.001);
    }
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("transform: ") + e.what());
  }
  throw ConfigError("transform: unknown family '" + family + "'");
}

SpectralMeasure load_spectral_measure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("spectral: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("spectral: invalid JSON: ") + e.what());
  }
  SpectralMeasure h;
  const json& atoms = member(j, "atoms", "spectral");
  if (!atoms.is_array() || atoms.empty()) fail("spectral.atoms", "expected a non-empty array");
  for (std::size_t k = 0; k < atoms.size(); ++k)
    h.atoms.push_back(as_number_list(atoms[k], "spectral.atoms[" + std::to_string(k) + "]"));
  h.masses = as_number_list(member(j, "masses", "spectral"), "spectral.masses");
  if (h.masses.size() != h.atoms.size())
    fail("spectral.masses", "length differs from the atom count");
  return h;
}

EllSpec parse_ell_spec(const std::string& text, std::size_t fallback_n) {
  const auto colon = text.find(':');
  const std::string family = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);

  const auto parse_params = [&](std::size_t lo, std::size_t hi) {
    std::vector<double> params;
    if (!rest.empty()) {
      std::stringstream ss(rest);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        try {
          params.push_back(std::stod(tok));
        } catch (...) {
          throw ConfigError("spec: malformed parameter '" + tok + "'");
        }
      }
    }
    if (params.size() < lo || params.size() > hi)
      throw ConfigError("spec: wrong parameter count for '" + family + "'");
    return params;
  };

  const auto need_n = [&](double given) -> std::size_t {
    if (given > 0.0) return static_cast<std::size_t>(given);
    if (fallback_n > 0) return fallback_n;
    throw ConfigError("spec: dimension required for '" + family + "'");
  };

  if (family == "independence") {
    const auto p = parse_params(0, 1);
    return IndependenceEll{need_n(p.empty() ? 0.0 : p[0])};
  }
  if (family == "comonotone") {
    const auto p = parse_params(0, 1);
    return ComonotoneEll{need_n(p.empty() ? 0.0 : p[0])};
  }
  if (family == "logistic") {
    const auto p = parse_params(1, 2);
    return LogisticEll{p[0], need_n(p.size() == 2 ? p[1] : 0.0)};
  }
  if (family == "gumbel") {
    const auto p = parse_params(3, 3);
    return GumbelBivEll{p[0], p[1], p[2]};
  }
  if (family == "galambos") {
    const auto p = parse_params(3, 3);
    return GalambosBivEll{p[0], p[1], p[2]};
  }
  if (family == "spectral") {
    if (rest.empty()) throw ConfigError("spec: spectral needs spectral:FILE");
    return load_spectral_measure(rest);
  }
  throw ConfigError("spec: unknown family '" + family + "'");
}

}  // namespace tailfuse
