#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tailfuse/config.hpp"
#include "tailfuse/csv.hpp"
#include "tailfuse/simlab.hpp"
#include "tailfuse/svg.hpp"
#include "tailfuse/theory.hpp"

namespace {

using namespace tailfuse;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

std::atomic<bool> g_cancel{false};

void handle_signal(int) { g_cancel.store(true); }

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (...) {
      throw ConfigError(std::string(what) + ": malformed number '" + tok + "'");
    }
  }
  if (out.empty()) throw ConfigError(std::string(what) + ": empty list");
  return out;
}

std::vector<double> read_pvalues(std::istream& in) {
  std::vector<double> p;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::stringstream ss(line);
    std::string tok;
    while (ss >> tok) {
      if (!tok.empty() && tok.front() == '#') break;  // rest of line is comment
      double v = 0.0;
      std::size_t pos = 0;
      try {
        v = std::stod(tok, &pos);
      } catch (...) {
        pos = std::string::npos;
      }
      if (pos != tok.size())
        throw ConfigError("combine: line " + std::to_string(lineno) +
                          ": malformed p-value '" + tok + "'");
      if (!(v >= 0.0 && v <= 1.0))
        throw ConfigError("combine: line " + std::to_string(lineno) +
                          ": p-value " + tok + " outside [0,1]");
      p.push_back(v);
    }
  }
  if (p.empty()) throw ConfigError("combine: no p-values supplied");
  return p;
}

unsigned threads_from_env() {
  const char* env = std::getenv("TAILFUSE_THREADS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1)
    throw ConfigError("TAILFUSE_THREADS must be a positive integer");
  return static_cast<unsigned>(v);
}

int cmd_combine(const std::string& input, const std::string& transform_flag,
                const std::string& weights_flag, std::optional<double> alpha) {
  std::vector<double> p;
  if (input.empty() || input == "-") {
    p = read_pvalues(std::cin);
  } else {
    std::ifstream in(input);
    if (!in) throw ConfigError("combine: cannot open '" + input + "'");
    p = read_pvalues(in);
  }

  const TailTransform f = make_transform(parse_transform_flag(transform_flag));
  WeightVector w = weights_flag.empty()
                       ? WeightVector::uniform(p.size())
                       : WeightVector(parse_double_list(weights_flag, "weights"));
  if (w.size() != p.size())
    throw ConfigError("combine: weight count differs from p-value count");
  if (w.was_rescaled())
    std::cerr << "warning: weights rescaled to sum to n (input deviation "
              << format_sig(w.input_deviation()) << ")\n";

  std::cout << "p_comb " << format_sig(combined_pvalue(f, p, w)) << "\n";
  std::cout << "p_bonf " << format_sig(bonferroni_pvalue(p, w)) << "\n";
  if (alpha) {
    if (!(*alpha > 0.0 && *alpha < 1.0))
      throw ConfigError("combine: alpha must be in (0,1)");
    std::cout << "reject " << (reject(f, p, w, *alpha) ? "true" : "false") << "\n";
  }
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& mode,
              const std::string& out_dir, bool force_svg,
              std::optional<std::uint64_t> seed_override,
              const std::string& transform_flag, std::optional<double> alpha_override,
              const std::string& weights_flag, int verbosity) {
  RunConfig rc = load_run_config(config_path);
  ExperimentConfig& cfg = rc.experiment;

  if (seed_override) cfg.seed = *seed_override;
  if (!transform_flag.empty()) cfg.transforms = {parse_transform_flag(transform_flag)};
  if (alpha_override) {
    if (!(*alpha_override > 0.0 && *alpha_override < 1.0))
      throw ConfigError("sweep: alpha must be in (0,1)");
    cfg.alphas = {*alpha_override};
  }
  if (!weights_flag.empty()) cfg.weights = parse_double_list(weights_flag, "weights");
  cfg.threads = threads_from_env();
  cfg.cancel = &g_cancel;

  const bool power_mode = mode == "power";
  if (power_mode && std::holds_alternative<std::monostate>(cfg.alternative))
    throw ConfigError("sweep: mode=power but the config alternative is null");
  if (!power_mode && !std::holds_alternative<std::monostate>(cfg.alternative))
    throw ConfigError("sweep: mode=null but the config has an alternative");

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path csv_path = std::filesystem::path(out_dir) / rc.csv_name;
  std::ofstream csv(csv_path);
  if (!csv) throw ConfigError("sweep: cannot write '" + csv_path.string() + "'");
  write_csv_header(csv);

  const std::size_t total_cells = cfg.copulas.size();
  const auto on_row = [&](const SimResult& row) {
    write_csv_row(csv, row);
    csv.flush();
    if (row.skipped && verbosity > 0)
      std::cerr << "skipped cell (" << row.transform << ", alpha="
                << format_sig(row.alpha) << "): " << row.skip_reason << "\n";
  };

  std::signal(SIGINT, handle_signal);
  SweepOutcome outcome;
  if (verbosity > 0)
    std::cerr << "sweep: " << total_cells << " copula cells x " << cfg.transforms.size()
              << " transforms x " << cfg.alphas.size() << " alphas, " << cfg.reps
              << " reps\n";
  outcome = power_mode ? run_power_sweep(cfg, on_row) : run_null_sweep(cfg, on_row);
  if (outcome.truncated) write_csv_truncation_marker(csv);
  csv.close();
  if (verbosity > 0) std::cerr << "wrote " << csv_path.string() << "\n";

  if (force_svg && rc.svg_name.empty()) {
    rc.svg_name = std::filesystem::path(rc.csv_name).stem().string() + ".svg";
  }
  if (!rc.svg_name.empty()) {
    const std::filesystem::path svg_path = std::filesystem::path(out_dir) / rc.svg_name;
    std::ofstream svg(svg_path);
    if (!svg) throw ConfigError("sweep: cannot write '" + svg_path.string() + "'");
    write_sweep_chart(svg, outcome.rows, power_mode);
    if (verbosity > 0) std::cerr << "wrote " << svg_path.string() << "\n";
  }

  if (outcome.truncated) {
    std::cerr << "sweep interrupted; partial results flushed\n";
    return kExitRuntime;
  }
  std::cout << csv_path.string() << "\n";
  return kExitOk;
}

WeightVector resolve_weights(const std::string& weights_flag, std::size_t n) {
  if (!weights_flag.empty())
    return WeightVector(parse_double_list(weights_flag, "weights"));
  return WeightVector::uniform(n);
}

int cmd_theory_q_bound(double gamma, std::size_t n, const std::string& weights_flag) {
  const WeightVector w = resolve_weights(weights_flag, n);
  std::cout << "q_bound " << format_sig(q_bound(gamma, w), 9) << "\n";
  return kExitOk;
}

void print_spectral_diagnostics(const SpectralDiagnostics& d) {
  std::cerr << "spectral measure failed validation:\n";
  std::cerr << "  total_mass " << format_sig(d.total_mass, 9) << "\n";
  for (std::size_t i = 0; i < d.coordinate_moments.size(); ++i)
    std::cerr << "  moment[" << i << "] " << format_sig(d.coordinate_moments[i], 9)
              << " (required 1 +- 1e-9)\n";
}

int cmd_theory_q_spectral(double gamma, const std::string& spectral_path,
                          const std::string& weights_flag) {
  const SpectralMeasure h = load_spectral_measure(spectral_path);
  const SpectralDiagnostics d = validate_spectral(h);
  if (!d.moment_ok) {
    print_spectral_diagnostics(d);
    return kExitValidation;
  }
  const WeightVector w = resolve_weights(weights_flag, h.dim());
  std::cout << "q_spectral " << format_sig(q_gamma_spectral(gamma, h, w), 9) << "\n";
  return kExitOk;
}

int cmd_theory_ell(const std::string& spec_text, const std::string& v_text) {
  const std::vector<double> v = parse_double_list(v_text, "v");
  const EllSpec spec = parse_ell_spec(spec_text, v.size());
  std::cout << "ell " << format_sig(ell_eval(spec, v), 9) << "\n";
  return kExitOk;
}

int cmd_theory_cstar(const std::string& spec_text, const std::string& u_text) {
  const std::vector<double> u = parse_double_list(u_text, "u");
  const EllSpec spec = parse_ell_spec(spec_text, u.size());
  std::cout << "cstar " << format_sig(cstar_eval(spec, u), 9) << "\n";
  return kExitOk;
}

int cmd_theory_bonf_ratio(const std::string& spec_text, std::size_t n,
                          const std::string& weights_flag) {
  EllSpec spec = parse_ell_spec(spec_text, n);
  const WeightVector w = resolve_weights(weights_flag, ell_dim(spec));
  std::cout << "bonf_ratio " << format_sig(bonferroni_ratio(spec, w), 9) << "\n";
  return kExitOk;
}

int cmd_theory_convex_order(const std::string& h1_path, const std::string& h2_path) {
  const SpectralMeasure h1 = load_spectral_measure(h1_path);
  const SpectralMeasure h2 = load_spectral_measure(h2_path);
  std::cout << "convex_order " << to_string(convex_order_bivariate(h1, h2)) << "\n";
  return kExitOk;
}

int cmd_theory_validate(const std::string& spectral_path) {
  const SpectralMeasure h = load_spectral_measure(spectral_path);
  const SpectralDiagnostics d = validate_spectral(h);
  std::cout << "total_mass " << format_sig(d.total_mass, 9) << "\n";
  for (std::size_t i = 0; i < d.coordinate_moments.size(); ++i)
    std::cout << "moment[" << i << "] " << format_sig(d.coordinate_moments[i], 9) << "\n";
  std::cout << "moment_ok " << (d.moment_ok ? "true" : "false") << "\n";
  const char* kind = d.kind == SpectralDiagnostics::Kind::independence_type
                         ? "independence-type"
                         : d.kind == SpectralDiagnostics::Kind::comonotone_type
                               ? "comonotone-type"
                               : "mixed";
  std::cout << "classification " << kind << "\n";
  return d.moment_ok ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heavy-tailed p-value combination tests, copula simulation and "
               "asymptotic calculators"};
  app.require_subcommand(1);

  // combine
  auto* combine = app.add_subcommand("combine", "combine p-values from a file or stdin");
  std::string combine_input;
  std::string combine_transform = "pareto:1";
  std::string combine_weights;
  double combine_alpha = -1.0;
  combine->add_option("input", combine_input, "input file of p-values ('-' for stdin)");
  combine->add_option("--transform", combine_transform,
                      "transform spec FAMILY:PARAMS (default pareto:1)");
  combine->add_option("--weights", combine_weights, "comma-separated positive weights");
  combine->add_option("--alpha", combine_alpha, "significance level for a decision");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a Monte Carlo sweep from a JSON config");
  std::string sweep_config;
  std::string sweep_mode;
  std::string sweep_out = ".";
  bool sweep_svg = false;
  std::int64_t sweep_seed = -1;
  std::string sweep_transform;
  double sweep_alpha = -1.0;
  std::string sweep_weights;
  int verbosity = 1;
  sweep->add_option("--config", sweep_config, "JSON config path")->required();
  sweep->add_option("--mode", sweep_mode, "null | power")
      ->required()
      ->check(CLI::IsMember({"null", "power"}));
  sweep->add_option("--out", sweep_out, "output directory (default .)");
  sweep->add_flag("--svg", sweep_svg, "emit an SVG chart");
  sweep->add_option("--seed", sweep_seed, "override the config seed");
  sweep->add_option("--transform", sweep_transform, "override transforms with one spec");
  sweep->add_option("--alpha", sweep_alpha, "override alphas with one level");
  sweep->add_option("--weights", sweep_weights, "override weights");
  sweep->add_option("--verbosity", verbosity, "0 quiet, 1 progress (default 1)");

  // theory
  auto* theory = app.add_subcommand("theory", "closed-form asymptotic calculators");
  theory->require_subcommand(1);
  double th_gamma = 1.0;
  std::uint64_t th_n = 0;
  std::string th_weights;
  std::string th_spec;
  std::string th_vec;
  std::string th_spectral;
  std::string th_h1;
  std::string th_h2;

  auto* qb = theory->add_subcommand("q_bound", "complete-dependence error bound");
  qb->add_option("--gamma", th_gamma, "tail index")->required();
  qb->add_option("--n", th_n, "dimension");
  qb->add_option("--weights", th_weights, "comma-separated weights");

  auto* qs = theory->add_subcommand("q_spectral", "error limit of a spectral measure");
  qs->add_option("--gamma", th_gamma, "tail index")->required();
  qs->add_option("--spectral", th_spectral, "spectral measure JSON file")->required();
  qs->add_option("--weights", th_weights, "comma-separated weights");

  auto* el = theory->add_subcommand("ell", "stable tail dependence function");
  el->add_option("--spec", th_spec, "ell spec")->required();
  el->add_option("--v", th_vec, "comma-separated arguments")->required();

  auto* cs = theory->add_subcommand("cstar", "extreme value copula");
  cs->add_option("--spec", th_spec, "ell spec")->required();
  cs->add_option("--u", th_vec, "comma-separated arguments in (0,1]")->required();

  auto* br = theory->add_subcommand("bonf_ratio", "combination/Bonferroni error ratio");
  br->add_option("--spec", th_spec, "ell spec")->required();
  br->add_option("--n", th_n, "dimension");
  br->add_option("--weights", th_weights, "comma-separated weights");

  auto* co = theory->add_subcommand("convex_order", "bivariate convex-order verdict");
  co->add_option("--h1", th_h1, "first spectral measure JSON")->required();
  co->add_option("--h2", th_h2, "second spectral measure JSON")->required();

  auto* va = theory->add_subcommand("validate", "spectral measure diagnostics");
  va->add_option("--spectral", th_spectral, "spectral measure JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (combine->parsed()) {
      std::optional<double> alpha;
      if (combine->count("--alpha")) alpha = combine_alpha;
      return cmd_combine(combine_input, combine_transform, combine_weights, alpha);
    }
    if (sweep->parsed()) {
      std::optional<std::uint64_t> seed;
      if (sweep->count("--seed")) seed = static_cast<std::uint64_t>(sweep_seed);
      std::optional<double> alpha;
      if (sweep->count("--alpha")) alpha = sweep_alpha;
      return cmd_sweep(sweep_config, sweep_mode, sweep_out, sweep_svg, seed,
                       sweep_transform, alpha, sweep_weights, verbosity);
    }
    if (qb->parsed()) {
      if (th_n == 0 && th_weights.empty())
        throw ConfigError("q_bound: provide --n or --weights");
      return cmd_theory_q_bound(th_gamma, th_n, th_weights);
    }
    if (qs->parsed()) return cmd_theory_q_spectral(th_gamma, th_spectral, th_weights);
    if (el->parsed()) return cmd_theory_ell(th_spec, th_vec);
    if (cs->parsed()) return cmd_theory_cstar(th_spec, th_vec);
    if (br->parsed()) {
      // dimension resolution: --n, else the weight count, else the family
      // tag's own suffix (e.g. logistic:0.5,5)
      std::size_t n = th_n;
      if (n == 0 && !th_weights.empty())
        n = parse_double_list(th_weights, "weights").size();
      return cmd_theory_bonf_ratio(th_spec, n, th_weights);
    }
    if (co->parsed()) return cmd_theory_convex_order(th_h1, th_h2);
    if (va->parsed()) return cmd_theory_validate(th_spectral);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitValidation;
}
