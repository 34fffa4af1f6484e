#include "tailfuse/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "tailfuse/distributions.hpp"

namespace tailfuse {

namespace {

std::size_t alt_dim(const AlternativeSpec& alt) {
  if (const auto* a = std::get_if<TypeAAlternative>(&alt)) return a->mu.size();
  if (const auto* b = std::get_if<TypeBAlternative>(&alt)) return b->beta.size();
  return 0;
}

void validate_config(const ExperimentConfig& cfg, bool power_mode) {
  if (cfg.n == 0) throw std::invalid_argument("config: n must be positive");
  if (cfg.copulas.empty()) throw std::invalid_argument("config: copula grid is empty");
  for (const auto& gp : cfg.copulas)
    if (gp.model.dim() != cfg.n)
      throw std::invalid_argument("config: copula dimension differs from n");
  if (cfg.transforms.empty()) throw std::invalid_argument("config: no transforms");
  if (cfg.alphas.empty()) throw std::invalid_argument("config: no significance levels");
  for (double a : cfg.alphas)
    if (!(a > 0.0 && a < 1.0))
      throw std::invalid_argument("config: alpha must be in the open interval (0,1)");
  if (cfg.reps == 0) throw std::invalid_argument("config: reps must be at least 1");
  if (cfg.chunk == 0) throw std::invalid_argument("config: chunk must be at least 1");
  if (!cfg.weights.empty() && cfg.weights.size() != cfg.n)
    throw std::invalid_argument("config: weight dimension differs from n");
  const bool is_null = std::holds_alternative<std::monostate>(cfg.alternative);
  if (power_mode && is_null)
    throw std::invalid_argument("config: power mode requires a Type-A or Type-B alternative");
  if (!power_mode && !is_null)
    throw std::invalid_argument("config: null mode requires the null alternative");
  if (!is_null && alt_dim(cfg.alternative) != cfg.n)
    throw std::invalid_argument("config: alternative dimension differs from n");
}

struct CellPlan {
  std::vector<TailTransform> transforms;
  // Rejection thresholds indexed [transform][alpha]; NaN marks a degenerate
  // cell (alpha / n^(1-gamma) >= 1).
  std::vector<std::vector<double>> thresholds;
  std::vector<std::vector<std::string>> skip_reasons;
};

CellPlan plan_cell(const ExperimentConfig& cfg) {
  CellPlan plan;
  for (const auto& ts : cfg.transforms) plan.transforms.emplace_back(ts);
  plan.thresholds.resize(plan.transforms.size());
  plan.skip_reasons.resize(plan.transforms.size());
  for (std::size_t t = 0; t < plan.transforms.size(); ++t) {
    plan.thresholds[t].resize(cfg.alphas.size());
    plan.skip_reasons[t].resize(cfg.alphas.size());
    for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
      try {
        plan.thresholds[t][a] = reject_threshold(plan.transforms[t], cfg.n, cfg.alphas[a]);
      } catch (const std::domain_error& e) {
        plan.thresholds[t][a] = std::numeric_limits<double>::quiet_NaN();
        plan.skip_reasons[t][a] = e.what();
      }
    }
  }
  return plan;
}

struct ChunkCounts {
  std::uint64_t reps = 0;
  std::vector<std::uint64_t> rej;   // transform-major, alpha-minor
  std::vector<std::uint64_t> bonf;  // per alpha
};

class WorkerPool {
 public:
  // Runs fn(k) for k in [0, count) across `threads` workers; rethrows the
  // first exception after joining.
  static void run(std::uint64_t count, unsigned threads,
                  const std::function<void(std::uint64_t)>& fn) {
    if (threads <= 1 || count <= 1) {
      for (std::uint64_t k = 0; k < count; ++k) fn(k);
      return;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto body = [&] {
      for (;;) {
        const std::uint64_t k = next.fetch_add(1);
        if (k >= count) return;
        try {
          fn(k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!err) err = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    const unsigned nworkers = static_cast<unsigned>(
        std::min<std::uint64_t>(threads, count));
    pool.reserve(nworkers);
    for (unsigned w = 0; w < nworkers; ++w) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
  }
};

SweepOutcome run_sweep(const ExperimentConfig& cfg, bool power_mode,
                       const std::function<void(const SimResult&)>& on_row) {
  validate_config(cfg, power_mode);
  const std::size_t n = cfg.n;
  const WeightVector weights =
      cfg.weights.empty() ? WeightVector::uniform(n) : WeightVector(cfg.weights);
  const CellPlan plan = plan_cell(cfg);
  const std::size_t nt = plan.transforms.size();
  const std::size_t na = cfg.alphas.size();

  unsigned threads = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
  if (threads == 0) threads = 1;

  SweepOutcome outcome;
  for (std::size_t ci = 0; ci < cfg.copulas.size(); ++ci) {
    if (cfg.cancel && cfg.cancel->load()) {
      outcome.truncated = true;
      break;
    }
    const CopulaGridPoint& gp = cfg.copulas[ci];
    const std::uint64_t nchunks = (cfg.reps + cfg.chunk - 1) / cfg.chunk;
    std::vector<ChunkCounts> counts(nchunks);
    const std::uint64_t cell_key = derive_key(cfg.seed, ci);

    WorkerPool::run(nchunks, threads, [&](std::uint64_t k) {
      if (cfg.cancel && cfg.cancel->load()) return;
      ChunkCounts local;
      local.rej.assign(nt * na, 0);
      local.bonf.assign(na, 0);
      const std::uint64_t lo = k * cfg.chunk;
      const std::uint64_t hi = std::min(cfg.reps, lo + cfg.chunk);
      RandomStream rng = seed_stream(cell_key, k);
      CopulaWorkspace ws;
      std::vector<double> p(n);
      for (std::uint64_t r = lo; r < hi; ++r) {
        sample_null_pvalues(gp.model, rng, ws, p);
        gen_alternative(p, cfg.alternative, p);
        for (std::size_t t = 0; t < nt; ++t) {
          double sum = 0.0;
          for (std::size_t i = 0; i < n; ++i)
            sum += transform_pvalue(plan.transforms[t], p[i], weights[i]);
          const double xbar = sum / static_cast<double>(n);
          for (std::size_t a = 0; a < na; ++a) {
            const double thr = plan.thresholds[t][a];
            if (!std::isnan(thr) && xbar > thr) ++local.rej[t * na + a];
          }
        }
        if (cfg.include_bonferroni) {
          double m = std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < n; ++i) m = std::min(m, p[i] / weights[i]);
          const double pb = static_cast<double>(n) * m;
          for (std::size_t a = 0; a < na; ++a)
            if (pb <= cfg.alphas[a]) ++local.bonf[a];
        }
        ++local.reps;
      }
      counts[k] = std::move(local);
    });

    // A cancellation mid-cell leaves the cell incomplete; drop it rather than
    // report counts that no seed could reproduce.
    if (cfg.cancel && cfg.cancel->load()) {
      outcome.truncated = true;
      break;
    }

    // Replication ledger: merged counts must cover every replication exactly
    // once.
    ChunkCounts total;
    total.rej.assign(nt * na, 0);
    total.bonf.assign(na, 0);
    for (const auto& c : counts) {
      total.reps += c.reps;
      for (std::size_t i = 0; i < total.rej.size(); ++i) total.rej[i] += c.rej[i];
      for (std::size_t a = 0; a < na; ++a) total.bonf[a] += c.bonf[a];
    }
    if (total.reps != cfg.reps)
      throw std::logic_error("run_sweep: replication ledger mismatch");

    for (std::size_t t = 0; t < nt; ++t) {
      for (std::size_t a = 0; a < na; ++a) {
        SimResult row;
        row.experiment = power_mode ? "power" : "null";
        row.copula = gp.model.name();
        row.param = gp.model.dependence_param();
        row.tau = gp.tau;
        row.n = n;
        row.transform = plan.transforms[t].name();
        row.gamma = plan.transforms[t].tail_index();
        row.alpha = cfg.alphas[a];
        row.reps = cfg.reps;
        row.seed = cfg.seed;
        if (std::isnan(plan.thresholds[t][a])) {
          row.skipped = true;
          row.skip_reason = plan.skip_reasons[t][a];
          row.estimate = std::numeric_limits<double>::quiet_NaN();
          row.ci_lo = row.ci_hi = row.ratio = row.estimate;
        } else {
          row.rejections = total.rej[t * na + a];
          row.bonf_rejections = total.bonf[a];
          const Interval ci95 = wilson_ci(row.rejections, row.reps, 0.95);
          const double rate = static_cast<double>(row.rejections) /
                              static_cast<double>(row.reps);
          if (power_mode) {
            row.estimate = rate;
            row.ci_lo = ci95.lo;
            row.ci_hi = ci95.hi;
          } else {
            row.estimate = rate / row.alpha;
            row.ci_lo = ci95.lo / row.alpha;
            row.ci_hi = ci95.hi / row.alpha;
          }
          row.ratio = row.bonf_rejections > 0
                          ? static_cast<double>(row.rejections) /
                                static_cast<double>(row.bonf_rejections)
                          : std::numeric_limits<double>::infinity();
        }
        if (on_row) on_row(row);
        outcome.rows.push_back(std::move(row));
      }
    }
  }
  return outcome;
}

}  // namespace

AlternativeSpec make_type_a(std::size_t n, double mu, SignalLayout layout) {
  if (!(mu >= 0.0)) throw std::domain_error("make_type_a: mu must be non-negative");
  TypeAAlternative alt;
  alt.mu.assign(n, 0.0);
  const std::size_t signals = layout == SignalLayout::dense ? n : std::min<std::size_t>(2, n);
  for (std::size_t i = 0; i < signals; ++i) alt.mu[i] = mu;
  return alt;
}

AlternativeSpec make_type_b(std::size_t n, double beta_s, SignalLayout layout,
                            double beta_w) {
  if (!(beta_s >= 1.0) || !(beta_w >= 1.0))
    throw std::domain_error("make_type_b: beta exponents must be >= 1");
  TypeBAlternative alt;
  if (layout == SignalLayout::dense) {
    alt.beta.assign(n, beta_s);
  } else {
    alt.beta.assign(n, beta_w);
    for (std::size_t i = 0; i < std::min<std::size_t>(2, n); ++i) alt.beta[i] = beta_s;
  }
  return alt;
}

void gen_alternative(std::span<const double> p_null, const AlternativeSpec& alt,
                     std::span<double> out) {
  if (out.size() != p_null.size())
    throw std::invalid_argument("gen_alternative: dimension mismatch");
  if (std::holds_alternative<std::monostate>(alt)) {
    if (out.data() != p_null.data())
      std::copy(p_null.begin(), p_null.end(), out.begin());
    return;
  }
  if (const auto* a = std::get_if<TypeAAlternative>(&alt)) {
    if (a->mu.size() != p_null.size())
      throw std::invalid_argument("gen_alternative: mu dimension mismatch");
    for (std::size_t i = 0; i < p_null.size(); ++i) {
      if (a->mu[i] == 0.0) {
        out[i] = p_null[i];
        continue;
      }
      // T = qt(1 - P~) written through the survival side for stability.
      const double pt = p_null[i];
      const double t = pt <= 0.5 ? t_quantile_from_sf(pt, a->nu)
                                 : -t_quantile_from_sf(1.0 - pt, a->nu);
      out[i] = t_sf(t + a->mu[i], a->nu);
    }
    return;
  }
  const auto& b = std::get<TypeBAlternative>(alt);
  if (b.beta.size() != p_null.size())
    throw std::invalid_argument("gen_alternative: beta dimension mismatch");
  for (std::size_t i = 0; i < p_null.size(); ++i)
    out[i] = b.beta[i] == 1.0 ? p_null[i] : std::pow(p_null[i], b.beta[i]);
}

Interval wilson_ci(std::uint64_t successes, std::uint64_t trials, double level) {
  if (trials == 0) throw std::invalid_argument("wilson_ci: trials must be at least 1");
  if (successes > trials)
    throw std::invalid_argument("wilson_ci: successes exceed trials");
  if (!(level > 0.0 && level < 1.0))
    throw std::domain_error("wilson_ci: level must be in (0,1)");
  const double z = norm_quantile(0.5 + 0.5 * level);
  const double m = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / m;
  const double z2m = z * z / m;
  const double denom = 1.0 + z2m;
  const double center = (phat + 0.5 * z2m) / denom;
  const double half =
      z / denom * std::sqrt(phat * (1.0 - phat) / m + 0.25 * z2m / m);
  Interval iv{center - half, center + half};
  iv.lo = std::max(0.0, iv.lo);
  iv.hi = std::min(1.0, iv.hi);
  return iv;
}

SweepOutcome run_null_sweep(const ExperimentConfig& cfg,
                            const std::function<void(const SimResult&)>& on_row) {
  return run_sweep(cfg, false, on_row);
}

SweepOutcome run_power_sweep(const ExperimentConfig& cfg,
                             const std::function<void(const SimResult&)>& on_row) {
  return run_sweep(cfg, true, on_row);
}

double calibrate_signal(const ExperimentConfig& cell, const CalibrationSpec& spec) {
  if (cell.copulas.size() != 1)
    throw std::invalid_argument("calibrate_signal: config must hold exactly one grid point");
  if (!(spec.target_power > 0.0 && spec.target_power < 1.0))
    throw std::domain_error("calibrate_signal: target power must be in (0,1)");

  ExperimentConfig pilot = cell;
  pilot.transforms = {spec.transform};
  pilot.alphas = {spec.alpha};
  pilot.reps = spec.pilot_reps;
  pilot.include_bonferroni = false;

  const auto power_at = [&](double level) {
    pilot.alternative = spec.type_a
                            ? make_type_a(pilot.n, level, spec.layout)
                            : make_type_b(pilot.n, level, spec.layout, spec.beta_w);
    const SweepOutcome out = run_power_sweep(pilot);
    return out.rows.front().estimate;
  };

  double lo = spec.type_a ? 0.0 : 1.0;
  double hi = spec.type_a ? 1.0 : 2.0;
  int guard = 0;
  while (power_at(hi) < spec.target_power) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 12)
      throw std::runtime_error("calibrate_signal: target power unreachable");
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 40; ++it) {
    mid = 0.5 * (lo + hi);
    const double pw = power_at(mid);
    if (std::fabs(pw - spec.target_power) <= spec.tol) return mid;
    if (pw < spec.target_power)
      lo = mid;
    else
      hi = mid;
  }
  return mid;
}

}  // namespace tailfuse
