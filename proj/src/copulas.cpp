#include "tailfuse/copulas.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tailfuse/distributions.hpp"

namespace tailfuse {

namespace {

constexpr double kPi = 3.14159265358979323846;

double softplus(double t) { return t > 36.0 ? t : std::log1p(std::exp(t)); }

// z = L xi for the packed row-major lower-triangular factor.
void apply_chol(const std::vector<double>& l, std::size_t n,
                const std::vector<double>& xi, std::vector<double>& z) {
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    const double* row = l.data() + i * n;
    for (std::size_t k = 0; k <= i; ++k) s += row[k] * xi[k];
    z[i] = s;
  }
}

std::uint64_t merge_count(std::vector<double>& v, std::vector<double>& buf,
                          std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t inv = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
  std::size_t i = lo;
  std::size_t j = mid;
  std::size_t k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      buf[k++] = v[j++];
      inv += mid - i;
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
  return inv;
}

}  // namespace

CorrelationMatrix::CorrelationMatrix(std::vector<std::vector<double>> entries)
    : n_(entries.size()) {
  if (n_ == 0) throw std::invalid_argument("CorrelationMatrix: empty matrix");
  a_.assign(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    if (entries[i].size() != n_)
      throw std::invalid_argument("CorrelationMatrix: matrix is not square");
    for (std::size_t j = 0; j < n_; ++j) a_[i * n_ + j] = entries[i][j];
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (std::fabs(a_[i * n_ + i] - 1.0) > 1e-12)
      throw std::invalid_argument("CorrelationMatrix: diagonal entries must be 1");
    for (std::size_t j = 0; j < i; ++j)
      if (std::fabs(a_[i * n_ + j] - a_[j * n_ + i]) > 1e-12)
        throw std::invalid_argument("CorrelationMatrix: matrix is not symmetric");
  }
  // Cholesky factorization, failing pivot reported by index.
  l_.assign(n_ * n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    double d = a_[j * n_ + j];
    for (std::size_t k = 0; k < j; ++k) d -= l_[j * n_ + k] * l_[j * n_ + k];
    if (!(d > 0.0))
      throw std::runtime_error("cholesky: matrix not positive definite at pivot " +
                               std::to_string(j));
    const double ljj = std::sqrt(d);
    l_[j * n_ + j] = ljj;
    for (std::size_t i = j + 1; i < n_; ++i) {
      double s = a_[i * n_ + j];
      for (std::size_t k = 0; k < j; ++k) s -= l_[i * n_ + k] * l_[j * n_ + k];
      l_[i * n_ + j] = s / ljj;
    }
  }
}

CorrelationMatrix CorrelationMatrix::equicorrelated(std::size_t n, double rho) {
  std::vector<std::vector<double>> a(n, std::vector<double>(n, rho));
  for (std::size_t i = 0; i < n; ++i) a[i][i] = 1.0;
  return CorrelationMatrix(std::move(a));
}

CopulaModel CopulaModel::independence(std::size_t n) {
  if (n == 0) throw std::invalid_argument("CopulaModel: dimension must be positive");
  return CopulaModel(Kind::independence, n);
}

CopulaModel CopulaModel::comonotone(std::size_t n) {
  if (n == 0) throw std::invalid_argument("CopulaModel: dimension must be positive");
  return CopulaModel(Kind::comonotone, n);
}

CopulaModel CopulaModel::gaussian(CorrelationMatrix r) {
  CopulaModel m(Kind::gaussian, r.dim());
  m.corr_ = std::make_shared<const CorrelationMatrix>(std::move(r));
  return m;
}

CopulaModel CopulaModel::student_t(double nu, CorrelationMatrix sigma) {
  if (!(nu > 0.0)) throw std::domain_error("CopulaModel: nu must be positive");
  CopulaModel m(Kind::student_t, sigma.dim());
  m.nu_ = nu;
  m.corr_ = std::make_shared<const CorrelationMatrix>(std::move(sigma));
  return m;
}

CopulaModel CopulaModel::clayton(double theta, std::size_t n) {
  if (!(theta > 0.0)) throw std::domain_error("CopulaModel: clayton theta must be positive");
  if (n == 0) throw std::invalid_argument("CopulaModel: dimension must be positive");
  CopulaModel m(Kind::clayton, n);
  m.theta_ = theta;
  return m;
}

CopulaModel CopulaModel::mixture(std::vector<double> weights,
                                 std::vector<CopulaModel> components) {
  if (weights.size() != components.size() || components.empty())
    throw std::invalid_argument("CopulaModel: mixture weights/components mismatch");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw std::domain_error("CopulaModel: mixture weights must be positive");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-9)
    throw std::domain_error("CopulaModel: mixture weights must sum to 1");
  const std::size_t n = components.front().dim();
  for (const auto& c : components)
    if (c.dim() != n)
      throw std::invalid_argument("CopulaModel: mixture components must share a dimension");
  CopulaModel m(Kind::mixture, n);
  m.mix_w_ = std::move(weights);
  m.mix_c_ = std::make_shared<const std::vector<CopulaModel>>(std::move(components));
  return m;
}

std::string CopulaModel::name() const {
  switch (kind_) {
    case Kind::independence:
      return "independence";
    case Kind::comonotone:
      return "comonotone";
    case Kind::gaussian:
      return "gaussian";
    case Kind::student_t:
      return "student_t";
    case Kind::clayton:
      return "clayton";
    case Kind::mixture:
      return "mixture";
  }
  return "unknown";
}

double CopulaModel::dependence_param() const {
  switch (kind_) {
    case Kind::independence:
      return 0.0;
    case Kind::comonotone:
      return 1.0;
    case Kind::clayton:
      return theta_;
    case Kind::gaussian:
    case Kind::student_t:
      return n_ > 1 ? (*corr_)(1, 0) : 0.0;
    case Kind::mixture:
      return 0.0;
  }
  return 0.0;
}

const CorrelationMatrix& CopulaModel::correlation() const {
  if (!corr_) throw std::logic_error("CopulaModel: no correlation matrix for this kind");
  return *corr_;
}

void sample_null_pvalues(const CopulaModel& model, RandomStream& rng,
                         CopulaWorkspace& ws, std::span<double> out) {
  const std::size_t n = model.dim();
  if (out.size() != n)
    throw std::invalid_argument("sample_null_pvalues: output dimension mismatch");
  switch (model.kind()) {
    case CopulaModel::Kind::independence:
      for (std::size_t i = 0; i < n; ++i) out[i] = rng.next_unit();
      return;
    case CopulaModel::Kind::comonotone: {
      const double u = rng.next_unit();
      for (std::size_t i = 0; i < n; ++i) out[i] = u;
      return;
    }
    case CopulaModel::Kind::gaussian: {
      ws.z.resize(n);
      ws.x.resize(n);
      for (std::size_t i = 0; i < n; ++i) ws.x[i] = normal_sample(rng);
      apply_chol(model.correlation().chol_lower(), n, ws.x, ws.z);
      for (std::size_t i = 0; i < n; ++i) out[i] = norm_sf(ws.z[i]);
      return;
    }
    case CopulaModel::Kind::student_t: {
      ws.z.resize(n);
      ws.x.resize(n);
      for (std::size_t i = 0; i < n; ++i) ws.x[i] = normal_sample(rng);
      apply_chol(model.correlation().chol_lower(), n, ws.x, ws.z);
      const double w = 2.0 * gamma_sample(0.5 * model.nu(), rng);  // chi-square_nu
      const double scale = std::sqrt(model.nu() / w);
      for (std::size_t i = 0; i < n; ++i) out[i] = t_sf(ws.z[i] * scale, model.nu());
      return;
    }
    case CopulaModel::Kind::clayton: {
      // Frailty construction in log space: V ~ Gamma(1/theta),
      // U_i = (1 + E_i/V)^(-1/theta).
      const double theta = model.theta();
      const double shape = 1.0 / theta;
      double log_v;
      if (shape >= 1.0) {
        log_v = std::log(gamma_sample(shape, rng));
      } else {
        log_v = std::log(gamma_sample(shape + 1.0, rng)) +
                std::log(rng.next_unit()) / shape;
      }
      for (std::size_t i = 0; i < n; ++i) {
        const double log_e = std::log(exp_sample(rng));
        out[i] = std::exp(-softplus(log_e - log_v) / theta);
      }
      return;
    }
    case CopulaModel::Kind::mixture: {
      double r = rng.next_unit();
      const auto& w = model.mixture_weights();
      const auto& comps = model.mixture_components();
      std::size_t pick = comps.size() - 1;
      for (std::size_t k = 0; k < w.size(); ++k) {
        if (r < w[k]) {
          pick = k;
          break;
        }
        r -= w[k];
      }
      sample_null_pvalues(comps[pick], rng, ws, out);
      return;
    }
  }
  throw std::logic_error("sample_null_pvalues: unknown model kind");
}

std::vector<double> sample_null_pvalues(const CopulaModel& model, RandomStream& rng) {
  std::vector<double> out(model.dim());
  CopulaWorkspace ws;
  sample_null_pvalues(model, rng, ws, out);
  return out;
}

double dependence_from_tau(TauFamily family, double tau) {
  if (!(tau > 0.0 && tau < 1.0))
    throw std::domain_error("dependence_from_tau: tau must be in the open interval (0,1)");
  switch (family) {
    case TauFamily::clayton:
      return 2.0 * tau / (1.0 - tau);
    case TauFamily::student_t:
      return std::sin(kPi * tau / 2.0);
  }
  throw std::logic_error("dependence_from_tau: unknown family");
}

double copula_cdf(const CopulaModel& model, std::span<const double> u) {
  if (u.size() != model.dim())
    throw std::invalid_argument("copula_cdf: argument dimension mismatch");
  for (double v : u)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::domain_error("copula_cdf: arguments must be in [0,1]");
  switch (model.kind()) {
    case CopulaModel::Kind::independence: {
      double prod = 1.0;
      for (double v : u) prod *= v;
      return prod;
    }
    case CopulaModel::Kind::comonotone:
      return *std::min_element(u.begin(), u.end());
    case CopulaModel::Kind::clayton: {
      double s = 0.0;
      for (double v : u) {
        if (v == 0.0) return 0.0;
        s += std::pow(v, -model.theta());
      }
      s -= static_cast<double>(u.size()) - 1.0;
      return std::pow(s, -1.0 / model.theta());
    }
    case CopulaModel::Kind::mixture: {
      double c = 0.0;
      const auto& w = model.mixture_weights();
      const auto& comps = model.mixture_components();
      for (std::size_t k = 0; k < w.size(); ++k) c += w[k] * copula_cdf(comps[k], u);
      return c;
    }
    case CopulaModel::Kind::gaussian:
    case CopulaModel::Kind::student_t:
      throw std::invalid_argument("copula_cdf: no analytic CDF for " + model.name());
  }
  throw std::logic_error("copula_cdf: unknown model kind");
}

double kendall_tau(std::span<const double> x, std::span<const double> y, std::size_t cap) {
  if (x.size() != y.size())
    throw std::invalid_argument("kendall_tau: samples must have equal length");
  const std::size_t m = std::min(x.size(), cap);
  if (m < 2) throw std::invalid_argument("kendall_tau: need at least two observations");

  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> v(m);
  for (std::size_t i = 0; i < m; ++i) v[i] = y[idx[i]];
  std::vector<double> buf(m);
  const std::uint64_t inv = merge_count(v, buf, 0, m);
  const double pairs = 0.5 * static_cast<double>(m) * static_cast<double>(m - 1);
  return 1.0 - 2.0 * static_cast<double>(inv) / pairs;
}

}  // namespace tailfuse
