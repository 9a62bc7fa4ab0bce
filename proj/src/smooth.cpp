#include "pa/smooth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pa {

std::string to_string(SmoothKind kind) {
  switch (kind) {
    case SmoothKind::GaussianGreedy: return "gaussian";
    case SmoothKind::HardInstance: return "hard";
    case SmoothKind::Logit: return "logit";
    case SmoothKind::Custom: return "custom";
  }
  return "custom";
}

SmoothKind smooth_kind_from_string(const std::string& text) {
  if (text == "gaussian") return SmoothKind::GaussianGreedy;
  if (text == "hard") return SmoothKind::HardInstance;
  if (text == "logit") return SmoothKind::Logit;
  if (text == "custom") return SmoothKind::Custom;
  throw std::invalid_argument("unknown smooth model kind '" + text + "'");
}

double expected_smooth_utility(const SmoothChoiceModel& model, const std::vector<double>& rewards,
                               const IncentiveVector& pi) {
  if (rewards.size() != model.num_arms || pi.size() != model.num_arms)
    throw std::invalid_argument("dimension mismatch in smooth utility");
  const auto p = model(pi);
  double u = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) u += p[i] * (rewards[i] - pi[i]);
  return u;
}

// ---- grids ------------------------------------------------------------------

Menu build_single_arm_grid(std::size_t num_arms, double eps) {
  if (num_arms == 0) throw std::invalid_argument("need at least one arm");
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("grid resolution must be in (0,1]");
  const auto steps = static_cast<std::size_t>(std::floor(1.0 / eps + 1e-9));
  Menu menu(num_arms, IncentiveMode::SingleArm);
  menu.append_unchecked(IncentiveVector::zero(num_arms));
  for (std::size_t i = 0; i < num_arms; ++i)
    for (std::size_t j = 1; j <= steps; ++j)
      menu.append_unchecked(
          IncentiveVector::single(num_arms, i, std::min(1.0, static_cast<double>(j) * eps)),
          MenuProvenance{i, std::nullopt, false, {}});
  return menu;
}

double choose_single_resolution(std::size_t num_arms, double lipschitz, std::size_t horizon) {
  if (num_arms == 0 || horizon == 0 || lipschitz < 1.0)
    throw std::invalid_argument("need N, T >= 1 and L >= 1");
  const double eps = std::cbrt(static_cast<double>(num_arms)) *
                     std::pow(2.0 * lipschitz + 1.0, -2.0 / 3.0) *
                     std::pow(static_cast<double>(horizon), -1.0 / 3.0);
  return std::min(eps, 1.0);
}

Menu build_hypercube_grid(std::size_t num_arms, double eps, std::size_t cap) {
  if (num_arms == 0) throw std::invalid_argument("need at least one arm");
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("grid resolution must be in (0,1]");
  const auto cells = static_cast<std::size_t>(std::ceil(1.0 / eps - 1e-9));
  std::size_t total = 1;
  for (std::size_t i = 0; i < num_arms; ++i) {
    if (total > cap / cells) throw std::length_error("hypercube grid exceeds the cap");
    total *= cells;
  }
  Menu menu(num_arms, IncentiveMode::General);
  std::vector<std::size_t> idx(num_arms, 0);
  std::vector<double> x(num_arms);
  for (std::size_t count = 0; count < total; ++count) {
    for (std::size_t i = 0; i < num_arms; ++i)
      x[i] = (static_cast<double>(idx[i]) + 0.5) / static_cast<double>(cells);
    menu.append_unchecked(IncentiveVector(x, IncentiveMode::General));
    for (std::size_t i = num_arms; i-- > 0;) {
      if (++idx[i] < cells) break;
      idx[i] = 0;
    }
  }
  return menu;
}

double choose_general_resolution(std::size_t num_arms, double lipschitz, std::size_t horizon) {
  if (num_arms == 0 || horizon == 0 || lipschitz < 1.0)
    throw std::invalid_argument("need N, T >= 1 and L >= 1");
  const double n2 = static_cast<double>(num_arms) + 2.0;
  const double eps = std::pow(2.0 * lipschitz + 1.0, -2.0 / n2) *
                     std::pow(static_cast<double>(horizon), -1.0 / n2);
  return std::min(eps, 1.0);
}

// ---- Gaussian model -----------------------------------------------------------

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double standard_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

namespace {

constexpr std::size_t kGaussNodes = 16;

struct GaussLegendre {
  std::array<double, kGaussNodes> x{};
  std::array<double, kGaussNodes> w{};

  GaussLegendre() {
    // Newton on P_n starting from the Chebyshev-like guess.
    const std::size_t n = kGaussNodes;
    for (std::size_t i = 0; i < n; ++i) {
      double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                          (static_cast<double>(n) + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (std::size_t k = 2; k <= n; ++k) {
          const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / static_cast<double>(k);
          p0 = p1;
          p1 = pk;
        }
        dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      x[i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }
};

const GaussLegendre& gauss_legendre() {
  static const GaussLegendre rule;
  return rule;
}

using Integrand = std::function<void(double, std::vector<double>&)>;

std::vector<double> gl_panel(const Integrand& f, double a, double b, std::size_t dim) {
  const auto& rule = gauss_legendre();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  std::vector<double> acc(dim, 0.0), val(dim);
  for (std::size_t i = 0; i < kGaussNodes; ++i) {
    f(mid + half * rule.x[i], val);
    for (std::size_t d = 0; d < dim; ++d) acc[d] += rule.w[i] * val[d];
  }
  for (double& v : acc) v *= half;
  return acc;
}

void adaptive(const Integrand& f, double a, double b, std::size_t dim, double tol,
              const std::vector<double>& whole, int depth, std::vector<double>& out) {
  const double mid = 0.5 * (a + b);
  const auto left = gl_panel(f, a, mid, dim);
  const auto right = gl_panel(f, mid, b, dim);
  double err = 0.0;
  for (std::size_t d = 0; d < dim; ++d) err = std::max(err, std::abs(left[d] + right[d] - whole[d]));
  if (err <= tol) {
    for (std::size_t d = 0; d < dim; ++d) out[d] += left[d] + right[d];
    return;
  }
  if (depth >= 40) throw std::runtime_error("Gauss-Legendre quadrature did not converge");
  adaptive(f, a, mid, dim, tol / 2.0, left, depth + 1, out);
  adaptive(f, mid, b, dim, tol / 2.0, right, depth + 1, out);
}

std::vector<double> integrate(const Integrand& f, double a, double b, std::size_t dim, double tol) {
  std::vector<double> out(dim, 0.0);
  // Start from a few panels so narrow features are not missed by the first estimate.
  constexpr int kPanels = 8;
  const double h = (b - a) / kPanels;
  for (int k = 0; k < kPanels; ++k) {
    const double lo = a + k * h, hi = lo + h;
    adaptive(f, lo, hi, dim, tol / kPanels, gl_panel(f, lo, hi, dim), 0, out);
  }
  return out;
}

std::vector<double> shifted_means(const std::vector<double>& preference, const IncentiveVector& pi) {
  if (preference.size() != pi.size()) throw std::invalid_argument("dimension mismatch");
  std::vector<double> c(preference.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = preference[i] + pi[i];
  return c;
}

constexpr double kQuadratureTolerance = 1e-11;
constexpr double kSpan = 8.0;

}  // namespace

std::vector<double> gaussian_choice_probabilities(const std::vector<double>& preference,
                                                  const IncentiveVector& pi) {
  const auto c = shifted_means(preference, pi);
  const std::size_t n = c.size();
  if (n == 1) return {1.0};
  const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
  std::vector<double> cdf(n), pdf(n);
  const Integrand f = [&](double y, std::vector<double>& out) {
    for (std::size_t k = 0; k < n; ++k) {
      cdf[k] = standard_normal_cdf(y - c[k]);
      pdf[k] = standard_normal_pdf(y - c[k]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      double v = pdf[i];
      for (std::size_t k = 0; k < n; ++k)
        if (k != i) v *= cdf[k];
      out[i] = v;
    }
  };
  auto p = integrate(f, *lo - kSpan, *hi + kSpan, n, kQuadratureTolerance);
  double sum = 0.0;
  for (double v : p) sum += v;
  if (std::abs(sum - 1.0) > 1e-7)
    throw std::runtime_error("Gaussian choice probabilities failed to normalize");
  for (double& v : p) v = std::max(0.0, v / sum);
  return p;
}

std::vector<std::vector<double>> gaussian_choice_jacobian(const std::vector<double>& preference,
                                                          const IncentiveVector& pi) {
  const auto c = shifted_means(preference, pi);
  const std::size_t n = c.size();
  std::vector<std::vector<double>> jac(n, std::vector<double>(n, 0.0));
  if (n == 1) return jac;
  const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
  std::vector<double> cdf(n), pdf(n);
  // Entry (i, k), i < k: int phi_i phi_k prod_{l != i,k} Phi_l.
  const Integrand f = [&](double y, std::vector<double>& out) {
    for (std::size_t k = 0; k < n; ++k) {
      cdf[k] = standard_normal_cdf(y - c[k]);
      pdf[k] = standard_normal_pdf(y - c[k]);
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        if (k <= i) {
          out[i * n + k] = 0.0;
          continue;
        }
        double v = pdf[i] * pdf[k];
        for (std::size_t l = 0; l < n; ++l)
          if (l != i && l != k) v *= cdf[l];
        out[i * n + k] = v;
      }
  };
  const auto pair = integrate(f, *lo - kSpan, *hi + kSpan, n * n, kQuadratureTolerance);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = i + 1; k < n; ++k) {
      const double v = pair[i * n + k];
      jac[i][k] = -v;  // raising c_k takes mass from i
      jac[k][i] = -v;
      jac[i][i] += v;
      jac[k][k] += v;
    }
  return jac;
}

SmoothChoiceModel gaussian_greedy_model(std::vector<double> preference, double lipschitz,
                                        IncentiveMode domain) {
  if (preference.empty()) throw std::invalid_argument("need at least one arm");
  SmoothChoiceModel model;
  model.num_arms = preference.size();
  model.kind = SmoothKind::GaussianGreedy;
  model.domain = domain;
  model.probabilities = [mu = std::move(preference)](const IncentiveVector& pi) {
    return gaussian_choice_probabilities(mu, pi);
  };
  if (lipschitz > 0.0) {
    model.lipschitz = lipschitz;
  } else {
    model.lipschitz = std::numeric_limits<double>::infinity();
    RandomStream rng = StreamSplitter(0x6A55).stream("lipschitz-calibration");
    model.lipschitz = std::max(1.0, 1.05 * lipschitz_audit(model, 300, rng).max_ratio);
  }
  return model;
}

SmoothChoiceModel logit_model(std::vector<double> preference, IncentiveMode domain) {
  if (preference.empty()) throw std::invalid_argument("need at least one arm");
  SmoothChoiceModel model;
  model.num_arms = preference.size();
  model.kind = SmoothKind::Logit;
  model.domain = domain;
  model.lipschitz = 2.0;
  model.probabilities = [mu = std::move(preference)](const IncentiveVector& pi) {
    std::vector<double> p(mu.size());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i) top = std::max(top, mu[i] + pi[i]);
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) sum += p[i] = std::exp(mu[i] + pi[i] - top);
    for (double& v : p) v /= sum;
    return p;
  };
  return model;
}

// ---- lower-bound family -------------------------------------------------------

void validate(const SmoothHardInstanceParams& params) {
  if (params.num_arms < 2) throw std::invalid_argument("hard instance needs N >= 2");
  if (params.lipschitz < 3.0) throw std::invalid_argument("hard instance needs L >= 3");
  if (params.arm + 1 >= params.num_arms)
    throw std::invalid_argument("designated arm must be one of the first N-1 arms");
  if (!(params.eps > 0.0)) throw std::invalid_argument("hard instance needs eps > 0");
  if (static_cast<double>(params.interval + 1) * params.eps > 0.5 + 1e-12)
    throw std::invalid_argument("good interval must lie inside [0, 1/2]");
  if ((params.lipschitz - 1.0) * params.eps > 7.0)
    throw std::invalid_argument("bonus too large for a valid distribution");
}

double bonus(double x, double lipschitz, double eps) {
  if (!(x >= 0.0 && x <= eps)) throw std::invalid_argument("bonus argument outside [0, eps]");
  return (lipschitz - 1.0) / 4.0 * std::min(x, eps - x);
}

std::vector<double> hard_instance_probabilities(const SmoothHardInstanceParams& params,
                                                const IncentiveVector& pi) {
  validate(params);
  const std::size_t n = params.num_arms;
  if (pi.size() != n) throw std::invalid_argument("incentive dimension does not match");
  if (pi.mode() != IncentiveMode::SingleArm)
    throw std::invalid_argument("hard instance is defined for single-arm incentives");
  const double nn = static_cast<double>(n);
  const double lo = static_cast<double>(params.interval) * params.eps;
  const double hi = lo + params.eps;
  std::vector<double> p(n, 0.0);
  double rest = 1.0;
  for (std::size_t l = 0; l + 1 < n; ++l) {
    const double x = pi[l];
    if (l == params.arm && x >= lo && x <= hi)
      p[l] = 1.0 / (16.0 * nn * (1.0 - x)) +
             bonus(std::clamp(x - lo, 0.0, params.eps), params.lipschitz, params.eps);
    else if (x <= 0.5)
      p[l] = 1.0 / (16.0 * nn * (1.0 - x));
    else
      p[l] = 1.0 / (8.0 * nn);
    rest -= p[l];
  }
  p[n - 1] = rest;
  return p;
}

SmoothChoiceModel hard_instance_model(const SmoothHardInstanceParams& params) {
  validate(params);
  SmoothChoiceModel model;
  model.num_arms = params.num_arms;
  model.lipschitz = params.lipschitz;
  model.kind = SmoothKind::HardInstance;
  model.domain = IncentiveMode::SingleArm;
  const double lo = static_cast<double>(params.interval) * params.eps;
  model.breakpoints = {lo, lo + params.eps / 2.0, lo + params.eps, 0.5};
  model.probabilities = [params](const IncentiveVector& pi) {
    return hard_instance_probabilities(params, pi);
  };
  return model;
}

std::vector<double> hard_instance_rewards(std::size_t num_arms) {
  std::vector<double> v(num_arms, 1.0);
  v.back() = 0.0;
  return v;
}

// ---- audit ----------------------------------------------------------------------

namespace {

IncentiveVector random_point(const SmoothChoiceModel& model, RandomStream& rng) {
  const std::size_t n = model.num_arms;
  if (model.domain == IncentiveMode::SingleArm) {
    if (rng.uniform() < 0.1) return IncentiveVector::zero(n);
    return IncentiveVector::single(n, rng.below(n), rng.uniform());
  }
  std::vector<double> x(n);
  for (double& v : x) v = rng.uniform();
  return IncentiveVector(std::move(x), IncentiveMode::General);
}

double small_step(RandomStream& rng) { return std::pow(10.0, -rng.uniform(1.0, 7.0)); }

IncentiveVector with_coordinate(const IncentiveVector& base, std::size_t arm, double value) {
  value = std::clamp(value, 0.0, 1.0);
  if (base.mode() == IncentiveMode::SingleArm) return IncentiveVector::single(base.size(), arm, value);
  std::vector<double> x(base.values().begin(), base.values().end());
  x[arm] = value;
  return IncentiveVector(std::move(x), IncentiveMode::General);
}

}  // namespace

LipschitzAudit lipschitz_audit(const SmoothChoiceModel& model, std::size_t trials,
                               RandomStream& rng) {
  if (trials == 0) throw std::invalid_argument("audit needs at least one trial");
  LipschitzAudit audit;
  const std::size_t n = model.num_arms;
  for (std::size_t t = 0; t < trials; ++t) {
    IncentiveVector a = random_point(model, rng);
    IncentiveVector b;
    const std::size_t kind = model.breakpoints.empty() ? t % 2 : t % 3;
    if (kind == 0) {
      b = random_point(model, rng);
    } else if (kind == 1) {
      const std::size_t arm = a.is_zero() ? rng.below(n) : (model.domain == IncentiveMode::SingleArm
                                                                ? a.support_arm()
                                                                : rng.below(n));
      const double delta = small_step(rng) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
      b = with_coordinate(a, arm, a[arm] + delta);
    } else {
      const double point = model.breakpoints[rng.below(model.breakpoints.size())];
      const std::size_t arm = rng.below(n);
      a = with_coordinate(a, arm, point - small_step(rng));
      b = with_coordinate(a, arm, point + small_step(rng));
    }
    const double dist = linf_distance(a.values(), b.values());
    if (dist <= 0.0) continue;
    const auto pa = model(a);
    const auto pb = model(b);
    double tv = 0.0;
    for (std::size_t i = 0; i < n; ++i) tv += std::abs(pa[i] - pb[i]);
    audit.max_ratio = std::max(audit.max_ratio, tv / dist);
    ++audit.pairs;
  }
  audit.passed = audit.max_ratio <= model.lipschitz * (1.0 + 1e-6);
  return audit;
}

}  // namespace pa
