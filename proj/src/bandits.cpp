#include "pa/bandits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace pa {

ArmEmbedding embed_menu(const GreedyInstance& instance, const Menu& menu) {
  if (menu.empty()) throw std::invalid_argument("cannot embed an empty menu");
  if (menu.num_arms() != instance.num_arms())
    throw std::invalid_argument("menu dimension does not match instance");
  const auto m = static_cast<Eigen::Index>(menu.size());
  const auto k = static_cast<Eigen::Index>(instance.num_agents());
  ArmEmbedding out{Eigen::MatrixXd(m, k), std::vector<std::size_t>(menu.size())};
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto& pi = menu.incentive(static_cast<std::size_t>(r));
    for (Eigen::Index j = 0; j < k; ++j)
      out.vectors(r, j) = greedy_utility(instance, pi, static_cast<std::size_t>(j));
    out.source[static_cast<std::size_t>(r)] = static_cast<std::size_t>(r);
  }
  return out;
}

ArmEmbedding cover_embeddings(const ArmEmbedding& embedding, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("cover tolerance must be positive");
  std::vector<Eigen::Index> kept;
  for (Eigen::Index r = 0; r < embedding.vectors.rows(); ++r) {
    bool covered = false;
    for (Eigen::Index s : kept) {
      if ((embedding.vectors.row(r) - embedding.vectors.row(s)).cwiseAbs().maxCoeff() <= tol) {
        covered = true;
        break;
      }
    }
    if (!covered) kept.push_back(r);
  }
  ArmEmbedding out{Eigen::MatrixXd(static_cast<Eigen::Index>(kept.size()), embedding.vectors.cols()),
                   {}};
  for (std::size_t i = 0; i < kept.size(); ++i) {
    out.vectors.row(static_cast<Eigen::Index>(i)) = embedding.vectors.row(kept[i]);
    out.source.push_back(embedding.source[static_cast<std::size_t>(kept[i])]);
  }
  return out;
}

namespace {

// Coordinates of the rows in an orthonormal basis of their span.
Eigen::MatrixXd span_coordinates(const Eigen::MatrixXd& z) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(z, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  const double cutoff = 1e-10 * (sv.size() > 0 ? std::max(sv(0), 1e-300) : 1.0);
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return z * svd.matrixV().leftCols(rank);
}

std::vector<double> uniform(std::size_t m) {
  return std::vector<double>(m, 1.0 / static_cast<double>(m));
}

// Leverages of the rows of y under design lambda; empty when A is singular.
std::optional<Eigen::VectorXd> leverages(const Eigen::MatrixXd& y, const Eigen::VectorXd& lambda) {
  const Eigen::MatrixXd a = y.transpose() * lambda.asDiagonal() * y;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Eigen::MatrixXd w = llt.solve(y.transpose());  // d' x M
  Eigen::VectorXd g(y.rows());
  for (Eigen::Index m = 0; m < y.rows(); ++m) g(m) = y.row(m).dot(w.col(m));
  if (!g.allFinite()) return std::nullopt;
  return g;
}

}  // namespace

std::vector<double> design_leverages(const ArmEmbedding& embedding,
                                     const std::vector<double>& design) {
  const Eigen::MatrixXd y = span_coordinates(embedding.vectors);
  const Eigen::VectorXd lambda = Eigen::Map<const Eigen::VectorXd>(
      design.data(), static_cast<Eigen::Index>(design.size()));
  if (y.cols() == 0) return std::vector<double>(design.size(), 0.0);
  const auto g = leverages(y, lambda);
  if (!g) throw std::runtime_error("design matrix is singular on the span");
  return {g->data(), g->data() + g->size()};
}

std::vector<double> g_optimal_design(const ArmEmbedding& embedding, int max_iterations) {
  const std::size_t m = embedding.num_arms();
  if (m == 0) throw std::invalid_argument("empty embedding");
  const Eigen::MatrixXd y = span_coordinates(embedding.vectors);
  const auto d = static_cast<double>(y.cols());
  if (y.cols() == 0) return uniform(m);

  Eigen::VectorXd lambda = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m), 1.0 / m);
  for (int iter = 0; iter < max_iterations; ++iter) {
    const auto g = leverages(y, lambda);
    if (!g) return uniform(m);
    Eigen::Index best = 0;
    const double gmax = g->maxCoeff(&best);
    if (gmax <= 2.0 * d) break;
    // Exact line search for log det along e_best (Kiefer-Wolfowitz step).
    const double alpha = (gmax / d - 1.0) / (gmax - 1.0);
    lambda *= (1.0 - alpha);
    lambda(best) += alpha;
  }
  lambda /= lambda.sum();
  return {lambda.data(), lambda.data() + lambda.size()};
}

Exp3Linear::Exp3Linear(ArmEmbedding embedding, std::size_t horizon, const Exp3LinearConfig& config)
    : embedding_(std::move(embedding)) {
  const std::size_t m = embedding_.num_arms();
  const std::size_t k = embedding_.dimension();
  if (m == 0) throw std::invalid_argument("EXP3-linear needs at least one arm");
  if (k == 0) throw std::invalid_argument("embedding has zero dimension");
  if (horizon == 0) throw std::invalid_argument("horizon must be at least 1");
  eta_ = config.eta.value_or(
      std::sqrt(2.0 * std::log(static_cast<double>(m)) / (static_cast<double>(k * horizon))));
  gamma_ = config.gamma.value_or(std::min(0.5, static_cast<double>(k) * eta_));
  if (eta_ < 0.0 || gamma_ < 0.0 || gamma_ > 1.0)
    throw std::invalid_argument("EXP3-linear needs eta >= 0 and gamma in [0,1]");
  clip_ = config.clip.value_or(gamma_ > 0.0 ? 1.0 / gamma_ : std::numeric_limits<double>::infinity());
  explore_ = config.exploration == Exploration::Uniform ? uniform(m) : g_optimal_design(embedding_);
  s_hat_.assign(m, 0.0);
  refresh_distribution();
}

void Exp3Linear::refresh_distribution() {
  const std::size_t m = s_hat_.size();
  const double top = *std::max_element(s_hat_.begin(), s_hat_.end());
  std::vector<double> w(m);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) total += w[i] = std::exp(eta_ * (s_hat_[i] - top));
  p_.resize(m);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) sum += p_[i] = (1.0 - gamma_) * w[i] / total + gamma_ * explore_[i];
  for (double& x : p_) x /= sum;
}

std::size_t Exp3Linear::step(RandomStream& rng) { return rng.categorical(p_); }

Eigen::MatrixXd Exp3Linear::pseudo_inverse_design(const std::vector<double>& p) const {
  const Eigen::Map<const Eigen::VectorXd> weights(p.data(), static_cast<Eigen::Index>(p.size()));
  const Eigen::MatrixXd q =
      embedding_.vectors.transpose() * weights.asDiagonal() * embedding_.vectors;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q);
  Eigen::VectorXd inv = eig.eigenvalues();
  for (Eigen::Index i = 0; i < inv.size(); ++i) inv(i) = inv(i) > 1e-10 ? 1.0 / inv(i) : 0.0;
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

void Exp3Linear::update(std::size_t arm, double reward) {
  if (arm >= num_arms()) throw std::invalid_argument("arm index out of range");
  if (!(reward >= -1.0 && reward <= 1.0)) throw std::invalid_argument("reward must lie in [-1,1]");
  if (reward != 0.0) {
    const Eigen::VectorXd theta = pseudo_inverse_design(p_) *
                                  embedding_.vectors.row(static_cast<Eigen::Index>(arm)).transpose() *
                                  reward;
    const Eigen::VectorXd est = embedding_.vectors * theta;
    for (std::size_t i = 0; i < s_hat_.size(); ++i)
      s_hat_[i] += std::clamp(est(static_cast<Eigen::Index>(i)), -clip_, clip_);
  }
  refresh_distribution();
}

std::vector<double> tsallis_weights(const std::vector<double>& losses, double eta) {
  const std::size_t m = losses.size();
  if (m == 0) throw std::invalid_argument("Tsallis-INF needs at least one arm");
  if (!(eta > 0.0)) throw std::invalid_argument("learning rate must be positive");
  const double lmin = *std::min_element(losses.begin(), losses.end());

  auto residual = [&](double z, double* slope) {
    double f = -1.0, df = 0.0;
    for (double l : losses) {
      const double gap = eta * (l - z);
      f += 4.0 / (gap * gap);
      df += 8.0 * eta / (gap * gap * gap);
    }
    if (slope) *slope = df;
    return f;
  };

  // f is increasing and convex on (-inf, lmin); f(lo) <= 0 <= f(hi).
  double lo = lmin - 2.0 * std::sqrt(static_cast<double>(m)) / eta;
  double hi = lmin - 2.0 / eta;
  double z = lo;
  bool converged = false;
  for (int it = 0; it < TsallisInf::kMaxNewton; ++it) {
    double df = 0.0;
    const double f = residual(z, &df);
    if (std::abs(f) < TsallisInf::kResidualTolerance) {
      converged = true;
      break;
    }
    (f < 0.0 ? lo : hi) = z;
    double next = z - f / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // keep Newton inside the bracket
    z = next;
  }
  if (!converged) {
    lo = lmin - 2.0 * std::sqrt(static_cast<double>(m)) / eta;
    hi = lmin - 2.0 / eta;
    for (int it = 0; it < 400 && !converged; ++it) {
      z = 0.5 * (lo + hi);
      const double f = residual(z, nullptr);
      if (std::abs(f) < TsallisInf::kResidualTolerance) converged = true;
      (f < 0.0 ? lo : hi) = z;
    }
  }
  if (!converged) throw std::runtime_error("Tsallis-INF normalizer did not converge");

  std::vector<double> p(m);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double gap = eta * (losses[i] - z);
    sum += p[i] = 4.0 / (gap * gap);
  }
  for (double& x : p) x /= sum;
  return p;
}

TsallisInf::TsallisInf(std::size_t num_arms) : l_hat_(num_arms, 0.0) {
  if (num_arms == 0) throw std::invalid_argument("Tsallis-INF needs at least one arm");
}

void TsallisInf::solve() {
  p_ = tsallis_weights(l_hat_, 1.0 / std::sqrt(static_cast<double>(t_)));
  fresh_ = true;
}

const std::vector<double>& TsallisInf::distribution() {
  if (!fresh_) solve();
  return p_;
}

std::size_t TsallisInf::step(RandomStream& rng) { return rng.categorical(distribution()); }

void TsallisInf::update(std::size_t arm, double loss) {
  if (arm >= num_arms()) throw std::invalid_argument("arm index out of range");
  if (!(loss >= 0.0 && loss <= 1.0)) throw std::invalid_argument("loss must lie in [0,1]");
  const auto& p = distribution();
  l_hat_[arm] += loss / p[arm];
  ++t_;
  fresh_ = false;
}

}  // namespace pa
