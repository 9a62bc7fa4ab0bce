#pragma once

// Learning layer: menus embedded as utility vectors, covering, EXP3 for
// linear bandits over a finite embedded arm set, and Tsallis-INF.

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <vector>

#include "pa/core.hpp"
#include "pa/menu.hpp"
#include "pa/rng.hpp"

namespace pa {

/// Row m is z^{pi_m}: entry (m, j) = U(pi_m, j).
struct ArmEmbedding {
  Eigen::MatrixXd vectors;          // M x K
  std::vector<std::size_t> source;  // menu index per row

  std::size_t num_arms() const { return static_cast<std::size_t>(vectors.rows()); }
  std::size_t dimension() const { return static_cast<std::size_t>(vectors.cols()); }
};

ArmEmbedding embed_menu(const GreedyInstance& instance, const Menu& menu);

/// Greedy cover: keeps a row iff it is farther than tol (l-infinity) from every
/// row kept so far. Every input row ends within tol of a kept row.
ArmEmbedding cover_embeddings(const ArmEmbedding& embedding, double tol);

/// Exploration distribution for EXP3-linear: Frank-Wolfe on log det, stopping
/// when max leverage <= 2 d' (d' = rank) or after max_iterations. Falls back
/// to uniform if the design matrix cannot be factored.
std::vector<double> g_optimal_design(const ArmEmbedding& embedding, int max_iterations = 500);

/// y_m^T A(lambda)^{-1} y_m on the span of the rows.
std::vector<double> design_leverages(const ArmEmbedding& embedding,
                                     const std::vector<double>& design);

enum class Exploration { GOptimal, Uniform };

struct Exp3LinearConfig {
  std::optional<double> eta;
  std::optional<double> gamma;
  Exploration exploration = Exploration::GOptimal;
  std::optional<double> clip;  // defaults to 1/gamma
};

/// EXP3 over a finite arm set with linear rewards r_t = <z_{A_t}, y_t>.
/// Cumulative reward estimates come from the least-squares estimator
/// theta = Q^+ z_A r; per-arm increments are clipped at `clip`.
class Exp3Linear {
 public:
  Exp3Linear(ArmEmbedding embedding, std::size_t horizon, const Exp3LinearConfig& config = {});

  /// Samples an arm from the current distribution.
  std::size_t step(RandomStream& rng);
  /// reward must lie in [-1, 1].
  void update(std::size_t arm, double reward);

  const std::vector<double>& distribution() const { return p_; }
  const std::vector<double>& exploration() const { return explore_; }
  const std::vector<double>& estimates() const { return s_hat_; }
  double eta() const { return eta_; }
  double gamma() const { return gamma_; }
  std::size_t num_arms() const { return embedding_.num_arms(); }

  /// Q(p)^+ restricted to the span of the rows (eigenvalue cutoff 1e-10).
  Eigen::MatrixXd pseudo_inverse_design(const std::vector<double>& p) const;

 private:
  void refresh_distribution();

  ArmEmbedding embedding_;
  double eta_ = 0.0;
  double gamma_ = 0.0;
  double clip_ = 0.0;
  std::vector<double> explore_;
  std::vector<double> s_hat_;
  std::vector<double> p_;
};

/// Tsallis-INF (1/2-Tsallis entropy) with eta_t = 1/sqrt(t).
class TsallisInf {
 public:
  static constexpr double kResidualTolerance = 1e-10;
  static constexpr int kMaxNewton = 100;

  explicit TsallisInf(std::size_t num_arms);

  std::size_t step(RandomStream& rng);
  /// loss must lie in [0, 1].
  void update(std::size_t arm, double loss);

  /// Distribution for the current round (computed on demand).
  const std::vector<double>& distribution();
  const std::vector<double>& loss_estimates() const { return l_hat_; }
  std::size_t round() const { return t_; }
  std::size_t num_arms() const { return l_hat_.size(); }

 private:
  void solve();

  std::vector<double> l_hat_;
  std::vector<double> p_;
  std::size_t t_ = 1;
  bool fresh_ = false;
};

/// Weights 4/(eta (L_m - z))^2 normalized through z; exposed for testing.
/// Throws std::runtime_error when neither Newton nor bisection converges.
std::vector<double> tsallis_weights(const std::vector<double>& losses, double eta);

}  // namespace pa
