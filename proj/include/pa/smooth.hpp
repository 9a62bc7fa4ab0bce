#pragma once

// Smooth (randomized, Lipschitz) agent choice models and the grid menus used
// to learn against them.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "pa/core.hpp"
#include "pa/menu.hpp"
#include "pa/rng.hpp"

namespace pa {

enum class SmoothKind { GaussianGreedy, HardInstance, Logit, Custom };

std::string to_string(SmoothKind kind);
SmoothKind smooth_kind_from_string(const std::string& text);

/// A stochastic response: incentive -> distribution over arms. The declared
/// Lipschitz constant bounds sum_i |dPr_i| by L * |d pi|_inf.
struct SmoothChoiceModel {
  std::size_t num_arms = 0;
  double lipschitz = 1.0;
  SmoothKind kind = SmoothKind::Custom;
  IncentiveMode domain = IncentiveMode::General;
  /// Incentive values where the model switches branches; the audit probes
  /// pairs straddling them.
  std::vector<double> breakpoints;
  std::function<std::vector<double>(const IncentiveVector&)> probabilities;

  std::vector<double> operator()(const IncentiveVector& pi) const { return probabilities(pi); }
};

/// sum_i Pr_i (v_i - pi_i).
double expected_smooth_utility(const SmoothChoiceModel& model, const std::vector<double>& rewards,
                               const IncentiveVector& pi);

// ---- grids ----------------------------------------------------------------

/// Single-arm vectors with values 0, eps, 2 eps, ..., floor(1/eps) eps on each
/// arm, plus zero; duplicates (all the zeros) collapse.
Menu build_single_arm_grid(std::size_t num_arms, double eps);

/// N^{1/3} (2L+1)^{-2/3} T^{-1/3}, clamped to (0, 1].
double choose_single_resolution(std::size_t num_arms, double lipschitz, std::size_t horizon);

/// Centers of the ceil(1/eps)^N cells of [0,1]^N (General mode).
Menu build_hypercube_grid(std::size_t num_arms, double eps, std::size_t cap = 1'000'000);

/// (2L+1)^{-2/(N+2)} T^{-1/(N+2)}, clamped to (0, 1].
double choose_general_resolution(std::size_t num_arms, double lipschitz, std::size_t horizon);

// ---- Gaussian-noise greedy model -----------------------------------------

double standard_normal_cdf(double x);
double standard_normal_pdf(double x);

/// Agent plays argmax_i (c_i + noise_i), noise iid N(0,1), c = mu + pi.
/// Pr[i] = int phi(y - c_i) prod_{k != i} Phi(y - c_k) dy, by adaptive
/// Gauss-Legendre quadrature on [min c - 8, max c + 8].
std::vector<double> gaussian_choice_probabilities(const std::vector<double>& preference,
                                                  const IncentiveVector& pi);

/// d Pr[i] / d pi_k, same quadrature.
std::vector<std::vector<double>> gaussian_choice_jacobian(const std::vector<double>& preference,
                                                          const IncentiveVector& pi);

/// If lipschitz <= 0 the constant is set by a seeded audit (max ratio * 1.05).
SmoothChoiceModel gaussian_greedy_model(std::vector<double> preference, double lipschitz = 0.0,
                                        IncentiveMode domain = IncentiveMode::General);

/// Softmax of mu + pi (temperature 1). Declared L = 2.
SmoothChoiceModel logit_model(std::vector<double> preference,
                              IncentiveMode domain = IncentiveMode::General);

// ---- lower-bound family ---------------------------------------------------

/// Agent type (arm, interval) of the smooth lower-bound family. `arm` is in
/// [0, N-2]; the good interval is [interval*eps, (interval+1)*eps].
struct SmoothHardInstanceParams {
  std::size_t arm = 0;
  std::size_t interval = 0;
  double eps = 0.1;
  double lipschitz = 3.0;
  std::size_t num_arms = 2;
};

void validate(const SmoothHardInstanceParams& params);

/// (L-1)/4 * min(x, eps - x) on [0, eps].
double bonus(double x, double lipschitz, double eps);

std::vector<double> hard_instance_probabilities(const SmoothHardInstanceParams& params,
                                                const IncentiveVector& pi);

SmoothChoiceModel hard_instance_model(const SmoothHardInstanceParams& params);

/// Principal rewards (1, ..., 1, 0) used with the lower-bound family.
std::vector<double> hard_instance_rewards(std::size_t num_arms);

// ---- audit ----------------------------------------------------------------

struct LipschitzAudit {
  double max_ratio = 0.0;
  std::size_t pairs = 0;
  bool passed = false;  // max_ratio <= L (1 + 1e-6)
};

/// Probes uniform pairs, local pairs, and pairs straddling the breakpoints.
LipschitzAudit lipschitz_audit(const SmoothChoiceModel& model, std::size_t trials,
                               RandomStream& rng);

}  // namespace pa
