#pragma once

#include <optional>
#include <span>

#include "qac/model.hpp"

namespace qac {

struct BzResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

// Brillouin-zone quadrature over (-pi, pi]^d for integrands F(E(p)) with
// E(p) = sum_j (1 - cos p_j) and an integrable singularity at p = 0:
// product midpoint rule (orthant-reduced) with the cell block around the
// origin excised and integrated exactly in cone coordinates; the returned
// value extrapolates the 2x-refined midpoint pair, the error estimate is
// the distance between the fine sum and the extrapolation.
namespace bz {

enum class Kernel { rsqrt, coth_rsqrt };

// midpoint part only: cells outside the block [-s, s]^d, s = block_cells * h
double midpoint_sum(int d, int n_per_axis, int block_cells, Kernel k, double b);
// integral of F(E) over the block cube via boundary-cone decomposition
double cone_patch(int d, double s, Kernel k, double b);
int default_axis_points(int d);

double integral(int d, int n_per_axis, Kernel k, double b, double* error_estimate);

}  // namespace bz

// theta_d of eq. (cj): (2 pi)^{-d} \int dp / sqrt(E(p)), d >= 2
BzResult theta_d(int d, int points_per_axis = 0);

// (2 (2 pi)^d)^{-1} \int [2 m J E]^{-1/2} coth(beta sqrt(J E / 2m)) dp;
// the right-hand side of eq. (cja) and the subtracted term of eq. (sig9)
BzResult infrared_integral(int d, double m, double j, double beta, int points_per_axis = 0);

// Phi(t) = sum_{s>=2} (2s)!/(2^{s-1}(s-1)!) b_s t^{s-1}; coeffs start at b_2
double phi_series(std::span<const double> b_from_2, double t);

// unique positive root of a + 2 b_1 + Phi(t) = 0; b_coeffs = (b_1, .., b_r)
// requires 2 b_1 < -a and b_s >= 0 for s >= 2, not all zero
double t_star(double a, std::span<const double> b_coeffs);

struct BetaStarResult {
  double value = 0.0;
  double residual = 0.0;  // |t* - RHS(beta*)| at the solve resolution
};

// unique solution of t* = infrared_integral(beta); requires the condition
// (cj1) J > theta_d^2 / (8 m t*^2), otherwise no root exists
BetaStarResult beta_star(int d, double m, double j, double t_star_value,
                         int points_per_axis = 0);

struct PhaseTransitionCheck {
  bool predicted = false;
  double threshold = 0.0;  // theta_d^2 / (8 m t*^2)
  double t_star = 0.0;
  double theta_d = 0.0;
  std::optional<double> beta_star;
};

PhaseTransitionCheck check_phase_transition(int d, double m, double j, double a,
                                            std::span<const double> b_coeffs);

struct StabilizationCheck {
  bool stabilized = false;  // m Delta^2 > J_hat_0, strict
  double m_delta_sq = 0.0;
  double j_hat_zero = 0.0;
  // nearest-neighbor specialization (cj2): J < 1 / (8 d m t*^2)
  std::optional<bool> nn_condition;
  std::optional<double> nn_threshold;
};

StabilizationCheck check_quantum_stabilization(double m, double gap, double j_hat_zero);
StabilizationCheck check_quantum_stabilization_nn(double m, double gap, double j_hat_zero,
                                                  int d, double j, double t_star_value);

// decomposition V = V_1 + V_2 of eqs. (decom)-(dc2): b bounds the convex
// curvature from below, delta the oscillation of the bounded part
struct DecompositionSpec {
  double b = 0.0;
  double delta = 0.0;
};

struct HighTCheck {
  bool unique = false;       // e^{beta delta} < (a + b) / J_hat_0
  bool holds_all_beta = false;  // eq. (si): delta = 0 and J_hat_0 < a + b
  std::optional<double> beta_max;  // for delta > 0: unique iff beta < beta_max
};

HighTCheck check_high_T_uniqueness(double a, const DecompositionSpec& dec, double beta,
                                   double j_hat_zero);

// smallest alpha (on a geometric scan) with J_hat_0 < J_hat_alpha < m Delta^2,
// the window of eq. (w16a); nullopt when the scan finds none
std::optional<double> find_alpha_window(const ModelSpec& spec, WeightFamily family,
                                        double m_delta_sq);

struct CriterionReport {
  double theta_d = 0.0;
  double theta_d_error = 0.0;
  std::optional<double> t_star;
  std::optional<double> beta_star;
  std::optional<double> beta_star_residual;
  double delta_gap = 0.0;
  double m_delta_sq = 0.0;
  double j_hat_zero = 0.0;
  bool phase_transition_predicted = false;
  double phase_transition_threshold = 0.0;
  bool quantum_stabilization = false;
  std::optional<bool> nn_stabilization;
  std::optional<double> nn_threshold;
  std::optional<bool> high_T_unique;
  std::optional<double> high_T_beta_max;
  std::optional<double> alpha_window;
};

// end-to-end evaluation for a validated model; the decomposition is caller
// supplied because the split (decom) is not unique
CriterionReport evaluate_criteria(const ModelSpec& spec,
                                  const std::optional<DecompositionSpec>& dec = std::nullopt);

}  // namespace qac
