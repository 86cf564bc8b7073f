#pragma once

#include <vector>

#include "influence/core.hpp"

namespace influence {

// The three cognitive update rules. D differentiates by normalized
// expertise; DR adds uniform reversion for low performers; DRP drives the
// reversion mix with confidence-skewed (perceived) expertise.
enum class ModelKind { D, DR, DRP };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct DynamicsConfig {
  double tau = 0.4;  // time-scale, must lie in (0,1)
  ModelKind model = ModelKind::DRP;
};

/// y / (1^T y). Throws Error{ZeroExpertise} when all entries are zero.
SimplexVector normalize_expertise(const Eigen::VectorXd& y);
SimplexVector normalize_expertise(const ExpertiseVector& y);

/// diag(m_d) y / (m_d^T y): expertise reweighted by self-confidence.
/// Throws Error{DegeneratePerception} when m_d^T y = 0.
SimplexVector perceived_expertise(const Eigen::VectorXd& y,
                                  const SelfWeightVector& m_d);
SimplexVector perceived_expertise(const ExpertiseVector& y,
                                  const SelfWeightVector& m_d);

/// D model: M' = (1-tau) M + tau 1 y_bar^T.
InfluenceMatrix step_d(const InfluenceMatrix& M, const SimplexVector& y_bar,
                       double tau);

/// Shared DR/DRP update with weighting vector x on the simplex:
/// M'_ij = (1-tau) M_ij + tau (x_i x_j + (1-x_i)/n).
InfluenceMatrix weighted_reversion_update(const InfluenceMatrix& M,
                                          const SimplexVector& x, double tau);

/// DR model: weighted_reversion_update with x = normalized expertise.
InfluenceMatrix step_dr(const InfluenceMatrix& M, const SimplexVector& y_bar,
                        double tau);

/// DRP model: weighted_reversion_update with x = perceived expertise
/// computed from diag(M). Throws Error{DegeneratePerception} when no i has
/// both M_ii > 0 and y_i > 0.
InfluenceMatrix step_drp(const InfluenceMatrix& M, const Eigen::VectorXd& y,
                         double tau);
InfluenceMatrix step_drp(const InfluenceMatrix& M, const ExpertiseVector& y,
                         double tau);

/// One step of the configured model. D and DR consume the normalized form
/// of y; DRP consumes y directly.
InfluenceMatrix step_model(const InfluenceMatrix& M, const Eigen::VectorXd& y,
                           const DynamicsConfig& config);

struct RoundObservation {
  InfluenceMatrix matrix;
  ExpertiseVector expertise;
};

/// Predicts round t+1 from the ground-truth matrix and expertise of round
/// t, for every t >= 1. Returns one prediction per future round (2..T).
std::vector<InfluenceMatrix> forecast_single_round(
    const std::vector<RoundObservation>& truth, const DynamicsConfig& config);

/// Chains predictions on predictions: round 2 comes from the reported M1,
/// every later round from the previous prediction. expertise[t] feeds the
/// step into round t+2.
std::vector<InfluenceMatrix> forecast_multi_round(
    const InfluenceMatrix& first, const std::vector<ExpertiseVector>& expertise,
    const DynamicsConfig& config);
std::vector<InfluenceMatrix> forecast_multi_round(
    const InfluenceMatrix& first, const std::vector<Eigen::VectorXd>& expertise,
    const DynamicsConfig& config);

/// Closed recursion for the DRP self-weights:
/// m'_i = (1-tau) m_i + tau (yhat_i^2 + (1-yhat_i)/n).
/// Returns steps+1 points including the start; matches the diagonal of
/// step_drp iterates bit-for-bit by using the same arithmetic.
std::vector<SelfWeightVector> self_weight_trajectory(
    const SelfWeightVector& m_d, const Eigen::VectorXd& y, double tau,
    int steps);

}  // namespace influence
