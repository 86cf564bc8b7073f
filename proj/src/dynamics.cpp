#include "influence/dynamics.hpp"

#include <cmath>
#include <string>

namespace influence {

namespace {

void check_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw Error(ErrorKind::ValidationError,
                "tau must lie in (0,1), got " + std::to_string(tau));
  }
}

void check_same_size(int n, int m) {
  if (n != m) {
    throw Error(ErrorKind::DimensionMismatch,
                "matrix size " + std::to_string(n) +
                    " vs vector size " + std::to_string(m));
  }
}

void check_nonnegative(const Eigen::VectorXd& y) {
  for (int i = 0; i < y.size(); ++i) {
    if (y(i) < 0.0) {
      throw Error(ErrorKind::ValidationError,
                  "expertise entry " + std::to_string(i) + " is negative");
    }
  }
}

}  // namespace

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::D: return "D";
    case ModelKind::DR: return "DR";
    case ModelKind::DRP: return "DRP";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "D" || name == "d") return ModelKind::D;
  if (name == "DR" || name == "dr") return ModelKind::DR;
  if (name == "DRP" || name == "drp") return ModelKind::DRP;
  throw Error(ErrorKind::ValidationError, "unknown model kind '" + name + "'");
}

SimplexVector normalize_expertise(const Eigen::VectorXd& y) {
  check_nonnegative(y);
  double total = y.sum();
  if (total <= 0.0) {
    throw Error(ErrorKind::ZeroExpertise, "all expertise entries are zero");
  }
  return SimplexVector::validated(y / total);
}

SimplexVector normalize_expertise(const ExpertiseVector& y) {
  return normalize_expertise(y.values());
}

SimplexVector perceived_expertise(const Eigen::VectorXd& y,
                                  const SelfWeightVector& m_d) {
  check_same_size(m_d.size(), static_cast<int>(y.size()));
  check_nonnegative(y);
  double denom = m_d.values().dot(y);
  if (denom <= 0.0) {
    throw Error(ErrorKind::DegeneratePerception,
                "m_d^T y = 0: no member with positive self-weight and "
                "positive expertise");
  }
  Eigen::VectorXd scaled = (m_d.values().array() * y.array()) / denom;
  return SimplexVector::validated(scaled);
}

SimplexVector perceived_expertise(const ExpertiseVector& y,
                                  const SelfWeightVector& m_d) {
  return perceived_expertise(y.values(), m_d);
}

InfluenceMatrix step_d(const InfluenceMatrix& M, const SimplexVector& y_bar,
                       double tau) {
  check_tau(tau);
  check_same_size(M.size(), y_bar.size());
  const int n = M.size();
  Eigen::MatrixXd next(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      next(i, j) = (1.0 - tau) * M(i, j) + tau * y_bar(j);
    }
  }
  return InfluenceMatrix::from_update(std::move(next));
}

InfluenceMatrix weighted_reversion_update(const InfluenceMatrix& M,
                                          const SimplexVector& x, double tau) {
  check_tau(tau);
  check_same_size(M.size(), x.size());
  const int n = M.size();
  Eigen::MatrixXd next(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      next(i, j) = (1.0 - tau) * M(i, j) +
                   tau * (x(i) * x(j) + (1.0 - x(i)) / n);
    }
  }
  return InfluenceMatrix::from_update(std::move(next));
}

InfluenceMatrix step_dr(const InfluenceMatrix& M, const SimplexVector& y_bar,
                        double tau) {
  return weighted_reversion_update(M, y_bar, tau);
}

InfluenceMatrix step_drp(const InfluenceMatrix& M, const Eigen::VectorXd& y,
                         double tau) {
  SimplexVector y_hat =
      perceived_expertise(y, SelfWeightVector::diagonal_of(M));
  return weighted_reversion_update(M, y_hat, tau);
}

InfluenceMatrix step_drp(const InfluenceMatrix& M, const ExpertiseVector& y,
                         double tau) {
  return step_drp(M, y.values(), tau);
}

InfluenceMatrix step_model(const InfluenceMatrix& M, const Eigen::VectorXd& y,
                           const DynamicsConfig& config) {
  switch (config.model) {
    case ModelKind::D:
      return step_d(M, normalize_expertise(y), config.tau);
    case ModelKind::DR:
      return step_dr(M, normalize_expertise(y), config.tau);
    case ModelKind::DRP:
      return step_drp(M, y, config.tau);
  }
  throw Error(ErrorKind::ValidationError, "unreachable model kind");
}

std::vector<InfluenceMatrix> forecast_single_round(
    const std::vector<RoundObservation>& truth, const DynamicsConfig& config) {
  if (truth.size() < 2) {
    throw Error(ErrorKind::ValidationError,
                "single-round forecast needs at least two observed rounds");
  }
  std::vector<InfluenceMatrix> predictions;
  predictions.reserve(truth.size() - 1);
  for (std::size_t t = 0; t + 1 < truth.size(); ++t) {
    predictions.push_back(
        step_model(truth[t].matrix, truth[t].expertise.values(), config));
  }
  return predictions;
}

std::vector<InfluenceMatrix> forecast_multi_round(
    const InfluenceMatrix& first, const std::vector<Eigen::VectorXd>& expertise,
    const DynamicsConfig& config) {
  if (expertise.empty()) {
    throw Error(ErrorKind::ValidationError,
                "multi-round forecast needs at least one expertise vector");
  }
  std::vector<InfluenceMatrix> predictions;
  predictions.reserve(expertise.size());
  InfluenceMatrix current = first;
  for (const auto& y : expertise) {
    current = step_model(current, y, config);
    predictions.push_back(current);
  }
  return predictions;
}

std::vector<InfluenceMatrix> forecast_multi_round(
    const InfluenceMatrix& first, const std::vector<ExpertiseVector>& expertise,
    const DynamicsConfig& config) {
  std::vector<Eigen::VectorXd> raw;
  raw.reserve(expertise.size());
  for (const auto& y : expertise) raw.push_back(y.values());
  return forecast_multi_round(first, raw, config);
}

std::vector<SelfWeightVector> self_weight_trajectory(
    const SelfWeightVector& m_d, const Eigen::VectorXd& y, double tau,
    int steps) {
  check_tau(tau);
  const int n = m_d.size();
  std::vector<SelfWeightVector> trajectory;
  trajectory.reserve(steps + 1);
  trajectory.push_back(m_d);
  SelfWeightVector current = m_d;
  for (int s = 0; s < steps; ++s) {
    SimplexVector y_hat = perceived_expertise(y, current);
    Eigen::VectorXd next(n);
    for (int i = 0; i < n; ++i) {
      // Same expression, same order as weighted_reversion_update's i==j
      // branch, so the trajectories agree bit-for-bit.
      next(i) = (1.0 - tau) * current(i) +
                tau * (y_hat(i) * y_hat(i) + (1.0 - y_hat(i)) / n);
    }
    current = SelfWeightVector::validated(next);
    trajectory.push_back(current);
  }
  return trajectory;
}

}  // namespace influence
