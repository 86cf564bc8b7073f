#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "influence/error.hpp"

namespace influence {

inline constexpr double kRowSumTol = 1e-9;
inline constexpr double kUpdateDriftTol = 1e-12;
inline constexpr double kStationaryTol = 1e-10;
inline constexpr int kStationaryMaxIter = 10000;

/// Nonnegative square matrix whose rows each sum to 1 within kRowSumTol.
/// Construct via validate_row_stochastic() (renormalizes to exact sums) or
/// from_update() (trusts analytically stochastic results); instances are
/// immutable.
class InfluenceMatrix {
 public:
  const Eigen::MatrixXd& matrix() const { return m_; }
  int size() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }

  /// Wraps the output of an update rule that preserves row sums
  /// analytically. A row is renormalized only when its float drift exceeds
  /// drift_tol; otherwise entries are kept bit-for-bit.
  static InfluenceMatrix from_update(Eigen::MatrixXd m,
                                     double drift_tol = kUpdateDriftTol);

  friend InfluenceMatrix validate_row_stochastic(const Eigen::MatrixXd& matrix,
                                                 double tol);

 private:
  explicit InfluenceMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {}
  Eigen::MatrixXd m_;
};

/// Nonnegative vector summing to exactly 1 (a point on the simplex).
class SimplexVector {
 public:
  static SimplexVector validated(const Eigen::VectorXd& v,
                                 double tol = kRowSumTol);

  const Eigen::VectorXd& values() const { return v_; }
  int size() const { return static_cast<int>(v_.size()); }
  double operator()(int i) const { return v_(i); }

 private:
  explicit SimplexVector(Eigen::VectorXd v) : v_(std::move(v)) {}
  Eigen::VectorXd v_;
};

/// Per-member cumulative correct-answer rate, each entry in [0,1].
class ExpertiseVector {
 public:
  static ExpertiseVector validated(const Eigen::VectorXd& v);

  const Eigen::VectorXd& values() const { return v_; }
  int size() const { return static_cast<int>(v_.size()); }
  double operator()(int i) const { return v_(i); }

 private:
  explicit ExpertiseVector(Eigen::VectorXd v) : v_(std::move(v)) {}
  Eigen::VectorXd v_;
};

/// Diagonal of an influence matrix (self-appraisals), entries in [0,1].
class SelfWeightVector {
 public:
  static SelfWeightVector validated(const Eigen::VectorXd& v);
  static SelfWeightVector diagonal_of(const InfluenceMatrix& m);

  const Eigen::VectorXd& values() const { return v_; }
  int size() const { return static_cast<int>(v_.size()); }
  double operator()(int i) const { return v_(i); }

 private:
  explicit SelfWeightVector(Eigen::VectorXd v) : v_(std::move(v)) {}
  Eigen::VectorXd v_;
};

struct QuestionRecord {
  // member index -> answered?/correct?; members absent from a question
  // simply have answered=false.
  std::vector<bool> answered;
  std::vector<bool> correct;
};

struct MessageRecord {
  int sender;     // member index
  double time_s;  // seconds from round start
  std::string text;
};

struct RoundRecord {
  std::vector<QuestionRecord> questions;
  std::vector<MessageRecord> messages;
  std::optional<InfluenceMatrix> influence_report;
};

/// One team's full experiment log.
struct TeamSession {
  std::string team_id;
  std::vector<std::string> member_ids;
  std::vector<RoundRecord> rounds;

  int size() const { return static_cast<int>(member_ids.size()); }
  int round_count() const { return static_cast<int>(rounds.size()); }
};

/// Directed weighted interaction matrix with zero diagonal. Response
/// networks are nonnegative; sentiment/emotion variants may carry signed
/// entries.
struct ConnectivityNetwork {
  Eigen::MatrixXd weights;

  int size() const { return static_cast<int>(weights.rows()); }
};

/// Checks entries >= 0 and row sums == 1 within tol. Rows whose sum
/// deviates by <= tol are renormalized so that the stored row sums to
/// exactly 1.0, which makes validation idempotent.
/// Throws Error{NegativeEntry, RowSumViolation, DimensionMismatch}.
InfluenceMatrix validate_row_stochastic(const Eigen::MatrixXd& matrix,
                                        double tol = kRowSumTol);

/// Left stationary vector of a row-stochastic matrix: pi with pi^T P = pi^T,
/// computed by damped power iteration from the uniform vector. The damping
/// (iterating (P+I)/2, which has the same stationary vectors) makes periodic
/// chains converge as well. Residual is measured on P itself.
/// Throws Error{NoConvergence} if the l1 residual stays >= tol.
SimplexVector left_stationary(const InfluenceMatrix& P,
                              double tol = kStationaryTol,
                              int max_iter = kStationaryMaxIter);

}  // namespace influence
