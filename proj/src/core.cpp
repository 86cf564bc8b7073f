#include "influence/core.hpp"

#include <cmath>
#include <sstream>

namespace influence {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NegativeEntry: return "NegativeEntry";
    case ErrorKind::RowSumViolation: return "RowSumViolation";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::ZeroExpertise: return "ZeroExpertise";
    case ErrorKind::DegeneratePerception: return "DegeneratePerception";
    case ErrorKind::EmptyHistory: return "EmptyHistory";
    case ErrorKind::TeamTooSmall: return "TeamTooSmall";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::IsolatedRater: return "IsolatedRater";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::MissingFeature: return "MissingFeature";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::DegenerateSeries: return "DegenerateSeries";
    case ErrorKind::SeriesTooShort: return "SeriesTooShort";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

// Sum with the largest entry added last. Pairing this order with the
// renormalization below guarantees the stored sum is exactly 1.0, so a
// second validation pass returns its input unchanged.
double anchored_sum(const Eigen::VectorXd& v, int* largest) {
  int amax = 0;
  v.maxCoeff(&amax);
  double rest = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    if (i != amax) rest += v(i);
  }
  *largest = amax;
  return rest + v(amax);
}

// Renormalize a nonnegative row so the anchored sum is exactly 1.0:
// divide by the current sum, then recompute the largest entry as
// 1 - (sum of the others).
void renormalize_exact(Eigen::Ref<Eigen::VectorXd> v) {
  int amax = 0;
  double s = anchored_sum(v, &amax);
  if (s == 1.0) return;
  v /= s;
  v.maxCoeff(&amax);
  double rest = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    if (i != amax) rest += v(i);
  }
  v(amax) = 1.0 - rest;
}

}  // namespace

InfluenceMatrix InfluenceMatrix::from_update(Eigen::MatrixXd m,
                                             double drift_tol) {
  const int n = static_cast<int>(m.rows());
  for (int i = 0; i < n; ++i) {
    double s = m.row(i).sum();
    if (std::abs(s - 1.0) > drift_tol) m.row(i) /= s;
  }
  return InfluenceMatrix(std::move(m));
}

InfluenceMatrix validate_row_stochastic(const Eigen::MatrixXd& matrix,
                                        double tol) {
  if (matrix.rows() != matrix.cols()) {
    std::ostringstream msg;
    msg << "expected square matrix, got " << matrix.rows() << "x"
        << matrix.cols();
    throw Error(ErrorKind::DimensionMismatch, msg.str());
  }
  const int n = static_cast<int>(matrix.rows());
  Eigen::MatrixXd m = matrix;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (m(i, j) < -tol) {
        std::ostringstream msg;
        msg << "entry (" << i << "," << j << ") = " << m(i, j);
        throw Error(ErrorKind::NegativeEntry, msg.str());
      }
      if (m(i, j) < 0.0) m(i, j) = 0.0;
    }
  }
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd row = m.row(i);
    int amax = 0;
    double s = anchored_sum(row, &amax);
    if (std::abs(s - 1.0) > tol) {
      std::ostringstream msg;
      msg << "row " << i << " sums to " << s;
      throw Error(ErrorKind::RowSumViolation, msg.str());
    }
    renormalize_exact(row);
    m.row(i) = row;
  }
  return InfluenceMatrix(std::move(m));
}

SimplexVector SimplexVector::validated(const Eigen::VectorXd& v, double tol) {
  Eigen::VectorXd x = v;
  for (int i = 0; i < x.size(); ++i) {
    if (x(i) < -tol) {
      throw Error(ErrorKind::NegativeEntry,
                  "simplex entry " + std::to_string(i) + " is negative");
    }
    if (x(i) < 0.0) x(i) = 0.0;
  }
  int amax = 0;
  double s = anchored_sum(x, &amax);
  if (std::abs(s - 1.0) > tol) {
    throw Error(ErrorKind::RowSumViolation,
                "simplex vector sums to " + std::to_string(s));
  }
  renormalize_exact(x);
  return SimplexVector(std::move(x));
}

namespace {

// Clamps float excursions of at most `slack` outside [0,1]; anything larger
// is a genuine violation.
Eigen::VectorXd clamp_unit_interval(const Eigen::VectorXd& v, const char* what,
                                    double slack = 1e-12) {
  Eigen::VectorXd x = v;
  for (int i = 0; i < x.size(); ++i) {
    if (x(i) < -slack || x(i) > 1.0 + slack) {
      throw Error(ErrorKind::ValidationError,
                  std::string(what) + " entry " + std::to_string(i) +
                      " outside [0,1]: " + std::to_string(x(i)));
    }
    if (x(i) < 0.0) x(i) = 0.0;
    if (x(i) > 1.0) x(i) = 1.0;
  }
  return x;
}

}  // namespace

ExpertiseVector ExpertiseVector::validated(const Eigen::VectorXd& v) {
  return ExpertiseVector(clamp_unit_interval(v, "expertise"));
}

SelfWeightVector SelfWeightVector::validated(const Eigen::VectorXd& v) {
  return SelfWeightVector(clamp_unit_interval(v, "self-weight"));
}

SelfWeightVector SelfWeightVector::diagonal_of(const InfluenceMatrix& m) {
  return SelfWeightVector(m.matrix().diagonal());
}

SimplexVector left_stationary(const InfluenceMatrix& P, double tol,
                              int max_iter) {
  const int n = P.size();
  const Eigen::MatrixXd& M = P.matrix();
  Eigen::RowVectorXd pi = Eigen::RowVectorXd::Constant(n, 1.0 / n);

  auto residual = [&](const Eigen::RowVectorXd& x) {
    return (x * M - x).cwiseAbs().sum();
  };

  double res = residual(pi);
  for (int iter = 0; iter < max_iter && res >= tol; ++iter) {
    // Half-lazy step: pi <- pi (P + I)/2. Same fixed points as P, but
    // aperiodic, so two-cycles of the plain iteration damp out.
    pi = 0.5 * (pi * M + pi);
    pi /= pi.sum();
    res = residual(pi);
  }
  if (res >= tol) {
    throw Error(ErrorKind::NoConvergence,
                "stationary iteration residual " + std::to_string(res) +
                    " after " + std::to_string(max_iter) + " iterations");
  }
  return SimplexVector::validated(pi.transpose());
}

}  // namespace influence
