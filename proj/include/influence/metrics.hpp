#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "influence/core.hpp"

namespace influence {

inline constexpr double kKlClampEps = 1e-9;

/// (1/n) ||M - Mhat||_F^2.
double mse(const Eigen::MatrixXd& M, const Eigen::MatrixXd& Mhat);
double mse(const InfluenceMatrix& M, const InfluenceMatrix& Mhat);

/// (1/n) sum_ij M_ij log(M_ij / max(Mhat_ij, eps)), with 0 log(0/.) = 0.
double kl(const Eigen::MatrixXd& M, const Eigen::MatrixXd& Mhat,
          double eps = kKlClampEps);
double kl(const InfluenceMatrix& M, const InfluenceMatrix& Mhat,
          double eps = kKlClampEps);

/// Self-appraisals: the diagonal of M.
Eigen::VectorXd confidence(const InfluenceMatrix& M);

/// Mean influence accorded by the others: p_i = (1/(n-1)) sum_{j != i} M_ji.
Eigen::VectorXd local_persuasiveness(const InfluenceMatrix& M);

/// Zero-diagonal relative appraisal matrix C: remove the diagonal and
/// rescale each row to sum 1. Throws Error{IsolatedRater} when a row has
/// no positive off-diagonal weight.
InfluenceMatrix relative_appraisal(const InfluenceMatrix& M);

/// Stationary vector of the relative appraisal matrix.
/// Throws Error{IsolatedRater, NoConvergence}.
SimplexVector global_persuasiveness(const InfluenceMatrix& M);

/// Per-row squared distance from the uniform row:
/// D_i = sum_j (M_ij - 1/n)^2.
Eigen::VectorXd mean_reversion(const InfluenceMatrix& M);

/// Cumulative correct-answer rate per member at each round boundary
/// (questions up to and including that round). Members with no answers so
/// far get expertise 0.
std::vector<ExpertiseVector> expertise_series(const TeamSession& session);

struct MetricRow {
  std::string team;
  int round = 0;
  std::string metric;
  double value = 0.0;
};

/// Flat per-(team, round, metric) table with aggregate summaries.
struct MetricReport {
  std::vector<MetricRow> rows;

  void add(const std::string& team, int round, const std::string& metric,
           double value);

  // Aggregates over every row carrying the named metric.
  double mean(const std::string& metric) const;
  double median(const std::string& metric) const;
  double quantile(const std::string& metric, double q) const;

  void write_csv(std::ostream& out) const;
  std::string to_json() const;
};

}  // namespace influence
