#pragma once

#include <map>
#include <string>
#include <vector>

#include "influence/ingest.hpp"

namespace influence {

/// Weights of the linear model: prediction = sum_k X_k W_k^T + B, one W_k
/// per feature in `kinds` order. W_k is n x cols(X_k) (so n x n for matrix
/// features and n x d for embeddings); B is n x n.
struct LinearWeights {
  std::vector<FeatureKind> kinds;
  std::vector<Eigen::MatrixXd> W;
  Eigen::MatrixXd B;
  double lambda = 0.0;
};

/// Row-wise softmax model. Row i of the prediction is
/// softmax(W^T x_i + b) where x_i concatenates row i of every feature
/// matrix in `kinds` order.
struct SoftmaxWeights {
  std::vector<FeatureKind> kinds;
  Eigen::MatrixXd W;  // feature dim x n
  Eigen::VectorXd b;  // n
  double lambda = 0.0;
};

/// Whether the stochasticity constraints bind each predicted matrix or
/// only the average prediction over the training set.
enum class ConstraintMode { PerSample, Aggregate };

struct SolverConfig {
  int max_iters = 2000;       // per penalty stage
  double tol = 1e-9;          // relative objective-change stop
  double initial_step = 1.0;  // backtracking resets from here
  double backtrack = 0.5;
  // Constraint penalty schedule for the linear model: stage s uses
  // penalty_start * penalty_growth^s.
  int penalty_stages = 4;
  double penalty_start = 10.0;
  double penalty_growth = 10.0;
  ConstraintMode constraints = ConstraintMode::PerSample;
};

struct FitReport {
  double final_objective = 0.0;  // data term + l1, penalty excluded
  int iterations = 0;            // accepted steps, all stages
  bool converged = true;         // every stage met tol before its cap
  double max_constraint_violation = 0.0;
  std::map<std::string, double> feature_l1;
  // Accepted objective values per penalty stage (softmax: one stage).
  // Nonincreasing within each stage by the backtracking contract.
  std::vector<std::vector<double>> stage_traces;

  std::string to_json() const;
};

/// Minimizes sum_s ||sum_k X_k W_k^T + B - M_s||_F^2
///            + lambda (sum_k ||W_k||_1 + ||B||_1)
/// subject to predictions being nonnegative with unit row sums, via
/// proximal gradient steps with backtracking; constraints enter as a
/// squared-hinge / squared-deviation penalty annealed over
/// config.penalty_stages. Deterministic.
/// Throws Error{MissingFeature} when a bundle lacks a requested kind,
/// Error{DimensionMismatch} on inconsistent shapes, Error{Infeasible} if
/// the annealed solution still violates constraints grossly, and
/// Error{NoConvergence} when no descent step exists at the start.
LinearWeights fit_linear(const std::vector<Sample>& dataset,
                         const std::vector<FeatureKind>& kinds, double lambda,
                         const SolverConfig& config,
                         FitReport* report = nullptr);

/// sum_k X_k W_k^T + B, unconstrained.
Eigen::MatrixXd predict_linear_raw(const LinearWeights& weights,
                                   const FeatureBundle& bundle);

/// predict_linear_raw with every row projected onto the simplex.
InfluenceMatrix predict_linear(const LinearWeights& weights,
                               const FeatureBundle& bundle);

/// Euclidean projection onto {u : u >= 0, sum u = 1}.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

/// One training row for the softmax model.
struct RowSample {
  Eigen::VectorXd x;       // concatenated feature rows
  Eigen::VectorXd target;  // a simplex row
};

/// Flattens matrix samples into per-row samples in `kinds` order.
std::vector<RowSample> row_samples(const std::vector<Sample>& dataset,
                                   const std::vector<FeatureKind>& kinds);

/// Total cross-entropy of softmax(W^T x + b) against the targets, without
/// the l1 term.
double softmax_loss(const Eigen::MatrixXd& W, const Eigen::VectorXd& b,
                    const std::vector<RowSample>& rows);

/// Analytic gradient of softmax_loss.
void softmax_loss_gradient(const Eigen::MatrixXd& W, const Eigen::VectorXd& b,
                           const std::vector<RowSample>& rows,
                           Eigen::MatrixXd& gW, Eigen::VectorXd& gb);

/// Minimizes softmax_loss + lambda (||W||_1 + ||b||_1) by proximal
/// gradient with backtracking. Deterministic.
SoftmaxWeights fit_softmax_rows(const std::vector<RowSample>& rows, int n_out,
                                double lambda, const SolverConfig& config,
                                FitReport* report = nullptr);

/// row_samples + fit_softmax_rows, recording the feature order.
SoftmaxWeights fit_softmax(const std::vector<Sample>& dataset,
                           const std::vector<FeatureKind>& kinds,
                           double lambda, const SolverConfig& config,
                           FitReport* report = nullptr);

/// softmax(W^T x + b); lands on the simplex without projection.
Eigen::VectorXd predict_softmax_row(const SoftmaxWeights& weights,
                                    const Eigen::VectorXd& x);

InfluenceMatrix predict_softmax(const SoftmaxWeights& weights,
                                const FeatureBundle& bundle);

/// Entrywise l1 norm of each W_k, keyed by feature name, plus "bias".
std::map<std::string, double> feature_importance(const LinearWeights& weights);

/// The lambda values searched when none is pinned.
std::vector<double> default_lambda_grid();

std::string to_json(const LinearWeights& weights);
LinearWeights linear_weights_from_json(const std::string& text);
std::string to_json(const SoftmaxWeights& weights);
SoftmaxWeights softmax_weights_from_json(const std::string& text);

}  // namespace influence
