#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "influence/core.hpp"

namespace influence {

/// One member's expertise, confidence and persuasiveness across the
/// rounds that carried an influence report.
struct TimeSeriesTriple {
  std::string member_id;
  Eigen::VectorXd expertise;
  Eigen::VectorXd confidence;
  Eigen::VectorXd persuasiveness;
};

/// Per-member triples for one session. Rounds without a report are
/// dropped from all three series so the rows stay aligned.
std::vector<TimeSeriesTriple> session_triples(const TeamSession& session);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double df = 0.0;      // t tests: residual df; F tests: denominator df
  double df_num = 0.0;  // F tests only
  std::string label;
  bool low_power = false;  // F denominator df < 5
};

/// Pearson r with the two-sided p-value of the t transform on n-2 df.
/// Throws Error{SeriesTooShort} (n < 3), Error{DimensionMismatch},
/// Error{DegenerateSeries} (zero variance).
TestResult pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

struct OlsResult {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd std_errors;
  Eigen::VectorXd t_values;
  Eigen::VectorXd p_values;  // two-sided, residual df
  double sigma2 = 0.0;       // unbiased residual variance
  double r_squared = 0.0;
  double log_likelihood = 0.0;  // Gaussian, at the MLE variance
  double aic = 0.0;             // 2k - 2 ll, k = coefficients + 1 (variance)
  double bic = 0.0;             // k ln(n) - 2 ll
  int df_residual = 0;
};

/// Least squares of y on X (caller supplies the intercept column).
/// Throws Error{RankDeficient} (collinear or too-few rows).
OlsResult ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// Variance inflation factors: 1 / (1 - R^2) from regressing each
/// predictor on the others plus an intercept. X carries the predictors
/// only. Throws Error{ValidationError} (< 2 columns), Error{RankDeficient}
/// (an R^2 of 1, e.g. a duplicated predictor).
Eigen::VectorXd vif(const Eigen::MatrixXd& X);

/// F-test of whether lags of x improve an AR(lag) model of y.
/// Denominator df below 5 sets low_power. Throws Error{SeriesTooShort}
/// (needs length >= 3 lag + 2 so the F statistic has positive df),
/// Error{DegenerateSeries} (constant series or collinear lag design).
TestResult granger(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                   int lag);

struct BhResult {
  std::vector<bool> reject;
  double threshold = 0.0;  // k* fdr / m, 0 when nothing is rejected
  int rejected = 0;
};

/// Benjamini-Hochberg step-up at the given false discovery rate.
/// Throws Error{ValidationError} on p outside [0,1] or fdr outside (0,1).
BhResult bh_correct(const std::vector<double>& p_values, double fdr);

struct BootstrapSummary {
  double mean = 0.0;
  double std_dev = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
  std::vector<double> means;  // one resampled mean per draw
};

/// Resamples the error list with replacement B times (each resample of
/// the original size) and summarizes the resampled means. Deterministic
/// in the seed. Throws Error{ValidationError} on empty input or B < 1.
BootstrapSummary bootstrap_eval(const std::vector<double>& errors, int B,
                                std::uint64_t seed);

struct CausalCell {
  std::string cause;   // "expertise" | "confidence" | "persuasiveness"
  std::string effect;
  int lag = 0;
  int tested = 0;       // members whose test ran
  int significant = 0;  // of those, BH-rejected
  double proportion = 0.0;
};

struct CausalSummary {
  std::vector<CausalCell> cells;  // 6 directed pairs x lags {1, 2}
  double bh_threshold = 0.0;
  int total_tests = 0;
  int skipped = 0;  // member-pair tests dropped as short or degenerate
  // "cause->effect" sorted by descending lag-1 proportion.
  std::vector<std::string> lag1_ranking;
};

/// Granger tests for all 6 directed pairs among the three series, lags 1
/// and 2, per member; pools every p-value through one BH correction and
/// reports the share of members significant per (pair, lag). Short or
/// degenerate member series are skipped and counted, not fatal.
CausalSummary causal_summary(const std::vector<TimeSeriesTriple>& triples,
                             double fdr);

}  // namespace influence
