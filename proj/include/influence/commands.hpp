#pragma once

#include "influence/run_config.hpp"

namespace influence {

// Each command writes its outputs under config.output_dir, prefixing every
// file with the resolved configuration, and returns 0 only when every
// requested output was written. Team-level problems are reported to
// stderr and turn the exit code nonzero without aborting the other teams.

/// Steps the configured model from one or more start matrices and writes
/// per-step self-weight and full-matrix trajectories.
int cmd_simulate(const RunConfig& config);

/// Single- and multi-round forecasts of every session's reports under the
/// three cognitive models and the reference baselines, with per-round MSE
/// and KL tables.
int cmd_forecast(const RunConfig& config);

/// 80/20 team split, trains the linear and softmax estimators, evaluates
/// them and the baselines on the held-out rounds with a bootstrap, and
/// writes weights, fit reports, and the feature-importance table.
int cmd_fit(const RunConfig& config);

/// Correlation, regression (with VIF and information criteria), and
/// Granger-causality summaries over expertise/confidence/persuasiveness
/// series.
int cmd_analyze(const RunConfig& config);

/// Response/sentiment/emotion connectivity matrices per (team, round).
int cmd_networks(const RunConfig& config);

}  // namespace influence
