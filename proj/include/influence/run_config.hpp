#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "influence/dynamics.hpp"
#include "influence/estimate.hpp"
#include "influence/ingest.hpp"

namespace influence {

/// All knobs of a run, parsed from an INI-style file ([section], key =
/// value, # or ; comments). Every field has a default, so an empty file is
/// valid; unknown keys are rejected. resolved() renders the full
/// configuration back out, and every output file starts with that text so
/// the run can be reproduced from its artifacts.
struct RunConfig {
  // [paths]
  std::string sessions_dir;
  std::string sentiment_lexicon;
  std::string emotion_lexicon;
  std::string embeddings_path;
  std::string replay_dataset;  // optional corpus for the fit replay mode
  std::string output_dir = "out";

  // [dynamics]
  ModelKind model = ModelKind::DRP;
  double tau = 0.4;
  int steps = 100;

  // [simulate]
  int team_size = 4;
  std::vector<double> expertise;  // empty: every member 0.5
  std::string start = "random";   // random | uniform
  int starts = 1;

  // [network]
  ResponseWindow window;  // t1 = 0, t2 = 30
  double gamma = 0.1;
  EmotionAxis emotion_axis = EmotionAxis::Valence;

  // [fit]
  std::vector<FeatureKind> features = {FeatureKind::Previous};
  std::optional<double> lambda;  // unset: search lambda_grid on validation
  std::vector<double> lambda_grid;
  ConstraintMode constraints = ConstraintMode::PerSample;
  double train_fraction = 0.8;

  // [bootstrap]
  int bootstrap_b = 1000;

  // [analyze]
  double fdr = 0.05;

  // [seed]
  std::uint64_t seed = 1;

  static RunConfig from_stream(std::istream& in);
  /// Throws Error{IoError} when unreadable, Error{ValidationError} on an
  /// unknown key or a malformed value.
  static RunConfig from_file(const std::string& path);

  /// The full configuration as "section.key = value" lines.
  std::string resolved() const;
  /// resolved() with every line prefixed "# ", ready to head a CSV.
  std::string header_comment() const;
};

}  // namespace influence
