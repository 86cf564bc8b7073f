#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "influence/core.hpp"

namespace influence {

/// Accepts a reply r to message m when m.time < r.time and
/// t1 <= r.time - m.time <= t2. The strict first inequality excludes
/// simultaneous messages even at t1 = 0.
struct ResponseWindow {
  double t1 = 0.0;
  double t2 = 30.0;
};

/// Throws Error{ValidationError} unless 0 <= t1 <= t2 and both are finite.
void validate(const ResponseWindow& window);

enum class NetworkKind { Response, Sentiment, Emotion };
enum class EmotionAxis { Valence, Arousal, Dominance };

const char* to_string(NetworkKind kind);
NetworkKind network_kind_from_string(const std::string& name);
EmotionAxis emotion_axis_from_string(const std::string& name);

/// Token score table. Sentiment files carry one score per token, emotion
/// files carry (valence, arousal, dominance); a single score is served on
/// every axis so callers need not distinguish the two shapes.
class Lexicon {
 public:
  /// CSV rows `token,score` or `token,valence,arousal,dominance`.
  /// Blank lines, `#` comments, and a leading header row are skipped.
  /// Throws Error{ValidationError} on malformed rows or mixed widths.
  static Lexicon from_csv(std::istream& in);
  /// Throws Error{IoError} when the file cannot be opened.
  static Lexicon from_csv_file(const std::string& path);

  void insert(const std::string& token, double score);
  void insert(const std::string& token, double valence, double arousal,
              double dominance);

  bool contains(const std::string& token) const;
  double score(const std::string& token,
               EmotionAxis axis = EmotionAxis::Valence) const;
  int axes() const { return axes_; }
  std::size_t size() const { return table_.size(); }

 private:
  std::unordered_map<std::string, std::array<double, 3>> table_;
  int axes_ = 1;
};

/// Lowercases and splits on every non-alphanumeric byte (ASCII).
std::vector<std::string> tokenize(const std::string& text);

/// Mean lexicon score over the tokens present in the lexicon, on the
/// chosen axis; 0 when nothing matches.
double score_text(const std::string& text, const Lexicon& lexicon,
                  EmotionAxis axis = EmotionAxis::Valence);

/// R(m): messages r with m.time < r.time, t1 <= r.time - m.time <= t2, and
/// r.sender != m.sender. Expects `all` sorted by time.
std::vector<MessageRecord> response_set(const MessageRecord& m,
                                        const std::vector<MessageRecord>& all,
                                        const ResponseWindow& window);

struct NetworkConfig {
  NetworkKind kind = NetworkKind::Response;
  ResponseWindow window;
  double gamma = 0.1;  // per-second decay, Response only; must be > 0
  const Lexicon* lexicon = nullptr;  // Sentiment/Emotion
  EmotionAxis axis = EmotionAxis::Valence;
};

/// A_ij = sum of weight(p, q) over message pairs with p.sender = i,
/// q in R(p), q.sender = j. Weights: Response e^(-gamma |gap|), Sentiment
/// and Emotion the lexicon score of the reply text (no decay). The
/// diagonal is zero by the sender exclusion; an empty chat yields the zero
/// matrix. Messages are sorted by time internally.
ConnectivityNetwork build_network(std::vector<MessageRecord> messages, int n,
                                  const NetworkConfig& config);

/// Parses a session document. Shape:
///   { "team_id": str,
///     "members": [str, ...],
///     "rounds": [ { "questions": [ [ {"answer": any|null,
///                                     "correct": bool}, ... n ], ... ],
///                   "messages": [ {"sender": id|index, "time_s": num,
///                                  "text": str}, ... ],
///                   "influence_report": [[num, ... n], ... n] }, ... ] }
/// A member's answer of null (or an omitted "answer" key next to
/// "correct") marks the question unanswered. Report rows are rescaled to
/// sum 1, so raw chip counts are accepted. Messages are sorted by time.
/// Throws Error{SchemaError} for missing/mistyped fields and
/// Error{ValidationError} for unknown senders, non-finite times, or
/// reports that fail matrix validation.
TeamSession parse_session(std::istream& in);
TeamSession parse_session_file(const std::string& path);

/// Every *.json under dir, lexicographic order.
/// Throws Error{IoError} when the directory cannot be read.
std::vector<TeamSession> load_sessions(const std::string& dir);

/// Per-member embedding vectors keyed by (team_id, round, member_id).
class EmbeddingStore {
 public:
  /// JSON: [ {"team_id": str, "round": int, "member_id": str,
  ///          "embedding": [num, ...]}, ... ]
  static EmbeddingStore from_json(std::istream& in);
  /// CSV: header `team_id,round,member_id,e0,...`, one vector per row.
  static EmbeddingStore from_csv(std::istream& in);
  /// Dispatches on the .json / .csv extension.
  static EmbeddingStore from_file(const std::string& path);

  void insert(const std::string& team_id, int round,
              const std::string& member_id, Eigen::VectorXd embedding);

  const Eigen::VectorXd* find(const std::string& team_id, int round,
                              const std::string& member_id) const;
  int dim() const { return dim_; }
  std::size_t size() const { return table_.size(); }

 private:
  std::map<std::tuple<std::string, int, std::string>, Eigen::VectorXd> table_;
  int dim_ = 0;
};

/// The inputs an estimator may consume for one (team, round) target.
enum class FeatureKind {
  Previous,   // the round t-1 report
  First,      // the round 1 report
  Average,    // mean of the reports before round t
  Expertise,  // cumulative correct rate through round t
  Response,   // response networks summed over rounds 1..t
  Sentiment,
  Emotion,
  Embedding,  // external n x d content embedding for round t
};

const char* to_string(FeatureKind kind);
FeatureKind feature_kind_from_string(const std::string& name);

struct FeatureConfig {
  std::vector<FeatureKind> kinds;
  ResponseWindow window;
  double gamma = 0.1;
  const Lexicon* sentiment_lexicon = nullptr;
  const Lexicon* emotion_lexicon = nullptr;
  EmotionAxis emotion_axis = EmotionAxis::Valence;
  const EmbeddingStore* embeddings = nullptr;
};

/// Everything assembled for predicting one team's round-t report. Fields
/// are only populated when requested and available; feature_matrix()
/// raises Error{MissingFeature} for the rest.
struct FeatureBundle {
  std::string team_id;
  int round = 0;  // target round t, 1-based
  int n = 0;

  std::optional<InfluenceMatrix> previous;
  std::optional<InfluenceMatrix> first;
  std::optional<InfluenceMatrix> average;
  std::optional<ExpertiseVector> expertise;
  std::optional<ConnectivityNetwork> response;
  std::optional<ConnectivityNetwork> sentiment;
  std::optional<ConnectivityNetwork> emotion;
  std::optional<Eigen::MatrixXd> embedding;  // n x d

  bool has(FeatureKind kind) const;

  /// The n x c design matrix for one feature. Influence matrices and
  /// networks pass through as n x n; expertise broadcasts to the rank-one
  /// matrix 1 y^T so every rater row sees the same per-member scores;
  /// embeddings pass through as n x d.
  Eigen::MatrixXd feature_matrix(FeatureKind kind) const;
};

/// Builds the bundle for target round upto_round (1-based) from data
/// available at report time: messages and expertise through round t,
/// influence reports strictly before t. Cross-round networks are the sum
/// of per-round networks, since message clocks restart each round.
/// Throws Error{MissingFeature} when a requested feature is unavailable
/// (for example Previous at t = 1) and Error{ValidationError} for an
/// out-of-range round.
FeatureBundle assemble_features(const TeamSession& session, int upto_round,
                                const FeatureConfig& config);

struct Sample {
  FeatureBundle features;
  InfluenceMatrix target;
};

/// All (features, report) pairs across the sessions. Rounds lacking a
/// report or any requested feature are skipped rather than failing, so a
/// Previous-based dataset starts at each team's round 2.
std::vector<Sample> build_dataset(const std::vector<TeamSession>& sessions,
                                  const FeatureConfig& config);

}  // namespace influence
