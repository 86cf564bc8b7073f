#include "influence/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "influence/baselines.hpp"
#include "influence/metrics.hpp"

namespace influence {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_double(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(v)) {
      throw Error(ErrorKind::ValidationError,
                  context + ": bad number '" + s + "'");
    }
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ValidationError,
                context + ": bad number '" + s + "'");
  }
}

int parse_int(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) {
      throw Error(ErrorKind::ValidationError,
                  context + ": bad integer '" + s + "'");
    }
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ValidationError,
                context + ": bad integer '" + s + "'");
  }
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return s;
}

bool looks_numeric(const std::string& s) {
  try {
    std::size_t pos = 0;
    (void)std::stod(s, &pos);
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

void validate(const ResponseWindow& window) {
  if (!std::isfinite(window.t1) || !std::isfinite(window.t2) ||
      window.t1 < 0.0 || window.t2 < window.t1) {
    throw Error(ErrorKind::ValidationError,
                "response window needs 0 <= t1 <= t2");
  }
}

const char* to_string(NetworkKind kind) {
  switch (kind) {
    case NetworkKind::Response: return "response";
    case NetworkKind::Sentiment: return "sentiment";
    case NetworkKind::Emotion: return "emotion";
  }
  return "?";
}

NetworkKind network_kind_from_string(const std::string& name) {
  std::string s = lowercase(name);
  if (s == "response") return NetworkKind::Response;
  if (s == "sentiment") return NetworkKind::Sentiment;
  if (s == "emotion") return NetworkKind::Emotion;
  throw Error(ErrorKind::ValidationError, "unknown network kind: " + name);
}

EmotionAxis emotion_axis_from_string(const std::string& name) {
  std::string s = lowercase(name);
  if (s == "valence") return EmotionAxis::Valence;
  if (s == "arousal") return EmotionAxis::Arousal;
  if (s == "dominance") return EmotionAxis::Dominance;
  throw Error(ErrorKind::ValidationError, "unknown emotion axis: " + name);
}

Lexicon Lexicon::from_csv(std::istream& in) {
  Lexicon lex;
  std::string line;
  int lineno = 0;
  bool maybe_header = true;
  bool width_known = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto fields = split_csv(t);
    std::string where = "lexicon line " + std::to_string(lineno);
    if (fields.size() != 2 && fields.size() != 4) {
      throw Error(ErrorKind::ValidationError,
                  where + ": expected 2 or 4 columns");
    }
    if (maybe_header) {
      maybe_header = false;
      // A header is a first row whose score column is not numeric.
      if (!looks_numeric(fields[1])) continue;
    }
    if (!width_known) {
      lex.axes_ = fields.size() == 4 ? 3 : 1;
      width_known = true;
    }
    int want = lex.axes_ == 3 ? 4 : 2;
    if (static_cast<int>(fields.size()) != want) {
      throw Error(ErrorKind::ValidationError,
                  where + ": mixed column widths");
    }
    std::string token = lowercase(fields[0]);
    if (fields.size() == 2) {
      lex.insert(token, parse_double(fields[1], where));
    } else {
      lex.insert(token, parse_double(fields[1], where),
                 parse_double(fields[2], where),
                 parse_double(fields[3], where));
    }
  }
  return lex;
}

Lexicon Lexicon::from_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::IoError, "cannot open lexicon: " + path);
  }
  return from_csv(in);
}

void Lexicon::insert(const std::string& token, double score) {
  table_[token] = {score, score, score};
}

void Lexicon::insert(const std::string& token, double valence, double arousal,
                     double dominance) {
  table_[token] = {valence, arousal, dominance};
  axes_ = 3;
}

bool Lexicon::contains(const std::string& token) const {
  return table_.count(token) > 0;
}

double Lexicon::score(const std::string& token, EmotionAxis axis) const {
  auto it = table_.find(token);
  if (it == table_.end()) return 0.0;
  return it->second[static_cast<int>(axis)];
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

double score_text(const std::string& text, const Lexicon& lexicon,
                  EmotionAxis axis) {
  double total = 0.0;
  int matched = 0;
  for (const auto& token : tokenize(text)) {
    if (lexicon.contains(token)) {
      total += lexicon.score(token, axis);
      ++matched;
    }
  }
  return matched > 0 ? total / matched : 0.0;
}

std::vector<MessageRecord> response_set(const MessageRecord& m,
                                        const std::vector<MessageRecord>& all,
                                        const ResponseWindow& window) {
  validate(window);
  std::vector<MessageRecord> replies;
  for (const auto& r : all) {
    double gap = r.time_s - m.time_s;
    if (gap > window.t2) break;  // sorted input
    if (r.time_s > m.time_s && gap >= window.t1 && r.sender != m.sender) {
      replies.push_back(r);
    }
  }
  return replies;
}

ConnectivityNetwork build_network(std::vector<MessageRecord> messages, int n,
                                  const NetworkConfig& config) {
  validate(config.window);
  if (config.kind == NetworkKind::Response && !(config.gamma > 0.0)) {
    throw Error(ErrorKind::ValidationError, "response decay needs gamma > 0");
  }
  if (config.kind != NetworkKind::Response && config.lexicon == nullptr) {
    throw Error(ErrorKind::ValidationError,
                "sentiment/emotion networks need a lexicon");
  }
  std::stable_sort(messages.begin(), messages.end(),
                   [](const MessageRecord& a, const MessageRecord& b) {
                     return a.time_s < b.time_s;
                   });
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < messages.size(); ++i) {
    const auto& p = messages[i];
    for (std::size_t j = i + 1; j < messages.size(); ++j) {
      const auto& q = messages[j];
      double gap = q.time_s - p.time_s;
      if (gap > config.window.t2) break;
      if (!(q.time_s > p.time_s) || gap < config.window.t1 ||
          q.sender == p.sender) {
        continue;
      }
      double w = 0.0;
      switch (config.kind) {
        case NetworkKind::Response:
          w = std::exp(-config.gamma * gap);
          break;
        case NetworkKind::Sentiment:
          w = score_text(q.text, *config.lexicon, EmotionAxis::Valence);
          break;
        case NetworkKind::Emotion:
          w = score_text(q.text, *config.lexicon, config.axis);
          break;
      }
      A(p.sender, q.sender) += w;
    }
  }
  return ConnectivityNetwork{std::move(A)};
}

namespace {

const json& require_field(const json& obj, const char* key,
                          const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(ErrorKind::SchemaError, where + ": missing field '" + key + "'");
  }
  return obj.at(key);
}

int member_index(const json& ref, const TeamSession& session,
                 const std::string& where) {
  if (ref.is_string()) {
    const std::string id = ref.get<std::string>();
    for (int i = 0; i < session.size(); ++i) {
      if (session.member_ids[i] == id) return i;
    }
    throw Error(ErrorKind::ValidationError,
                where + ": unknown member '" + id + "'");
  }
  if (ref.is_number_integer()) {
    int idx = ref.get<int>();
    if (idx < 0 || idx >= session.size()) {
      throw Error(ErrorKind::ValidationError,
                  where + ": member index " + std::to_string(idx) +
                      " out of range");
    }
    return idx;
  }
  throw Error(ErrorKind::SchemaError, where + ": member must be id or index");
}

QuestionRecord parse_question(const json& q, const TeamSession& session,
                              const std::string& where) {
  const int n = session.size();
  QuestionRecord rec;
  rec.answered.assign(n, false);
  rec.correct.assign(n, false);

  auto apply = [&](int i, const json& cell) {
    if (cell.is_null()) return;
    if (!cell.is_object()) {
      throw Error(ErrorKind::SchemaError,
                  where + ": per-member entry must be object or null");
    }
    bool answered = !(cell.contains("answer") && cell.at("answer").is_null());
    const json& correct = require_field(cell, "correct", where);
    if (!correct.is_boolean()) {
      throw Error(ErrorKind::SchemaError, where + ": 'correct' must be bool");
    }
    rec.answered[i] = answered;
    rec.correct[i] = answered && correct.get<bool>();
  };

  if (q.is_array()) {
    if (static_cast<int>(q.size()) != n) {
      throw Error(ErrorKind::ValidationError,
                  where + ": question has " + std::to_string(q.size()) +
                      " entries for a team of " + std::to_string(n));
    }
    for (int i = 0; i < n; ++i) apply(i, q[i]);
  } else if (q.is_object()) {
    for (auto it = q.begin(); it != q.end(); ++it) {
      int idx = member_index(json(it.key()), session, where);
      apply(idx, it.value());
    }
  } else {
    throw Error(ErrorKind::SchemaError,
                where + ": question must be array or object");
  }
  return rec;
}

InfluenceMatrix parse_report(const json& rep, int n,
                             const std::string& where) {
  if (!rep.is_array() || static_cast<int>(rep.size()) != n) {
    throw Error(ErrorKind::ValidationError,
                where + ": influence report must be " + std::to_string(n) +
                    "x" + std::to_string(n));
  }
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i) {
    const json& row = rep[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw Error(ErrorKind::ValidationError,
                  where + ": influence report must be " + std::to_string(n) +
                      "x" + std::to_string(n));
    }
    for (int j = 0; j < n; ++j) {
      if (!row[j].is_number()) {
        throw Error(ErrorKind::SchemaError,
                    where + ": report entries must be numbers");
      }
      M(i, j) = row[j].get<double>();
    }
  }
  if (!M.allFinite()) {
    throw Error(ErrorKind::ValidationError, where + ": non-finite report");
  }
  for (int i = 0; i < n; ++i) {
    double s = M.row(i).sum();
    if (s <= 0.0) {
      throw Error(ErrorKind::ValidationError,
                  where + ": report row " + std::to_string(i) +
                      " sums to zero");
    }
    if (std::abs(s - 1.0) > kRowSumTol) M.row(i) /= s;
  }
  try {
    return validate_row_stochastic(M);
  } catch (const Error& e) {
    throw Error(ErrorKind::ValidationError, where + ": " + e.what());
  }
}

}  // namespace

TeamSession parse_session(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::SchemaError,
                std::string("session is not valid JSON: ") + e.what());
  }

  TeamSession session;
  const json& team_id = require_field(doc, "team_id", "session");
  if (!team_id.is_string()) {
    throw Error(ErrorKind::SchemaError, "session: team_id must be a string");
  }
  session.team_id = team_id.get<std::string>();

  const json& members = require_field(doc, "members", "session");
  if (!members.is_array() || members.empty()) {
    throw Error(members.is_array() ? ErrorKind::ValidationError
                                   : ErrorKind::SchemaError,
                "session: members must be a nonempty array");
  }
  for (const auto& m : members) {
    if (!m.is_string()) {
      throw Error(ErrorKind::SchemaError, "session: member ids must be strings");
    }
    session.member_ids.push_back(m.get<std::string>());
  }
  {
    auto sorted = session.member_ids;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw Error(ErrorKind::ValidationError, "session: duplicate member id");
    }
  }

  const json& rounds = require_field(doc, "rounds", "session");
  if (!rounds.is_array()) {
    throw Error(ErrorKind::SchemaError, "session: rounds must be an array");
  }

  const int n = session.size();
  int round_no = 0;
  for (const json& round : rounds) {
    ++round_no;
    std::string where = session.team_id + " round " + std::to_string(round_no);
    if (!round.is_object()) {
      throw Error(ErrorKind::SchemaError, where + ": round must be an object");
    }
    RoundRecord rec;
    if (round.contains("questions") && !round.at("questions").is_null()) {
      const json& qs = round.at("questions");
      if (!qs.is_array()) {
        throw Error(ErrorKind::SchemaError,
                    where + ": questions must be an array");
      }
      for (const json& q : qs) {
        rec.questions.push_back(parse_question(q, session, where));
      }
    }
    if (round.contains("messages") && !round.at("messages").is_null()) {
      const json& ms = round.at("messages");
      if (!ms.is_array()) {
        throw Error(ErrorKind::SchemaError,
                    where + ": messages must be an array");
      }
      for (const json& m : ms) {
        MessageRecord msg;
        msg.sender = member_index(require_field(m, "sender", where), session,
                                  where);
        const json& t = require_field(m, "time_s", where);
        if (!t.is_number()) {
          throw Error(ErrorKind::SchemaError, where + ": time_s must be a number");
        }
        msg.time_s = t.get<double>();
        if (!std::isfinite(msg.time_s)) {
          throw Error(ErrorKind::ValidationError,
                      where + ": non-finite message time");
        }
        const json& text = require_field(m, "text", where);
        if (!text.is_string()) {
          throw Error(ErrorKind::SchemaError, where + ": text must be a string");
        }
        msg.text = text.get<std::string>();
        rec.messages.push_back(std::move(msg));
      }
      std::stable_sort(rec.messages.begin(), rec.messages.end(),
                       [](const MessageRecord& a, const MessageRecord& b) {
                         return a.time_s < b.time_s;
                       });
    }
    if (round.contains("influence_report") &&
        !round.at("influence_report").is_null()) {
      rec.influence_report = parse_report(round.at("influence_report"), n,
                                          where);
    }
    session.rounds.push_back(std::move(rec));
  }
  return session;
}

TeamSession parse_session_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::IoError, "cannot open session: " + path);
  }
  return parse_session(in);
}

std::vector<TeamSession> load_sessions(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorKind::IoError, "not a directory: " + dir);
  }
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      paths.push_back(entry.path().string());
    }
  }
  std::sort(paths.begin(), paths.end());
  std::vector<TeamSession> sessions;
  sessions.reserve(paths.size());
  for (const auto& p : paths) sessions.push_back(parse_session_file(p));
  return sessions;
}

EmbeddingStore EmbeddingStore::from_json(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::SchemaError,
                std::string("embeddings are not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) {
    throw Error(ErrorKind::SchemaError, "embeddings: expected an array");
  }
  EmbeddingStore store;
  for (const json& rec : doc) {
    const json& team = require_field(rec, "team_id", "embeddings");
    const json& round = require_field(rec, "round", "embeddings");
    const json& member = require_field(rec, "member_id", "embeddings");
    const json& vec = require_field(rec, "embedding", "embeddings");
    if (!team.is_string() || !round.is_number_integer() ||
        !member.is_string() || !vec.is_array()) {
      throw Error(ErrorKind::SchemaError, "embeddings: mistyped record");
    }
    Eigen::VectorXd v(vec.size());
    for (std::size_t k = 0; k < vec.size(); ++k) {
      if (!vec[k].is_number()) {
        throw Error(ErrorKind::SchemaError,
                    "embeddings: entries must be numbers");
      }
      v(static_cast<int>(k)) = vec[k].get<double>();
    }
    store.insert(team.get<std::string>(), round.get<int>(),
                 member.get<std::string>(), std::move(v));
  }
  return store;
}

EmbeddingStore EmbeddingStore::from_csv(std::istream& in) {
  EmbeddingStore store;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (lineno == 1 && lowercase(t).rfind("team", 0) == 0) continue;
    auto fields = split_csv(t);
    std::string where = "embeddings line " + std::to_string(lineno);
    if (fields.size() < 4) {
      throw Error(ErrorKind::ValidationError,
                  where + ": expected team_id,round,member_id,values...");
    }
    Eigen::VectorXd v(fields.size() - 3);
    for (std::size_t k = 3; k < fields.size(); ++k) {
      v(static_cast<int>(k - 3)) = parse_double(fields[k], where);
    }
    store.insert(fields[0], parse_int(fields[1], where), fields[2],
                 std::move(v));
  }
  return store;
}

EmbeddingStore EmbeddingStore::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::IoError, "cannot open embeddings: " + path);
  }
  std::string ext = lowercase(std::filesystem::path(path).extension().string());
  if (ext == ".json") return from_json(in);
  if (ext == ".csv") return from_csv(in);
  throw Error(ErrorKind::ValidationError,
              "embeddings must be .json or .csv: " + path);
}

void EmbeddingStore::insert(const std::string& team_id, int round,
                            const std::string& member_id,
                            Eigen::VectorXd embedding) {
  if (dim_ == 0) {
    dim_ = static_cast<int>(embedding.size());
  } else if (dim_ != static_cast<int>(embedding.size())) {
    throw Error(ErrorKind::ValidationError,
                "embedding dimension mismatch: expected " +
                    std::to_string(dim_) + ", got " +
                    std::to_string(embedding.size()));
  }
  table_[{team_id, round, member_id}] = std::move(embedding);
}

const Eigen::VectorXd* EmbeddingStore::find(const std::string& team_id,
                                            int round,
                                            const std::string& member_id) const {
  auto it = table_.find({team_id, round, member_id});
  return it == table_.end() ? nullptr : &it->second;
}

const char* to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::Previous: return "previous";
    case FeatureKind::First: return "first";
    case FeatureKind::Average: return "average";
    case FeatureKind::Expertise: return "expertise";
    case FeatureKind::Response: return "response";
    case FeatureKind::Sentiment: return "sentiment";
    case FeatureKind::Emotion: return "emotion";
    case FeatureKind::Embedding: return "embedding";
  }
  return "?";
}

FeatureKind feature_kind_from_string(const std::string& name) {
  std::string s = lowercase(name);
  if (s == "previous") return FeatureKind::Previous;
  if (s == "first") return FeatureKind::First;
  if (s == "average") return FeatureKind::Average;
  if (s == "expertise") return FeatureKind::Expertise;
  if (s == "response") return FeatureKind::Response;
  if (s == "sentiment") return FeatureKind::Sentiment;
  if (s == "emotion") return FeatureKind::Emotion;
  if (s == "embedding") return FeatureKind::Embedding;
  throw Error(ErrorKind::ValidationError, "unknown feature: " + name);
}

bool FeatureBundle::has(FeatureKind kind) const {
  switch (kind) {
    case FeatureKind::Previous: return previous.has_value();
    case FeatureKind::First: return first.has_value();
    case FeatureKind::Average: return average.has_value();
    case FeatureKind::Expertise: return expertise.has_value();
    case FeatureKind::Response: return response.has_value();
    case FeatureKind::Sentiment: return sentiment.has_value();
    case FeatureKind::Emotion: return emotion.has_value();
    case FeatureKind::Embedding: return embedding.has_value();
  }
  return false;
}

Eigen::MatrixXd FeatureBundle::feature_matrix(FeatureKind kind) const {
  if (!has(kind)) {
    throw Error(ErrorKind::MissingFeature,
                team_id + " round " + std::to_string(round) + ": feature '" +
                    to_string(kind) + "' unavailable");
  }
  switch (kind) {
    case FeatureKind::Previous: return previous->matrix();
    case FeatureKind::First: return first->matrix();
    case FeatureKind::Average: return average->matrix();
    case FeatureKind::Expertise:
      return expertise->values().transpose().replicate(n, 1);
    case FeatureKind::Response: return response->weights;
    case FeatureKind::Sentiment: return sentiment->weights;
    case FeatureKind::Emotion: return emotion->weights;
    case FeatureKind::Embedding: return *embedding;
  }
  throw Error(ErrorKind::MissingFeature, "unreachable");
}

namespace {

Eigen::MatrixXd summed_network(const TeamSession& session, int upto_round,
                               const NetworkConfig& config) {
  const int n = session.size();
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < upto_round; ++r) {
    total += build_network(session.rounds[r].messages, n, config).weights;
  }
  return total;
}

}  // namespace

FeatureBundle assemble_features(const TeamSession& session, int upto_round,
                                const FeatureConfig& config) {
  const int t = upto_round;
  if (t < 1 || t > session.round_count()) {
    throw Error(ErrorKind::ValidationError,
                session.team_id + ": round " + std::to_string(t) +
                    " out of range");
  }
  FeatureBundle bundle;
  bundle.team_id = session.team_id;
  bundle.round = t;
  bundle.n = session.size();

  auto missing = [&](const std::string& what) -> Error {
    return Error(ErrorKind::MissingFeature,
                 session.team_id + " round " + std::to_string(t) + ": " +
                     what);
  };

  for (FeatureKind kind : config.kinds) {
    switch (kind) {
      case FeatureKind::Previous: {
        if (t < 2 || !session.rounds[t - 2].influence_report) {
          throw missing("no previous influence report");
        }
        bundle.previous = session.rounds[t - 2].influence_report;
        break;
      }
      case FeatureKind::First: {
        if (t < 2 || !session.rounds[0].influence_report) {
          throw missing("no first influence report before this round");
        }
        bundle.first = session.rounds[0].influence_report;
        break;
      }
      case FeatureKind::Average: {
        std::vector<InfluenceMatrix> history;
        for (int r = 0; r + 1 < t; ++r) {
          if (session.rounds[r].influence_report) {
            history.push_back(*session.rounds[r].influence_report);
          }
        }
        if (history.empty()) throw missing("no influence reports to average");
        bundle.average = predict_average(history);
        break;
      }
      case FeatureKind::Expertise: {
        bundle.expertise = expertise_series(session)[t - 1];
        break;
      }
      case FeatureKind::Response: {
        NetworkConfig nc;
        nc.kind = NetworkKind::Response;
        nc.window = config.window;
        nc.gamma = config.gamma;
        bundle.response = ConnectivityNetwork{summed_network(session, t, nc)};
        break;
      }
      case FeatureKind::Sentiment: {
        if (!config.sentiment_lexicon) throw missing("no sentiment lexicon");
        NetworkConfig nc;
        nc.kind = NetworkKind::Sentiment;
        nc.window = config.window;
        nc.lexicon = config.sentiment_lexicon;
        bundle.sentiment = ConnectivityNetwork{summed_network(session, t, nc)};
        break;
      }
      case FeatureKind::Emotion: {
        if (!config.emotion_lexicon) throw missing("no emotion lexicon");
        NetworkConfig nc;
        nc.kind = NetworkKind::Emotion;
        nc.window = config.window;
        nc.lexicon = config.emotion_lexicon;
        nc.axis = config.emotion_axis;
        bundle.emotion = ConnectivityNetwork{summed_network(session, t, nc)};
        break;
      }
      case FeatureKind::Embedding: {
        if (!config.embeddings || config.embeddings->dim() == 0) {
          throw missing("no embedding sidecar");
        }
        const int n = session.size();
        Eigen::MatrixXd E(n, config.embeddings->dim());
        for (int i = 0; i < n; ++i) {
          const Eigen::VectorXd* v =
              config.embeddings->find(session.team_id, t,
                                      session.member_ids[i]);
          if (!v) {
            throw missing("no embedding for member " + session.member_ids[i]);
          }
          E.row(i) = v->transpose();
        }
        bundle.embedding = std::move(E);
        break;
      }
    }
  }
  return bundle;
}

std::vector<Sample> build_dataset(const std::vector<TeamSession>& sessions,
                                  const FeatureConfig& config) {
  std::vector<Sample> samples;
  for (const auto& session : sessions) {
    for (int t = 1; t <= session.round_count(); ++t) {
      const auto& target = session.rounds[t - 1].influence_report;
      if (!target) continue;
      try {
        samples.push_back({assemble_features(session, t, config), *target});
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::MissingFeature) throw;
      }
    }
  }
  return samples;
}

}  // namespace influence
