#include "influence/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace influence {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return s;
}

double parse_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ValidationError,
                "config: bad number for " + key + ": '" + v + "'");
  }
}

int parse_int(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ValidationError,
                "config: bad integer for " + key + ": '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    std::uint64_t x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ValidationError,
                "config: bad seed for " + key + ": '" + v + "'");
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> parts;
  std::stringstream ss(v);
  std::string part;
  while (std::getline(ss, part, ',')) {
    part = trim(part);
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

}  // namespace

RunConfig RunConfig::from_stream(std::istream& in) {
  RunConfig cfg;
  cfg.lambda_grid = default_lambda_grid();

  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw Error(ErrorKind::ValidationError,
                    "config line " + std::to_string(lineno) +
                        ": unterminated section");
      }
      section = lowercase(trim(t.substr(1, t.size() - 2)));
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::ValidationError,
                  "config line " + std::to_string(lineno) +
                      ": expected key = value");
    }
    std::string key = lowercase(trim(t.substr(0, eq)));
    std::string value = trim(t.substr(eq + 1));
    std::string full = section.empty() ? key : section + "." + key;

    if (full == "paths.sessions") {
      cfg.sessions_dir = value;
    } else if (full == "paths.sentiment_lexicon") {
      cfg.sentiment_lexicon = value;
    } else if (full == "paths.emotion_lexicon") {
      cfg.emotion_lexicon = value;
    } else if (full == "paths.embeddings") {
      cfg.embeddings_path = value;
    } else if (full == "paths.replay_dataset") {
      cfg.replay_dataset = value;
    } else if (full == "paths.output") {
      cfg.output_dir = value;
    } else if (full == "dynamics.model") {
      cfg.model = model_kind_from_string(value);
    } else if (full == "dynamics.tau") {
      cfg.tau = parse_double(value, full);
    } else if (full == "dynamics.steps") {
      cfg.steps = parse_int(value, full);
    } else if (full == "simulate.n") {
      cfg.team_size = parse_int(value, full);
    } else if (full == "simulate.expertise") {
      cfg.expertise.clear();
      for (const auto& part : split_list(value)) {
        cfg.expertise.push_back(parse_double(part, full));
      }
    } else if (full == "simulate.start") {
      std::string s = lowercase(value);
      if (s != "random" && s != "uniform") {
        throw Error(ErrorKind::ValidationError,
                    "config: simulate.start must be random or uniform");
      }
      cfg.start = s;
    } else if (full == "simulate.starts") {
      cfg.starts = parse_int(value, full);
    } else if (full == "network.t1") {
      cfg.window.t1 = parse_double(value, full);
    } else if (full == "network.t2") {
      cfg.window.t2 = parse_double(value, full);
    } else if (full == "network.gamma") {
      cfg.gamma = parse_double(value, full);
    } else if (full == "network.emotion_axis") {
      cfg.emotion_axis = emotion_axis_from_string(value);
    } else if (full == "fit.features") {
      cfg.features.clear();
      for (const auto& part : split_list(value)) {
        cfg.features.push_back(feature_kind_from_string(part));
      }
    } else if (full == "fit.lambda") {
      cfg.lambda = parse_double(value, full);
    } else if (full == "fit.lambda_grid") {
      cfg.lambda_grid.clear();
      for (const auto& part : split_list(value)) {
        cfg.lambda_grid.push_back(parse_double(part, full));
      }
    } else if (full == "fit.constraints") {
      std::string s = lowercase(value);
      if (s == "per_sample") {
        cfg.constraints = ConstraintMode::PerSample;
      } else if (s == "aggregate") {
        cfg.constraints = ConstraintMode::Aggregate;
      } else {
        throw Error(ErrorKind::ValidationError,
                    "config: fit.constraints must be per_sample or aggregate");
      }
    } else if (full == "fit.train_fraction") {
      cfg.train_fraction = parse_double(value, full);
    } else if (full == "bootstrap.b") {
      cfg.bootstrap_b = parse_int(value, full);
    } else if (full == "analyze.fdr") {
      cfg.fdr = parse_double(value, full);
    } else if (full == "seed.root") {
      cfg.seed = parse_u64(value, full);
    } else {
      throw Error(ErrorKind::ValidationError,
                  "config line " + std::to_string(lineno) +
                      ": unknown key '" + full + "'");
    }
  }

  if (!(cfg.tau > 0.0 && cfg.tau < 1.0)) {
    throw Error(ErrorKind::ValidationError, "config: tau must lie in (0,1)");
  }
  if (cfg.steps < 1 || cfg.starts < 1 || cfg.team_size < 2 ||
      cfg.bootstrap_b < 1) {
    throw Error(ErrorKind::ValidationError,
                "config: steps, starts, bootstrap.b need >= 1 and n >= 2");
  }
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
    throw Error(ErrorKind::ValidationError,
                "config: train_fraction must lie in (0,1)");
  }
  if (!(cfg.fdr > 0.0 && cfg.fdr < 1.0)) {
    throw Error(ErrorKind::ValidationError, "config: fdr must lie in (0,1)");
  }
  validate(cfg.window);
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::IoError, "cannot open config: " + path);
  }
  return from_stream(in);
}

std::string RunConfig::resolved() const {
  std::ostringstream out;
  out.precision(17);
  out << "paths.sessions = " << sessions_dir << "\n";
  out << "paths.sentiment_lexicon = " << sentiment_lexicon << "\n";
  out << "paths.emotion_lexicon = " << emotion_lexicon << "\n";
  out << "paths.embeddings = " << embeddings_path << "\n";
  out << "paths.replay_dataset = " << replay_dataset << "\n";
  out << "paths.output = " << output_dir << "\n";
  out << "dynamics.model = " << to_string(model) << "\n";
  out << "dynamics.tau = " << tau << "\n";
  out << "dynamics.steps = " << steps << "\n";
  out << "simulate.n = " << team_size << "\n";
  out << "simulate.expertise =";
  for (std::size_t i = 0; i < expertise.size(); ++i) {
    out << (i ? ", " : " ") << expertise[i];
  }
  out << "\n";
  out << "simulate.start = " << start << "\n";
  out << "simulate.starts = " << starts << "\n";
  out << "network.t1 = " << window.t1 << "\n";
  out << "network.t2 = " << window.t2 << "\n";
  out << "network.gamma = " << gamma << "\n";
  out << "network.emotion_axis = "
      << (emotion_axis == EmotionAxis::Valence
              ? "valence"
              : emotion_axis == EmotionAxis::Arousal ? "arousal" : "dominance")
      << "\n";
  out << "fit.features =";
  for (std::size_t i = 0; i < features.size(); ++i) {
    out << (i ? ", " : " ") << to_string(features[i]);
  }
  out << "\n";
  out << "fit.lambda = ";
  if (lambda) {
    out << *lambda;
  } else {
    out << "auto";
  }
  out << "\n";
  out << "fit.lambda_grid =";
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    out << (i ? ", " : " ") << lambda_grid[i];
  }
  out << "\n";
  out << "fit.constraints = "
      << (constraints == ConstraintMode::PerSample ? "per_sample"
                                                   : "aggregate")
      << "\n";
  out << "fit.train_fraction = " << train_fraction << "\n";
  out << "bootstrap.b = " << bootstrap_b << "\n";
  out << "analyze.fdr = " << fdr << "\n";
  out << "seed.root = " << seed << "\n";
  return out.str();
}

std::string RunConfig::header_comment() const {
  std::istringstream in(resolved());
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) out << "# " << line << "\n";
  return out.str();
}

}  // namespace influence
