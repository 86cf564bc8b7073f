#include "influence/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>

#include <json.hpp>

#include "influence/analytics.hpp"
#include "influence/baselines.hpp"
#include "influence/metrics.hpp"
#include "influence/rng.hpp"

namespace influence {

namespace {

std::string fmt(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::ofstream open_output(const RunConfig& config, const std::string& name) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  fs::path path = fs::path(config.output_dir) / name;
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorKind::IoError, "cannot write " + path.string());
  }
  out << config.header_comment();
  return out;
}

struct Failures {
  std::vector<std::string> items;

  void add(const std::string& who, const std::exception& e) {
    items.push_back(who + ": " + e.what());
  }
  int finish(const char* command) const {
    if (items.empty()) return 0;
    std::cerr << command << ": " << items.size() << " failure(s)\n";
    for (const auto& f : items) std::cerr << "  " << f << "\n";
    return 1;
  }
};

struct LoadedInputs {
  std::vector<TeamSession> sessions;
  std::optional<Lexicon> sentiment;
  std::optional<Lexicon> emotion;
  std::optional<EmbeddingStore> embeddings;
};

LoadedInputs load_inputs(const RunConfig& config,
                         const std::string& sessions_dir) {
  if (sessions_dir.empty()) {
    throw Error(ErrorKind::ValidationError, "config: paths.sessions not set");
  }
  LoadedInputs in;
  in.sessions = load_sessions(sessions_dir);
  if (in.sessions.empty()) {
    throw Error(ErrorKind::ValidationError,
                "no session files under " + sessions_dir);
  }
  if (!config.sentiment_lexicon.empty()) {
    in.sentiment = Lexicon::from_csv_file(config.sentiment_lexicon);
  }
  if (!config.emotion_lexicon.empty()) {
    in.emotion = Lexicon::from_csv_file(config.emotion_lexicon);
  }
  if (!config.embeddings_path.empty()) {
    in.embeddings = EmbeddingStore::from_file(config.embeddings_path);
  }
  return in;
}

FeatureConfig feature_config(const RunConfig& config,
                             const LoadedInputs& inputs) {
  FeatureConfig fc;
  fc.kinds = config.features;
  fc.window = config.window;
  fc.gamma = config.gamma;
  fc.emotion_axis = config.emotion_axis;
  if (inputs.sentiment) fc.sentiment_lexicon = &*inputs.sentiment;
  if (inputs.emotion) fc.emotion_lexicon = &*inputs.emotion;
  if (inputs.embeddings) fc.embeddings = &*inputs.embeddings;
  return fc;
}

// Rounds that carry a report, with the expertise current at each.
struct ObservedRound {
  int round = 0;  // 1-based absolute round number
  InfluenceMatrix matrix;
  ExpertiseVector expertise;
};

std::vector<ObservedRound> observed_rounds(const TeamSession& session) {
  std::vector<ObservedRound> obs;
  std::vector<ExpertiseVector> series = expertise_series(session);
  for (int t = 0; t < session.round_count(); ++t) {
    if (session.rounds[t].influence_report) {
      obs.push_back({t + 1, *session.rounds[t].influence_report, series[t]});
    }
  }
  return obs;
}

using Predictor =
    std::function<InfluenceMatrix(const std::vector<ObservedRound>&, int)>;

// Whether a predictor failure is a data limitation (skip the row) rather
// than a bug (fail the team).
bool skippable(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::ZeroExpertise:
    case ErrorKind::DegeneratePerception:
    case ErrorKind::TeamTooSmall:
      return true;
    default:
      return false;
  }
}

void emit_error_rows(std::ostream& out, const std::string& team, int round,
                     const std::string& model, const InfluenceMatrix& truth,
                     const InfluenceMatrix& pred) {
  out << team << "," << round << "," << model << ",mse,"
      << fmt(mse(truth, pred)) << "\n";
  out << team << "," << round << "," << model << ",kl,"
      << fmt(kl(truth, pred)) << "\n";
}

}  // namespace

int cmd_simulate(const RunConfig& config) {
  const int n = config.team_size;
  Eigen::VectorXd y;
  if (config.expertise.empty()) {
    y = Eigen::VectorXd::Constant(n, 0.5);
  } else {
    if (static_cast<int>(config.expertise.size()) != n) {
      throw Error(ErrorKind::ValidationError,
                  "config: simulate.expertise needs exactly n values");
    }
    y = Eigen::Map<const Eigen::VectorXd>(config.expertise.data(), n);
  }
  DynamicsConfig dyn{config.tau, config.model};

  std::ofstream self_out = open_output(config, "simulate_self_weights.csv");
  std::ofstream mat_out = open_output(config, "simulate_matrices.csv");
  self_out << "start,step,member,self_weight\n";
  mat_out << "start,step,row";
  for (int j = 0; j < n; ++j) mat_out << ",w" << j;
  mat_out << "\n";

  for (int s = 0; s < config.starts; ++s) {
    InfluenceMatrix M = [&] {
      if (config.start == "uniform") return predict_uniform(n);
      return predict_random(
          n, derive_seed(config.seed, "simulate", std::to_string(s)));
    }();
    for (int step = 0; step <= config.steps; ++step) {
      for (int i = 0; i < n; ++i) {
        self_out << s << "," << step << "," << i << "," << fmt(M(i, i))
                 << "\n";
        mat_out << s << "," << step << "," << i;
        for (int j = 0; j < n; ++j) mat_out << "," << fmt(M(i, j));
        mat_out << "\n";
      }
      if (step < config.steps) M = step_model(M, y, dyn);
    }
  }
  return 0;
}

int cmd_forecast(const RunConfig& config) {
  LoadedInputs inputs = load_inputs(config, config.sessions_dir);
  const double tau = config.tau;

  std::ofstream single_out = open_output(config, "forecast_single.csv");
  std::ofstream multi_out = open_output(config, "forecast_multi.csv");
  single_out << "team,round,model,metric,value\n";
  multi_out << "team,round,model,metric,value\n";

  Failures failures;
  for (const TeamSession& session : inputs.sessions) {
    try {
      std::vector<ObservedRound> obs = observed_rounds(session);
      if (obs.size() < 2) continue;
      const int n = session.size();

      // Predict obs[k] from the ground truth at obs[k-1].
      std::vector<std::pair<std::string, Predictor>> single = {
          {"d",
           [&](const std::vector<ObservedRound>& o, int k) {
             return step_d(o[k - 1].matrix,
                           normalize_expertise(o[k - 1].expertise), tau);
           }},
          {"dr",
           [&](const std::vector<ObservedRound>& o, int k) {
             return step_dr(o[k - 1].matrix,
                            normalize_expertise(o[k - 1].expertise), tau);
           }},
          {"drp",
           [&](const std::vector<ObservedRound>& o, int k) {
             return step_drp(o[k - 1].matrix, o[k - 1].expertise, tau);
           }},
          {"constant",
           [](const std::vector<ObservedRound>& o, int k) {
             return predict_constant(o[k - 1].matrix);
           }},
          {"first",
           [](const std::vector<ObservedRound>& o, int) {
             return predict_first(o[0].matrix);
           }},
          {"uniform",
           [n](const std::vector<ObservedRound>&, int) {
             return predict_uniform(n);
           }},
          {"random",
           [&](const std::vector<ObservedRound>& o, int k) {
             return predict_random(
                 n, derive_seed(config.seed, "forecast.random",
                                session.team_id + ":" +
                                    std::to_string(o[k].round)));
           }},
          {"average",
           [](const std::vector<ObservedRound>& o, int k) {
             std::vector<InfluenceMatrix> history;
             for (int j = 0; j < k; ++j) history.push_back(o[j].matrix);
             return predict_average(history);
           }},
          {"reflected",
           [&](const std::vector<ObservedRound>& o, int k) {
             return step_reflected(o[k - 1].matrix,
                                   normalize_expertise(o[k - 1].expertise));
           }},
          {"sbt",
           [](const std::vector<ObservedRound>& o, int k) {
             return step_sbt(o[k - 1].matrix);
           }},
      };
      for (std::size_t k = 1; k < obs.size(); ++k) {
        for (const auto& [name, predict] : single) {
          try {
            emit_error_rows(single_out, session.team_id, obs[k].round, name,
                            obs[k].matrix, predict(obs, static_cast<int>(k)));
          } catch (const Error& e) {
            if (!skippable(e)) throw;
          }
        }
      }

      // Chain predictions from the first report only.
      std::map<std::string, std::vector<InfluenceMatrix>> chains;
      for (const auto& name : {"d", "dr", "drp", "reflected", "sbt"}) {
        try {
          std::vector<InfluenceMatrix> chain;
          InfluenceMatrix current = obs[0].matrix;
          for (std::size_t k = 1; k < obs.size(); ++k) {
            const ExpertiseVector& y = obs[k - 1].expertise;
            std::string model{name};
            if (model == "d") {
              current = step_d(current, normalize_expertise(y), tau);
            } else if (model == "dr") {
              current = step_dr(current, normalize_expertise(y), tau);
            } else if (model == "drp") {
              current = step_drp(current, y.values(), tau);
            } else if (model == "reflected") {
              current = step_reflected(current, normalize_expertise(y));
            } else {
              current = step_sbt(current);
            }
            chain.push_back(current);
          }
          chains[name] = std::move(chain);
        } catch (const Error& e) {
          if (!skippable(e)) throw;
        }
      }
      for (std::size_t k = 1; k < obs.size(); ++k) {
        for (const auto& [name, chain] : chains) {
          emit_error_rows(multi_out, session.team_id, obs[k].round, name,
                          obs[k].matrix, chain[k - 1]);
        }
        emit_error_rows(multi_out, session.team_id, obs[k].round, "first",
                        obs[k].matrix, obs[0].matrix);
        emit_error_rows(multi_out, session.team_id, obs[k].round, "uniform",
                        obs[k].matrix, predict_uniform(n));
        emit_error_rows(
            multi_out, session.team_id, obs[k].round, "random", obs[k].matrix,
            predict_random(n, derive_seed(config.seed, "forecast.random",
                                          session.team_id + ":" +
                                              std::to_string(obs[k].round))));
      }
    } catch (const std::exception& e) {
      failures.add(session.team_id, e);
    }
  }
  return failures.finish("forecast");
}

namespace {

struct SplitResult {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

// Seeded shuffle of the team ids; the first train_fraction of them train.
SplitResult split_teams(const std::vector<TeamSession>& sessions,
                        double train_fraction, std::uint64_t seed) {
  std::vector<std::string> ids;
  for (const auto& s : sessions) ids.push_back(s.team_id);
  std::mt19937_64 gen(seed);
  for (std::size_t i = ids.size(); i > 1; --i) {
    std::swap(ids[i - 1], ids[uniform_index(gen, i)]);
  }
  int n_train = static_cast<int>(
      std::floor(double(ids.size()) * train_fraction + 0.5));
  n_train = std::clamp(n_train, 1, static_cast<int>(ids.size()) - 1);
  SplitResult out;
  out.train.assign(ids.begin(), ids.begin() + n_train);
  out.test.assign(ids.begin() + n_train, ids.end());
  return out;
}

std::vector<Sample> filter_samples(const std::vector<Sample>& samples,
                                   const std::vector<std::string>& teams) {
  std::set<std::string> keep(teams.begin(), teams.end());
  std::vector<Sample> out;
  for (const auto& s : samples) {
    if (keep.count(s.features.team_id)) out.push_back(s);
  }
  return out;
}

double mean_mse(const std::vector<double>& errors) {
  double total = 0.0;
  for (double e : errors) total += e;
  return errors.empty() ? std::numeric_limits<double>::infinity()
                        : total / double(errors.size());
}

// Validation MSE of one lambda for one estimator kind.
template <typename FitFn, typename PredictFn>
double validation_mse(const std::vector<Sample>& train,
                      const std::vector<Sample>& val, double lambda,
                      FitFn fit, PredictFn predict) {
  auto weights = fit(train, lambda);
  std::vector<double> errors;
  for (const auto& s : val) {
    errors.push_back(mse(s.target, predict(weights, s.features)));
  }
  return mean_mse(errors);
}

template <typename FitFn, typename PredictFn>
double choose_lambda(const std::vector<Sample>& samples,
                     const std::vector<TeamSession>& sessions,
                     const RunConfig& config, FitFn fit, PredictFn predict) {
  if (config.lambda) return *config.lambda;
  std::vector<std::string> team_ids;
  {
    std::set<std::string> seen;
    for (const auto& s : samples) {
      if (seen.insert(s.features.team_id).second) {
        team_ids.push_back(s.features.team_id);
      }
    }
  }
  if (team_ids.size() < 2 || config.lambda_grid.size() < 2) {
    return config.lambda_grid.empty()
               ? 1e-3
               : config.lambda_grid[config.lambda_grid.size() / 2];
  }
  std::vector<TeamSession> dummy;
  for (const auto& id : team_ids) {
    for (const auto& s : sessions) {
      if (s.team_id == id) dummy.push_back(s);
    }
  }
  SplitResult split = split_teams(dummy, config.train_fraction,
                                  derive_seed(config.seed, "fit.val_split"));
  std::vector<Sample> sub = filter_samples(samples, split.train);
  std::vector<Sample> val = filter_samples(samples, split.test);
  if (sub.empty() || val.empty()) {
    return config.lambda_grid[config.lambda_grid.size() / 2];
  }
  double best_lambda = config.lambda_grid.front();
  double best_err = std::numeric_limits<double>::infinity();
  for (double lambda : config.lambda_grid) {
    double err = validation_mse(sub, val, lambda, fit, predict);
    if (err < best_err) {
      best_err = err;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

// Scores the uniform and constant predictors over an external corpus:
// every reported round with a reported predecessor contributes one
// single-round error per predictor. Means land in fit_replay.csv.
void replay_baselines(const RunConfig& config) {
  std::vector<TeamSession> sessions = load_sessions(config.replay_dataset);
  std::map<std::string, std::vector<double>> errs;
  for (const TeamSession& session : sessions) {
    std::vector<ObservedRound> obs = observed_rounds(session);
    for (std::size_t k = 1; k < obs.size(); ++k) {
      const InfluenceMatrix& truth = obs[k].matrix;
      InfluenceMatrix uniform = predict_uniform(truth.size());
      InfluenceMatrix constant = predict_constant(obs[k - 1].matrix);
      errs["uniform:mse"].push_back(mse(truth, uniform));
      errs["uniform:kl"].push_back(kl(truth, uniform));
      errs["constant:mse"].push_back(mse(truth, constant));
      errs["constant:kl"].push_back(kl(truth, constant));
    }
  }
  std::ofstream out = open_output(config, "fit_replay.csv");
  out << "model,metric,n,mean\n";
  for (const char* key : {"uniform:mse", "uniform:kl", "constant:mse",
                          "constant:kl"}) {
    const std::vector<double>& values = errs[key];
    double mean = 0.0;
    for (double v : values) mean += v;
    if (!values.empty()) mean /= static_cast<double>(values.size());
    std::string name(key);
    auto colon = name.find(':');
    out << name.substr(0, colon) << "," << name.substr(colon + 1) << ","
        << values.size() << "," << fmt(mean) << "\n";
  }
}

}  // namespace

int cmd_fit(const RunConfig& config) {
  if (!config.replay_dataset.empty()) {
    replay_baselines(config);
    if (config.sessions_dir.empty()) return 0;
  }
  LoadedInputs inputs = load_inputs(config, config.sessions_dir);
  if (inputs.sessions.size() < 2) {
    throw Error(ErrorKind::ValidationError,
                "fit needs at least 2 teams for a held-out split");
  }
  FeatureConfig fc = feature_config(config, inputs);
  std::vector<Sample> samples = build_dataset(inputs.sessions, fc);
  if (samples.empty()) {
    throw Error(ErrorKind::ValidationError,
                "no usable (features, report) samples");
  }

  SplitResult split = split_teams(inputs.sessions, config.train_fraction,
                                  derive_seed(config.seed, "fit.split"));
  std::vector<Sample> train = filter_samples(samples, split.train);
  std::vector<Sample> test = filter_samples(samples, split.test);
  if (train.empty() || test.empty()) {
    throw Error(ErrorKind::ValidationError,
                "train or test split has no samples");
  }

  SolverConfig solver;
  solver.constraints = config.constraints;

  auto fit_lin = [&](const std::vector<Sample>& data, double lambda) {
    return fit_linear(data, config.features, lambda, solver);
  };
  auto pred_lin = [](const LinearWeights& w, const FeatureBundle& b) {
    return predict_linear(w, b);
  };
  auto fit_soft = [&](const std::vector<Sample>& data, double lambda) {
    return fit_softmax(data, config.features, lambda, solver);
  };
  auto pred_soft = [](const SoftmaxWeights& w, const FeatureBundle& b) {
    return predict_softmax(w, b);
  };

  double lambda_lin =
      choose_lambda(train, inputs.sessions, config, fit_lin, pred_lin);
  double lambda_soft =
      choose_lambda(train, inputs.sessions, config, fit_soft, pred_soft);

  FitReport report_lin, report_soft;
  LinearWeights linear =
      fit_linear(train, config.features, lambda_lin, solver, &report_lin);
  SoftmaxWeights softmax =
      fit_softmax(train, config.features, lambda_soft, solver, &report_soft);

  // Held-out evaluation: fitted models plus the reference baselines on the
  // same (team, round) targets.
  std::map<std::string, TeamSession const*> by_team;
  for (const auto& s : inputs.sessions) by_team[s.team_id] = &s;

  std::map<std::string, std::vector<double>> errors_mse;
  std::map<std::string, std::vector<double>> errors_kl;
  std::ofstream per_sample = open_output(config, "fit_per_sample.csv");
  per_sample << "team,round,model,metric,value\n";

  auto record = [&](const std::string& team, int round,
                    const std::string& model, const InfluenceMatrix& truth,
                    const InfluenceMatrix& pred) {
    double e_mse = mse(truth, pred);
    double e_kl = kl(truth, pred);
    errors_mse[model].push_back(e_mse);
    errors_kl[model].push_back(e_kl);
    per_sample << team << "," << round << "," << model << ",mse,"
               << fmt(e_mse) << "\n";
    per_sample << team << "," << round << "," << model << ",kl,"
               << fmt(e_kl) << "\n";
  };

  for (const auto& s : test) {
    const std::string& team = s.features.team_id;
    const int t = s.features.round;
    const int n = s.features.n;
    record(team, t, "linear", s.target, predict_linear(linear, s.features));
    record(team, t, "softmax", s.target, predict_softmax(softmax, s.features));
    record(team, t, "uniform", s.target, predict_uniform(n));
    record(team, t, "random", s.target,
           predict_random(n, derive_seed(config.seed, "fit.random",
                                         team + ":" + std::to_string(t))));

    const TeamSession& session = *by_team.at(team);
    std::vector<InfluenceMatrix> history;
    std::optional<InfluenceMatrix> first;
    for (int r = 0; r + 1 < t; ++r) {
      if (session.rounds[r].influence_report) {
        history.push_back(*session.rounds[r].influence_report);
        if (!first) first = session.rounds[r].influence_report;
      }
    }
    if (!history.empty()) {
      record(team, t, "constant", s.target,
             predict_constant(history.back()));
      record(team, t, "first", s.target, predict_first(*first));
      record(team, t, "average", s.target, predict_average(history));
    }
  }

  std::ofstream eval = open_output(config, "fit_eval.csv");
  eval << "# fit.lambda_selected_linear = " << fmt(lambda_lin) << "\n";
  eval << "# fit.lambda_selected_softmax = " << fmt(lambda_soft) << "\n";
  eval << "# train_teams = " << split.train.size()
       << ", test_teams = " << split.test.size()
       << ", train_samples = " << train.size()
       << ", test_samples = " << test.size() << "\n";
  eval << "model,metric,n,mean,std,q025,q975\n";
  for (const auto& [model, errs] : errors_mse) {
    BootstrapSummary b = bootstrap_eval(
        errs, config.bootstrap_b,
        derive_seed(config.seed, "fit.bootstrap", model + ":mse"));
    eval << model << ",mse," << errs.size() << "," << fmt(b.mean) << ","
         << fmt(b.std_dev) << "," << fmt(b.q025) << "," << fmt(b.q975)
         << "\n";
  }
  for (const auto& [model, errs] : errors_kl) {
    BootstrapSummary b = bootstrap_eval(
        errs, config.bootstrap_b,
        derive_seed(config.seed, "fit.bootstrap", model + ":kl"));
    eval << model << ",kl," << errs.size() << "," << fmt(b.mean) << ","
         << fmt(b.std_dev) << "," << fmt(b.q025) << "," << fmt(b.q975)
         << "\n";
  }

  std::ofstream importance = open_output(config, "fit_importance.csv");
  importance << "feature,l1_norm\n";
  {
    std::vector<std::pair<std::string, double>> rows(
        report_lin.feature_l1.begin(), report_lin.feature_l1.end());
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) {
                       return a.second > b.second;
                     });
    for (const auto& [name, l1] : rows) {
      importance << name << "," << fmt(l1) << "\n";
    }
  }

  {
    nlohmann::json j = {{"config", config.resolved()},
                        {"weights", nlohmann::json::parse(to_json(linear))},
                        {"report",
                         nlohmann::json::parse(report_lin.to_json())}};
    std::ofstream out(std::filesystem::path(config.output_dir) /
                      "fit_linear.json");
    out << j.dump(2) << "\n";
  }
  {
    nlohmann::json j = {{"config", config.resolved()},
                        {"weights", nlohmann::json::parse(to_json(softmax))},
                        {"report",
                         nlohmann::json::parse(report_soft.to_json())}};
    std::ofstream out(std::filesystem::path(config.output_dir) /
                      "fit_softmax.json");
    out << j.dump(2) << "\n";
  }
  return 0;
}

int cmd_analyze(const RunConfig& config) {
  LoadedInputs inputs = load_inputs(config, config.sessions_dir);

  // Pooled (member, round) points across every team.
  std::vector<double> pool_expertise, pool_confidence, pool_persuasiveness;
  std::vector<double> pool_in_strength, pool_out_strength;
  std::vector<TimeSeriesTriple> triples;
  bool any_messages = false;
  Failures failures;

  for (const TeamSession& session : inputs.sessions) {
    try {
      std::vector<TimeSeriesTriple> team_triples = session_triples(session);
      const int n = session.size();

      std::vector<int> reported;
      for (int t = 0; t < session.round_count(); ++t) {
        if (session.rounds[t].influence_report) reported.push_back(t);
      }
      // Cumulative response network through each reported round.
      NetworkConfig nc;
      nc.kind = NetworkKind::Response;
      nc.window = config.window;
      nc.gamma = config.gamma;
      Eigen::MatrixXd cumulative = Eigen::MatrixXd::Zero(n, n);
      int consumed = 0;
      for (std::size_t k = 0; k < reported.size(); ++k) {
        while (consumed <= reported[k]) {
          cumulative +=
              build_network(session.rounds[consumed].messages, n, nc).weights;
          if (!session.rounds[consumed].messages.empty()) any_messages = true;
          ++consumed;
        }
        for (int i = 0; i < n; ++i) {
          pool_expertise.push_back(team_triples[i].expertise(k));
          pool_confidence.push_back(team_triples[i].confidence(k));
          pool_persuasiveness.push_back(team_triples[i].persuasiveness(k));
          pool_out_strength.push_back(cumulative.row(i).sum());
          pool_in_strength.push_back(cumulative.col(i).sum());
        }
      }
      for (auto& t : team_triples) {
        t.member_id = session.team_id + ":" + t.member_id;
        triples.push_back(std::move(t));
      }
    } catch (const std::exception& e) {
      failures.add(session.team_id, e);
    }
  }

  auto as_vec = [](const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
  };

  std::ofstream pearson_out = open_output(config, "analyze_pearson.csv");
  pearson_out << "pair,n,r,p_value,df,status\n";
  const std::vector<std::pair<std::string, std::pair<const std::vector<double>*,
                                                     const std::vector<double>*>>>
      pairs = {
          {"expertise~confidence", {&pool_expertise, &pool_confidence}},
          {"expertise~persuasiveness",
           {&pool_expertise, &pool_persuasiveness}},
          {"confidence~persuasiveness",
           {&pool_confidence, &pool_persuasiveness}},
      };
  for (const auto& [name, series] : pairs) {
    try {
      TestResult r = pearson(as_vec(*series.first), as_vec(*series.second));
      pearson_out << name << "," << series.first->size() << ","
                  << fmt(r.statistic) << "," << fmt(r.p_value) << "," << r.df
                  << ",ok\n";
    } catch (const Error& e) {
      pearson_out << name << "," << series.first->size() << ",,,,"
                  << to_string(e.kind()) << "\n";
    }
  }

  // Regressions of persuasiveness on the other measures, optionally with
  // the response-network strengths.
  std::ofstream ols_out = open_output(config, "analyze_ols.csv");
  std::ofstream ols_summary = open_output(config, "analyze_ols_summary.csv");
  ols_out << "model,term,coefficient,std_error,t_value,p_value,vif\n";
  ols_summary << "model,n,r_squared,log_likelihood,aic,bic,status\n";

  auto run_ols = [&](const std::string& model,
                     const std::vector<std::string>& terms,
                     const std::vector<const std::vector<double>*>& cols) {
    const auto N = pool_persuasiveness.size();
    try {
      Eigen::MatrixXd X(N, cols.size() + 1);
      X.col(0).setOnes();
      for (std::size_t c = 0; c < cols.size(); ++c) {
        X.col(c + 1) = as_vec(*cols[c]);
      }
      OlsResult fit = ols(X, as_vec(pool_persuasiveness));
      Eigen::VectorXd factors(cols.size());
      bool have_vif = cols.size() >= 2;
      if (have_vif) {
        factors = vif(X.rightCols(static_cast<int>(cols.size())));
      }
      for (std::size_t c = 0; c <= cols.size(); ++c) {
        std::string term = c == 0 ? "intercept" : terms[c - 1];
        ols_out << model << "," << term << "," << fmt(fit.coefficients(c))
                << "," << fmt(fit.std_errors(c)) << ","
                << fmt(fit.t_values(c)) << "," << fmt(fit.p_values(c)) << ",";
        if (c > 0 && have_vif) ols_out << fmt(factors(c - 1));
        ols_out << "\n";
      }
      ols_summary << model << "," << N << "," << fmt(fit.r_squared) << ","
                  << fmt(fit.log_likelihood) << "," << fmt(fit.aic) << ","
                  << fmt(fit.bic) << ",ok\n";
    } catch (const Error& e) {
      ols_summary << model << "," << N << ",,,,," << to_string(e.kind())
                  << "\n";
    }
  };

  if (!pool_persuasiveness.empty()) {
    run_ols("base", {"expertise", "confidence"},
            {&pool_expertise, &pool_confidence});
    if (any_messages) {
      run_ols("networks",
              {"expertise", "confidence", "response_out", "response_in"},
              {&pool_expertise, &pool_confidence, &pool_out_strength,
               &pool_in_strength});
    }
  }

  CausalSummary causal = causal_summary(triples, config.fdr);
  std::ofstream causal_out = open_output(config, "analyze_causality.csv");
  causal_out << "# bh_threshold = " << fmt(causal.bh_threshold) << "\n";
  causal_out << "# total_tests = " << causal.total_tests
             << ", skipped = " << causal.skipped << "\n";
  causal_out << "cause,effect,lag,tested,significant,proportion,lag1_rank\n";
  for (const auto& cell : causal.cells) {
    causal_out << cell.cause << "," << cell.effect << "," << cell.lag << ","
               << cell.tested << "," << cell.significant << ","
               << fmt(cell.proportion) << ",";
    if (cell.lag == 1) {
      auto it = std::find(causal.lag1_ranking.begin(),
                          causal.lag1_ranking.end(),
                          cell.cause + "->" + cell.effect);
      causal_out << (it - causal.lag1_ranking.begin()) + 1;
    }
    causal_out << "\n";
  }
  return failures.finish("analyze");
}

int cmd_networks(const RunConfig& config) {
  LoadedInputs inputs = load_inputs(config, config.sessions_dir);

  int max_n = 0;
  for (const auto& s : inputs.sessions) max_n = std::max(max_n, s.size());

  std::ofstream out = open_output(config, "networks.csv");
  out << "team,round,kind,member";
  for (int j = 0; j < max_n; ++j) out << ",w" << j;
  out << "\n";

  Failures failures;
  for (const TeamSession& session : inputs.sessions) {
    try {
      const int n = session.size();
      std::vector<std::pair<std::string, NetworkConfig>> kinds;
      {
        NetworkConfig nc;
        nc.window = config.window;
        nc.gamma = config.gamma;
        nc.kind = NetworkKind::Response;
        kinds.emplace_back("response", nc);
        if (inputs.sentiment) {
          nc.kind = NetworkKind::Sentiment;
          nc.lexicon = &*inputs.sentiment;
          kinds.emplace_back("sentiment", nc);
        }
        if (inputs.emotion) {
          nc.kind = NetworkKind::Emotion;
          nc.lexicon = &*inputs.emotion;
          nc.axis = config.emotion_axis;
          kinds.emplace_back("emotion", nc);
        }
      }
      for (int t = 0; t < session.round_count(); ++t) {
        for (const auto& [name, nc] : kinds) {
          ConnectivityNetwork net =
              build_network(session.rounds[t].messages, n, nc);
          for (int i = 0; i < n; ++i) {
            out << session.team_id << "," << (t + 1) << "," << name << ","
                << session.member_ids[i];
            for (int j = 0; j < n; ++j) out << "," << fmt(net.weights(i, j));
            for (int j = n; j < max_n; ++j) out << ",";
            out << "\n";
          }
        }
      }
    } catch (const std::exception& e) {
      failures.add(session.team_id, e);
    }
  }
  return failures.finish("networks");
}

}  // namespace influence
