#include "influence/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <json.hpp>

namespace influence {

namespace {

using nlohmann::json;

double soft(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double t) {
  Eigen::VectorXd out(v.size());
  for (int i = 0; i < v.size(); ++i) out(i) = soft(v(i), t);
  return out;
}

using SmoothFn =
    std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;

struct StageResult {
  int iterations = 0;
  bool converged = false;
  bool failed_at_start = false;
  std::vector<double> trace;
  double final_value = 0.0;
};

// Proximal gradient with backtracking on the quadratic majorizer. The
// accepted objective sequence is nonincreasing; the loop stops at the
// first step the floating-point floor refuses.
StageResult ista(Eigen::VectorXd& x, const SmoothFn& smooth, double lambda,
                 const SolverConfig& config) {
  StageResult out;
  Eigen::VectorXd g(x.size());
  double f = smooth(x, &g);
  double obj = f + lambda * x.lpNorm<1>();
  out.trace.push_back(obj);

  double eta = config.initial_step;
  for (int it = 0; it < config.max_iters; ++it) {
    bool accepted = false;
    Eigen::VectorXd z;
    double fz = 0.0;
    while (eta > 1e-18) {
      z = soft_threshold(x - eta * g, eta * lambda);
      Eigen::VectorXd d = z - x;
      fz = smooth(z, nullptr);
      if (fz <= f + g.dot(d) + d.squaredNorm() / (2.0 * eta)) {
        accepted = true;
        break;
      }
      eta *= config.backtrack;
    }
    if (!accepted) {
      out.failed_at_start = (it == 0);
      break;
    }
    double zobj = fz + lambda * z.lpNorm<1>();
    if (zobj > obj) break;
    x = z;
    double prev = obj;
    obj = zobj;
    out.trace.push_back(obj);
    ++out.iterations;
    if (std::abs(prev - obj) <= config.tol * std::max(1.0, std::abs(prev))) {
      out.converged = true;
      break;
    }
    f = smooth(x, &g);
    eta = std::min(eta * 2.0, config.initial_step);
  }
  out.final_value = obj;
  return out;
}

struct LinData {
  std::vector<std::vector<Eigen::MatrixXd>> X;  // X[sample][feature]
  std::vector<Eigen::MatrixXd> M;
  std::vector<Eigen::MatrixXd> Xmean;  // per feature, for aggregate mode
  int n = 0;
  std::vector<int> cols;  // feature column counts
};

struct LinParams {
  std::vector<Eigen::MatrixXd> W;
  Eigen::MatrixXd B;
};

Eigen::VectorXd lin_pack(const LinParams& p) {
  int total = static_cast<int>(p.B.size());
  for (const auto& w : p.W) total += static_cast<int>(w.size());
  Eigen::VectorXd v(total);
  int at = 0;
  for (const auto& w : p.W) {
    v.segment(at, w.size()) = Eigen::Map<const Eigen::VectorXd>(w.data(),
                                                                w.size());
    at += static_cast<int>(w.size());
  }
  v.segment(at, p.B.size()) =
      Eigen::Map<const Eigen::VectorXd>(p.B.data(), p.B.size());
  return v;
}

LinParams lin_unpack(const Eigen::VectorXd& v, const LinData& data) {
  LinParams p;
  int at = 0;
  for (int c : data.cols) {
    p.W.emplace_back(Eigen::Map<const Eigen::MatrixXd>(v.data() + at, data.n,
                                                       c));
    at += data.n * c;
  }
  p.B = Eigen::Map<const Eigen::MatrixXd>(v.data() + at, data.n, data.n);
  return p;
}

Eigen::MatrixXd lin_predict(const LinParams& p,
                            const std::vector<Eigen::MatrixXd>& X) {
  Eigen::MatrixXd P = p.B;
  for (std::size_t k = 0; k < X.size(); ++k) {
    P += X[k] * p.W[k].transpose();
  }
  return P;
}

// Applies the constraint penalty on P with weight rho, accumulating the
// value and dValue/dP.
double constraint_penalty(const Eigen::MatrixXd& P, double rho,
                          Eigen::MatrixXd* G) {
  double value = 0.0;
  const int n = static_cast<int>(P.rows());
  for (int i = 0; i < n; ++i) {
    double row_sum = P.row(i).sum();
    double dev = row_sum - 1.0;
    value += rho * dev * dev;
    for (int j = 0; j < static_cast<int>(P.cols()); ++j) {
      if (P(i, j) < 0.0) {
        value += rho * P(i, j) * P(i, j);
        if (G) (*G)(i, j) += 2.0 * rho * P(i, j);
      }
      if (G) (*G)(i, j) += 2.0 * rho * dev;
    }
  }
  return value;
}

double lin_smooth(const LinData& data, const Eigen::VectorXd& v, double rho,
                  ConstraintMode mode, Eigen::VectorXd* grad_out) {
  LinParams p = lin_unpack(v, data);
  LinParams g;
  if (grad_out) {
    for (int c : data.cols) g.W.push_back(Eigen::MatrixXd::Zero(data.n, c));
    g.B = Eigen::MatrixXd::Zero(data.n, data.n);
  }
  const auto S = data.M.size();
  double value = 0.0;
  Eigen::MatrixXd Abar;
  if (mode == ConstraintMode::Aggregate) {
    Abar = Eigen::MatrixXd::Zero(data.n, data.n);
  }
  for (std::size_t s = 0; s < S; ++s) {
    Eigen::MatrixXd P = lin_predict(p, data.X[s]);
    Eigen::MatrixXd R = P - data.M[s];
    value += R.squaredNorm();
    Eigen::MatrixXd G = 2.0 * R;
    if (mode == ConstraintMode::PerSample && rho > 0.0) {
      value += constraint_penalty(P, rho, grad_out ? &G : nullptr);
    }
    if (grad_out) {
      g.B += G;
      for (std::size_t k = 0; k < data.X[s].size(); ++k) {
        g.W[k] += G.transpose() * data.X[s][k];
      }
    }
    if (mode == ConstraintMode::Aggregate) Abar += P / double(S);
  }
  if (mode == ConstraintMode::Aggregate && rho > 0.0) {
    Eigen::MatrixXd GA = Eigen::MatrixXd::Zero(data.n, data.n);
    value += constraint_penalty(Abar, rho, grad_out ? &GA : nullptr);
    if (grad_out) {
      g.B += GA;
      for (std::size_t k = 0; k < data.Xmean.size(); ++k) {
        g.W[k] += GA.transpose() * data.Xmean[k];
      }
    }
  }
  if (grad_out) *grad_out = lin_pack(g);
  return value;
}

double lin_violation(const LinData& data, const LinParams& p,
                     ConstraintMode mode) {
  double worst = 0.0;
  auto measure = [&](const Eigen::MatrixXd& P) {
    double neg = std::max(0.0, -P.minCoeff());
    double dev = (P.rowwise().sum().array() - 1.0).abs().maxCoeff();
    worst = std::max({worst, neg, dev});
  };
  if (mode == ConstraintMode::Aggregate) {
    Eigen::MatrixXd Abar = Eigen::MatrixXd::Zero(data.n, data.n);
    for (std::size_t s = 0; s < data.M.size(); ++s) {
      Abar += lin_predict(p, data.X[s]) / double(data.M.size());
    }
    measure(Abar);
  } else {
    for (std::size_t s = 0; s < data.M.size(); ++s) {
      measure(lin_predict(p, data.X[s]));
    }
  }
  return worst;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json data = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  int rows = j.at("rows").get<int>();
  int cols = j.at("cols").get<int>();
  const json& data = j.at("data");
  if (static_cast<int>(data.size()) != rows * cols) {
    throw Error(ErrorKind::SchemaError, "matrix data does not match shape");
  }
  Eigen::MatrixXd m(rows, cols);
  int at = 0;
  for (int i = 0; i < rows; ++i) {
    for (int j2 = 0; j2 < cols; ++j2) m(i, j2) = data[at++].get<double>();
  }
  return m;
}

std::vector<FeatureKind> kinds_from_json(const json& j) {
  std::vector<FeatureKind> kinds;
  for (const auto& k : j) {
    kinds.push_back(feature_kind_from_string(k.get<std::string>()));
  }
  return kinds;
}

json kinds_json(const std::vector<FeatureKind>& kinds) {
  json arr = json::array();
  for (FeatureKind k : kinds) arr.push_back(to_string(k));
  return arr;
}

}  // namespace

std::string FitReport::to_json() const {
  json traces = json::array();
  for (const auto& t : stage_traces) traces.push_back(t);
  json j = {{"final_objective", final_objective},
            {"iterations", iterations},
            {"converged", converged},
            {"max_constraint_violation", max_constraint_violation},
            {"feature_l1", feature_l1},
            {"stage_traces", traces}};
  return j.dump(2);
}

LinearWeights fit_linear(const std::vector<Sample>& dataset,
                         const std::vector<FeatureKind>& kinds, double lambda,
                         const SolverConfig& config, FitReport* report) {
  if (dataset.empty()) {
    throw Error(ErrorKind::ValidationError, "fit_linear: empty dataset");
  }
  LinData data;
  data.n = dataset[0].target.size();
  for (const auto& sample : dataset) {
    if (sample.target.size() != data.n) {
      throw Error(ErrorKind::DimensionMismatch,
                  "fit_linear: inconsistent team sizes");
    }
    std::vector<Eigen::MatrixXd> Xs;
    for (FeatureKind k : kinds) {
      Xs.push_back(sample.features.feature_matrix(k));
    }
    for (std::size_t k = 0; k < Xs.size(); ++k) {
      if (static_cast<int>(Xs[k].rows()) != data.n) {
        throw Error(ErrorKind::DimensionMismatch,
                    "fit_linear: feature rows mismatch");
      }
      if (data.X.empty()) {
        data.cols.push_back(static_cast<int>(Xs[k].cols()));
      } else if (static_cast<int>(Xs[k].cols()) != data.cols[k]) {
        throw Error(ErrorKind::DimensionMismatch,
                    "fit_linear: feature columns mismatch");
      }
    }
    data.X.push_back(std::move(Xs));
    data.M.push_back(sample.target.matrix());
  }
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(data.n, data.cols[k]);
    for (const auto& Xs : data.X) mean += Xs[k] / double(data.X.size());
    data.Xmean.push_back(std::move(mean));
  }

  LinParams start;
  for (int c : data.cols) start.W.push_back(Eigen::MatrixXd::Zero(data.n, c));
  start.B = Eigen::MatrixXd::Constant(data.n, data.n, 1.0 / data.n);
  Eigen::VectorXd x = lin_pack(start);

  FitReport rep;
  rep.converged = true;
  for (int stage = 0; stage < config.penalty_stages; ++stage) {
    double rho = config.penalty_start *
                 std::pow(config.penalty_growth, double(stage));
    SmoothFn fn = [&](const Eigen::VectorXd& v, Eigen::VectorXd* g) {
      return lin_smooth(data, v, rho, config.constraints, g);
    };
    StageResult r = ista(x, fn, lambda, config);
    if (r.failed_at_start && stage == 0) {
      throw Error(ErrorKind::NoConvergence,
                  "fit_linear: no descent step from the start");
    }
    rep.stage_traces.push_back(std::move(r.trace));
    rep.iterations += r.iterations;
    rep.converged = rep.converged && r.converged;
  }

  LinearWeights weights;
  weights.kinds = kinds;
  LinParams p = lin_unpack(x, data);
  weights.W = p.W;
  weights.B = p.B;
  weights.lambda = lambda;

  double l1 = weights.B.cwiseAbs().sum();
  for (const auto& w : weights.W) l1 += w.cwiseAbs().sum();
  rep.final_objective =
      lin_smooth(data, x, 0.0, config.constraints, nullptr) + lambda * l1;
  rep.max_constraint_violation = lin_violation(data, p, config.constraints);
  rep.feature_l1 = feature_importance(weights);
  if (rep.max_constraint_violation > 0.5) {
    throw Error(ErrorKind::Infeasible,
                "fit_linear: constraints unmet after annealing (violation " +
                    std::to_string(rep.max_constraint_violation) + ")");
  }
  if (report) *report = std::move(rep);
  return weights;
}

Eigen::MatrixXd predict_linear_raw(const LinearWeights& weights,
                                   const FeatureBundle& bundle) {
  if (weights.B.rows() != bundle.n) {
    throw Error(ErrorKind::DimensionMismatch,
                "predict_linear: team size mismatch");
  }
  Eigen::MatrixXd P = weights.B;
  for (std::size_t k = 0; k < weights.kinds.size(); ++k) {
    Eigen::MatrixXd X = bundle.feature_matrix(weights.kinds[k]);
    if (X.cols() != weights.W[k].cols()) {
      throw Error(ErrorKind::DimensionMismatch,
                  "predict_linear: feature width mismatch");
    }
    P += X * weights.W[k].transpose();
  }
  return P;
}

InfluenceMatrix predict_linear(const LinearWeights& weights,
                               const FeatureBundle& bundle) {
  Eigen::MatrixXd P = predict_linear_raw(weights, bundle);
  for (int i = 0; i < P.rows(); ++i) {
    P.row(i) = project_to_simplex(P.row(i).transpose()).transpose();
  }
  return validate_row_stochastic(P);
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  const int n = static_cast<int>(v.size());
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double theta = 0.0;
  double cumsum = 0.0;
  for (int j = 0; j < n; ++j) {
    cumsum += u[j];
    double t = (1.0 - cumsum) / double(j + 1);
    if (u[j] + t > 0.0) theta = t;
  }
  return (v.array() + theta).max(0.0);
}

std::vector<RowSample> row_samples(const std::vector<Sample>& dataset,
                                   const std::vector<FeatureKind>& kinds) {
  std::vector<RowSample> rows;
  for (const auto& sample : dataset) {
    const int n = sample.target.size();
    std::vector<Eigen::MatrixXd> feats;
    int dim = 0;
    for (FeatureKind k : kinds) {
      feats.push_back(sample.features.feature_matrix(k));
      dim += static_cast<int>(feats.back().cols());
    }
    for (int i = 0; i < n; ++i) {
      RowSample row;
      row.x.resize(dim);
      int at = 0;
      for (const auto& X : feats) {
        row.x.segment(at, X.cols()) = X.row(i).transpose();
        at += static_cast<int>(X.cols());
      }
      row.target = sample.target.matrix().row(i).transpose();
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

// Stable softmax pieces shared by the loss, gradient, and predictor.
Eigen::VectorXd softmax_of(const Eigen::VectorXd& o) {
  double mx = o.maxCoeff();
  Eigen::VectorXd e = (o.array() - mx).exp();
  return e / e.sum();
}

}  // namespace

double softmax_loss(const Eigen::MatrixXd& W, const Eigen::VectorXd& b,
                    const std::vector<RowSample>& rows) {
  double total = 0.0;
  for (const auto& r : rows) {
    Eigen::VectorXd o = W.transpose() * r.x + b;
    double mx = o.maxCoeff();
    double log_z = std::log((o.array() - mx).exp().sum());
    total += r.target.sum() * (mx + log_z) - r.target.dot(o);
  }
  return total;
}

void softmax_loss_gradient(const Eigen::MatrixXd& W, const Eigen::VectorXd& b,
                           const std::vector<RowSample>& rows,
                           Eigen::MatrixXd& gW, Eigen::VectorXd& gb) {
  gW = Eigen::MatrixXd::Zero(W.rows(), W.cols());
  gb = Eigen::VectorXd::Zero(b.size());
  for (const auto& r : rows) {
    Eigen::VectorXd q = softmax_of(W.transpose() * r.x + b);
    Eigen::VectorXd d = r.target.sum() * q - r.target;
    gW += r.x * d.transpose();
    gb += d;
  }
}

SoftmaxWeights fit_softmax_rows(const std::vector<RowSample>& rows, int n_out,
                                double lambda, const SolverConfig& config,
                                FitReport* report) {
  if (rows.empty()) {
    throw Error(ErrorKind::ValidationError, "fit_softmax: empty dataset");
  }
  const int p = static_cast<int>(rows[0].x.size());
  for (const auto& r : rows) {
    if (static_cast<int>(r.x.size()) != p ||
        static_cast<int>(r.target.size()) != n_out) {
      throw Error(ErrorKind::DimensionMismatch,
                  "fit_softmax: inconsistent row shapes");
    }
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(p * n_out + n_out);
  SmoothFn fn = [&](const Eigen::VectorXd& v, Eigen::VectorXd* g) {
    Eigen::Map<const Eigen::MatrixXd> W(v.data(), p, n_out);
    Eigen::Map<const Eigen::VectorXd> b(v.data() + p * n_out, n_out);
    if (g) {
      Eigen::MatrixXd gW;
      Eigen::VectorXd gb;
      softmax_loss_gradient(W, b, rows, gW, gb);
      g->resize(v.size());
      g->segment(0, p * n_out) =
          Eigen::Map<const Eigen::VectorXd>(gW.data(), gW.size());
      g->segment(p * n_out, n_out) = gb;
    }
    return softmax_loss(W, b, rows);
  };
  StageResult r = ista(x, fn, lambda, config);
  if (r.failed_at_start) {
    throw Error(ErrorKind::NoConvergence,
                "fit_softmax: no descent step from the start");
  }

  SoftmaxWeights weights;
  weights.W = Eigen::Map<const Eigen::MatrixXd>(x.data(), p, n_out);
  weights.b = Eigen::Map<const Eigen::VectorXd>(x.data() + p * n_out, n_out);
  weights.lambda = lambda;

  if (report) {
    FitReport rep;
    rep.final_objective = r.final_value;
    rep.iterations = r.iterations;
    rep.converged = r.converged;
    rep.max_constraint_violation = 0.0;  // softmax rows are simplex by form
    rep.feature_l1 = {{"weights", weights.W.cwiseAbs().sum()},
                      {"bias", weights.b.cwiseAbs().sum()}};
    rep.stage_traces.push_back(std::move(r.trace));
    *report = std::move(rep);
  }
  return weights;
}

SoftmaxWeights fit_softmax(const std::vector<Sample>& dataset,
                           const std::vector<FeatureKind>& kinds,
                           double lambda, const SolverConfig& config,
                           FitReport* report) {
  if (dataset.empty()) {
    throw Error(ErrorKind::ValidationError, "fit_softmax: empty dataset");
  }
  const int n = dataset[0].target.size();
  std::vector<RowSample> rows = row_samples(dataset, kinds);
  SoftmaxWeights weights = fit_softmax_rows(rows, n, lambda, config, report);
  weights.kinds = kinds;
  if (report) {
    // Split the W rows back into their feature slices.
    report->feature_l1.clear();
    int at = 0;
    for (FeatureKind k : kinds) {
      int c = static_cast<int>(
          dataset[0].features.feature_matrix(k).cols());
      report->feature_l1[to_string(k)] =
          weights.W.middleRows(at, c).cwiseAbs().sum();
      at += c;
    }
    report->feature_l1["bias"] = weights.b.cwiseAbs().sum();
  }
  return weights;
}

Eigen::VectorXd predict_softmax_row(const SoftmaxWeights& weights,
                                    const Eigen::VectorXd& x) {
  if (x.size() != weights.W.rows()) {
    throw Error(ErrorKind::DimensionMismatch,
                "predict_softmax: feature size mismatch");
  }
  return softmax_of(weights.W.transpose() * x + weights.b);
}

InfluenceMatrix predict_softmax(const SoftmaxWeights& weights,
                                const FeatureBundle& bundle) {
  const int n = bundle.n;
  if (n != static_cast<int>(weights.b.size())) {
    throw Error(ErrorKind::DimensionMismatch,
                "predict_softmax: team size mismatch");
  }
  std::vector<Eigen::MatrixXd> feats;
  int dim = 0;
  for (FeatureKind k : weights.kinds) {
    feats.push_back(bundle.feature_matrix(k));
    dim += static_cast<int>(feats.back().cols());
  }
  if (dim != static_cast<int>(weights.W.rows())) {
    throw Error(ErrorKind::DimensionMismatch,
                "predict_softmax: feature width mismatch");
  }
  Eigen::MatrixXd P(n, n);
  Eigen::VectorXd x(dim);
  for (int i = 0; i < n; ++i) {
    int at = 0;
    for (const auto& X : feats) {
      x.segment(at, X.cols()) = X.row(i).transpose();
      at += static_cast<int>(X.cols());
    }
    P.row(i) = predict_softmax_row(weights, x).transpose();
  }
  return InfluenceMatrix::from_update(std::move(P));
}

std::map<std::string, double> feature_importance(
    const LinearWeights& weights) {
  std::map<std::string, double> out;
  for (std::size_t k = 0; k < weights.kinds.size(); ++k) {
    out[to_string(weights.kinds[k])] = weights.W[k].cwiseAbs().sum();
  }
  out["bias"] = weights.B.cwiseAbs().sum();
  return out;
}

std::vector<double> default_lambda_grid() {
  return {1e-4, 1e-3, 1e-2, 1e-1, 1.0};
}

std::string to_json(const LinearWeights& weights) {
  json mats = json::array();
  for (const auto& w : weights.W) mats.push_back(matrix_json(w));
  json j = {{"kinds", kinds_json(weights.kinds)},
            {"lambda", weights.lambda},
            {"W", mats},
            {"B", matrix_json(weights.B)}};
  return j.dump(2);
}

LinearWeights linear_weights_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::SchemaError,
                std::string("weights are not valid JSON: ") + e.what());
  }
  LinearWeights weights;
  weights.kinds = kinds_from_json(j.at("kinds"));
  weights.lambda = j.at("lambda").get<double>();
  for (const auto& m : j.at("W")) weights.W.push_back(matrix_from_json(m));
  weights.B = matrix_from_json(j.at("B"));
  if (weights.W.size() != weights.kinds.size()) {
    throw Error(ErrorKind::SchemaError, "weights/kinds length mismatch");
  }
  return weights;
}

std::string to_json(const SoftmaxWeights& weights) {
  json j = {{"kinds", kinds_json(weights.kinds)},
            {"lambda", weights.lambda},
            {"W", matrix_json(weights.W)},
            {"b", matrix_json(weights.b)}};
  return j.dump(2);
}

SoftmaxWeights softmax_weights_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::SchemaError,
                std::string("weights are not valid JSON: ") + e.what());
  }
  SoftmaxWeights weights;
  weights.kinds = kinds_from_json(j.at("kinds"));
  weights.lambda = j.at("lambda").get<double>();
  weights.W = matrix_from_json(j.at("W"));
  weights.b = matrix_from_json(j.at("b"));
  return weights;
}

}  // namespace influence
