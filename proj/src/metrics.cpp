#include "influence/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <json.hpp>

namespace influence {

namespace {

void check_same_shape(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                "matrices have different shapes");
  }
}

}  // namespace

double mse(const Eigen::MatrixXd& M, const Eigen::MatrixXd& Mhat) {
  check_same_shape(M, Mhat);
  return (M - Mhat).squaredNorm() / double(M.rows());
}

double mse(const InfluenceMatrix& M, const InfluenceMatrix& Mhat) {
  return mse(M.matrix(), Mhat.matrix());
}

double kl(const Eigen::MatrixXd& M, const Eigen::MatrixXd& Mhat, double eps) {
  check_same_shape(M, Mhat);
  double total = 0.0;
  for (int i = 0; i < M.rows(); ++i) {
    for (int j = 0; j < M.cols(); ++j) {
      double p = M(i, j);
      if (p <= 0.0) continue;  // 0 log(0/.) = 0
      double q = std::max(Mhat(i, j), eps);
      total += p * std::log(p / q);
    }
  }
  return total / double(M.rows());
}

double kl(const InfluenceMatrix& M, const InfluenceMatrix& Mhat, double eps) {
  return kl(M.matrix(), Mhat.matrix(), eps);
}

Eigen::VectorXd confidence(const InfluenceMatrix& M) {
  return M.matrix().diagonal();
}

Eigen::VectorXd local_persuasiveness(const InfluenceMatrix& M) {
  const int n = M.size();
  if (n < 2) {
    throw Error(ErrorKind::TeamTooSmall, "persuasiveness needs n >= 2");
  }
  Eigen::VectorXd p(n);
  for (int i = 0; i < n; ++i) {
    p(i) = (M.matrix().col(i).sum() - M(i, i)) / double(n - 1);
  }
  return p;
}

InfluenceMatrix relative_appraisal(const InfluenceMatrix& M) {
  const int n = M.size();
  Eigen::MatrixXd C = M.matrix();
  C.diagonal().setZero();
  for (int i = 0; i < n; ++i) {
    double off = C.row(i).sum();
    if (off <= 0.0) {
      throw Error(ErrorKind::IsolatedRater,
                  "row " + std::to_string(i) +
                      " assigns all influence to itself");
    }
    C.row(i) /= off;
  }
  return validate_row_stochastic(C);
}

SimplexVector global_persuasiveness(const InfluenceMatrix& M) {
  return left_stationary(relative_appraisal(M));
}

Eigen::VectorXd mean_reversion(const InfluenceMatrix& M) {
  const int n = M.size();
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) {
    d(i) = (M.matrix().row(i).array() - 1.0 / n).square().sum();
  }
  return d;
}

std::vector<ExpertiseVector> expertise_series(const TeamSession& session) {
  const int n = session.size();
  std::vector<int> answered(n, 0);
  std::vector<int> correct(n, 0);
  std::vector<ExpertiseVector> series;
  series.reserve(session.rounds.size());
  for (const auto& round : session.rounds) {
    for (const auto& q : round.questions) {
      for (int i = 0; i < n; ++i) {
        if (q.answered[i]) {
          ++answered[i];
          if (q.correct[i]) ++correct[i];
        }
      }
    }
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      y(i) = answered[i] > 0 ? double(correct[i]) / double(answered[i]) : 0.0;
    }
    series.push_back(ExpertiseVector::validated(y));
  }
  return series;
}

void MetricReport::add(const std::string& team, int round,
                       const std::string& metric, double value) {
  rows.push_back({team, round, metric, value});
}

namespace {

std::vector<double> collect(const std::vector<MetricRow>& rows,
                            const std::string& metric) {
  std::vector<double> values;
  for (const auto& r : rows) {
    if (r.metric == metric) values.push_back(r.value);
  }
  return values;
}

double quantile_of(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  double pos = q * double(v.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = pos - double(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace

double MetricReport::mean(const std::string& metric) const {
  auto v = collect(rows, metric);
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

double MetricReport::median(const std::string& metric) const {
  return quantile_of(collect(rows, metric), 0.5);
}

double MetricReport::quantile(const std::string& metric, double q) const {
  return quantile_of(collect(rows, metric), q);
}

void MetricReport::write_csv(std::ostream& out) const {
  out << "team,round,metric,value\n";
  for (const auto& r : rows) {
    out << r.team << "," << r.round << "," << r.metric << ","
        << r.value << "\n";
  }
}

std::string MetricReport::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) {
    j.push_back({{"team", r.team},
                 {"round", r.round},
                 {"metric", r.metric},
                 {"value", r.value}});
  }
  return j.dump(2);
}

}  // namespace influence
