#include "influence/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "influence/metrics.hpp"
#include "influence/rng.hpp"

namespace influence {

namespace {

constexpr double kPi = 3.14159265358979323846;

double two_sided_t_p(double t, double df) {
  if (!std::isfinite(t)) return 0.0;
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

double f_upper_p(double F, double df1, double df2) {
  if (!std::isfinite(F)) return 0.0;
  boost::math::fisher_f dist(df1, df2);
  return boost::math::cdf(boost::math::complement(dist, F));
}

void check_lengths(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::DimensionMismatch, "series lengths differ");
  }
}

double variance_of(const Eigen::VectorXd& v) {
  Eigen::ArrayXd c = v.array() - v.mean();
  return c.square().sum();
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  double pos = q * double(sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - double(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

std::vector<TimeSeriesTriple> session_triples(const TeamSession& session) {
  const int n = session.size();
  std::vector<ExpertiseVector> expertise = expertise_series(session);
  std::vector<int> reported;
  for (int t = 0; t < session.round_count(); ++t) {
    if (session.rounds[t].influence_report) reported.push_back(t);
  }
  const int T = static_cast<int>(reported.size());
  std::vector<TimeSeriesTriple> triples(n);
  for (int i = 0; i < n; ++i) {
    triples[i].member_id = session.member_ids[i];
    triples[i].expertise.resize(T);
    triples[i].confidence.resize(T);
    triples[i].persuasiveness.resize(T);
  }
  for (int k = 0; k < T; ++k) {
    const InfluenceMatrix& M = *session.rounds[reported[k]].influence_report;
    Eigen::VectorXd conf = confidence(M);
    Eigen::VectorXd pers = local_persuasiveness(M);
    for (int i = 0; i < n; ++i) {
      triples[i].expertise(k) = expertise[reported[k]](i);
      triples[i].confidence(k) = conf(i);
      triples[i].persuasiveness(k) = pers(i);
    }
  }
  return triples;
}

TestResult pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  check_lengths(x, y);
  const int n = static_cast<int>(x.size());
  if (n < 3) {
    throw Error(ErrorKind::SeriesTooShort, "pearson needs length >= 3");
  }
  double sx = variance_of(x);
  double sy = variance_of(y);
  if (sx <= 0.0 || sy <= 0.0) {
    throw Error(ErrorKind::DegenerateSeries, "pearson: zero variance");
  }
  double sxy = ((x.array() - x.mean()) * (y.array() - y.mean())).sum();
  double r = sxy / std::sqrt(sx * sy);
  r = std::clamp(r, -1.0, 1.0);

  TestResult res;
  res.statistic = r;
  res.df = n - 2;
  res.label = "pearson";
  double denom = 1.0 - r * r;
  if (denom <= 0.0) {
    res.p_value = 0.0;
  } else {
    double t = r * std::sqrt(double(n - 2) / denom);
    res.p_value = two_sided_t_p(t, double(n - 2));
  }
  return res;
}

OlsResult ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  if (y.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "ols: rows of X vs y");
  }
  if (n <= p) {
    throw Error(ErrorKind::RankDeficient, "ols: needs more rows than columns");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    throw Error(ErrorKind::RankDeficient, "ols: design is rank deficient");
  }
  OlsResult res;
  res.coefficients = qr.solve(y);
  Eigen::VectorXd resid = y - X * res.coefficients;
  double rss = resid.squaredNorm();
  res.df_residual = n - p;
  res.sigma2 = rss / res.df_residual;

  Eigen::MatrixXd xtx_inv =
      (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  res.std_errors.resize(p);
  res.t_values.resize(p);
  res.p_values.resize(p);
  for (int j = 0; j < p; ++j) {
    res.std_errors(j) = std::sqrt(res.sigma2 * xtx_inv(j, j));
    res.t_values(j) =
        res.std_errors(j) > 0.0
            ? res.coefficients(j) / res.std_errors(j)
            : std::numeric_limits<double>::infinity();
    res.p_values(j) = two_sided_t_p(res.t_values(j), double(res.df_residual));
  }

  double tss = variance_of(y);
  res.r_squared = tss > 0.0 ? 1.0 - rss / tss : 1.0;

  // Gaussian log-likelihood at the MLE variance rss/n; k counts every
  // coefficient plus the variance.
  double sigma2_ml = rss / n;
  if (sigma2_ml <= 0.0) sigma2_ml = std::numeric_limits<double>::min();
  res.log_likelihood =
      -0.5 * n * (std::log(2.0 * kPi * sigma2_ml) + 1.0);
  double k = p + 1;
  res.aic = 2.0 * k - 2.0 * res.log_likelihood;
  res.bic = k * std::log(double(n)) - 2.0 * res.log_likelihood;
  return res;
}

Eigen::VectorXd vif(const Eigen::MatrixXd& X) {
  const int p = static_cast<int>(X.cols());
  if (p < 2) {
    throw Error(ErrorKind::ValidationError, "vif needs >= 2 predictors");
  }
  Eigen::VectorXd out(p);
  for (int j = 0; j < p; ++j) {
    Eigen::MatrixXd Z(X.rows(), p);
    Z.col(0).setOnes();
    int at = 1;
    for (int k = 0; k < p; ++k) {
      if (k != j) Z.col(at++) = X.col(k);
    }
    OlsResult fit = ols(Z, X.col(j));
    double denom = 1.0 - fit.r_squared;
    if (denom <= 1e-12) {
      throw Error(ErrorKind::RankDeficient,
                  "vif: predictor " + std::to_string(j) +
                      " is collinear with the rest");
    }
    out(j) = 1.0 / denom;
  }
  return out;
}

TestResult granger(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                   int lag) {
  check_lengths(x, y);
  if (lag < 1) {
    throw Error(ErrorKind::ValidationError, "granger: lag must be >= 1");
  }
  const int T = static_cast<int>(y.size());
  // The augmented model has 2 lag + 1 parameters on T - lag rows; one
  // more row keeps the denominator df positive.
  if (T < 3 * lag + 2) {
    throw Error(ErrorKind::SeriesTooShort,
                "granger: need length >= " + std::to_string(3 * lag + 2) +
                    " for lag " + std::to_string(lag));
  }
  if (variance_of(x) <= 0.0 || variance_of(y) <= 0.0) {
    throw Error(ErrorKind::DegenerateSeries, "granger: constant series");
  }

  const int N = T - lag;
  Eigen::VectorXd target = y.tail(N);
  Eigen::MatrixXd restricted(N, lag + 1);
  Eigen::MatrixXd augmented(N, 2 * lag + 1);
  restricted.col(0).setOnes();
  augmented.col(0).setOnes();
  for (int ell = 1; ell <= lag; ++ell) {
    restricted.col(ell) = y.segment(lag - ell, N);
    augmented.col(ell) = y.segment(lag - ell, N);
    augmented.col(lag + ell) = x.segment(lag - ell, N);
  }

  double rss_r, rss_u;
  try {
    OlsResult fr = ols(restricted, target);
    OlsResult fu = ols(augmented, target);
    rss_r = fr.sigma2 * fr.df_residual;
    rss_u = fu.sigma2 * fu.df_residual;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::RankDeficient) {
      throw Error(ErrorKind::DegenerateSeries,
                  std::string("granger: ") + e.what());
    }
    throw;
  }

  TestResult res;
  res.df_num = lag;
  res.df = N - (2 * lag + 1);
  res.label = "granger lag=" + std::to_string(lag);
  res.low_power = res.df < 5;
  if (rss_u <= 0.0) {
    res.statistic = std::numeric_limits<double>::infinity();
    res.p_value = 0.0;
    return res;
  }
  res.statistic = ((rss_r - rss_u) / lag) / (rss_u / res.df);
  if (res.statistic < 0.0) res.statistic = 0.0;  // rounding
  res.p_value = f_upper_p(res.statistic, res.df_num, res.df);
  return res;
}

BhResult bh_correct(const std::vector<double>& p_values, double fdr) {
  if (!(fdr > 0.0 && fdr < 1.0)) {
    throw Error(ErrorKind::ValidationError, "bh: fdr must lie in (0,1)");
  }
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorKind::ValidationError, "bh: p-values must lie in [0,1]");
    }
  }
  const int m = static_cast<int>(p_values.size());
  BhResult res;
  res.reject.assign(m, false);
  if (m == 0) return res;

  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return p_values[a] < p_values[b]; });
  int k_star = 0;
  for (int k = 1; k <= m; ++k) {
    if (p_values[order[k - 1]] <= double(k) * fdr / m) k_star = k;
  }
  if (k_star == 0) return res;
  res.threshold = double(k_star) * fdr / m;
  double p_cut = p_values[order[k_star - 1]];
  for (int i = 0; i < m; ++i) {
    if (p_values[i] <= p_cut) {
      res.reject[i] = true;
      ++res.rejected;
    }
  }
  return res;
}

BootstrapSummary bootstrap_eval(const std::vector<double>& errors, int B,
                                std::uint64_t seed) {
  if (errors.empty()) {
    throw Error(ErrorKind::ValidationError, "bootstrap: empty error list");
  }
  if (B < 1) {
    throw Error(ErrorKind::ValidationError, "bootstrap: B must be >= 1");
  }
  const std::size_t N = errors.size();
  std::mt19937_64 gen(seed);
  BootstrapSummary out;
  out.means.reserve(B);
  for (int b = 0; b < B; ++b) {
    double total = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      total += errors[uniform_index(gen, N)];
    }
    out.means.push_back(total / double(N));
  }
  double sum = std::accumulate(out.means.begin(), out.means.end(), 0.0);
  out.mean = sum / B;
  double ss = 0.0;
  for (double m : out.means) ss += (m - out.mean) * (m - out.mean);
  out.std_dev = B > 1 ? std::sqrt(ss / (B - 1)) : 0.0;
  std::vector<double> sorted = out.means;
  std::sort(sorted.begin(), sorted.end());
  out.q025 = quantile_sorted(sorted, 0.025);
  out.q975 = quantile_sorted(sorted, 0.975);
  return out;
}

CausalSummary causal_summary(const std::vector<TimeSeriesTriple>& triples,
                             double fdr) {
  static const char* kNames[3] = {"expertise", "confidence", "persuasiveness"};
  CausalSummary summary;

  struct Pending {
    int cell;
    double p;
  };
  std::vector<Pending> pending;
  std::vector<CausalCell> cells;
  for (int lag : {1, 2}) {
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        if (a == b) continue;
        CausalCell cell;
        cell.cause = kNames[a];
        cell.effect = kNames[b];
        cell.lag = lag;
        cells.push_back(cell);
      }
    }
  }
  auto cell_index = [](int a, int b, int lag) {
    int pair = a * 2 + (b > a ? b - 1 : b);
    return (lag - 1) * 6 + pair;
  };
  auto series_of = [](const TimeSeriesTriple& t, int which)
      -> const Eigen::VectorXd& {
    switch (which) {
      case 0: return t.expertise;
      case 1: return t.confidence;
      default: return t.persuasiveness;
    }
  };

  for (const auto& triple : triples) {
    for (int lag : {1, 2}) {
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          if (a == b) continue;
          int idx = cell_index(a, b, lag);
          try {
            TestResult r = granger(series_of(triple, a), series_of(triple, b),
                                   lag);
            cells[idx].tested += 1;
            pending.push_back({idx, r.p_value});
          } catch (const Error& e) {
            if (e.kind() == ErrorKind::SeriesTooShort ||
                e.kind() == ErrorKind::DegenerateSeries) {
              summary.skipped += 1;
            } else {
              throw;
            }
          }
        }
      }
    }
  }

  std::vector<double> pooled;
  pooled.reserve(pending.size());
  for (const auto& p : pending) pooled.push_back(p.p);
  BhResult bh = bh_correct(pooled, fdr);
  summary.bh_threshold = bh.threshold;
  summary.total_tests = static_cast<int>(pending.size());
  for (std::size_t i = 0; i < pending.size(); ++i) {
    if (bh.reject[i]) cells[pending[i].cell].significant += 1;
  }
  for (auto& cell : cells) {
    cell.proportion =
        cell.tested > 0 ? double(cell.significant) / cell.tested : 0.0;
  }
  summary.cells = std::move(cells);

  std::vector<const CausalCell*> lag1;
  for (const auto& cell : summary.cells) {
    if (cell.lag == 1) lag1.push_back(&cell);
  }
  std::stable_sort(lag1.begin(), lag1.end(),
                   [](const CausalCell* a, const CausalCell* b) {
                     return a->proportion > b->proportion;
                   });
  for (const auto* cell : lag1) {
    summary.lag1_ranking.push_back(cell->cause + "->" + cell->effect);
  }
  return summary;
}

}  // namespace influence
