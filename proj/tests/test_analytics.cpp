#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "influence/analytics.hpp"
#include "influence/rng.hpp"

using namespace influence;

namespace {

Eigen::VectorXd series(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<int>(values.size()));
  int i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

Eigen::VectorXd noise(std::mt19937_64& gen, int n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = normal(gen);
  return v;
}

}  // namespace

TEST_CASE("pearson recovers exact and hand-computed correlations") {
  TestResult perfect = pearson(series({1, 2, 3}), series({2, 4, 6}));
  CHECK(perfect.statistic == doctest::Approx(1.0).epsilon(1e-12));
  TestResult inverse = pearson(series({1, 2, 3}), series({6, 4, 2}));
  CHECK(inverse.statistic == doctest::Approx(-1.0).epsilon(1e-12));
  TestResult half = pearson(series({1, 2, 3}), series({1, 3, 2}));
  CHECK(half.statistic == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(half.df == 1.0);
  CHECK(half.p_value > 0.5);  // r = 0.5 on 3 points proves nothing
}

TEST_CASE("pearson rejects unusable input") {
  try {
    pearson(series({1, 2}), series({3, 4}));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SeriesTooShort);
  }
  try {
    pearson(series({1, 1, 1}), series({1, 2, 3}));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateSeries);
  }
  CHECK_THROWS_AS(pearson(series({1, 2, 3}), series({1, 2})), Error);
}

TEST_CASE("pearson is invariant under positive affine maps") {
  std::mt19937_64 gen(3);
  Eigen::VectorXd x = noise(gen, 30), y = noise(gen, 30);
  TestResult base = pearson(x, y);
  Eigen::VectorXd xs = 2.5 * x;
  Eigen::VectorXd ys = (0.3 * y).array() + 7.0;
  TestResult scaled = pearson(xs, ys);
  CHECK(scaled.statistic == doctest::Approx(base.statistic).epsilon(1e-12));
  CHECK(scaled.p_value == doctest::Approx(base.p_value).epsilon(1e-12));
}

TEST_CASE("ols solves exact linear systems exactly") {
  Eigen::MatrixXd X(5, 2);
  X << 1, 0, 1, 1, 1, 2, 1, 3, 1, 4;
  Eigen::VectorXd y = 2.0 * X.col(1) + Eigen::VectorXd::Constant(5, -1.0);
  OlsResult fit = ols(X, y);
  CHECK(fit.coefficients(0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(fit.coefficients(1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.df_residual == 3);
}

TEST_CASE("ols intercept-only fit is the sample mean") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(4, 1);
  OlsResult fit = ols(X, series({1, 2, 3, 6}));
  CHECK(fit.coefficients(0) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("ols residuals are orthogonal to the design") {
  std::mt19937_64 gen(5);
  Eigen::MatrixXd X(40, 3);
  X.col(0).setOnes();
  X.col(1) = noise(gen, 40);
  X.col(2) = noise(gen, 40);
  Eigen::VectorXd y = X.col(1) - 0.5 * X.col(2) + noise(gen, 40, 0.3);
  OlsResult fit = ols(X, y);
  Eigen::VectorXd resid = y - X * fit.coefficients;
  CHECK((X.transpose() * resid).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("ols slope estimates cover the truth") {
  // 200 seeded draws of y = 2x + noise(0.1): the 95% CI should cover 2
  // about 95% of the time; a [88%, 100%] band keeps the test stable.
  int covered = 0;
  const int trials = 200;
  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 gen(1000 + trial);
    Eigen::MatrixXd X(100, 2);
    X.col(0).setOnes();
    X.col(1) = noise(gen, 100);
    Eigen::VectorXd y = 2.0 * X.col(1) + noise(gen, 100, 0.1);
    OlsResult fit = ols(X, y);
    double lo = fit.coefficients(1) - 1.984 * fit.std_errors(1);
    double hi = fit.coefficients(1) + 1.984 * fit.std_errors(1);
    if (lo <= 2.0 && 2.0 <= hi) ++covered;
    CHECK(std::abs(fit.coefficients(1) - 2.0) < 0.05);
  }
  CHECK(covered >= 176);
}

TEST_CASE("ols information criteria follow the gaussian likelihood") {
  std::mt19937_64 gen(7);
  Eigen::MatrixXd X(30, 2);
  X.col(0).setOnes();
  X.col(1) = noise(gen, 30);
  Eigen::VectorXd y = X.col(1) + noise(gen, 30, 0.5);
  OlsResult fit = ols(X, y);
  Eigen::VectorXd resid = y - X * fit.coefficients;
  double rss = resid.squaredNorm();
  double n = 30.0;
  double ll = -0.5 * n *
              (std::log(2.0 * 3.14159265358979323846 * rss / n) + 1.0);
  CHECK(fit.log_likelihood == doctest::Approx(ll).epsilon(1e-10));
  CHECK(fit.aic == doctest::Approx(2.0 * 3 - 2.0 * ll).epsilon(1e-10));
  CHECK(fit.bic == doctest::Approx(3.0 * std::log(n) - 2.0 * ll).epsilon(1e-10));
}

TEST_CASE("ols rejects collinear designs") {
  Eigen::MatrixXd X(6, 3);
  X.col(0).setOnes();
  X.col(1) = series({1, 2, 3, 4, 5, 6});
  X.col(2) = 2.0 * X.col(1);
  try {
    ols(X, series({1, 2, 3, 4, 5, 6}));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::RankDeficient);
  }
}

TEST_CASE("vif is one for orthogonal predictors") {
  Eigen::MatrixXd X(4, 2);
  X.col(0) = series({1, 1, -1, -1});
  X.col(1) = series({1, -1, 1, -1});
  Eigen::VectorXd factors = vif(X);
  CHECK(factors(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(factors(1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("vif matches the hand value at correlation 0.9") {
  // x2 = 0.9 u + sqrt(0.19) v with u, v orthogonal and centered gives an
  // exact sample correlation of 0.9
  Eigen::VectorXd u = series({1, 1, -1, -1});
  Eigen::VectorXd v = series({1, -1, 1, -1});
  Eigen::MatrixXd X(4, 2);
  X.col(0) = u;
  X.col(1) = 0.9 * u + std::sqrt(0.19) * v;
  Eigen::VectorXd factors = vif(X);
  CHECK(std::abs(factors(0) - 5.263) < 1e-3);
  CHECK(std::abs(factors(1) - 5.263) < 1e-3);
}

TEST_CASE("vif flags duplicated predictors") {
  Eigen::MatrixXd X(5, 2);
  X.col(0) = series({1, 2, 3, 4, 5});
  X.col(1) = X.col(0);
  CHECK_THROWS_AS(vif(X), Error);
  Eigen::MatrixXd one(5, 1);
  one.col(0) = series({1, 2, 3, 4, 5});
  CHECK_THROWS_AS(vif(one), Error);
}

TEST_CASE("granger finds a strong lagged driver") {
  std::mt19937_64 gen(11);
  int hits = 0;
  const int trials = 200;
  for (int trial = 0; trial < trials; ++trial) {
    Eigen::VectorXd x = noise(gen, 50);
    Eigen::VectorXd y(50);
    y(0) = 0.0;
    std::normal_distribution<double> eps(0.0, 0.1);
    for (int t = 1; t < 50; ++t) y(t) = 0.9 * x(t - 1) + eps(gen);
    TestResult r = granger(x, y, 1);
    if (r.p_value < 0.01) ++hits;
  }
  CHECK(hits >= 190);
}

TEST_CASE("granger ignores an unrelated series") {
  std::mt19937_64 gen(13);
  int rejections = 0;
  const int trials = 400;
  for (int trial = 0; trial < trials; ++trial) {
    Eigen::VectorXd x = noise(gen, 50);
    Eigen::VectorXd y = noise(gen, 50);
    if (granger(x, y, 1).p_value < 0.05) ++rejections;
  }
  double rate = double(rejections) / trials;
  CHECK(rate > 0.01);
  CHECK(rate < 0.09);
}

TEST_CASE("granger rejects series it cannot test") {
  std::mt19937_64 gen(17);
  Eigen::VectorXd x = noise(gen, 4);
  Eigen::VectorXd y = noise(gen, 4);
  try {
    granger(x, y, 1);  // needs at least 5 points at lag 1
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SeriesTooShort);
  }
  Eigen::VectorXd flat = Eigen::VectorXd::Constant(20, 3.0);
  Eigen::VectorXd moving = noise(gen, 20);
  try {
    granger(flat, moving, 1);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateSeries);
  }
}

TEST_CASE("granger statistics survive affine rescaling") {
  std::mt19937_64 gen(19);
  Eigen::VectorXd x = noise(gen, 30);
  Eigen::VectorXd y(30);
  y(0) = 0.0;
  for (int t = 1; t < 30; ++t) y(t) = 0.5 * x(t - 1) + 0.3 * noise(gen, 1)(0);
  TestResult base = granger(x, y, 1);
  Eigen::VectorXd xs = (10.0 * x).array() - 4.0;
  Eigen::VectorXd ys = (0.5 * y).array() + 2.0;
  TestResult scaled = granger(xs, ys, 1);
  CHECK(scaled.statistic == doctest::Approx(base.statistic).epsilon(1e-8));
  CHECK(scaled.p_value == doctest::Approx(base.p_value).epsilon(1e-8));
}

TEST_CASE("granger marks thin designs as low power") {
  std::mt19937_64 gen(23);
  Eigen::VectorXd x = noise(gen, 9);
  Eigen::VectorXd y = noise(gen, 9);
  TestResult lag2 = granger(x, y, 2);  // denominator df = 7 - 5 = 2
  CHECK(lag2.low_power);
  CHECK(lag2.df == 2.0);
  CHECK(lag2.df_num == 2.0);
  TestResult lag1 = granger(noise(gen, 30), noise(gen, 30), 1);
  CHECK_FALSE(lag1.low_power);
}

TEST_CASE("bh_correct reproduces the hand example") {
  BhResult r = bh_correct({0.01, 0.02, 0.04, 0.5}, 0.05);
  CHECK(r.rejected == 2);
  CHECK(r.reject == std::vector<bool>{true, true, false, false});
  CHECK(r.threshold == doctest::Approx(0.025).epsilon(1e-15));
}

TEST_CASE("bh_correct handles the extremes") {
  BhResult none = bh_correct({1.0, 1.0, 1.0}, 0.05);
  CHECK(none.rejected == 0);
  CHECK(none.threshold == 0.0);
  BhResult all = bh_correct({0.0, 0.0, 0.0}, 0.05);
  CHECK(all.rejected == 3);
  CHECK_THROWS_AS(bh_correct({0.5, 1.2}, 0.05), Error);
  CHECK_THROWS_AS(bh_correct({0.5}, 1.5), Error);
}

TEST_CASE("bh_correct rejects at least what bonferroni does") {
  std::mt19937_64 gen(29);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> ps;
    int m = 1 + static_cast<int>(uniform_index(gen, 12));
    for (int i = 0; i < m; ++i) ps.push_back(uniform01(gen));
    BhResult bh = bh_correct(ps, 0.05);
    for (int i = 0; i < m; ++i) {
      bool bonferroni = ps[i] <= 0.05 / m;
      if (bonferroni) CHECK(bh.reject[i]);
    }
  }
}

TEST_CASE("bootstrap_eval is deterministic and statistically sane") {
  // dyadic value: every resample sum is exact, so the spread is exactly 0
  BootstrapSummary flat = bootstrap_eval({0.25, 0.25, 0.25}, 100, 7);
  CHECK(flat.mean == 0.25);
  CHECK(flat.std_dev == 0.0);
  BootstrapSummary near_flat = bootstrap_eval({0.3, 0.3, 0.3}, 100, 7);
  CHECK(near_flat.mean == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(near_flat.std_dev < 1e-12);

  BootstrapSummary a = bootstrap_eval({0.1, 0.5, 0.9}, 500, 42);
  BootstrapSummary b = bootstrap_eval({0.1, 0.5, 0.9}, 500, 42);
  CHECK(a.means == b.means);
  CHECK(a.q025 <= a.q975);

  // mean of a size-2 resample of {0, 1} has standard error 1/(2 sqrt(2))
  BootstrapSummary coin = bootstrap_eval({0.0, 1.0}, 10000, 11);
  CHECK(std::abs(coin.std_dev - 0.354) < 0.02);

  CHECK_THROWS_AS(bootstrap_eval({}, 10, 1), Error);
  CHECK_THROWS_AS(bootstrap_eval({0.5}, 0, 1), Error);
}

namespace {

std::vector<TimeSeriesTriple> driven_population(int members, int T,
                                                std::uint64_t seed) {
  // expertise drives confidence at lag 1; persuasiveness is noise
  std::vector<TimeSeriesTriple> triples;
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> eps(0.0, 0.05);
  for (int m = 0; m < members; ++m) {
    TimeSeriesTriple t;
    t.member_id = "m" + std::to_string(m);
    t.expertise = noise(gen, T);
    t.confidence.resize(T);
    t.confidence(0) = eps(gen);
    for (int i = 1; i < T; ++i) {
      t.confidence(i) = 0.9 * t.expertise(i - 1) + eps(gen);
    }
    t.persuasiveness = noise(gen, T);
    triples.push_back(std::move(t));
  }
  return triples;
}

}  // namespace

TEST_CASE("causal_summary surfaces the planted direction") {
  CausalSummary summary = causal_summary(driven_population(12, 30, 31), 0.05);
  CHECK(summary.total_tests == 12 * 12);
  CHECK(summary.skipped == 0);
  REQUIRE(!summary.lag1_ranking.empty());
  CHECK(summary.lag1_ranking[0] == "expertise->confidence");
  for (const CausalCell& cell : summary.cells) {
    if (cell.cause == "expertise" && cell.effect == "confidence" &&
        cell.lag == 1) {
      CHECK(cell.proportion > 0.9);
    }
    if (cell.cause == "persuasiveness" && cell.effect == "expertise" &&
        cell.lag == 1) {
      CHECK(cell.proportion < 0.3);
    }
  }
}

TEST_CASE("causal_summary skips degenerate members and empty input") {
  std::vector<TimeSeriesTriple> triples = driven_population(3, 30, 37);
  triples[1].confidence.setConstant(0.5);  // constant series cannot be tested
  CausalSummary summary = causal_summary(triples, 0.05);
  CHECK(summary.skipped > 0);
  CHECK(summary.total_tests < 3 * 12);

  CausalSummary empty = causal_summary({}, 0.05);
  CHECK(empty.total_tests == 0);
  CHECK(empty.cells.size() == 12);
  for (const CausalCell& cell : empty.cells) {
    CHECK(cell.tested == 0);
    CHECK(cell.proportion == 0.0);
  }
}

TEST_CASE("session_triples aligns series with reported rounds") {
  TeamSession session = testutil::drp_session("t", 5, {4, 3, 2, 1}, 0.4, 41);
  session.rounds[2].influence_report.reset();
  std::vector<TimeSeriesTriple> triples = session_triples(session);
  REQUIRE(triples.size() == 4);
  for (const auto& t : triples) {
    CHECK(t.expertise.size() == 4);  // 5 rounds, one unreported
    CHECK(t.confidence.size() == 4);
    CHECK(t.persuasiveness.size() == 4);
  }
  CHECK(triples[0].expertise(0) == doctest::Approx(0.8).epsilon(1e-15));
  const InfluenceMatrix& first = *session.rounds[0].influence_report;
  CHECK(triples[1].confidence(0) == first(1, 1));
  double lp = (first(0, 1) + first(2, 1) + first(3, 1)) / 3.0;
  CHECK(triples[1].persuasiveness(0) == doctest::Approx(lp).epsilon(1e-14));
}
