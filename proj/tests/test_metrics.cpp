#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "influence/metrics.hpp"
#include "influence/rng.hpp"

using namespace influence;

TEST_CASE("mse identities") {
  std::mt19937_64 gen(3);
  InfluenceMatrix M = testutil::random_stochastic(gen, 4);
  CHECK(mse(M, M) == 0.0);
  CHECK(mse(testutil::uniform4(), testutil::identity4()) == 0.75);
  InfluenceMatrix A = testutil::random_stochastic(gen, 4);
  CHECK(mse(M, A) == mse(A, M));
  CHECK(mse(M, A) >= 0.0);
}

TEST_CASE("mse and kl reject mismatched sizes") {
  Eigen::MatrixXd m3 = Eigen::MatrixXd::Constant(3, 3, 1.0 / 3.0);
  InfluenceMatrix M3 = validate_row_stochastic(m3);
  try {
    mse(testutil::uniform4(), M3);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }
  try {
    kl(testutil::uniform4(), M3);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }
}

TEST_CASE("kl identities") {
  std::mt19937_64 gen(5);
  InfluenceMatrix M = testutil::random_stochastic(gen, 4);
  CHECK(kl(M, M) == 0.0);
  CHECK(kl(testutil::identity4(), testutil::uniform4()) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-12));
  double clamped = kl(testutil::uniform4(), testutil::identity4());
  CHECK(std::isfinite(clamped));
  CHECK(clamped > 1.0);  // log(0.25/1e-9) terms dominate
}

TEST_CASE("kl is nonnegative on random pairs") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 100; ++trial) {
    InfluenceMatrix M = testutil::random_stochastic(gen, 4);
    InfluenceMatrix A = testutil::random_stochastic(gen, 4);
    CHECK(kl(M, A) >= 0.0);
  }
}

TEST_CASE("confidence reads the diagonal") {
  Eigen::VectorXd cu = confidence(testutil::uniform4());
  CHECK((cu.array() == 0.25).all());
  Eigen::VectorXd ci = confidence(testutil::identity4());
  CHECK((ci.array() == 1.0).all());
  InfluenceMatrix M = testutil::matrix_of({{0.4, 0.3, 0.2, 0.1},
                                   {0.1, 0.6, 0.2, 0.1},
                                   {0.25, 0.25, 0.25, 0.25},
                                   {0.2, 0.2, 0.2, 0.4}});
  Eigen::VectorXd c = confidence(M);
  CHECK(c(1) == 0.6);
  CHECK(c(2) == 0.25);
}

TEST_CASE("local_persuasiveness averages the off-diagonal column") {
  CHECK((local_persuasiveness(testutil::uniform4()).array() == 0.25).all());
  CHECK((local_persuasiveness(testutil::identity4()).array() == 0.0).all());
  InfluenceMatrix M = testutil::matrix_of({{0.25, 0.25, 0.25, 0.25},
                                   {0.5, 0.3, 0.1, 0.1},
                                   {0.5, 0.1, 0.3, 0.1},
                                   {0.5, 0.1, 0.1, 0.3}});
  CHECK(local_persuasiveness(M)(0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("local_persuasiveness totals track the trace") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    InfluenceMatrix M = testutil::random_stochastic(gen, 4);
    double total = local_persuasiveness(M).sum();
    double expect = (4.0 - M.matrix().trace()) / 3.0;
    CHECK(total == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("relative_appraisal zeroes the diagonal and rescales") {
  InfluenceMatrix C = relative_appraisal(testutil::uniform4());
  for (int i = 0; i < 4; ++i) {
    CHECK(C(i, i) == 0.0);
    for (int j = 0; j < 4; ++j) {
      if (j != i) CHECK(C(i, j) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    }
  }

  InfluenceMatrix M = testutil::matrix_of({{0.4, 0.3, 0.2, 0.1},
                                   {0.25, 0.25, 0.25, 0.25},
                                   {0.25, 0.25, 0.25, 0.25},
                                   {0.25, 0.25, 0.25, 0.25}});
  InfluenceMatrix C2 = relative_appraisal(M);
  CHECK(C2(0, 0) == 0.0);
  CHECK(C2(0, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(C2(0, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(C2(0, 3) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

  try {
    relative_appraisal(testutil::identity4());
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IsolatedRater);
  }
}

TEST_CASE("global_persuasiveness is the stationary view of appraisals") {
  SimplexVector flat = global_persuasiveness(testutil::uniform4());
  for (int i = 0; i < 4; ++i) CHECK(flat(i) == doctest::Approx(0.25).epsilon(1e-9));

  // after removing the diagonal, rows 2-4 point at member 1 only
  InfluenceMatrix M = testutil::matrix_of({{0.1, 0.3, 0.3, 0.3},
                                   {0.5, 0.5, 0.0, 0.0},
                                   {0.5, 0.0, 0.5, 0.0},
                                   {0.5, 0.0, 0.0, 0.5}});
  SimplexVector pi = global_persuasiveness(M);
  CHECK(pi(0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(pi(1) == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
  CHECK(pi(2) == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
  CHECK(pi(3) == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
}

TEST_CASE("symmetric appraisals rank local and global the same way") {
  // fully symmetric relative appraisals make both views uniform
  InfluenceMatrix M = testutil::uniform4();
  Eigen::VectorXd local = local_persuasiveness(M);
  SimplexVector global = global_persuasiveness(M);
  for (int i = 0; i < 4; ++i) {
    CHECK(local(i) == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(global(i) == doctest::Approx(0.25).epsilon(1e-9));
  }
}

TEST_CASE("mean_reversion measures distance from uniform rows") {
  CHECK((mean_reversion(testutil::uniform4()).array() == 0.0).all());
  Eigen::VectorXd d = mean_reversion(testutil::identity4());
  for (int i = 0; i < 4; ++i) CHECK(d(i) == 0.75);
  std::mt19937_64 gen(13);
  InfluenceMatrix M = testutil::random_stochastic(gen, 4);
  Eigen::VectorXd dm = mean_reversion(M);
  for (int i = 0; i < 4; ++i) {
    double expect = (M.matrix().row(i).array() - 0.25).square().sum();
    CHECK(dm(i) == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("expertise_series accumulates correct answers across rounds") {
  TeamSession session;
  session.team_id = "t";
  session.member_ids = {"a", "b"};
  RoundRecord r1;
  {
    QuestionRecord q1{{true, true}, {true, false}};
    QuestionRecord q2{{true, false}, {false, false}};
    r1.questions = {q1, q2};
  }
  RoundRecord r2;
  {
    QuestionRecord q3{{true, true}, {true, true}};
    QuestionRecord q4{{true, true}, {true, false}};
    QuestionRecord q5{{true, true}, {true, true}};
    r2.questions = {q3, q4, q5};
  }
  session.rounds = {r1, r2};
  std::vector<ExpertiseVector> series = expertise_series(session);
  REQUIRE(series.size() == 2);
  // member a: (1,0) after round 1, then (1,1,1): 4 of 5
  CHECK(series[0](0) == 0.5);
  CHECK(series[1](0) == doctest::Approx(0.8).epsilon(1e-15));
  // member b: 1 wrong answer in round 1, then 2 right of 3 more
  CHECK(series[0](1) == 0.0);
  CHECK(series[1](1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("unanswered members carry zero expertise") {
  TeamSession session;
  session.team_id = "t";
  session.member_ids = {"a", "b"};
  RoundRecord r;
  QuestionRecord q{{true, false}, {true, false}};
  r.questions = {q};
  session.rounds = {r};
  std::vector<ExpertiseVector> series = expertise_series(session);
  CHECK(series[0](0) == 1.0);
  CHECK(series[0](1) == 0.0);
}

TEST_CASE("metric report aggregates and serializes") {
  MetricReport report;
  report.add("t1", 2, "mse", 0.1);
  report.add("t1", 3, "mse", 0.3);
  report.add("t2", 2, "mse", 0.2);
  report.add("t1", 2, "kl", 1.0);
  CHECK(report.mean("mse") == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(report.median("mse") == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(report.quantile("mse", 0.0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(report.quantile("mse", 1.0) == doctest::Approx(0.3).epsilon(1e-15));

  std::ostringstream csv;
  report.write_csv(csv);
  CHECK(csv.str().find("team,round,metric,value") != std::string::npos);
  CHECK(csv.str().find("t2,2,mse,") != std::string::npos);
  CHECK(report.to_json().find("\"metric\"") != std::string::npos);
}
