#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "influence/baselines.hpp"
#include "influence/metrics.hpp"
#include "influence/rng.hpp"

using namespace influence;

TEST_CASE("predict_constant and predict_first return their input") {
  InfluenceMatrix u = testutil::uniform4();
  CHECK(predict_constant(u).matrix() == u.matrix());
  CHECK(predict_first(testutil::identity4()).matrix() ==
        testutil::identity4().matrix());
  std::mt19937_64 gen(3);
  InfluenceMatrix M = testutil::random_stochastic(gen, 4);
  CHECK(mse(M, predict_constant(M)) == 0.0);
}

TEST_CASE("predict_uniform fills 1/n") {
  InfluenceMatrix m4 = predict_uniform(4);
  CHECK((m4.matrix().array() == 0.25).all());
  InfluenceMatrix m2 = predict_uniform(2);
  CHECK((m2.matrix().array() == 0.5).all());
  for (int n : {2, 3, 7}) {
    Eigen::VectorXd sums = predict_uniform(n).matrix().rowwise().sum();
    CHECK((sums.array() - 1.0).abs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("predict_random is deterministic in its seed") {
  InfluenceMatrix a = predict_random(4, 99);
  InfluenceMatrix b = predict_random(4, 99);
  CHECK(a.matrix() == b.matrix());
  InfluenceMatrix c = predict_random(4, 100);
  CHECK(a.matrix() != c.matrix());
  CHECK(a.matrix().minCoeff() >= 0.0);
  CHECK((a.matrix().rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("predict_random entries average 1/n over many draws") {
  double total = 0.0;
  const int draws = 10000;
  for (int s = 0; s < draws; ++s) {
    total += predict_random(4, 1000 + s).matrix().mean();
  }
  CHECK(std::abs(total / draws - 0.25) < 0.01);
}

TEST_CASE("predict_average takes the entrywise mean") {
  std::mt19937_64 gen(5);
  InfluenceMatrix M = testutil::random_stochastic(gen, 4);
  CHECK(predict_average({M}).matrix() == M.matrix());

  InfluenceMatrix avg = predict_average({testutil::uniform4(), testutil::identity4()});
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      CHECK(avg(i, j) == doctest::Approx(i == j ? 0.625 : 0.125).epsilon(1e-15));
    }
  }

  try {
    predict_average({});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyHistory);
  }
}

TEST_CASE("predict_average ignores history order") {
  std::mt19937_64 gen(7);
  InfluenceMatrix a = testutil::random_stochastic(gen, 4);
  InfluenceMatrix b = testutil::random_stochastic(gen, 4);
  InfluenceMatrix c = testutil::random_stochastic(gen, 4);
  Eigen::MatrixXd fwd = predict_average({a, b, c}).matrix();
  Eigen::MatrixXd rev = predict_average({c, b, a}).matrix();
  CHECK((fwd - rev).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("step_reflected leaves uniform appraisals alone") {
  SimplexVector flat =
      SimplexVector::validated(Eigen::VectorXd::Constant(4, 0.25));
  std::mt19937_64 gen(11);
  InfluenceMatrix M = testutil::random_stochastic(gen, 4);
  InfluenceMatrix next = step_reflected(M, flat);
  CHECK((next.matrix() - M.matrix()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("step_reflected is inert when self-weights vanish") {
  InfluenceMatrix M = testutil::matrix_of({{0.0, 0.5, 0.25, 0.25},
                                   {0.5, 0.0, 0.25, 0.25},
                                   {0.25, 0.25, 0.0, 0.5},
                                   {0.25, 0.25, 0.5, 0.0}});
  Eigen::VectorXd y(4);
  y << 0.7, 0.1, 0.1, 0.1;
  InfluenceMatrix next = step_reflected(M, SimplexVector::validated(y));
  CHECK((next.matrix() - M.matrix()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("step_reflected hand example with all expertise on member 1") {
  Eigen::VectorXd y(4);
  y << 1, 0, 0, 0;
  InfluenceMatrix next =
      step_reflected(testutil::uniform4(), SimplexVector::validated(y));
  CHECK(next(0, 0) == doctest::Approx(0.390625).epsilon(1e-14));
  CHECK(next(0, 1) == doctest::Approx(0.203125).epsilon(1e-14));
  // rows 2-4 see a gap of -0.25: self-weight shrinks, the rest grows
  for (int i = 1; i < 4; ++i) {
    CHECK(next(i, i) == doctest::Approx(0.203125).epsilon(1e-14));
    for (int j = 0; j < 4; ++j) {
      if (j != i) CHECK(next(i, j) == doctest::Approx(0.265625).epsilon(1e-14));
    }
  }
}

TEST_CASE("step_reflected preserves row sums on random input") {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 50; ++trial) {
    InfluenceMatrix M = testutil::random_stochastic(gen, 4);
    SimplexVector y = SimplexVector::validated(dirichlet_flat(gen, 4));
    Eigen::VectorXd sums = step_reflected(M, y).matrix().rowwise().sum();
    CHECK((sums.array() - 1.0).abs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("step_sbt renormalizes the two-hop average") {
  InfluenceMatrix next = step_sbt(testutil::uniform4());
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      double expect = i == j ? 1.0 / 3.0 : 2.0 / 9.0;
      CHECK(next(i, j) == doctest::Approx(expect).epsilon(1e-14));
    }
  }
}

TEST_CASE("step_sbt_raw exposes the unnormalized averages") {
  Eigen::MatrixXd raw = step_sbt_raw(testutil::uniform4());
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      double expect = i == j ? 0.09375 : 0.0625;
      CHECK(raw(i, j) == doctest::Approx(expect).epsilon(1e-14));
    }
  }
}

TEST_CASE("step_sbt falls back to uniform when a row has no paths") {
  InfluenceMatrix next = step_sbt(testutil::identity4());
  CHECK((next.matrix().array() == 0.25).all());
}

TEST_CASE("step_sbt needs a third party") {
  Eigen::MatrixXd m(2, 2);
  m << 0.5, 0.5, 0.5, 0.5;
  try {
    step_sbt(validate_row_stochastic(m));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TeamTooSmall);
  }
}

TEST_CASE("all baselines emit valid matrices on random input") {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 30; ++trial) {
    InfluenceMatrix M = testutil::random_stochastic(gen, 4);
    SimplexVector y = SimplexVector::validated(dirichlet_flat(gen, 4));
    for (const InfluenceMatrix& out :
         {predict_constant(M), predict_uniform(4), predict_random(4, trial),
          predict_first(M), predict_average({M, M}), step_reflected(M, y),
          step_sbt(M)}) {
      CHECK(out.matrix().minCoeff() >= 0.0);
      CHECK((out.matrix().rowwise().sum().array() - 1.0).abs().maxCoeff() <=
            1e-12);
    }
  }
}

TEST_CASE("baseline kinds have names") {
  CHECK(std::string(to_string(BaselineKind::SBT)) == "sbt");
  CHECK(std::string(to_string(BaselineKind::Reflected)) == "reflected");
}
