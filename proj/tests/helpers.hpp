#pragma once

#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "influence/core.hpp"
#include "influence/dynamics.hpp"
#include "influence/rng.hpp"

namespace testutil {

inline influence::InfluenceMatrix matrix_of(
    const std::vector<std::vector<double>>& rows) {
  const int n = static_cast<int>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return influence::validate_row_stochastic(m);
}

inline influence::InfluenceMatrix uniform4() {
  return matrix_of({{0.25, 0.25, 0.25, 0.25},
                    {0.25, 0.25, 0.25, 0.25},
                    {0.25, 0.25, 0.25, 0.25},
                    {0.25, 0.25, 0.25, 0.25}});
}

inline influence::InfluenceMatrix identity4() {
  return matrix_of({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}});
}

/// Random row-stochastic matrix with Dirichlet rows (strictly positive a.s.).
inline influence::InfluenceMatrix random_stochastic(std::mt19937_64& gen,
                                                    int n) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    m.row(i) = influence::dirichlet_flat(gen, n).transpose();
  }
  return influence::validate_row_stochastic(m);
}

/// Stationary row vector of P by a dense solve: pi (P - I) = 0, sum pi = 1,
/// assembled as an overdetermined least-squares system. Independent of the
/// power-iteration path.
inline Eigen::VectorXd stationary_solve(const Eigen::MatrixXd& P) {
  const int n = static_cast<int>(P.rows());
  Eigen::MatrixXd A(n + 1, n);
  A.topRows(n) = (P - Eigen::MatrixXd::Identity(n, n)).transpose();
  A.bottomRows(1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
  b(n) = 1.0;
  return A.colPivHouseholderQr().solve(b);
}

/// Session whose reports follow the given step rule from a seeded start and
/// whose questions pin every member's cumulative expertise to correct/5 per
/// round (5 questions each round, the same number correct every round).
template <typename Step>
influence::TeamSession synthetic_session(const std::string& team_id,
                                         int rounds,
                                         const std::vector<int>& correct_of_5,
                                         std::uint64_t seed, Step step) {
  const int n = static_cast<int>(correct_of_5.size());
  influence::TeamSession session;
  session.team_id = team_id;
  for (int i = 0; i < n; ++i) {
    session.member_ids.push_back("m" + std::to_string(i));
  }
  std::mt19937_64 gen(seed);
  influence::InfluenceMatrix current = random_stochastic(gen, n);
  for (int t = 0; t < rounds; ++t) {
    influence::RoundRecord rec;
    for (int q = 0; q < 5; ++q) {
      influence::QuestionRecord question;
      question.answered.assign(n, true);
      question.correct.resize(n);
      for (int i = 0; i < n; ++i) question.correct[i] = q < correct_of_5[i];
      rec.questions.push_back(std::move(question));
    }
    rec.influence_report = current;
    session.rounds.push_back(std::move(rec));
    if (t + 1 < rounds) current = step(current, t);
  }
  return session;
}

/// Reports follow the DRP recursion; expertise is constant by construction.
inline influence::TeamSession drp_session(const std::string& team_id,
                                          int rounds,
                                          const std::vector<int>& correct_of_5,
                                          double tau, std::uint64_t seed) {
  const int n = static_cast<int>(correct_of_5.size());
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = correct_of_5[i] / 5.0;
  return synthetic_session(
      team_id, rounds, correct_of_5, seed,
      [&y, tau](const influence::InfluenceMatrix& M, int) {
        return influence::step_drp(M, y, tau);
      });
}

/// Every round reports the same matrix.
inline influence::TeamSession constant_session(
    const std::string& team_id, int rounds,
    const std::vector<int>& correct_of_5, std::uint64_t seed) {
  return synthetic_session(team_id, rounds, correct_of_5, seed,
                           [](const influence::InfluenceMatrix& M, int) {
                             return M;
                           });
}

}  // namespace testutil
