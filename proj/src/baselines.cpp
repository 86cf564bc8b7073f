#include "influence/baselines.hpp"

#include "influence/rng.hpp"

namespace influence {

const char* to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::Random: return "random";
    case BaselineKind::First: return "first";
    case BaselineKind::SBT: return "sbt";
    case BaselineKind::Uniform: return "uniform";
    case BaselineKind::Average: return "average";
    case BaselineKind::Reflected: return "reflected";
    case BaselineKind::Constant: return "constant";
  }
  return "?";
}

InfluenceMatrix predict_constant(const InfluenceMatrix& m_prev) {
  return m_prev;
}

InfluenceMatrix predict_uniform(int n) {
  if (n < 2) {
    throw Error(ErrorKind::TeamTooSmall, "uniform baseline needs n >= 2");
  }
  return validate_row_stochastic(
      Eigen::MatrixXd::Constant(n, n, 1.0 / n));
}

InfluenceMatrix predict_random(int n, std::uint64_t seed) {
  if (n < 2) {
    throw Error(ErrorKind::TeamTooSmall, "random baseline needs n >= 2");
  }
  std::mt19937_64 gen(seed);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) m.row(i) = dirichlet_flat(gen, n).transpose();
  return validate_row_stochastic(m);
}

InfluenceMatrix predict_first(const InfluenceMatrix& m_first) {
  return m_first;
}

InfluenceMatrix predict_average(const std::vector<InfluenceMatrix>& history) {
  if (history.empty()) {
    throw Error(ErrorKind::EmptyHistory, "average baseline needs history");
  }
  const int n = history.front().size();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
  for (const auto& m : history) {
    if (m.size() != n) {
      throw Error(ErrorKind::DimensionMismatch,
                  "history matrices have mixed sizes");
    }
    sum += m.matrix();
  }
  return InfluenceMatrix::from_update(sum / double(history.size()));
}

InfluenceMatrix step_reflected(const InfluenceMatrix& M,
                               const SimplexVector& y_bar) {
  if (M.size() != y_bar.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "matrix and expertise sizes differ");
  }
  const int n = M.size();
  Eigen::MatrixXd next(n, n);
  for (int i = 0; i < n; ++i) {
    // Gap between own expertise and the appraisal-weighted team view.
    double gap = y_bar(i) - M.matrix().row(i).dot(y_bar.values());
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        next(i, j) = M(i, i) + M(i, i) * (1.0 - M(i, i)) * gap;
      } else {
        next(i, j) = M(i, j) - M(i, i) * M(i, j) * gap;
      }
    }
  }
  return InfluenceMatrix::from_update(std::move(next));
}

Eigen::MatrixXd step_sbt_raw(const InfluenceMatrix& M) {
  const int n = M.size();
  if (n < 3) {
    throw Error(ErrorKind::TeamTooSmall,
                "structural balance needs n >= 3, got " + std::to_string(n));
  }
  Eigen::MatrixXd raw(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        acc += M(i, k) * M(k, j);
      }
      raw(i, j) = acc / double(n - 2);
    }
  }
  return raw;
}

InfluenceMatrix step_sbt(const InfluenceMatrix& M) {
  const int n = M.size();
  Eigen::MatrixXd raw = step_sbt_raw(M);
  for (int i = 0; i < n; ++i) {
    double s = raw.row(i).sum();
    if (s > 0.0) {
      raw.row(i) /= s;
    } else {
      raw.row(i).setConstant(1.0 / n);
    }
  }
  return validate_row_stochastic(raw);
}

}  // namespace influence
