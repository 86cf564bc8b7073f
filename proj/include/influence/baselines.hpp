#pragma once

#include <cstdint>
#include <vector>

#include "influence/core.hpp"

namespace influence {

enum class BaselineKind { Random, First, SBT, Uniform, Average, Reflected, Constant };

const char* to_string(BaselineKind kind);

/// The previous matrix, unchanged.
InfluenceMatrix predict_constant(const InfluenceMatrix& m_prev);

/// All entries 1/n.
InfluenceMatrix predict_uniform(int n);

/// Rows drawn independently from the flat Dirichlet; deterministic in seed.
InfluenceMatrix predict_random(int n, std::uint64_t seed);

/// The team's first reported matrix, unchanged.
InfluenceMatrix predict_first(const InfluenceMatrix& m_first);

/// Entrywise mean of the history. Throws Error{EmptyHistory}.
InfluenceMatrix predict_average(const std::vector<InfluenceMatrix>& history);

/// Reflected appraisal step: self-weight moves by
/// M_ii (1 - M_ii) (ybar_i - sum_k M_ik ybar_k) and the row's interpersonal
/// weights absorb the difference, keeping the row stochastic.
InfluenceMatrix step_reflected(const InfluenceMatrix& M,
                               const SimplexVector& y_bar);

/// Generalized structural balance step: raw_ij averages the two-hop
/// products M_ik M_kj over third parties k, then each row is renormalized
/// to sum 1 (uniform fallback for all-zero rows).
/// Throws Error{TeamTooSmall} for n < 3.
InfluenceMatrix step_sbt(const InfluenceMatrix& M);

/// The un-renormalized structural balance matrix, for evaluating the raw
/// (sub-stochastic) variant against ground truth.
Eigen::MatrixXd step_sbt_raw(const InfluenceMatrix& M);

}  // namespace influence
