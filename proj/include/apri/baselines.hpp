// Copyright 2026 The APRI Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "apri/schema_io.hpp"

namespace apri {

enum class DiscriminantKind { kLinear, kQuadratic };

/// Population membership for discriminant analysis. For rare-event data the
/// positive (bad) class is the second population.
enum class Population : std::uint8_t { kFirst, kSecond };

struct DiscriminantModel {
  DiscriminantKind kind = DiscriminantKind::kLinear;
  Eigen::VectorXd mean1, mean2;
  Eigen::MatrixXd pooled;      // linear
  Eigen::MatrixXd cov1, cov2;  // quadratic
  std::size_t n1 = 0, n2 = 0;
  double cutoff = 0.0;         // log(n2 / n1)

  // Cached factors.
  Eigen::MatrixXd pooled_inv, cov1_inv, cov2_inv;
  double log_det1 = 0.0, log_det2 = 0.0;

  std::size_t dims() const { return static_cast<std::size_t>(mean1.size()); }
};

/// Sample means, covariances with denominator n-1, pooled covariance weighted
/// by n_k - 1. Throws Error(kSingular) on a singular covariance unless a
/// positive ridge is added to the diagonal.
DiscriminantModel fit_discriminant(const Eigen::MatrixXd& features,
                                   std::span<const Population> labels,
                                   DiscriminantKind kind, double ridge = 0.0);

/// L(Y) = (Y - (m1 + m2)/2)' S^-1 (m1 - m2).
double lda_score(const DiscriminantModel& model, const Eigen::VectorXd& y);

/// (Y - m2)' S2^-1 (Y - m2) - (Y - m1)' S1^-1 (Y - m1) + log(|S1| / |S2|).
double qda_score(const DiscriminantModel& model, const Eigen::VectorXd& y);

/// Linear: second population iff L(Y) < cutoff. Quadratic: first population
/// iff score > 2 * cutoff.
Population discriminant_label(const DiscriminantModel& model,
                              const Eigen::VectorXd& y);

/// Logistic transform of the decision margin; 0.5 exactly on the boundary.
double second_population_probability(const DiscriminantModel& model,
                                     const Eigen::VectorXd& y);

struct BaselineSummary {
  std::size_t n1 = 0, n2 = 0;
  std::uint64_t dropped = 0;   // training rows with a MISSING feature
  std::uint64_t records = 0;   // scored rows
  std::uint64_t positives = 0;
  std::string positive;
};

/// Fits on the continuous schema variables of the training data and writes
/// the classification CSV for the scoring data. The class column must have
/// exactly two values; MISSING features at scoring time are imputed with the
/// training mean and logged as skipped.
BaselineSummary run_baseline(const Schema& schema, Dataset& training,
                             Dataset& scoring, DiscriminantKind kind,
                             double ridge, std::ostream& out);

}  // namespace apri
