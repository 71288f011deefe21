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

#include "apri/baselines.hpp"

#include <cmath>
#include <map>

#include "apri/error.hpp"
#include "apri/inference.hpp"

namespace apri {
namespace {

struct Factor {
  Eigen::MatrixXd inverse;
  double log_det;
};

Factor factor(const Eigen::MatrixXd& m, const char* what) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible())
    throw Error(ErrorKind::kSingular, std::string(what) + " covariance is singular");
  const auto& u = lu.matrixLU();
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) log_det += std::log(std::fabs(u(i, i)));
  return {lu.inverse(), log_det};
}

Eigen::MatrixXd covariance(const Eigen::MatrixXd& rows, const Eigen::VectorXd& mean) {
  const Eigen::MatrixXd centered = rows.rowwise() - mean.transpose();
  return (centered.transpose() * centered) / static_cast<double>(rows.rows() - 1);
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

DiscriminantModel fit_discriminant(const Eigen::MatrixXd& features,
                                   std::span<const Population> labels,
                                   DiscriminantKind kind, double ridge) {
  if (static_cast<std::size_t>(features.rows()) != labels.size())
    throw Error(ErrorKind::kInvalidArgument, "feature rows and labels differ in length");
  if (features.cols() == 0)
    throw Error(ErrorKind::kInvalidArgument, "discriminant analysis needs at least one feature");
  std::vector<Eigen::Index> idx1, idx2;
  for (std::size_t i = 0; i < labels.size(); ++i)
    (labels[i] == Population::kFirst ? idx1 : idx2).push_back(static_cast<Eigen::Index>(i));
  if (idx1.size() < 2 || idx2.size() < 2)
    throw Error(ErrorKind::kData, "each population needs at least two samples");

  const Eigen::MatrixXd x1 = features(idx1, Eigen::all);
  const Eigen::MatrixXd x2 = features(idx2, Eigen::all);
  DiscriminantModel m;
  m.kind = kind;
  m.n1 = idx1.size();
  m.n2 = idx2.size();
  m.mean1 = x1.colwise().mean().transpose();
  m.mean2 = x2.colwise().mean().transpose();
  m.cov1 = covariance(x1, m.mean1);
  m.cov2 = covariance(x2, m.mean2);
  m.pooled = (static_cast<double>(m.n1 - 1) * m.cov1 +
              static_cast<double>(m.n2 - 1) * m.cov2) /
             static_cast<double>(m.n1 + m.n2 - 2);
  if (ridge > 0.0) {
    const auto eye = Eigen::MatrixXd::Identity(features.cols(), features.cols());
    m.cov1 += ridge * eye;
    m.cov2 += ridge * eye;
    m.pooled += ridge * eye;
  }
  m.cutoff = std::log(static_cast<double>(m.n2) / static_cast<double>(m.n1));

  if (kind == DiscriminantKind::kLinear) {
    m.pooled_inv = factor(m.pooled, "pooled").inverse;
  } else {
    auto f1 = factor(m.cov1, "first population");
    auto f2 = factor(m.cov2, "second population");
    m.cov1_inv = std::move(f1.inverse);
    m.cov2_inv = std::move(f2.inverse);
    m.log_det1 = f1.log_det;
    m.log_det2 = f2.log_det;
  }
  return m;
}

double lda_score(const DiscriminantModel& m, const Eigen::VectorXd& y) {
  if (m.kind != DiscriminantKind::kLinear)
    throw Error(ErrorKind::kInvalidArgument, "lda_score needs a linear model");
  if (static_cast<std::size_t>(y.size()) != m.dims())
    throw Error(ErrorKind::kInvalidArgument, "feature vector has the wrong dimension");
  const Eigen::VectorXd centered = y - 0.5 * (m.mean1 + m.mean2);
  return centered.dot(m.pooled_inv * (m.mean1 - m.mean2));
}

double qda_score(const DiscriminantModel& m, const Eigen::VectorXd& y) {
  if (m.kind != DiscriminantKind::kQuadratic)
    throw Error(ErrorKind::kInvalidArgument, "qda_score needs a quadratic model");
  if (static_cast<std::size_t>(y.size()) != m.dims())
    throw Error(ErrorKind::kInvalidArgument, "feature vector has the wrong dimension");
  const Eigen::VectorXd d1 = y - m.mean1;
  const Eigen::VectorXd d2 = y - m.mean2;
  return d2.dot(m.cov2_inv * d2) - d1.dot(m.cov1_inv * d1) + (m.log_det1 - m.log_det2);
}

Population discriminant_label(const DiscriminantModel& m, const Eigen::VectorXd& y) {
  if (m.kind == DiscriminantKind::kLinear)
    return lda_score(m, y) < m.cutoff ? Population::kSecond : Population::kFirst;
  return qda_score(m, y) > 2.0 * m.cutoff ? Population::kFirst : Population::kSecond;
}

double second_population_probability(const DiscriminantModel& m,
                                     const Eigen::VectorXd& y) {
  if (m.kind == DiscriminantKind::kLinear) return logistic(m.cutoff - lda_score(m, y));
  return logistic((2.0 * m.cutoff - qda_score(m, y)) / 2.0);
}

BaselineSummary run_baseline(const Schema& schema, Dataset& training,
                             Dataset& scoring, DiscriminantKind kind,
                             double ridge, std::ostream& out) {
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < schema.field_vars.size(); ++i)
    if (schema.field_vars[i].continuous()) cols.push_back(i);
  if (cols.empty())
    throw Error(ErrorKind::kInvalidArgument, "schema declares no continuous variables");
  const auto d = static_cast<Eigen::Index>(cols.size());

  BaselineSummary summary;
  std::vector<double> values;
  std::vector<std::string> labels;
  std::map<std::string, std::uint64_t, std::less<>> class_counts;
  iterate_pass(training, [&](const RecordView& r) {
    if (r.class_missing()) return;
    for (auto c : cols)
      if (r.missing(c)) {
        ++summary.dropped;
        return;
      }
    for (auto c : cols) values.push_back(r.numeric[c]);
    labels.emplace_back(r.class_value);
    ++class_counts[labels.back()];
  });
  if (class_counts.size() != 2)
    throw Error(ErrorKind::kData, "discriminant baselines need exactly two classes, found " +
                                      std::to_string(class_counts.size()));
  std::vector<std::string> classes;
  for (const auto& [name, n] : class_counts) classes.push_back(name);
  std::size_t pos = class_counts.at(classes[1]) <= class_counts.at(classes[0]) ? 1 : 0;
  if (schema.positive_class) {
    auto it = std::find(classes.begin(), classes.end(), *schema.positive_class);
    if (it == classes.end())
      throw Error(ErrorKind::kInvalidArgument,
                  "unknown positive class '" + *schema.positive_class + "'");
    pos = static_cast<std::size_t>(it - classes.begin());
  }
  summary.positive = classes[pos];

  const auto n = static_cast<Eigen::Index>(labels.size());
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      x(i, j) = values[static_cast<std::size_t>(i * d + j)];
  std::vector<Population> pops;
  pops.reserve(labels.size());
  for (const auto& l : labels)
    pops.push_back(l == summary.positive ? Population::kSecond : Population::kFirst);
  const auto model = fit_discriminant(x, pops, kind, ridge);
  summary.n1 = model.n1;
  summary.n2 = model.n2;
  const Eigen::VectorXd fill = x.colwise().mean().transpose();

  out << "record_id";
  for (const auto& c : classes) out << ',' << csv_escape("P(" + c + ")");
  out << ",label,skipped_nodes\n";
  Eigen::VectorXd y(d);
  std::string skipped;
  iterate_pass(scoring, [&](const RecordView& r) {
    skipped.clear();
    for (Eigen::Index j = 0; j < d; ++j) {
      const auto c = cols[static_cast<std::size_t>(j)];
      if (r.missing(c)) {
        y(j) = fill(j);
        if (!skipped.empty()) skipped.push_back(';');
        skipped += schema.field_vars[c].name + ":missing";
      } else {
        y(j) = r.numeric[c];
      }
    }
    const double p2 = second_population_probability(model, y);
    const bool positive = discriminant_label(model, y) == Population::kSecond;
    ++summary.records;
    if (positive) ++summary.positives;
    out << r.ordinal;
    for (std::size_t c = 0; c < classes.size(); ++c)
      out << ',' << format_double(c == pos ? p2 : 1.0 - p2);
    out << ',' << csv_escape(positive ? classes[pos] : classes[1 - pos]) << ','
        << csv_escape(skipped) << '\n';
  });
  return summary;
}

}  // namespace apri
