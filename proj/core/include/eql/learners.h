// Copyright 2026 The Eqlboard Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EQL_LEARNERS_H_
#define EQL_LEARNERS_H_

// Small dense classifiers used to probe how easily a sample is solved:
// L2-regularized logistic regression (full-batch gradient descent), linear
// SVM (subgradient descent on the hinge loss), RBF-kernel SVM (simplified
// SMO on the dual) and Gaussian naive Bayes. Logistic regression and both
// SVMs standardize features with training-fold statistics stored in the
// fitted model. More than two classes are handled one-vs-rest.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eql/types.h"

namespace eql {

enum class LearnerKind { kLogReg, kSvmLinear, kSvmRbf, kGaussianNB };

std::string_view LearnerName(LearnerKind kind);
LearnerKind ParseLearnerKind(std::string_view name);

// Hyper-parameters by name. Missing keys take the documented defaults:
//   logreg:     learning_rate=0.1, epochs=500, l2=1e-4
//   svm_linear: learning_rate=0.05, epochs=500, C=1
//   svm_rbf:    C=1, gamma=1/dim, tol=1e-3, max_passes=50
//   gnb:        var_smoothing=1e-9 (times the largest feature variance)
struct LearnerSpec {
  LearnerKind kind = LearnerKind::kLogReg;
  std::map<std::string, double> hyper;
  std::uint64_t seed = 0;

  // Throws ConfigError for keys foreign to `kind` or out-of-range values.
  void Validate() const;
  double Get(std::string_view key, double fallback) const;
};

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  static DenseMatrix FromRows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }
  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Per-feature affine map x -> (x - mean) / scale.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer Fit(const DenseMatrix& x);
  static Standardizer Identity(std::size_t dim);
  std::vector<double> Apply(std::span<const double> x) const;
  bool operator==(const Standardizer&) const = default;
};

// One binary scorer: positive decision value votes for the positive class.
struct BinaryScorer {
  // Linear kinds.
  std::vector<double> weights;
  // RBF kind: retained (standardized) vectors and their alpha_i * y_i.
  std::vector<std::vector<double>> support;
  std::vector<double> coef;
  double gamma = 0.0;
  double bias = 0.0;

  bool operator==(const BinaryScorer&) const = default;
};

struct GaussianParams {
  std::vector<std::vector<double>> means;  // per class
  std::vector<std::vector<double>> vars;   // per class, smoothed
  std::vector<double> log_priors;

  bool operator==(const GaussianParams&) const = default;
};

// Diagnostics of one SMO run.
struct SmoTrace {
  std::vector<double> dual_objective;  // after each accepted pair update
  std::vector<double> alpha;           // final multipliers
  double bias = 0.0;
  double c = 0.0;
  double tol = 0.0;
  int passes = 0;
  bool converged = false;
};

class FittedModel {
 public:
  // Hand-built binary linear model over labels {0, 1} with no feature
  // standardization.
  static FittedModel Linear(LearnerKind kind, std::vector<double> weights,
                            double bias);

  LearnerKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  const std::vector<LabelId>& classes() const { return classes_; }
  const std::vector<BinaryScorer>& scorers() const { return scorers_; }

  // Throws DimMismatch.
  LabelId Predict(std::span<const double> x) const;
  // Raw margin (SVMs), log-odds (logreg) or log-posterior gap (GNB) of the
  // larger label over the smaller. Binary models only.
  double DecisionValue(std::span<const double> x) const;
  // One score per class (one-vs-rest margins or log-posteriors).
  std::vector<double> ClassScores(std::span<const double> x) const;

  bool operator==(const FittedModel&) const = default;

 private:
  friend FittedModel Fit(const LearnerSpec&, const DenseMatrix&,
                         std::span<const LabelId>, SmoTrace*);

  double Score(const BinaryScorer& s, std::span<const double> z) const;
  double GaussianLogPosterior(std::size_t c, std::span<const double> x) const;
  void CheckDim(std::span<const double> x) const;

  LearnerKind kind_ = LearnerKind::kLogReg;
  std::size_t dim_ = 0;
  std::vector<LabelId> classes_;
  Standardizer standardizer_;
  std::vector<BinaryScorer> scorers_;  // 1 when binary, one per class else
  GaussianParams gaussian_;
};

// Throws DegenerateLabels (one class), NonFiniteInput, ConfigError.
FittedModel Fit(const LearnerSpec& spec, const DenseMatrix& x,
                std::span<const LabelId> y, SmoTrace* trace = nullptr);

// Mean log-loss over targets in {0,1} plus (l2/2)|w|^2, and its gradient.
double LogisticObjective(const DenseMatrix& x, std::span<const double> target,
                         std::span<const double> weights, double bias,
                         double l2);
void LogisticGradient(const DenseMatrix& x, std::span<const double> target,
                      std::span<const double> weights, double bias, double l2,
                      std::span<double> grad_weights, double& grad_bias);

double RbfKernel(std::span<const double> a, std::span<const double> b,
                 double gamma);

// sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij, signs in {-1,+1}.
double SvmDualObjective(std::span<const double> alpha,
                        std::span<const double> sign, const DenseMatrix& gram);

}  // namespace eql

#endif  // EQL_LEARNERS_H_
