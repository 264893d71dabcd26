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

#include "eql/learners.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "eql/error.h"
#include "eql/random.h"

namespace eql {
namespace {

constexpr double kScaleFloor = 1e-12;
constexpr double kAlphaStep = 1e-8;
constexpr int kMaxSmoSweeps = 20000;

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

const std::set<std::string>& AllowedKeys(LearnerKind kind) {
  static const std::set<std::string> kLogReg = {"learning_rate", "epochs",
                                                "l2"};
  static const std::set<std::string> kSvmLinear = {"learning_rate", "epochs",
                                                   "C"};
  static const std::set<std::string> kSvmRbf = {"C", "gamma", "tol",
                                                "max_passes"};
  static const std::set<std::string> kGnb = {"var_smoothing"};
  switch (kind) {
    case LearnerKind::kLogReg: return kLogReg;
    case LearnerKind::kSvmLinear: return kSvmLinear;
    case LearnerKind::kSvmRbf: return kSvmRbf;
    case LearnerKind::kGaussianNB: return kGnb;
  }
  return kGnb;
}

DenseMatrix StandardizeAll(const DenseMatrix& x, const Standardizer& st) {
  DenseMatrix z(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::vector<double> r = st.Apply(x.row(i));
    std::copy(r.begin(), r.end(), z.row(i).begin());
  }
  return z;
}

BinaryScorer FitLogReg(const LearnerSpec& spec, const DenseMatrix& z,
                       std::span<const double> target) {
  const double lr = spec.Get("learning_rate", 0.1);
  const int epochs = static_cast<int>(spec.Get("epochs", 500));
  const double l2 = spec.Get("l2", 1e-4);
  BinaryScorer s;
  s.weights.assign(z.cols(), 0.0);
  std::vector<double> gw(z.cols());
  double gb = 0.0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    LogisticGradient(z, target, s.weights, s.bias, l2, gw, gb);
    for (std::size_t k = 0; k < gw.size(); ++k) s.weights[k] -= lr * gw[k];
    s.bias -= lr * gb;
  }
  return s;
}

// Subgradient descent on 1/2 |w|^2 + C * sum_i max(0, 1 - y_i (w.x_i + b)),
// divided through by C * n so the step size does not grow with n.
BinaryScorer FitLinearSvm(const LearnerSpec& spec, const DenseMatrix& z,
                          std::span<const double> sign) {
  const double lr = spec.Get("learning_rate", 0.05);
  const int epochs = static_cast<int>(spec.Get("epochs", 500));
  const double c = spec.Get("C", 1.0);
  const double n = static_cast<double>(z.rows());
  BinaryScorer s;
  s.weights.assign(z.cols(), 0.0);
  std::vector<double> gw(z.cols());
  for (int epoch = 0; epoch < epochs; ++epoch) {
    for (std::size_t k = 0; k < gw.size(); ++k) gw[k] = s.weights[k] / (c * n);
    double gb = 0.0;
    for (std::size_t i = 0; i < z.rows(); ++i) {
      const auto xi = z.row(i);
      if (sign[i] * (Dot(s.weights, xi) + s.bias) < 1.0) {
        for (std::size_t k = 0; k < gw.size(); ++k) gw[k] -= sign[i] * xi[k] / n;
        gb -= sign[i] / n;
      }
    }
    for (std::size_t k = 0; k < gw.size(); ++k) s.weights[k] -= lr * gw[k];
    s.bias -= lr * gb;
  }
  return s;
}

// Simplified SMO: sweep all multipliers, pair each KKT violator with a
// seeded random partner, stop after max_passes consecutive sweeps without
// an update.
BinaryScorer FitRbfSvm(const LearnerSpec& spec, const DenseMatrix& z,
                       std::span<const double> sign, SmoTrace* trace) {
  const std::size_t n = z.rows();
  const double c = spec.Get("C", 1.0);
  const double gamma = spec.Get("gamma", 1.0 / static_cast<double>(z.cols()));
  const double tol = spec.Get("tol", 1e-3);
  const int max_passes = static_cast<int>(spec.Get("max_passes", 50));

  DenseMatrix gram(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      gram(i, j) = gram(j, i) = RbfKernel(z.row(i), z.row(j), gamma);
    }
  }

  std::vector<double> alpha(n, 0.0);
  // margin[i] = sum_k alpha_k y_k K_ik, kept current across updates.
  std::vector<double> margin(n, 0.0);
  double b = 0.0;
  Rng rng(spec.seed);
  if (trace) {
    trace->dual_objective.clear();
    trace->c = c;
    trace->tol = tol;
  }

  int passes = 0;
  int sweeps = 0;
  while (passes < max_passes && sweeps < kMaxSmoSweeps) {
    ++sweeps;
    int changed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ei = margin[i] + b - sign[i];
      const bool violates = (sign[i] * ei < -tol && alpha[i] < c) ||
                            (sign[i] * ei > tol && alpha[i] > 0);
      if (!violates) continue;
      std::size_t j = static_cast<std::size_t>(UniformBelow(rng, n - 1));
      if (j >= i) ++j;
      const double ej = margin[j] + b - sign[j];
      const double ai_old = alpha[i];
      const double aj_old = alpha[j];
      double lo, hi;
      if (sign[i] != sign[j]) {
        lo = std::max(0.0, aj_old - ai_old);
        hi = std::min(c, c + aj_old - ai_old);
      } else {
        lo = std::max(0.0, ai_old + aj_old - c);
        hi = std::min(c, ai_old + aj_old);
      }
      if (lo >= hi) continue;
      const double eta = 2.0 * gram(i, j) - gram(i, i) - gram(j, j);
      if (eta >= 0.0) continue;
      double aj = std::clamp(aj_old - sign[j] * (ei - ej) / eta, lo, hi);
      if (std::abs(aj - aj_old) < kAlphaStep) continue;
      double ai = std::clamp(ai_old + sign[i] * sign[j] * (aj_old - aj), 0.0, c);
      // Rounding leaves multipliers a few ulps off their bounds.
      const double snap = 1e-12 * c;
      for (double* a : {&ai, &aj}) {
        if (*a < snap) *a = 0.0;
        if (*a > c - snap) *a = c;
      }
      alpha[i] = ai;
      alpha[j] = aj;
      const double di = sign[i] * (ai - ai_old);
      const double dj = sign[j] * (aj - aj_old);
      const double b1 = b - ei - di * gram(i, i) - dj * gram(i, j);
      const double b2 = b - ej - di * gram(i, j) - dj * gram(j, j);
      if (ai > 0 && ai < c) {
        b = b1;
      } else if (aj > 0 && aj < c) {
        b = b2;
      } else {
        b = 0.5 * (b1 + b2);
      }
      for (std::size_t k = 0; k < n; ++k) {
        margin[k] += di * gram(i, k) + dj * gram(j, k);
      }
      ++changed;
      if (trace) trace->dual_objective.push_back(SvmDualObjective(alpha, sign, gram));
    }
    passes = changed == 0 ? passes + 1 : 0;
  }

  BinaryScorer s;
  s.gamma = gamma;
  s.bias = b;
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] > 0.0) {
      auto r = z.row(i);
      s.support.emplace_back(r.begin(), r.end());
      s.coef.push_back(alpha[i] * sign[i]);
    }
  }
  if (trace) {
    trace->alpha = alpha;
    trace->bias = b;
    trace->passes = sweeps;
    trace->converged = passes >= max_passes;
  }
  return s;
}

GaussianParams FitGaussian(const LearnerSpec& spec, const DenseMatrix& x,
                           std::span<const LabelId> y,
                           const std::vector<LabelId>& classes) {
  const std::size_t d = x.cols();
  const double n = static_cast<double>(x.rows());
  // Smoothing is relative to the widest feature variance over all samples.
  double max_var = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    double mean = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) mean += x(i, k);
    mean /= n;
    double var = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      var += (x(i, k) - mean) * (x(i, k) - mean);
    }
    max_var = std::max(max_var, var / n);
  }
  if (max_var <= 0.0) max_var = 1.0;
  const double epsilon = spec.Get("var_smoothing", 1e-9) * max_var;

  GaussianParams g;
  for (LabelId label : classes) {
    std::vector<double> mean(d, 0.0), var(d, 0.0);
    double count = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      if (y[i] != label) continue;
      ++count;
      for (std::size_t k = 0; k < d; ++k) mean[k] += x(i, k);
    }
    for (double& m : mean) m /= count;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      if (y[i] != label) continue;
      for (std::size_t k = 0; k < d; ++k) {
        var[k] += (x(i, k) - mean[k]) * (x(i, k) - mean[k]);
      }
    }
    for (double& v : var) v = v / count + epsilon;
    g.means.push_back(std::move(mean));
    g.vars.push_back(std::move(var));
    g.log_priors.push_back(std::log(count / n));
  }
  return g;
}

}  // namespace

std::string_view LearnerName(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::kLogReg: return "logreg";
    case LearnerKind::kSvmLinear: return "svm_linear";
    case LearnerKind::kSvmRbf: return "svm_rbf";
    case LearnerKind::kGaussianNB: return "gnb";
  }
  return "unknown";
}

LearnerKind ParseLearnerKind(std::string_view name) {
  for (LearnerKind k : {LearnerKind::kLogReg, LearnerKind::kSvmLinear,
                        LearnerKind::kSvmRbf, LearnerKind::kGaussianNB}) {
    if (LearnerName(k) == name) return k;
  }
  throw Error(ErrorCode::kConfigError,
              "unknown learner '" + std::string(name) + "'");
}

void LearnerSpec::Validate() const {
  const auto& allowed = AllowedKeys(kind);
  for (const auto& [key, value] : hyper) {
    if (!allowed.contains(key)) {
      throw Error(ErrorCode::kConfigError,
                  "hyper-parameter '" + key + "' does not apply to " +
                      std::string(LearnerName(kind)));
    }
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::kConfigError, "hyper-parameter '" + key +
                                               "' must be finite");
    }
    const bool may_be_zero = key == "l2";
    if (value < 0.0 || (!may_be_zero && value == 0.0)) {
      throw Error(ErrorCode::kConfigError,
                  "hyper-parameter '" + key + "' must be positive");
    }
    if ((key == "epochs" || key == "max_passes") &&
        (value < 1.0 || value != std::floor(value))) {
      throw Error(ErrorCode::kConfigError,
                  "hyper-parameter '" + key + "' must be a positive integer");
    }
  }
}

double LearnerSpec::Get(std::string_view key, double fallback) const {
  auto it = hyper.find(std::string(key));
  return it == hyper.end() ? fallback : it->second;
}

DenseMatrix DenseMatrix::FromRows(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  DenseMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) {
      throw Error(ErrorCode::kDimMismatch, "ragged matrix rows");
    }
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

Standardizer Standardizer::Fit(const DenseMatrix& x) {
  Standardizer st;
  const double n = static_cast<double>(x.rows());
  st.mean.assign(x.cols(), 0.0);
  st.scale.assign(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t k = 0; k < x.cols(); ++k) st.mean[k] += x(i, k);
  }
  for (double& m : st.mean) m /= n;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t k = 0; k < x.cols(); ++k) {
      const double dlt = x(i, k) - st.mean[k];
      st.scale[k] += dlt * dlt;
    }
  }
  for (double& s : st.scale) {
    s = std::sqrt(s / n);
    if (s < kScaleFloor) s = 1.0;
  }
  return st;
}

Standardizer Standardizer::Identity(std::size_t dim) {
  return Standardizer{std::vector<double>(dim, 0.0),
                      std::vector<double>(dim, 1.0)};
}

std::vector<double> Standardizer::Apply(std::span<const double> x) const {
  std::vector<double> z(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) z[k] = (x[k] - mean[k]) / scale[k];
  return z;
}

FittedModel FittedModel::Linear(LearnerKind kind, std::vector<double> weights,
                                double bias) {
  if (kind != LearnerKind::kLogReg && kind != LearnerKind::kSvmLinear) {
    throw Error(ErrorCode::kConfigError, "Linear() needs a linear kind");
  }
  FittedModel m;
  m.kind_ = kind;
  m.dim_ = weights.size();
  m.classes_ = {0, 1};
  m.standardizer_ = Standardizer::Identity(m.dim_);
  BinaryScorer s;
  s.weights = std::move(weights);
  s.bias = bias;
  m.scorers_.push_back(std::move(s));
  return m;
}

void FittedModel::CheckDim(std::span<const double> x) const {
  if (x.size() != dim_) {
    throw Error(ErrorCode::kDimMismatch,
                "input has dimension " + std::to_string(x.size()) +
                    ", model expects " + std::to_string(dim_));
  }
}

double FittedModel::Score(const BinaryScorer& s,
                          std::span<const double> z) const {
  if (kind_ == LearnerKind::kSvmRbf) {
    double v = s.bias;
    for (std::size_t i = 0; i < s.support.size(); ++i) {
      v += s.coef[i] * RbfKernel(s.support[i], z, s.gamma);
    }
    return v;
  }
  return Dot(s.weights, z) + s.bias;
}

double FittedModel::GaussianLogPosterior(std::size_t c,
                                         std::span<const double> x) const {
  static const double kLog2Pi = std::log(2.0 * 3.14159265358979323846);
  double lp = gaussian_.log_priors[c];
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double var = gaussian_.vars[c][k];
    const double dlt = x[k] - gaussian_.means[c][k];
    lp -= 0.5 * (kLog2Pi + std::log(var) + dlt * dlt / var);
  }
  return lp;
}

std::vector<double> FittedModel::ClassScores(std::span<const double> x) const {
  CheckDim(x);
  std::vector<double> scores(classes_.size());
  if (kind_ == LearnerKind::kGaussianNB) {
    for (std::size_t c = 0; c < classes_.size(); ++c) {
      scores[c] = GaussianLogPosterior(c, x);
    }
    return scores;
  }
  const std::vector<double> z = standardizer_.Apply(x);
  if (scorers_.size() == 1) {
    const double v = Score(scorers_.front(), z);
    scores = {-v, v};
  } else {
    for (std::size_t c = 0; c < scorers_.size(); ++c) {
      scores[c] = Score(scorers_[c], z);
    }
  }
  return scores;
}

double FittedModel::DecisionValue(std::span<const double> x) const {
  CheckDim(x);
  if (classes_.size() != 2) {
    throw Error(ErrorCode::kConfigError,
                "decision value is defined for binary models only");
  }
  if (kind_ == LearnerKind::kGaussianNB) {
    return GaussianLogPosterior(1, x) - GaussianLogPosterior(0, x);
  }
  return Score(scorers_.front(), standardizer_.Apply(x));
}

LabelId FittedModel::Predict(std::span<const double> x) const {
  if (classes_.size() == 2) {
    // Exactly zero goes to the lower label.
    return DecisionValue(x) > 0.0 ? classes_[1] : classes_[0];
  }
  const std::vector<double> scores = ClassScores(x);
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return classes_[best];
}

FittedModel Fit(const LearnerSpec& spec, const DenseMatrix& x,
                std::span<const LabelId> y, SmoTrace* trace) {
  spec.Validate();
  if (x.rows() != y.size()) {
    throw Error(ErrorCode::kConfigError, "X and y differ in length");
  }
  if (x.rows() < 2 || x.cols() == 0) {
    throw Error(ErrorCode::kConfigError,
                "fit needs at least two samples with one feature");
  }
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (double v : x.row(i)) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFiniteInput,
                    "row " + std::to_string(i) + " is not finite");
      }
    }
  }
  std::set<LabelId> distinct(y.begin(), y.end());
  if (distinct.size() < 2) {
    throw Error(ErrorCode::kDegenerateLabels,
                "training labels contain a single class");
  }

  FittedModel m;
  m.kind_ = spec.kind;
  m.dim_ = x.cols();
  m.classes_.assign(distinct.begin(), distinct.end());

  if (spec.kind == LearnerKind::kGaussianNB) {
    m.standardizer_ = Standardizer::Identity(m.dim_);
    m.gaussian_ = FitGaussian(spec, x, y, m.classes_);
    return m;
  }

  m.standardizer_ = Standardizer::Fit(x);
  const DenseMatrix z = StandardizeAll(x, m.standardizer_);
  // Binary: one scorer for classes_[1] vs classes_[0]. Otherwise one per class.
  const std::size_t heads = m.classes_.size() == 2 ? 1 : m.classes_.size();
  for (std::size_t h = 0; h < heads; ++h) {
    const LabelId positive = heads == 1 ? m.classes_[1] : m.classes_[h];
    std::vector<double> target(y.size()), sign(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      target[i] = y[i] == positive ? 1.0 : 0.0;
      sign[i] = y[i] == positive ? 1.0 : -1.0;
    }
    LearnerSpec head_spec = spec;
    head_spec.seed = heads == 1 ? spec.seed : DeriveSeed(spec.seed, h);
    switch (spec.kind) {
      case LearnerKind::kLogReg:
        m.scorers_.push_back(FitLogReg(head_spec, z, target));
        break;
      case LearnerKind::kSvmLinear:
        m.scorers_.push_back(FitLinearSvm(head_spec, z, sign));
        break;
      case LearnerKind::kSvmRbf:
        m.scorers_.push_back(FitRbfSvm(head_spec, z, sign, trace));
        break;
      case LearnerKind::kGaussianNB:
        break;
    }
  }
  return m;
}

double LogisticObjective(const DenseMatrix& x, std::span<const double> target,
                         std::span<const double> weights, double bias,
                         double l2) {
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double zi = Dot(weights, x.row(i)) + bias;
    // -[t log s(z) + (1-t) log(1-s(z))] = softplus(z) - t z
    loss += Softplus(zi) - target[i] * zi;
  }
  loss /= static_cast<double>(x.rows());
  return loss + 0.5 * l2 * Dot(weights, weights);
}

void LogisticGradient(const DenseMatrix& x, std::span<const double> target,
                      std::span<const double> weights, double bias, double l2,
                      std::span<double> grad_weights, double& grad_bias) {
  const double n = static_cast<double>(x.rows());
  std::fill(grad_weights.begin(), grad_weights.end(), 0.0);
  grad_bias = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto xi = x.row(i);
    const double r = Sigmoid(Dot(weights, xi) + bias) - target[i];
    for (std::size_t k = 0; k < xi.size(); ++k) grad_weights[k] += r * xi[k];
    grad_bias += r;
  }
  for (std::size_t k = 0; k < grad_weights.size(); ++k) {
    grad_weights[k] = grad_weights[k] / n + l2 * weights[k];
  }
  grad_bias /= n;
}

double RbfKernel(std::span<const double> a, std::span<const double> b,
                 double gamma) {
  double d2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double dlt = a[k] - b[k];
    d2 += dlt * dlt;
  }
  return std::exp(-gamma * d2);
}

double SvmDualObjective(std::span<const double> alpha,
                        std::span<const double> sign, const DenseMatrix& gram) {
  double linear = 0.0;
  double quad = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    linear += alpha[i];
    if (alpha[i] == 0.0) continue;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      quad += alpha[i] * alpha[j] * sign[i] * sign[j] * gram(i, j);
    }
  }
  return linear - 0.5 * quad;
}

}  // namespace eql
