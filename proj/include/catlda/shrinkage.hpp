#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "catlda/common.hpp"
#include "catlda/dataset.hpp"
#include "catlda/stats.hpp"

namespace catlda {

// Correlation part of the covariance decomposition Sigma = V^{1/2} P V^{1/2}.
// The diagonal marker stands for P = I and skips every d x d computation.
struct CorrelationModel {
  bool diagonal = true;
  Eigen::MatrixXd dense;  // d x d, only when !diagonal
};

struct ShrinkageIntensities {
  double variance = 0.0;
  double correlation = 0.0;
  double frequency = 0.0;
};

struct ModelParams {
  Eigen::MatrixXd means;        // K x d class centroids
  Eigen::VectorXd pooled_mean;  // count-weighted average of the centroids
  Eigen::VectorXd variances;    // shrunken, strictly positive
  CorrelationModel corr;
  Eigen::VectorXd priors;       // K, positive, sums to 1
  std::vector<int> counts;
  ShrinkageIntensities lambdas;
  std::vector<std::string> label_names;
  std::vector<std::string> feature_names;

  int num_classes() const { return static_cast<int>(counts.size()); }
  Eigen::Index dim() const { return variances.size(); }
  long total_count() const {
    long n = 0;
    for (int c : counts) n += c;
    return n;
  }
};

inline std::pair<Eigen::MatrixXd, Eigen::VectorXd> estimate_means(
    const LabeledMatrix& data) {
  const int k = data.num_classes();
  Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(k, data.d());
  for (Eigen::Index i = 0; i < data.n(); ++i)
    mu.row(data.y[static_cast<std::size_t>(i)] - 1) += data.X.row(i);
  for (int c = 0; c < k; ++c) mu.row(c) /= static_cast<double>(data.class_counts[c]);
  Eigen::VectorXd pool = Eigen::VectorXd::Zero(data.d());
  const double n = static_cast<double>(data.n());
  for (int c = 0; c < k; ++c)
    pool += (static_cast<double>(data.class_counts[c]) / n) * mu.row(c).transpose();
  return {std::move(mu), std::move(pool)};
}

// Residuals of every sample about its class centroid.
inline Eigen::MatrixXd class_centered_residuals(const LabeledMatrix& data,
                                                const Eigen::MatrixXd& means) {
  Eigen::MatrixXd r = data.X;
  for (Eigen::Index i = 0; i < r.rows(); ++i)
    r.row(i) -= means.row(data.y[static_cast<std::size_t>(i)] - 1);
  return r;
}

// Unbiased pooled variances (denominator n - K) from class-centered residuals.
inline Eigen::VectorXd pooled_variances(const LabeledMatrix& data,
                                        const Eigen::MatrixXd& residuals) {
  const double dof = static_cast<double>(data.n() - data.num_classes());
  if (dof <= 0.0)
    throw validation_error("no residual degrees of freedom (n <= K)");
  return residuals.colwise().squaredNorm() / dof;
}

struct VarianceEstimate {
  Eigen::VectorXd variances;
  double lambda = 0.0;
  double target = 0.0;  // median of the empirical variances
};

// Shrinks each pooled variance toward the median of all of them, with the
// intensity lambda = sum_i Var(v_i) / sum_i (v_i - median)^2 clipped to [0,1].
inline VarianceEstimate shrink_variances(const LabeledMatrix& data,
                                         const Eigen::MatrixXd& residuals) {
  const Eigen::VectorXd v_hat = pooled_variances(data, residuals);
  const double n = static_cast<double>(data.n());
  const double dof = n - static_cast<double>(data.num_classes());

  std::vector<double> v_vec(v_hat.data(), v_hat.data() + v_hat.size());
  const double target = median_of(v_vec);

  // v_hat_i = (n / dof) * mean_j(w_ji) with w_ji the squared residuals, so
  // Var(v_hat_i) = n / (dof^2 (n-1)) * sum_j (w_ji - mean_i)^2.
  double num = 0.0, den = 0.0;
  const double var_scale = n / (dof * dof * (n - 1.0));
  for (Eigen::Index i = 0; i < v_hat.size(); ++i) {
    const auto w = residuals.col(i).array().square();
    const double w_bar = w.mean();
    num += var_scale * (w - w_bar).square().sum();
    den += (v_hat(i) - target) * (v_hat(i) - target);
  }

  double lambda = 1.0;
  if (den > 0.0) lambda = std::clamp(num / den, 0.0, 1.0);

  VarianceEstimate out;
  out.lambda = lambda;
  out.target = target;
  out.variances = lambda * target + (1.0 - lambda) * v_hat.array();
  for (Eigen::Index i = 0; i < out.variances.size(); ++i)
    if (!(out.variances(i) > 0.0))
      throw validation_error("feature variance not positive after shrinkage "
                             "(feature " + std::to_string(i) + ")");
  return out;
}

struct CorrelationEstimate {
  CorrelationModel corr;
  double lambda = 1.0;
};

// Ridge-type correlation shrinkage: off-diagonals scaled by (1 - lambda)
// with lambda = sum Var(r_ij) / sum r_ij^2 over i != j, clipped to [0,1].
// Correlations are computed on residuals standardized by the raw pooled
// variances, so the sample correlation has an exactly unit diagonal.
inline CorrelationEstimate shrink_correlation(const LabeledMatrix& data,
                                              const Eigen::MatrixXd& residuals,
                                              const Eigen::VectorXd& v_hat_raw) {
  const Eigen::Index d = data.d();
  const double n = static_cast<double>(data.n());
  const double dof = n - static_cast<double>(data.num_classes());
  if (dof <= 0.0)
    throw validation_error("no residual degrees of freedom (n <= K)");

  CorrelationEstimate out;
  out.corr.diagonal = false;
  if (d == 1) {
    out.corr.dense = Eigen::MatrixXd::Identity(1, 1);
    out.lambda = 1.0;
    return out;
  }

  Eigen::MatrixXd z = residuals;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double s = std::sqrt(v_hat_raw(i));
    if (s > 0.0)
      z.col(i) /= s;
    else
      z.col(i).setZero();  // constant feature: correlation treated as zero
  }

  // The lambda sums only need the n x n Gram matrix and columnwise moments,
  // never a d x d temporary.
  const Eigen::MatrixXd gram = z * z.transpose();  // n x n
  const Eigen::VectorXd col_sq = z.colwise().squaredNorm();
  double frob2 = gram.squaredNorm();               // = ||Z^T Z||_F^2
  double diag2 = col_sq.squaredNorm();             // sum_i (Z^T Z)_ii^2

  // sum over i != j of sum_m (z_mi z_mj)^2, via per-row expansion.
  double sum_w2_off = 0.0;
  for (Eigen::Index m = 0; m < z.rows(); ++m) {
    const auto zm2 = z.row(m).array().square();
    const double s1 = zm2.sum();
    const double s2 = zm2.square().sum();
    sum_w2_off += s1 * s1 - s2;
  }
  const double sum_crossprod2_off = std::max(0.0, frob2 - diag2);
  const double sum_r2_off = sum_crossprod2_off / (dof * dof);
  const double sum_wbar2_off = sum_crossprod2_off / (n * n);
  const double var_scale = n / (dof * dof * (n - 1.0));
  const double sum_var_off =
      var_scale * std::max(0.0, sum_w2_off - n * sum_wbar2_off);

  out.lambda = 1.0;
  if (sum_r2_off > 0.0) out.lambda = std::clamp(sum_var_off / sum_r2_off, 0.0, 1.0);

  Eigen::MatrixXd r_hat(d, d);
  r_hat.setZero();
  r_hat.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose(), 1.0 / dof);
  r_hat = r_hat.selfadjointView<Eigen::Lower>();
  r_hat *= (1.0 - out.lambda);
  r_hat.diagonal().setOnes();
  out.corr.dense = std::move(r_hat);
  return out;
}

struct PriorEstimate {
  Eigen::VectorXd priors;
  double lambda = 1.0;
};

// Frequency estimator shrinking the empirical class proportions toward the
// uniform distribution 1/K.
inline PriorEstimate shrink_priors(const std::vector<int>& counts) {
  const int k = static_cast<int>(counts.size());
  if (k < 2) throw validation_error("need at least 2 classes");
  double n = 0.0;
  for (int c : counts) n += static_cast<double>(c);

  const double uniform = 1.0 / static_cast<double>(k);
  double sum_sq = 0.0, sum_dev = 0.0;
  for (int c : counts) {
    const double p = static_cast<double>(c) / n;
    sum_sq += p * p;
    sum_dev += (uniform - p) * (uniform - p);
  }

  PriorEstimate out;
  out.lambda = 1.0;
  const double den = (n - 1.0) * sum_dev;
  if (den > 0.0) out.lambda = std::clamp((1.0 - sum_sq) / den, 0.0, 1.0);

  out.priors.resize(k);
  for (int c = 0; c < k; ++c)
    out.priors(c) = out.lambda * uniform +
                    (1.0 - out.lambda) * static_cast<double>(counts[c]) / n;
  return out;
}

// Composes the four estimators. With diagonal=true the correlation stays an
// identity marker and no d x d work happens.
inline ModelParams fit_model_params(const LabeledMatrix& data, bool diagonal) {
  data.validate();
  if (data.num_classes() < 2)
    throw validation_error("classification needs at least 2 classes");
  if (data.n() <= data.num_classes())
    throw validation_error("no residual degrees of freedom (n <= K)");

  ModelParams params;
  auto [mu, pool] = estimate_means(data);
  params.means = std::move(mu);
  params.pooled_mean = std::move(pool);

  const Eigen::MatrixXd residuals = class_centered_residuals(data, params.means);
  auto var = shrink_variances(data, residuals);
  params.variances = std::move(var.variances);
  params.lambdas.variance = var.lambda;

  if (diagonal) {
    params.corr.diagonal = true;
    params.lambdas.correlation = 0.0;
  } else {
    const Eigen::VectorXd v_raw = pooled_variances(data, residuals);
    auto corr = shrink_correlation(data, residuals, v_raw);
    params.corr = std::move(corr.corr);
    params.lambdas.correlation = corr.lambda;
  }

  auto priors = shrink_priors(data.class_counts);
  params.priors = std::move(priors.priors);
  params.lambdas.frequency = priors.lambda;

  params.counts = data.class_counts;
  params.label_names = data.label_names;
  params.feature_names = data.feature_names;
  return params;
}

}  // namespace catlda
