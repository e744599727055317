#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "dynsamp/error.hpp"
#include "dynsamp/sampling.hpp"
#include "dynsamp/spectral.hpp"

namespace dynsamp {

struct RecoveryConfig {
  int sparsity = 1;
  int max_iter = 20;
  double residual_tol = 1e-10;
  double ls_tol = 1e-10;  // relative rank tolerance for the support solve
};

struct RecoveryResult {
  SparseSpectralCode code;        // length k, at most s nonzeros
  GraphSignal x_hat;              // vertex-domain estimate (may be empty)
  std::vector<double> residuals;  // ||y_tilde - Phi c^n||_2 per iteration
  int iterations = 0;
  bool converged = false;
};

/// Keep the s largest-magnitude entries, zero the rest; ties keep the
/// smaller index.
inline Eigen::VectorXd hard_threshold(const Eigen::VectorXd& v, int s) {
  if (s < 0) throw_invalid("threshold order must be >= 0");
  if (s >= v.size()) return v;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  if (s == 0) return out;
  std::vector<int> idx(v.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::partial_sort(idx.begin(), idx.begin() + s, idx.end(),
                    [&](int a, int b) {
                      const double ma = std::abs(v(a)), mb = std::abs(v(b));
                      if (ma != mb) return ma > mb;
                      return a < b;
                    });
  for (int r = 0; r < s; ++r) out(idx[r]) = v(idx[r]);
  return out;
}

/// Indices of the r largest-magnitude entries (ascending order, ties to the
/// smaller index).
inline std::vector<int> top_index_set(const Eigen::VectorXd& v, int r) {
  if (r < 1) throw_invalid("top index set needs r >= 1");
  const int take = std::min<int>(r, static_cast<int>(v.size()));
  std::vector<int> idx(v.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::partial_sort(idx.begin(), idx.begin() + take, idx.end(),
                    [&](int a, int b) {
                      const double ma = std::abs(v(a)), mb = std::abs(v(b));
                      if (ma != mb) return ma > mb;
                      return a < b;
                    });
  idx.resize(take);
  std::sort(idx.begin(), idx.end());
  return idx;
}

/// Minimizer of ||y - Phi_V z||_2 embedded into a length-k vector with zeros
/// off V; minimum-norm solution when Phi_V is rank-deficient.
inline Eigen::VectorXd support_least_squares(const Eigen::MatrixXd& phi,
                                             const Eigen::VectorXd& y,
                                             const std::vector<int>& support,
                                             double ls_tol = 1e-10) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(phi.cols());
  if (support.empty()) return out;
  Eigen::MatrixXd sub(phi.rows(), support.size());
  for (std::size_t c = 0; c < support.size(); ++c) {
    if (support[c] < 0 || support[c] >= phi.cols())
      throw_invalid("support index out of range");
    sub.col(static_cast<Eigen::Index>(c)) = phi.col(support[c]);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      sub, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(ls_tol);
  const Eigen::VectorXd z = svd.solve(y);
  for (std::size_t c = 0; c < support.size(); ++c)
    out(support[c]) = z(static_cast<Eigen::Index>(c));
  return out;
}

// CoSaMP: residual-proxy support expansion by min(2s, k) indices, least
// squares on the candidate support, hard thresholding back to s terms.
// Halts when the residual drops below residual_tol or at max_iter.
inline RecoveryResult cosamp(const MeasurementOperator& op,
                             const Eigen::VectorXd& y_tilde,
                             const RecoveryConfig& config) {
  const int k = op.k();
  if (y_tilde.size() != op.rows())
    throw_invalid("sample vector length must match the operator rows");
  if (config.sparsity < 1 || config.sparsity > k)
    throw_invalid("sparsity must be in [1, k]");
  if (config.max_iter < 1) throw_invalid("max_iter must be >= 1");

  RecoveryResult result;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd residual = y_tilde;
  const int expand = std::min(2 * config.sparsity, k);

  for (int it = 0; it < config.max_iter; ++it) {
    const Eigen::VectorXd proxy = op.phi.transpose() * residual;
    std::set<int> candidate;
    for (Eigen::Index i = 0; i < c.size(); ++i)
      if (c(i) != 0.0) candidate.insert(static_cast<int>(i));
    for (int i : top_index_set(proxy, expand)) candidate.insert(i);
    const std::vector<int> support(candidate.begin(), candidate.end());

    const Eigen::VectorXd v =
        support_least_squares(op.phi, y_tilde, support, config.ls_tol);
    c = hard_threshold(v, config.sparsity);
    residual = y_tilde - op.phi * c;
    result.residuals.push_back(residual.norm());
    result.iterations = it + 1;
    if (result.residuals.back() <= config.residual_tol) {
      result.converged = true;
      break;
    }
  }
  result.code = SparseSpectralCode::from_dense(c);
  return result;
}

/// End-to-end recovery: reweight raw samples if needed, run CoSaMP, map the
/// code back to the vertex domain.
inline RecoveryResult recover_signal(const Eigen::VectorXd& samples,
                                     bool already_reweighted,
                                     const SamplingPlan& plan,
                                     const SpaceTimeDictionary& dict,
                                     const SpectralBasis& basis,
                                     const RecoveryConfig& config) {
  if (samples.size() != plan.total())
    throw_invalid("sample vector length must match the plan");
  Eigen::VectorXd y_tilde = samples;
  if (!already_reweighted) {
    Eigen::Index row = 0;
    for (int t = 0; t < plan.steps(); ++t)
      for (double w : plan.weights[t]) y_tilde(row++) *= w;
  }
  const MeasurementOperator op = build_measurement(dict, plan);
  RecoveryResult result = cosamp(op, y_tilde, config);
  result.x_hat = code_to_vertex(result.code.coeffs, dict, basis);
  return result;
}

inline double relative_error(const GraphSignal& x, const GraphSignal& x_hat) {
  const double denom = x.norm();
  if (!(denom > 0.0))
    throw_invalid("relative error undefined for zero ground truth");
  return (x - x_hat).norm() / denom;
}

/// ||x - x_hat|| / (||Psi e|| * ||x||).
inline double error_ratio(const GraphSignal& x, const GraphSignal& x_hat,
                          double psi_e_norm) {
  const double denom = x.norm();
  if (!(denom > 0.0) || !(psi_e_norm > 0.0))
    throw_invalid("error ratio undefined for zero denominator");
  return (x - x_hat).norm() / (psi_e_norm * denom);
}

}  // namespace dynsamp
