#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "dynsamp/error.hpp"
#include "dynsamp/io.hpp"
#include "dynsamp/rng.hpp"
#include "dynsamp/spectral.hpp"

namespace dynsamp {

// One probability distribution over the nodes per time step. Entries are
// kept strictly positive (floor 1e-12) so reweighting never divides by zero.
struct SamplingDistribution {
  Eigen::MatrixXd probs;  // steps x n, rows sum to 1

  int steps() const { return static_cast<int>(probs.rows()); }
  int n() const { return static_cast<int>(probs.cols()); }

  static constexpr double kFloor = 1e-12;
};

namespace detail {

// Floor-then-renormalize until every entry clears the floor; converges in a
// couple of passes because the floored mass is tiny.
inline void floor_and_normalize(Eigen::Ref<Eigen::VectorXd> row,
                                double floor = SamplingDistribution::kFloor) {
  for (int pass = 0; pass < 64; ++pass) {
    row = row.cwiseMax(floor);
    row /= row.sum();
    if (row.minCoeff() >= floor) return;
  }
  throw Error(ErrorKind::numerical, "probability flooring did not settle");
}

}  // namespace detail

inline SamplingDistribution uniform_distribution(int n, int steps) {
  if (n < 1 || steps < 1) throw_invalid("need n >= 1 and steps >= 1");
  SamplingDistribution d;
  d.probs = Eigen::MatrixXd::Constant(steps, n, 1.0 / n);
  return d;
}

// nu(t) = max_{i,j} |Utilde(tn+i, j)| / sqrt(p_t(i)).
struct CoherenceProfile {
  Eigen::VectorXd nu;  // length steps, nonnegative

  int steps() const { return static_cast<int>(nu.size()); }
  double nu_sq(int t) const { return nu(t) * nu(t); }
  double nu_sq_sum() const { return nu.squaredNorm(); }

  Eigen::VectorXd nu_sq_vector() const {
    return nu.array().square().matrix();
  }
};

inline CoherenceProfile coherence(const SpaceTimeDictionary& dict,
                                  const SamplingDistribution& p) {
  if (p.steps() != dict.steps() || p.n() != dict.n())
    throw_invalid("distribution dimensions do not match the dictionary");
  CoherenceProfile prof;
  prof.nu.resize(dict.steps());
  for (int t = 0; t < dict.steps(); ++t) {
    const auto block = dict.block(t);
    double best = 0.0;
    for (int i = 0; i < dict.n(); ++i) {
      const double rowmax = block.row(i).cwiseAbs().maxCoeff();
      best = std::max(best, rowmax * rowmax / p.probs(t, i));
    }
    prof.nu(t) = std::sqrt(best);
  }
  return prof;
}

// Coherence-minimizing distributions: p_t(i) proportional to the squared
// largest dictionary entry in row i of block t (ties -> smallest column).
// The returned profile holds the pre-floor optimum sum_j max_entry(j)^2.
inline std::pair<SamplingDistribution, CoherenceProfile> optimal_distribution(
    const SpaceTimeDictionary& dict) {
  const int n = dict.n();
  const int steps = dict.steps();
  SamplingDistribution d;
  d.probs.resize(steps, n);
  CoherenceProfile prof;
  prof.nu.resize(steps);

  for (int t = 0; t < steps; ++t) {
    const auto block = dict.block(t);
    Eigen::VectorXd rowmax_sq(n);
    for (int i = 0; i < n; ++i) {
      double best = -1.0;
      for (int j = 0; j < dict.k; ++j) {
        const double mag = std::abs(block(i, j));
        if (mag > best) best = mag;  // first column wins ties
      }
      rowmax_sq(i) = best * best;
    }
    const double total = rowmax_sq.sum();
    prof.nu(t) = std::sqrt(total);
    if (total > 0.0) {
      d.probs.row(t) = rowmax_sq.transpose() / total;
    } else {
      d.probs.row(t).setConstant(1.0 / n);
    }
    Eigen::VectorXd row = d.probs.row(t).transpose();
    detail::floor_and_normalize(row);
    d.probs.row(t) = row.transpose();
  }
  return {std::move(d), std::move(prof)};
}

/// Largest-remainder split of a total budget proportional to nu^2 per step;
/// remainder ties go to earlier steps.
inline std::vector<int> allocate_budget(const CoherenceProfile& profile,
                                        int m) {
  if (m < 1) throw_invalid("total budget must be >= 1");
  const int steps = profile.steps();
  const double total = profile.nu_sq_sum();
  if (!(total > 0.0)) throw_invalid("coherence profile is identically zero");

  std::vector<int> budget(steps, 0);
  std::vector<std::pair<double, int>> remainders;
  int assigned = 0;
  for (int t = 0; t < steps; ++t) {
    const double share = static_cast<double>(m) * profile.nu_sq(t) / total;
    budget[t] = static_cast<int>(std::floor(share));
    assigned += budget[t];
    remainders.push_back({share - budget[t], t});
  }
  std::sort(remainders.begin(), remainders.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first > b.first;
              return a.second < b.second;
            });
  for (int r = 0; r < m - assigned; ++r) ++budget[remainders[r].second];
  return budget;
}

// Per-step draws with replacement, plus the reweighting factors
// 1/sqrt(m_t p_t(omega)) that make E[Phi^T Phi] = I.
struct SamplingPlan {
  std::vector<std::vector<int>> omega;       // node index per draw, per step
  std::vector<std::vector<double>> weights;  // matching reweighting factors
  std::uint64_t seed = 0;

  int steps() const { return static_cast<int>(omega.size()); }

  int total() const {
    int m = 0;
    for (const auto& o : omega) m += static_cast<int>(o.size());
    return m;
  }
};

inline SamplingPlan draw_samples(const SamplingDistribution& p,
                                 const std::vector<int>& budgets,
                                 std::uint64_t seed) {
  if (static_cast<int>(budgets.size()) != p.steps())
    throw_invalid("budget list length must equal the number of steps");
  SamplingPlan plan;
  plan.seed = seed;
  plan.omega.resize(p.steps());
  plan.weights.resize(p.steps());
  Rng rng(seed);
  const int n = p.n();
  Eigen::VectorXd cdf(n);
  for (int t = 0; t < p.steps(); ++t) {
    if (budgets[t] < 0) throw_invalid("negative per-step budget");
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += p.probs(t, i);
      cdf(i) = acc;
    }
    plan.omega[t].reserve(budgets[t]);
    plan.weights[t].reserve(budgets[t]);
    for (int d = 0; d < budgets[t]; ++d) {
      const double u = rng.uniform();
      const double* begin = cdf.data();
      const double* pos = std::upper_bound(begin, begin + n, u);
      const int idx = std::min(static_cast<int>(pos - begin), n - 1);
      plan.omega[t].push_back(idx);
      plan.weights[t].push_back(1.0 /
                                std::sqrt(budgets[t] * p.probs(t, idx)));
    }
  }
  return plan;
}

/// Deterministic plan that samples every node exactly once per step with
/// unit weights; its measurement operator is the dictionary itself.
inline SamplingPlan full_plan(int n, int steps) {
  SamplingPlan plan;
  plan.omega.assign(steps, {});
  plan.weights.assign(steps, {});
  for (int t = 0; t < steps; ++t)
    for (int i = 0; i < n; ++i) {
      plan.omega[t].push_back(i);
      plan.weights[t].push_back(1.0);
    }
  return plan;
}

// Phi = Psi S Utilde: row (t, d) is weight(t,d) * Utilde(t*n + omega(t,d), :).
struct MeasurementOperator {
  Eigen::MatrixXd phi;  // M x k
  SamplingPlan plan;

  int k() const { return static_cast<int>(phi.cols()); }
  int rows() const { return static_cast<int>(phi.rows()); }
};

inline MeasurementOperator build_measurement(const SpaceTimeDictionary& dict,
                                             const SamplingPlan& plan) {
  if (plan.steps() != dict.steps())
    throw_invalid("plan steps do not match the dictionary");
  MeasurementOperator op;
  op.plan = plan;
  op.phi.resize(plan.total(), dict.k);
  const int n = dict.n();
  Eigen::Index row = 0;
  for (int t = 0; t < plan.steps(); ++t) {
    for (std::size_t d = 0; d < plan.omega[t].size(); ++d) {
      const int node = plan.omega[t][d];
      if (node < 0 || node >= n) throw_invalid("plan node index out of range");
      op.phi.row(row++) = plan.weights[t][d] *
                          dict.utilde.row(static_cast<Eigen::Index>(t) * n +
                                          node);
    }
  }
  return op;
}

/// Sample a stacked space-time vector: returns the raw samples y and the
/// reweighted samples y_tilde = Psi y, in (step, draw) order.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> apply_sampling(
    const Eigen::VectorXd& spacetime, const SamplingPlan& plan) {
  const int m = plan.total();
  if (plan.steps() == 0) throw_invalid("empty sampling plan");
  if (spacetime.size() % plan.steps() != 0)
    throw_invalid("space-time vector length must be steps * n");
  const Eigen::Index n = spacetime.size() / plan.steps();
  Eigen::VectorXd y(m), y_tilde(m);
  Eigen::Index row = 0;
  for (int t = 0; t < plan.steps(); ++t) {
    for (std::size_t d = 0; d < plan.omega[t].size(); ++d) {
      const int node = plan.omega[t][d];
      if (node < 0 || node >= n) throw_invalid("plan node index out of range");
      y(row) = spacetime(static_cast<Eigen::Index>(t) * n + node);
      y_tilde(row) = plan.weights[t][d] * y(row);
      ++row;
    }
  }
  return {std::move(y), std::move(y_tilde)};
}

/// Per-step sample bound C nu^2 delta^-2 s log^2(s) log(k) log(nT), rounded
/// up; natural logarithms.
inline long rip_sample_bound(double nu_sq, int s, int k, int n, int steps,
                             double delta, double constant) {
  if (s < 2 || k < 2) throw_invalid("sample bound needs s >= 2 and k >= 2");
  if (!(delta > 0.0 && delta < 1.0)) throw_invalid("delta must be in (0,1)");
  if (!(constant > 0.0)) throw_invalid("constant must be positive");
  if (nu_sq < 0.0) throw_invalid("nu^2 must be nonnegative");
  if (n < 1 || steps < 1) throw_invalid("need n >= 1 and steps >= 1");
  const double logs = std::log(static_cast<double>(s));
  const double value = constant * nu_sq / (delta * delta) * s * logs * logs *
                       std::log(static_cast<double>(k)) *
                       std::log(static_cast<double>(n) * steps);
  return static_cast<long>(std::ceil(value));
}

/// Plan export: one line per draw, "t,draw_index,omega,weight" with a
/// 1-based node id.
inline std::string plan_to_csv(const SamplingPlan& plan) {
  std::string out = "t,draw_index,omega,weight\n";
  for (int t = 0; t < plan.steps(); ++t)
    for (std::size_t d = 0; d < plan.omega[t].size(); ++d)
      out += std::to_string(t) + "," + std::to_string(d) + "," +
             std::to_string(plan.omega[t][d] + 1) + "," +
             format_double(plan.weights[t][d]) + "\n";
  return out;
}

/// Distribution export: T rows by n columns.
inline std::string distribution_to_csv(const SamplingDistribution& d) {
  std::string out;
  for (int t = 0; t < d.steps(); ++t) {
    for (int i = 0; i < d.n(); ++i) {
      if (i) out += ',';
      out += format_double(d.probs(t, i));
    }
    out += '\n';
  }
  return out;
}

struct RipBoundPair {
  long probability_bound;  // 32 s nu^2 / (3 beta^2) * log(1/epsilon)
  long expectation_bound;  // 6272 s nu^2 log(3nT) log(4k) log^2(4s) / eta^2
};

inline RipBoundPair rip_sample_bound_appendix(double nu_sq, int s, int k,
                                              int n, int steps, double epsilon,
                                              double eta, double beta) {
  if (s < 1 || k < 1) throw_invalid("appendix bounds need s >= 1 and k >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0) || !(eta > 0.0 && eta <= 1.0) ||
      !(beta > 0.0 && beta <= 1.0))
    throw_invalid("need epsilon in (0,1) and eta, beta in (0,1]");
  if (nu_sq < 0.0) throw_invalid("nu^2 must be nonnegative");
  if (n < 1 || steps < 1) throw_invalid("need n >= 1 and steps >= 1");
  const double b1 =
      32.0 * s * nu_sq / (3.0 * beta * beta) * std::log(1.0 / epsilon);
  const double log4s = std::log(4.0 * s);
  const double b2 = 6272.0 * s * nu_sq *
                    std::log(3.0 * static_cast<double>(n) * steps) *
                    std::log(4.0 * static_cast<double>(k)) * log4s * log4s /
                    (eta * eta);
  return {static_cast<long>(std::ceil(b1)), static_cast<long>(std::ceil(b2))};
}

}  // namespace dynsamp
