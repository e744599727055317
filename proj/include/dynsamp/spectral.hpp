#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dynsamp/error.hpp"
#include "dynsamp/graph.hpp"
#include "dynsamp/rng.hpp"

namespace dynsamp {

using GraphSignal = Eigen::VectorXd;

// Full Laplacian eigendecomposition with ascending eigenvalues and a
// deterministic orientation: in each column the first entry of largest
// absolute value is nonnegative.
struct SpectralBasis {
  Eigen::VectorXd sigma;   // ascending, sigma(0) clamped to 0 near zero
  Eigen::MatrixXd vectors; // orthonormal columns, column i <-> sigma(i)

  int n() const { return static_cast<int>(sigma.size()); }

  // Largest entry magnitude per column; exposed because coherence depends
  // on how spread out the chosen eigenbasis is.
  Eigen::VectorXd column_inf_norms() const {
    return vectors.cwiseAbs().colwise().maxCoeff().transpose();
  }
};

namespace detail {

inline void orient_column(Eigen::Ref<Eigen::VectorXd> col) {
  const double maxabs = col.cwiseAbs().maxCoeff();
  for (Eigen::Index r = 0; r < col.size(); ++r) {
    if (std::abs(col(r)) == maxabs) {
      if (col(r) < 0.0) col = -col;
      return;
    }
  }
}

// Gram-Schmidt pass over a block of columns spanning one eigenvalue cluster.
inline void reorthonormalize(Eigen::Ref<Eigen::MatrixXd> block) {
  for (Eigen::Index c = 0; c < block.cols(); ++c) {
    for (Eigen::Index p = 0; p < c; ++p)
      block.col(c) -= block.col(p).dot(block.col(c)) * block.col(p);
    const double norm = block.col(c).norm();
    if (norm <= 0.0)
      throw Error(ErrorKind::numerical, "degenerate eigenvector cluster");
    block.col(c) /= norm;
  }
}

}  // namespace detail

inline SpectralBasis eigendecompose(const Eigen::MatrixXd& lap,
                                    bool allow_disconnected = false) {
  const Eigen::Index n = lap.rows();
  if (lap.cols() != n) throw_invalid("Laplacian must be square");
  const double scale = std::max(1.0, lap.cwiseAbs().maxCoeff());
  if ((lap - lap.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw_invalid("Laplacian must be symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::numerical, "eigendecomposition did not converge");

  SpectralBasis basis;
  basis.sigma = solver.eigenvalues();
  basis.vectors = solver.eigenvectors();

  for (Eigen::Index i = 0; i < n; ++i) {
    if (basis.sigma(i) < -1e-10)
      throw Error(ErrorKind::numerical,
                  "Laplacian is not positive semidefinite");
    if (basis.sigma(i) < 0.0 || std::abs(basis.sigma(i)) <= 1e-10)
      basis.sigma(i) = std::max(basis.sigma(i), 0.0);
  }
  basis.sigma(0) = 0.0;

  if (!allow_disconnected && n > 1 && basis.sigma(1) < 1e-8)
    throw Error(ErrorKind::numerical,
                "graph is disconnected (eigenvalue 0 has multiplicity > 1)");

  // Degenerate clusters (gap < 1e-8) get a deterministic in-order basis.
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    if (i == n || basis.sigma(i) - basis.sigma(i - 1) >= 1e-8) {
      if (i - start > 1)
        detail::reorthonormalize(basis.vectors.middleCols(start, i - start));
      start = i;
    }
  }
  for (Eigen::Index c = 0; c < n; ++c)
    detail::orient_column(basis.vectors.col(c));

  const double recon =
      (basis.vectors * basis.sigma.asDiagonal() * basis.vectors.transpose() -
       lap)
          .cwiseAbs()
          .maxCoeff();
  if (recon > 1e-8 * scale)
    throw Error(ErrorKind::numerical, "eigendecomposition residual too large");

  return basis;
}

// Observation instants t_0 < t_1 < ... expressed relative to a declared unit.
// The dictionary powers a diffusion eigenvalue by e_l = times[l] / unit, so
// the default unit grid {0, 1, ..., T-1} reproduces integer powers.
class TimeGrid {
 public:
  static TimeGrid regular(int steps, double unit = 1.0) {
    if (steps < 1) throw_invalid("time grid needs at least one instant");
    if (!(unit > 0.0)) throw_invalid("time unit must be positive");
    std::vector<double> times(steps);
    for (int l = 0; l < steps; ++l) times[l] = l * unit;
    TimeGrid g(std::move(times), unit);
    g.regular_ = true;
    return g;
  }

  static TimeGrid at_times(std::vector<double> times, double unit = 1.0) {
    return TimeGrid(std::move(times), unit);
  }

  int steps() const { return static_cast<int>(times_.size()); }
  const std::vector<double>& times() const { return times_; }
  double unit() const { return unit_; }
  bool regular() const { return regular_; }

  double exponent(int l) const { return times_[l] / unit_; }

  std::vector<double> exponents() const {
    std::vector<double> e(times_.size());
    for (std::size_t l = 0; l < times_.size(); ++l) e[l] = times_[l] / unit_;
    return e;
  }

 private:
  TimeGrid(std::vector<double> times, double unit)
      : times_(std::move(times)), unit_(unit) {
    if (times_.empty()) throw_invalid("time grid needs at least one instant");
    if (!(unit_ > 0.0)) throw_invalid("time unit must be positive");
    if (times_.front() != 0.0)
      throw_invalid("time grid must start at 0 so normalizers stay >= 1");
    for (std::size_t l = 1; l < times_.size(); ++l)
      if (!(times_[l] > times_[l - 1]))
        throw_invalid("observation times must be strictly increasing");
    regular_ = true;
    for (std::size_t l = 0; l < times_.size(); ++l)
      if (times_[l] != l * unit_) {
        regular_ = false;
        break;
      }
  }

  std::vector<double> times_;
  double unit_;
  bool regular_ = false;
};

// Scalar spectral filter mapping a Laplacian eigenvalue sigma to a diffusion
// eigenvalue lambda = h(sigma). heat(dt) gives exp(-dt*sigma).
class DiffusionFilter {
 public:
  static DiffusionFilter heat(double dt) {
    if (dt < 0.0) throw_invalid("heat filter needs dt >= 0");
    DiffusionFilter f;
    f.name_ = "heat";
    f.dt_ = dt;
    f.fn_ = [dt](double sigma) { return std::exp(-dt * sigma); };
    return f;
  }

  static DiffusionFilter from_function(std::function<double(double)> fn,
                                       std::string name = "custom") {
    DiffusionFilter f;
    f.name_ = std::move(name);
    f.fn_ = std::move(fn);
    return f;
  }

  // Piecewise-linear table; evaluation outside [sigmas.front, sigmas.back]
  // is a domain error.
  static DiffusionFilter from_table(std::vector<double> sigmas,
                                    std::vector<double> lambdas) {
    if (sigmas.size() != lambdas.size() || sigmas.size() < 2)
      throw_invalid("filter table needs >= 2 matching points");
    for (std::size_t i = 1; i < sigmas.size(); ++i)
      if (!(sigmas[i] > sigmas[i - 1]))
        throw_invalid("filter table abscissae must be increasing");
    DiffusionFilter f;
    f.name_ = "table";
    f.fn_ = [xs = std::move(sigmas), ys = std::move(lambdas)](double s) {
      if (s < xs.front() - 1e-12 || s > xs.back() + 1e-12)
        throw Error(ErrorKind::invalid_argument,
                    "filter evaluated outside its tabulated domain");
      s = std::clamp(s, xs.front(), xs.back());
      const auto it = std::upper_bound(xs.begin(), xs.end(), s);
      const std::size_t hi = std::min<std::size_t>(
          xs.size() - 1, static_cast<std::size_t>(it - xs.begin()));
      const std::size_t lo = hi == 0 ? 0 : hi - 1;
      if (hi == lo) return ys[lo];
      const double t = (s - xs[lo]) / (xs[hi] - xs[lo]);
      return ys[lo] + t * (ys[hi] - ys[lo]);
    };
    return f;
  }

  double operator()(double sigma) const { return fn_(sigma); }
  const std::string& name() const { return name_; }
  double dt() const { return dt_; }

 private:
  std::string name_;
  double dt_ = 0.0;
  std::function<double(double)> fn_;
};

inline Eigen::VectorXd diffusion_eigenvalues(const SpectralBasis& basis,
                                             const DiffusionFilter& filter,
                                             int k) {
  if (k < 1 || k > basis.n())
    throw_invalid("bandwidth k must be in [1, n]");
  Eigen::VectorXd lambdas(k);
  for (int i = 0; i < k; ++i) {
    lambdas(i) = filter(basis.sigma(i));
    if (!std::isfinite(lambdas(i)))
      throw_invalid("filter produced a non-finite eigenvalue at sigma=" +
                    std::to_string(basis.sigma(i)));
  }
  return lambdas;
}

namespace detail {

// lambda^e for the exponents a time grid can produce. Negative lambda is
// only meaningful for integer exponents.
inline double power(double lambda, double e) {
  if (lambda >= 0.0) return std::pow(lambda, e);
  const double rounded = std::round(e);
  if (std::abs(e - rounded) > 1e-9)
    throw_invalid("negative diffusion eigenvalue with non-integer exponent");
  return std::pow(lambda, rounded);
}

}  // namespace detail

/// Column normalizers f(lambda) = sqrt(sum_l lambda^(2 e_l)); always >= 1
/// because the grid starts at exponent 0.
inline Eigen::VectorXd f_norms(const Eigen::VectorXd& lambdas,
                               const TimeGrid& grid) {
  const auto exps = grid.exponents();
  Eigen::VectorXd f(lambdas.size());
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    if (!std::isfinite(lambdas(i)))
      throw_invalid("non-finite diffusion eigenvalue");
    double sum = 0.0;
    for (double e : exps) {
      const double p = detail::power(lambdas(i), e);
      sum += p * p;
    }
    f(i) = std::sqrt(sum);
  }
  return f;
}

// The Tn x k space-time dictionary. Block t holds the diffusion-scaled
// eigenvectors lambda_i^{e_t} u_i / f(lambda_i); columns are orthonormal by
// construction.
struct SpaceTimeDictionary {
  int k = 0;
  TimeGrid grid = TimeGrid::regular(1);
  Eigen::VectorXd lambdas;
  Eigen::VectorXd fvals;
  Eigen::MatrixXd utilde;  // (steps * n) x k

  int n() const { return static_cast<int>(utilde.rows()) / grid.steps(); }
  int steps() const { return grid.steps(); }

  Eigen::Block<const Eigen::MatrixXd> block(int t) const {
    return utilde.block(static_cast<Eigen::Index>(t) * n(), 0, n(), k);
  }
};

inline SpaceTimeDictionary build_dictionary(const SpectralBasis& basis,
                                            const DiffusionFilter& filter,
                                            int k, const TimeGrid& grid) {
  SpaceTimeDictionary dict;
  dict.k = k;
  dict.grid = grid;
  dict.lambdas = diffusion_eigenvalues(basis, filter, k);
  dict.fvals = f_norms(dict.lambdas, grid);

  const int n = basis.n();
  const int steps = grid.steps();
  dict.utilde.resize(static_cast<Eigen::Index>(steps) * n, k);
  for (int t = 0; t < steps; ++t) {
    const double e = grid.exponent(t);
    for (int i = 0; i < k; ++i) {
      const double scale = detail::power(dict.lambdas(i), e) / dict.fvals(i);
      dict.utilde.block(static_cast<Eigen::Index>(t) * n, i, n, 1) =
          scale * basis.vectors.col(i);
    }
  }
  return dict;
}

/// Spectral evolution x -> U diag(h(sigma)^t) U^T x; t is measured in grid
/// units (t = 1 applies the filter once).
inline GraphSignal evolve(const GraphSignal& x, const SpectralBasis& basis,
                          const DiffusionFilter& filter, double t) {
  if (x.size() != basis.n())
    throw_invalid("signal length does not match the basis");
  if (t == 0.0) return x;
  Eigen::VectorXd coeffs = basis.vectors.transpose() * x;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
    const double lambda = filter(basis.sigma(i));
    if (!std::isfinite(lambda))
      throw_invalid("filter produced a non-finite eigenvalue");
    coeffs(i) *= detail::power(lambda, t);
  }
  return basis.vectors * coeffs;
}

/// Space-time trajectory [x; A x; ...; A^{T-1} x] stacked over the grid.
inline Eigen::VectorXd embed(const GraphSignal& x, const SpectralBasis& basis,
                             const DiffusionFilter& filter,
                             const TimeGrid& grid) {
  const int n = basis.n();
  Eigen::VectorXd out(static_cast<Eigen::Index>(grid.steps()) * n);
  for (int t = 0; t < grid.steps(); ++t)
    out.segment(static_cast<Eigen::Index>(t) * n, n) =
        evolve(x, basis, filter, grid.exponent(t));
  return out;
}

struct SparseSpectralCode {
  Eigen::VectorXd coeffs;    // length k
  std::vector<int> support;  // 0-based indices of nonzeros, ascending

  static SparseSpectralCode from_dense(const Eigen::VectorXd& coeffs) {
    SparseSpectralCode code;
    code.coeffs = coeffs;
    for (Eigen::Index i = 0; i < coeffs.size(); ++i)
      if (coeffs(i) != 0.0) code.support.push_back(static_cast<int>(i));
    return code;
  }
};

/// Bandlimited signal with the given spectral support and coefficients,
/// optionally rescaled to unit norm. Returns the vertex signal and its code.
inline std::pair<GraphSignal, SparseSpectralCode> synth_signal(
    const SpectralBasis& basis, int k, const std::vector<int>& support,
    const std::vector<double>& coeffs, bool normalize) {
  if (k < 1 || k > basis.n()) throw_invalid("bandwidth k must be in [1, n]");
  if (support.size() != coeffs.size())
    throw_invalid("support and coefficient lists must match");
  Eigen::VectorXd code = Eigen::VectorXd::Zero(k);
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] < 0 || support[i] >= k)
      throw_invalid("support index out of [0, k)");
    code(support[i]) = coeffs[i];
  }
  GraphSignal x = basis.vectors.leftCols(k) * code;
  if (normalize) {
    const double norm = x.norm();
    if (norm > 0.0) {
      x /= norm;
      code /= norm;
    }
  }
  return {std::move(x), SparseSpectralCode::from_dense(code)};
}

/// Random s-sparse k-bandlimited unit signal (support uniform without
/// replacement, Gaussian coefficients).
inline std::pair<GraphSignal, SparseSpectralCode> random_sparse_signal(
    const SpectralBasis& basis, int k, int s, Rng& rng) {
  if (s < 1 || s > k) throw_invalid("sparsity s must be in [1, k]");
  std::vector<int> pool(k);
  for (int i = 0; i < k; ++i) pool[i] = i;
  std::vector<int> support;
  for (int i = 0; i < s; ++i) {
    const auto pick = static_cast<std::size_t>(rng.below(pool.size()));
    support.push_back(pool[pick]);
    pool[pick] = pool.back();
    pool.pop_back();
  }
  std::sort(support.begin(), support.end());
  std::vector<double> coeffs(s);
  for (int i = 0; i < s; ++i) coeffs[i] = rng.normal();
  return synth_signal(basis, k, support, coeffs, true);
}

/// Map a dictionary-domain code back to the vertex-domain initial signal:
/// x = U_k diag(1/f) c.
inline GraphSignal code_to_vertex(const Eigen::VectorXd& code,
                                  const SpaceTimeDictionary& dict,
                                  const SpectralBasis& basis) {
  if (code.size() != dict.k) throw_invalid("code length must equal k");
  return basis.vectors.leftCols(dict.k) *
         (code.array() / dict.fvals.array()).matrix();
}

}  // namespace dynsamp
