#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "dynsamp/graph.hpp"
#include "dynsamp/harness.hpp"
#include "dynsamp/recovery.hpp"
#include "dynsamp/rng.hpp"
#include "dynsamp/sampling.hpp"
#include "dynsamp/spectral.hpp"

using namespace dynsamp;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

// Exhaustive best s-sparse fit: minimizes ||y - Phi_S z|| over all supports.
Eigen::VectorXd exhaustive_sparse_fit(const Eigen::MatrixXd& phi,
                                      const Eigen::VectorXd& y, int s) {
  const int k = static_cast<int>(phi.cols());
  std::vector<int> comb(s);
  for (int i = 0; i < s; ++i) comb[i] = i;
  double best_res = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best = Eigen::VectorXd::Zero(k);
  for (;;) {
    const Eigen::VectorXd z = support_least_squares(phi, y, comb);
    const double res = (y - phi * z).norm();
    if (res < best_res - 1e-15) {
      best_res = res;
      best = z;
    }
    int pos = s - 1;
    while (pos >= 0 && comb[pos] == k - s + pos) --pos;
    if (pos < 0) break;
    ++comb[pos];
    for (int q = pos + 1; q < s; ++q) comb[q] = comb[q - 1] + 1;
  }
  return best;
}

struct ToyProblem {
  SpectralBasis basis;
  SpaceTimeDictionary dict;
  DiffusionFilter filter = DiffusionFilter::heat(0.0);
};

ToyProblem cycle_problem(int n, int k, int steps, double dt) {
  ToyProblem p;
  p.basis = eigendecompose(build_laplacian(gen_cycle(n)));
  p.filter = DiffusionFilter::heat(dt);
  p.dict = build_dictionary(p.basis, p.filter, k, TimeGrid::regular(steps));
  return p;
}

}  // namespace

TEST_CASE("hard thresholding") {
  auto same = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.size() == b.size() && (a - b).cwiseAbs().maxCoeff() == 0.0;
  };
  REQUIRE(same(hard_threshold(vec({3, -5, 1, 0}), 2), vec({3, -5, 0, 0})));
  REQUIRE(same(hard_threshold(vec({2, -2, 0}), 1), vec({2, 0, 0})));
  REQUIRE(same(hard_threshold(vec({1, 2, 3}), 0), vec({0, 0, 0})));
  REQUIRE(same(hard_threshold(vec({1, 2}), 5), vec({1, 2})));
}

TEST_CASE("top index selection") {
  REQUIRE(top_index_set(vec({0.1, -9, 3}), 2) == std::vector<int>{1, 2});
  REQUIRE(top_index_set(vec({1, 1, 1}), 2) == std::vector<int>{0, 1});
  REQUIRE(top_index_set(vec({4, 5}), 10) == std::vector<int>{0, 1});
}

TEST_CASE("support least squares") {
  SECTION("identity operator picks out coordinates") {
    const Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(3, 3);
    const Eigen::VectorXd z =
        support_least_squares(phi, vec({4, 5, 6}), {0, 2});
    REQUIRE((z - vec({4, 0, 6})).cwiseAbs().maxCoeff() <= 1e-12);
  }

  SECTION("orthonormal columns reduce to a projection") {
    const auto p = cycle_problem(10, 6, 3, 0.5);
    const Eigen::MatrixXd phi = p.dict.utilde;
    Rng rng(4);
    Eigen::VectorXd y(phi.rows());
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = rng.normal();
    const std::vector<int> support{1, 3, 4};
    const Eigen::VectorXd z = support_least_squares(phi, y, support);
    for (int idx : support)
      REQUIRE_THAT(z(idx), Catch::Matchers::WithinAbs(phi.col(idx).dot(y),
                                                      1e-12));
  }

  SECTION("consistent systems are solved exactly") {
    Rng rng(12);
    Eigen::MatrixXd phi(8, 5);
    for (Eigen::Index r = 0; r < 8; ++r)
      for (Eigen::Index c = 0; c < 5; ++c) phi(r, c) = rng.normal();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(5);
    w(1) = 2.5;
    w(4) = -1.0;
    const Eigen::VectorXd z =
        support_least_squares(phi, phi * w, {1, 4});
    REQUIRE((z - w).cwiseAbs().maxCoeff() <= 1e-10);
  }

  SECTION("empty support returns the zero vector") {
    const Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(3, 3);
    REQUIRE(support_least_squares(phi, vec({1, 2, 3}), {}).cwiseAbs()
                .maxCoeff() == 0.0);
  }

  SECTION("rank-deficient supports get the minimum-norm solution") {
    Eigen::MatrixXd phi(3, 2);
    phi << 1, 1, 1, 1, 1, 1;  // two identical columns
    const Eigen::VectorXd z = support_least_squares(phi, vec({3, 3, 3}), {0, 1});
    REQUIRE_THAT(z(0), Catch::Matchers::WithinAbs(1.5, 1e-12));
    REQUIRE_THAT(z(1), Catch::Matchers::WithinAbs(1.5, 1e-12));
  }
}

TEST_CASE("cosamp") {
  SECTION("zero samples converge immediately to the zero code") {
    const auto p = cycle_problem(8, 4, 2, 0.5);
    const MeasurementOperator op = build_measurement(p.dict, full_plan(8, 2));
    RecoveryConfig config;
    config.sparsity = 2;
    const RecoveryResult res =
        cosamp(op, Eigen::VectorXd::Zero(op.rows()), config);
    REQUIRE(res.iterations == 1);
    REQUIRE(res.converged);
    REQUIRE(res.code.coeffs.cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("full sampling of a single mode is recovered in one pass") {
    const SpectralBasis basis =
        eigendecompose(build_laplacian(Graph(2, {{0, 1, 1.0}})));
    const DiffusionFilter filter = DiffusionFilter::heat(std::log(2.0) / 2.0);
    const auto dict = build_dictionary(basis, filter, 2, TimeGrid::regular(2));
    const MeasurementOperator op = build_measurement(dict, full_plan(2, 2));
    const Eigen::VectorXd x = basis.vectors.col(1);
    const auto [y, y_tilde] =
        apply_sampling(embed(x, basis, filter, dict.grid), full_plan(2, 2));
    RecoveryConfig config;
    config.sparsity = 1;
    const RecoveryResult res = cosamp(op, y_tilde, config);
    REQUIRE(res.converged);
    REQUIRE(res.residuals.back() <= 1e-10);
    REQUIRE_THAT(res.code.coeffs(1),
                 Catch::Matchers::WithinAbs(dict.fvals(1), 1e-12));
    REQUIRE(res.code.coeffs(0) == 0.0);
  }

  SECTION("well-conditioned random operators recover exactly") {
    Rng rng(21);
    const int k = 32, m = 64, s = 3;
    Eigen::MatrixXd phi(m, k);
    for (Eigen::Index r = 0; r < m; ++r)
      for (Eigen::Index c = 0; c < k; ++c)
        phi(r, c) = rng.normal() / std::sqrt(static_cast<double>(m));
    MeasurementOperator op;
    op.phi = phi;
    Eigen::VectorXd truth = Eigen::VectorXd::Zero(k);
    truth(3) = 1.2;
    truth(17) = -0.7;
    truth(29) = 0.4;
    RecoveryConfig config;
    config.sparsity = s;
    const RecoveryResult res = cosamp(op, phi * truth, config);
    REQUIRE((res.code.coeffs - truth).cwiseAbs().maxCoeff() <= 1e-8);
    const Eigen::VectorXd direct =
        support_least_squares(phi, phi * truth, {3, 17, 29});
    REQUIRE((res.code.coeffs - direct).cwiseAbs().maxCoeff() <= 1e-8);
  }

  SECTION("output never exceeds the sparsity budget") {
    Rng rng(31);
    const auto p = cycle_problem(16, 8, 3, 0.8);
    const auto [dist, prof] = optimal_distribution(p.dict);
    for (int trial = 0; trial < 10; ++trial) {
      const SamplingPlan plan = draw_samples(
          dist, allocate_budget(prof, 24), mix_seed(31, "sparsity", trial));
      const MeasurementOperator op = build_measurement(p.dict, plan);
      Eigen::VectorXd y(op.rows());
      for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = rng.normal();
      RecoveryConfig config;
      config.sparsity = 3;
      const RecoveryResult res = cosamp(op, y, config);
      REQUIRE(static_cast<int>(res.code.support.size()) <= 3);
    }
  }

  SECTION("matches exhaustive search on small well-conditioned instances") {
    Rng rng(77);
    const auto p = cycle_problem(24, 10, 3, 0.6);
    const auto [dist, prof] = optimal_distribution(p.dict);
    int checked = 0;
    for (int trial = 0; trial < 12; ++trial) {
      const SamplingPlan plan = draw_samples(
          dist, allocate_budget(prof, 120), mix_seed(77, "oracle", trial));
      const MeasurementOperator op = build_measurement(p.dict, plan);
      const RipEstimate rip = estimate_rip(op, std::min(8, op.k()));
      if (rip.delta >= 0.4) continue;  // oracle needs a well-conditioned op
      ++checked;
      const auto [x, code] = random_sparse_signal(p.basis, 10, 2, rng);
      const auto [y, y_tilde] = apply_sampling(
          embed(x, p.basis, p.filter, p.dict.grid), plan);
      RecoveryConfig config;
      config.sparsity = 2;
      const RecoveryResult res = cosamp(op, y_tilde, config);
      const Eigen::VectorXd oracle = exhaustive_sparse_fit(op.phi, y_tilde, 2);
      REQUIRE((res.code.coeffs - oracle).cwiseAbs().maxCoeff() <= 1e-8);
    }
    REQUIRE(checked >= 6);
  }
}

TEST_CASE("end-to-end recovery") {
  const auto p = cycle_problem(32, 12, 4, 0.5);
  const auto [dist, prof] = optimal_distribution(p.dict);

  SECTION("noiseless sparse signals recover within 1 percent") {
    Rng rng(15);
    for (int trial = 0; trial < 20; ++trial) {
      const auto [x, code] = random_sparse_signal(p.basis, 12, 3, rng);
      const SamplingPlan plan = draw_samples(
          dist, allocate_budget(prof, 80), mix_seed(15, "e2e", trial));
      const auto [y, y_tilde] = apply_sampling(
          embed(x, p.basis, p.filter, p.dict.grid), plan);
      RecoveryConfig config;
      config.sparsity = 3;
      const RecoveryResult res =
          recover_signal(y_tilde, true, plan, p.dict, p.basis, config);
      REQUIRE(relative_error(x, res.x_hat) <= 0.01);
    }
  }

  SECTION("raw and reweighted inputs agree") {
    Rng rng(16);
    const auto [x, code] = random_sparse_signal(p.basis, 12, 2, rng);
    const SamplingPlan plan =
        draw_samples(dist, allocate_budget(prof, 60), 1234);
    const auto [y, y_tilde] =
        apply_sampling(embed(x, p.basis, p.filter, p.dict.grid), plan);
    RecoveryConfig config;
    config.sparsity = 2;
    const RecoveryResult a =
        recover_signal(y, false, plan, p.dict, p.basis, config);
    const RecoveryResult b =
        recover_signal(y_tilde, true, plan, p.dict, p.basis, config);
    REQUIRE((a.x_hat - b.x_hat).cwiseAbs().maxCoeff() <= 1e-12);
  }

  SECTION("zero samples give the zero signal") {
    const SamplingPlan plan =
        draw_samples(dist, allocate_budget(prof, 40), 77);
    RecoveryConfig config;
    config.sparsity = 2;
    const RecoveryResult res = recover_signal(
        Eigen::VectorXd::Zero(plan.total()), true, plan, p.dict, p.basis,
        config);
    REQUIRE(res.x_hat.cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("sparsity below the truth yields the best s-term approximation") {
    // two well-separated coefficients; asking for one keeps the larger
    const auto [x, code] =
        synth_signal(p.basis, 12, {2, 7}, {2.0, 0.3}, false);
    const MeasurementOperator op =
        build_measurement(p.dict, full_plan(32, 4));
    const auto [y, y_tilde] = apply_sampling(
        embed(x, p.basis, p.filter, p.dict.grid), full_plan(32, 4));
    RecoveryConfig config;
    config.sparsity = 1;
    const RecoveryResult res = cosamp(op, y_tilde, config);
    REQUIRE(res.code.support == std::vector<int>{2});
    REQUIRE(res.residuals.back() > 1e-6);
    // the surviving coefficient matches the dictionary-domain truth
    REQUIRE_THAT(res.code.coeffs(2),
                 Catch::Matchers::WithinAbs(2.0 * p.dict.fvals(2), 1e-8));
  }

  SECTION("recovery error tracks the noise level downward") {
    const MeasurementOperator op =
        build_measurement(p.dict, full_plan(32, 4));
    Rng rng(18);
    const auto [x, code] = random_sparse_signal(p.basis, 12, 2, rng);
    const Eigen::VectorXd clean =
        op.phi * (p.dict.fvals.asDiagonal() * code.coeffs);
    Eigen::VectorXd direction(op.rows());
    for (Eigen::Index i = 0; i < direction.size(); ++i)
      direction(i) = rng.normal();
    direction /= direction.norm();
    double previous = std::numeric_limits<double>::infinity();
    for (double level : {1e-2, 1e-4, 1e-6, 1e-8}) {
      RecoveryConfig config;
      config.sparsity = 2;
      const RecoveryResult res = cosamp(op, clean + level * direction, config);
      const double err = (res.code.coeffs -
                          p.dict.fvals.asDiagonal() * code.coeffs)
                             .norm();
      REQUIRE(err <= 10.0 * level);
      REQUIRE(err <= previous + 1e-12);
      previous = err;
    }
  }
}

TEST_CASE("error metrics") {
  SECTION("relative error basics") {
    REQUIRE(relative_error(vec({3, 4}), vec({3, 4})) == 0.0);
    REQUIRE(relative_error(vec({3, 4}), vec({0, 0})) == 1.0);
    REQUIRE_THAT(relative_error(vec({3, 4}), vec({0, 4})),
                 Catch::Matchers::WithinAbs(0.6, 1e-15));
    REQUIRE_THROWS_AS(relative_error(vec({0, 0}), vec({1, 1})), Error);
  }

  SECTION("error ratio basics") {
    REQUIRE(error_ratio(vec({1, 0}), vec({1, 0}), 0.5) == 0.0);
    REQUIRE_THAT(error_ratio(vec({1, 0}), vec({0, 0}), 1.0),
                 Catch::Matchers::WithinAbs(1.0, 1e-15));
    REQUIRE_THAT(error_ratio(vec({1, 0}), vec({0.95, 0}), 0.1),
                 Catch::Matchers::WithinAbs(0.5, 1e-12));
    REQUIRE_THROWS_AS(error_ratio(vec({1, 0}), vec({0, 0}), 0.0), Error);
  }
}
