#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dynsamp/graph.hpp"
#include "dynsamp/harness.hpp"

using namespace dynsamp;

namespace {

PhaseGridSpec small_cycle_spec() {
  PhaseGridSpec spec;
  spec.graph = GraphSpec::cycle(32);
  spec.filter = FilterSpec::heat(0.5);
  spec.k = 12;
  spec.steps = 4;
  spec.trials = 20;
  spec.master_seed = 99;
  return spec;
}

}  // namespace

TEST_CASE("isotonic regression pools violators") {
  const std::vector<double> fit =
      isotonic_nondecreasing({0.1, 0.5, 0.3, 0.9});
  REQUIRE(fit.size() == 4);
  for (std::size_t i = 1; i < fit.size(); ++i) REQUIRE(fit[i] >= fit[i - 1]);
  REQUIRE_THAT(fit[1], Catch::Matchers::WithinAbs(0.4, 1e-12));
  REQUIRE_THAT(fit[2], Catch::Matchers::WithinAbs(0.4, 1e-12));

  const std::vector<double> sorted = isotonic_nondecreasing({1, 2, 3});
  REQUIRE(sorted == std::vector<double>{1, 2, 3});
}

TEST_CASE("trimmed mean drops the tails") {
  std::vector<double> values;
  for (int i = 1; i <= 10; ++i) values.push_back(i);
  values[9] = 1000.0;  // the outlier sits in the dropped upper tail
  const double mean = trimmed_mean(values, 0.8);
  REQUIRE_THAT(mean, Catch::Matchers::WithinAbs(5.5, 1e-12));
  REQUIRE_THAT(trimmed_mean({2.0, 2.0, 2.0}, 1.0),
               Catch::Matchers::WithinAbs(2.0, 1e-12));
}

TEST_CASE("line fit recovers slope and intercept") {
  const LineFit fit = least_squares_line({1, 2, 3, 4}, {3, 5, 7, 9});
  REQUIRE_THAT(fit.slope, Catch::Matchers::WithinAbs(2.0, 1e-12));
  REQUIRE_THAT(fit.intercept, Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("coherence heatmap") {
  const SpectralBasis basis = eigendecompose(build_laplacian(gen_cycle(24)));
  const DiffusionFilter filter = DiffusionFilter::heat(0.5);

  SECTION("single-step column equals the static coherence") {
    const CoherenceHeatmap map = coherence_heatmap(
        basis, filter, {6}, {1}, DistributionChoice::uniform);
    // T = 1: f = 1 and the dictionary is U_k itself
    const auto dict =
        build_dictionary(basis, filter, 6, TimeGrid::regular(1));
    const CoherenceProfile direct =
        coherence(dict, uniform_distribution(24, 1));
    REQUIRE_THAT(map.at(0, 0),
                 Catch::Matchers::WithinAbs(direct.nu_sq_sum(), 1e-12));
  }

  SECTION("2-path testbed optimal sum") {
    const SpectralBasis path =
        eigendecompose(build_laplacian(Graph(2, {{0, 1, 1.0}})));
    const CoherenceHeatmap map = coherence_heatmap(
        path, DiffusionFilter::heat(std::log(2.0) / 2.0), {2}, {2},
        DistributionChoice::optimal);
    REQUIRE_THAT(map.at(0, 0), Catch::Matchers::WithinAbs(1.3, 1e-12));
  }

  SECTION("optimal never exceeds uniform across the grid") {
    const CoherenceHeatmap opt = coherence_heatmap(
        basis, filter, {4, 8}, {2, 4, 8}, DistributionChoice::optimal);
    const CoherenceHeatmap unif = coherence_heatmap(
        basis, filter, {4, 8}, {2, 4, 8}, DistributionChoice::uniform);
    for (std::size_t ki = 0; ki < 2; ++ki)
      for (std::size_t ti = 0; ti < 3; ++ti)
        REQUIRE(opt.at(ki, ti) <= unif.at(ki, ti) + 1e-12);
  }

  SECTION("profile covers the largest configuration") {
    const CoherenceHeatmap map = coherence_heatmap(
        basis, filter, {4, 8}, {2, 4}, DistributionChoice::optimal);
    REQUIRE(map.profile_nu_sq.size() == 4);
    const std::string csv = map.grid_csv();
    REQUIRE(csv.rfind("k,T,nu_sq_sum\n", 0) == 0);
  }
}

TEST_CASE("phase transition grid") {
  SECTION("ample budgets succeed, starved budgets fail") {
    PhaseGridSpec spec = small_cycle_spec();
    spec.s_values = {1, 2};
    spec.m_values = {2, 600};  // m = 50 k on the generous side
    spec.trials = 10;
    const PhaseGridResult result = phase_transition(spec);
    REQUIRE(result.rate(0, 1) == 1.0);
    REQUIRE(result.rate(1, 1) == 1.0);
    REQUIRE(result.rate(1, 0) <= 0.2);  // m = s = 2 is information-starved
    for (double r : result.success_rate) {
      REQUIRE(r >= 0.0);
      REQUIRE(r <= 1.0);
    }
  }

  SECTION("success is monotone in m up to binomial noise") {
    PhaseGridSpec spec = small_cycle_spec();
    spec.s_values = {2};
    spec.m_values = {4, 8, 12, 16, 24, 32, 48, 64};
    spec.trials = 40;
    const PhaseGridResult result = phase_transition(spec);
    std::vector<double> rates;
    for (std::size_t mi = 0; mi < spec.m_values.size(); ++mi)
      rates.push_back(result.rate(0, mi));
    const auto iso = isotonic_nondecreasing(rates);
    int severe = 0;
    for (std::size_t i = 0; i < rates.size(); ++i)
      if (std::abs(rates[i] - iso[i]) > 0.15) ++severe;
    REQUIRE(severe == 0);
  }

  SECTION("grids are deterministic and independent of thread count") {
    PhaseGridSpec spec = small_cycle_spec();
    spec.s_values = {1, 3};
    spec.m_values = {8, 32};
    spec.trials = 15;
    spec.threads = 1;
    const std::string serial = phase_transition(spec).grid_csv();
    spec.threads = 4;
    const std::string parallel = phase_transition(spec).grid_csv();
    REQUIRE(serial == parallel);
  }

  SECTION("contour extraction") {
    PhaseGridResult result;
    result.s_values = {1, 2, 3};
    result.m_values = {10, 20, 30};
    result.trial_counts.assign(9, 50);
    result.success_rate = {0.2, 0.8, 1.0,   // s=1
                           0.0, 0.6, 1.0,   // s=2
                           0.0, 0.1, 0.4};  // s=3
    REQUIRE(result.m_star(0, 0.5).value() == 20);
    REQUIRE(result.m_star(1, 0.5).value() == 20);
    REQUIRE_FALSE(result.m_star(2, 0.5).has_value());
    REQUIRE(result.contour_violation_fraction(0.5) == 0.0);
  }
}

TEST_CASE("noisy sweep") {
  NoisySweepSpec spec;
  spec.grid = small_cycle_spec();
  spec.grid.s_values = {1, 2};
  spec.grid.m_values = {200};
  spec.grid.trials = 20;

  SECTION("vanishing noise recovers almost exactly") {
    spec.sigma = 1e-12;
    const NoisySweepResult result = noisy_sweep(spec);
    for (double rel : result.relative_error_trimmed) REQUIRE(rel <= 1e-6);
  }

  SECTION("error ratios are finite and reported per cell") {
    spec.sigma = 1e-3;
    const NoisySweepResult result = noisy_sweep(spec);
    REQUIRE(result.error_ratio_trimmed.size() == 2);
    for (double ratio : result.error_ratio_trimmed) {
      REQUIRE(std::isfinite(ratio));
      REQUIRE(ratio >= 0.0);
    }
    for (double nn : result.mean_noise_norm) REQUIRE(nn > 0.0);
    const std::string csv = result.grid_csv();
    REQUIRE(csv.rfind("s,m,error_ratio_trimmed", 0) == 0);
  }

  SECTION("past the knee, doubling the budget changes little") {
    spec.sigma = 1e-3;
    spec.grid.s_values = {2};
    spec.grid.m_values = {160, 320};
    spec.grid.trials = 30;
    const NoisySweepResult result = noisy_sweep(spec);
    const double at_m0 = result.relative_error_trimmed[0];
    const double at_2m0 = result.relative_error_trimmed[1];
    REQUIRE(at_2m0 <= 2.0 * at_m0);
    REQUIRE(at_2m0 >= at_m0 / 2.0);
  }
}

TEST_CASE("restricted isometry estimation") {
  const SpectralBasis basis = eigendecompose(build_laplacian(gen_cycle(32)));
  const auto dict = build_dictionary(basis, DiffusionFilter::heat(0.5), 10,
                                     TimeGrid::regular(2));

  SECTION("orthonormal operators have zero constants") {
    const MeasurementOperator op = build_measurement(dict, full_plan(32, 2));
    for (int s : {1, 2, 3})
      REQUIRE(estimate_rip(op, s).delta <= 1e-10);
  }

  SECTION("delta_1 equals the worst column norm deviation") {
    const auto [dist, prof] = optimal_distribution(dict);
    const SamplingPlan plan =
        draw_samples(dist, allocate_budget(prof, 60), 5);
    const MeasurementOperator op = build_measurement(dict, plan);
    double worst = 0.0;
    for (int j = 0; j < op.k(); ++j)
      worst = std::max(worst,
                       std::abs(op.phi.col(j).squaredNorm() - 1.0));
    REQUIRE_THAT(estimate_rip(op, 1).delta,
                 Catch::Matchers::WithinAbs(worst, 1e-12));
  }

  SECTION("constants are monotone in the order") {
    const auto [dist, prof] = optimal_distribution(dict);
    const SamplingPlan plan =
        draw_samples(dist, allocate_budget(prof, 80), 6);
    const MeasurementOperator op = build_measurement(dict, plan);
    const double d1 = estimate_rip(op, 1).delta;
    const double d2 = estimate_rip(op, 2).delta;
    const double d3 = estimate_rip(op, 3).delta;
    REQUIRE(d1 <= d2);
    REQUIRE(d2 <= d3);
  }

  SECTION("more samples shrink the median constant") {
    const auto [dist, prof] = optimal_distribution(dict);
    auto median_delta = [&](int m) {
      std::vector<double> deltas;
      for (int trial = 0; trial < 20; ++trial) {
        const SamplingPlan plan = draw_samples(
            dist, allocate_budget(prof, m), mix_seed(42, "rip-median", trial));
        deltas.push_back(
            estimate_rip(build_measurement(dict, plan), 2).delta);
      }
      std::sort(deltas.begin(), deltas.end());
      return 0.5 * (deltas[9] + deltas[10]);
    };
    REQUIRE(median_delta(500) < median_delta(50));
  }

  SECTION("combinatorial budget is enforced") {
    const MeasurementOperator op = build_measurement(dict, full_plan(32, 2));
    REQUIRE_THROWS_AS(estimate_rip(op, 5, 100), Error);
  }
}

TEST_CASE("gram identity statistics") {
  const SpectralBasis basis = eigendecompose(build_laplacian(gen_cycle(16)));
  const auto dict = build_dictionary(basis, DiffusionFilter::heat(0.5), 6,
                                     TimeGrid::regular(2));
  const auto [dist, prof] = optimal_distribution(dict);

  SECTION("deviation of the mean shrinks with more draws") {
    const GramStats few = gram_identity_check(dict, dist, 200, 10, 31);
    const GramStats many = gram_identity_check(dict, dist, 200, 160, 31);
    REQUIRE(many.mean_gram_deviation < few.mean_gram_deviation + 0.05);
    REQUIRE(many.mean_gram_deviation <= 0.2);
    REQUIRE(few.max_single_deviation >= few.mean_single_deviation);
  }

  SECTION("csv round of the stats") {
    const GramStats stats = gram_identity_check(dict, dist, 50, 5, 3);
    const std::string csv = stats.csv();
    REQUIRE(csv.rfind("mean_gram_deviation", 0) == 0);
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 2);
  }
}

TEST_CASE("bound report") {
  const SpectralBasis basis = eigendecompose(build_laplacian(gen_cycle(16)));
  const auto dict = build_dictionary(basis, DiffusionFilter::heat(0.5), 8,
                                     TimeGrid::regular(4));
  const auto [dist, prof] = optimal_distribution(dict);

  SECTION("rows cover every step with proportional shares") {
    const BoundReport report =
        bound_report(prof, 4, 8, 16, 0.5, 1.0, 0.01, 0.5, 0.5);
    REQUIRE(report.rows.size() == 4);
    double share_sum = 0.0;
    for (const auto& row : report.rows) {
      REQUIRE(row.bound_main >= 0);
      REQUIRE(row.bound_prob >= 1);
      REQUIRE(row.bound_expect >= 1);
      share_sum += row.share;
    }
    REQUIRE_THAT(share_sum, Catch::Matchers::WithinAbs(1.0, 1e-12));
  }

  SECTION("headline bound scales like s log^2 s") {
    const double nu_sq = 0.7;
    const long at_s = rip_sample_bound(nu_sq, 4, 32, 64, 4, 0.3, 1.0);
    const long at_2s = rip_sample_bound(nu_sq, 8, 32, 64, 4, 0.3, 1.0);
    const double predicted = 2.0 * std::pow(std::log(8.0) / std::log(4.0), 2);
    const double observed = static_cast<double>(at_2s) / at_s;
    REQUIRE_THAT(observed, Catch::Matchers::WithinAbs(predicted, 0.02));
  }

  SECTION("appendix probability bound example sits in the table") {
    CoherenceProfile flat;
    flat.nu = Eigen::VectorXd::Constant(1, std::sqrt(3.0 / 32.0));
    const BoundReport report = bound_report(flat, 1, 16, 8, 0.5, 1.0,
                                            std::exp(-1.0), 0.5, 1.0);
    REQUIRE(report.rows[0].bound_prob == 1);
    REQUIRE(report.rows[0].bound_main == 0);  // log^2(s) vanishes at s = 1
  }

  SECTION("doubling T only moves the log(nT) factor") {
    const double nu_sq = 0.4;
    const long base = rip_sample_bound(nu_sq, 4, 16, 32, 4, 0.4, 1.0);
    const long doubled = rip_sample_bound(nu_sq, 4, 16, 32, 8, 0.4, 1.0);
    const double predicted = std::log(32.0 * 8) / std::log(32.0 * 4);
    REQUIRE_THAT(static_cast<double>(doubled) / base,
                 Catch::Matchers::WithinAbs(predicted, 0.02));
  }
}

TEST_CASE("filter spec parsing") {
  REQUIRE(parse_filter_spec("heat-fast", 1.0).dt == 4.0);
  REQUIRE(parse_filter_spec("heat-slow", 1.0).dt == 0.5);
  REQUIRE(parse_filter_spec("heat", 2.5).dt == 2.5);
  REQUIRE_THROWS_AS(parse_filter_spec("wave", 1.0), Error);
}
