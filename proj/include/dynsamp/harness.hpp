#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dynsamp/error.hpp"
#include "dynsamp/graph.hpp"
#include "dynsamp/io.hpp"
#include "dynsamp/recovery.hpp"
#include "dynsamp/rng.hpp"
#include "dynsamp/sampling.hpp"
#include "dynsamp/spectral.hpp"

namespace dynsamp {

// Set by the CLI's interrupt handler; experiment loops stop between cells
// and flush what they have with a truncation marker.
inline std::atomic<bool> g_interrupted{false};

enum class DistributionChoice { uniform, optimal };

inline const char* to_string(DistributionChoice c) {
  return c == DistributionChoice::uniform ? "uniform" : "optimal";
}

struct GraphSpec {
  enum class Kind { cycle, community, file };
  Kind kind = Kind::cycle;
  int n = 0;                      // cycle
  std::vector<int> sizes;         // community
  double p_in = 0.0, p_out = 0.0; // community
  std::string path;               // file

  static GraphSpec cycle(int n) {
    GraphSpec g;
    g.kind = Kind::cycle;
    g.n = n;
    return g;
  }
  static GraphSpec community(std::vector<int> sizes, double p_in,
                             double p_out) {
    GraphSpec g;
    g.kind = Kind::community;
    g.sizes = std::move(sizes);
    g.p_in = p_in;
    g.p_out = p_out;
    return g;
  }
  static GraphSpec file(std::string path) {
    GraphSpec g;
    g.kind = Kind::file;
    g.path = std::move(path);
    return g;
  }
};

inline Graph make_graph(const GraphSpec& spec, std::uint64_t master_seed) {
  switch (spec.kind) {
    case GraphSpec::Kind::cycle:
      return gen_cycle(spec.n);
    case GraphSpec::Kind::community:
      return gen_community(spec.sizes, spec.p_in, spec.p_out,
                           mix_seed(master_seed, "graph-gen"));
    case GraphSpec::Kind::file:
      return load_graph(spec.path);
  }
  throw_invalid("unknown graph spec");
}

// Named heat presets: "heat-fast" (dt=4) and "heat-slow" (dt=0.5) bracket
// fast and slow diffusion regimes on unit-weight graphs.
struct FilterSpec {
  std::string name = "heat";
  double dt = 1.0;

  static FilterSpec heat(double dt) { return {"heat", dt}; }
};

inline FilterSpec parse_filter_spec(const std::string& name, double dt) {
  if (name == "heat") return FilterSpec::heat(dt);
  if (name == "heat-fast") return FilterSpec::heat(4.0);
  if (name == "heat-slow") return FilterSpec::heat(0.5);
  throw_invalid("unknown filter \"" + name + "\"");
}

inline DiffusionFilter make_filter(const FilterSpec& spec) {
  if (spec.name != "heat") throw_invalid("unknown filter \"" + spec.name + "\"");
  return DiffusionFilter::heat(spec.dt);
}

namespace detail {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 8u));
}

// Index-pulling parallel loop. Work items are pure functions of their index,
// so the result is identical for any thread count.
inline void parallel_for(std::size_t count, int threads,
                         const std::function<void(std::size_t)>& body) {
  threads = resolve_threads(threads);
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

inline double spectral_norm_symmetric(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m,
                                                        Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

}  // namespace detail

/// Pool-adjacent-violators fit: closest nondecreasing sequence in least
/// squares.
inline std::vector<double> isotonic_nondecreasing(std::vector<double> v) {
  const std::size_t n = v.size();
  std::vector<double> level;
  std::vector<double> weight;
  for (std::size_t i = 0; i < n; ++i) {
    level.push_back(v[i]);
    weight.push_back(1.0);
    while (level.size() > 1 && level[level.size() - 2] > level.back()) {
      const double w = weight.back() + weight[weight.size() - 2];
      const double merged = (level.back() * weight.back() +
                             level[level.size() - 2] * weight[weight.size() - 2]) /
                            w;
      level.pop_back();
      weight.pop_back();
      level.back() = merged;
      weight.back() = w;
    }
  }
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t b = 0; b < level.size(); ++b)
    for (int r = 0; r < static_cast<int>(weight[b] + 0.5); ++r)
      out.push_back(level[b]);
  return out;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

inline LineFit least_squares_line(const std::vector<double>& xs,
                                  const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw_invalid("line fit needs >= 2 points");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw_invalid("degenerate abscissae in line fit");
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

// ---------------------------------------------------------------------------
// Coherence heatmaps
// ---------------------------------------------------------------------------

struct CoherenceHeatmap {
  std::vector<int> k_values;
  std::vector<int> t_values;
  // row-major over (k, T): sum over t of nu^2
  std::vector<double> nu_sq_sum;
  // per-step profile for the largest (k, T) pair
  std::vector<double> profile_nu_sq;

  double at(std::size_t ki, std::size_t ti) const {
    return nu_sq_sum[ki * t_values.size() + ti];
  }

  std::string grid_csv() const {
    std::string out = "k,T,nu_sq_sum\n";
    for (std::size_t ki = 0; ki < k_values.size(); ++ki)
      for (std::size_t ti = 0; ti < t_values.size(); ++ti)
        out += std::to_string(k_values[ki]) + "," +
               std::to_string(t_values[ti]) + "," +
               format_double(at(ki, ti)) + "\n";
    return out;
  }

  std::string profile_csv() const {
    std::string out = "t,nu_sq\n";
    for (std::size_t t = 0; t < profile_nu_sq.size(); ++t)
      out += std::to_string(t) + "," + format_double(profile_nu_sq[t]) + "\n";
    return out;
  }
};

inline CoherenceHeatmap coherence_heatmap(const SpectralBasis& basis,
                                          const DiffusionFilter& filter,
                                          std::vector<int> k_values,
                                          std::vector<int> t_values,
                                          DistributionChoice choice) {
  if (k_values.empty() || t_values.empty())
    throw_invalid("heatmap needs nonempty k and T lists");
  for (int k : k_values)
    if (k < 1 || k > basis.n()) throw_invalid("heatmap k out of [1, n]");
  for (int t : t_values)
    if (t < 1) throw_invalid("heatmap T must be >= 1");

  CoherenceHeatmap map;
  map.k_values = std::move(k_values);
  map.t_values = std::move(t_values);
  map.nu_sq_sum.resize(map.k_values.size() * map.t_values.size());

  for (std::size_t ki = 0; ki < map.k_values.size(); ++ki) {
    for (std::size_t ti = 0; ti < map.t_values.size(); ++ti) {
      const auto dict = build_dictionary(basis, filter, map.k_values[ki],
                                         TimeGrid::regular(map.t_values[ti]));
      CoherenceProfile prof;
      if (choice == DistributionChoice::optimal) {
        prof = optimal_distribution(dict).second;
      } else {
        prof = coherence(dict, uniform_distribution(dict.n(), dict.steps()));
      }
      map.nu_sq_sum[ki * map.t_values.size() + ti] = prof.nu_sq_sum();
      const bool largest = ki + 1 == map.k_values.size() &&
                           ti + 1 == map.t_values.size();
      if (largest) {
        map.profile_nu_sq.resize(prof.steps());
        for (int t = 0; t < prof.steps(); ++t)
          map.profile_nu_sq[t] = prof.nu_sq(t);
      }
    }
  }
  return map;
}

// ---------------------------------------------------------------------------
// Recovery experiment grids
// ---------------------------------------------------------------------------

struct PhaseGridSpec {
  GraphSpec graph;
  FilterSpec filter;
  int k = 64;
  int steps = 8;  // T, regular unit grid
  std::vector<int> s_values;
  std::vector<int> m_values;
  int trials = 100;
  DistributionChoice distribution = DistributionChoice::optimal;
  double success_threshold = 0.01;
  std::uint64_t master_seed = 0;
  int threads = 0;  // 0 = auto; scheduling only, never results

  void validate(int n) const {
    if (k < 1 || k > n) throw_invalid("k must be in [1, n]");
    if (steps < 1) throw_invalid("T must be >= 1");
    if (s_values.empty() || m_values.empty())
      throw_invalid("s and m lists must be nonempty");
    for (std::size_t i = 1; i < s_values.size(); ++i)
      if (s_values[i] <= s_values[i - 1])
        throw_invalid("s values must be ascending");
    for (std::size_t i = 1; i < m_values.size(); ++i)
      if (m_values[i] <= m_values[i - 1])
        throw_invalid("m values must be ascending");
    for (int s : s_values)
      if (s < 1 || s > k) throw_invalid("s values must be in [1, k]");
    for (int m : m_values)
      if (m < 1) throw_invalid("m values must be >= 1");
    if (trials < 1) throw_invalid("trials must be >= 1");
    if (!(success_threshold > 0.0))
      throw_invalid("success threshold must be positive");
  }
};

struct TrialRecord {
  double relative_error = 0.0;
  double noise_norm = 0.0;  // ||Psi e||_2 for this trial
  bool success = false;
};

struct PhaseGridResult {
  std::vector<int> s_values;
  std::vector<int> m_values;
  std::vector<double> success_rate;  // row-major over (s, m)
  std::vector<int> trial_counts;
  bool truncated = false;

  double rate(std::size_t si, std::size_t mi) const {
    return success_rate[si * m_values.size() + mi];
  }

  std::string grid_csv() const {
    std::string out = "s,m,success_rate,trials\n";
    for (std::size_t si = 0; si < s_values.size(); ++si)
      for (std::size_t mi = 0; mi < m_values.size(); ++mi) {
        const std::size_t cell = si * m_values.size() + mi;
        out += std::to_string(s_values[si]) + "," +
               std::to_string(m_values[mi]) + "," +
               format_double(success_rate[cell]) + "," +
               std::to_string(trial_counts[cell]) + "\n";
      }
    if (truncated) out += "# truncated\n";
    return out;
  }

  /// Smallest tested m whose isotonic-smoothed success rate reaches `level`.
  std::optional<int> m_star(std::size_t si, double level) const {
    std::vector<double> rates(m_values.size());
    for (std::size_t mi = 0; mi < m_values.size(); ++mi)
      rates[mi] = rate(si, mi);
    const auto iso = isotonic_nondecreasing(std::move(rates));
    for (std::size_t mi = 0; mi < m_values.size(); ++mi)
      if (iso[mi] >= level) return m_values[mi];
    return std::nullopt;
  }

  std::vector<std::optional<int>> contour(double level) const {
    std::vector<std::optional<int>> out;
    for (std::size_t si = 0; si < s_values.size(); ++si)
      out.push_back(m_star(si, level));
    return out;
  }

  /// Fraction of adjacent s pairs where the contour decreases.
  double contour_violation_fraction(double level) const {
    const auto c = contour(level);
    int pairs = 0, violations = 0;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
      if (!c[i] || !c[i + 1]) continue;
      ++pairs;
      if (*c[i + 1] < *c[i]) ++violations;
    }
    return pairs == 0 ? 0.0 : static_cast<double>(violations) / pairs;
  }

  std::optional<LineFit> contour_fit(double level) const {
    const auto c = contour(level);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c[i]) {
        xs.push_back(s_values[i]);
        ys.push_back(*c[i]);
      }
    if (xs.size() < 2) return std::nullopt;
    return least_squares_line(xs, ys);
  }
};

namespace detail {

struct ExperimentContext {
  SpectralBasis basis;
  DiffusionFilter filter = DiffusionFilter::heat(0.0);
  SpaceTimeDictionary dict;
  SamplingDistribution dist;
  CoherenceProfile profile;
};

inline ExperimentContext make_context(const GraphSpec& gspec,
                                      const FilterSpec& fspec, int k,
                                      int steps, DistributionChoice choice,
                                      std::uint64_t master_seed) {
  ExperimentContext ctx;
  const Graph graph = make_graph(gspec, master_seed);
  ctx.filter = make_filter(fspec);
  ctx.basis = eigendecompose(build_laplacian(graph));
  ctx.dict =
      build_dictionary(ctx.basis, ctx.filter, k, TimeGrid::regular(steps));
  if (choice == DistributionChoice::optimal) {
    auto opt = optimal_distribution(ctx.dict);
    ctx.dist = std::move(opt.first);
    ctx.profile = std::move(opt.second);
  } else {
    ctx.dist = uniform_distribution(ctx.dict.n(), steps);
    ctx.profile = coherence(ctx.dict, ctx.dist);
  }
  return ctx;
}

// One synth -> embed -> sample -> recover trial. Everything is derived from
// (master_seed, tag, cell, trial), so trials can run in any order.
inline TrialRecord run_trial(const ExperimentContext& ctx,
                             const std::vector<int>& budgets, int s,
                             double sigma, double threshold,
                             std::uint64_t master_seed, const char* tag,
                             std::uint64_t cell, std::uint64_t trial) {
  const int n = ctx.basis.n();
  const int steps = ctx.dict.steps();

  Rng signal_rng(mix_seed(master_seed, std::string(tag) + "-signal", cell,
                          trial));
  const auto [x, code] = random_sparse_signal(ctx.basis, ctx.dict.k, s,
                                              signal_rng);

  Eigen::VectorXd spacetime = embed(x, ctx.basis, ctx.filter, ctx.dict.grid);
  Eigen::VectorXd noise = Eigen::VectorXd::Zero(spacetime.size());
  if (sigma > 0.0) {
    Rng noise_rng(mix_seed(master_seed, std::string(tag) + "-noise", cell,
                           trial));
    for (Eigen::Index i = 0; i < noise.size(); ++i)
      noise(i) = noise_rng.uniform(-sigma, sigma);
    spacetime += noise;
  }

  const SamplingPlan plan = draw_samples(
      ctx.dist, budgets,
      mix_seed(master_seed, std::string(tag) + "-plan", cell, trial));
  const auto [y, y_tilde] = apply_sampling(spacetime, plan);

  TrialRecord rec;
  if (sigma > 0.0) {
    const auto [ey, ey_tilde] = apply_sampling(noise, plan);
    rec.noise_norm = ey_tilde.norm();
  }

  RecoveryConfig config;
  config.sparsity = s;
  const RecoveryResult res =
      recover_signal(y_tilde, true, plan, ctx.dict, ctx.basis, config);
  rec.relative_error = relative_error(x, res.x_hat);
  rec.success = rec.relative_error <= threshold;
  (void)steps;
  (void)n;
  return rec;
}

}  // namespace detail

/// Per-cell trial records for a (s, m) grid; shared by the phase and noisy
/// drivers. Cells are flattened row-major; records per cell are in trial
/// order regardless of scheduling.
inline std::vector<TrialRecord> run_grid_trials(const PhaseGridSpec& spec,
                                                double sigma, const char* tag,
                                                bool* truncated = nullptr) {
  const auto ctx = detail::make_context(spec.graph, spec.filter, spec.k,
                                        spec.steps, spec.distribution,
                                        spec.master_seed);
  spec.validate(ctx.basis.n());

  std::vector<std::vector<int>> budgets_per_m;
  budgets_per_m.reserve(spec.m_values.size());
  for (int m : spec.m_values)
    budgets_per_m.push_back(allocate_budget(ctx.profile, m));

  const std::size_t cells = spec.s_values.size() * spec.m_values.size();
  std::vector<TrialRecord> records(cells * spec.trials);
  if (truncated) *truncated = false;

  for (std::size_t cell = 0; cell < cells; ++cell) {
    if (g_interrupted.load()) {
      if (truncated) *truncated = true;
      records.resize(cell * spec.trials);
      break;
    }
    const int s = spec.s_values[cell / spec.m_values.size()];
    const auto& budgets = budgets_per_m[cell % spec.m_values.size()];
    detail::parallel_for(
        static_cast<std::size_t>(spec.trials), spec.threads,
        [&](std::size_t trial) {
          records[cell * spec.trials + trial] = detail::run_trial(
              ctx, budgets, s, sigma, spec.success_threshold, spec.master_seed,
              tag, cell, trial);
        });
  }
  return records;
}

inline PhaseGridResult phase_transition(const PhaseGridSpec& spec) {
  PhaseGridResult result;
  result.s_values = spec.s_values;
  result.m_values = spec.m_values;
  bool truncated = false;
  const auto records = run_grid_trials(spec, 0.0, "phase", &truncated);
  result.truncated = truncated;
  const std::size_t cells = records.size() / spec.trials;
  result.success_rate.resize(cells);
  result.trial_counts.assign(cells, spec.trials);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    int hits = 0;
    for (int t = 0; t < spec.trials; ++t)
      hits += records[cell * spec.trials + t].success ? 1 : 0;
    result.success_rate[cell] = static_cast<double>(hits) / spec.trials;
  }
  return result;
}

struct NoisySweepSpec {
  PhaseGridSpec grid;
  double sigma = 1e-3;
  double trim = 0.9;  // keep the middle fraction when averaging
};

struct NoisySweepResult {
  std::vector<int> s_values;
  std::vector<int> m_values;
  std::vector<double> error_ratio_trimmed;    // row-major over (s, m)
  std::vector<double> relative_error_trimmed;
  std::vector<double> mean_noise_norm;
  std::vector<int> trial_counts;
  std::vector<std::vector<TrialRecord>> records;  // per cell, trial order
  bool truncated = false;

  std::string grid_csv() const {
    std::string out =
        "s,m,error_ratio_trimmed,relative_error_trimmed,mean_noise_norm,"
        "trials\n";
    for (std::size_t si = 0; si < s_values.size(); ++si)
      for (std::size_t mi = 0; mi < m_values.size(); ++mi) {
        const std::size_t cell = si * m_values.size() + mi;
        out += std::to_string(s_values[si]) + "," +
               std::to_string(m_values[mi]) + "," +
               format_double(error_ratio_trimmed[cell]) + "," +
               format_double(relative_error_trimmed[cell]) + "," +
               format_double(mean_noise_norm[cell]) + "," +
               std::to_string(trial_counts[cell]) + "\n";
      }
    if (truncated) out += "# truncated\n";
    return out;
  }
};

/// Mean of the middle `keep` fraction (sorted); keep=0.9 averages between
/// the 5th and 95th percentiles.
inline double trimmed_mean(std::vector<double> values, double keep) {
  if (values.empty()) throw_invalid("trimmed mean of empty set");
  if (!(keep > 0.0 && keep <= 1.0)) throw_invalid("trim fraction in (0,1]");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const std::size_t drop =
      static_cast<std::size_t>(std::floor(n * (1.0 - keep) / 2.0));
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = drop; i < n - drop; ++i) {
    sum += values[i];
    ++count;
  }
  return sum / static_cast<double>(count);
}

inline NoisySweepResult noisy_sweep(const NoisySweepSpec& spec) {
  if (!(spec.sigma > 0.0)) throw_invalid("noise half-width must be positive");
  NoisySweepResult result;
  result.s_values = spec.grid.s_values;
  result.m_values = spec.grid.m_values;
  bool truncated = false;
  const auto records =
      run_grid_trials(spec.grid, spec.sigma, "noisy", &truncated);
  result.truncated = truncated;
  const std::size_t cells = records.size() / spec.grid.trials;
  result.records.resize(cells);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    std::vector<double> ratios, rels;
    double noise_sum = 0.0;
    result.records[cell].reserve(spec.grid.trials);
    for (int t = 0; t < spec.grid.trials; ++t) {
      const TrialRecord& rec = records[cell * spec.grid.trials + t];
      result.records[cell].push_back(rec);
      rels.push_back(rec.relative_error);
      // unit-norm ground truth, so the ratio is rel_err / ||Psi e||
      ratios.push_back(rec.relative_error / rec.noise_norm);
      noise_sum += rec.noise_norm;
    }
    result.error_ratio_trimmed.push_back(trimmed_mean(ratios, spec.trim));
    result.relative_error_trimmed.push_back(trimmed_mean(rels, spec.trim));
    result.mean_noise_norm.push_back(noise_sum / spec.grid.trials);
    result.trial_counts.push_back(spec.grid.trials);
  }
  return result;
}

// ---------------------------------------------------------------------------
// RIP estimation and Gram identity
// ---------------------------------------------------------------------------

struct RipEstimate {
  int s = 0;
  double delta = 0.0;
  std::vector<int> support;  // maximizing subset
};

/// Exhaustive restricted isometry constant over all s-subsets:
/// delta_s = max_S ||Phi_S^T Phi_S - I||_2. Refuses when C(k, s) exceeds
/// the enumeration budget.
inline RipEstimate estimate_rip(const MeasurementOperator& op, int s,
                                std::size_t budget = 200000) {
  const int k = op.k();
  if (s < 1 || s > k) throw_invalid("RIP order must be in [1, k]");
  double combos = 1.0;
  for (int i = 0; i < s; ++i) combos *= static_cast<double>(k - i) / (i + 1);
  if (combos > static_cast<double>(budget))
    throw_invalid("C(k, s) exceeds the enumeration budget");

  const Eigen::MatrixXd gram = op.phi.transpose() * op.phi;

  RipEstimate best;
  best.s = s;
  std::vector<int> comb(s);
  for (int i = 0; i < s; ++i) comb[i] = i;
  Eigen::MatrixXd sub(s, s);
  for (;;) {
    for (int r = 0; r < s; ++r)
      for (int c = 0; c < s; ++c)
        sub(r, c) = gram(comb[r], comb[c]) - (r == c ? 1.0 : 0.0);
    const double dev = detail::spectral_norm_symmetric(sub);
    if (dev > best.delta) {
      best.delta = dev;
      best.support = comb;
    }
    if (best.support.empty()) best.support = comb;  // delta can be 0
    int pos = s - 1;
    while (pos >= 0 && comb[pos] == k - s + pos) --pos;
    if (pos < 0) break;
    ++comb[pos];
    for (int q = pos + 1; q < s; ++q) comb[q] = comb[q - 1] + 1;
  }
  return best;
}

struct GramStats {
  double mean_gram_deviation = 0.0;  // ||mean(Phi^T Phi) - I||_2
  double mean_single_deviation = 0.0;
  double max_single_deviation = 0.0;
  int draws = 0;
  int per_step_budget = 0;

  std::string csv() const {
    return "mean_gram_deviation,mean_single_deviation,max_single_deviation,"
           "draws,per_step_budget\n" +
           format_double(mean_gram_deviation) + "," +
           format_double(mean_single_deviation) + "," +
           format_double(max_single_deviation) + "," + std::to_string(draws) +
           "," + std::to_string(per_step_budget) + "\n";
  }
};

/// Monte Carlo check of E[Phi^T Phi] = I: spectral deviation of the mean
/// Gram matrix over independently drawn plans.
inline GramStats gram_identity_check(const SpaceTimeDictionary& dict,
                                     const SamplingDistribution& dist,
                                     int per_step_budget, int draws,
                                     std::uint64_t seed) {
  if (per_step_budget < 1) throw_invalid("per-step budget must be >= 1");
  if (draws < 1) throw_invalid("need at least one draw");
  const std::vector<int> budgets(dict.steps(), per_step_budget);
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(dict.k, dict.k);
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(dict.k, dict.k);
  GramStats stats;
  stats.draws = draws;
  stats.per_step_budget = per_step_budget;
  for (int d = 0; d < draws; ++d) {
    const SamplingPlan plan =
        draw_samples(dist, budgets, mix_seed(seed, "gram-draw", d));
    const MeasurementOperator op = build_measurement(dict, plan);
    const Eigen::MatrixXd gram = op.phi.transpose() * op.phi;
    mean += gram;
    const double dev = detail::spectral_norm_symmetric(gram - identity);
    stats.mean_single_deviation += dev;
    stats.max_single_deviation = std::max(stats.max_single_deviation, dev);
  }
  mean /= draws;
  stats.mean_single_deviation /= draws;
  stats.mean_gram_deviation =
      detail::spectral_norm_symmetric(mean - identity);
  return stats;
}

// ---------------------------------------------------------------------------
// Sample-bound report
// ---------------------------------------------------------------------------

struct BoundRow {
  int t = 0;
  double nu_sq = 0.0;
  double share = 0.0;      // proportional budget fraction nu^2(t) / sum
  long bound_main = 0;     // headline bound (0 when s < 2 makes it vacuous)
  long bound_prob = 0;
  long bound_expect = 0;
};

struct BoundReport {
  std::vector<BoundRow> rows;

  std::string csv() const {
    std::string out = "t,nu_sq,share,bound_main,bound_prob,bound_expect\n";
    for (const auto& r : rows)
      out += std::to_string(r.t) + "," + format_double(r.nu_sq) + "," +
             format_double(r.share) + "," + std::to_string(r.bound_main) +
             "," + std::to_string(r.bound_prob) + "," +
             std::to_string(r.bound_expect) + "\n";
    return out;
  }
};

inline BoundReport bound_report(const CoherenceProfile& profile, int s, int k,
                                int n, double delta, double constant,
                                double epsilon, double eta, double beta) {
  BoundReport report;
  const int steps = profile.steps();
  const double total = profile.nu_sq_sum();
  for (int t = 0; t < steps; ++t) {
    BoundRow row;
    row.t = t;
    row.nu_sq = profile.nu_sq(t);
    row.share = total > 0.0 ? row.nu_sq / total : 0.0;
    // the headline bound's log^2(s) factor vanishes at s = 1
    row.bound_main = s >= 2 ? rip_sample_bound(row.nu_sq, s, k, n, steps,
                                               delta, constant)
                            : 0;
    const RipBoundPair pair =
        rip_sample_bound_appendix(row.nu_sq, s, k, n, steps, epsilon, eta,
                                  beta);
    row.bound_prob = pair.probability_bound;
    row.bound_expect = pair.expectation_bound;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace dynsamp
