// Command-line driver for graph generation, coherence reports, sampling
// plans, sparse recovery, and the experiment batches. All outputs land under
// --out with fixed filenames; all randomness flows from --seed.

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "dynsamp/graph.hpp"
#include "dynsamp/harness.hpp"
#include "dynsamp/io.hpp"
#include "dynsamp/recovery.hpp"
#include "dynsamp/sampling.hpp"
#include "dynsamp/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dynsamp;

namespace {

constexpr std::uint64_t kDefaultSeed = 1729;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;
constexpr int kExitInterrupted = 130;

void handle_interrupt(int) { g_interrupted.store(true); }

// Graph source flags shared by every subcommand.
struct GraphOptions {
  int cycle_n = 0;
  std::vector<int> community_sizes;
  double p_in = 0.8;
  double p_out = 0.02;
  std::string load_path;

  void attach(CLI::App* cmd) {
    cmd->add_option("--cycle", cycle_n, "unweighted cycle with N nodes");
    cmd->add_option("--community", community_sizes,
                    "community block sizes, e.g. --community 40,160")
        ->delimiter(',');
    cmd->add_option("--pin", p_in, "within-community edge probability");
    cmd->add_option("--pout", p_out, "cross-community edge probability");
    cmd->add_option("--load", load_path, "edge-list file to load");
  }

  GraphSpec spec() const {
    const int sources = (cycle_n > 0 ? 1 : 0) +
                        (!community_sizes.empty() ? 1 : 0) +
                        (!load_path.empty() ? 1 : 0);
    if (sources != 1)
      throw_invalid("choose exactly one of --cycle, --community, --load");
    if (cycle_n > 0) return GraphSpec::cycle(cycle_n);
    if (!community_sizes.empty())
      return GraphSpec::community(community_sizes, p_in, p_out);
    return GraphSpec::file(load_path);
  }

  json echo() const {
    json j;
    if (cycle_n > 0) {
      j["kind"] = "cycle";
      j["n"] = cycle_n;
    } else if (!community_sizes.empty()) {
      j["kind"] = "community";
      j["sizes"] = community_sizes;
      j["p_in"] = p_in;
      j["p_out"] = p_out;
    } else {
      j["kind"] = "file";
      j["path"] = load_path;
    }
    return j;
  }
};

struct FilterOptions {
  std::string name = "heat";
  double dt = 1.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--filter", name,
                    "spectral filter: heat, heat-fast (dt=4), heat-slow "
                    "(dt=0.5)");
    cmd->add_option("--dt", dt, "heat diffusion time step");
  }

  FilterSpec spec() const {
    FilterSpec f = parse_filter_spec(name, dt);
    return f;
  }

  json echo() const {
    const FilterSpec f = spec();
    return json{{"name", f.name}, {"dt", f.dt}};
  }
};

DistributionChoice parse_distribution(const std::string& name) {
  if (name == "uniform") return DistributionChoice::uniform;
  if (name == "optimal") return DistributionChoice::optimal;
  throw_invalid("distribution must be uniform or optimal");
}

fs::path prepare_out_dir(const std::string& out) {
  if (out.empty()) throw_invalid("--out directory is required");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create " + out);
  return fs::path(out);
}

void write_file(const fs::path& path, const std::string& content) {
  write_text_file(path.string(), content);
}

void write_json(const fs::path& path, const json& j) {
  write_file(path, j.dump(2) + "\n");
}

json base_meta(const std::string& subcommand, std::uint64_t seed) {
  json j;
  j["tool"] = "dynsamp";
  j["subcommand"] = subcommand;
  j["seed"] = seed;
  return j;
}

// ---------------------------------------------------------------------------

int cmd_graph(const GraphOptions& gopt, std::uint64_t seed,
              const std::string& out) {
  const fs::path dir = prepare_out_dir(out);
  const Graph g = make_graph(gopt.spec(), seed);

  std::ostringstream edge_text;
  save_graph(g, edge_text);
  write_file(dir / "graph.txt", edge_text.str());

  const int components = count_components(g);
  if (components > 1)
    std::cerr << "warning: graph has " << components
              << " connected components\n";

  std::vector<double> degree(g.node_count(), 0.0);
  for (const Edge& e : g.edges()) {
    degree[e.i] += e.w;
    degree[e.j] += e.w;
  }
  double dmin = degree.empty() ? 0.0 : degree[0], dmax = dmin, dsum = 0.0;
  for (double d : degree) {
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
    dsum += d;
  }

  json meta = base_meta("graph", seed);
  meta["graph"] = gopt.echo();
  meta["n"] = g.node_count();
  meta["edges"] = g.edges().size();
  meta["components"] = components;
  meta["degree"] = {{"min", dmin},
                    {"max", dmax},
                    {"mean", dsum / g.node_count()}};
  write_json(dir / "meta.json", meta);

  std::cout << "n=" << g.node_count() << " edges=" << g.edges().size()
            << " components=" << components << "\n";
  return kExitOk;
}

int cmd_coherence(const GraphOptions& gopt, const FilterOptions& fopt,
                  std::vector<int> k_values, std::vector<int> t_values,
                  const std::string& dist, bool dump_dictionary,
                  std::uint64_t seed, const std::string& out) {
  const fs::path dir = prepare_out_dir(out);
  const DistributionChoice choice = parse_distribution(dist);
  const Graph g = make_graph(gopt.spec(), seed);
  const SpectralBasis basis = eigendecompose(build_laplacian(g));
  const DiffusionFilter filter = make_filter(fopt.spec());
  for (int k : k_values)
    if (k > basis.n()) throw_invalid("k exceeds the node count");

  const CoherenceHeatmap map =
      coherence_heatmap(basis, filter, k_values, t_values, choice);
  write_file(dir / "grid.csv", map.grid_csv());
  write_file(dir / "profile.csv", map.profile_csv());

  if (dump_dictionary) {
    const auto dict =
        build_dictionary(basis, filter, map.k_values.back(),
                         TimeGrid::regular(map.t_values.back()));
    write_file(dir / "dictionary.csv", matrix_to_csv(dict.utilde));
  }

  json meta = base_meta("coherence", seed);
  meta["graph"] = gopt.echo();
  meta["filter"] = fopt.echo();
  meta["k_values"] = map.k_values;
  meta["t_values"] = map.t_values;
  meta["distribution"] = dist;
  write_json(dir / "meta.json", meta);

  for (std::size_t ki = 0; ki < map.k_values.size(); ++ki)
    for (std::size_t ti = 0; ti < map.t_values.size(); ++ti)
      std::cout << "k=" << map.k_values[ki] << " T=" << map.t_values[ti]
                << " nu_sq_sum=" << format_double(map.at(ki, ti)) << "\n";
  return kExitOk;
}

struct PipelineOptions {
  int k = 16;
  int steps = 4;
  std::string dist = "optimal";
  int budget = 0;
  std::vector<int> budgets;

  void attach(CLI::App* cmd, bool with_budget) {
    cmd->add_option("--k", k, "bandwidth");
    cmd->add_option("--T", steps, "number of observation steps");
    cmd->add_option("--dist", dist, "sampling distribution: uniform|optimal");
    if (with_budget) {
      cmd->add_option("--budget", budget, "total space-time sample budget");
      cmd->add_option("--budgets", budgets,
                      "explicit per-step budgets, comma separated")
          ->delimiter(',');
    }
  }
};

struct PreparedPipeline {
  SpectralBasis basis;
  DiffusionFilter filter = DiffusionFilter::heat(0.0);
  SpaceTimeDictionary dict;
  SamplingDistribution dist;
  CoherenceProfile profile;
  std::vector<int> budgets;
};

PreparedPipeline prepare_pipeline(const GraphOptions& gopt,
                                  const FilterOptions& fopt,
                                  const PipelineOptions& popt,
                                  std::uint64_t seed, bool need_budget) {
  PreparedPipeline p;
  const Graph g = make_graph(gopt.spec(), seed);
  p.basis = eigendecompose(build_laplacian(g));
  if (popt.k < 1 || popt.k > p.basis.n())
    throw_invalid("k must be in [1, n]");
  p.filter = make_filter(fopt.spec());
  p.dict = build_dictionary(p.basis, p.filter, popt.k,
                            TimeGrid::regular(popt.steps));
  const DistributionChoice choice = parse_distribution(popt.dist);
  if (choice == DistributionChoice::optimal) {
    auto opt = optimal_distribution(p.dict);
    p.dist = std::move(opt.first);
    p.profile = std::move(opt.second);
  } else {
    p.dist = uniform_distribution(p.dict.n(), popt.steps);
    p.profile = coherence(p.dict, p.dist);
  }
  if (need_budget) {
    if (!popt.budgets.empty()) {
      if (static_cast<int>(popt.budgets.size()) != popt.steps)
        throw_invalid("--budgets list must have T entries");
      p.budgets = popt.budgets;
    } else {
      if (popt.budget < 1) throw_invalid("--budget must be >= 1");
      p.budgets = allocate_budget(p.profile, popt.budget);
    }
  }
  return p;
}

int cmd_sample(const GraphOptions& gopt, const FilterOptions& fopt,
               const PipelineOptions& popt, std::uint64_t seed,
               const std::string& out) {
  const fs::path dir = prepare_out_dir(out);
  const PreparedPipeline p = prepare_pipeline(gopt, fopt, popt, seed, true);
  const SamplingPlan plan =
      draw_samples(p.dist, p.budgets, mix_seed(seed, "cli-plan"));

  write_file(dir / "plan.csv", plan_to_csv(plan));
  write_file(dir / "distribution.csv", distribution_to_csv(p.dist));

  json meta = base_meta("sample", seed);
  meta["graph"] = gopt.echo();
  meta["filter"] = fopt.echo();
  meta["k"] = popt.k;
  meta["T"] = popt.steps;
  meta["distribution"] = popt.dist;
  meta["budgets"] = p.budgets;
  json nu_sq = json::array();
  for (int t = 0; t < p.profile.steps(); ++t)
    nu_sq.push_back(p.profile.nu_sq(t));
  meta["nu_sq"] = nu_sq;
  write_json(dir / "meta.json", meta);

  std::cout << "drew " << plan.total() << " samples over " << plan.steps()
            << " steps\n";
  return kExitOk;
}

int cmd_recover(const GraphOptions& gopt, const FilterOptions& fopt,
                const PipelineOptions& popt, int sparsity, double sigma,
                const std::string& signal_path, std::uint64_t seed,
                const std::string& out) {
  const fs::path dir = prepare_out_dir(out);
  const PreparedPipeline p = prepare_pipeline(gopt, fopt, popt, seed, true);
  if (sparsity < 1 || sparsity > popt.k)
    throw_invalid("--sparsity must be in [1, k]");

  GraphSignal x;
  if (!signal_path.empty()) {
    x = load_signal(signal_path);
    if (x.size() != p.basis.n())
      throw_invalid("signal length does not match the graph");
  } else {
    Rng rng(mix_seed(seed, "cli-signal"));
    x = random_sparse_signal(p.basis, popt.k, sparsity, rng).first;
  }

  Eigen::VectorXd spacetime = embed(x, p.basis, p.filter, p.dict.grid);
  Eigen::VectorXd noise = Eigen::VectorXd::Zero(spacetime.size());
  if (sigma > 0.0) {
    Rng noise_rng(mix_seed(seed, "cli-noise"));
    for (Eigen::Index i = 0; i < noise.size(); ++i)
      noise(i) = noise_rng.uniform(-sigma, sigma);
    spacetime += noise;
  }

  const SamplingPlan plan =
      draw_samples(p.dist, p.budgets, mix_seed(seed, "cli-plan"));
  const auto [y, y_tilde] = apply_sampling(spacetime, plan);

  RecoveryConfig config;
  config.sparsity = sparsity;
  const RecoveryResult res =
      recover_signal(y_tilde, true, plan, p.dict, p.basis, config);
  const double rel = relative_error(x, res.x_hat);

  write_file(dir / "plan.csv", plan_to_csv(plan));

  json result;
  json code = json::array();
  for (int idx : res.code.support)
    code.push_back({{"index", idx + 1}, {"value", res.code.coeffs(idx)}});
  result["code"] = code;
  json xhat = json::array();
  for (Eigen::Index i = 0; i < res.x_hat.size(); ++i)
    xhat.push_back(res.x_hat(i));
  result["x_hat"] = xhat;
  result["residuals"] = res.residuals;
  result["iterations"] = res.iterations;
  result["converged"] = res.converged;
  result["relative_error"] = rel;
  write_json(dir / "result.json", result);

  json meta = base_meta("recover", seed);
  meta["graph"] = gopt.echo();
  meta["filter"] = fopt.echo();
  meta["k"] = popt.k;
  meta["T"] = popt.steps;
  meta["distribution"] = popt.dist;
  meta["budgets"] = p.budgets;
  meta["sparsity"] = sparsity;
  meta["sigma"] = sigma;
  meta["signal"] = signal_path.empty() ? "synthetic" : signal_path;
  write_json(dir / "meta.json", meta);

  std::cout << "relative_error=" << format_double(rel) << "\n";
  return kExitOk;
}

json contour_json(const PhaseGridResult& result, double level) {
  json j;
  j["level"] = level;
  json stars = json::array();
  for (const auto& star : result.contour(level))
    stars.push_back(star ? json(*star) : json(nullptr));
  j["m_star"] = stars;
  j["violation_fraction"] = result.contour_violation_fraction(level);
  if (const auto fit = result.contour_fit(level)) {
    j["fit_slope"] = fit->slope;
    j["fit_intercept"] = fit->intercept;
  }
  return j;
}

int cmd_phase(const GraphOptions& gopt, const FilterOptions& fopt,
              PhaseGridSpec spec, const std::string& dist,
              const std::string& out) {
  const fs::path dir = prepare_out_dir(out);
  spec.graph = gopt.spec();
  spec.filter = fopt.spec();
  spec.distribution = parse_distribution(dist);
  const PhaseGridResult result = phase_transition(spec);
  write_file(dir / "grid.csv", result.grid_csv());

  json meta = base_meta("phase", spec.master_seed);
  meta["graph"] = gopt.echo();
  meta["filter"] = fopt.echo();
  meta["k"] = spec.k;
  meta["T"] = spec.steps;
  meta["distribution"] = dist;
  meta["s_values"] = spec.s_values;
  meta["m_values"] = spec.m_values;
  meta["trials"] = spec.trials;
  meta["success_threshold"] = spec.success_threshold;
  meta["truncated"] = result.truncated;
  meta["contour_50"] = contour_json(result, 0.5);
  meta["contour_95"] = contour_json(result, 0.95);
  write_json(dir / "meta.json", meta);

  std::cout << "cells=" << result.success_rate.size() << " trials="
            << spec.trials << "\n";
  return result.truncated ? kExitInterrupted : kExitOk;
}

int cmd_noisy(const GraphOptions& gopt, const FilterOptions& fopt,
              NoisySweepSpec spec, const std::string& dist,
              const std::string& out) {
  const fs::path dir = prepare_out_dir(out);
  spec.grid.graph = gopt.spec();
  spec.grid.filter = fopt.spec();
  spec.grid.distribution = parse_distribution(dist);
  const NoisySweepResult result = noisy_sweep(spec);
  write_file(dir / "grid.csv", result.grid_csv());

  json meta = base_meta("noisy", spec.grid.master_seed);
  meta["graph"] = gopt.echo();
  meta["filter"] = fopt.echo();
  meta["k"] = spec.grid.k;
  meta["T"] = spec.grid.steps;
  meta["distribution"] = dist;
  meta["s_values"] = spec.grid.s_values;
  meta["m_values"] = spec.grid.m_values;
  meta["trials"] = spec.grid.trials;
  meta["success_threshold"] = spec.grid.success_threshold;
  meta["sigma"] = spec.sigma;
  meta["trim"] = spec.trim;
  meta["truncated"] = result.truncated;
  write_json(dir / "meta.json", meta);

  std::cout << "cells=" << result.error_ratio_trimmed.size() << " trials="
            << spec.grid.trials << "\n";
  return result.truncated ? kExitInterrupted : kExitOk;
}

int cmd_bounds(const GraphOptions& gopt, const FilterOptions& fopt,
               const PipelineOptions& popt, int sparsity, double delta,
               double constant, double epsilon, double eta, double beta,
               std::uint64_t seed, const std::string& out) {
  const fs::path dir = prepare_out_dir(out);
  const PreparedPipeline p = prepare_pipeline(gopt, fopt, popt, seed, false);
  const BoundReport report =
      bound_report(p.profile, sparsity, popt.k, p.basis.n(), delta, constant,
                   epsilon, eta, beta);
  write_file(dir / "bounds.csv", report.csv());

  json meta = base_meta("bounds", seed);
  meta["graph"] = gopt.echo();
  meta["filter"] = fopt.echo();
  meta["k"] = popt.k;
  meta["T"] = popt.steps;
  meta["distribution"] = popt.dist;
  meta["sparsity"] = sparsity;
  meta["delta"] = delta;
  meta["constant"] = constant;
  meta["epsilon"] = epsilon;
  meta["eta"] = eta;
  meta["beta"] = beta;
  write_json(dir / "meta.json", meta);

  for (const auto& row : report.rows)
    std::cout << "t=" << row.t << " nu_sq=" << format_double(row.nu_sq)
              << " main=" << row.bound_main << " prob=" << row.bound_prob
              << " expect=" << row.bound_expect << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, handle_interrupt);

  CLI::App app{"space-time sampling and sparse recovery of diffusing graph "
               "signals"};
  app.require_subcommand(1);

  // graph
  auto* graph_cmd = app.add_subcommand("graph", "generate or ingest a graph");
  GraphOptions graph_gopt;
  graph_gopt.attach(graph_cmd);
  std::uint64_t graph_seed = kDefaultSeed;
  std::string graph_out;
  graph_cmd->add_option("--seed", graph_seed, "master seed (default 1729)");
  graph_cmd->add_option("--out", graph_out, "output directory")->required();
  graph_cmd->set_config("--config");

  // coherence
  auto* coh_cmd =
      app.add_subcommand("coherence", "coherence heatmap and per-step profile");
  GraphOptions coh_gopt;
  FilterOptions coh_fopt;
  coh_gopt.attach(coh_cmd);
  coh_fopt.attach(coh_cmd);
  std::vector<int> coh_k{16};
  std::vector<int> coh_t{8};
  std::string coh_dist = "optimal";
  bool coh_dump = false;
  std::uint64_t coh_seed = kDefaultSeed;
  std::string coh_out;
  coh_cmd->add_option("--k-values", coh_k, "bandwidths, comma separated")
      ->delimiter(',');
  coh_cmd->add_option("--t-values", coh_t, "time spans, comma separated")
      ->delimiter(',');
  coh_cmd->add_option("--dist", coh_dist, "uniform|optimal");
  coh_cmd->add_flag("--dump-dictionary", coh_dump,
                    "also write the largest dictionary as CSV");
  coh_cmd->add_option("--seed", coh_seed, "master seed");
  coh_cmd->add_option("--out", coh_out, "output directory")->required();
  coh_cmd->set_config("--config");

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "draw a sampling plan");
  GraphOptions sample_gopt;
  FilterOptions sample_fopt;
  PipelineOptions sample_popt;
  sample_gopt.attach(sample_cmd);
  sample_fopt.attach(sample_cmd);
  sample_popt.attach(sample_cmd, true);
  std::uint64_t sample_seed = kDefaultSeed;
  std::string sample_out;
  sample_cmd->add_option("--seed", sample_seed, "master seed");
  sample_cmd->add_option("--out", sample_out, "output directory")->required();
  sample_cmd->set_config("--config");

  // recover
  auto* rec_cmd = app.add_subcommand("recover", "run the full pipeline once");
  GraphOptions rec_gopt;
  FilterOptions rec_fopt;
  PipelineOptions rec_popt;
  rec_gopt.attach(rec_cmd);
  rec_fopt.attach(rec_cmd);
  rec_popt.attach(rec_cmd, true);
  int rec_sparsity = 2;
  double rec_sigma = 0.0;
  std::string rec_signal;
  std::uint64_t rec_seed = kDefaultSeed;
  std::string rec_out;
  rec_cmd->add_option("--sparsity", rec_sparsity, "target sparsity");
  rec_cmd->add_option("--sigma", rec_sigma, "uniform noise half-width");
  rec_cmd->add_option("--signal", rec_signal,
                      "initial signal file (default: synthesize)");
  rec_cmd->add_option("--seed", rec_seed, "master seed");
  rec_cmd->add_option("--out", rec_out, "output directory")->required();
  rec_cmd->set_config("--config");

  // phase
  auto* phase_cmd =
      app.add_subcommand("phase", "success-rate grid over (s, m)");
  GraphOptions phase_gopt;
  FilterOptions phase_fopt;
  phase_gopt.attach(phase_cmd);
  phase_fopt.attach(phase_cmd);
  PhaseGridSpec phase_spec;
  phase_spec.master_seed = kDefaultSeed;
  std::string phase_dist = "optimal";
  std::string phase_out;
  phase_cmd->add_option("--k", phase_spec.k, "bandwidth");
  phase_cmd->add_option("--T", phase_spec.steps, "observation steps");
  phase_cmd->add_option("--s-values", phase_spec.s_values, "sparsity levels")
      ->delimiter(',')
      ->required();
  phase_cmd->add_option("--m-values", phase_spec.m_values, "sample budgets")
      ->delimiter(',')
      ->required();
  phase_cmd->add_option("--trials", phase_spec.trials, "trials per cell");
  phase_cmd->add_option("--threshold", phase_spec.success_threshold,
                        "success threshold on relative error");
  phase_cmd->add_option("--dist", phase_dist, "uniform|optimal");
  phase_cmd->add_option("--seed", phase_spec.master_seed, "master seed");
  phase_cmd->add_option("--threads", phase_spec.threads,
                        "worker threads (0 = auto); never changes results");
  phase_cmd->add_option("--out", phase_out, "output directory")->required();
  phase_cmd->set_config("--config");

  // noisy
  auto* noisy_cmd =
      app.add_subcommand("noisy", "noisy-recovery error sweep over (s, m)");
  GraphOptions noisy_gopt;
  FilterOptions noisy_fopt;
  noisy_gopt.attach(noisy_cmd);
  noisy_fopt.attach(noisy_cmd);
  NoisySweepSpec noisy_spec;
  noisy_spec.grid.master_seed = kDefaultSeed;
  std::string noisy_dist = "optimal";
  std::string noisy_out;
  noisy_cmd->add_option("--k", noisy_spec.grid.k, "bandwidth");
  noisy_cmd->add_option("--T", noisy_spec.grid.steps, "observation steps");
  noisy_cmd
      ->add_option("--s-values", noisy_spec.grid.s_values, "sparsity levels")
      ->delimiter(',')
      ->required();
  noisy_cmd
      ->add_option("--m-values", noisy_spec.grid.m_values, "sample budgets")
      ->delimiter(',')
      ->required();
  noisy_cmd->add_option("--trials", noisy_spec.grid.trials, "trials per cell");
  noisy_cmd->add_option("--threshold", noisy_spec.grid.success_threshold,
                        "success threshold on relative error");
  noisy_cmd->add_option("--sigma", noisy_spec.sigma,
                        "uniform noise half-width");
  noisy_cmd->add_option("--trim", noisy_spec.trim,
                        "kept middle fraction for trimmed means");
  noisy_cmd->add_option("--dist", noisy_dist, "uniform|optimal");
  noisy_cmd->add_option("--seed", noisy_spec.grid.master_seed, "master seed");
  noisy_cmd->add_option("--threads", noisy_spec.grid.threads,
                        "worker threads (0 = auto); never changes results");
  noisy_cmd->add_option("--out", noisy_out, "output directory")->required();
  noisy_cmd->set_config("--config");

  // bounds
  auto* bounds_cmd =
      app.add_subcommand("bounds", "per-step sample-complexity bounds");
  GraphOptions bounds_gopt;
  FilterOptions bounds_fopt;
  PipelineOptions bounds_popt;
  bounds_gopt.attach(bounds_cmd);
  bounds_fopt.attach(bounds_cmd);
  bounds_popt.attach(bounds_cmd, false);
  int bounds_sparsity = 4;
  double bounds_delta = 0.5;
  double bounds_constant = 1.0;
  double bounds_epsilon = 0.01;
  double bounds_eta = 0.5;
  double bounds_beta = 0.5;
  std::uint64_t bounds_seed = kDefaultSeed;
  std::string bounds_out;
  bounds_cmd->add_option("--sparsity", bounds_sparsity, "sparsity level");
  bounds_cmd->add_option("--delta", bounds_delta, "target RIP constant");
  bounds_cmd->add_option("--bound-constant", bounds_constant,
                         "universal constant C in the headline bound");
  bounds_cmd->add_option("--epsilon", bounds_epsilon, "failure probability");
  bounds_cmd->add_option("--eta", bounds_eta, "expectation bound parameter");
  bounds_cmd->add_option("--beta", bounds_beta, "deviation bound parameter");
  bounds_cmd->add_option("--seed", bounds_seed, "master seed");
  bounds_cmd->add_option("--out", bounds_out, "output directory")->required();
  bounds_cmd->set_config("--config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*graph_cmd) return cmd_graph(graph_gopt, graph_seed, graph_out);
    if (*coh_cmd)
      return cmd_coherence(coh_gopt, coh_fopt, coh_k, coh_t, coh_dist,
                           coh_dump, coh_seed, coh_out);
    if (*sample_cmd)
      return cmd_sample(sample_gopt, sample_fopt, sample_popt, sample_seed,
                        sample_out);
    if (*rec_cmd)
      return cmd_recover(rec_gopt, rec_fopt, rec_popt, rec_sparsity,
                         rec_sigma, rec_signal, rec_seed, rec_out);
    if (*phase_cmd)
      return cmd_phase(phase_gopt, phase_fopt, phase_spec, phase_dist,
                       phase_out);
    if (*noisy_cmd)
      return cmd_noisy(noisy_gopt, noisy_fopt, noisy_spec, noisy_dist,
                       noisy_out);
    if (*bounds_cmd)
      return cmd_bounds(bounds_gopt, bounds_fopt, bounds_popt, bounds_sparsity,
                        bounds_delta, bounds_constant, bounds_epsilon,
                        bounds_eta, bounds_beta, bounds_seed, bounds_out);
    std::cerr << "no subcommand selected\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::invalid_argument:
      case ErrorKind::parse:
        return kExitUsage;
      case ErrorKind::io:
        return kExitIo;
      case ErrorKind::numerical:
      case ErrorKind::generation:
        return kExitNumerical;
    }
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
