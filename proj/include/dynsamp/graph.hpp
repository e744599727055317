#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dynsamp/error.hpp"
#include "dynsamp/rng.hpp"

namespace dynsamp {

struct Edge {
  int i;  // 0-based endpoints, i < j after normalization
  int j;
  double w;
};

// Weighted undirected graph without self-loops or duplicate edges. Node
// indices are 0-based in memory; the edge-list file format is 1-based.
class Graph {
 public:
  Graph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    if (n_ <= 0) throw_invalid("graph needs at least one node");
    std::map<std::pair<int, int>, bool> seen;
    for (auto& e : edges_) {
      if (e.i == e.j)
        throw_invalid("self-loop at node " + std::to_string(e.i + 1));
      if (e.i > e.j) std::swap(e.i, e.j);
      if (e.i < 0 || e.j >= n_)
        throw_invalid("edge endpoint out of range: (" +
                      std::to_string(e.i + 1) + "," + std::to_string(e.j + 1) +
                      ")");
      if (!(e.w > 0.0))
        throw_invalid("edge weight must be positive, got " +
                      std::to_string(e.w));
      if (!seen.emplace(std::make_pair(e.i, e.j), true).second)
        throw_invalid("duplicate edge (" + std::to_string(e.i + 1) + "," +
                      std::to_string(e.j + 1) + ")");
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
      return std::tie(a.i, a.j) < std::tie(b.i, b.j);
    });
  }

  int node_count() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }

 private:
  int n_;
  std::vector<Edge> edges_;
};

/// Combinatorial Laplacian L = D - W (dense, symmetric, PSD).
inline Eigen::MatrixXd build_laplacian(const Graph& g) {
  const int n = g.node_count();
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    lap(e.i, e.i) += e.w;
    lap(e.j, e.j) += e.w;
    lap(e.i, e.j) -= e.w;
    lap(e.j, e.i) -= e.w;
  }
  return lap;
}

/// Unweighted n-cycle, n >= 3.
inline Graph gen_cycle(int n) {
  if (n < 3) throw_invalid("cycle needs n >= 3");
  std::vector<Edge> edges;
  edges.reserve(n);
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1.0});
  return Graph(n, std::move(edges));
}

inline int count_components(const Graph& g) {
  const int n = g.node_count();
  std::vector<std::vector<int>> adj(n);
  for (const Edge& e : g.edges()) {
    adj[e.i].push_back(e.j);
    adj[e.j].push_back(e.i);
  }
  std::vector<char> visited(n, 0);
  std::vector<int> stack;
  int components = 0;
  for (int start = 0; start < n; ++start) {
    if (visited[start]) continue;
    ++components;
    stack.push_back(start);
    visited[start] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int u : adj[v]) {
        if (!visited[u]) {
          visited[u] = 1;
          stack.push_back(u);
        }
      }
    }
  }
  return components;
}

inline bool is_connected(const Graph& g) { return count_components(g) == 1; }

// Stochastic-block-style community graph: within-community pairs joined with
// probability p_in, cross-community pairs with p_out, unit weights. Redrawn
// with a fresh derived seed until connected; fails after max_retries.
inline Graph gen_community(const std::vector<int>& sizes, double p_in,
                           double p_out, std::uint64_t seed,
                           int max_retries = 100) {
  if (sizes.empty()) throw_invalid("community graph needs at least one block");
  bool any_ge2 = false;
  int n = 0;
  for (int s : sizes) {
    if (s <= 0) throw_invalid("block sizes must be positive");
    any_ge2 = any_ge2 || s >= 2;
    n += s;
  }
  if (!any_ge2) throw_invalid("at least one block must have size >= 2");
  if (!(p_in > p_out) || p_out < 0.0 || p_in > 1.0)
    throw_invalid("need 1 >= p_in > p_out >= 0");

  std::vector<int> block(n);
  {
    int v = 0;
    for (std::size_t b = 0; b < sizes.size(); ++b)
      for (int s = 0; s < sizes[b]; ++s) block[v++] = static_cast<int>(b);
  }

  for (int attempt = 0; attempt < max_retries; ++attempt) {
    Rng rng(mix_seed(seed, "community-attempt", attempt));
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double p = block[i] == block[j] ? p_in : p_out;
        if (rng.uniform() < p) edges.push_back({i, j, 1.0});
      }
    }
    Graph g(n, std::move(edges));
    if (is_connected(g)) return g;
  }
  throw Error(ErrorKind::generation,
              "no connected community graph in " +
                  std::to_string(max_retries) + " attempts");
}

// Edge-list text format: first line "n m", then m lines "i j w" with
// 1 <= i < j <= n and w > 0. '#' starts a comment line.
inline Graph load_graph(std::istream& in, const std::string& name = "<input>") {
  auto fail = [&](int line, const std::string& msg) -> void {
    throw Error(ErrorKind::parse,
                name + ":" + std::to_string(line) + ": " + msg);
  };

  int line_no = 0;
  auto next_line = [&](std::string& out) -> bool {
    while (std::getline(in, out)) {
      ++line_no;
      const auto pos = out.find_first_not_of(" \t\r");
      if (pos == std::string::npos || out[pos] == '#') continue;
      return true;
    }
    return false;
  };

  std::string line;
  if (!next_line(line)) fail(line_no, "missing header line \"n m\"");
  long long n = 0, m = 0;
  {
    std::istringstream hs(line);
    std::string extra;
    if (!(hs >> n >> m) || (hs >> extra))
      fail(line_no, "header must be \"n m\"");
    if (n <= 0) fail(line_no, "node count must be positive");
    if (m < 0) fail(line_no, "edge count must be nonnegative");
  }

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long e = 0; e < m; ++e) {
    if (!next_line(line))
      fail(line_no, "expected " + std::to_string(m) + " edges, got " +
                        std::to_string(e));
    std::istringstream es(line);
    long long i = 0, j = 0;
    double w = 0;
    std::string extra;
    if (!(es >> i >> j >> w) || (es >> extra))
      fail(line_no, "edge line must be \"i j w\"");
    if (i < 1 || i > n || j < 1 || j > n)
      fail(line_no, "node index out of range [1," + std::to_string(n) + "]");
    if (i == j) fail(line_no, "self-loop not allowed");
    if (!(w > 0.0)) fail(line_no, "weight must be positive");
    edges.push_back({static_cast<int>(i - 1), static_cast<int>(j - 1), w});
  }

  try {
    return Graph(static_cast<int>(n), std::move(edges));
  } catch (const Error& err) {
    throw Error(ErrorKind::parse, name + ": " + err.what());
  }
}

inline Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path);
  return load_graph(in, path);
}

inline void save_graph(const Graph& g, std::ostream& out) {
  out << g.node_count() << ' ' << g.edges().size() << '\n';
  for (const Edge& e : g.edges()) {
    std::ostringstream w;
    w.precision(17);
    w << e.w;
    out << (e.i + 1) << ' ' << (e.j + 1) << ' ' << w.str() << '\n';
  }
}

inline void save_graph(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path);
  save_graph(g, out);
}

}  // namespace dynsamp
