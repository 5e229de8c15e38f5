#pragma once
// Test-only exact oracles for tiny boxes. Independent of the sampler and union-find.

#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <vector>

#include "lrperc/kernel.hpp"
#include "lrperc/lattice.hpp"

namespace oracle {

struct PairProb {
  int u, v;
  double p;
};

inline std::vector<PairProb> all_pairs(const lrp::BoxLattice& box, const lrp::KernelSpec& spec, double beta) {
  std::vector<PairProb> out;
  const int V = static_cast<int>(box.vertex_count());
  for (int u = 0; u < V; ++u)
    for (int v = u + 1; v < V; ++v)
      out.push_back({u, v, lrp::edge_probability(spec, beta, box.site_of(u), box.site_of(v))});
  return out;
}

/// BFS component labels for an explicit edge list.
inline std::vector<int> bfs_labels(int vertices, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> adj(vertices);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<int> label(vertices, -1);
  int next = 0;
  for (int s = 0; s < vertices; ++s) {
    if (label[s] >= 0) continue;
    std::queue<int> q;
    q.push(s);
    label[s] = next;
    while (!q.empty()) {
      int x = q.front();
      q.pop();
      for (int y : adj[x])
        if (label[y] < 0) {
          label[y] = next;
          q.push(y);
        }
    }
    ++next;
  }
  return label;
}

/// Exhaustive enumeration over all 2^pairs configurations of a tiny box.
struct Enumeration {
  std::vector<std::vector<double>> connect;  // P(u <-> v)
  std::vector<std::vector<double>> size_at_least;  // [u][t] = P(|C(u)| >= t)
};

inline Enumeration enumerate(const lrp::BoxLattice& box, const lrp::KernelSpec& spec, double beta) {
  const auto pairs = all_pairs(box, spec, beta);
  const int V = static_cast<int>(box.vertex_count());
  const std::size_t P = pairs.size();
  Enumeration e;
  e.connect.assign(V, std::vector<double>(V, 0.0));
  e.size_at_least.assign(V, std::vector<double>(V + 2, 0.0));
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << P); ++mask) {
    double w = 1.0;
    std::vector<std::pair<int, int>> edges;
    for (std::size_t k = 0; k < P; ++k) {
      if (mask >> k & 1) {
        w *= pairs[k].p;
        edges.emplace_back(pairs[k].u, pairs[k].v);
      } else {
        w *= 1.0 - pairs[k].p;
      }
    }
    if (w == 0.0) continue;
    const auto label = bfs_labels(V, edges);
    std::vector<int> csize(V, 0);
    for (int x = 0; x < V; ++x) ++csize[label[x]];
    for (int u = 0; u < V; ++u) {
      for (int v = 0; v < V; ++v)
        if (label[u] == label[v]) e.connect[u][v] += w;
      for (int t = 1; t <= csize[label[u]]; ++t) e.size_at_least[u][t] += w;
    }
  }
  return e;
}

/// P(a <-> b) by the connected-set recursion over subsets (feasible up to ~16 vertices):
/// C(S) = 1 - sum_{a in T subsetneq S} C(T) prod_{e in T x (S\T)} (1 - p_e), and
/// P(a <-> b) = sum_{S containing a, b} C(S) prod_{e in S x (V\S)} (1 - p_e).
inline double connection_probability(const lrp::BoxLattice& box, const lrp::KernelSpec& spec, double beta, int a,
                                     int b) {
  const int V = static_cast<int>(box.vertex_count());
  std::vector<std::vector<double>> q(V, std::vector<double>(V, 1.0));  // closed probability
  for (const auto& pp : all_pairs(box, spec, beta)) q[pp.u][pp.v] = q[pp.v][pp.u] = 1.0 - pp.p;
  auto cut = [&](std::uint32_t s, std::uint32_t t) {
    double w = 1.0;
    for (int x = 0; x < V; ++x)
      if (s >> x & 1)
        for (int y = 0; y < V; ++y)
          if (t >> y & 1) w *= q[x][y];
    return w;
  };
  const std::uint32_t full = (V == 32) ? 0xffffffffu : ((1u << V) - 1);
  std::map<std::uint32_t, double> conn;
  // subsets containing a, in increasing popcount order via increasing integer works since T subset S => T <= S
  const std::uint32_t abit = 1u << a;
  for (std::uint32_t s = 1; s <= full; ++s) {
    if (!(s & abit)) continue;
    double c = 1.0;
    // proper subsets T of S containing a
    for (std::uint32_t t = (s - 1) & s; t; t = (t - 1) & s) {
      if (!(t & abit)) continue;
      c -= conn[t] * cut(t, s & ~t);
    }
    conn[s] = c;
    if (s == full) break;
  }
  double p = 0.0;
  for (const auto& [s, c] : conn)
    if (s >> b & 1) p += c * cut(s, full & ~s);
  return p;
}

}  // namespace oracle
