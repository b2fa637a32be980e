#pragma once

// Reference computations that share no code path with the library: plain
// products instead of log-space accumulation, brute-force enumeration instead
// of dynamic programming, a textbook max-flow instead of tree recursion.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

namespace oracle {

inline double basel_partial(int N) {
  double s = 0.0;
  for (int n = N; n >= 1; --n) s += 1.0 / ((n + 1.0) * (n + 1.0));
  return s;
}

inline double harmonic_partial(int N) {
  double s = 0.0;
  for (int n = N; n >= 1; --n) s += 1.0 / (n + 1.0);
  return s;
}

inline double zeta_tail_partial(int N, double s) {
  double acc = 0.0;
  for (int n = N; n >= 1; --n) acc += std::pow(n + 1.0, -s);
  return acc;
}

// per-level (R, d, eps) with equal radii; everything by direct products
struct Level {
  double R, d, eps;
};

inline double source_radius(const std::vector<Level>& L, int N, double K) {
  double s = 1.0;
  for (int k = 0; k < N; ++k) s *= std::pow(L[k].R * L[k].d, K) * L[k].R;
  return s;
}

inline double target_radius(const std::vector<Level>& L, int N) {
  double t = 1.0;
  for (int k = 0; k < N; ++k) t *= L[k].R * L[k].d * L[k].R;
  return t;
}

inline double node_mass(const std::vector<Level>& L, int N, int depth) {
  double m = 1.0;
  for (int k = 0; k < N; ++k) m *= L[k].R * L[k].R;
  for (int k = N; k < depth; ++k) m *= 1.0 - L[k].eps;
  return m;
}

// sum_{N=1}^{depth} (m_N / r_N^{2 - alpha p})^{p'-1}
inline double wolff_generation_sum(const std::vector<double>& m, const std::vector<double>& r, double alpha, double p) {
  const double e = 1.0 / (p - 1.0);
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) s += std::pow(m[i] / std::pow(r[i], 2.0 - alpha * p), e);
  return s;
}

// Dinic max flow on a small dense-ish graph
class MaxFlow {
 public:
  explicit MaxFlow(int n) : g_(n), level_(n), it_(n) {}
  void add_edge(int u, int v, double c) {
    g_[u].push_back({v, c, static_cast<int>(g_[v].size())});
    g_[v].push_back({u, 0.0, static_cast<int>(g_[u].size()) - 1});
  }
  double run(int s, int t) {
    double flow = 0.0;
    while (bfs(s, t)) {
      std::fill(it_.begin(), it_.end(), 0);
      while (true) {
        double f = dfs(s, t, std::numeric_limits<double>::infinity());
        if (f <= 0.0) break;
        flow += f;
      }
    }
    return flow;
  }

 private:
  struct E {
    int to;
    double cap;
    int rev;
  };
  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (const auto& e : g_[u])
        if (e.cap > 1e-300 && level_[e.to] < 0) {
          level_[e.to] = level_[u] + 1;
          q.push(e.to);
        }
    }
    return level_[t] >= 0;
  }
  double dfs(int u, int t, double f) {
    if (u == t) return f;
    for (int& i = it_[u]; i < static_cast<int>(g_[u].size()); ++i) {
      auto& e = g_[u][i];
      if (e.cap > 1e-300 && level_[e.to] == level_[u] + 1) {
        double d = dfs(e.to, t, std::min(f, e.cap));
        if (d > 0) {
          e.cap -= d;
          g_[e.to][e.rev].cap += d;
          return d;
        }
      }
    }
    return 0.0;
  }
  std::vector<std::vector<E>> g_;
  std::vector<int> level_, it_;
};

// Complete M-ary tree of given depth in BFS numbering; h[i] per node.
// Minimum of sum h over node subsets that meet every root-to-leaf path,
// found by enumerating all 2^n subsets.
inline double min_cover_bruteforce(int M, int depth, const std::vector<double>& h) {
  const int n = static_cast<int>(h.size());
  std::vector<int> parent(n, -1);
  int first_leaf = 0, count = 1;
  for (int d = 0, start = 0; d < depth; ++d) {
    for (int i = 0; i < count; ++i)
      for (int j = 0; j < M; ++j) parent[start + count + i * M + j] = start + i;
    start += count;
    count *= M;
    first_leaf = start;
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    bool ok = true;
    for (int leaf = first_leaf; leaf < n && ok; ++leaf) {
      bool hit = false;
      for (int v = leaf; v >= 0; v = parent[v])
        if (mask >> v & 1) {
          hit = true;
          break;
        }
      ok = hit;
    }
    if (!ok) continue;
    double c = 0.0;
    for (int v = 0; v < n; ++v)
      if (mask >> v & 1) c += h[v];
    best = std::min(best, c);
  }
  return best;
}

// Max flow on the same tree: source -> root (cap h[root]), parent -> child
// (cap h[child]), leaf -> sink (unbounded).
inline double tree_maxflow(int M, int depth, const std::vector<double>& h) {
  const int n = static_cast<int>(h.size());
  MaxFlow mf(n + 2);
  const int S = n, T = n + 1;
  mf.add_edge(S, 0, h[0]);
  int count = 1, start = 0;
  for (int d = 0; d < depth; ++d) {
    for (int i = 0; i < count; ++i)
      for (int j = 0; j < M; ++j) {
        int c = start + count + i * M + j;
        mf.add_edge(start + i, c, h[c]);
      }
    start += count;
    count *= M;
  }
  for (int leaf = start; leaf < n; ++leaf) mf.add_edge(leaf, T, std::numeric_limits<double>::infinity());
  return mf.run(S, T);
}

}  // namespace oracle
