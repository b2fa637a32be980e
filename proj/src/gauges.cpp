#include "qcap/gauges.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qcap/error.hpp"
#include "qcap/potentials.hpp"

namespace qcap {

double psi_a(Point x, double a) {
  if (!(a > 0.0)) throw Error("psi_a needs a > 0");
  return 1.0 / (std::pow(norm(x), 1.0 + a) + 1.0);
}

double eps_mu_a(const PlanarMeasure& mu, Point x, double t, double a) {
  if (!(t > 0.0)) throw Error("eps_mu_a needs t > 0");
  if (!(a > 0.0)) throw Error("eps_mu_a needs a > 0");
  double s = 0.0;
  for (const auto& at : mu.atoms()) s += at.w / (std::pow(dist(at.pt, x) / t, 1.0 + a) + 1.0);
  return s / t;
}

Gauge constant_gauge(double c) {
  Gauge g;
  g.eps = [c](const Ball&) { return c; };
  g.gamma = 1.0;
  g.description = "constant";
  return g;
}

Gauge mu_a_gauge(const PlanarMeasure& mu, double a) {
  Gauge g;
  g.eps = [mu, a](const Ball& b) { return eps_mu_a(mu, b.center, b.radius, a); };
  g.gamma = 1.0;
  g.a = a;
  g.description = "eps_mu_a";
  return g;
}

Gauge inverse_radius_gauge(double c) {
  Gauge g;
  g.eps = [c](const Ball& b) { return c / b.radius; };
  g.gamma = 1.0;
  g.description = "inverse_radius";
  return g;
}

Gauge tree_mass_gauge(const CantorTree& tree) {
  std::vector<double> m;
  for (int n = 0; n <= tree.depth(); ++n) m.push_back(std::exp(tree.log_mass(n)));
  Gauge g;
  g.eps = [m](const Ball& b) {
    if (!b.node) throw Error("mass gauge is defined on tree balls only");
    return m.at(static_cast<std::size_t>(b.node->generation));
  };
  g.gamma = 0.0;
  g.description = "tree_mass";
  return g;
}

Ball node_ball(const CantorTree& tree, Side side, int generation, std::size_t index) {
  Ball b;
  b.center = tree.center(side, generation, index);
  b.radius = std::exp(tree.log_radius(side, generation));
  b.node = NodeRef{side, generation, index};
  return b;
}

Gauge distorted_gauge(const CantorTree& tree, const PlanarMeasure& nu, double a, double K) {
  if (!(K >= 1.0)) throw IndexError("K must be >= 1");
  if (!tree.realized()) throw RealizationError("distorted gauge needs realized centers");
  const double ex = 2.0 * K / (K + 1.0);
  Gauge g;
  g.eps = [tree, nu, a, ex](const Ball& b) {
    if (!b.node || b.node->side != Side::Target) throw Error("phi^{-1} known only on tree balls");
    const auto& nd = *b.node;
    if (nd.generation < 0 || nd.generation > tree.depth() || nd.index >= tree.node_count(nd.generation))
      throw Error("phi^{-1} known only on tree balls");
    Ball src = node_ball(tree, Side::Source, nd.generation, nd.index);
    return std::pow(eps_mu_a(nu, src.center, src.radius, a), ex);
  };
  g.gamma = 2.0 / (K + 1.0);
  g.a = a;
  g.description = "distorted(K)";
  return g;
}

EpsIntegral eps_integral_check(const PlanarMeasure& mu, Point x, double a, double p, int k_min, int k_max) {
  check_wolff_indices(1.0 / p, p);
  if (k_min > k_max) throw Error("k_min must not exceed k_max");
  EpsIntegral r;
  if (mu.empty() || mu.total_mass() == 0.0) return r;
  const double e = conjugate(p) - 1.0;
  PotentialProfile prof;
  double acc = 0.0;
  for (int k = k_max; k >= k_min; --k) {
    double c = std::pow(eps_mu_a(mu, x, std::ldexp(1.0, k), a), e);
    acc += c;
    prof.entries.push_back({k, c, acc});
  }
  prof.total = acc;
  flag_divergence(prof);
  auto w = wolff_dyadic(mu, x, 1.0 / p, p, k_min, k_max, false);
  r.sum = acc;
  r.wolff = w.total;
  r.ratio = w.total > 0.0 ? acc / w.total : INFINITY;
  r.divergent = prof.divergent;
  r.wolff_divergent = w.divergent;
  return r;
}

std::vector<BallPair> sample_g1_pairs(const std::vector<Point>& around, double r_min, double r_max, std::size_t count,
                                      std::uint64_t seed) {
  if (around.empty()) throw Error("need at least one anchor point");
  if (!(r_min > 0.0 && r_max >= r_min)) throw Error("need 0 < r_min <= r_max");
  Rng rng(seed);
  std::vector<BallPair> out;
  for (std::size_t i = 0; i < count; ++i) {
    Point x = around[rng.below(around.size())];
    double r = r_min * std::pow(r_max / r_min, rng.uniform());
    double rho = 2.0 * r * std::sqrt(rng.uniform());
    double ang = 2.0 * std::numbers::pi * rng.uniform();
    Point y{x.x + rho * std::cos(ang), x.y + rho * std::sin(ang)};
    double s = r * std::exp2(2.0 * rng.uniform() - 1.0);
    out.push_back({Ball{x, r, std::nullopt}, Ball{y, s, std::nullopt}});
  }
  return out;
}

DoublingReport check_G1(const Gauge& g, const std::vector<BallPair>& pairs, double threshold) {
  DoublingReport rep;
  rep.threshold = threshold;
  for (const auto& pr : pairs) {
    if (dist(pr.b1.center, pr.b2.center) > 2.0 * pr.b1.radius * (1 + 1e-12) || pr.b2.radius < 0.5 * pr.b1.radius ||
        pr.b2.radius > 2.0 * pr.b1.radius)
      throw Error("ball pair violates |x-y| <= 2r, r/2 <= s <= 2r");
    double e1 = g.eps(pr.b1), e2 = g.eps(pr.b2);
    if (e1 == 0.0 && e2 == 0.0) continue;
    double ratio = (e1 == 0.0 || e2 == 0.0) ? INFINITY : std::max(e1 / e2, e2 / e1);
    rep.C0 = std::max(rep.C0, ratio);
    ++rep.samples;
  }
  rep.pass = rep.C0 <= threshold;
  return rep;
}

DoublingReport check_G2(const Gauge& g, const std::vector<Ball>& balls, double swallow_radius, double threshold) {
  DoublingReport rep;
  rep.threshold = threshold;
  rep.note = "sum truncated once 2^k r exceeds the swallow radius and terms fall below 1e-17 of the sum";
  for (const auto& b : balls) {
    const double base = g.eps(b);
    if (!(base > 0.0)) continue;
    double sum = 0.0;
    std::size_t k = 0;
    for (; k < 200; ++k) {
      const double r = std::ldexp(b.radius, static_cast<int>(k));
      const double term = std::ldexp(g.eps(Ball{b.center, r, std::nullopt}), -static_cast<int>(k)) / base;
      sum += term;
      if (r >= swallow_radius && term < 1e-17 * sum) break;
    }
    rep.max_terms = std::max(rep.max_terms, k + 1);
    rep.C0prime = std::max(rep.C0prime, sum);
    ++rep.samples;
  }
  rep.pass = rep.C0prime <= threshold;
  return rep;
}

double lemtec1_check(double a, double b, const std::vector<double>& z_grid) {
  if (!(a > 0.0 && b > 0.0)) throw Error("lemma needs a, b > 0");
  if (a == b) throw Error("lemma excludes a = b");
  const double m = std::min(a, b);
  double C = 0.0;
  for (double z : z_grid) {
    z = std::abs(z);
    double s = 0.0;
    for (int k = 0; k < 2000; ++k) {
      const double w = std::exp2(-b * k);
      const double term = w / (std::pow(std::ldexp(z, -k), a) + 1.0);
      s += term;
      if (w < 1e-18 * s) break;
    }
    C = std::max(C, s * (std::pow(z, m) + 1.0));
  }
  return C;
}

namespace {

struct Levels {
  std::vector<std::vector<double>> h;  // h per node
  std::vector<std::vector<double>> best;
  std::vector<std::vector<char>> take;  // node itself is in the optimal cover
};

Levels solve(const CantorTree& tree, Side side, const Gauge& g) {
  if (!tree.realized()) throw RealizationError("tree contents need realized centers");
  const int D = tree.depth();
  Levels L;
  L.h.resize(static_cast<std::size_t>(D) + 1);
  L.best.resize(L.h.size());
  L.take.resize(L.h.size());
  for (int n = 0; n <= D; ++n) {
    const std::size_t c = tree.node_count(n);
    auto& hv = L.h[static_cast<std::size_t>(n)];
    hv.resize(c);
    for (std::size_t i = 0; i < c; ++i) {
      double v = g.h(node_ball(tree, side, n, i));
      if (!(v >= 0.0)) throw Error("gauge produced a negative or NaN value");
      hv[i] = v;
    }
  }
  L.best[static_cast<std::size_t>(D)] = L.h[static_cast<std::size_t>(D)];
  L.take[static_cast<std::size_t>(D)].assign(L.h[static_cast<std::size_t>(D)].size(), 1);
  for (int n = D - 1; n >= 0; --n) {
    const auto nn = static_cast<std::size_t>(n);
    const std::size_t M = tree.branching(n + 1);
    const auto& below = L.best[nn + 1];
    auto& bv = L.best[nn];
    auto& tv = L.take[nn];
    bv.resize(L.h[nn].size());
    tv.resize(L.h[nn].size());
    for (std::size_t i = 0; i < bv.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < M; ++j) s += below[i * M + j];
      tv[i] = L.h[nn][i] <= s;
      bv[i] = tv[i] ? L.h[nn][i] : s;
    }
  }
  return L;
}

void collect(const CantorTree& tree, Side side, const Levels& L, int n, std::size_t i, std::vector<NodeRef>& out) {
  if (L.take[static_cast<std::size_t>(n)][i]) {
    out.push_back({side, n, i});
    return;
  }
  const std::size_t M = tree.branching(n + 1);
  for (std::size_t j = 0; j < M; ++j) collect(tree, side, L, n + 1, i * M + j, out);
}

}  // namespace

ContentResult content_Mh_tree(const CantorTree& tree, Side side, const Gauge& g) {
  auto L = solve(tree, side, g);
  ContentResult r;
  r.value = L.best[0][0];
  collect(tree, side, L, 0, 0, r.cover);
  return r;
}

FrostmanResult frostman_tree(const CantorTree& tree, Side side, const Gauge& g) {
  // best[] is also the max flow through each subtree
  auto L = solve(tree, side, g);
  const int D = tree.depth();
  std::vector<double> alloc{L.best[0][0]};
  for (int n = 1; n <= D; ++n) {
    const auto nn = static_cast<std::size_t>(n);
    const std::size_t M = tree.branching(n);
    std::vector<double> next(L.best[nn].size(), 0.0);
    for (std::size_t i = 0; i < alloc.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < M; ++j) s += L.best[nn][i * M + j];
      if (s <= 0.0) continue;
      for (std::size_t j = 0; j < M; ++j) next[i * M + j] = alloc[i] * (L.best[nn][i * M + j] / s);
    }
    alloc = std::move(next);
  }
  FrostmanResult r;
  r.leaf_mass = alloc;
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < alloc.size(); ++i) {
    r.total += alloc[i];
    atoms.push_back({tree.center(side, D, i), alloc[i]});
  }
  r.measure = PlanarMeasure(std::move(atoms));
  // post-hoc feasibility: subtree sums against h
  std::vector<double> sub = alloc;
  for (int n = D; n >= 0; --n) {
    const auto nn = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < sub.size(); ++i)
      if (sub[i] > L.h[nn][i] * (1.0 + 1e-12)) ++r.violations;
    if (n == 0) break;
    const std::size_t M = tree.branching(n);
    std::vector<double> up(sub.size() / M, 0.0);
    for (std::size_t i = 0; i < sub.size(); ++i) up[i / M] += sub[i];
    sub = std::move(up);
  }
  return r;
}

}  // namespace qcap
