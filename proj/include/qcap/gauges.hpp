#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qcap/cantor.hpp"
#include "qcap/geometry.hpp"

namespace qcap {

struct NodeRef {
  Side side = Side::Source;
  int generation = 0;
  std::size_t index = 0;
};

struct Ball {
  Point center;
  double radius = 0.0;
  std::optional<NodeRef> node;  // set for tree balls
};

// Ball function eps(B) >= 0 with h(B) = r(B)^gamma * eps(B).
struct Gauge {
  std::function<double(const Ball&)> eps;
  double gamma = 1.0;
  double a = 0.0;
  std::string description;

  double h(const Ball& b) const { return std::pow(b.radius, gamma) * eps(b); }
};

double psi_a(Point x, double a);

// (1/t) sum_i w_i psi_a((y_i - x)/t)
double eps_mu_a(const PlanarMeasure& mu, Point x, double t, double a);

Gauge constant_gauge(double c = 1.0);
Gauge mu_a_gauge(const PlanarMeasure& mu, double a);  // gamma = 1
// eps(B) = c / r
Gauge inverse_radius_gauge(double c = 1.0);
// h(node ball) = node mass; rejects balls that are not tree nodes
Gauge tree_mass_gauge(const CantorTree& tree);

// Target node balls only: eps = eps_{nu,a}(matching source ball)^{2K/(K+1)},
// gamma = 2/(K+1). Any other ball throws "phi^{-1} known only on tree balls".
Gauge distorted_gauge(const CantorTree& tree, const PlanarMeasure& nu, double a, double K);

Ball node_ball(const CantorTree& tree, Side side, int generation, std::size_t index);

struct EpsIntegral {
  double sum = 0.0;    // sum_k eps(x, 2^k)^{p'-1}
  double wolff = 0.0;  // wolff_dyadic(mu, x, 1/p, p) over the same range
  double ratio = 0.0;  // sum / wolff
  bool divergent = false;
  bool wolff_divergent = false;
};
EpsIntegral eps_integral_check(const PlanarMeasure& mu, Point x, double a, double p, int k_min, int k_max);

struct DoublingReport {
  double C0 = 1.0;       // G1 constant
  double C0prime = 0.0;  // G2 constant
  std::size_t samples = 0;
  double threshold = 0.0;
  bool pass = false;
  std::size_t max_terms = 0;  // longest truncated G2 sum
  std::string note;
};

struct BallPair {
  Ball b1, b2;
};

// pairs with |x - y| <= 2r and r/2 <= s <= 2r around points of `around`
std::vector<BallPair> sample_g1_pairs(const std::vector<Point>& around, double r_min, double r_max, std::size_t count,
                                      std::uint64_t seed);

DoublingReport check_G1(const Gauge& g, const std::vector<BallPair>& pairs, double threshold);

// sum_{k>=0} 2^{-k} eps(x, 2^k r) / eps(x, r), stopped once 2^k r exceeds
// swallow_radius and the next term is negligible (at most 200 terms)
DoublingReport check_G2(const Gauge& g, const std::vector<Ball>& balls, double swallow_radius, double threshold);

// empirical C in lemma: sup_z (sum_k 2^{-bk} / ((2^{-k}|z|)^a + 1)) (|z|^m + 1)
double lemtec1_check(double a, double b, const std::vector<double>& z_grid);

struct ContentResult {
  double value = 0.0;
  std::vector<NodeRef> cover;  // optimal tree-aligned antichain
};

// cost(node) = min(h(node), sum of children costs)
ContentResult content_Mh_tree(const CantorTree& tree, Side side, const Gauge& g);

struct FrostmanResult {
  std::vector<double> leaf_mass;
  double total = 0.0;
  PlanarMeasure measure;  // atoms at leaf centers
  std::size_t violations = 0;
};

// leaf allocation maximizing total mass under nu(subtree) <= h(node ball)
FrostmanResult frostman_tree(const CantorTree& tree, Side side, const Gauge& g);

}  // namespace qcap
