#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcap/cantor.hpp"
#include "qcap/geometry.hpp"
#include "qcap/numeric.hpp"

namespace qcap {

// 0 < alpha*p < 2, p > 1; throws IndexError otherwise
void check_wolff_indices(double alpha, double p);
inline double conjugate(double p) { return p / (p - 1.0); }

struct ProfileEntry {
  int label = 0;  // generation N, or dyadic exponent k
  double contribution = 0.0;
  double running_total = 0.0;
};

struct PotentialProfile {
  double alpha = 0.0;
  double p = 0.0;
  std::string source;      // e.g. "tree:target" or "measure"
  std::string scale_kind;  // "generation" or "dyadic"
  std::vector<ProfileEntry> entries;
  double tail = 0.0;  // analytic sub-leaf part, dyadic profiles only
  double total = 0.0;
  bool divergent = false;
  double divergence_rate = 0.0;  // slope of ln(running total) per scale

  double partial_sum(std::size_t n) const;  // first n entries
};

// Flags the profile divergent when each of the last `window` contributions
// is at least `fraction` of the running total at that point.
void flag_divergence(PotentialProfile& prof, double fraction = 0.1, std::size_t window = 10);

// sum_{N=1}^{depth} (m_N / r_N^{2 - alpha p})^{p' - 1}, r_N the generating
// radius of the side; identical along every root-to-leaf path.
PotentialProfile wolff_tree(const CantorTree& tree, Side side, double alpha, double p, int depth);
PotentialProfile wolff_tree(const CantorTree& tree, Side side, double alpha, double p);

// sum_{k = k_min}^{k_max} (mu(B(x,2^k)) / 2^{k(2 - alpha p)})^{p' - 1}, entries
// ordered from coarse to fine, plus the uniform-density integral below 2^{k_min}.
PotentialProfile wolff_dyadic(const PlanarMeasure& mu, Point x, double alpha, double p, int k_min, int k_max,
                              bool sub_leaf_tail = true);

// +infinity when x sits on an atom of positive weight
double riesz_potential(const PlanarMeasure& mu, Point x, double alpha);

// +infinity for collinear points
double circumradius(Point x, Point y, Point z);

struct CurvatureEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  double sup_pointwise = 0.0;
  std::uint64_t triples = 0;  // ordered triples evaluated
  std::uint64_t seed = 0;
  bool exact = false;
  std::vector<std::size_t> pointwise_atoms;  // atoms where c^2_mu(x) was evaluated
};

struct CurvatureOptions {
  std::size_t pointwise_points = 16;
  // exact pair sums for c^2_mu(x) while n^2 stays below this
  std::uint64_t pointwise_pair_budget = std::uint64_t{1} << 26;
};

// c^2(mu) over ordered triples of distinct atoms. Exact enumeration when
// n(n-1)(n-2) <= triples, weighted Monte Carlo otherwise.
CurvatureEstimate menger_curvature(const PlanarMeasure& mu, std::uint64_t triples, std::uint64_t seed,
                                   const CurvatureOptions& opts = {});

// c^2_mu(x) = sum over ordered pairs (y,z) of distinct atoms other than atom i
double pointwise_curvature(const PlanarMeasure& mu, std::size_t i);

// sup over points and k in [k_min, k_max] of mu(B(x, 2^k)) / 2^k
double linear_growth_constant(const PlanarMeasure& mu, int k_min, int k_max, const std::vector<Point>& points);

// sum_k (mu(B(x,2^k)) / 2^k)^2
double dyadic_curvature_proxy(const PlanarMeasure& mu, Point x, int k_min, int k_max);

}  // namespace qcap
