#include "qcap/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qcap/error.hpp"

namespace qcap {

CapacityIndices CapacityIndices::make(double alpha, double p, std::optional<double> K) {
  check_wolff_indices(alpha, p);
  if (K && !(*K >= 1.0)) throw IndexError("K must be >= 1");
  CapacityIndices ix;
  ix.alpha = alpha;
  ix.p = p;
  ix.pprime = conjugate(p);
  ix.homogeneity = 2.0 - alpha * p;
  ix.K = K;
  return ix;
}

CapacityIndices theorem1_indices(double K) {
  if (!(K >= 1.0) || !std::isfinite(K)) throw IndexError("K must be >= 1");
  return CapacityIndices::make(2.0 * K / (2.0 * K + 1.0), (2.0 * K + 1.0) / (K + 1.0), K);
}

Teocap2 teocap2_indices(double alpha, double p, double K) {
  check_wolff_indices(alpha, p);
  if (!(K >= 1.0) || !std::isfinite(K)) throw IndexError("K must be >= 1");
  const double t = 2.0 - alpha * p;
  const double den = 2.0 * K - K * t + t;
  const double mid = 2.0 * K * p * t - 3.0 * K * t + 2.0 * K + t;
  Teocap2 r;
  r.t = t;
  r.tprime = 2.0 * t / den;
  const double beta = (4.0 * K - 2.0 * K * t) / mid;
  const double q = mid / den;
  r.indices = CapacityIndices::make(beta, q, K);
  return r;
}

const char* to_string(Direction d) { return d == Direction::LowerBound ? "lower_bound" : "comparability_proxy"; }

CapacityEstimate wolff_capacity_lower(const CantorTree& tree, Side side, const CapacityIndices& ix) {
  auto prof = wolff_tree(tree, side, ix.alpha, ix.p);
  CapacityEstimate e;
  e.direction = Direction::LowerBound;
  e.indices = ix;
  e.convention = "wolff";
  e.normalization.sup = prof.total;
  e.normalization.query_set = std::string("tree-path:") + to_string(side);
  e.normalization.seed = tree.seed();
  e.divergent = prof.divergent;
  e.divergence_rate = prof.divergence_rate;
  if (prof.divergent || !std::isfinite(prof.total)) return e;
  // depth 0: no generation terms, nothing normalizes the mass
  if (prof.total <= 0.0) {
    e.value = INFINITY;
    return e;
  }
  e.value = std::exp(tree.log_total_mass() - std::log(prof.total) / (ix.pprime - 1.0));
  return e;
}

QuerySet standard_query_set(const CantorTree& tree, Side side, const PlanarMeasure& mu, std::size_t extra,
                            std::uint64_t seed) {
  QuerySet q;
  q.seed = seed;
  const int D = tree.depth();
  const std::size_t leaves = tree.node_count(D);
  for (std::size_t i = 0; i < leaves; ++i) q.points.push_back(tree.center(side, D, i));
  Rng rng(mix_seed(seed, 3));
  for (std::size_t k = 0; k < extra && !mu.empty(); ++k) q.points.push_back(mu.atoms()[rng.below(mu.size())].pt);
  std::ostringstream os;
  os << "leaf-centers(" << leaves << ")+atoms(" << extra << ",seed=" << seed << ")";
  q.id = os.str();
  return q;
}

DyadicRange dyadic_range_for(const PlanarMeasure& mu, const std::vector<Point>& points, double finest) {
  if (!(finest > 0.0)) throw Error("finest scale must be positive");
  double far = 0.0;
  for (const auto& x : points)
    for (const auto& a : mu.atoms()) far = std::max(far, dist(x, a.pt));
  DyadicRange r;
  r.k_max = far > 0.0 ? static_cast<int>(std::ceil(std::log2(far))) : 0;
  r.k_min = static_cast<int>(std::floor(std::log2(finest)));
  r.k_max = std::max(r.k_max, r.k_min);
  return r;
}

CapacityEstimate wolff_capacity_lower(const PlanarMeasure& mu, const CapacityIndices& ix, const QuerySet& q,
                                      const DyadicRange& range) {
  if (q.points.empty()) throw Error("query set is empty");
  CapacityEstimate e;
  e.direction = Direction::LowerBound;
  e.indices = ix;
  e.convention = "wolff";
  e.normalization.query_set = q.id;
  e.normalization.seed = q.seed;
  double S = 0.0;
  for (const auto& x : q.points) {
    auto prof = wolff_dyadic(mu, x, ix.alpha, ix.p, range.k_min, range.k_max);
    if (prof.divergent) {
      e.divergent = true;
      e.divergence_rate = std::max(e.divergence_rate, prof.divergence_rate);
    }
    S = std::max(S, prof.total);
  }
  e.normalization.sup = S;
  if (e.divergent || mu.total_mass() == 0.0) return e;
  e.value = mu.total_mass() * std::pow(S, -1.0 / (ix.pprime - 1.0));
  return e;
}

namespace {

struct Box {
  double x0, y0, x1, y1;
};

double overlap(const Box& a, const Box& b) {
  double w = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  double h = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  return (w > 0 && h > 0) ? w * h : 0.0;
}

}  // namespace

double riesz_energy_norm(const PlanarMeasure& mu, double alpha, double p, const QuadratureSpec& spec) {
  check_wolff_indices(alpha, p);
  if (spec.fine_cells < 1 || spec.coarse_cells < 1 || !(spec.far_factor > 1.0))
    throw Error("quadrature needs positive cell counts and far_factor > 1");
  const auto& at = mu.atoms();
  const double mass = mu.total_mass();
  if (mass == 0.0) return 0.0;
  const double pp = conjugate(p);
  const double k2 = 2.0 - alpha;

  Box bb{INFINITY, INFINITY, -INFINITY, -INFINITY};
  for (const auto& a : at) {
    bb.x0 = std::min(bb.x0, a.pt.x);
    bb.y0 = std::min(bb.y0, a.pt.y);
    bb.x1 = std::max(bb.x1, a.pt.x);
    bb.y1 = std::max(bb.y1, a.pt.y);
  }
  const double D = std::max(mu.diameter(), std::hypot(bb.x1 - bb.x0, bb.y1 - bb.y0));
  if (!(D > 0.0)) throw Error("direct quadrature needs a support of positive diameter");
  const Point mid{0.5 * (bb.x0 + bb.x1), 0.5 * (bb.y0 + bb.y1)};
  const double side = std::max(bb.x1 - bb.x0, bb.y1 - bb.y0) + 0.5 * D;
  const Box fine{mid.x - 0.5 * side, mid.y - 0.5 * side, mid.x + 0.5 * side, mid.y + 0.5 * side};
  const int nf = spec.fine_cells;
  const double hf = side / nf;
  const double a_cell = hf / std::sqrt(std::numbers::pi);
  const double k_self = 2.0 * std::pow(a_cell, alpha - 2.0) / alpha;  // disk average of r^{alpha-2}

  std::vector<long> cell_of(at.size());
  for (std::size_t i = 0; i < at.size(); ++i) {
    long cx = std::clamp(static_cast<long>((at[i].pt.x - fine.x0) / hf), 0L, static_cast<long>(nf - 1));
    long cy = std::clamp(static_cast<long>((at[i].pt.y - fine.y0) / hf), 0L, static_cast<long>(nf - 1));
    cell_of[i] = cy * nf + cx;
  }

  double energy = 0.0;
  for (int iy = 0; iy < nf; ++iy)
    for (int ix = 0; ix < nf; ++ix) {
      const Point x{fine.x0 + (ix + 0.5) * hf, fine.y0 + (iy + 0.5) * hf};
      const long id = static_cast<long>(iy) * nf + ix;
      double I = 0.0;
      for (std::size_t i = 0; i < at.size(); ++i)
        I += at[i].w * (cell_of[i] == id ? k_self : std::pow(dist(x, at[i].pt), -k2));
      energy += std::pow(I, pp) * hf * hf;
    }

  const double L = spec.far_factor * D;
  const int nc = spec.coarse_cells;
  const double hc = 2.0 * L / nc;
  for (int iy = 0; iy < nc; ++iy)
    for (int ix = 0; ix < nc; ++ix) {
      const Box c{mid.x - L + ix * hc, mid.y - L + iy * hc, mid.x - L + (ix + 1) * hc, mid.y - L + (iy + 1) * hc};
      const Point x{0.5 * (c.x0 + c.x1), 0.5 * (c.y0 + c.y1)};
      if (dist(x, mid) > L) continue;
      const double area = hc * hc - overlap(c, fine);
      if (area <= 0.0) continue;
      double I = 0.0;
      for (const auto& a : at) I += a.w * std::pow(dist(x, a.pt), -k2);
      energy += std::pow(I, pp) * area;
    }

  // beyond |x - mid| = L: I(x) <= mass / (|x - mid| - D)^{2-alpha}
  const double g = k2 * pp;
  const double v = L - D;
  energy += 2.0 * std::numbers::pi * std::pow(mass, pp) *
            (std::pow(v, 2.0 - g) / (g - 2.0) + D * std::pow(v, 1.0 - g) / (g - 1.0));
  return std::pow(energy, 1.0 / pp);
}

CapacityEstimate direct_capacity_lower(const PlanarMeasure& mu, const CapacityIndices& ix,
                                       const QuadratureSpec& spec) {
  CapacityEstimate e;
  e.direction = Direction::LowerBound;
  e.indices = ix;
  e.convention = "definition";
  std::ostringstream os;
  os << "grid(" << spec.fine_cells << "+" << spec.coarse_cells << ",far=" << spec.far_factor << ")";
  e.normalization.query_set = os.str();
  if (mu.total_mass() == 0.0) return e;
  const double lam = riesz_energy_norm(mu, ix.alpha, ix.p, spec);
  e.normalization.sup = lam;
  e.value = std::pow(mu.total_mass() / lam, ix.p);
  return e;
}

CapacityEstimate melnikov_gamma_lower(const PlanarMeasure& mu, const CurvatureEstimate& curv, double growth) {
  if (!(growth > 0.0) || !std::isfinite(growth))
    throw Error("linear growth constant must be finite and positive; realize the measure more densely");
  if (!(curv.sup_pointwise >= 0.0) || !std::isfinite(curv.sup_pointwise))
    throw Error("pointwise curvature sup must be finite");
  const double c_growth = 1.0 / growth;
  const double c_curv = curv.sup_pointwise > 0.0 ? 1.0 / std::sqrt(curv.sup_pointwise) : INFINITY;
  CapacityEstimate e;
  e.direction = Direction::LowerBound;
  e.indices = CapacityIndices::make(2.0 / 3.0, 1.5, 1.0);
  e.convention = "melnikov";
  e.normalization.sup = growth;
  e.normalization.query_set = "growth+pointwise-curvature(" + std::to_string(curv.pointwise_atoms.size()) + ")";
  e.normalization.seed = curv.seed;
  e.value = std::min(c_growth, c_curv) * mu.total_mass();
  return e;
}

}  // namespace qcap
