#include "qcap/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "qcap/error.hpp"

namespace qcap {

void check_wolff_indices(double alpha, double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw IndexError("p must exceed 1");
  const double ap = alpha * p;
  if (!(ap > 0.0 && ap < 2.0)) {
    std::ostringstream os;
    os << "alpha*p = " << ap << " must lie in (0,2)";
    throw IndexError(os.str());
  }
}

double PotentialProfile::partial_sum(std::size_t n) const {
  if (n == 0) return 0.0;
  if (n > entries.size()) throw Error("partial sum beyond profile length");
  return entries[n - 1].running_total;
}

void flag_divergence(PotentialProfile& prof, double fraction, std::size_t window) {
  prof.divergent = false;
  prof.divergence_rate = 0.0;
  const auto& e = prof.entries;
  if (e.size() < window) return;
  for (std::size_t i = e.size() - window; i < e.size(); ++i)
    if (!(e[i].contribution >= fraction * e[i].running_total) || e[i].running_total <= 0.0) return;
  std::vector<double> x, y;
  for (std::size_t i = e.size() - window; i < e.size(); ++i) {
    x.push_back(static_cast<double>(i));
    y.push_back(std::log(e[i].running_total));
  }
  prof.divergent = true;
  prof.divergence_rate = fit_line(x, y).slope;
}

PotentialProfile wolff_tree(const CantorTree& tree, Side side, double alpha, double p, int depth) {
  check_wolff_indices(alpha, p);
  if (depth < 0 || depth > tree.depth()) throw Error("depth out of range for tree");
  const double t = 2.0 - alpha * p;
  const double e = conjugate(p) - 1.0;
  PotentialProfile prof;
  prof.alpha = alpha;
  prof.p = p;
  prof.source = std::string("tree:") + to_string(side);
  prof.scale_kind = "generation";
  double acc = 0.0;
  for (int n = 1; n <= depth; ++n) {
    double c = std::exp(e * (tree.log_mass(n) - t * tree.log_radius(side, n)));
    acc += c;
    prof.entries.push_back({n, c, acc});
  }
  prof.total = acc;
  flag_divergence(prof);
  return prof;
}

PotentialProfile wolff_tree(const CantorTree& tree, Side side, double alpha, double p) {
  return wolff_tree(tree, side, alpha, p, tree.depth());
}

PotentialProfile wolff_dyadic(const PlanarMeasure& mu, Point x, double alpha, double p, int k_min, int k_max,
                              bool sub_leaf_tail) {
  check_wolff_indices(alpha, p);
  if (k_min > k_max) throw Error("k_min must not exceed k_max");
  if (mu.empty()) throw Error("measure has no atoms");
  const double t = 2.0 - alpha * p;
  const double e = conjugate(p) - 1.0;
  RadialProfile rp(mu, x);
  PotentialProfile prof;
  prof.alpha = alpha;
  prof.p = p;
  prof.source = "measure";
  prof.scale_kind = "dyadic";
  double acc = 0.0;
  for (int k = k_max; k >= k_min; --k) {
    const double r = std::ldexp(1.0, k);
    const double m = rp.mass_within(r);
    double c = m > 0.0 ? std::pow(m / std::pow(r, t), e) : 0.0;
    acc += c;
    prof.entries.push_back({k, c, acc});
  }
  if (sub_leaf_tail) {
    const double rho = std::ldexp(1.0, k_min);
    const double m = rp.mass_within(rho);
    // int_0^rho (m (r/rho)^2 r^{-t})^e dr/r
    if (m > 0.0) prof.tail = std::pow(m / std::pow(rho, t), e) / ((2.0 - t) * e);
  }
  prof.total = acc + prof.tail;
  flag_divergence(prof);
  return prof;
}

double riesz_potential(const PlanarMeasure& mu, Point x, double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw IndexError("alpha must lie in (0,2)");
  double s = 0.0;
  for (const auto& a : mu.atoms()) {
    if (a.w == 0.0) continue;
    double r = dist(a.pt, x);
    if (r == 0.0) return INFINITY;
    s += a.w / std::pow(r, 2.0 - alpha);
  }
  return s;
}

double circumradius(Point x, Point y, Point z) {
  const Point u = y - x, v = z - x;
  const double a = dist(x, y), b = dist(y, z), c = dist(z, x);
  const double cross = u.x * v.y - u.y * v.x;
  // relative collinearity test: |u x v| against |u||v|
  if (std::abs(cross) <= 8.0 * std::numeric_limits<double>::epsilon() * a * c) return INFINITY;
  return a * b * c / (2.0 * std::abs(cross));
}

namespace {

// 4 (u x v)^2 / (|u|^2 |w|^2 |v|^2), squared lengths so no square roots enter
double inv_r2(Point x, Point y, Point z) {
  const Point u = y - x, v = z - x, w = z - y;
  const double uu = u.x * u.x + u.y * u.y, vv = v.x * v.x + v.y * v.y, ww = w.x * w.x + w.y * w.y;
  const double cross = u.x * v.y - u.y * v.x;
  const double tol = 8.0 * std::numeric_limits<double>::epsilon();
  if (cross * cross <= tol * tol * uu * vv) return 0.0;
  return 4.0 * cross * cross / (uu * vv * ww);
}

std::vector<std::size_t> pick_points(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (k >= n) return idx;
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

class WeightedSampler {
 public:
  explicit WeightedSampler(const PlanarMeasure& mu) {
    double acc = 0.0;
    for (const auto& a : mu.atoms()) cum_.push_back(acc += a.w);
  }
  std::size_t draw(Rng& rng) const {
    double u = rng.uniform() * cum_.back();
    auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cum_.begin()), cum_.size() - 1);
  }

 private:
  std::vector<double> cum_;
};

}  // namespace

double pointwise_curvature(const PlanarMeasure& mu, std::size_t i) {
  const auto& a = mu.atoms();
  if (i >= a.size()) throw Error("atom index out of range");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (j == i) continue;
    for (std::size_t k = j + 1; k < a.size(); ++k) {
      if (k == i) continue;
      s += a[j].w * a[k].w * inv_r2(a[i].pt, a[j].pt, a[k].pt);
    }
  }
  return 2.0 * s;
}

CurvatureEstimate menger_curvature(const PlanarMeasure& mu, std::uint64_t triples, std::uint64_t seed,
                                   const CurvatureOptions& opts) {
  const auto& a = mu.atoms();
  const std::size_t n = a.size();
  if (n < 3) throw Error("curvature needs at least 3 atoms");
  CurvatureEstimate est;
  est.seed = seed;
  const double nd = static_cast<double>(n);
  const double all = nd * (nd - 1) * (nd - 2);
  if (all <= static_cast<double>(triples)) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k) s += a[i].w * a[j].w * a[k].w * inv_r2(a[i].pt, a[j].pt, a[k].pt);
    est.value = 6.0 * s;
    est.exact = true;
    est.triples = static_cast<std::uint64_t>(all);
  } else {
    if (triples == 0) throw Error("Monte Carlo curvature needs a positive triple count");
    WeightedSampler ws(mu);
    Rng rng(mix_seed(seed, 1));
    const double M3 = std::pow(mu.total_mass(), 3);
    double mean = 0.0, m2 = 0.0;
    for (std::uint64_t s = 0; s < triples; ++s) {
      std::size_t i = ws.draw(rng), j = ws.draw(rng), k = ws.draw(rng);
      double v = (i == j || j == k || i == k) ? 0.0 : M3 * inv_r2(a[i].pt, a[j].pt, a[k].pt);
      double dlt = v - mean;
      mean += dlt / static_cast<double>(s + 1);
      m2 += dlt * (v - mean);
    }
    est.value = mean;
    est.stderr_ = triples > 1 ? std::sqrt(m2 / static_cast<double>(triples - 1) / static_cast<double>(triples)) : 0.0;
    est.triples = triples;
  }

  est.pointwise_atoms = pick_points(n, opts.pointwise_points, mix_seed(seed, 2));
  const bool exact_pairs = nd * nd <= static_cast<double>(opts.pointwise_pair_budget);
  for (std::size_t i : est.pointwise_atoms) {
    double c2 = 0.0;
    if (exact_pairs) {
      c2 = pointwise_curvature(mu, i);
    } else {
      WeightedSampler ws(mu);
      Rng rng(mix_seed(seed, 1000 + i));
      const double M2 = mu.total_mass() * mu.total_mass();
      const std::uint64_t draws = opts.pointwise_pair_budget / 64;
      double s = 0.0;
      for (std::uint64_t d = 0; d < draws; ++d) {
        std::size_t j = ws.draw(rng), k = ws.draw(rng);
        if (j != i && k != i && j != k) s += inv_r2(a[i].pt, a[j].pt, a[k].pt);
      }
      c2 = M2 * s / static_cast<double>(draws);
    }
    est.sup_pointwise = std::max(est.sup_pointwise, c2);
  }
  return est;
}

double linear_growth_constant(const PlanarMeasure& mu, int k_min, int k_max, const std::vector<Point>& points) {
  if (mu.empty()) throw Error("measure has no atoms");
  if (k_min > k_max) throw Error("k_min must not exceed k_max");
  double sup = 0.0;
  for (const auto& x : points) {
    RadialProfile rp(mu, x);
    for (int k = k_min; k <= k_max; ++k) {
      const double r = std::ldexp(1.0, k);
      sup = std::max(sup, rp.mass_within(r) / r);
    }
  }
  return sup;
}

double dyadic_curvature_proxy(const PlanarMeasure& mu, Point x, int k_min, int k_max) {
  if (k_min > k_max) throw Error("k_min must not exceed k_max");
  RadialProfile rp(mu, x);
  double s = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    const double r = std::ldexp(1.0, k);
    const double th = rp.mass_within(r) / r;
    s += th * th;
  }
  return s;
}

}  // namespace qcap
