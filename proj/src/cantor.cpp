#include "qcap/cantor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qcap/error.hpp"

namespace qcap {

namespace {

constexpr double kTol = 1e-12;

std::string level_prefix(int level) { return "level " + std::to_string(level) + ": "; }

bool disjoint_inside(const std::vector<Point>& c, double rho) {
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (norm(c[i]) + rho > 1.0 + kTol) return false;
    for (std::size_t j = 0; j < i; ++j)
      if (dist(c[i], c[j]) < 2.0 * rho * (1.0 - kTol)) return false;
  }
  return true;
}

std::vector<Point> ring(std::size_t n, double radius, double phase) {
  std::vector<Point> out;
  for (std::size_t k = 0; k < n; ++k) {
    double a = phase + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    out.push_back({radius * std::cos(a), radius * std::sin(a)});
  }
  return out;
}

std::vector<Point> hex_candidates(std::size_t M, double rho, Point shift, double rot) {
  const double step = 2.0 * rho;
  const double h = step * std::sqrt(3.0) / 2.0;
  const double lim = 1.0 - rho;
  const int n = static_cast<int>(std::ceil(1.0 / std::min(step, h))) + 2;
  const double c = std::cos(rot), s = std::sin(rot);
  std::vector<Point> pts;
  for (int i = -n; i <= n; ++i)
    for (int j = -n; j <= n; ++j) {
      Point p{step * (i + 0.5 * j) + shift.x, h * j + shift.y};
      Point q{c * p.x - s * p.y, s * p.x + c * p.y};
      if (norm(q) <= lim * (1.0 + kTol)) pts.push_back(q);
    }
  if (pts.size() < M) return {};
  std::stable_sort(pts.begin(), pts.end(), [](Point a, Point b) { return norm(a) < norm(b); });
  pts.resize(M);
  return pts;
}

}  // namespace

const char* to_string(Side s) { return s == Side::Source ? "source" : "target"; }

Side parse_side(const std::string& s) {
  if (s == "source") return Side::Source;
  if (s == "target") return Side::Target;
  throw Error("side must be 'source' or 'target', got '" + s + "'");
}

LevelSchedule LevelSchedule::from_branching(int level, double M, double eps, double d, double K) {
  if (!(M >= 1.0)) throw ScheduleError(level_prefix(level) + "branching M must be >= 1");
  if (!(eps >= 0.0 && eps < 1.0)) throw ScheduleError(level_prefix(level) + "eps must lie in [0,1)");
  LevelSchedule s;
  s.level = level;
  s.log_M = std::log(M);
  s.eps = eps;
  s.d = d;
  s.K = K;
  s.log_R = 0.5 * (std::log1p(-eps) - s.log_M);
  return s;
}

LevelSchedule LevelSchedule::from_radius(int level, double log_R, double eps, double d, double K) {
  if (!(eps >= 0.0 && eps < 1.0)) throw ScheduleError(level_prefix(level) + "eps must lie in [0,1)");
  LevelSchedule s;
  s.level = level;
  s.log_R = log_R;
  s.eps = eps;
  s.d = d;
  s.K = K;
  s.log_M = std::log1p(-eps) - 2.0 * log_R;
  return s;
}

bool LevelSchedule::integral_branching() const {
  if (log_M > 52.0 * std::numbers::ln2) return false;
  double m = M();
  return std::abs(m - std::round(m)) <= 1e-9 * m;
}

std::size_t LevelSchedule::branching() const {
  if (!integral_branching())
    throw ScheduleError(level_prefix(level) + "branching M = " + std::to_string(M()) + " is not an integer");
  return static_cast<std::size_t>(std::llround(M()));
}

void LevelSchedule::validate(double max_ratio) const {
  const auto pre = level_prefix(level);
  if (level < 1) throw ScheduleError(pre + "level index must be positive");
  if (!(K >= 1.0) || !std::isfinite(K)) throw ScheduleError(pre + "K must be >= 1");
  if (!(eps >= 0.0 && eps < 1.0)) throw ScheduleError(pre + "eps must lie in [0,1)");
  if (!(d >= 1.0) || !std::isfinite(d)) throw ScheduleError(pre + "d must be >= 1");
  if (!(log_M >= -kTol) || !std::isfinite(log_M)) throw ScheduleError(pre + "branching M must be >= 1");
  if (!(max_ratio > 0.0 && max_ratio <= 1.0)) throw ScheduleError(pre + "smallness bound must lie in (0,1]");
  const double lim = std::log(max_ratio) + kTol;
  if (log_R > lim) {
    std::ostringstream os;
    os.precision(6);
    os << pre << "R = " << R() << " exceeds smallness bound " << max_ratio;
    throw ScheduleError(os.str());
  }
  if (log_sigma() > lim) {
    std::ostringstream os;
    os.precision(6);
    os << pre << "sigma = R*d = " << sigma() << " exceeds smallness bound " << max_ratio;
    throw ScheduleError(os.str());
  }
}

double CantorTree::log_radius(Side side, int n) const {
  const auto& g = generation(n);
  return side == Side::Source ? g.log_s : g.log_t;
}

double CantorTree::log_protect_radius(Side side, int n) const {
  const auto& g = generation(n);
  return side == Side::Source ? g.log_s_protect : g.log_t_protect;
}

std::size_t CantorTree::branching(int n) const {
  if (n < 1 || n > depth_) throw Error("generation out of range");
  return sched_[static_cast<std::size_t>(n - 1)].branching();
}

std::size_t CantorTree::node_count(int n) const {
  if (n < 0 || n > depth_) throw Error("generation out of range");
  if (!enumerable_) throw RealizationError("tree nodes are not enumerable (non-integral or too many)");
  std::size_t c = 1;
  for (int k = 1; k <= n; ++k) c *= branching(k);
  return c;
}

std::vector<std::size_t> CantorTree::path(int n, std::size_t index) const {
  if (index >= node_count(n)) throw Error("node index out of range");
  std::vector<std::size_t> p(static_cast<std::size_t>(n));
  for (int k = n; k >= 1; --k) {
    std::size_t m = branching(k);
    p[static_cast<std::size_t>(k - 1)] = index % m;
    index /= m;
  }
  return p;
}

Point CantorTree::center(Side side, int n, std::size_t index) const {
  if (!realized_) throw RealizationError("tree has no realized centers");
  const auto& v = side == Side::Source ? src_centers_ : tgt_centers_;
  return v.at(static_cast<std::size_t>(n)).at(index);
}

const std::vector<Point>& CantorTree::offsets(int n) const {
  if (offsets_.empty()) throw RealizationError("tree has no packed offsets");
  return offsets_.at(static_cast<std::size_t>(n));
}

CantorTree CantorTree::scaled(double lambda) const {
  if (!(lambda > 0.0)) throw Error("scale factor must be positive");
  CantorTree t = *this;
  const double l = std::log(lambda);
  for (auto& g : t.gens_) {
    g.log_s += l;
    g.log_t += l;
    g.log_s_protect += l;
    g.log_t_protect += l;
  }
  for (auto* vv : {&t.src_centers_, &t.tgt_centers_})
    for (auto& v : *vv)
      for (auto& p : v) p = lambda * p;
  return t;
}

CantorTree build_tree(std::vector<LevelSchedule> schedules, int depth, const BuildOptions& opts) {
  if (depth < 0) throw ScheduleError("depth must be nonnegative");
  if (static_cast<std::size_t>(depth) > schedules.size())
    throw ScheduleError("depth " + std::to_string(depth) + " exceeds the " + std::to_string(schedules.size()) +
                        " scheduled levels");
  CantorTree t;
  t.depth_ = depth;
  t.seed_ = opts.seed;
  t.K_ = schedules.empty() ? 1.0 : schedules.front().K;
  for (std::size_t i = 0; i < schedules.size(); ++i) {
    if (schedules[i].level != static_cast<int>(i) + 1)
      throw ScheduleError("level " + std::to_string(i + 1) + ": schedule carries level index " +
                          std::to_string(schedules[i].level));
    if (schedules[i].K != t.K_) throw ScheduleError(level_prefix(schedules[i].level) + "K differs across levels");
  }
  schedules.resize(static_cast<std::size_t>(depth));
  for (const auto& s : schedules) s.validate(opts.max_ratio);
  t.sched_ = std::move(schedules);

  double tail = 0.0;
  for (const auto& s : t.sched_) tail += std::log1p(-s.eps);
  t.log_total_mass_ = tail;

  t.gens_.resize(static_cast<std::size_t>(depth) + 1);
  t.gens_[0].log_mass = tail;
  double log_r2 = 0.0;
  for (int n = 1; n <= depth; ++n) {
    const auto& s = t.sched_[static_cast<std::size_t>(n - 1)];
    const auto& p = t.gens_[static_cast<std::size_t>(n - 1)];
    auto& g = t.gens_[static_cast<std::size_t>(n)];
    g.n = n;
    g.log_s = p.log_s + t.K_ * s.log_sigma() + s.log_R;
    g.log_t = p.log_t + s.log_sigma() + s.log_R;
    g.log_s_protect = p.log_s + s.log_R;
    g.log_t_protect = p.log_t + s.log_R;
    log_r2 += 2.0 * s.log_R;
    tail -= std::log1p(-s.eps);
    g.log_mass = log_r2 + tail;
    g.log_count = p.log_count + s.log_M;
  }

  bool integral = std::all_of(t.sched_.begin(), t.sched_.end(), [](const auto& s) { return s.integral_branching(); });
  if (integral) {
    double nodes = 1.0, total = 1.0;
    for (const auto& s : t.sched_) {
      nodes *= s.M();
      total += nodes;
    }
    t.enumerable_ = total <= static_cast<double>(opts.max_nodes);
  }

  if (opts.realize && !t.enumerable_)
    throw RealizationError("tree with more than " + std::to_string(opts.max_nodes) + " nodes cannot be realized");

  if (opts.check_packing || opts.realize) {
    t.offsets_.resize(static_cast<std::size_t>(depth) + 1);
    for (int n = 1; n <= depth; ++n) {
      const auto& s = t.sched_[static_cast<std::size_t>(n - 1)];
      if (!s.integral_branching())
        throw PackingError(level_prefix(n) + "branching M = " + std::to_string(s.M()) +
                           " is not an integer; build without packing for abstract trees");
      try {
        t.offsets_[static_cast<std::size_t>(n)] =
            pack_disks(s.branching(), s.R(), mix_seed(opts.seed, static_cast<std::uint64_t>(n)));
      } catch (const PackingError& e) {
        throw PackingError(level_prefix(n) + e.what());
      }
    }
  }

  if (opts.realize) {
    t.src_centers_.assign(static_cast<std::size_t>(depth) + 1, {});
    t.tgt_centers_.assign(static_cast<std::size_t>(depth) + 1, {});
    t.src_centers_[0] = {Point{}};
    t.tgt_centers_[0] = {Point{}};
    for (int n = 1; n <= depth; ++n) {
      const auto nn = static_cast<std::size_t>(n);
      const auto& off = t.offsets_[nn];
      const double rs = std::exp(t.gens_[nn - 1].log_s), rt = std::exp(t.gens_[nn - 1].log_t);
      const auto& ps = t.src_centers_[nn - 1];
      const auto& pt = t.tgt_centers_[nn - 1];
      auto& cs = t.src_centers_[nn];
      auto& ct = t.tgt_centers_[nn];
      cs.reserve(ps.size() * off.size());
      ct.reserve(pt.size() * off.size());
      for (std::size_t i = 0; i < ps.size(); ++i)
        for (const auto& o : off) {
          cs.push_back(ps[i] + rs * o);
          ct.push_back(pt[i] + rt * o);
        }
    }
    t.realized_ = true;
  }
  return t;
}

std::vector<LevelSchedule> schedule_example2(double K, int depth, double M, double eps, double max_ratio) {
  if (!(K >= 1.0)) throw ScheduleError("K must be >= 1");
  std::vector<LevelSchedule> out;
  for (int j = 1; j <= depth; ++j) {
    auto s = LevelSchedule::from_branching(j, M, eps, (j + 1.0) / j, K);
    s.validate(max_ratio);
    out.push_back(s);
  }
  return out;
}

double sharpness_d(double K, double q, int j) {
  if (!(K >= 1.0)) throw ScheduleError("K must be >= 1");
  if (!(q > (2.0 * K + 1.0) / (K + 1.0)) || !std::isfinite(q)) throw ScheduleError("indices not in sharpness regime");
  const double qp1 = 1.0 / (q - 1.0);  // q' - 1
  return std::pow((j + 1.0) / j, (K + 1.0) / (2.0 * K * qp1));
}

std::vector<LevelSchedule> schedule_sharpness(double K, double q, int depth, double M, double eps, double max_ratio) {
  std::vector<LevelSchedule> out;
  sharpness_d(K, q, 1);
  for (int j = 1; j <= depth; ++j) {
    auto s = LevelSchedule::from_branching(j, M, eps, sharpness_d(K, q, j), K);
    s.validate(max_ratio);
    out.push_back(s);
  }
  return out;
}

std::vector<LevelSchedule> shrink_source_radii(std::vector<LevelSchedule> schedules,
                                               const std::function<double(int)>& log_bound) {
  double log_s = 0.0;
  for (auto& s : schedules) {
    const double K = s.K;
    double natural = log_s + K * s.log_sigma() + s.log_R;
    double bound = log_bound(s.level);
    if (natural > bound) {
      // log s_N = log s_{N-1} + (K+1) log R + K log d
      double log_R = (bound - log_s - K * std::log(s.d)) / (K + 1.0);
      s = LevelSchedule::from_radius(s.level, log_R, s.eps, s.d, K);
      natural = log_s + K * s.log_sigma() + s.log_R;
    }
    log_s = natural;
  }
  return schedules;
}

std::vector<LevelSchedule> schedule_example3(double K, int depth, double M, double eps, double max_ratio) {
  return shrink_source_radii(schedule_example2(K, depth, M, eps, max_ratio),
                             [](int n) { return -std::exp(static_cast<double>(n)); });
}

constexpr std::size_t kGreedyMax = 512;

std::vector<Point> pack_disks(std::size_t M, double rho, std::uint64_t seed) {
  if (M == 0) throw PackingError("need at least one disk");
  if (!(rho > 0.0 && rho <= 1.0)) throw PackingError("radius fraction must lie in (0,1]");
  const double area = static_cast<double>(M) * rho * rho;
  if (area > 1.0 + kTol) {
    std::ostringstream os;
    os.precision(6);
    os << "area bound violated: M*rho^2 = " << area << " > 1";
    throw PackingError(os.str());
  }
  if (M == 1) return {Point{}};
  // no packing of congruent disks in a convex region beats the hexagonal density
  if (area > std::numbers::pi / std::sqrt(12.0) + kTol) {
    std::ostringstream os;
    os.precision(6);
    os << "density bound violated: M*rho^2 = " << area << " > pi/sqrt(12)";
    throw PackingError(os.str());
  }

  Rng rng(seed);
  const double phase = 2.0 * std::numbers::pi * rng.uniform();
  const double delta = 1.0 - rho;
  const double pi = std::numbers::pi;

  if (delta * std::sin(pi / static_cast<double>(M)) >= rho * (1.0 - kTol)) {
    auto c = ring(M, delta, phase);
    if (disjoint_inside(c, rho)) return c;
  }
  if (M >= 3 && delta >= 2.0 * rho * (1.0 - kTol) &&
      delta * std::sin(pi / static_cast<double>(M - 1)) >= rho * (1.0 - kTol)) {
    auto c = ring(M - 1, delta, phase);
    c.insert(c.begin(), Point{});
    if (disjoint_inside(c, rho)) return c;
  }
  const Point shifts[] = {{0.0, 0.0}, {rho, 0.0}, {0.5 * rho, rho / std::sqrt(3.0)}, {0.0, rho}};
  for (const auto& sh : shifts) {
    for (double rot : {0.0, phase}) {
      auto c = hex_candidates(M, rho, sh, rot);
      if (!c.empty() && disjoint_inside(c, rho)) return c;
    }
  }
  // seeded greedy placement; quadratic per try, so only for modest M
  for (int attempt = 0; M <= kGreedyMax && attempt < 20; ++attempt) {
    std::vector<Point> c;
    for (std::size_t tries = 0; c.size() < M && tries < 2000 * M; ++tries) {
      double r = delta * std::sqrt(rng.uniform());
      double a = 2.0 * pi * rng.uniform();
      Point p{r * std::cos(a), r * std::sin(a)};
      bool ok = true;
      for (const auto& q : c)
        if (dist(p, q) < 2.0 * rho) {
          ok = false;
          break;
        }
      if (ok) c.push_back(p);
    }
    if (c.size() == M) return c;
  }
  std::ostringstream os;
  os.precision(6);
  os << "no disjoint packing found for M = " << M << ", rho = " << rho << " (ring, hex and greedy placements failed)";
  throw PackingError(os.str());
}

PlanarMeasure realize_measure(const CantorTree& tree, Side side, std::size_t samples_per_leaf, std::uint64_t seed) {
  if (!tree.realized()) throw RealizationError("tree has no realized centers; build with realize = true");
  if (samples_per_leaf == 0) throw RealizationError("samples_per_leaf must be positive");
  const int D = tree.depth();
  const std::size_t leaves = tree.node_count(D);
  const double r = std::exp(tree.log_radius(side, D));
  const double w = std::exp(tree.log_mass(D)) / static_cast<double>(samples_per_leaf);
  Rng rng(mix_seed(seed, side == Side::Source ? 11 : 13));
  std::vector<Atom> atoms;
  atoms.reserve(leaves * samples_per_leaf);
  for (std::size_t i = 0; i < leaves; ++i) {
    Point c = tree.center(side, D, i);
    if (samples_per_leaf == 1) {
      atoms.push_back({c, w});
      continue;
    }
    for (std::size_t k = 0; k < samples_per_leaf; ++k) {
      double rr = r * std::sqrt(rng.uniform());
      double a = 2.0 * std::numbers::pi * rng.uniform();
      atoms.push_back({{c.x + rr * std::cos(a), c.y + rr * std::sin(a)}, w});
    }
  }
  return PlanarMeasure(std::move(atoms));
}

}  // namespace qcap
