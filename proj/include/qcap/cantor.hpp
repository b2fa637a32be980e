#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qcap/geometry.hpp"

namespace qcap {

enum class Side { Source, Target };

const char* to_string(Side s);
Side parse_side(const std::string& s);

// One generation of the construction. Branching and radius are kept as logs:
// after shrinking, M can be far beyond any integer type and R far below the
// smallest double.
struct LevelSchedule {
  int level = 1;
  double log_M = 0.0;
  double eps = 0.0;
  double d = 1.0;
  double log_R = 0.0;
  double K = 1.0;

  // R from M * R^2 = 1 - eps
  static LevelSchedule from_branching(int level, double M, double eps, double d, double K);
  // M from the same identity
  static LevelSchedule from_radius(int level, double log_R, double eps, double d, double K);

  double M() const { return std::exp(log_M); }
  double R() const { return std::exp(log_R); }
  double log_sigma() const { return log_R + std::log(d); }
  double sigma() const { return std::exp(log_sigma()); }
  bool integral_branching() const;
  std::size_t branching() const;  // throws unless integral

  // max_ratio bounds sigma and R (1/100 in the strict convention)
  void validate(double max_ratio) const;
};

struct BuildOptions {
  double max_ratio = 0.01;
  // Abstract trees (eps = 0, astronomically many disks) cannot be packed and
  // only carry the per-generation radii and masses.
  bool check_packing = true;
  bool realize = false;
  std::uint64_t seed = 0;
  std::size_t max_nodes = std::size_t{1} << 22;
};

struct Generation {
  int n = 0;
  double log_s = 0.0;          // source generating radius
  double log_t = 0.0;          // target generating radius
  double log_s_protect = 0.0;  // s / sigma_n^K
  double log_t_protect = 0.0;  // t / sigma_n
  double log_mass = 0.0;       // per node
  double log_count = 0.0;      // nodes in this generation
};

class CantorTree {
 public:
  const std::vector<LevelSchedule>& schedules() const { return sched_; }
  int depth() const { return depth_; }
  double K() const { return K_; }
  std::uint64_t seed() const { return seed_; }

  const Generation& generation(int n) const { return gens_.at(static_cast<std::size_t>(n)); }
  double log_radius(Side side, int n) const;
  double log_protect_radius(Side side, int n) const;
  double log_mass(int n) const { return generation(n).log_mass; }
  // prod_{n <= depth} (1 - eps_n), the mass of every generation
  double total_mass() const { return std::exp(log_total_mass_); }
  double log_total_mass() const { return log_total_mass_; }

  bool enumerable() const { return enumerable_; }
  bool realized() const { return realized_; }
  std::size_t node_count(int n) const;
  std::size_t branching(int n) const;  // children per node of generation n-1
  std::size_t parent(int n, std::size_t index) const { return index / branching(n); }
  std::vector<std::size_t> path(int n, std::size_t index) const;  // 0-based j_1..j_n
  Point center(Side side, int n, std::size_t index) const;
  // unit-disk offsets used at level n
  const std::vector<Point>& offsets(int n) const;

  // Multiply the whole picture by lambda (radii and centers; masses kept).
  CantorTree scaled(double lambda) const;

  friend CantorTree build_tree(std::vector<LevelSchedule> schedules, int depth, const BuildOptions& opts);

 private:
  std::vector<LevelSchedule> sched_;
  int depth_ = 0;
  double K_ = 1.0;
  std::uint64_t seed_ = 0;
  std::vector<Generation> gens_;
  double log_total_mass_ = 0.0;
  bool enumerable_ = false;
  bool realized_ = false;
  std::vector<std::vector<Point>> offsets_;
  std::vector<std::vector<Point>> src_centers_;
  std::vector<std::vector<Point>> tgt_centers_;
};

CantorTree build_tree(std::vector<LevelSchedule> schedules, int depth, const BuildOptions& opts = {});

// d_j = (j + 1) / j
std::vector<LevelSchedule> schedule_example2(double K, int depth, double M, double eps, double max_ratio = 0.01);

// d_j = ((j + 1) / j)^{(K + 1) / (2K(q' - 1))}
double sharpness_d(double K, double q, int j);
std::vector<LevelSchedule> schedule_sharpness(double K, double q, int depth, double M, double eps,
                                              double max_ratio = 0.01);

// Lower log R_N where needed so that the source generating radius at
// generation N is at most exp(log_bound(N)). M follows from M R^2 = 1 - eps.
std::vector<LevelSchedule> shrink_source_radii(std::vector<LevelSchedule> schedules,
                                               const std::function<double(int)>& log_bound);

// example 2 schedule shrunk to s_max(N) <= exp(-e^N)
std::vector<LevelSchedule> schedule_example3(double K, int depth, double M, double eps = 0.0,
                                             double max_ratio = 0.01);

// M centers in the unit disk for pairwise disjoint disks of radius rho
// (tangency allowed), all inside the unit disk.
std::vector<Point> pack_disks(std::size_t M, double rho, std::uint64_t seed);

// Atoms uniform in each leaf generating disk, equal weights summing to the
// leaf mass; one sample puts the atom at the leaf center.
PlanarMeasure realize_measure(const CantorTree& tree, Side side, std::size_t samples_per_leaf, std::uint64_t seed);

}  // namespace qcap
