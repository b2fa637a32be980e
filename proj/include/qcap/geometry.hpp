#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace qcap {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Atom {
  Point pt;
  double w = 0.0;
};

// Weighted finite atom cloud. Weights are nonnegative and finite.
class PlanarMeasure {
 public:
  PlanarMeasure() = default;
  explicit PlanarMeasure(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  double total_mass() const { return total_; }

  // closed ball
  double ball_mass(Point x, double r) const;
  double diameter() const;
  Point centroid() const;

  // x -> lambda * x, weights untouched
  PlanarMeasure scaled(double lambda) const;
  PlanarMeasure mass_scaled(double c) const;

 private:
  std::vector<Atom> atoms_;
  double total_ = 0.0;
};

// Sorted distances from x to every atom with cumulative weights, so that
// many ball masses around the same point cost one sort.
class RadialProfile {
 public:
  RadialProfile(const PlanarMeasure& mu, Point x);
  double mass_within(double r) const;  // closed ball
  double min_distance() const { return d_.empty() ? INFINITY : d_.front(); }

 private:
  std::vector<double> d_;
  std::vector<double> cum_;
};

// mt19937_64 output is fixed by the standard but the <random> distributions
// are not, so the conversions to doubles and indices are done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform();  // [0,1), 53 bits
  std::size_t below(std::size_t n);

 private:
  std::mt19937_64 eng_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace qcap
