#include "qcap/geometry.hpp"

#include <algorithm>
#include <stdexcept>

#include "qcap/error.hpp"

namespace qcap {

PlanarMeasure::PlanarMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  for (const auto& a : atoms_) {
    if (!(a.w >= 0.0) || !std::isfinite(a.w) || !std::isfinite(a.pt.x) || !std::isfinite(a.pt.y))
      throw Error("atom weights must be finite and nonnegative, positions finite");
    total_ += a.w;
  }
}

double PlanarMeasure::ball_mass(Point x, double r) const {
  double m = 0.0;
  for (const auto& a : atoms_)
    if (dist(a.pt, x) <= r) m += a.w;
  return m;
}

double PlanarMeasure::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    for (std::size_t j = i + 1; j < atoms_.size(); ++j) d = std::max(d, dist(atoms_[i].pt, atoms_[j].pt));
  return d;
}

Point PlanarMeasure::centroid() const {
  if (atoms_.empty()) return {};
  Point c;
  for (const auto& a : atoms_) c = c + a.pt;
  return (1.0 / static_cast<double>(atoms_.size())) * c;
}

PlanarMeasure PlanarMeasure::scaled(double lambda) const {
  std::vector<Atom> v = atoms_;
  for (auto& a : v) a.pt = lambda * a.pt;
  return PlanarMeasure(std::move(v));
}

PlanarMeasure PlanarMeasure::mass_scaled(double c) const {
  std::vector<Atom> v = atoms_;
  for (auto& a : v) a.w *= c;
  return PlanarMeasure(std::move(v));
}

RadialProfile::RadialProfile(const PlanarMeasure& mu, Point x) {
  std::vector<std::pair<double, double>> dw;
  dw.reserve(mu.size());
  for (const auto& a : mu.atoms()) dw.emplace_back(dist(a.pt, x), a.w);
  std::sort(dw.begin(), dw.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  d_.reserve(dw.size());
  cum_.reserve(dw.size());
  double acc = 0.0;
  for (const auto& [d, w] : dw) {
    acc += w;
    d_.push_back(d);
    cum_.push_back(acc);
  }
}

double RadialProfile::mass_within(double r) const {
  auto it = std::upper_bound(d_.begin(), d_.end(), r);
  if (it == d_.begin()) return 0.0;
  return cum_[static_cast<std::size_t>(it - d_.begin()) - 1];
}

double Rng::uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

std::size_t Rng::below(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below(0)");
  return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace qcap
