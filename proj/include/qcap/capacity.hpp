#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcap/cantor.hpp"
#include "qcap/geometry.hpp"
#include "qcap/potentials.hpp"

namespace qcap {

struct CapacityIndices {
  double alpha = 0.0;
  double p = 0.0;
  double pprime = 0.0;
  double homogeneity = 0.0;  // 2 - alpha p
  std::optional<double> K;

  static CapacityIndices make(double alpha, double p, std::optional<double> K = std::nullopt);
};

// alpha = 2K/(2K+1), p = (2K+1)/(K+1)
CapacityIndices theorem1_indices(double K);

struct Teocap2 {
  CapacityIndices indices;  // (beta, q)
  double t = 0.0;           // 2 - alpha p
  double tprime = 0.0;      // 2t / (2K - Kt + t)
};

Teocap2 teocap2_indices(double alpha, double p, double K);

enum class Direction { LowerBound, ComparabilityProxy };
const char* to_string(Direction d);

struct Normalization {
  double sup = 0.0;  // potential sup (Wolff) or Lambda = |I_alpha mu|_{p'} (direct)
  std::string query_set;
  std::uint64_t seed = 0;
};

struct CapacityEstimate {
  double value = 0.0;
  Direction direction = Direction::LowerBound;
  CapacityIndices indices;
  // "wolff": sup mu(F) over normalized mu; "definition": sup mu(F)^p
  std::string convention;
  Normalization normalization;
  bool divergent = false;
  double divergence_rate = 0.0;
};

// mass * S^{-1/(p'-1)} with S the path-independent tree potential
CapacityEstimate wolff_capacity_lower(const CantorTree& tree, Side side, const CapacityIndices& ix);

struct QuerySet {
  std::vector<Point> points;
  std::string id;
  std::uint64_t seed = 0;
};

// leaf centers plus `extra` seeded atoms of mu
QuerySet standard_query_set(const CantorTree& tree, Side side, const PlanarMeasure& mu, std::size_t extra,
                            std::uint64_t seed);

// dyadic range used for measure potentials: 2^{k_max} swallows the support
// seen from any query point, 2^{k_min} sits at the finest resolved scale
struct DyadicRange {
  int k_min = -20;
  int k_max = 2;
};
DyadicRange dyadic_range_for(const PlanarMeasure& mu, const std::vector<Point>& points, double finest);

CapacityEstimate wolff_capacity_lower(const PlanarMeasure& mu, const CapacityIndices& ix, const QuerySet& q,
                                      const DyadicRange& range);

struct QuadratureSpec {
  int fine_cells = 96;     // per side on the padded support box
  int coarse_cells = 96;   // per side on the far square
  double far_factor = 4.0; // tail starts at far_factor * diam
};

// Lambda = |I_alpha mu|_{p'} by cell sums and a closed-form far tail;
// returns (mass / Lambda)^p under the "definition" convention. Both
// conventions are homogeneous of degree 2 - alpha p, so this value is
// compared with the Wolff estimate as is.
CapacityEstimate direct_capacity_lower(const PlanarMeasure& mu, const CapacityIndices& ix,
                                       const QuadratureSpec& spec = {});
double riesz_energy_norm(const PlanarMeasure& mu, double alpha, double p, const QuadratureSpec& spec = {});

// c = min(1/growth, sup_curv^{-1/2}); value c * mass
CapacityEstimate melnikov_gamma_lower(const PlanarMeasure& mu, const CurvatureEstimate& curv, double growth);

}  // namespace qcap
