#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcap/cantor.hpp"

namespace qcap {

struct Verdict {
  std::string kind;  // ratio-stable, divergent-at-rate, monotone, exact, classified
  bool pass = false;
  double statistic = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct ExperimentReport {
  std::string id;
  nlohmann::ordered_json params;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  Verdict verdict;

  std::vector<double> column(const std::string& name) const;
};

// Derives the verdict from id, params and rows alone.
Verdict recompute_verdict(const ExperimentReport& r);

// Realizable example 2 pair used by the pipelines: finite branching, eps > 0
// and a relaxed smallness bound so that depth 6 still fits a double.
struct RealizationConfig {
  double M = 4;
  double eps = 0.36;
  double max_ratio = 1.0;
  std::uint64_t seed = 1;
};

struct DepthRange {
  int lo = 2;
  int hi = 6;
};

ExperimentReport verify_theorem1(double K, DepthRange depths, const RealizationConfig& cfg = {});
ExperimentReport verify_teocap_a(double K, double p, DepthRange depths, const RealizationConfig& cfg = {});

struct SharpnessConfig {
  double M = 160000;  // R = 1/400 with eps = 0
  std::vector<int> depths;  // default: 8 .. 65536
};
ExperimentReport sharpness_experiment(double K, double q, const SharpnessConfig& cfg = {});

// beta grid default: beta* i/10 and beta* (1 + i/10), i = 1..10, beta* = K/(K+1)
ExperimentReport example1_gauge_test(double K, std::vector<double> betas = {});

struct ShrinkConfig {
  double M = 40000;  // R = 1/200 with eps = 0
  double eps = 0.0;
};
// eps_of_log_r maps log r to eps(r); default 1/log(1/r)
ExperimentReport example2_experiment(double K, DepthRange depths, const ShrinkConfig& cfg = {},
                                     std::function<double(double)> eps_of_log_r = {});
ExperimentReport example3_experiment(double K, DepthRange depths, std::vector<double> a_values = {},
                                     const ShrinkConfig& cfg = {});

ExperimentReport main_lemma_experiment(double K, DepthRange depths, double a = 0.1, const RealizationConfig& cfg = {});

struct OracleConfig {
  RealizationConfig realization;
  std::size_t samples_per_leaf = 16;
  std::size_t extra_queries = 50;
};
ExperimentReport oracle_comparability(double K, DepthRange depths, const OracleConfig& cfg = {});

}  // namespace qcap
