// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qcap/capacity.hpp"
#include "qcap/experiments.hpp"
#include "qcap/gauges.hpp"
#include "qcap/numeric.hpp"
#include "qcap/potentials.hpp"

using namespace qcap;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && dt > limit_s) {
    o.pass = false;
    o.detail += "; over time limit";
  }
  if (!o.pass) ++failures;
  char t[32];
  std::snprintf(t, sizeof t, "%.2fs", dt);
  std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << " (" << t << "): " << o.detail << std::endl;
}

std::string fmt(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", x);
  return b;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

CantorTree abstract_tree(std::vector<LevelSchedule> s, int depth) {
  BuildOptions o;
  o.check_packing = false;
  return build_tree(std::move(s), depth, o);
}

CantorTree realized(double K, int depth, std::size_t M, double eps, std::uint64_t seed) {
  BuildOptions o;
  o.max_ratio = 1.0;
  o.realize = true;
  o.seed = seed;
  return build_tree(schedule_example2(K, depth, static_cast<double>(M), eps, 1.0), depth, o);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome index_algebra() {
  double worst = 0.0;
  int n = 0;
  for (int i = 1; i <= 10; ++i)
    for (int j = 1; j <= 10; ++j)
      for (int k = 0; k < 10; ++k, ++n) {
        const double p = 1.0 + 0.25 * j;
        const double alpha = (2.0 / p) * i / 11.0;
        const double K = 1.0 + 0.5 * k;
        auto t1 = theorem1_indices(K);
        worst = std::max(worst, std::abs(t1.homogeneity - 2.0 / (K + 1)));
        auto r = teocap2_indices(alpha, p, K);
        worst = std::max(worst, std::abs(2 - r.indices.alpha * r.indices.p - r.tprime));
        auto s = teocap2_indices(1.0 / p, p, K);
        worst = std::max(worst, std::abs(s.indices.alpha - 2 * K / (2 * K * p - K + 1)));
        worst = std::max(worst, std::abs(s.indices.p - (2 * K * p - K + 1) / (K + 1)));
        worst = std::max(worst, std::abs(s.tprime - 2 / (K + 1)));
      }
  return {n == 1000 && worst <= 1e-12, std::to_string(n) + " grid points, max error " + fmt(worst)};
}

Outcome example2_series() {
  const int D = 400;
  auto t = abstract_tree(schedule_example2(2.0, D, 40000, 0.0), D);
  auto prof = wolff_tree(t, Side::Target, 2.0 / 3, 1.5);
  double worst = 0.0;
  for (int N = 1; N <= D; ++N) worst = std::max(worst, std::abs(prof.partial_sum(N) - oracle::basel_partial(N)));
  const double lim = std::numbers::pi * std::numbers::pi / 6 - 1;
  // tail sum_{n>N} 1/(n+1)^2 lies between 1/(N+2) and 1/(N+1)
  const double gap = lim - prof.total;
  const bool tends = gap > 1.0 / (D + 2) - 1e-12 && gap < 1.0 / (D + 1) + 1e-12;
  return {worst <= 1e-12 && tends,
          "max |S_N - oracle| " + fmt(worst) + ", limit gap at N=" + std::to_string(D) + " is " + fmt(gap)};
}

Outcome sharpness_series() {
  const double K = 2.0, q = 3.0, beta = 2 * K / ((K + 1) * q);
  auto t = abstract_tree(schedule_sharpness(K, q, 64, 160000, 0.0), 64);
  auto prof = wolff_tree(t, Side::Source, beta, q);
  double worst = 0.0;
  std::vector<double> x, y, ly;
  for (int N = 8; N <= 64; ++N) {
    const double s = prof.partial_sum(static_cast<std::size_t>(N));
    worst = std::max(worst, std::abs(s - oracle::harmonic_partial(N)));
    x.push_back(std::log(N));
    y.push_back(s);
    ly.push_back(std::log(s));
  }
  std::vector<double> lx;
  for (double v : x) lx.push_back(std::log(v));
  const auto lin = fit_line(x, y);
  const auto loglog = fit_line(lx, ly);
  const bool exact = worst <= 1e-12;
  const bool slope_ok = std::abs(lin.slope - 1.0) <= 0.05;
  return {exact && slope_ok, "max |S_N - H| " + fmt(worst) + ", slope of S_N on ln N over 8..64 = " +
                                 fmt(lin.slope) + " (log-log " + fmt(loglog.slope) + ", band 0.95..1.05)"};
}

Outcome cross_side() {
  double worst = 0.0;
  for (double K : {1.0, 1.5, 2.0, 5.0}) {
    auto t = abstract_tree(schedule_example2(K, 32, 40000, 0.0), 32);
    auto ix = theorem1_indices(K);
    auto a = wolff_tree(t, Side::Source, ix.alpha, ix.p);
    auto b = wolff_tree(t, Side::Target, 2.0 / 3, 1.5);
    for (std::size_t i = 0; i < a.entries.size(); ++i)
      worst = std::max(worst, rel(a.entries[i].contribution, b.entries[i].contribution));
  }
  return {worst <= 1e-12, "K in {1,1.5,2,5}, depth 32, max relative term error " + fmt(worst)};
}

Outcome oracle_drift() {
  auto r = oracle_comparability(2.0, {2, 4});
  auto C = r.column("C"), atoms = r.column("atoms"), queries = r.column("queries");
  const double drift = C.back() / C.front();
  const bool sizes = atoms.back() <= 4096 * 16 && *std::min_element(queries.begin(), queries.end()) >= 50;
  std::string d = "C by depth:";
  for (double c : C) d += " " + fmt(c);
  return {sizes && drift <= 2.0 && r.verdict.pass, d + ", C(4)/C(2) = " + fmt(drift)};
}

Outcome scaling() {
  auto t = realized(2.0, 3, 4, 0.36, 3);
  auto mu = realize_measure(t, Side::Source, 4, 1);
  auto ix = theorem1_indices(2.0);
  double mass_err = 0.0, tree_err = 0.0, quad_err = 0.0;
  for (double c : {0.3, 5.0}) {
    auto a = wolff_dyadic(mu, mu.atoms()[7].pt, ix.alpha, ix.p, -30, 1).total;
    auto b = wolff_dyadic(mu.mass_scaled(c), mu.atoms()[7].pt, ix.alpha, ix.p, -30, 1).total;
    mass_err = std::max(mass_err, rel(b, a * std::pow(c, ix.pprime - 1)));
  }
  auto small = realized(2.0, 2, 4, 0.36, 3);
  auto nu = realize_measure(small, Side::Source, 4, 1);
  const double w0 = wolff_capacity_lower(t, Side::Source, ix).value;
  const double d0 = direct_capacity_lower(nu, ix).value;
  for (double lam : {0.25, 0.5, 2.0}) {
    const double f = std::pow(lam, ix.homogeneity);
    tree_err = std::max(tree_err, rel(wolff_capacity_lower(t.scaled(lam), Side::Source, ix).value, w0 * f));
    quad_err = std::max(quad_err, rel(direct_capacity_lower(nu.scaled(lam), ix).value, d0 * f));
  }
  return {mass_err <= 1e-12 && tree_err <= 1e-12 && quad_err <= 0.01,
          "mass law " + fmt(mass_err) + ", tree homogeneity " + fmt(tree_err) + ", quadrature homogeneity " +
              fmt(quad_err)};
}

Outcome curvature() {
  std::vector<Atom> line;
  for (int i = 0; i < 100; ++i) line.push_back({{0.1 * i, -0.2 * i}, 0.01});
  const double c_line = menger_curvature(PlanarMeasure(line), 50000, 1).value;
  const double c_tri = menger_curvature(PlanarMeasure({{{0, 0}, 1}, {{1, 0}, 1}, {{0, 1}, 1}}), 10, 1).value;
  std::vector<Atom> seg;
  for (int i = 0; i < 1000; ++i) seg.push_back({{(i + 0.5) / 1000, 0.0}, 1e-3});
  PlanarMeasure s(seg);
  const double g = melnikov_gamma_lower(s, menger_curvature(s, 100000, 1), 1.0).value;
  return {c_line == 0.0 && c_tri == 12.0 && std::abs(g - 1.0) <= 1e-9,
          "collinear " + fmt(c_line) + ", right triangle " + fmt(c_tri) + ", segment proxy " + fmt(g)};
}

Outcome contents() {
  int trials = 0, dp_bad = 0, flow_bad = 0;
  for (int depth : {2, 3}) {
    auto t = realized(1.0, depth, 2, 0.68, 4);
    std::size_t n = 0;
    std::vector<std::size_t> off;
    for (int g = 0; g <= depth; ++g) {
      off.push_back(n);
      n += t.node_count(g);
    }
    Rng rng(500 + depth);
    for (int k = 0; k < 20; ++k, ++trials) {
      std::vector<double> h(n);
      for (auto& v : h) v = rng.uniform();
      Gauge gauge;
      gauge.gamma = 0.0;
      gauge.eps = [&](const Ball& b) { return h[off[b.node->generation] + b.node->index]; };
      const double brute = oracle::min_cover_bruteforce(2, depth, h);
      const double dp = content_Mh_tree(t, Side::Source, gauge).value;
      const auto fr = frostman_tree(t, Side::Source, gauge);
      if (rel(dp, brute) > 1e-12) ++dp_bad;
      if (rel(fr.total, dp) > 1e-12 || fr.violations != 0 || rel(oracle::tree_maxflow(2, depth, h), dp) > 1e-12)
        ++flow_bad;
    }
  }
  auto ml = main_lemma_experiment(2.0, {2, 6});
  auto ratio = ml.column("ratio");
  const double spread = *std::min_element(ratio.begin(), ratio.end()) / *std::max_element(ratio.begin(), ratio.end());
  return {dp_bad == 0 && flow_bad == 0 && ml.verdict.pass,
          std::to_string(trials) + " random gauges, DP mismatches " + std::to_string(dp_bad) +
              ", Frostman mismatches " + std::to_string(flow_bad) + ", main-lemma min/max ratio " + fmt(spread)};
}

Outcome theorem1() {
  auto a = verify_theorem1(2.0, {2, 6});
  auto b = verify_teocap_a(2.0, 2.0, {2, 6});
  return {a.verdict.pass && b.verdict.pass,
          "theorem 1 min/max " + fmt(a.verdict.statistic) + ", teocap-a min/max " + fmt(b.verdict.statistic)};
}

Outcome gauges() {
  auto e1 = example1_gauge_test(2.0);
  auto e2 = example2_experiment(2.0, {1, 12});
  auto e3 = example3_experiment(2.0, {1, 10});
  double err = 0.0;
  for (auto* r : {&e2, &e3})
    for (double v : r->column("rel_err")) err = std::max(err, v);
  return {e1.verdict.pass && e2.verdict.pass && e3.verdict.pass && err <= 1e-12,
          "example 1: " + e1.verdict.detail + "; closed-form error " + fmt(err) + "; example 2 last/max " +
              fmt(e2.verdict.statistic) + "; example 3 last/max " + fmt(e3.verdict.statistic)};
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "qcap_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::vector<std::string> cmds = {"thm1",      "teocap-a", "sharpness",  "example1",
                                         "example2",  "example3", "main-lemma", "oracle"};
  int same = 0;
  std::string bad;
  for (const auto& c : cmds) {
    std::string outs[2];
    for (int run = 0; run < 2; ++run) {
      const fs::path f = dir / (c + "_" + std::to_string(run) + ".json");
      const std::string cmd = std::string("\"") + QCAP_CLI_PATH + "\" verify " + c +
                              " --seed 7 --format json --out \"" + f.string() + "\" > /dev/null 2>&1";
      const int rc = std::system(cmd.c_str());
      (void)rc;
      outs[run] = slurp(f);
    }
    if (!outs[0].empty() && outs[0] == outs[1])
      ++same;
    else
      bad += " " + c;
  }
  fs::remove_all(dir);
  return {same == static_cast<int>(cmds.size()),
          std::to_string(same) + "/" + std::to_string(cmds.size()) + " verify commands byte-identical" +
              (bad.empty() ? "" : "; differing:" + bad)};
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion(1, "index algebra", 1.0, index_algebra);
  criterion(2, "example 2 exact series", 1.0, example2_series);
  criterion(3, "sharpness exact series", 1.0, sharpness_series);
  criterion(4, "cross-side identity", 0.0, cross_side);
  criterion(5, "oracle comparability", 120.0, oracle_drift);
  criterion(6, "scaling laws", 0.0, scaling);
  criterion(7, "curvature", 0.0, curvature);
  criterion(8, "contents and Frostman", 0.0, contents);
  criterion(9, "theorem 1 and teocap-a at desk scale", 300.0, theorem1);
  criterion(10, "gauge criteria", 0.0, gauges);
  criterion(11, "determinism", 0.0, determinism);
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << " in " << fmt(dt) << "s"
            << std::endl;
  return failures == 0 ? 0 : 1;
}
