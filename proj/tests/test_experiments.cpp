#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "oracles.hpp"
#include "qcap/capacity.hpp"
#include "qcap/error.hpp"
#include "qcap/experiments.hpp"
#include "qcap/io.hpp"

#ifndef QCAP_GOLDEN_DIR
#error "QCAP_GOLDEN_DIR must be defined"
#endif

using namespace qcap;

namespace {

ExperimentReport load_report(const std::string& name) {
  std::ifstream in(std::string(QCAP_GOLDEN_DIR) + "/" + name);
  REQUIRE(in.good());
  auto j = json::parse(in);
  ExperimentReport r;
  r.id = j.at("id").get<std::string>();
  r.params = j.at("params");
  r.columns = j.at("columns").get<std::vector<std::string>>();
  for (const auto& row : j.at("rows")) {
    std::vector<double> v;
    for (const auto& x : row) v.push_back(x.is_string() ? (x.get<std::string>() == "inf" ? INFINITY : -INFINITY) : x.get<double>());
    r.rows.push_back(v);
  }
  const auto& vd = j.at("verdict");
  r.verdict.kind = vd.at("kind").get<std::string>();
  r.verdict.pass = vd.at("pass").get<bool>();
  r.verdict.statistic = vd.at("statistic").get<double>();
  r.verdict.threshold = vd.at("threshold").get<double>();
  return r;
}

}  // namespace

TEST_CASE("golden reports: verdicts are recomputed from rows alone") {
  for (const char* name : {"example1.json", "example2.json", "example3.json", "sharpness.json", "teocap-a.json",
                           "main-lemma.json", "oracle.json"}) {
    CAPTURE(name);
    auto r = load_report(name);
    auto v = recompute_verdict(r);
    CHECK(v.kind == r.verdict.kind);
    CHECK(v.pass == r.verdict.pass);
    CHECK(v.statistic == doctest::Approx(r.verdict.statistic).epsilon(1e-12));
    CHECK(v.threshold == doctest::Approx(r.verdict.threshold).epsilon(1e-12));
  }
}

TEST_CASE("verdicts react to the rows") {
  auto r = load_report("teocap-a.json");
  REQUIRE(r.verdict.pass);
  auto col = std::find(r.columns.begin(), r.columns.end(), "ratio") - r.columns.begin();
  r.rows.back()[static_cast<std::size_t>(col)] *= 1e3;
  CHECK_FALSE(recompute_verdict(r).pass);

  auto e = load_report("example2.json");
  REQUIRE(e.verdict.pass);
  auto c = std::find(e.columns.begin(), e.columns.end(), "rel_err") - e.columns.begin();
  e.rows[0][static_cast<std::size_t>(c)] = 1e-6;
  CHECK_FALSE(recompute_verdict(e).pass);
}

TEST_CASE("fresh runs reproduce the golden reports") {
  auto fresh = example2_experiment(2.0, {1, 12});
  auto gold = load_report("example2.json");
  REQUIRE(fresh.rows.size() == gold.rows.size());
  for (std::size_t i = 0; i < fresh.rows.size(); ++i)
    for (std::size_t k = 0; k < fresh.rows[i].size(); ++k) CHECK(fresh.rows[i][k] == gold.rows[i][k]);
  CHECK(dump(to_json(example3_experiment(2.0, {2, 6}))) == dump(to_json(example3_experiment(2.0, {2, 6}))));
}

TEST_CASE("example 2: closed form, K = 1 and shrinking") {
  auto r = example2_experiment(2.0, {1, 12});
  auto depth = r.column("depth"), sum = r.column("sum_eps1");
  for (std::size_t i = 0; i < depth.size(); ++i)
    CHECK(sum[i] == doctest::Approx(std::pow(depth[i] + 1, 4.0 / 3)).epsilon(1e-12));
  auto k1 = example2_experiment(1.0, {1, 8});
  auto s1 = k1.column("sum_eps1");
  for (std::size_t i = 0; i < s1.size(); ++i) CHECK(s1[i] == doctest::Approx(i + 2.0).epsilon(1e-12));
  auto shr = r.column("sum_shrunk"), bound = r.column("bound"), binding = r.column("binding");
  for (std::size_t i = 0; i < shr.size(); ++i) CHECK(shr[i] <= bound[i] * (1 + 1e-12));
  CHECK(shr.back() < 0.1 * *std::max_element(shr.begin(), shr.end()));
  CHECK(r.verdict.pass);
}

TEST_CASE("example 3: log-space radii and unchanged target potential") {
  auto r = example3_experiment(2.0, {1, 10});
  auto log_s = r.column("log_s"), bound = r.column("log_bound");
  for (std::size_t i = 0; i < log_s.size(); ++i) CHECK(log_s[i] <= bound[i] + 1e-9 * std::abs(bound[i]));
  CHECK(bound[2] == doctest::Approx(-std::exp(3.0)));
  auto tw = r.column("target_wolff"), t2 = r.column("target_wolff_example2");
  for (std::size_t i = 0; i < tw.size(); ++i) CHECK(tw[i] == doctest::Approx(t2[i]).epsilon(1e-12));
  CHECK(r.verdict.pass);
}

TEST_CASE("example 1 classification") {
  auto r = example1_gauge_test(2.0);
  CHECK(r.rows.size() == 20);
  auto div = r.column("divergent"), want = r.column("expected_divergent");
  for (std::size_t i = 0; i < div.size(); ++i) CHECK(div[i] == want[i]);
  CHECK(r.verdict.pass);
  // boundary and beta = 0 are divergent
  auto b = example1_gauge_test(2.0, {2.0 / 3, 0.8, 1e-9});
  auto d = b.column("divergent");
  CHECK(d[0] == 1.0);
  CHECK(d[1] == 0.0);
  CHECK(d[2] == 1.0);
}

TEST_CASE("sharpness experiment") {
  SharpnessConfig cfg;
  cfg.depths = {8, 16, 32, 64, 128, 256, 512, 1024};
  auto r = sharpness_experiment(2.0, 3.0, cfg);
  auto N = r.column("depth"), src = r.column("source_partial");
  for (std::size_t i = 0; i < N.size(); ++i)
    CHECK(src[i] == doctest::Approx(oracle::harmonic_partial(static_cast<int>(N[i]))).epsilon(1e-10));
  CHECK_THROWS_AS(sharpness_experiment(2.0, 1.5, cfg), ScheduleError);
}

TEST_CASE("teocap-a at K = 1 has identical indices on both sides") {
  auto r = verify_teocap_a(1.0, 1.5, {2, 5});
  auto ratio = r.column("ratio");
  for (double x : ratio) CHECK(x == doctest::Approx(ratio.front()).epsilon(1e-12));
  CHECK(r.verdict.pass);
}

TEST_CASE("theorem 1 pipeline at small depth") {
  auto r = verify_theorem1(2.0, {1, 3});
  CHECK(r.rows.size() == 3);
  for (double x : r.column("ratio")) {
    CHECK(std::isfinite(x));
    CHECK(x > 0.0);
  }
  CHECK_THROWS(verify_theorem1(2.0, {0, 2}));
}

TEST_CASE("oracle comparability rows") {
  auto r = oracle_comparability(2.0, {2, 3});
  auto C = r.column("C");
  for (double c : C) CHECK(c >= 1.0);
  CHECK(r.column("queries")[0] >= 50);
}

TEST_CASE("main lemma rows expose the covers") {
  auto r = main_lemma_experiment(2.0, {2, 3});
  CHECK(r.column("cover_source").size() == 2);
  for (double x : r.column("ratio")) CHECK(x > 0.0);
}
