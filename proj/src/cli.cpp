#include "qcap/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "qcap/capacity.hpp"
#include "qcap/error.hpp"
#include "qcap/experiments.hpp"
#include "qcap/gauges.hpp"
#include "qcap/io.hpp"
#include "qcap/numeric.hpp"
#include "qcap/potentials.hpp"

namespace qcap::cli {

namespace {

using in_json = nlohmann::json;

std::string ptr(const std::string& base, const std::string& key) { return base + "/" + key; }

void only_keys(const in_json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; });
    if (!ok) throw ConfigError(ptr(where, it.key()), "unknown key");
  }
}

const in_json& need(const in_json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) throw ConfigError(ptr(where, key), "required key missing");
  return j.at(key);
}

double number(const in_json& v, const std::string& p) {
  if (!v.is_number()) throw ConfigError(p, "must be a number");
  return v.get<double>();
}

long long integer(const in_json& v, const std::string& p) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15) return static_cast<long long>(d);
  }
  throw ConfigError(p, "must be an integer");
}

}  // namespace

ScheduleConfig parse_schedule(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("", "schedule config must be a JSON object");
  only_keys(j, "", {"K", "depth", "seed", "levels", "max_ratio"});
  ScheduleConfig c;
  c.K = number(need(j, "", "K"), "/K");
  if (!(c.K >= 1.0) || !std::isfinite(c.K)) throw ConfigError("/K", "must be >= 1");
  const long long depth = integer(need(j, "", "depth"), "/depth");
  if (depth < 0) throw ConfigError("/depth", "must be >= 0");
  c.depth = static_cast<int>(depth);
  if (j.contains("seed")) {
    const long long s = integer(j.at("seed"), "/seed");
    if (s < 0) throw ConfigError("/seed", "must be >= 0");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (j.contains("max_ratio")) {
    c.max_ratio = number(j.at("max_ratio"), "/max_ratio");
    if (!(c.max_ratio > 0.0 && c.max_ratio <= 1.0)) throw ConfigError("/max_ratio", "must lie in (0,1]");
  }
  const auto& levels = need(j, "", "levels");
  if (!levels.is_array()) throw ConfigError("/levels", "must be an array");
  if (static_cast<long long>(levels.size()) < depth)
    throw ConfigError("/levels", "has " + std::to_string(levels.size()) + " entries but depth is " +
                                     std::to_string(depth));
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const std::string at = "/levels/" + std::to_string(i);
    const auto& L = levels[i];
    if (!L.is_object()) throw ConfigError(at, "must be an object");
    only_keys(L, at, {"M", "eps", "d"});
    const long long M = integer(need(L, at, "M"), at + "/M");
    if (M < 1) throw ConfigError(at + "/M", "must be >= 1");
    const double eps = number(need(L, at, "eps"), at + "/eps");
    if (!(eps >= 0.0 && eps < 1.0)) throw ConfigError(at + "/eps", "must lie in [0,1)");
    const auto& dv = need(L, at, "d");
    const int level = static_cast<int>(i) + 1;
    double d = 1.0;
    if (dv.is_number()) {
      d = dv.get<double>();
      if (!(d >= 1.0) || !std::isfinite(d)) throw ConfigError(at + "/d", "must be >= 1");
    } else if (dv.is_string()) {
      if (dv.get<std::string>() != "example2") throw ConfigError(at + "/d", "string form must be \"example2\"");
      d = (level + 1.0) / level;
    } else if (dv.is_object()) {
      only_keys(dv, at + "/d", {"sharpness_q"});
      const double q = number(need(dv, at + "/d", "sharpness_q"), at + "/d/sharpness_q");
      try {
        d = sharpness_d(c.K, q, level);
      } catch (const ScheduleError& e) {
        throw ConfigError(at + "/d/sharpness_q", e.what());
      }
    } else {
      throw ConfigError(at + "/d", "must be a number, \"example2\" or {\"sharpness_q\": q}");
    }
    auto s = LevelSchedule::from_branching(level, static_cast<double>(M), eps, d, c.K);
    if (static_cast<int>(i) < c.depth) {
      try {
        s.validate(c.max_ratio);
      } catch (const ScheduleError& e) {
        throw ConfigError(at, e.what());
      }
    }
    c.levels.push_back(s);
  }
  return c;
}

ScheduleConfig load_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", "config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_schedule(j);
}

namespace {

struct Common {
  std::uint64_t seed = 1;
  std::string out;
  std::string format;
};

struct Output {
  std::string text;
  std::string summary;
  int code = 0;
};

Point parse_point(const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos) throw ConfigError("--at", "expects x,y");
  try {
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw ConfigError("--at", "expects two numbers x,y");
  }
}

DepthRange parse_depths(const std::string& s) {
  DepthRange d;
  try {
    auto dots = s.find("..");
    if (dots == std::string::npos) {
      d.lo = d.hi = std::stoi(s);
    } else {
      d.lo = std::stoi(s.substr(0, dots));
      d.hi = std::stoi(s.substr(dots + 2));
    }
  } catch (const std::exception&) {
    throw ConfigError("--depths", "expects N or LO..HI");
  }
  if (d.lo < 1 || d.hi < d.lo) throw ConfigError("--depths", "needs 1 <= LO <= HI");
  return d;
}

CantorTree build_from(const ScheduleConfig& c, bool realize) {
  BuildOptions o;
  o.max_ratio = c.max_ratio;
  o.seed = c.seed;
  o.realize = realize;
  o.check_packing = realize;
  try {
    return build_tree(c.levels, c.depth, o);
  } catch (const ScheduleError& e) {
    throw ConfigError("/levels", e.what());
  } catch (const PackingError& e) {
    throw ConfigError("/levels", e.what());
  }
}

std::string render(const json& j, const std::string& format) { return format == "csv" ? flat_csv(j) : dump(j); }

std::string fmt6(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quasiconformal Cantor pairs: potentials, capacities, contents and verification"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  Common com;
  std::string config_path, side_name = "source";

  auto add_common = [&](CLI::App* sc, const std::string& default_format) {
    com.format = default_format;
    sc->add_option("--seed", com.seed, "Seed for placements, samples and query sets")->capture_default_str();
    sc->add_option("--out", com.out, "Output file (default: stdout or $" + std::string(kOutDirEnv) + ")");
    sc->add_option("--format", com.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  };
  auto add_tree = [&](CLI::App* sc) {
    sc->add_option("--config", config_path, "Schedule JSON")->required();
    sc->add_option("--side", side_name, "source or target")->check(CLI::IsMember({"source", "target"}));
  };

  auto* build = app.add_subcommand("build", "Build a tree and export per-node radii and masses");
  bool realize = false;
  add_tree(build);
  build->add_flag("--realize", realize, "Pack disks and export centers");

  auto* wolff = app.add_subcommand("wolff", "Wolff potential profile (tree formula, or dyadic at --at)");
  double alpha = 0, p = 0;
  int depth = -1, kmin = 0, kmax = 0;
  std::string at;
  std::size_t spl = 1;
  add_tree(wolff);
  wolff->add_option("--alpha", alpha)->required();
  wolff->add_option("--p", p)->required();
  wolff->add_option("--depth", depth, "Generations summed (default: tree depth)");
  wolff->add_option("--at", at, "x,y: dyadic profile at this point of a realization");
  auto* kmin_opt = wolff->add_option("--kmin", kmin);
  auto* kmax_opt = wolff->add_option("--kmax", kmax);
  wolff->add_option("--samples-per-leaf", spl)->capture_default_str();

  auto* riesz = app.add_subcommand("riesz", "Riesz potential of a realization at a point");
  add_tree(riesz);
  riesz->add_option("--alpha", alpha)->required();
  riesz->add_option("--at", at)->required();
  riesz->add_option("--samples-per-leaf", spl)->capture_default_str();

  auto* curv = app.add_subcommand("curvature", "Menger curvature of a realization");
  std::uint64_t triples = 100000;
  std::size_t points = 16;
  add_tree(curv);
  curv->add_option("--triples", triples)->capture_default_str();
  curv->add_option("--points", points, "Atoms where c^2_mu(x) is evaluated")->capture_default_str();
  curv->add_option("--samples-per-leaf", spl)->capture_default_str();

  auto* cap = app.add_subcommand("capacity", "Capacity estimate");
  std::string method = "wolff-tree";
  std::optional<double> Kidx;
  std::size_t extra = 50;
  int cells = 96;
  add_tree(cap);
  cap->add_option("--method", method)
      ->check(CLI::IsMember({"wolff-tree", "wolff-dyadic", "direct", "melnikov"}))
      ->capture_default_str();
  cap->add_option("--alpha", alpha);
  cap->add_option("--p", p);
  cap->add_option("--K", Kidx, "Use the Theorem 1 indices for this K");
  cap->add_option("--extra-queries", extra)->capture_default_str();
  cap->add_option("--cells", cells, "Quadrature cells per side")->capture_default_str();
  cap->add_option("--triples", triples)->capture_default_str();
  cap->add_option("--samples-per-leaf", spl)->capture_default_str();

  auto* content = app.add_subcommand("content", "Tree h-content (and Frostman measure)");
  std::string gauge_name = "mu-a";
  double a = 0.1;
  bool frostman = false;
  add_tree(content);
  content->add_option("--gauge", gauge_name)
      ->check(CLI::IsMember({"mu-a", "mass", "distorted", "constant", "inverse-radius"}))
      ->capture_default_str();
  content->add_option("--a", a)->capture_default_str();
  content->add_option("--K", Kidx, "Distortion for the distorted gauge (default: config K)");
  content->add_flag("--frostman", frostman, "Also allocate the Frostman measure");

  auto* gauge = app.add_subcommand("check-gauge", "Empirical G1/G2 constants of a gauge");
  std::size_t samples = 200;
  std::optional<double> g1_thr, g2_thr;
  add_tree(gauge);
  gauge->add_option("--gauge", gauge_name)
      ->check(CLI::IsMember({"mu-a", "constant", "inverse-radius"}))
      ->capture_default_str();
  gauge->add_option("--a", a)->capture_default_str();
  gauge->add_option("--samples", samples)->capture_default_str();
  gauge->add_option("--g1-threshold", g1_thr);
  gauge->add_option("--g2-threshold", g2_thr);

  auto* verify = app.add_subcommand("verify", "Run a verification experiment");
  std::string exp_name, depths_str;
  double K = 2.0, q = 3.0;
  double vp = 2.0;
  RealizationConfig rc;
  verify->add_option("experiment", exp_name)
      ->required()
      ->check(CLI::IsMember(
          {"thm1", "teocap-a", "sharpness", "example1", "example2", "example3", "main-lemma", "oracle"}));
  verify->add_option("--K", K)->capture_default_str();
  verify->add_option("--depths", depths_str, "N or LO..HI");
  verify->add_option("--p", vp)->capture_default_str();
  verify->add_option("--q", q)->capture_default_str();
  verify->add_option("--a", a)->capture_default_str();
  verify->add_option("--M", rc.M, "Branching of realizable pipelines")->capture_default_str();
  verify->add_option("--eps", rc.eps, "Leftover area of realizable pipelines")->capture_default_str();

  add_common(build, "json");
  add_common(wolff, "csv");
  add_common(riesz, "json");
  add_common(curv, "json");
  add_common(cap, "json");
  add_common(content, "json");
  add_common(gauge, "json");
  add_common(verify, "csv");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  // verify's default format is csv, the others json; add_common ran for each
  // subcommand in turn, so restore the default of the one that was chosen
  auto* sub = app.get_subcommands().front();
  if (sub->count("--format") == 0) com.format = (sub == wolff || sub == verify) ? "csv" : "json";
  std::string name = sub->get_name();

  Output res;
  try {
    const Side side = parse_side(side_name);
    if (sub == verify) {
      DepthRange dr{2, 6};
      if (!depths_str.empty()) dr = parse_depths(depths_str);
      if (!(K >= 1.0)) throw ConfigError("--K", "must be >= 1");
      rc.seed = com.seed;
      ExperimentReport rep;
      if (exp_name == "thm1") {
        rep = verify_theorem1(K, dr, rc);
      } else if (exp_name == "teocap-a") {
        rep = verify_teocap_a(K, vp, dr, rc);
      } else if (exp_name == "sharpness") {
        SharpnessConfig sc;
        if (!depths_str.empty()) {
          for (int n = dr.lo; n <= dr.hi; n = n < dr.hi ? std::min(dr.hi, n * 2) : n + 1) sc.depths.push_back(n);
        }
        try {
          sharpness_d(K, q, 1);
        } catch (const ScheduleError& e) {
          throw ConfigError("--q", e.what());
        }
        rep = sharpness_experiment(K, q, sc);
      } else if (exp_name == "example1") {
        rep = example1_gauge_test(K);
      } else if (exp_name == "example2") {
        rep = example2_experiment(K, depths_str.empty() ? DepthRange{1, 12} : dr);
      } else if (exp_name == "example3") {
        rep = example3_experiment(K, depths_str.empty() ? DepthRange{1, 10} : dr);
      } else if (exp_name == "main-lemma") {
        rep = main_lemma_experiment(K, dr, a, rc);
      } else {
        OracleConfig oc;
        oc.realization = rc;
        rep = oracle_comparability(K, depths_str.empty() ? DepthRange{2, 4} : dr, oc);
      }
      res.text = com.format == "csv" ? to_csv(rep) : dump(to_json(rep));
      res.code = rep.verdict.pass ? 0 : 1;
      res.summary = "verify " + exp_name + ": " + (rep.verdict.pass ? "PASS" : "FAIL") + " (" + rep.verdict.detail + ")";
      name += "-" + exp_name;
    } else {
      const auto cfg = load_schedule(config_path);
      if (sub == build) {
        auto tree = build_from(cfg, realize);
        auto j = to_json(tree);
        if (com.format == "csv") {
          std::ostringstream os;
          os << "n,s_log,t_log,mass_log,count_log\n";
          for (int n = 0; n <= tree.depth(); ++n) {
            const auto& g = tree.generation(n);
            os << n << ',' << format_double(g.log_s) << ',' << format_double(g.log_t) << ','
               << format_double(g.log_mass) << ',' << format_double(g.log_count) << '\n';
          }
          res.text = os.str();
        } else {
          res.text = dump(j);
        }
        res.summary = "build: depth " + std::to_string(tree.depth()) + ", total mass " + fmt6(tree.total_mass());
      } else if (sub == wolff) {
        PotentialProfile prof;
        if (at.empty()) {
          auto tree = build_from(cfg, false);
          prof = wolff_tree(tree, side, alpha, p, depth < 0 ? tree.depth() : depth);
        } else {
          auto tree = build_from(cfg, true);
          auto mu = realize_measure(tree, side, spl, com.seed);
          const Point x = parse_point(at);
          auto range = dyadic_range_for(mu, {x}, std::exp(tree.log_radius(side, tree.depth())));
          if (kmin_opt->count()) range.k_min = kmin;
          if (kmax_opt->count()) range.k_max = kmax;
          prof = wolff_dyadic(mu, x, alpha, p, range.k_min, range.k_max);
        }
        res.text = com.format == "csv" ? to_csv(prof) : dump(to_json(prof));
        res.summary = "wolff: total " + fmt6(prof.total) + (prof.divergent ? " (divergent)" : "");
      } else if (sub == riesz) {
        auto tree = build_from(cfg, true);
        auto mu = realize_measure(tree, side, spl, com.seed);
        const double v = riesz_potential(mu, parse_point(at), alpha);
        json j = {{"value", std::isfinite(v) ? json(v) : json(format_double(v))}, {"alpha", alpha},
                  {"atoms", mu.size()}, {"divergent", !std::isfinite(v)}};
        res.text = render(j, com.format);
        res.summary = "riesz: " + format_double(v);
      } else if (sub == curv) {
        auto tree = build_from(cfg, true);
        auto mu = realize_measure(tree, side, spl, com.seed);
        CurvatureOptions co;
        co.pointwise_points = points;
        auto est = menger_curvature(mu, triples, com.seed, co);
        res.text = render(to_json(est), com.format);
        res.summary = "curvature: " + fmt6(est.value) + " +- " + fmt6(est.stderr_);
      } else if (sub == cap) {
        CapacityIndices ix;
        if (method != "melnikov") {
          if (Kidx) {
            ix = theorem1_indices(*Kidx);
          } else {
            if (!(cap->count("--alpha") && cap->count("--p"))) throw ConfigError("--alpha", "give --alpha and --p, or --K");
            ix = CapacityIndices::make(alpha, p);
          }
        }
        CapacityEstimate est;
        if (method == "wolff-tree") {
          est = wolff_capacity_lower(build_from(cfg, false), side, ix);
        } else {
          auto tree = build_from(cfg, true);
          auto mu = realize_measure(tree, side, spl, com.seed);
          const double finest = std::exp(tree.log_radius(side, tree.depth()));
          if (method == "wolff-dyadic") {
            auto qs = standard_query_set(tree, side, mu, extra, com.seed);
            est = wolff_capacity_lower(mu, ix, qs, dyadic_range_for(mu, qs.points, finest));
          } else if (method == "direct") {
            QuadratureSpec qs;
            qs.fine_cells = qs.coarse_cells = cells;
            est = direct_capacity_lower(mu, ix, qs);
          } else {
            std::vector<Point> pts;
            for (const auto& atom : mu.atoms()) pts.push_back(atom.pt);
            const int lo = static_cast<int>(std::floor(std::log2(finest)));
            const double growth = linear_growth_constant(mu, lo, 1, pts);
            est = melnikov_gamma_lower(mu, menger_curvature(mu, triples, com.seed), growth);
          }
        }
        res.text = render(to_json(est), com.format);
        res.summary = "capacity (" + method + "): " + format_double(est.value);
      } else if (sub == content) {
        auto tree = build_from(cfg, true);
        Gauge g;
        if (gauge_name == "mu-a" || gauge_name == "distorted") {
          auto nu = realize_measure(tree, Side::Source, spl, com.seed);
          g = gauge_name == "mu-a" ? mu_a_gauge(nu, a) : distorted_gauge(tree, nu, a, Kidx.value_or(cfg.K));
          if (gauge_name == "distorted" && side != Side::Target)
            throw ConfigError("--side", "the distorted gauge lives on the target side");
        } else if (gauge_name == "mass") {
          g = tree_mass_gauge(tree);
        } else if (gauge_name == "constant") {
          g = constant_gauge();
        } else {
          g = inverse_radius_gauge();
        }
        auto c = content_Mh_tree(tree, side, g);
        json j = {{"value", c.value}, {"gauge", gauge_name}, {"side", to_string(side)}, {"cover_size", c.cover.size()}};
        if (frostman) {
          auto f = frostman_tree(tree, side, g);
          j["frostman"] = {{"total", f.total}, {"violations", f.violations}};
        }
        res.text = render(j, com.format);
        res.summary = "content: " + format_double(c.value);
      } else {
        auto tree = build_from(cfg, true);
        auto mu = realize_measure(tree, side, spl, com.seed);
        Gauge g;
        double t1 = 1.0, t2 = 2.0;
        if (gauge_name == "mu-a") {
          if (!(a > 0.0 && a < 1.0)) throw ConfigError("--a", "must lie in (0,1)");
          g = mu_a_gauge(mu, a);
          t1 = 4.0 * std::exp2(1.0 + a);
          t2 = 1.0 / (1.0 - std::exp2(a - 1.0));
        } else if (gauge_name == "constant") {
          g = constant_gauge();
        } else {
          g = inverse_radius_gauge();
        }
        t1 = g1_thr.value_or(t1);
        t2 = g2_thr.value_or(t2);
        std::vector<Point> anchors;
        for (const auto& atom : mu.atoms()) anchors.push_back(atom.pt);
        const double finest = std::exp(tree.log_radius(side, tree.depth()));
        auto pairs = sample_g1_pairs(anchors, finest, 1.0, samples, com.seed);
        std::vector<Ball> balls;
        for (const auto& pr : pairs) balls.push_back(pr.b1);
        auto r1 = check_G1(g, pairs, t1);
        auto r2 = check_G2(g, balls, 4.0, t2);
        json j = {{"gauge", gauge_name}, {"G1", to_json(r1)}, {"G2", to_json(r2)}, {"pass", r1.pass && r2.pass}};
        res.text = render(j, com.format);
        res.code = r1.pass && r2.pass ? 0 : 1;
        res.summary = "check-gauge: C0 " + fmt6(r1.C0) + ", C0' " + fmt6(r2.C0prime) +
                      (res.code == 0 ? " PASS" : " FAIL");
      }
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  std::string path = com.out;
  if (path.empty()) {
    if (const char* dir = std::getenv(kOutDirEnv); dir && *dir) path = std::string(dir) + "/" + name + "." + com.format;
  }
  if (path.empty()) {
    out << res.text;
    err << res.summary << "\n";
  } else {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
      err << "config error: cannot write '" << path << "'\n";
      return 2;
    }
    f << res.text;
    out << res.summary << "\n";
  }
  return res.code;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace qcap::cli
