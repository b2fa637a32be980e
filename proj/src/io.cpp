#include "qcap/io.hpp"

#include <cmath>
#include <sstream>

#include "qcap/numeric.hpp"

namespace qcap {

namespace {

// JSON has no infinities; they are spelled as strings
json num(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

}  // namespace

json to_json(const PotentialProfile& p) {
  json entries = json::array();
  for (const auto& e : p.entries)
    entries.push_back({{"scale_label", e.label}, {"contribution", num(e.contribution)},
                       {"running_total", num(e.running_total)}});
  return {{"alpha", p.alpha},
          {"p", p.p},
          {"source", p.source},
          {"scale_kind", p.scale_kind},
          {"total", num(p.total)},
          {"tail", num(p.tail)},
          {"divergent", p.divergent},
          {"divergence_rate", num(p.divergence_rate)},
          {"entries", entries}};
}

json to_json(const CurvatureEstimate& c) {
  return {{"value", num(c.value)},   {"stderr", num(c.stderr_)}, {"sup_pointwise", num(c.sup_pointwise)},
          {"triples", c.triples},    {"seed", c.seed},           {"exact", c.exact}};
}

json to_json(const CapacityEstimate& c) {
  return {{"value", num(c.value)},
          {"direction", to_string(c.direction)},
          {"alpha", c.indices.alpha},
          {"p", c.indices.p},
          {"homogeneity", c.indices.homogeneity},
          {"convention", c.convention},
          {"normalization", {{"sup", num(c.normalization.sup)}, {"query_set", c.normalization.query_set},
                             {"seed", c.normalization.seed}}},
          {"divergent", c.divergent},
          {"divergence_rate", num(c.divergence_rate)}};
}

json to_json(const DoublingReport& d) {
  return {{"C0", num(d.C0)},           {"C0_prime", num(d.C0prime)}, {"samples", d.samples},
          {"threshold", d.threshold},  {"pass", d.pass},             {"max_terms", d.max_terms},
          {"note", d.note}};
}

json to_json(const ExperimentReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json jr = json::array();
    for (double v : row) jr.push_back(num(v));
    rows.push_back(jr);
  }
  return {{"id", r.id},
          {"params", r.params},
          {"columns", r.columns},
          {"rows", rows},
          {"verdict",
           {{"kind", r.verdict.kind},
            {"pass", r.verdict.pass},
            {"statistic", num(r.verdict.statistic)},
            {"threshold", num(r.verdict.threshold)},
            {"detail", r.verdict.detail}}}};
}

json to_json(const CantorTree& t) {
  json gens = json::array();
  for (int n = 0; n <= t.depth(); ++n) {
    const auto& g = t.generation(n);
    gens.push_back({{"n", n},
                    {"s_log", g.log_s},
                    {"t_log", g.log_t},
                    {"s_protect_log", g.log_s_protect},
                    {"t_protect_log", g.log_t_protect},
                    {"mass_log", g.log_mass},
                    {"count_log", g.log_count}});
  }
  json out = {{"K", t.K()}, {"depth", t.depth()}, {"seed", t.seed()}, {"total_mass", t.total_mass()},
              {"generations", gens}};
  if (!t.enumerable()) {
    out["nodes"] = nullptr;
    return out;
  }
  json nodes = json::array();
  for (int n = 0; n <= t.depth(); ++n) {
    const auto& g = t.generation(n);
    for (std::size_t i = 0; i < t.node_count(n); ++i) {
      json node = {{"path", t.path(n, i)}, {"s_log", g.log_s}, {"t_log", g.log_t}, {"mass_log", g.log_mass}};
      if (t.realized()) {
        auto s = t.center(Side::Source, n, i), c = t.center(Side::Target, n, i);
        node["source_center"] = {s.x, s.y};
        node["target_center"] = {c.x, c.y};
      }
      nodes.push_back(node);
    }
  }
  out["nodes"] = nodes;
  return out;
}

std::string to_csv(const PotentialProfile& p) {
  std::ostringstream os;
  os << "scale_label,contribution,running_total\n";
  for (const auto& e : p.entries)
    os << e.label << ',' << format_double(e.contribution) << ',' << format_double(e.running_total) << '\n';
  return os.str();
}

std::string to_csv(const ExperimentReport& r) {
  std::ostringstream os;
  for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << r.columns[i];
  os << '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << '\n';
  }
  return os.str();
}

std::string flat_csv(const json& j) {
  std::ostringstream os;
  os << "key,value\n";
  auto rec = [&os](auto&& self, const json& v, const std::string& prefix) -> void {
    if (v.is_object()) {
      for (auto it = v.begin(); it != v.end(); ++it)
        self(self, it.value(), prefix.empty() ? it.key() : prefix + "." + it.key());
      return;
    }
    std::string cell;
    if (v.is_number_float())
      cell = format_double(v.get<double>());
    else if (v.is_string())
      cell = v.get<std::string>();
    else
      cell = v.dump();
    if (cell.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char c : cell) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      cell = q + "\"";
    }
    os << prefix << ',' << cell << '\n';
  };
  rec(rec, j, "");
  return os.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace qcap
