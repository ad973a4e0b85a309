#ifndef FINSPACE_IO_HPP_
#define FINSPACE_IO_HPP_

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "finspace/causal.hpp"
#include "finspace/discovery.hpp"
#include "finspace/finite_space.hpp"
#include "finspace/graphs.hpp"

namespace finspace {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// FiniteSpace JSON: {"elements": [...], "min_open": {"x": ["x","y"], ...}}.
// Elements are sorted lexicographically in every serialization so output
// is byte-stable.
// ---------------------------------------------------------------------------

inline json space_to_json(const FiniteSpace& s) {
  std::vector<std::string> sorted = s.elements();
  std::sort(sorted.begin(), sorted.end());
  json opens = json::object();
  for (const auto& e : sorted) {
    auto names = s.min_open(e);
    std::sort(names.begin(), names.end());
    opens[e] = names;
  }
  return json{{"elements", sorted}, {"min_open", opens}};
}

inline FiniteSpace space_from_json(const json& j) {
  if (!j.contains("elements") || !j.contains("min_open"))
    throw input_error("space JSON needs \"elements\" and \"min_open\"");
  std::vector<std::string> elements =
      j.at("elements").get<std::vector<std::string>>();
  FiniteSpace probe = FiniteSpace::from_open_sets(elements, {});
  std::vector<Mask> opens(elements.size(), 0);
  for (const auto& [name, members] : j.at("min_open").items()) {
    Mask m = 0;
    for (const auto& member : members)
      m |= bit(probe.index_of(member.get<std::string>()));
    opens[probe.index_of(name)] = m;
  }
  return FiniteSpace::from_min_open(std::move(elements), std::move(opens));
}

// ---------------------------------------------------------------------------
// DOT for Dag / HasseDiagram / ChainGraph. Canonical writer output:
// sorted vertex lines, then sorted edge lines.
// ---------------------------------------------------------------------------

inline std::string dag_to_dot(const Dag& d) {
  std::ostringstream out;
  out << "digraph {\n";
  std::vector<std::string> vertices = d.vertices;
  std::sort(vertices.begin(), vertices.end());
  for (const auto& v : vertices) out << "  " << v << ";\n";
  for (const auto& [u, v] : d.edges) out << "  " << u << " -> " << v << ";\n";
  out << "}\n";
  return out.str();
}

inline std::string hasse_to_dot(const HasseDiagram& h) {
  return dag_to_dot(Dag{h.vertices, h.cover_edges});
}

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  auto e = s.find_last_not_of(" \t\r\n;");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Parses the small DOT subset used here: "a -> b;", "a -- b;", "a;".
inline ChainGraph chain_graph_from_dot(const std::string& text) {
  ChainGraph g;
  std::set<std::string> seen;
  auto add_vertex = [&](const std::string& v) {
    if (seen.insert(v).second) g.vertices.push_back(v);
  };
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = detail::trim(line);
    if (t.empty() || t == "}" || t.rfind("digraph", 0) == 0 ||
        t.rfind("graph", 0) == 0 || t.rfind("//", 0) == 0)
      continue;
    auto arrow = t.find("->");
    auto dash = t.find("--");
    if (arrow != std::string::npos) {
      std::string u = detail::trim(t.substr(0, arrow));
      std::string v = detail::trim(t.substr(arrow + 2));
      if (u.empty() || v.empty())
        throw input_error("malformed edge at line " + std::to_string(line_no));
      add_vertex(u);
      add_vertex(v);
      g.directed_edges.emplace(u, v);
    } else if (dash != std::string::npos) {
      std::string u = detail::trim(t.substr(0, dash));
      std::string v = detail::trim(t.substr(dash + 2));
      if (u.empty() || v.empty())
        throw input_error("malformed edge at line " + std::to_string(line_no));
      add_vertex(u);
      add_vertex(v);
      g.undirected_edges.insert(std::minmax(u, v));
    } else {
      if (t.find(' ') != std::string::npos)
        throw input_error("malformed statement at line " +
                          std::to_string(line_no) + ": " + t);
      add_vertex(t);
    }
  }
  std::sort(g.vertices.begin(), g.vertices.end());
  return g;
}

inline Dag dag_from_dot(const std::string& text) {
  ChainGraph g = chain_graph_from_dot(text);
  if (!g.undirected_edges.empty())
    throw input_error("undirected edge in DAG input");
  return Dag{g.vertices, g.directed_edges};
}

// ---------------------------------------------------------------------------
// HyperModel JSON.
// ---------------------------------------------------------------------------

inline json hyper_to_json(const HyperModel& hm) {
  std::vector<std::string> vertices = hm.base.vertices;
  std::sort(vertices.begin(), vertices.end());
  json edges = json::array();
  for (const auto& [u, v] : hm.base.edges)
    edges.push_back(json::array({u, v}));
  json hyperedges = json::array();
  for (auto edge : hm.hyperedges) {
    std::sort(edge.begin(), edge.end());
    hyperedges.push_back(edge);
  }
  return json{{"vertices", vertices},
              {"edges", edges},
              {"hyperedges", hyperedges}};
}

inline HyperModel hyper_from_json(const json& j) {
  HyperModel hm;
  hm.base.vertices = j.at("vertices").get<std::vector<std::string>>();
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2)
      throw input_error("edge must be a pair");
    hm.base.edges.emplace(e[0].get<std::string>(), e[1].get<std::string>());
  }
  for (const auto& h : j.at("hyperedges"))
    hm.hyperedges.push_back(h.get<std::vector<std::string>>());
  return hm;
}

// ---------------------------------------------------------------------------
// Model JSON:
// {"space": {...}, "domains": {"X": ["0","1"]},
//  "cpts": {"X": {"parents": [...], "table": {"<v1>,<v2>": [p, ...]}}}}.
// Table keys are comma-joined parent values in the order `parents` lists
// them ("" for a parentless variable).
// ---------------------------------------------------------------------------

inline json model_to_json(const DiscreteCausalModel& m) {
  const FiniteSpace& s = m.space();
  json domains = json::object(), cpts = json::object();
  for (std::size_t v = 0; v < m.num_vars(); ++v) {
    const std::string& name = s.element(v);
    domains[name] = m.domain(v);
    const Cpt& c = m.cpt(v);
    std::vector<std::string> parent_names;
    for (std::size_t p : c.parents) parent_names.push_back(s.element(p));
    json table = json::object();
    std::vector<std::size_t> values(c.parents.size(), 0);
    for (std::size_t row = 0; row < c.table.size(); ++row) {
      std::size_t r = row;
      for (std::size_t pos = c.parents.size(); pos-- > 0;) {
        values[pos] = r % m.domain(c.parents[pos]).size();
        r /= m.domain(c.parents[pos]).size();
      }
      std::string key;
      for (std::size_t pos = 0; pos < c.parents.size(); ++pos)
        key += (pos ? "," : "") + m.domain(c.parents[pos])[values[pos]];
      table[key] = c.table[row];
    }
    cpts[name] = json{{"parents", parent_names}, {"table", table}};
  }
  return json{{"space", space_to_json(s)},
              {"domains", domains},
              {"cpts", cpts}};
}

inline DiscreteCausalModel model_from_json(const json& j) {
  FiniteSpace space = space_from_json(j.at("space"));
  std::map<std::string, std::vector<std::string>> domains;
  for (const auto& [name, dom] : j.at("domains").items())
    domains[name] = dom.get<std::vector<std::string>>();
  std::map<std::string, Cpt> mechanisms;
  for (const auto& [name, spec] : j.at("cpts").items()) {
    Cpt c;
    auto parent_names = spec.at("parents").get<std::vector<std::string>>();
    std::vector<std::pair<std::size_t, std::size_t>> order;  // (index, pos)
    for (std::size_t pos = 0; pos < parent_names.size(); ++pos)
      order.emplace_back(space.index_of(parent_names[pos]), pos);
    std::sort(order.begin(), order.end());
    for (const auto& [idx, pos] : order) c.parents.push_back(idx);

    std::size_t rows = 1;
    for (const auto& [idx, pos] : order) rows *= domains.at(space.element(idx)).size();
    c.table.assign(rows, {});
    for (const auto& [key, dist] : spec.at("table").items()) {
      // Split the comma-joined parent values (listed-parent order).
      std::vector<std::string> values;
      if (!parent_names.empty()) {
        std::string token;
        std::istringstream ks(key);
        while (std::getline(ks, token, ',')) values.push_back(token);
        if (values.size() != parent_names.size())
          throw input_error("CPT key \"" + key + "\" arity mismatch for " +
                            name);
      }
      std::size_t row = 0;
      for (const auto& [idx, pos] : order) {
        const auto& dom = domains.at(space.element(idx));
        auto it = std::find(dom.begin(), dom.end(), values[pos]);
        if (it == dom.end())
          throw input_error("CPT key value " + values[pos] +
                            " not in domain of parent");
        row = row * dom.size() +
              static_cast<std::size_t>(it - dom.begin());
      }
      c.table[row] = dist.get<std::vector<double>>();
    }
    for (const auto& row : c.table)
      if (row.empty())
        throw input_error("CPT of " + name + " is missing rows");
    mechanisms[name] = std::move(c);
  }
  return DiscreteCausalModel(std::move(space), std::move(domains),
                             std::move(mechanisms));
}

// ---------------------------------------------------------------------------
// Intervention family JSON: {"sets": [["a","b"], ...], "universe": [...]}.
// ---------------------------------------------------------------------------

inline InterventionFamily family_from_json(const json& j) {
  InterventionFamily f;
  for (const auto& set : j.at("sets"))
    f.sets.push_back(set.get<std::vector<std::string>>());
  return f;
}

inline std::vector<std::string> family_universe_from_json(const json& j) {
  if (j.contains("universe"))
    return j.at("universe").get<std::vector<std::string>>();
  std::set<std::string> members;
  for (const auto& set : j.at("sets"))
    for (const auto& m : set) members.insert(m.get<std::string>());
  return {members.begin(), members.end()};
}

// ---------------------------------------------------------------------------
// Genotype CSV: header "tumor,gene", one row per tumor-gene mutation pair.
// Rows group by tumor into genotypes; identical genotypes aggregate with
// counts.
// ---------------------------------------------------------------------------

inline GenotypeDataset ingest_genotypes(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != "tumor,gene")
    throw input_error("expected CSV header \"tumor,gene\"");
  std::map<std::string, std::set<std::string>> by_tumor;
  std::vector<std::string> tumor_order;
  std::set<std::string> events;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    std::string t = detail::trim(line);
    if (t.empty()) continue;
    auto comma = t.find(',');
    if (comma == std::string::npos)
      throw input_error("row " + std::to_string(row) + ": missing comma");
    std::string tumor = detail::trim(t.substr(0, comma));
    std::string gene = detail::trim(t.substr(comma + 1));
    if (tumor.empty() || gene.empty())
      throw input_error("row " + std::to_string(row) +
                        ": empty tumor or gene name");
    if (by_tumor.emplace(tumor, std::set<std::string>{}).second)
      tumor_order.push_back(tumor);
    by_tumor[tumor].insert(gene);
    events.insert(gene);
  }
  GenotypeDataset data;
  data.events = {events.begin(), events.end()};
  std::map<std::set<std::string>, std::size_t> counts;
  for (const auto& tumor : tumor_order) ++counts[by_tumor[tumor]];
  for (const auto& [genotype, count] : counts)
    data.genotypes.emplace_back(genotype, count);
  return data;
}

inline GenotypeDataset ingest_genotypes_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open " + path);
  return ingest_genotypes(in);
}

// ---------------------------------------------------------------------------
// LearnedPoset JSON.
// ---------------------------------------------------------------------------

inline json learned_poset_to_json(const LearnedPoset& lp) {
  json provenance = json::object();
  for (const auto& [pair, evidence] : lp.provenance)
    provenance[pair.first + ">" + pair.second] = evidence;
  return json{{"space", space_to_json(lp.space)},
              {"provenance", provenance},
              {"interventions", lp.interventions_performed},
              {"warnings", lp.warnings}};
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace finspace

#endif  // FINSPACE_IO_HPP_
