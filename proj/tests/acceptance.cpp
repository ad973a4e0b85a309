// Acceptance gate: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Expects the bundled data directory as argv[1] (falls back
// to the FINSPACE_DATA_DIR environment variable).

#include <cstdlib>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "finspace/discovery.hpp"
#include "finspace/enumerate.hpp"
#include "finspace/io.hpp"
#include "test_support.hpp"

using namespace finspace;
namespace ts = testsupport;

namespace {

int g_failures = 0;

void report(const std::string& name, bool ok, const std::string& detail = "") {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << name;
  if (!ok && !detail.empty()) std::cout << " -- " << detail;
  std::cout << std::endl;
  if (!ok) ++g_failures;
}

std::string g_data;

// --------------------------------------------------------------------------

void check_enumeration_counts() {
  struct Row {
    std::size_t n;
    std::uint64_t distinct, distinct_t0, inequivalent, inequivalent_t0;
  };
  const std::vector<Row> expected = {
      {1, 1, 1, 1, 1},         {2, 4, 3, 3, 2},       {3, 29, 19, 9, 5},
      {4, 355, 219, 33, 16},   {5, 6942, 4231, 139, 63}};
  bool ok = true;
  std::string detail;
  for (const auto& row : expected) {
    auto d = count_classes(row.n, false, UpTo::labeled, 4);
    auto dt = count_classes(row.n, true, UpTo::labeled, 4);
    auto i = count_classes(row.n, false, UpTo::homeomorphism, 4);
    auto it = count_classes(row.n, true, UpTo::homeomorphism, 4);
    if (*d.distinct != row.distinct || *dt.distinct_t0 != row.distinct_t0 ||
        *i.inequivalent != row.inequivalent ||
        *it.inequivalent_t0 != row.inequivalent_t0) {
      ok = false;
      detail = "mismatch at n=" + std::to_string(row.n);
    }
  }
  report("enumeration counts for n=1..5", ok, detail);

  if (std::getenv("FINSPACE_ACCEPT_LONG")) {
    auto d = count_classes(6, false, UpTo::labeled, 4);
    auto dt = count_classes(6, true, UpTo::labeled, 4);
    auto i = count_classes(6, false, UpTo::homeomorphism, 4);
    auto it = count_classes(6, true, UpTo::homeomorphism, 4);
    report("enumeration counts for n=6 (long)",
           *d.distinct == 209527 && *dt.distinct_t0 == 130023 &&
               *i.inequivalent == 718 && *it.inequivalent_t0 == 318);
  }
}

void check_three_point_classification() {
  struct Row {
    std::string file;
    bool t0, connected;
  };
  const std::vector<Row> rows = {{"row1.json", true, false},
                                 {"row2.json", true, true},
                                 {"row3.json", true, true},
                                 {"row4.json", true, false},
                                 {"row5.json", false, true}};
  bool ok = true;
  std::string detail;
  for (const auto& row : rows) {
    auto s = space_from_json(json::parse(read_file(g_data + "/table1/" + row.file)));
    if (is_t0(s) != row.t0 || is_connected(s) != row.connected) {
      ok = false;
      detail = row.file;
    }
  }
  auto row3 = space_from_json(json::parse(read_file(g_data + "/table1/row3.json")));
  auto d2 = FiniteSpace::from_open_sets({"x", "y"}, {{"x"}, {"y"}});
  if (!homeomorphic(row3, cone(d2))) {
    ok = false;
    detail = "row3 not homeomorphic to the cone over the 2-point discrete space";
  }
  report("three-point space classification and cone identification", ok, detail);
}

void check_core() {
  std::mt19937_64 rng(1001);
  bool ok = true;
  std::string detail;
  for (int trial = 0; trial < 500 && ok; ++trial) {
    auto s = ts::random_t0_space(rng, 1 + trial % 7);
    auto base = core(s);
    if (!beat_points(base.core).empty()) { ok = false; detail = "beat point left"; }
    if (!homotopy_equivalent(base.core, s)) { ok = false; detail = "not equivalent"; }
    for (std::uint64_t seed = 1; seed <= 5 && ok; ++seed)
      if (!homeomorphic(core(s, seed).core, base.core)) {
        ok = false;
        detail = "removal order changed the core";
      }
  }
  report("core reduction on 500 random spaces", ok, detail);

  bool cones = true;
  for (std::size_t n = 0; n <= 5 && cones; ++n)
    for (const auto& s : enumerate_posets(n))
      if (!is_contractible(cone(s))) cones = false;
  report("cone contractibility, exhaustive to 5 points", cones);
}

void check_dsep_equivalence() {
  std::mt19937_64 rng(1003);
  bool ok = true;
  std::string detail;
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    Dag d = transitive_reduction(ts::random_dag(rng, 3 + trial % 5, 0.4));
    auto space = dag_to_space(d);
    for (int q = 0; q < 20 && ok; ++q) {
      auto t = ts::random_triple(rng, d.vertices);
      bool topological = tci(space, t.u, t.v, t.z);
      bool classical = ts::moral_d_separated(d, {t.u.begin(), t.u.end()},
                                             {t.v.begin(), t.v.end()},
                                             {t.z.begin(), t.z.end()});
      if (topological != classical) {
        ok = false;
        detail = "disagreement on trial " + std::to_string(trial);
      }
    }
  }
  report("separation oracle equivalence, 1000 graphs x 20 queries", ok, detail);
}

void check_soundness() {
  std::mt19937_64 rng(1007);
  bool ok = true;
  std::string detail;
  for (int trial = 0; trial < 500 && ok; ++trial) {
    auto space = ts::random_t0_space(rng, 2 + trial % 4);
    auto model = ts::random_binary_model(rng, space, 0.05);
    auto j = joint(model);
    for (int q = 0; q < 8 && ok; ++q) {
      auto t = ts::random_triple(rng, space.elements());
      if (tci(space, t.u, t.v, t.z) && !ci_exact(j, t.u, t.v, t.z, 1e-9)) {
        ok = false;
        detail = "independence violated on trial " + std::to_string(trial);
      }
    }
  }
  report("topological separation implies exact independence, 500 models", ok,
         detail);
}

void check_interventional_recovery() {
  std::mt19937_64 rng(1009);
  bool ok = true;
  std::string detail;
  for (int trial = 0; trial < 200 && ok; ++trial) {
    auto space = ts::random_t0_space(rng, 2 + trial % 7);  // up to 8 points
    auto truth = ts::random_binary_model(rng, space);
    auto family = ancestral_intervention_family(space);
    auto learned = learn_poset_interventional(truth, family, OracleMode::exact());
    if (learned.space != space || learned.interventions_performed != family.sets.size()) {
      ok = false;
      detail = "exact oracle miss on trial " + std::to_string(trial);
    }
  }
  report("interventional poset recovery, exact oracle, 200/200", ok, detail);

  std::size_t hits = 0;
  const int runs = 200;
  for (int trial = 0; trial < runs; ++trial) {
    auto space = ts::random_t0_space(rng, 2 + trial % 7);
    auto truth = ts::strong_signal_model(space);
    auto family = ancestral_intervention_family(space);
    auto learned = learn_poset_interventional(
        truth, family, OracleMode::sampled_mode(20000, 0.01, 5000 + trial));
    if (learned.space == space) ++hits;
  }
  report("interventional poset recovery, sampled oracle >= 95% (" +
             std::to_string(hits) + "/" + std::to_string(runs) + ")",
         hits * 100 >= runs * 95);
}

void check_antichain_recovery() {
  std::mt19937_64 rng(1013);
  bool ok = true;
  std::string detail;
  for (int trial = 0; trial < 200 && ok; ++trial) {
    Dag d = ts::random_dag(rng, 2 + trial % 7, 0.4);
    auto space = dag_to_space(d);
    auto truth = ts::random_binary_model(rng, space);
    auto [learned, count] = learn_dag_antichain(truth, OracleMode::exact());
    if (learned.edges != transitive_reduction(d).edges || count != height(space)) {
      ok = false;
      detail = "miss on trial " + std::to_string(trial);
    }
  }
  report("antichain DAG recovery with height-many interventions, 200/200", ok,
         detail);
}

void check_mirsky() {
  bool ok = true;
  for (std::size_t n = 0; n <= 5 && ok; ++n)
    for_each_poset(n, [&](const PreorderView& v) {
      if (!ok) return;
      auto s = v.to_space();
      if (n > 0 && height(s) != ts::min_antichain_partition(s)) ok = false;
    });
  report("height equals minimum antichain partition, exhaustive to 5 points", ok);
}

void check_genotype_pipeline() {
  auto data = ingest_genotypes_file(g_data + "/pancreatic.csv");
  auto learned = learn_poset_genotypes(data);
  const auto& s = learned.space;

  // Independent oracle: recompute the prerequisite relation directly from
  // the genotype rows.
  bool ok = true;
  for (const auto& e : data.events) {
    for (const auto& f : data.events) {
      bool expected = true;
      for (const auto& [genotype, count] : data.genotypes)
        if (genotype.count(f) && !genotype.count(e)) expected = false;
      bool learned_rel = e == f || s.preorder_leq(f, e);
      if ((e != f && expected) != (e != f && learned_rel)) ok = false;
    }
  }
  bool shape = s.preorder_leq("TP53", "KRAS") && s.preorder_leq("SMAD4", "TP53") &&
               !s.preorder_leq("KRAS", "TP53") &&
               !s.preorder_leq("CDKN2A", "KRAS") &&
               !s.preorder_leq("KRAS", "CDKN2A");
  std::string golden = read_file(g_data + "/pancreatic-learned.golden.json");
  bool pinned = learned_poset_to_json(learned).dump(2) + "\n" == golden;
  report("genotype pipeline: inclusion oracle, expected chain, pinned golden",
         ok && shape && pinned,
         ok ? (shape ? "golden drift" : "chain shape wrong") : "oracle mismatch");
}

void check_round_trips() {
  bool ok = true;
  for (std::size_t n : {3, 4}) {
    for_each_poset(n, [&](const PreorderView& v) {
      auto s = v.to_space();
      if (dag_to_space(space_to_dag(s)) != s) ok = false;
    });
  }
  report("space <-> DAG round trip on all 3- and 4-point posets", ok);

  bool bytes = true;
  for (const std::string name :
       {"table1/row1.json", "table1/row2.json", "table1/row3.json",
        "table1/row4.json", "table1/row5.json", "collider.json"}) {
    std::string text = read_file(g_data + "/" + name);
    if (space_to_json(space_from_json(json::parse(text))).dump(2) + "\n" != text)
      bytes = false;
  }
  std::string covid = read_file(g_data + "/covid.dot");
  if (dag_to_dot(dag_from_dot(covid)) != covid) bytes = false;
  std::string admg = read_file(g_data + "/covid-admg.json");
  if (hyper_to_json(hyper_from_json(json::parse(admg))).dump(2) + "\n" != admg)
    bytes = false;
  report("byte-identical serialization round trips on bundled files", bytes);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) {
    g_data = argv[1];
  } else if (const char* env = std::getenv("FINSPACE_DATA_DIR")) {
    g_data = env;
  } else {
    std::cerr << "usage: acceptance <data-dir>" << std::endl;
    return 2;
  }
  try {
    check_enumeration_counts();
    check_three_point_classification();
    check_core();
    check_dsep_equivalence();
    check_soundness();
    check_interventional_recovery();
    check_antichain_recovery();
    check_mirsky();
    check_genotype_pipeline();
    check_round_trips();
  } catch (const std::exception& e) {
    std::cout << "[FAIL] unexpected exception -- " << e.what() << std::endl;
    ++g_failures;
  }
  return g_failures == 0 ? 0 : 1;
}
