#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "finspace/discovery.hpp"
#include "test_support.hpp"

using namespace finspace;

TEST_CASE("chi-squared tail matches standard critical values") {
  CHECK(std::abs(detail::chi_squared_upper_tail(3.841, 1) - 0.05) < 1e-3);
  CHECK(std::abs(detail::chi_squared_upper_tail(6.635, 1) - 0.01) < 1e-3);
  CHECK(std::abs(detail::chi_squared_upper_tail(5.991, 2) - 0.05) < 1e-3);
  CHECK(detail::chi_squared_upper_tail(0.0, 3) == 1.0);
  CHECK(detail::chi_squared_upper_tail(1000.0, 1) < 1e-10);
  CHECK_THROWS_AS(detail::gamma_q(0.5, -1.0), input_error);
}

TEST_CASE("g-test separates dependent from independent tables") {
  // Perfectly proportional rows: statistic 0, p-value 1.
  CHECK(detail::g_test_p_value({{100, 200}, {50, 100}}) == 1.0);
  // Strong diagonal dependence.
  CHECK(detail::g_test_p_value({{500, 10}, {10, 500}}) < 1e-12);
  // Degenerate table (one column): no evidence either way.
  CHECK(detail::g_test_p_value({{50}, {60}}) == 1.0);
}

TEST_CASE("ancestral intervention family is a separating system on T0 spaces") {
  std::mt19937_64 rng(201);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = testsupport::random_t0_space(rng, 1 + trial % 7);
    auto family = ancestral_intervention_family(s);
    REQUIRE(family.sets.size() == s.size());
    CHECK(is_separating_system(family.sets, s.elements()));
    for (std::size_t x = 0; x < s.size(); ++x)
      CHECK(s.mask_of(family.sets[x]) == s.min_closed_mask(x));
  }
}

TEST_CASE("interventional learning recovers the poset with an exact oracle") {
  std::mt19937_64 rng(203);
  for (int trial = 0; trial < 50; ++trial) {
    auto space = testsupport::random_t0_space(rng, 2 + trial % 5);
    auto truth = testsupport::random_binary_model(rng, space);
    auto family = ancestral_intervention_family(space);
    auto learned = learn_poset_interventional(truth, family, OracleMode::exact());
    CHECK(learned.space == space);
    CHECK(learned.interventions_performed == family.sets.size());
    CHECK(learned.warnings.empty());
  }
}

TEST_CASE("non-separating family triggers a warning and partial recovery") {
  auto space = dag_to_space(Dag{{"x", "y"}, {{"x", "y"}}});
  std::mt19937_64 rng(207);
  auto truth = testsupport::random_binary_model(rng, space);
  InterventionFamily whole;
  whole.sets = {{"x", "y"}};
  auto learned = learn_poset_interventional(truth, whole, OracleMode::exact());
  CHECK_FALSE(learned.warnings.empty());
  CHECK_THROWS_AS(
      learn_poset_interventional(truth, InterventionFamily{{{}}}, OracleMode::exact()),
      input_error);
}

TEST_CASE("interventional learning works from samples on a fixed chain") {
  auto space = dag_to_space(
      Dag{{"a", "b", "c"}, {{"a", "b"}, {"b", "c"}}});
  auto truth = testsupport::strong_signal_model(space);
  auto family = ancestral_intervention_family(space);
  auto learned = learn_poset_interventional(
      truth, family, OracleMode::sampled_mode(20000, 0.01, 42));
  CHECK(learned.space == space);
}

TEST_CASE("antichain learning returns the transitive reduction") {
  std::mt19937_64 rng(211);
  for (int trial = 0; trial < 50; ++trial) {
    Dag d = testsupport::random_dag(rng, 2 + trial % 5, 0.4);
    auto space = dag_to_space(d);
    auto truth = testsupport::random_binary_model(rng, space);
    auto [learned, count] = learn_dag_antichain(truth, OracleMode::exact());
    CHECK(learned.edges == transitive_reduction(d).edges);
    CHECK(count == height(space));
  }
}

TEST_CASE("genotype learning on the pancreatic fragment") {
  GenotypeDataset data;
  data.events = {"CDKN2A", "KRAS", "SMAD4", "TP53"};
  data.genotypes = {{{"KRAS", "TP53"}, 1},
                    {{"KRAS"}, 1},
                    {{"KRAS", "SMAD4", "TP53"}, 1},
                    {{"CDKN2A"}, 1}};
  auto learned = learn_poset_genotypes(data);
  const auto& s = learned.space;
  CHECK(is_t0(s));
  // KRAS above TP53 above SMAD4 (prerequisite chain), CDKN2A incomparable.
  CHECK(s.preorder_leq("TP53", "KRAS"));
  CHECK(s.preorder_leq("SMAD4", "TP53"));
  CHECK(s.preorder_leq("SMAD4", "KRAS"));
  CHECK_FALSE(s.preorder_leq("KRAS", "TP53"));
  for (const auto& other : {"KRAS", "SMAD4", "TP53"}) {
    CHECK_FALSE(s.preorder_leq("CDKN2A", other));
    CHECK_FALSE(s.preorder_leq(other, "CDKN2A"));
  }
  CHECK(learned.provenance.count({"KRAS", "TP53"}) == 1);
  CHECK_THROWS_AS(learn_poset_genotypes(GenotypeDataset{}), input_error);
}

TEST_CASE("genotype learning merges always-co-occurring events") {
  GenotypeDataset data;
  data.events = {"A", "B", "C"};
  data.genotypes = {{{"A", "B"}, 3}, {{"A", "B", "C"}, 1}};
  auto learned = learn_poset_genotypes(data);
  CHECK(learned.space.size() == 2);  // A and B merge, named "A"
  CHECK(learned.space.has_element("A"));
  CHECK_FALSE(learned.space.has_element("B"));
  CHECK(learned.space.preorder_leq("C", "A"));  // C is a prerequisite-free descendant
}

TEST_CASE("separability check lists unseparated pairs") {
  GenotypeDataset data;
  data.events = {"A", "B", "C"};
  data.genotypes = {{{"A", "B"}, 2}, {{"C"}, 1}};
  auto pairs = separability_check(data);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0] == std::pair<std::string, std::string>{"A", "B"});
  CHECK(separability_check(GenotypeDataset{}).empty());
}

TEST_CASE("intervention family classification") {
  std::vector<std::string> abc{"a", "b", "c"};
  auto label = [&](const std::vector<std::vector<std::string>>& sets) {
    return classify_intervention_topology(InterventionFamily{sets}, abc).label;
  };
  CHECK(label({{"a", "b", "c"}}) == FamilyLabel::trivial);
  CHECK(label({{}}) == FamilyLabel::trivial);
  CHECK(label({{"a"}, {"b"}, {"c"}}) == FamilyLabel::singleton_closed);
  CHECK(label({{"a"}, {"b", "c"}}) == FamilyLabel::partition);
  CHECK(label({{"a", "b"}, {"b", "c"}, {"a", "c"}}) ==
        FamilyLabel::strongly_separating);
  CHECK(label({{"a"}, {"a", "b"}}) == FamilyLabel::separating);
  CHECK(label({{"a", "b"}}) == FamilyLabel::other);

  auto c = classify_intervention_topology(
      InterventionFamily{{{"a"}, {"b"}, {"c"}}}, abc);
  CHECK(c.singleton_closed);
  CHECK(c.strongly_separating);
  CHECK(c.separating);
  CHECK_FALSE(c.trivial);
}
