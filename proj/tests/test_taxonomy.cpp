#include <doctest.h>

#include <algorithm>
#include <random>

#include "esdv/taxonomy.hpp"
#include "support.hpp"

using namespace esdv;
using namespace esdv::taxonomy;

namespace {

CascadeGraph beijing_cascade() { return test::beijing_model().cascade; }

/// Rebuilds `g` without the listed edges, then adds `extra_nodes` and
/// `extra_edges`.
CascadeGraph mutate(const CascadeGraph &g, std::vector<Edge> drop,
                    std::vector<Node> extra_nodes = {},
                    std::vector<Edge> extra_edges = {}) {
  CascadeGraph out;
  for (const auto &[id, n] : g.nodes())
    out.add_node(n);
  for (auto &n : extra_nodes)
    out.add_node(n);
  for (const auto &e : g.edges())
    if (std::find(drop.begin(), drop.end(), e) == drop.end())
      out.add_edge(e.first, e.second);
  for (const auto &e : extra_edges)
    out.add_edge(e.first, e.second);
  return out;
}

std::vector<std::string> codes_of(const ValidationReport &r) {
  std::vector<std::string> out;
  for (const auto &v : r.violations)
    out.push_back(v.code);
  return out;
}

Node intermediate(std::string id) {
  return {std::move(id), NodeKind::Disservice, DisserviceTier::Intermediate,
          FunctionalClass::Regulating, "mutant"};
}

} // namespace

TEST_CASE("Beijing cascade validates clean") {
  ValidationReport r = validate_cascade(beijing_cascade());
  CHECK(r.ok());
  CHECK(beijing_cascade().nodes().size() == 22);
}

TEST_CASE("empty graph is valid") {
  CHECK(validate_cascade(CascadeGraph{}).ok());
}

TEST_CASE("A: final disservice without a negative effect") {
  auto g =
      mutate(beijing_cascade(), {{"infrastructure_damage", "repair_costs"}});
  // repair_costs still feeds value_loss, so only A fires.
  auto r = validate_cascade(g);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].code == codes::final_without_effect);
  CHECK(r.violations[0].nodes ==
        std::vector<std::string>{"infrastructure_damage"});
}

TEST_CASE("B: intermediate disservice linked directly to a negative effect") {
  auto g = mutate(beijing_cascade(), {}, {},
                  {{"invasive_species_introduction", "watering_costs"}});
  auto r = validate_cascade(g);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].code == codes::intermediate_direct_effect);
  CHECK(r.violations[0].nodes ==
        std::vector<std::string>{"invasive_species_introduction"});
}

TEST_CASE("C: intermediate disservice reaching nothing valuable") {
  auto g = mutate(beijing_cascade(),
                  {{"invasive_species_introduction", "water_quantity_decrease"},
                   {"invasive_species_introduction", "food_raw_material"}});
  auto r = validate_cascade(g);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].code == codes::intermediate_dead_end);
}

TEST_CASE("C: reachability is transitive through other intermediates") {
  auto g = mutate(beijing_cascade(), {}, {intermediate("habitat_loss")},
                  {{"species_spread", "habitat_loss"},
                   {"habitat_loss", "invasive_species_introduction"}});
  CHECK(validate_cascade(g).ok());
}

TEST_CASE("D: edge outside the cascade order") {
  auto g =
      mutate(beijing_cascade(), {}, {}, {{"urban_vegetation", "repair_costs"}});
  auto r = validate_cascade(g);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].code == codes::illegal_edge);
  CHECK(r.violations[0].nodes ==
        std::vector<std::string>{"urban_vegetation", "repair_costs"});
}

TEST_CASE("E: cycle among forward edges") {
  auto g = mutate(beijing_cascade(), {},
                  {intermediate("loop_a"), intermediate("loop_b")},
                  {{"species_spread", "loop_a"},
                   {"loop_a", "loop_b"},
                   {"loop_b", "loop_a"},
                   {"loop_b", "food_raw_material"}});
  auto r = validate_cascade(g);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].code == codes::cycle);
  CHECK(r.violations[0].nodes == std::vector<std::string>{"loop_a", "loop_b"});
}

TEST_CASE("E: a disservice feeding itself is a cycle") {
  auto g = mutate(
      beijing_cascade(), {}, {},
      {{"invasive_species_introduction", "invasive_species_introduction"}});
  CHECK(codes_of(validate_cascade(g)) ==
        std::vector<std::string>{std::string(codes::cycle)});
}

TEST_CASE("feedback edge does not close a cycle") {
  auto g = beijing_cascade();
  REQUIRE(g.edges().count({"species_spread", "urban_vegetation"}) == 1);
  CHECK(validate_cascade(g).ok());
  CHECK(is_feedback_edge(NodeKind::Function, NodeKind::Structure));
  CHECK_FALSE(is_feedback_edge(NodeKind::Structure, NodeKind::Function));
}

TEST_CASE("F: service without a value change") {
  auto g = mutate(beijing_cascade(), {{"ecotourism", "value_gain"}});
  auto r = validate_cascade(g);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].code == codes::no_value_change);
}

TEST_CASE("edge_permitted matches the cascade order") {
  using K = NodeKind;
  const K all[] = {K::Structure,  K::Function,       K::Service,
                   K::Disservice, K::NegativeEffect, K::ValueChange};
  std::set<std::pair<K, K>> allowed = {
      {K::Structure, K::Function},        {K::Function, K::Service},
      {K::Function, K::Disservice},       {K::Function, K::Structure},
      {K::Service, K::ValueChange},       {K::Disservice, K::NegativeEffect},
      {K::Disservice, K::Disservice},     {K::Disservice, K::Service},
      {K::NegativeEffect, K::ValueChange}};
  for (K a : all)
    for (K b : all)
      CHECK(edge_permitted(a, b) == (allowed.count({a, b}) == 1));
}

TEST_CASE("dangling edge is a structural error, not a violation") {
  CascadeGraph g;
  g.add_node({"s", NodeKind::Structure, {}, {}, "s"});
  g.add_edge("s", "ghost");
  CHECK_THROWS_AS(validate_cascade(g), StructuralError);
}

TEST_CASE("node invariants are enforced on insertion") {
  CascadeGraph g;
  CHECK_THROWS_AS(g.add_node({"d", NodeKind::Disservice, {}, {}, ""}),
                  StructuralError);
  CHECK_THROWS_AS(
      g.add_node({"s", NodeKind::Service, DisserviceTier::Final, {}, ""}),
      StructuralError);
  g.add_node({"x", NodeKind::Structure, {}, {}, ""});
  CHECK_THROWS_AS(g.add_node({"x", NodeKind::Function, {}, {}, ""}),
                  StructuralError);
}

TEST_CASE("validation is independent of insertion order") {
  // A graph with several violations so the multiset is non-trivial.
  auto base = mutate(
      beijing_cascade(),
      {{"infrastructure_damage", "repair_costs"}, {"ecotourism", "value_gain"}},
      {intermediate("loop_a"), intermediate("loop_b")},
      {{"loop_a", "loop_b"},
       {"loop_b", "loop_a"},
       {"urban_vegetation", "repair_costs"},
       {"invasive_species_introduction", "medical_costs"}});
  auto expected = validate_cascade(base).violations;
  REQUIRE(expected.size() >= 5);

  std::vector<Node> nodes;
  for (const auto &[id, n] : base.nodes())
    nodes.push_back(n);
  std::vector<Edge> edges(base.edges().begin(), base.edges().end());
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::shuffle(nodes.begin(), nodes.end(), rng);
    std::shuffle(edges.begin(), edges.end(), rng);
    CascadeGraph g;
    for (const auto &n : nodes)
      g.add_node(n);
    for (const auto &e : edges)
      g.add_edge(e.first, e.second);
    CHECK(validate_cascade(g).violations == expected);
  }
}

TEST_CASE("valid graphs end every valuation path in a value change") {
  auto g = beijing_cascade();
  REQUIRE(validate_cascade(g).ok());
  for (const auto &[id, n] : g.nodes()) {
    if (n.kind != NodeKind::Service && n.kind != NodeKind::NegativeEffect)
      continue;
    bool reaches = false;
    for (const auto &[from, to] : g.edges())
      if (from == id && g.find(to)->kind == NodeKind::ValueChange)
        reaches = true;
    CHECK_MESSAGE(reaches, id);
  }
}

TEST_CASE("double counting") {
  auto model = test::beijing_model();
  CHECK(check_double_counting(model.cascade, model).ok());

  ingest::ValuationModel empty;
  CHECK(check_double_counting(model.cascade, empty).ok());

  auto mutated = ingest::parse_model_manifest(
      test::read_file(test::fixture_path("intermediate_valued.json")));
  auto r = check_double_counting(mutated.cascade, mutated);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].code == codes::double_count);
  CHECK(r.violations[0].nodes[0] == "air_quality_decrease");
  CHECK(validate_cascade(mutated.cascade).ok());

  ingest::ValuationModel dangling = model;
  dangling.items[0].node = "nowhere";
  CHECK_THROWS_AS(check_double_counting(model.cascade, dangling),
                  StructuralError);
}

TEST_CASE("each cascade fixture triggers exactly its own code") {
  const std::vector<std::pair<std::string, std::string_view>> fixtures = {
      {"cascade_a_final_without_effect.json", codes::final_without_effect},
      {"cascade_b_intermediate_direct_effect.json",
       codes::intermediate_direct_effect},
      {"cascade_c_intermediate_dead_end.json", codes::intermediate_dead_end},
      {"cascade_d_illegal_edge.json", codes::illegal_edge},
      {"cascade_e_cycle.json", codes::cycle},
      {"cascade_f_no_value_change.json", codes::no_value_change},
  };
  for (const auto &[file, code] : fixtures) {
    CAPTURE(file);
    auto g =
        ingest::parse_model_manifest(test::read_file(test::fixture_path(file)))
            .cascade;
    auto r = validate_cascade(g);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].code == code);
  }
}
