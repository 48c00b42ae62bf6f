#include <catch_amalgamated.hpp>

#include "ralloc/json_io.hpp"
#include "ralloc/model.hpp"

using namespace ralloc;
using Catch::Matchers::ContainsSubstring;

namespace {

Instance two_resource_matching() {
  Instance inst;
  inst.mode = Mode::matching;
  inst.resources = {{1, 4, 1.0, NonReusable{}}, {2, 9, 2.0, Exponential{1.0}}};
  inst.arrivals = {{0, 0.0, MatchingEdges{{1, 2}}}, {1, 1.0, MatchingEdges{{2, 1}}}};
  return inst;
}

}  // namespace

TEST_CASE("well formed instance validates clean") {
  CHECK(validate(two_resource_matching()).empty());
}

TEST_CASE("decreasing times are reported with their index") {
  auto inst = two_resource_matching();
  inst.arrivals[0].time = 2.0;
  inst.arrivals[1].time = 1.0;
  auto v = validate(inst);
  REQUIRE(v.size() == 1);
  CHECK(v[0] == "times not nondecreasing at index 1");
}

TEST_CASE("dangling resource reference") {
  auto inst = two_resource_matching();
  inst.arrivals[0].demand = MatchingEdges{{7}};
  auto v = validate(inst);
  REQUIRE(v.size() == 1);
  CHECK(v[0] == "unknown resource 7 at arrival 0");
}

TEST_CASE("validate collects every violation") {
  auto inst = two_resource_matching();
  inst.resources[1].id = 1;  // duplicate
  inst.resources[0].capacity = 0;
  inst.resources[0].reward = -1;
  inst.arrivals[1].demand = BudgetedBids{{{1, 2}}};  // wrong mode
  auto v = validate(inst);
  CHECK(v.size() >= 4);
  CHECK(validate(inst) == v);  // idempotent
}

TEST_CASE("negative bids and bad choice model references") {
  Instance inst;
  inst.mode = Mode::budgeted;
  inst.resources = {{1, 10, 1.0, NonReusable{}}};
  inst.arrivals = {{0, 0.0, BudgetedBids{{{1, -1}}}}};
  auto v = validate(inst);
  REQUIRE_FALSE(v.empty());
  CHECK_THAT(v[0], ContainsSubstring("negative bid"));

  Instance a;
  a.mode = Mode::assortment;
  a.resources = {{1, 10, 1.0, NonReusable{}}};
  a.arrivals = {{0, 0.0, AssortmentRequest{3, {{1, 1}}, AllSubsets{}}}};
  CHECK_FALSE(validate(a).empty());
  a.choice_models = {Mnl{1.0, {{1, 1.0}}}, Mnl{}, Mnl{}, Mnl{1.0, {{1, 2.0}}}};
  CHECK(validate(a).empty());
}

TEST_CASE("explicit feasible lists must be downward closed") {
  Instance a;
  a.mode = Mode::assortment;
  a.resources = {{1, 1, 1.0, NonReusable{}}, {2, 1, 1.0, NonReusable{}}};
  a.choice_models = {Mnl{1.0, {{1, 1.0}, {2, 1.0}}}};
  a.arrivals = {{0, 0.0, AssortmentRequest{0, {{1, 1}, {2, 1}}, ExplicitList{{{1, 2}}}}}};
  auto v = validate(a);
  REQUIRE(v.size() == 1);
  CHECK(v[0] == "feasible set list not downward closed at arrival 0");
  a.arrivals[0].demand = AssortmentRequest{0, {{1, 1}, {2, 1}}, ExplicitList{{{1}, {2}, {1, 2}}}};
  CHECK(validate(a).empty());
}

TEST_CASE("gamma") {
  auto inst = two_resource_matching();
  CHECK(gamma(inst) == 4.0);

  Instance b;
  b.mode = Mode::budgeted;
  b.resources = {{1, 10, 1.0, NonReusable{}}};
  b.arrivals = {{0, 0.0, BudgetedBids{{{1, 2}}}}, {1, 1.0, BudgetedBids{{{1, 5}}}}};
  CHECK(gamma(b) == 2.0);

  Instance s;
  s.resources = {{1, 100, 1.0, NonReusable{}}};
  s.arrivals = {{0, 0.0, MatchingEdges{{1}}}, {1, 0.0, MatchingEdges{{1}}}};
  CHECK(gamma(s) == 100.0);
  CHECK(gamma(s) <= min_capacity(s));

  Instance none;
  none.mode = Mode::budgeted;
  none.resources = {{1, 3, 1.0, NonReusable{}}};
  none.arrivals = {{0, 0.0, BudgetedBids{{{1, 0}}}}};
  CHECK_THROWS_AS(gamma(none), NoEdges);
}

TEST_CASE("indexed instance sorts edges and drops zero bids") {
  Instance b;
  b.mode = Mode::budgeted;
  b.resources = {{5, 10, 1.0, NonReusable{}}, {2, 10, 1.0, NonReusable{}}};
  b.arrivals = {{0, 0.0, BudgetedBids{{{5, 3}, {2, 0}}}}, {1, 0.0, BudgetedBids{{{5, 1}, {2, 2}}}}};
  IndexedInstance p(b);
  REQUIRE(p.edges(0).size() == 1);
  CHECK(p.edges(0)[0].bid == 3);
  REQUIRE(p.edges(1).size() == 2);
  CHECK(p.resource(p.edges(1)[0].resource).id == 2);
  CHECK(p.bid(1, 0) == 1);
  CHECK(p.bid(0, 1) == 0);

  b.arrivals[0].time = 5.0;
  CHECK_THROWS_AS(IndexedInstance(b), InvalidArgument);
}

TEST_CASE("is_feasible") {
  CHECK(is_feasible(AllSubsets{}, {1, 2, 3}));
  CHECK(is_feasible(MaxCardinality{2}, {1, 2}));
  CHECK_FALSE(is_feasible(MaxCardinality{2}, {1, 2, 3}));
  CHECK(is_feasible(ExplicitList{{{1}, {1, 3}}}, {3, 1}));
  CHECK_FALSE(is_feasible(ExplicitList{{{1}, {1, 3}}}, {3}));
  CHECK(is_feasible(ExplicitList{{}}, {}));
}

TEST_CASE("json round trip keeps every field and the validate output") {
  Instance a;
  a.mode = Mode::assortment;
  a.resources = {{1, 3, 0.1, MixtureWithInf{0.9, WeibullIfr{1.3, 2.5}}},
                 {2, 2, 1.0 / 3.0, TwoPointInf{1.0 / 7.0, 0.5}},
                 {3, 1, 2.0, Uniform{0.25, 1e-3 + 1.0}}};
  ChoiceTable tab;
  tab.items = {1, 2, 3};
  tab.phi[0b011] = {0.4, 0.3, 0.0};
  tab.phi[0b001] = {0.7, 0.0, 0.0};
  a.choice_models = {Mnl{0.01, {{1, 100.0}, {2, 1.0}, {3, 0.123456789012345678}}}, tab};
  a.arrivals = {{0, 0.0, AssortmentRequest{0, {{1, 1}, {2, 2}}, AllSubsets{}}},
                {1, 0.1 + 0.2, AssortmentRequest{1, {{1, 1}, {3, 1}}, MaxCardinality{1}}},
                {2, 1e-300 + 5.5, AssortmentRequest{0, {{2, 1}}, ExplicitList{{{2}}}}}};
  auto text = dump_instance(a);
  Instance back = parse_instance(text);
  CHECK(back == a);
  CHECK(validate(back) == validate(a));
  CHECK(dump_instance(back) == text);

  auto m = two_resource_matching();
  m.arrivals[0].time = 0.1;
  CHECK(validate(m) == validate(parse_instance(dump_instance(m))));
  CHECK(parse_instance(dump_instance(m)) == m);
}

TEST_CASE("json parse errors") {
  CHECK_THROWS_AS(parse_instance("{"), ParseError);
  CHECK_THROWS_AS(parse_instance(R"({"mode":"matching","resources":[],"arrivals":[{"time":0}]})"), ParseError);
  CHECK_THROWS_AS(parse_instance(R"({"mode":"weird","resources":[],"arrivals":[]})"), ParseError);
  CHECK_THROWS_AS(usage_from_json(Json::parse(R"({"type":"exponential","rate":-1})")), ParseError);
  auto tab = choice_model_from_json(Json::parse(R"({"type":"table","n":3,"phi":{"{1,2}":{"1":0.4,"2":0.3}}})"));
  CHECK(choice_prob(tab, {1, 2}, 1) == 0.4);
  CHECK(choice_prob(tab, {2, 1}, 2) == 0.3);
  CHECK(choice_prob(tab, {3}, 3) == 0.0);
}
