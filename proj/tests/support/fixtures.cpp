#include "support/fixtures.hpp"

namespace fql::testing {

EmployeesFixture employees() {
  Graph g;
  g.add_node("Emp");
  g.add_node("Dept");
  g.add_edge("manager", "Emp", "Emp");
  g.add_edge("worksIn", "Emp", "Dept");
  g.add_edge("secretary", "Dept", "Emp");
  std::vector<PathEquation> eqs = {
      {Path{"Emp", {"manager", "worksIn"}}, Path{"Emp", {"worksIn"}}},
      {Path{"Dept", {"secretary", "worksIn"}}, Path{"Dept", {}}},
  };
  std::vector<AttrDecl> attrs = {
      {"FName", "Emp", BaseType::String},
      {"LName", "Emp", BaseType::String},
      {"DName", "Dept", BaseType::String},
  };
  EmployeesFixture fx;
  fx.sig = make_signature(std::move(g), std::move(eqs), std::move(attrs));

  auto base = [&]() {
    Instance I = empty_instance(fx.sig);
    I.nodes["Emp"] = {"101", "102", "103"};
    I.nodes["Dept"] = {"q10", "x02"};
    I.edges["worksIn"] = {{"101", "q10"}, {"102", "q10"}, {"103", "x02"}};
    I.attrs["FName"] = {{"101", Value{std::string("Alan")}},
                        {"102", Value{std::string("Andrey")}},
                        {"103", Value{std::string("Camille")}}};
    I.attrs["LName"] = {{"101", Value{std::string("Turing")}},
                        {"102", Value{std::string("Markov")}},
                        {"103", Value{std::string("Jordan")}}};
    I.attrs["DName"] = {{"q10", Value{std::string("CS")}},
                        {"x02", Value{std::string("Math")}}};
    return I;
  };

  fx.good = base();
  fx.good.edges["manager"] = {{"101", "102"}, {"102", "102"}, {"103", "103"}};
  fx.good.edges["secretary"] = {{"q10", "101"}, {"x02", "103"}};

  fx.breaking = base();
  fx.breaking.edges["manager"] = {
      {"101", "103"}, {"102", "102"}, {"103", "103"}};
  fx.breaking.edges["secretary"] = {{"x02", "102"}, {"q10", "101"}};

  return fx;
}

SplitFixture split_merge() {
  SplitFixture fx;
  {
    Graph g;
    g.add_node("N1");
    g.add_node("N2");
    fx.C = make_signature(std::move(g), {},
                          {{"Name", "N1", BaseType::String},
                           {"Salary", "N1", BaseType::String},
                           {"Age", "N2", BaseType::Nat}});
  }
  {
    Graph g;
    g.add_node("N");
    fx.D = make_signature(std::move(g), {},
                          {{"Name", "N", BaseType::String},
                           {"Salary", "N", BaseType::String},
                           {"Age", "N", BaseType::Nat}});
  }
  fx.F.source = fx.C;
  fx.F.target = fx.D;
  fx.F.node_map = {{"N1", "N"}, {"N2", "N"}};
  fx.F.attr_map = {{"Name", "Name"}, {"Salary", "Salary"}, {"Age", "Age"}};
  require_valid(fx.F, "column-splitting morphism");

  fx.J = empty_instance(fx.D);
  fx.J.nodes["N"] = {"1", "2", "3"};
  fx.J.attrs["Name"] = {{"1", Value{std::string("Bob")}},
                        {"2", Value{std::string("Sue")}},
                        {"3", Value{std::string("Alice")}}};
  fx.J.attrs["Age"] = {{"1", Value{std::uint64_t(20)}},
                       {"2", Value{std::uint64_t(20)}},
                       {"3", Value{std::uint64_t(30)}}};
  fx.J.attrs["Salary"] = {{"1", Value{std::string("$250")}},
                          {"2", Value{std::string("$300")}},
                          {"3", Value{std::string("$100")}}};

  fx.I = empty_instance(fx.C);
  fx.I.nodes["N1"] = {"1", "2", "3"};
  fx.I.nodes["N2"] = {"a", "b", "c"};
  fx.I.attrs["Name"] = {{"1", Value{std::string("Bob")}},
                        {"2", Value{std::string("Sue")}},
                        {"3", Value{std::string("Alice")}}};
  fx.I.attrs["Salary"] = {{"1", Value{std::string("$250")}},
                          {"2", Value{std::string("$300")}},
                          {"3", Value{std::string("$100")}}};
  fx.I.attrs["Age"] = {{"a", Value{std::uint64_t(20)}},
                       {"b", Value{std::uint64_t(20)}},
                       {"c", Value{std::uint64_t(30)}}};
  return fx;
}

AbcFixture abc_union() {
  AbcFixture fx;
  {
    Graph g;
    for (const char* n : {"a1", "a2", "a3", "b1", "b2", "c1", "c2", "c3",
                          "c4"}) {
      g.add_node(n);
    }
    g.add_edge("g1", "a1", "b1");
    g.add_edge("h1", "a1", "c1");
    g.add_edge("g2", "a2", "b2");
    g.add_edge("h2", "a2", "c2");
    g.add_edge("g3", "a3", "b2");
    g.add_edge("h3", "a3", "c4");
    fx.C = make_signature(std::move(g));
  }
  {
    Graph g;
    g.add_node("A");
    g.add_node("B");
    g.add_node("C");
    g.add_edge("G", "A", "B");
    g.add_edge("H", "A", "C");
    fx.D = make_signature(std::move(g));
  }
  fx.F.source = fx.C;
  fx.F.target = fx.D;
  fx.F.node_map = {{"a1", "A"}, {"a2", "A"}, {"a3", "A"}, {"b1", "B"},
                   {"b2", "B"}, {"c1", "C"}, {"c2", "C"}, {"c3", "C"},
                   {"c4", "C"}};
  fx.F.edge_map = {{"g1", Path{"A", {"G"}}}, {"g2", Path{"A", {"G"}}},
                   {"g3", Path{"A", {"G"}}}, {"h1", Path{"A", {"H"}}},
                   {"h2", Path{"A", {"H"}}}, {"h3", Path{"A", {"H"}}}};
  require_valid(fx.F, "union-compatible collapse");

  fx.I = empty_instance(fx.C);
  fx.I.nodes["a1"] = {"11"};
  fx.I.nodes["a2"] = {"16", "15", "14"};
  fx.I.nodes["a3"] = {"13", "12"};
  fx.I.nodes["b1"] = {"7", "6"};
  fx.I.nodes["b2"] = {"10", "9", "8"};
  fx.I.nodes["c1"] = {"2", "1"};
  fx.I.nodes["c2"] = {"4", "3"};
  fx.I.nodes["c3"] = {"5"};
  fx.I.nodes["c4"] = {"18", "17"};
  fx.I.edges["g1"] = {{"11", "7"}};
  fx.I.edges["h1"] = {{"11", "1"}};
  fx.I.edges["g2"] = {{"16", "9"}, {"15", "10"}, {"14", "8"}};
  fx.I.edges["h2"] = {{"16", "3"}, {"15", "4"}, {"14", "4"}};
  fx.I.edges["g3"] = {{"13", "10"}, {"12", "9"}};
  fx.I.edges["h3"] = {{"13", "17"}, {"12", "18"}};
  return fx;
}

SigPtr point_sig() {
  Graph g;
  g.add_node("s");
  return make_signature(std::move(g));
}

SigPtr loop_sig() {
  Graph g;
  g.add_node("s");
  g.add_edge("f", "s", "s");
  return make_signature(std::move(g));
}

TypedSignatureMorphism point_to_loop() {
  TypedSignatureMorphism F;
  F.source = point_sig();
  F.target = loop_sig();
  F.node_map = {{"s", "s"}};
  require_valid(F, "point into the loop");
  return F;
}

SigPtr chain_sig(int n) {
  Graph g;
  for (int i = 0; i <= n; ++i) {
    g.add_node("v" + std::to_string(i));
  }
  for (int i = 0; i < n; ++i) {
    g.add_edge("s" + std::to_string(i), "v" + std::to_string(i),
               "v" + std::to_string(i + 1));
  }
  return make_signature(std::move(g));
}

RelationalInstance two_column_r() {
  RelationalInstance db;
  db.schema.relations = {{"R", {"col1", "col2"}}};
  db.schema.domain = BaseType::String;
  db.tables["R"] = {{Value{std::string("x")}, Value{std::string("y")}},
                    {Value{std::string("x")}, Value{std::string("z")}}};
  return db;
}

}  // namespace fql::testing
