#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fql/query.hpp"

namespace fql {

// Expression tree over named tables. Deliberately tiny: selection on column
// equality, projection (optionally deduplicating — still a projection),
// product, n-ary union-all, and key generation, which appends one fresh-ID
// column. Nothing else exists, so anything compiled to this IR is certified
// to use only those operations.
struct SqlExpr;
using SqlExprPtr = std::shared_ptr<const SqlExpr>;

struct SqlExpr {
  enum class Kind { Base, Select, Project, Product, UnionAll, KeyGen };
  Kind kind = Kind::Base;
  std::string table;             // Base
  std::vector<SqlExprPtr> args;  // 1 for Select/Project/KeyGen, 2 for
                                 // Product, n for UnionAll
  int eq_left = 0, eq_right = 0;  // Select: kept rows have equal values here
  std::vector<int> cols;          // Project
  bool distinct = false;          // Project
  size_t arity_hint = 0;          // UnionAll of zero arms
};

SqlExprPtr sql_base(std::string table);
SqlExprPtr sql_select(SqlExprPtr e, int i, int j);
SqlExprPtr sql_project(SqlExprPtr e, std::vector<int> cols,
                       bool distinct = false);
SqlExprPtr sql_product(SqlExprPtr a, SqlExprPtr b);
SqlExprPtr sql_union(std::vector<SqlExprPtr> args, size_t arity_hint);
SqlExprPtr sql_keygen(SqlExprPtr e);

struct SqlStmt {
  std::string table;
  SqlExprPtr expr;
  std::string note;  // one-line comment carried into render and plan dumps
};

struct SqlScript {
  std::map<std::string, size_t> inputs;  // required tables and their arities
  std::vector<SqlStmt> stmts;
};

// Table naming for instance encodings: nodes, edges and attributes live in
// separate namespaces so a node and an edge may share a name.
std::string node_table(const std::string& prefix, const std::string& node);
std::string edge_table(const std::string& prefix, const std::string& edge);
std::string attr_table(const std::string& prefix, const std::string& attr);

struct Table {
  size_t arity = 0;
  std::vector<std::vector<std::string>> rows;
};
using RelDatabase = std::map<std::string, Table>;

// One row, no columns; always provided by exec. Products against it are
// how statements over empty diagrams start.
inline constexpr const char* kUnitTable = "__unit__";

// Everything binary: node tables pair each ID with itself, edge tables map
// source ID to target ID, attribute tables map ID to rendered value.
RelDatabase encode_instance(const Instance& I, const std::string& prefix);

// Reads the binary tables back; attribute cells are parsed at the declared
// base type. Shape problems throw InstanceError.
Instance decode_instance(const RelDatabase& db, SigPtr sig,
                         const std::string& prefix);

// Interprets a script. Fresh keys are "sk0", "sk1", ... in generation
// order (a namespace instance encodings never use). Missing or ill-typed
// inputs, out-of-range columns, mixed-arity unions, and redefinitions all
// throw. The result contains the inputs plus every created table.
RelDatabase exec(const SqlScript& script, const RelDatabase& inputs);

// Deterministic SQL text, one statement per line. A key-generating
// statement renders as a create referencing the __counter__ helper exactly
// once, followed by a separate counter-advance line.
std::string render(const SqlScript& script);

// Machine-readable plan: inputs, statements, per-statement operator
// breakdown, full expression trees.
std::string plan_json(const SqlScript& script);

struct OpCounts {
  size_t base = 0, select = 0, project = 0, product = 0, union_all = 0,
         keygen = 0;
};
OpCounts count_ops(const SqlScript& script);

// Script generators. Each reads an instance encoding at in_prefix and
// writes one at out_prefix; intermediates get their own derived prefixes.
// The scripts compute exactly what the in-memory operations compute, up to
// the choice of fresh IDs.
SqlScript sql_delta(const TypedSignatureMorphism& F,
                    const std::string& in_prefix,
                    const std::string& out_prefix);
SqlScript sql_sigma(const TypedSignatureMorphism& F,
                    const std::string& in_prefix,
                    const std::string& out_prefix, int fuel = kDefaultFuel);
SqlScript sql_pi(const TypedSignatureMorphism& F, const std::string& in_prefix,
                 const std::string& out_prefix, int fuel = kDefaultFuel,
                 PiReadiness readiness = PiReadiness::Strict,
                 const CatBudget& budget = {});
SqlScript sql_query(const Query& q, const std::string& in_prefix,
                    const std::string& out_prefix,
                    const EvalOptions& opts = {});
SqlScript sql_relationalize(SigPtr sig, const std::string& in_prefix,
                            const std::string& out_prefix,
                            int fuel = kDefaultFuel);

}  // namespace fql
