#include "fql/sqlgen.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <optional>
#include <set>
#include <utility>

#include <nlohmann/json.hpp>

namespace fql {

namespace {

FiniteCategory sat_or_throw(SigPtr sig, int fuel, const std::string& role) {
  auto cat = saturate(sig, fuel);
  if (!cat) {
    throw FinitenessUnknownError("could not enumerate all morphisms of the " +
                                 role + " within fuel; result unknown");
  }
  return std::move(*cat);
}

std::string kind_name(SqlExpr::Kind k) {
  switch (k) {
    case SqlExpr::Kind::Base:
      return "base";
    case SqlExpr::Kind::Select:
      return "select";
    case SqlExpr::Kind::Project:
      return "project";
    case SqlExpr::Kind::Product:
      return "product";
    case SqlExpr::Kind::UnionAll:
      return "union_all";
    case SqlExpr::Kind::KeyGen:
      return "keygen";
  }
  return "?";
}

// Arity of an expression against the tables known so far, validating column
// references along the way.
size_t arity_of(const SqlExpr& e, const std::map<std::string, size_t>& env) {
  switch (e.kind) {
    case SqlExpr::Kind::Base: {
      auto it = env.find(e.table);
      if (it == env.end()) {
        throw UnknownTableError("no table named '" + e.table + "'");
      }
      return it->second;
    }
    case SqlExpr::Kind::Select: {
      size_t a = arity_of(*e.args[0], env);
      if (e.eq_left < 0 || e.eq_right < 0 ||
          static_cast<size_t>(e.eq_left) >= a ||
          static_cast<size_t>(e.eq_right) >= a) {
        throw ArityMismatchError("selection compares columns " +
                                 std::to_string(e.eq_left) + " and " +
                                 std::to_string(e.eq_right) +
                                 " of a width-" + std::to_string(a) +
                                 " expression");
      }
      return a;
    }
    case SqlExpr::Kind::Project: {
      size_t a = arity_of(*e.args[0], env);
      for (int c : e.cols) {
        if (c < 0 || static_cast<size_t>(c) >= a) {
          throw ArityMismatchError("projection keeps column " +
                                   std::to_string(c) + " of a width-" +
                                   std::to_string(a) + " expression");
        }
      }
      return e.cols.size();
    }
    case SqlExpr::Kind::Product:
      return arity_of(*e.args[0], env) + arity_of(*e.args[1], env);
    case SqlExpr::Kind::UnionAll: {
      if (e.args.empty()) return e.arity_hint;
      size_t a = arity_of(*e.args[0], env);
      for (size_t i = 1; i < e.args.size(); ++i) {
        size_t b = arity_of(*e.args[i], env);
        if (b != a) {
          throw ArityMismatchError("union of width-" + std::to_string(a) +
                                   " and width-" + std::to_string(b) +
                                   " expressions");
        }
      }
      return a;
    }
    case SqlExpr::Kind::KeyGen:
      return arity_of(*e.args[0], env) + 1;
  }
  throw FqlError("unreachable expression kind");
}

// Walks the statements in order, checking shapes and returning the arity of
// every table the script touches (inputs, the unit table, every created
// table).
std::map<std::string, size_t> script_arities(const SqlScript& script) {
  std::map<std::string, size_t> env = script.inputs;
  env[kUnitTable] = 0;
  for (const SqlStmt& st : script.stmts) {
    if (!st.expr) throw FqlError("statement without an expression");
    size_t a = arity_of(*st.expr, env);
    if (env.count(st.table)) {
      throw FqlError("table '" + st.table + "' defined twice");
    }
    env[st.table] = a;
  }
  return env;
}

void count_expr(const SqlExpr& e, OpCounts& out) {
  switch (e.kind) {
    case SqlExpr::Kind::Base:
      out.base++;
      break;
    case SqlExpr::Kind::Select:
      out.select++;
      break;
    case SqlExpr::Kind::Project:
      out.project++;
      break;
    case SqlExpr::Kind::Product:
      out.product++;
      break;
    case SqlExpr::Kind::UnionAll:
      out.union_all++;
      break;
    case SqlExpr::Kind::KeyGen:
      out.keygen++;
      break;
  }
  for (const auto& a : e.args) count_expr(*a, out);
}

nlohmann::json expr_json(const SqlExpr& e) {
  nlohmann::json j;
  j["op"] = kind_name(e.kind);
  switch (e.kind) {
    case SqlExpr::Kind::Base:
      j["table"] = e.table;
      break;
    case SqlExpr::Kind::Select:
      j["left"] = e.eq_left;
      j["right"] = e.eq_right;
      j["of"] = expr_json(*e.args[0]);
      break;
    case SqlExpr::Kind::Project:
      j["cols"] = e.cols;
      j["distinct"] = e.distinct;
      j["of"] = expr_json(*e.args[0]);
      break;
    case SqlExpr::Kind::Product:
      j["left"] = expr_json(*e.args[0]);
      j["right"] = expr_json(*e.args[1]);
      break;
    case SqlExpr::Kind::UnionAll: {
      auto arms = nlohmann::json::array();
      for (const auto& a : e.args) arms.push_back(expr_json(*a));
      j["arms"] = std::move(arms);
      if (e.args.empty()) j["arity"] = e.arity_hint;
      break;
    }
    case SqlExpr::Kind::KeyGen:
      j["of"] = expr_json(*e.args[0]);
      break;
  }
  return j;
}

Value parse_typed(const std::string& s, BaseType t, const std::string& where) {
  auto fail = [&] {
    throw InstanceError("cell '" + s + "' in " + where + " is not a valid " +
                        to_string(t));
  };
  switch (t) {
    case BaseType::String:
      return Value{s};
    case BaseType::Nat: {
      std::uint64_t v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size() || s.empty()) fail();
      return Value{v};
    }
    case BaseType::Int: {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size() || s.empty()) fail();
      return Value{v};
    }
  }
  throw FqlError("unreachable base type");
}

const Table& table_at(const RelDatabase& db, const std::string& name,
                      size_t arity, const std::string& where) {
  auto it = db.find(name);
  if (it == db.end()) {
    throw UnknownTableError("no table named '" + name + "' for " + where);
  }
  if (it->second.arity != arity) {
    throw ArityMismatchError("table '" + name + "' has width " +
                             std::to_string(it->second.arity) +
                             ", expected " + std::to_string(arity) + " for " +
                             where);
  }
  return it->second;
}

// Binary table computing x |-> p(x) on the rows of p's start node: the node
// table when p is trivial, otherwise the relational composition of its edge
// tables, folded two columns at a time.
SqlExprPtr path_expr(const std::string& prefix, const Path& p) {
  if (p.trivial()) return sql_base(node_table(prefix, p.start));
  SqlExprPtr acc = sql_base(edge_table(prefix, p.edges.front()));
  for (size_t i = 1; i < p.edges.size(); ++i) {
    acc = sql_project(
        sql_select(sql_product(acc, sql_base(edge_table(prefix, p.edges[i]))),
                   1, 2),
        {0, 3});
  }
  return acc;
}

void declare_inputs(SqlScript& s, const TypedSignature& sig,
                    const std::string& prefix) {
  for (const auto& n : sig.nodes()) s.inputs[node_table(prefix, n)] = 2;
  for (const auto& e : sig.edges()) s.inputs[edge_table(prefix, e.name)] = 2;
  for (const auto& a : sig.attributes()) s.inputs[attr_table(prefix, a.name)] = 2;
}

std::vector<int> iota_cols(size_t n) {
  std::vector<int> out(n);
  for (size_t i = 0; i < n; ++i) out[i] = static_cast<int>(i);
  return out;
}

}  // namespace

SqlExprPtr sql_base(std::string table) {
  auto e = std::make_shared<SqlExpr>();
  e->kind = SqlExpr::Kind::Base;
  e->table = std::move(table);
  return e;
}

SqlExprPtr sql_select(SqlExprPtr a, int i, int j) {
  auto e = std::make_shared<SqlExpr>();
  e->kind = SqlExpr::Kind::Select;
  e->args = {std::move(a)};
  e->eq_left = i;
  e->eq_right = j;
  return e;
}

SqlExprPtr sql_project(SqlExprPtr a, std::vector<int> cols, bool distinct) {
  auto e = std::make_shared<SqlExpr>();
  e->kind = SqlExpr::Kind::Project;
  e->args = {std::move(a)};
  e->cols = std::move(cols);
  e->distinct = distinct;
  return e;
}

SqlExprPtr sql_product(SqlExprPtr a, SqlExprPtr b) {
  auto e = std::make_shared<SqlExpr>();
  e->kind = SqlExpr::Kind::Product;
  e->args = {std::move(a), std::move(b)};
  return e;
}

SqlExprPtr sql_union(std::vector<SqlExprPtr> args, size_t arity_hint) {
  auto e = std::make_shared<SqlExpr>();
  e->kind = SqlExpr::Kind::UnionAll;
  e->args = std::move(args);
  e->arity_hint = arity_hint;
  return e;
}

SqlExprPtr sql_keygen(SqlExprPtr a) {
  auto e = std::make_shared<SqlExpr>();
  e->kind = SqlExpr::Kind::KeyGen;
  e->args = {std::move(a)};
  return e;
}

std::string node_table(const std::string& prefix, const std::string& node) {
  return prefix + "n__" + node;
}

std::string edge_table(const std::string& prefix, const std::string& edge) {
  return prefix + "e__" + edge;
}

std::string attr_table(const std::string& prefix, const std::string& attr) {
  return prefix + "a__" + attr;
}

RelDatabase encode_instance(const Instance& I, const std::string& prefix) {
  RelDatabase db;
  for (const auto& n : I.sig->nodes()) {
    Table t;
    t.arity = 2;
    for (const Id& x : I.nodes.at(n)) t.rows.push_back({x, x});
    db[node_table(prefix, n)] = std::move(t);
  }
  for (const auto& e : I.sig->edges()) {
    Table t;
    t.arity = 2;
    for (const auto& [x, y] : I.edges.at(e.name)) t.rows.push_back({x, y});
    db[edge_table(prefix, e.name)] = std::move(t);
  }
  for (const auto& a : I.sig->attributes()) {
    Table t;
    t.arity = 2;
    for (const auto& [x, v] : I.attrs.at(a.name)) {
      t.rows.push_back({x, render_value(v)});
    }
    db[attr_table(prefix, a.name)] = std::move(t);
  }
  return db;
}

Instance decode_instance(const RelDatabase& db, SigPtr sig,
                         const std::string& prefix) {
  Instance I = empty_instance(sig);
  for (const auto& n : sig->nodes()) {
    const Table& t = table_at(db, node_table(prefix, n), 2, "node '" + n + "'");
    for (const auto& r : t.rows) {
      if (r[0] != r[1]) {
        throw InstanceError("node table row ('" + r[0] + "', '" + r[1] +
                            "') does not pair an ID with itself");
      }
      I.nodes[n].push_back(r[0]);
    }
  }
  for (const auto& e : sig->edges()) {
    const Table& t =
        table_at(db, edge_table(prefix, e.name), 2, "edge '" + e.name + "'");
    for (const auto& r : t.rows) I.edges[e.name][r[0]] = r[1];
  }
  for (const auto& a : sig->attributes()) {
    const Table& t =
        table_at(db, attr_table(prefix, a.name), 2, "attribute '" + a.name + "'");
    for (const auto& r : t.rows) {
      I.attrs[a.name][r[0]] =
          parse_typed(r[1], a.type, "attribute '" + a.name + "'");
    }
  }
  return I;
}

RelDatabase exec(const SqlScript& script, const RelDatabase& inputs) {
  RelDatabase db = inputs;
  db[kUnitTable] = Table{0, {{}}};
  for (const auto& [name, arity] : script.inputs) {
    table_at(db, name, arity, "a declared input");
  }

  std::uint64_t next_key = 0;

  // Recursive interpreter; shapes were not pre-validated here, so every
  // case re-checks what it uses.
  std::function<Table(const SqlExpr&)> ev = [&](const SqlExpr& e) -> Table {
    switch (e.kind) {
      case SqlExpr::Kind::Base: {
        auto it = db.find(e.table);
        if (it == db.end()) {
          throw UnknownTableError("no table named '" + e.table + "'");
        }
        return it->second;
      }
      case SqlExpr::Kind::Select: {
        Table t = ev(*e.args[0]);
        if (e.eq_left < 0 || e.eq_right < 0 ||
            static_cast<size_t>(e.eq_left) >= t.arity ||
            static_cast<size_t>(e.eq_right) >= t.arity) {
          throw ArityMismatchError("selection column out of range");
        }
        Table out;
        out.arity = t.arity;
        for (auto& r : t.rows) {
          if (r[e.eq_left] == r[e.eq_right]) out.rows.push_back(std::move(r));
        }
        return out;
      }
      case SqlExpr::Kind::Project: {
        Table t = ev(*e.args[0]);
        for (int c : e.cols) {
          if (c < 0 || static_cast<size_t>(c) >= t.arity) {
            throw ArityMismatchError("projection column out of range");
          }
        }
        Table out;
        out.arity = e.cols.size();
        std::set<std::vector<std::string>> seen;
        for (const auto& r : t.rows) {
          std::vector<std::string> row;
          row.reserve(e.cols.size());
          for (int c : e.cols) row.push_back(r[c]);
          if (e.distinct && !seen.insert(row).second) continue;
          out.rows.push_back(std::move(row));
        }
        return out;
      }
      case SqlExpr::Kind::Product: {
        Table a = ev(*e.args[0]);
        Table b = ev(*e.args[1]);
        Table out;
        out.arity = a.arity + b.arity;
        for (const auto& ra : a.rows) {
          for (const auto& rb : b.rows) {
            std::vector<std::string> row = ra;
            row.insert(row.end(), rb.begin(), rb.end());
            out.rows.push_back(std::move(row));
          }
        }
        return out;
      }
      case SqlExpr::Kind::UnionAll: {
        Table out;
        bool first = true;
        for (const auto& arg : e.args) {
          Table t = ev(*arg);
          if (first) {
            out.arity = t.arity;
            first = false;
          } else if (t.arity != out.arity) {
            throw ArityMismatchError("union of tables of different widths");
          }
          for (auto& r : t.rows) out.rows.push_back(std::move(r));
        }
        if (first) out.arity = e.arity_hint;
        return out;
      }
      case SqlExpr::Kind::KeyGen: {
        Table t = ev(*e.args[0]);
        Table out;
        out.arity = t.arity + 1;
        for (auto& r : t.rows) {
          r.push_back("sk" + std::to_string(next_key++));
          out.rows.push_back(std::move(r));
        }
        return out;
      }
    }
    throw FqlError("unreachable expression kind");
  };

  for (const SqlStmt& st : script.stmts) {
    if (!st.expr) throw FqlError("statement without an expression");
    if (db.count(st.table)) {
      throw FqlError("table '" + st.table + "' defined twice");
    }
    db[st.table] = ev(*st.expr);
  }
  return db;
}

namespace {

std::string col(int i) { return "c" + std::to_string(i); }

// Renders an expression as a SELECT whose output columns are c0..c{n-1}.
// A zero-column projection gets a placeholder column, since SQL has no
// empty select list; the interpreter in exec is the semantics, the text is
// for reading and for feeding to an actual database.
std::string sel(const SqlExpr& e, const std::map<std::string, size_t>& env) {
  switch (e.kind) {
    case SqlExpr::Kind::Base: {
      size_t a = env.at(e.table);
      if (a == 0) return "SELECT * FROM " + e.table;
      std::string cols;
      for (size_t i = 0; i < a; ++i) {
        if (i) cols += ", ";
        cols += col(static_cast<int>(i));
      }
      return "SELECT " + cols + " FROM " + e.table;
    }
    case SqlExpr::Kind::Select: {
      size_t a = arity_of(*e.args[0], env);
      std::string cols;
      for (size_t i = 0; i < a; ++i) {
        if (i) cols += ", ";
        cols += "t." + col(static_cast<int>(i)) + " AS " +
                col(static_cast<int>(i));
      }
      return "SELECT " + cols + " FROM (" + sel(*e.args[0], env) +
             ") t WHERE t." + col(e.eq_left) + " = t." + col(e.eq_right);
    }
    case SqlExpr::Kind::Project: {
      std::string head = e.distinct ? "SELECT DISTINCT " : "SELECT ";
      if (e.cols.empty()) {
        return head + "0 AS c_unit FROM (" + sel(*e.args[0], env) + ") t";
      }
      std::string cols;
      for (size_t i = 0; i < e.cols.size(); ++i) {
        if (i) cols += ", ";
        cols += "t." + col(e.cols[i]) + " AS " + col(static_cast<int>(i));
      }
      return head + cols + " FROM (" + sel(*e.args[0], env) + ") t";
    }
    case SqlExpr::Kind::Product: {
      size_t la = arity_of(*e.args[0], env);
      size_t ra = arity_of(*e.args[1], env);
      std::string cols;
      for (size_t i = 0; i < la; ++i) {
        if (i) cols += ", ";
        cols += "a." + col(static_cast<int>(i)) + " AS " +
                col(static_cast<int>(i));
      }
      for (size_t i = 0; i < ra; ++i) {
        if (la + i) cols += ", ";
        cols += "b." + col(static_cast<int>(i)) + " AS " +
                col(static_cast<int>(la + i));
      }
      return "SELECT " + cols + " FROM (" + sel(*e.args[0], env) + ") a, (" +
             sel(*e.args[1], env) + ") b";
    }
    case SqlExpr::Kind::UnionAll: {
      if (e.args.empty()) {
        std::string cols;
        for (size_t i = 0; i < e.arity_hint; ++i) {
          if (i) cols += ", ";
          cols += "NULL AS " + col(static_cast<int>(i));
        }
        if (cols.empty()) cols = "*";
        return "SELECT " + cols + " FROM " + std::string(kUnitTable) +
               " WHERE 1 = 0";
      }
      std::string out;
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += " UNION ALL ";
        out += sel(*e.args[i], env);
      }
      return out;
    }
    case SqlExpr::Kind::KeyGen:
      throw FqlError(
          "key generation must be the whole right-hand side of a statement");
  }
  throw FqlError("unreachable expression kind");
}

}  // namespace

std::string render(const SqlScript& script) {
  std::map<std::string, size_t> env = script.inputs;
  env[kUnitTable] = 0;

  std::string out;
  for (const auto& [name, arity] : script.inputs) {
    out += "-- input " + name + " width " + std::to_string(arity) + "\n";
  }

  bool any_keygen = false;
  for (const SqlStmt& st : script.stmts) {
    OpCounts c;
    count_expr(*st.expr, c);
    if (c.keygen) any_keygen = true;
  }
  if (any_keygen) {
    out += "CREATE TABLE __counter__ AS SELECT 0 AS n;\n";
  }

  for (const SqlStmt& st : script.stmts) {
    if (!st.note.empty()) out += "-- " + st.note + "\n";
    size_t a = arity_of(*st.expr, env);
    if (env.count(st.table)) {
      throw FqlError("table '" + st.table + "' defined twice");
    }
    if (st.expr->kind == SqlExpr::Kind::KeyGen) {
      size_t inner = a - 1;
      std::string cols;
      for (size_t i = 0; i < inner; ++i) {
        cols += "t." + col(static_cast<int>(i)) + " AS " +
                col(static_cast<int>(i)) + ", ";
      }
      out += "CREATE TABLE " + st.table + " AS SELECT " + cols +
             "(SELECT n FROM __counter__) + ROW_NUMBER() OVER () AS " +
             col(static_cast<int>(inner)) + " FROM (" +
             sel(*st.expr->args[0], env) + ") t;\n";
      out += "UPDATE __counter__ SET n = n + (SELECT COUNT(*) FROM " +
             st.table + ");\n";
    } else {
      out += "CREATE TABLE " + st.table + " AS " + sel(*st.expr, env) + ";\n";
    }
    env[st.table] = a;
  }
  return out;
}

std::string plan_json(const SqlScript& script) {
  std::map<std::string, size_t> env = script_arities(script);
  nlohmann::json j;
  j["inputs"] = script.inputs;
  auto stmts = nlohmann::json::array();
  for (const SqlStmt& st : script.stmts) {
    nlohmann::json s;
    s["table"] = st.table;
    s["width"] = env.at(st.table);
    if (!st.note.empty()) s["note"] = st.note;
    OpCounts c;
    count_expr(*st.expr, c);
    s["ops"] = {{"base", c.base},         {"select", c.select},
                {"project", c.project},   {"product", c.product},
                {"union_all", c.union_all}, {"keygen", c.keygen}};
    s["expr"] = expr_json(*st.expr);
    stmts.push_back(std::move(s));
  }
  j["statements"] = std::move(stmts);
  return j.dump(2);
}

OpCounts count_ops(const SqlScript& script) {
  OpCounts out;
  for (const SqlStmt& st : script.stmts) {
    if (st.expr) count_expr(*st.expr, out);
  }
  return out;
}

SqlScript sql_delta(const TypedSignatureMorphism& F,
                    const std::string& in_prefix,
                    const std::string& out_prefix) {
  require_valid(F, "pullback script");
  const TypedSignature& S = *F.source;
  SqlScript s;
  declare_inputs(s, *F.target, in_prefix);

  // One fresh-ID map per source node: two source nodes sharing an image
  // must not share row IDs, so every pulled row is renamed first.
  auto map_table = [&](const std::string& a) {
    return out_prefix + "map__" + a;
  };
  for (const auto& a : S.nodes()) {
    const std::string& c = F.node_map.at(a);
    s.stmts.push_back({map_table(a),
                       sql_keygen(sql_project(
                           sql_base(node_table(in_prefix, c)), {0})),
                       "fresh IDs for the rows pulled onto '" + a + "'"});
    s.stmts.push_back({node_table(out_prefix, a),
                       sql_project(sql_base(map_table(a)), {1, 1}),
                       "rows of '" + a + "' = rows of '" + c + "', renamed"});
  }
  for (const auto& e : S.edges()) {
    const Path& p = F.edge_map.at(e.name);
    // (x, p x), then both endpoints through their rename maps.
    SqlExprPtr acc = path_expr(in_prefix, p);
    acc = sql_project(
        sql_select(sql_product(acc, sql_base(map_table(e.src))), 0, 2),
        {3, 1});
    acc = sql_project(
        sql_select(sql_product(acc, sql_base(map_table(e.dst))), 1, 2),
        {0, 3});
    s.stmts.push_back({edge_table(out_prefix, e.name), acc,
                       "'" + e.name + "' follows the image path " +
                           render_path(p)});
  }
  for (const auto& A : S.attributes()) {
    const std::string& B = F.attr_map.at(A.name);
    SqlExprPtr acc = sql_project(
        sql_select(
            sql_product(sql_base(attr_table(in_prefix, B)),
                        sql_base(map_table(A.node))),
            0, 2),
        {3, 1});
    s.stmts.push_back({attr_table(out_prefix, A.name), acc,
                       "'" + A.name + "' reads the image attribute '" + B +
                           "'"});
  }
  return s;
}

SqlScript sql_sigma(const TypedSignatureMorphism& F,
                    const std::string& in_prefix,
                    const std::string& out_prefix, int fuel) {
  require_valid(F, "pushforward script");
  MorphismProfile prof = profile(F, fuel);
  if (!prof.is_dop) {
    throw NotOpFibrationError(
        "pushforward needs unique edge liftings along the functor");
  }
  if (!prof.is_sigma_ready) {
    throw NotSigmaReadyError(
        "pushforward needs node-wise bijective attribute transport along "
        "the functor");
  }
  const TypedSignature& S = *F.source;
  const TypedSignature& T = *F.target;
  FiniteCategory A = sat_or_throw(F.source, fuel, "pushforward source");

  SqlScript s;
  declare_inputs(s, S, in_prefix);

  auto preimages = [&](const std::string& d) {
    std::vector<std::string> out;
    for (const auto& a : S.nodes()) {
      if (F.node_map.at(a) == d) out.push_back(a);
    }
    return out;
  };

  for (const auto& d : T.nodes()) {
    std::vector<SqlExprPtr> arms;
    std::string who;
    for (const auto& c : preimages(d)) {
      arms.push_back(sql_base(node_table(in_prefix, c)));
      who += who.empty() ? "'" + c + "'" : ", '" + c + "'";
    }
    s.stmts.push_back({node_table(out_prefix, d),
                       sql_union(std::move(arms), 2),
                       "rows of '" + d + "' = union over " +
                           (who.empty() ? std::string("no preimages") : who)});
  }
  for (const auto& eps : T.edges()) {
    std::vector<SqlExprPtr> arms;
    for (const auto& c : preimages(eps.src)) {
      // The one morphism out of c presenting eps; its representative path
      // is what the rows actually follow.
      const RewriteSystem& rw = F.target->rewrite();
      std::optional<Path> lift;
      for (int m : A.from(c)) {
        if (F.node_map.at(A.tgt_of(m)) != eps.dst) continue;
        if (equivalent(apply(F, A.rep(m)), Path{eps.src, {eps.name}}, rw)) {
          lift = A.rep(m);
          break;
        }
      }
      if (!lift) {
        throw MorphismError("no lifting of edge '" + eps.name + "' at node '" +
                            c + "' despite the lifting check passing");
      }
      arms.push_back(path_expr(in_prefix, *lift));
    }
    s.stmts.push_back({edge_table(out_prefix, eps.name),
                       sql_union(std::move(arms), 2),
                       "'" + eps.name + "' follows the unique lifting at "
                       "each preimage"});
  }
  for (const auto& B : T.attributes()) {
    std::vector<SqlExprPtr> arms;
    for (const auto& c : preimages(B.node)) {
      for (const auto& A2 : S.attributes_of(c)) {
        if (F.attr_map.at(A2.name) == B.name) {
          arms.push_back(sql_base(attr_table(in_prefix, A2.name)));
        }
      }
    }
    s.stmts.push_back({attr_table(out_prefix, B.name),
                       sql_union(std::move(arms), 2),
                       "'" + B.name + "' = union of its preimage attributes"});
  }
  return s;
}

static SqlScript sql_pi_impl(const TypedSignatureMorphism& F,
                             const std::string& in_prefix,
                             const std::string& out_prefix, int fuel,
                             PiReadiness readiness, const CatBudget& budget) {
  require_valid(F, "limit script");
  MorphismProfile prof = profile(F, fuel, readiness);
  if (!prof.is_pi_ready) {
    throw NotPiReadyError(
        "pointwise right adjoint needs attribute sets lining up along the "
        "functor");
  }
  const TypedSignature& S = *F.source;
  const TypedSignature& T = *F.target;
  FiniteCategory C = sat_or_throw(F.target, fuel, "target signature");

  SqlScript s;
  declare_inputs(s, S, in_prefix);

  struct NodeplanEntry {
    CommaResult cm;
    std::vector<std::string> columns;      // comma node names in order
    std::vector<std::string> column_node;  // underlying source node
    std::map<std::string, int> col_of;     // right node + sep + C-index
    size_t width = 0;
  };
  auto pair_key = [](const std::string& b, int m) {
    return b + '\x1f' + std::to_string(m);
  };
  std::map<std::string, NodeplanEntry> plan;

  auto keyed_table = [&](const std::string& d) {
    return out_prefix + "key__" + d;
  };

  for (const auto& d : T.nodes()) {
    NodeplanEntry nd{comma_from_object(d, F, fuel, budget), {}, {}, {}, 0};
    for (const auto& cn : nd.cm.sig->nodes()) {
      const CommaResult::Obj& obj = nd.cm.objects.at(cn);
      int g = C.morphism_of(nd.cm.target_cat->rep(obj.gamma));
      nd.col_of[pair_key(obj.right, g)] = static_cast<int>(nd.columns.size());
      nd.columns.push_back(cn);
      nd.column_node.push_back(obj.right);
    }
    nd.width = nd.columns.size();
    size_t m = nd.width;

    // Stage 0: every way of picking one row per diagram node.
    std::string prev = out_prefix + "lim__" + d + "__0";
    SqlExprPtr x0;
    if (m == 0) {
      x0 = sql_base(kUnitTable);
    } else {
      SqlExprPtr prod = sql_base(kUnitTable);
      for (size_t i = 0; i < m; ++i) {
        prod = sql_product(
            prod, sql_base(node_table(in_prefix, nd.column_node[i])));
      }
      std::vector<int> odds;
      for (size_t i = 0; i < m; ++i) odds.push_back(static_cast<int>(2 * i + 1));
      x0 = sql_project(prod, odds);
    }
    std::string cols_note;
    for (size_t i = 0; i < m; ++i) {
      cols_note += (i ? ", " : "") + std::to_string(i) + ":'" +
                   nd.column_node[i] + "'";
    }
    s.stmts.push_back({prev, x0,
                       "candidates for '" + d + "': one column per diagram "
                       "node (" + (m ? cols_note : std::string("none")) + ")"});

    // One filtering pass per diagram edge: the chosen row at the edge's
    // source must map to the chosen row at its target.
    int step = 1;
    for (const auto& eta : nd.cm.sig->edges()) {
      const Path& p = nd.cm.to_right.edge_map.at(eta.name);
      int jsrc = 0, jdst = 0;
      for (size_t i = 0; i < m; ++i) {
        if (nd.columns[i] == eta.src) jsrc = static_cast<int>(i);
        if (nd.columns[i] == eta.dst) jdst = static_cast<int>(i);
      }
      SqlExprPtr e = sql_project(
          sql_select(
              sql_select(sql_product(sql_base(prev), path_expr(in_prefix, p)),
                         jsrc, static_cast<int>(m)),
              jdst, static_cast<int>(m) + 1),
          iota_cols(m));
      std::string name =
          out_prefix + "lim__" + d + "__" + std::to_string(step++);
      s.stmts.push_back({name, e,
                         "keep choices where column " + std::to_string(jsrc) +
                             " maps onto column " + std::to_string(jdst) +
                             " along " + render_path(p)});
      prev = name;
    }

    s.stmts.push_back({keyed_table(d), sql_keygen(sql_base(prev)),
                       "one fresh row ID per surviving choice for '" + d +
                           "'"});
    s.stmts.push_back({node_table(out_prefix, d),
                       sql_project(sql_base(keyed_table(d)),
                                   {static_cast<int>(m), static_cast<int>(m)}),
                       "rows of '" + d + "'"});
    plan.emplace(d, std::move(nd));
  }

  for (const auto& eps : T.edges()) {
    const NodeplanEntry& src = plan.at(eps.src);
    const NodeplanEntry& dst = plan.at(eps.dst);
    int eps_m = C.morphism_of(Path{eps.src, {eps.name}});
    size_t ms = src.width, md = dst.width;

    // Each destination column is a source column read through eps: the
    // factoring recorded here is what the join below equates.
    std::vector<int> read_from(md);
    std::string factoring;
    for (size_t j = 0; j < md; ++j) {
      const CommaResult::Obj& obj = dst.cm.objects.at(dst.columns[j]);
      int g = C.morphism_of(dst.cm.target_cat->rep(obj.gamma));
      int comp = C.compose(eps_m, g);
      read_from[j] = src.col_of.at(pair_key(obj.right, comp));
      factoring += (j ? ", " : "") + std::to_string(j) + "<-" +
                   std::to_string(read_from[j]);
    }

    SqlExprPtr e =
        sql_product(sql_base(keyed_table(eps.src)), sql_base(keyed_table(eps.dst)));
    for (size_t j = 0; j < md; ++j) {
      e = sql_select(e, read_from[j], static_cast<int>(ms + 1 + j));
    }
    e = sql_project(e, {static_cast<int>(ms), static_cast<int>(ms + 1 + md)});
    s.stmts.push_back({edge_table(out_prefix, eps.name), e,
                       "'" + eps.name + "' joins the keyed choices on "
                       "factoring columns " +
                           (md ? factoring : std::string("(none)"))});
  }

  for (const auto& Ad : T.attributes()) {
    const NodeplanEntry& nd = plan.at(Ad.node);
    // First source attribute landing on this one, in declaration order.
    const AttrDecl* src_attr = nullptr;
    for (const auto& A2 : S.attributes()) {
      if (F.attr_map.at(A2.name) == Ad.name) {
        src_attr = &A2;
        break;
      }
    }
    if (!src_attr) {
      throw NotPiReadyError("no source attribute lands on '" + Ad.name + "'");
    }
    int colix = nd.col_of.at(pair_key(src_attr->node, C.identity(Ad.node)));
    size_t m = nd.width;
    SqlExprPtr e = sql_project(
        sql_select(sql_product(sql_base(keyed_table(Ad.node)),
                               sql_base(attr_table(in_prefix, src_attr->name))),
                   colix, static_cast<int>(m + 1)),
        {static_cast<int>(m), static_cast<int>(m + 2)});
    s.stmts.push_back({attr_table(out_prefix, Ad.name), e,
                       "'" + Ad.name + "' reads column " +
                           std::to_string(colix) + " through '" +
                           src_attr->name + "'"});
  }
  return s;
}

// Mirrors the in-memory limit: refuse when the indexing category is not
// provably finite, since the generated joins would not terminate the story.
SqlScript sql_pi(const TypedSignatureMorphism& F, const std::string& in_prefix,
                 const std::string& out_prefix, int fuel,
                 PiReadiness readiness, const CatBudget& budget) {
  try {
    return sql_pi_impl(F, in_prefix, out_prefix, fuel, readiness, budget);
  } catch (const InfiniteTargetError&) {
    throw;
  } catch (const FinitenessUnknownError& e) {
    throw InfiniteTargetError(std::string("refusing the pointwise limit: ") +
                              e.what());
  }
}

SqlScript sql_query(const Query& q, const std::string& in_prefix,
                    const std::string& out_prefix, const EvalOptions& opts) {
  require_valid(q, "query to compile", opts.fuel, opts.readiness);
  std::string p1 = out_prefix + "pull__";
  std::string p2 = out_prefix + "lim__";
  SqlScript s1 = sql_delta(q.delta_leg, in_prefix, p1);
  SqlScript s2 =
      sql_pi(q.pi_leg, p1, p2, opts.fuel, opts.readiness, opts.budget);
  SqlScript s3 = sql_sigma(q.sigma_leg, p2, out_prefix, opts.fuel);

  SqlScript s;
  s.inputs = s1.inputs;
  auto take = [&](SqlScript& part) {
    for (auto& st : part.stmts) s.stmts.push_back(std::move(st));
  };
  take(s1);
  take(s2);
  take(s3);
  return s;
}

SqlScript sql_relationalize(SigPtr sig, const std::string& in_prefix,
                            const std::string& out_prefix, int fuel) {
  FiniteCategory C = sat_or_throw(sig, fuel, "signature to quotient");

  SqlScript s;
  declare_inputs(s, *sig, in_prefix);

  auto obs_table = [&](const std::string& c) { return out_prefix + "obs__" + c; };
  auto cls_table = [&](const std::string& c) { return out_prefix + "cls__" + c; };
  auto map_table = [&](const std::string& c) { return out_prefix + "map__" + c; };

  // Width of the observation table per node: ID column plus one column per
  // (morphism out, attribute at its target) pair, in a fixed order.
  std::map<std::string, size_t> obs_width;

  for (const auto& c : sig->nodes()) {
    SqlExprPtr obs =
        sql_project(sql_base(node_table(in_prefix, c)), {0});
    size_t k = 1;
    for (int m : C.from(c)) {
      for (const auto& th : sig->attributes_of(C.tgt_of(m))) {
        SqlExprPtr step = sql_select(
            sql_product(obs, path_expr(in_prefix, C.rep(m))), 0,
            static_cast<int>(k));
        step = sql_select(
            sql_product(step, sql_base(attr_table(in_prefix, th.name))),
            static_cast<int>(k + 1), static_cast<int>(k + 2));
        std::vector<int> keep = iota_cols(k);
        keep.push_back(static_cast<int>(k + 3));
        obs = sql_project(step, keep);
        ++k;
      }
    }
    obs_width[c] = k;
    s.stmts.push_back({obs_table(c), obs,
                       "each row of '" + c + "' with every attribute value "
                       "it can reach"});

    // Classes = distinct observation vectors, each given a fresh ID; a node
    // with nothing observable collapses to at most one class.
    std::vector<int> vals;
    for (size_t j = 1; j < k; ++j) vals.push_back(static_cast<int>(j));
    s.stmts.push_back({cls_table(c),
                       sql_keygen(sql_project(sql_base(obs_table(c)), vals,
                                              /*distinct=*/true)),
                       "distinct observation vectors at '" + c + "'"});

    SqlExprPtr match =
        sql_product(sql_base(obs_table(c)), sql_base(cls_table(c)));
    for (size_t j = 1; j < k; ++j) {
      match = sql_select(match, static_cast<int>(j),
                         static_cast<int>(k + (j - 1)));
    }
    s.stmts.push_back({map_table(c),
                       sql_project(match, {0, static_cast<int>(2 * k - 1)}),
                       "row ID of '" + c + "' to its class ID"});
    s.stmts.push_back({node_table(out_prefix, c),
                       sql_project(sql_base(map_table(c)), {1, 1},
                                   /*distinct=*/true),
                       "rows of '" + c + "' = the classes"});
  }

  for (const auto& e : sig->edges()) {
    SqlExprPtr t =
        sql_select(sql_product(sql_base(map_table(e.src)),
                               sql_base(edge_table(in_prefix, e.name))),
                   0, 2);
    t = sql_select(sql_product(t, sql_base(map_table(e.dst))), 3, 4);
    s.stmts.push_back({edge_table(out_prefix, e.name),
                       sql_project(t, {1, 5}, /*distinct=*/true),
                       "'" + e.name + "' between classes"});
  }

  for (const auto& th : sig->attributes()) {
    const std::string& c = th.node;
    size_t k = obs_width.at(c);
    // Column of this attribute at the identity morphism, in the same order
    // the observation table was built in.
    int jth = -1;
    int j = 0;
    for (int m : C.from(c)) {
      for (const auto& th2 : sig->attributes_of(C.tgt_of(m))) {
        if (C.is_identity(m) && th2.name == th.name) jth = j;
        ++j;
      }
    }
    if (jth < 0) {
      throw InstanceError("attribute '" + th.name +
                          "' missing from its own observation row");
    }
    s.stmts.push_back({attr_table(out_prefix, th.name),
                       sql_project(sql_base(cls_table(c)),
                                   {static_cast<int>(k - 1), jth}),
                       "'" + th.name + "' read off the class vector"});
  }
  return s;
}

}  // namespace fql
