#include "fql/relenc.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <set>

#include "fql/instance_io.hpp"

namespace fql {

namespace {

void check_schema(const RelationalSchema& R) {
  std::set<std::string> rels;
  for (const auto& [rel, cols] : R.relations) {
    if (rel == "D") {
      throw SignatureError("relation name 'D' is reserved for the domain node");
    }
    if (!rels.insert(rel).second) {
      throw SignatureError("duplicate relation '" + rel + "'");
    }
    if (cols.empty()) {
      throw SignatureError("relation '" + rel + "' needs at least one column");
    }
    std::set<std::string> cs;
    for (const auto& c : cols) {
      if (!cs.insert(c).second) {
        throw SignatureError("relation '" + rel + "' repeats column '" + c +
                             "'");
      }
    }
  }
}

Value parse_typed_cell(const std::string& s, BaseType t, int line) {
  auto fail = [&] {
    throw ParseError("cell '" + s + "' is not a valid " + to_string(t), line,
                     1);
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

}  // namespace

SigPtr encode_schema(const RelationalSchema& R) {
  check_schema(R);
  Graph g;
  for (const auto& [rel, cols] : R.relations) g.add_node(rel);
  g.add_node("D");
  for (const auto& [rel, cols] : R.relations) {
    for (const auto& c : cols) g.add_edge(rel + "__" + c, rel, "D");
  }
  return make_signature(std::move(g), {}, {{"A", "D", R.domain}});
}

Instance encode_rel_instance(const RelationalInstance& db) {
  SigPtr sig = encode_schema(db.schema);
  Instance I = empty_instance(sig);

  std::set<std::string> known;
  for (const auto& [rel, cols] : db.schema.relations) known.insert(rel);
  for (const auto& [rel, rows] : db.tables) {
    if (!known.count(rel)) {
      throw InstanceError("table '" + rel + "' is not in the schema");
    }
  }

  std::map<std::string, Id> dom_id;  // rendered value -> D row
  auto dom_of = [&](const Value& v) -> Id {
    if (type_of(v) != db.schema.domain) {
      throw InstanceError("value '" + render_value(v) +
                          "' is not of the declared domain type");
    }
    std::string k = render_value(v);
    auto it = dom_id.find(k);
    if (it != dom_id.end()) return it->second;
    Id id = "D." + std::to_string(dom_id.size());
    dom_id.emplace(k, id);
    I.nodes["D"].push_back(id);
    I.attrs["A"][id] = v;
    return id;
  };

  for (const auto& [rel, cols] : db.schema.relations) {
    auto it = db.tables.find(rel);
    if (it == db.tables.end()) continue;
    for (size_t i = 0; i < it->second.size(); ++i) {
      const auto& row = it->second[i];
      if (row.size() != cols.size()) {
        throw InstanceError("tuple " + std::to_string(i) + " of '" + rel +
                            "' has " + std::to_string(row.size()) +
                            " fields, expected " +
                            std::to_string(cols.size()));
      }
      Id rid = rel + "." + std::to_string(i);
      I.nodes[rel].push_back(rid);
      for (size_t j = 0; j < cols.size(); ++j) {
        I.edges[rel + "__" + cols[j]][rid] = dom_of(row[j]);
      }
    }
  }
  return I;
}

RelationalInstance decode_rel_instance(const Instance& I) {
  const TypedSignature& sig = *I.sig;
  if (sig.attributes().size() != 1) {
    throw NotPointedError("a pointed signature carries exactly one attribute, "
                          "this one has " +
                          std::to_string(sig.attributes().size()));
  }
  const AttrDecl& A = sig.attributes()[0];
  const std::string& D = A.node;
  if (!sig.equations().empty()) {
    throw NotPointedError("a pointed signature has no equations");
  }
  for (const auto& e : sig.edges()) {
    if (e.dst != D) {
      throw NotPointedError("edge '" + e.name +
                            "' does not point into the domain node '" + D +
                            "'");
    }
    if (e.src == D) {
      throw NotPointedError("the domain node '" + D + "' has outgoing edges");
    }
  }

  RelationalInstance db;
  db.schema.domain = A.type;
  for (const auto& n : sig.nodes()) {
    if (n == D) continue;
    std::vector<std::string> cols;
    std::vector<std::string> col_edges;
    for (const auto& e : sig.edges()) {
      if (e.src != n) continue;
      std::string col = e.name;
      const std::string prefix = n + "__";
      if (col.rfind(prefix, 0) == 0) col = col.substr(prefix.size());
      cols.push_back(col);
      col_edges.push_back(e.name);
    }
    db.schema.relations.emplace_back(n, cols);

    std::vector<std::vector<Value>> rows;
    for (const Id& x : I.nodes.at(n)) {
      std::vector<Value> row;
      for (const auto& en : col_edges) {
        auto ity = I.edges.at(en).find(x);
        if (ity == I.edges.at(en).end()) {
          throw InstanceError("edge '" + en + "' has no value at row '" + x +
                              "'");
        }
        auto itv = I.attrs.at(A.name).find(ity->second);
        if (itv == I.attrs.at(A.name).end()) {
          throw InstanceError("domain row '" + ity->second +
                              "' carries no attribute value");
        }
        row.push_back(itv->second);
      }
      rows.push_back(std::move(row));
    }
    db.tables[n] = std::move(rows);
  }
  return db;
}

SpcSetup translate_spc(const RelationalSchema& schema, const SpcQuery& q,
                       const EvalOptions& opts) {
  SigPtr sig_db = encode_schema(schema);

  std::map<std::string, const std::vector<std::string>*> rel_cols;
  for (const auto& [rel, cols] : schema.relations) rel_cols[rel] = &cols;

  struct FlatCol {
    std::string entry_node;  // S node of its FROM entry
    std::string edge;        // S edge name
    std::string rel, col;    // where it came from
  };
  std::vector<FlatCol> flat;
  size_t n = q.from.size();
  for (size_t i = 0; i < n; ++i) {
    auto it = rel_cols.find(q.from[i]);
    if (it == rel_cols.end()) {
      throw QueryError("FROM entry " + std::to_string(i + 1) +
                       " names unknown relation '" + q.from[i] + "'");
    }
    std::string node = "t" + std::to_string(i + 1);
    for (const auto& c : *it->second) {
      flat.push_back({node, node + "__" + c, q.from[i], c});
    }
  }
  int total = static_cast<int>(flat.size());
  auto check_col = [&](int f, const char* where) {
    if (f < 0 || f >= total) {
      throw QueryError(std::string(where) + " column " + std::to_string(f) +
                       " is out of range (have " + std::to_string(total) +
                       ")");
    }
  };
  for (const auto& [a, b] : q.where) {
    check_col(a, "WHERE");
    check_col(b, "WHERE");
  }
  for (int p : q.select) check_col(p, "SELECT");

  // Equivalence classes of columns generated by W, ordered by smallest
  // member.
  std::vector<int> parent(total);
  for (int i = 0; i < total; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [a, b] : q.where) parent[find(a)] = find(b);
  std::map<int, int> class_ix;
  for (int f = 0; f < total; ++f) {
    class_ix.emplace(find(f), static_cast<int>(class_ix.size()));
  }
  auto cls = [&](int f) { return class_ix.at(find(f)); };
  int r = static_cast<int>(class_ix.size());
  size_t s_out = q.select.size();

  SpcSetup out;

  Graph gs;
  for (size_t i = 0; i < n; ++i) gs.add_node("t" + std::to_string(i + 1));
  gs.add_node("D");
  for (const auto& fc : flat) gs.add_edge(fc.edge, fc.entry_node, "D");
  out.S = make_signature(std::move(gs), {}, {{"A", "D", schema.domain}});

  Graph gt;
  gt.add_node("B");
  gt.add_node("D");
  for (int i = 0; i < r; ++i) {
    gt.add_edge("c" + std::to_string(i), "B", "D");
  }
  out.T = make_signature(std::move(gt), {}, {{"A", "D", schema.domain}});

  Graph gu;
  gu.add_node("B");
  gu.add_node("D");
  for (size_t i = 0; i < s_out; ++i) {
    gu.add_edge("p" + std::to_string(i + 1), "B", "D");
  }
  out.U = make_signature(std::move(gu), {}, {{"A", "D", schema.domain}});

  out.F = TypedSignatureMorphism{out.S, out.T, {}, {}, {{"A", "A"}}};
  out.F.node_map["D"] = "D";
  for (size_t i = 0; i < n; ++i) {
    out.F.node_map["t" + std::to_string(i + 1)] = "B";
  }
  for (int f = 0; f < total; ++f) {
    out.F.edge_map[flat[f].edge] =
        Path{"B", {"c" + std::to_string(cls(f))}};
  }
  require_valid(out.F, "SPC column collapse");

  out.G = TypedSignatureMorphism{
      out.U, out.T, {{"B", "B"}, {"D", "D"}}, {}, {{"A", "A"}}};
  for (size_t i = 0; i < s_out; ++i) {
    out.G.edge_map["p" + std::to_string(i + 1)] =
        Path{"B", {"c" + std::to_string(cls(q.select[i]))}};
  }
  require_valid(out.G, "SPC output projection");

  out.entries = TypedSignatureMorphism{out.S, sig_db, {}, {}, {{"A", "A"}}};
  out.entries.node_map["D"] = "D";
  for (size_t i = 0; i < n; ++i) {
    out.entries.node_map["t" + std::to_string(i + 1)] = q.from[i];
  }
  for (const auto& fc : flat) {
    out.entries.edge_map[fc.edge] =
        Path{fc.rel, {fc.rel + "__" + fc.col}};
  }
  require_valid(out.entries, "FROM entry expansion");

  out.query = compose_queries(lift_delta(out.G), lift_pi(out.F), opts);
  out.relationalize_after = q.set_semantics;
  return out;
}

namespace {

std::vector<std::vector<Value>> arm_tuples(const Instance& result) {
  RelationalInstance dec = decode_rel_instance(result);
  return dec.tables.at("B");
}

Instance eval_arm(const RelationalInstance& db, const SpcQuery& q,
                  KeyGen& keys, const EvalOptions& opts, SpcSetup* setup_out) {
  SpcSetup setup = translate_spc(db.schema, q, opts);
  Instance enc = encode_rel_instance(db);
  Instance on_entries = delta(setup.entries, enc, keys);
  Instance res = eval(setup.query, on_entries, keys, opts);
  if (setup_out) *setup_out = std::move(setup);
  return res;
}

}  // namespace

std::vector<std::vector<Value>> eval_spc(const RelationalInstance& db,
                                         const SpcQuery& q, KeyGen& keys,
                                         const EvalOptions& opts) {
  SpcSetup setup;
  Instance res = eval_arm(db, q, keys, opts, &setup);
  if (setup.relationalize_after) res = relationalize(res, opts.fuel);
  return arm_tuples(res);
}

std::vector<std::vector<Value>> eval_spcu(const RelationalInstance& db,
                                          const SpcuQuery& q, KeyGen& keys,
                                          const EvalOptions& opts) {
  if (q.arms.empty()) {
    throw ArityMismatchError("a union needs at least one arm");
  }
  size_t s = q.arms[0].select.size();
  for (const auto& arm : q.arms) {
    if (arm.select.size() != s) {
      throw ArityMismatchError("union arms produce " + std::to_string(s) +
                               " and " + std::to_string(arm.select.size()) +
                               " columns");
    }
  }

  Instance acc;
  bool first = true;
  for (const SpcQuery& arm0 : q.arms) {
    SpcQuery arm = arm0;
    arm.set_semantics = false;  // the union decides the semantics
    Instance res = eval_arm(db, arm, keys, opts, nullptr);
    if (first) {
      acc = std::move(res);
      first = false;
    } else {
      acc = coproduct_instance(acc, rehome(res, acc.sig), keys, opts.fuel);
    }
  }
  if (q.set_semantics) acc = relationalize(acc, opts.fuel);
  return arm_tuples(acc);
}

bool bag_equal(std::vector<std::vector<Value>> a,
               std::vector<std::vector<Value>> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

std::string rel_table_csv(const std::vector<std::string>& columns,
                          const std::vector<std::vector<Value>>& rows) {
  std::string out;
  for (size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(columns[i]);
  }
  out += '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(render_value(row[i]));
    }
    out += '\n';
  }
  return out;
}

std::pair<std::vector<std::string>, std::vector<std::vector<Value>>>
rel_table_from_csv(const std::string& text, BaseType domain) {
  // Records of comma-separated fields; a field may be double-quoted, with
  // "" standing for one quote. Accepts \r\n line ends.
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> rec;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  int line = 1;
  auto end_field = [&] {
    rec.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    records.push_back(std::move(rec));
    rec.clear();
  };
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && field.empty()) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      if (!field.empty() || field_started || !rec.empty()) {
        end_field();
        end_record();
      }
      ++line;
    } else if (c == '\r') {
      // dropped; the \n that follows ends the record
    } else {
      field += c;
      field_started = true;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field", line, 1);
  if (!field.empty() || field_started || !rec.empty()) {
    end_field();
    end_record();
  }
  if (records.empty()) throw ParseError("no header row", 1, 1);

  std::vector<std::string> columns = records[0];
  std::vector<std::vector<Value>> rows;
  for (size_t rix = 1; rix < records.size(); ++rix) {
    if (records[rix].size() != columns.size()) {
      throw ParseError("row has " + std::to_string(records[rix].size()) +
                           " fields, header has " +
                           std::to_string(columns.size()),
                       static_cast<int>(rix + 1), 1);
    }
    std::vector<Value> row;
    for (const auto& cell : records[rix]) {
      row.push_back(parse_typed_cell(cell, domain, static_cast<int>(rix + 1)));
    }
    rows.push_back(std::move(row));
  }
  return {std::move(columns), std::move(rows)};
}

}  // namespace fql
