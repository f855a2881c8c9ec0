#include "fql/instance_io.hpp"

#include <sstream>

namespace fql {

using nlohmann::json;

json instance_to_json(const Instance& I) {
  json nodes = json::object();
  for (const auto& [n, rows] : I.nodes) nodes[n] = rows;
  json edges = json::object();
  for (const auto& [e, fn] : I.edges) {
    json table = json::object();
    for (const auto& [x, y] : fn) table[x] = y;
    edges[e] = table;
  }
  json attrs = json::object();
  for (const auto& [a, fn] : I.attrs) {
    json table = json::object();
    for (const auto& [x, v] : fn) {
      if (const auto* s = std::get_if<std::string>(&v)) {
        table[x] = *s;
      } else if (const auto* n = std::get_if<std::uint64_t>(&v)) {
        table[x] = *n;
      } else {
        table[x] = std::get<std::int64_t>(v);
      }
    }
    attrs[a] = table;
  }
  return json{{"node", nodes}, {"edge", edges}, {"attr", attrs}};
}

namespace {

Value value_from_json(const json& v, const AttrDecl& decl) {
  switch (decl.type) {
    case BaseType::String:
      if (!v.is_string()) {
        throw InstanceError("attribute '" + decl.name +
                            "' expects a string value");
      }
      return v.get<std::string>();
    case BaseType::Nat:
      if (!v.is_number_unsigned()) {
        throw InstanceError("attribute '" + decl.name +
                            "' expects a non-negative integer value");
      }
      return v.get<std::uint64_t>();
    case BaseType::Int:
      if (!v.is_number_integer()) {
        throw InstanceError("attribute '" + decl.name +
                            "' expects an integer value");
      }
      return static_cast<std::int64_t>(v.get<std::int64_t>());
  }
  throw InstanceError("unreachable");
}

}  // namespace

Instance instance_from_json(SigPtr sig, const json& j) {
  if (!j.is_object()) throw InstanceError("instance JSON must be an object");
  Instance I = empty_instance(sig);

  if (j.contains("node")) {
    for (const auto& [n, rows] : j.at("node").items()) {
      if (!sig->graph().has_node(n)) {
        throw InstanceError("instance mentions unknown node '" + n + "'");
      }
      if (!rows.is_array()) {
        throw InstanceError("node table '" + n + "' must be an array");
      }
      for (const auto& id : rows) {
        I.nodes[n].push_back(id.get<std::string>());
      }
    }
  }
  if (j.contains("edge")) {
    for (const auto& [e, fn] : j.at("edge").items()) {
      if (!sig->graph().has_edge(e)) {
        throw InstanceError("instance mentions unknown edge '" + e + "'");
      }
      for (const auto& [x, y] : fn.items()) {
        I.edges[e][x] = y.get<std::string>();
      }
    }
  }
  if (j.contains("attr")) {
    for (const auto& [a, fn] : j.at("attr").items()) {
      if (!sig->has_attribute(a)) {
        throw InstanceError("instance mentions unknown attribute '" + a + "'");
      }
      const AttrDecl& decl = sig->attribute(a);
      for (const auto& [x, v] : fn.items()) {
        I.attrs[a][x] = value_from_json(v, decl);
      }
    }
  }
  return I;
}

std::string csv_escape(const std::string& field) {
  bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

std::string instance_node_csv(const Instance& I, const std::string& node) {
  if (!I.sig->graph().has_node(node)) {
    throw InstanceError("unknown node '" + node + "'");
  }
  std::vector<std::string> out_edges;
  for (const auto& e : I.sig->edges()) {
    if (e.src == node) out_edges.push_back(e.name);
  }
  std::vector<AttrDecl> attrs = I.sig->attributes_of(node);

  std::ostringstream out;
  out << csv_escape(node);
  for (const auto& e : out_edges) out << "," << csv_escape(e);
  for (const auto& a : attrs) out << "," << csv_escape(a.name);
  out << "\n";

  auto rows = I.nodes.find(node);
  if (rows != I.nodes.end()) {
    for (const auto& x : rows->second) {
      out << csv_escape(x);
      for (const auto& e : out_edges) {
        out << "," << csv_escape(I.edges.at(e).at(x));
      }
      for (const auto& a : attrs) {
        out << "," << csv_escape(render_value(eval_attr(I, a.name, x)));
      }
      out << "\n";
    }
  }
  return out.str();
}

std::map<std::string, std::string> instance_to_csv(const Instance& I) {
  std::map<std::string, std::string> out;
  for (const auto& n : I.sig->nodes()) {
    out[n] = instance_node_csv(I, n);
  }
  return out;
}

}  // namespace fql
