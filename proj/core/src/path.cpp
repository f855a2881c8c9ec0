#include "fql/path.hpp"

#include <sstream>

namespace fql {

void Graph::add_node(const std::string& name) {
  if (name.empty()) throw SignatureError("node name may not be empty");
  if (has_node(name)) throw SignatureError("duplicate node '" + name + "'");
  node_ix_[name] = static_cast<int>(nodes_.size());
  nodes_.push_back(name);
}

void Graph::add_edge(const std::string& name, const std::string& src,
                     const std::string& dst) {
  if (name.empty()) throw SignatureError("edge name may not be empty");
  if (has_edge(name)) throw SignatureError("duplicate edge '" + name + "'");
  if (!has_node(src)) {
    throw SignatureError("edge '" + name + "' has unknown source '" + src +
                         "'");
  }
  if (!has_node(dst)) {
    throw SignatureError("edge '" + name + "' has unknown target '" + dst +
                         "'");
  }
  edge_ix_[name] = static_cast<int>(edges_.size());
  edges_.push_back({name, src, dst});
}

bool Graph::has_node(const std::string& name) const {
  return node_ix_.count(name) > 0;
}

bool Graph::has_edge(const std::string& name) const {
  return edge_ix_.count(name) > 0;
}

const EdgeDecl& Graph::edge(const std::string& name) const {
  auto it = edge_ix_.find(name);
  if (it == edge_ix_.end()) {
    throw SignatureError("unknown edge '" + name + "'");
  }
  return edges_[it->second];
}

std::vector<std::string> Graph::edges_from(const std::string& node) const {
  std::vector<std::string> out;
  for (const auto& e : edges_) {
    if (e.src == node) out.push_back(e.name);
  }
  return out;
}

bool Graph::valid_path(const Path& p) const {
  if (!has_node(p.start)) return false;
  std::string at = p.start;
  for (const auto& name : p.edges) {
    if (!has_edge(name)) return false;
    const EdgeDecl& e = edge(name);
    if (e.src != at) return false;
    at = e.dst;
  }
  return true;
}

std::string Graph::target_of(const Path& p) const {
  std::string at = p.start;
  for (const auto& name : p.edges) {
    at = edge(name).dst;
  }
  return at;
}

bool Graph::parallel(const Path& p, const Path& q) const {
  return p.start == q.start && target_of(p) == target_of(q);
}

std::string render_path(const Path& p) {
  std::ostringstream out;
  out << p.start;
  for (const auto& e : p.edges) out << "." << e;
  return out.str();
}

Path concat(const Path& p, const Path& q) {
  Path out = p;
  out.edges.insert(out.edges.end(), q.edges.begin(), q.edges.end());
  return out;
}

int shortlex_compare(const Path& p, const Path& q) {
  if (p.edges.size() != q.edges.size()) {
    return p.edges.size() < q.edges.size() ? -1 : 1;
  }
  if (p.edges < q.edges) return -1;
  if (q.edges < p.edges) return 1;
  return 0;
}

std::string path_key(const Path& p) {
  std::string out = p.start;
  for (const auto& e : p.edges) {
    out += ".";
    out += e;
  }
  return out;
}

}  // namespace fql
