#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fql/base.hpp"

namespace fql {

// A path in a directed labeled multigraph: a start node plus a (possibly
// empty) list of composable edge names. The empty list is the trivial path
// sitting at its start node.
struct Path {
  std::string start;
  std::vector<std::string> edges;

  bool trivial() const { return edges.empty(); }
  size_t length() const { return edges.size(); }

  bool operator==(const Path& other) const = default;
};

struct EdgeDecl {
  std::string name;
  std::string src;
  std::string dst;
};

// The underlying graph of a signature. Edge names are unique across the
// whole graph, so a path is determined by its start node and edge names.
class Graph {
 public:
  void add_node(const std::string& name);
  void add_edge(const std::string& name, const std::string& src,
                const std::string& dst);

  bool has_node(const std::string& name) const;
  bool has_edge(const std::string& name) const;
  const EdgeDecl& edge(const std::string& name) const;
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<EdgeDecl>& edges() const { return edges_; }

  // Edges listed in declaration order whose source is the given node.
  std::vector<std::string> edges_from(const std::string& node) const;

  bool valid_path(const Path& p) const;
  // Requires valid_path(p).
  std::string target_of(const Path& p) const;
  bool parallel(const Path& p, const Path& q) const;

 private:
  std::vector<std::string> nodes_;
  std::vector<EdgeDecl> edges_;
  std::map<std::string, int> node_ix_;
  std::map<std::string, int> edge_ix_;
};

// "Emp.manager.worksIn"; a trivial path prints as its start node alone.
std::string render_path(const Path& p);

// Concatenation; q must start where p ends (not checked here).
Path concat(const Path& p, const Path& q);

// Shortlex: shorter first, then lexicographic on the edge name lists.
// Total on any set of parallel paths, and compatible with concatenation on
// both sides, which is what completion needs from it.
int shortlex_compare(const Path& p, const Path& q);

// Stable map key for a path.
std::string path_key(const Path& p);

}  // namespace fql
