#ifndef DEEPOPT_PROBLEMS_GRAPH_HPP
#define DEEPOPT_PROBLEMS_GRAPH_HPP

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "deepopt/core.hpp"

namespace deepopt {

class IoError : public Error {
 public:
  using Error::Error;
};

struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Graph {
  std::size_t vertices = 0;
  std::vector<Edge> edges;

  friend bool operator==(const Graph&, const Graph&) = default;

  void validate() const {
    for (const auto& e : edges) {
      if (e.from >= vertices || e.to >= vertices) {
        throw Error("graph: edge endpoint out of range");
      }
    }
  }
};

/// Undirected simple graph: no self-loops, no repeated pairs.
inline Graph random_simple_graph(std::size_t vertices, std::size_t edges,
                                 Rng& rng) {
  const std::size_t max_edges = vertices * (vertices - 1) / 2;
  if (vertices < 2 || edges > max_edges) {
    throw Error("random_simple_graph: too many edges for vertex count");
  }
  Graph g{vertices, {}};
  std::set<std::pair<std::size_t, std::size_t>> seen;
  while (g.edges.size() < edges) {
    std::size_t u = rng.index(vertices);
    std::size_t v = rng.index(vertices);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (!seen.insert({u, v}).second) continue;
    g.edges.push_back({u, v});
  }
  return g;
}

/// Directed edges without self-loops; repeated edges are allowed.
inline Graph random_directed_edges(std::size_t vertices, std::size_t edges,
                                   Rng& rng) {
  if (vertices < 2) throw Error("random_directed_edges: need two vertices");
  Graph g{vertices, {}};
  g.edges.reserve(edges);
  while (g.edges.size() < edges) {
    const std::size_t u = rng.index(vertices);
    const std::size_t v = rng.index(vertices);
    if (u != v) g.edges.push_back({u, v});
  }
  return g;
}

// Plain-text edge list: one "u v" pair per line, 0-indexed, '#' comments.

inline Graph read_edge_list(std::istream& in, std::size_t vertices = 0) {
  Graph g;
  std::string line;
  std::size_t line_no = 0;
  std::size_t max_vertex = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    long long u = 0;
    long long v = 0;
    if (!(fields >> u)) continue;  // blank or comment-only
    std::string rest;
    if (!(fields >> v) || u < 0 || v < 0 || (fields >> rest)) {
      throw IoError("edge list: malformed line " + std::to_string(line_no));
    }
    g.edges.push_back({static_cast<std::size_t>(u), static_cast<std::size_t>(v)});
    max_vertex = std::max({max_vertex, static_cast<std::size_t>(u),
                           static_cast<std::size_t>(v)});
  }
  g.vertices = vertices != 0 ? vertices : (g.edges.empty() ? 0 : max_vertex + 1);
  g.validate();
  return g;
}

inline Graph read_edge_list(const std::string& path, std::size_t vertices = 0) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open edge list: " + path);
  return read_edge_list(in, vertices);
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# vertices " << g.vertices << " edges " << g.edges.size() << '\n';
  for (const auto& e : g.edges) out << e.from << ' ' << e.to << '\n';
}

inline void write_edge_list(const std::string& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write edge list: " + path);
  write_edge_list(out, g);
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace deepopt

#endif  // DEEPOPT_PROBLEMS_GRAPH_HPP
