#include "relmap/adjacency_graph.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "relmap/errors.hpp"
#include "relmap/rng.hpp"

namespace relmap {

AdjacencyGraph AdjacencyGraph::build(
    const std::vector<std::pair<std::string, std::string>>& edges,
    std::vector<std::string> nodes) {
  AdjacencyGraph g;
  std::sort(nodes.begin(), nodes.end());
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (nodes[i] == nodes[i - 1]) throw validation_error("duplicate node id: " + nodes[i]);
  }
  g.node_ids_ = std::move(nodes);
  g.adjacency_.resize(g.node_ids_.size());

  std::set<std::pair<int, int>> seen;
  for (const auto& [a, b] : edges) {
    const int ia = g.index_of(a);
    const int ib = g.index_of(b);
    if (ia < 0) throw validation_error("edge references unknown node id: " + a);
    if (ib < 0) throw validation_error("edge references unknown node id: " + b);
    if (ia == ib) throw validation_error("self-loop edge on node " + a);
    const auto key = std::minmax(ia, ib);
    if (!seen.insert(key).second) continue;  // symmetrize / dedupe
    g.adjacency_[ia].push_back(ib);
    g.adjacency_[ib].push_back(ia);
  }
  g.edge_count_ = static_cast<long long>(seen.size());
  for (auto& nbrs : g.adjacency_) std::sort(nbrs.begin(), nbrs.end());

  // connected components by DFS
  const int n = g.node_count();
  g.component_of_.assign(n, -1);
  int comp = 0;
  std::vector<int> stack;
  for (int s = 0; s < n; ++s) {
    if (g.component_of_[s] >= 0) continue;
    g.component_of_[s] = comp;
    stack.push_back(s);
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v : g.adjacency_[u]) {
        if (g.component_of_[v] < 0) {
          g.component_of_[v] = comp;
          stack.push_back(v);
        }
      }
    }
    ++comp;
  }
  g.component_count_ = comp;

  std::uint64_t h = fnv1a64("adjacency-graph");
  for (const auto& id : g.node_ids_) h = splitmix64(h ^ fnv1a64(id));
  for (const auto& [ia, ib] : seen) {
    h = splitmix64(h ^ (static_cast<std::uint64_t>(ia) << 32 | static_cast<std::uint64_t>(ib)));
  }
  g.hash_ = h;
  return g;
}

int AdjacencyGraph::index_of(std::string_view id) const {
  const auto it = std::lower_bound(node_ids_.begin(), node_ids_.end(), id);
  if (it == node_ids_.end() || *it != id) return -1;
  return static_cast<int>(it - node_ids_.begin());
}

std::vector<int> AdjacencyGraph::isolated_nodes() const {
  std::vector<int> out;
  for (int i = 0; i < node_count(); ++i) {
    if (adjacency_[i].empty()) out.push_back(i);
  }
  return out;
}

AdjacencyGraph read_edge_list(const std::string& path, std::vector<std::string> nodes) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open edge list: " + path);
  std::vector<std::pair<std::string, std::string>> edges;
  std::string line;
  long long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string a, b, extra;
    if (!(ss >> a)) continue;  // blank line
    if (!(ss >> b) || (ss >> extra)) {
      throw validation_error(path + ":" + std::to_string(lineno) +
                             ": expected exactly two node ids per line");
    }
    edges.emplace_back(std::move(a), std::move(b));
  }
  return AdjacencyGraph::build(edges, std::move(nodes));
}

double icar_quadratic(std::span<const double> z, const AdjacencyGraph& g) {
  if (static_cast<int>(z.size()) != g.node_count()) {
    throw validation_error("icar_quadratic: vector length does not match node count");
  }
  double q = 0.0;
  for (int i = 0; i < g.node_count(); ++i) {
    for (int j : g.neighbors(i)) {
      if (j > i) {
        const double d = z[i] - z[j];
        q += d * d;
      }
    }
  }
  return q;
}

std::pair<double, double> car_full_conditional(int i, std::span<const double> z, double tau2,
                                               const AdjacencyGraph& g) {
  if (static_cast<int>(z.size()) != g.node_count()) {
    throw validation_error("car_full_conditional: vector length does not match node count");
  }
  const int m = g.degree(i);
  if (m < 1) {
    throw validation_error("car_full_conditional undefined for isolated node " +
                           g.node_ids()[i]);
  }
  double sum = 0.0;
  for (int j : g.neighbors(i)) sum += z[j];
  return {sum / m, tau2 / m};
}

}  // namespace relmap
