#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace relmap {

// Symmetric contiguity graph over region ids. Node order is canonical
// (lexicographic), so graphs built from permuted inputs are identical.
// Immutable after construction; safe to share across threads.
class AdjacencyGraph {
 public:
  static AdjacencyGraph build(const std::vector<std::pair<std::string, std::string>>& edges,
                              std::vector<std::string> nodes);

  int node_count() const { return static_cast<int>(node_ids_.size()); }
  long long edge_count() const { return edge_count_; }
  const std::vector<std::string>& node_ids() const { return node_ids_; }

  // index in canonical order, or -1 if the id is unknown
  int index_of(std::string_view id) const;

  const std::vector<int>& neighbors(int i) const { return adjacency_[i]; }
  int degree(int i) const { return static_cast<int>(adjacency_[i].size()); }

  int component_count() const { return component_count_; }
  const std::vector<int>& component_of() const { return component_of_; }

  // rank of the intrinsic CAR precision: node_count - component_count
  int icar_rank() const { return node_count() - component_count_; }

  std::vector<int> isolated_nodes() const;

  // content hash over node ids and edges, for run manifests
  std::uint64_t hash() const { return hash_; }

 private:
  std::vector<std::string> node_ids_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<int> component_of_;
  int component_count_ = 0;
  long long edge_count_ = 0;
  std::uint64_t hash_ = 0;
};

// Edge-list text file: one `id1<TAB>id2` pair per line, `#` comments.
AdjacencyGraph read_edge_list(const std::string& path, std::vector<std::string> nodes);

// Pairwise-difference quadratic form sum over edges of (z_i - z_j)^2,
// i.e. z' (D - W) z for the intrinsic CAR precision structure.
double icar_quadratic(std::span<const double> z, const AdjacencyGraph& g);

// Full conditional of one spatial effect: mean = neighbor average,
// variance = tau2 / degree. Requires degree >= 1.
std::pair<double, double> car_full_conditional(int i, std::span<const double> z, double tau2,
                                               const AdjacencyGraph& g);

}  // namespace relmap
