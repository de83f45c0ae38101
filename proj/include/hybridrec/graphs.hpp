#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "hybridrec/corpus.hpp"

namespace hybridrec {

using VertexIndex = std::uint32_t;

/// Undirected weighted user graph over a corpus' user universe. Vertex i is
/// corpus.users()[i]; adjacency lists are sorted ascending.
class InteractionGraph {
 public:
  using EdgeKey = std::pair<VertexIndex, VertexIndex>;  // first < second

  InteractionGraph() = default;
  /// Each key holds its pair once, smaller index first. Self-loops and zero
  /// weights are dropped.
  InteractionGraph(std::vector<UserId> vertices, const std::map<EdgeKey, std::uint32_t>& weights);

  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }
  const std::vector<UserId>& vertices() const noexcept { return vertices_; }

  std::span<const VertexIndex> neighbors(VertexIndex v) const { return adjacency_[v]; }
  std::size_t degree(VertexIndex v) const { return adjacency_[v].size(); }
  /// 0 when there is no edge.
  std::uint32_t weight(VertexIndex u, VertexIndex v) const;
  std::uint64_t total_weight() const noexcept;

  /// Gamma(u) by id; empty for isolated or unknown users.
  std::vector<UserId> neighbors(std::string_view user) const;
  std::optional<VertexIndex> index_of(std::string_view user) const;

 private:
  std::vector<UserId> vertices_;
  std::vector<std::vector<VertexIndex>> adjacency_;
  std::vector<std::vector<std::uint32_t>> weights_;  // parallel to adjacency_
  std::size_t edge_count_ = 0;
};

/// Edge (u, v) weighted by the number of interactions in either direction.
InteractionGraph build_social_graph(const Corpus& corpus);

/// Edge (u, v) weighted by the number of monitored events both attended.
InteractionGraph build_colocation_graph(const Corpus& corpus);

}  // namespace hybridrec
