#include "hybridrec/graphs.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace hybridrec {

InteractionGraph::InteractionGraph(std::vector<UserId> vertices,
                                   const std::map<EdgeKey, std::uint32_t>& weights)
    : vertices_(std::move(vertices)),
      adjacency_(vertices_.size()),
      weights_(vertices_.size()) {
  std::vector<std::vector<std::pair<VertexIndex, std::uint32_t>>> lists(vertices_.size());
  for (const auto& [key, w] : weights) {
    const auto [a, b] = key;
    if (a == b || w == 0) continue;
    lists[a].emplace_back(b, w);
    lists[b].emplace_back(a, w);
    ++edge_count_;
  }
  for (std::size_t v = 0; v < lists.size(); ++v) {
    std::sort(lists[v].begin(), lists[v].end());
    for (const auto& [n, w] : lists[v]) {
      adjacency_[v].push_back(n);
      weights_[v].push_back(w);
    }
  }
}

std::uint32_t InteractionGraph::weight(VertexIndex u, VertexIndex v) const {
  if (u >= adjacency_.size()) return 0;
  const auto& adj = adjacency_[u];
  const auto it = std::lower_bound(adj.begin(), adj.end(), v);
  if (it == adj.end() || *it != v) return 0;
  return weights_[u][static_cast<std::size_t>(it - adj.begin())];
}

std::uint64_t InteractionGraph::total_weight() const noexcept {
  std::uint64_t total = 0;
  for (std::size_t v = 0; v < adjacency_.size(); ++v) {
    for (std::size_t i = 0; i < adjacency_[v].size(); ++i) {
      if (adjacency_[v][i] > v) total += weights_[v][i];
    }
  }
  return total;
}

std::optional<VertexIndex> InteractionGraph::index_of(std::string_view user) const {
  const auto it = std::lower_bound(vertices_.begin(), vertices_.end(), user);
  if (it == vertices_.end() || *it != user) return std::nullopt;
  return static_cast<VertexIndex>(it - vertices_.begin());
}

std::vector<UserId> InteractionGraph::neighbors(std::string_view user) const {
  std::vector<UserId> out;
  if (const auto v = index_of(user)) {
    for (const auto n : adjacency_[*v]) out.push_back(vertices_[n]);
  }
  return out;
}

InteractionGraph build_social_graph(const Corpus& corpus) {
  std::map<InteractionGraph::EdgeKey, std::uint32_t> weights;
  for (const auto& s : corpus.social()) {
    auto a = static_cast<VertexIndex>(*corpus.user_index(s.actor));
    auto b = static_cast<VertexIndex>(*corpus.user_index(s.target));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    ++weights[{a, b}];
  }
  return InteractionGraph(corpus.users(), weights);
}

InteractionGraph build_colocation_graph(const Corpus& corpus) {
  // Distinct attendees per event; std::set drops repeated attendance records.
  std::map<EventId, std::set<VertexIndex>> attendees;
  for (const auto& l : corpus.locations()) {
    if (l.kind != LocationKind::monitored || !l.event) continue;
    attendees[*l.event].insert(static_cast<VertexIndex>(*corpus.user_index(l.user)));
  }
  std::map<InteractionGraph::EdgeKey, std::uint32_t> weights;
  for (const auto& [event, users] : attendees) {
    for (auto a = users.begin(); a != users.end(); ++a) {
      for (auto b = std::next(a); b != users.end(); ++b) ++weights[{*a, *b}];
    }
  }
  return InteractionGraph(corpus.users(), weights);
}

}  // namespace hybridrec
