#pragma once

// User-user similarity features. Content features compare entity sets
// Delta(u); network features compare neighborhoods Gamma(u) in an
// interaction graph.

#include <cmath>
#include <cstdint>
#include <iterator>
#include <ranges>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hybridrec/corpus.hpp"
#include "hybridrec/graphs.hpp"

namespace hybridrec {

enum class Source { marketplace, social, location };
enum class Family { content, network };
enum class GraphKind { social, colocation };

enum class Feature {
  common_entities,
  total_entities,
  jaccard_entities,
  directed_interactions,
  common_neighbors,
  jaccard_neighbors,
  adamic_adar,
  neighborhood_overlap,
  preferential_attachment
};

class UnknownFeature : public std::invalid_argument {
 public:
  explicit UnknownFeature(std::string id)
      : std::invalid_argument("unknown feature id '" + id + "'"), id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class UnknownUser : public std::out_of_range {
 public:
  explicit UnknownUser(const std::string& user)
      : std::out_of_range("unknown user '" + user + "'") {}
};

/// A feature bound to its data: an entity kind for content features, a graph
/// for network features. Identifiers look like `mp.sellers.jaccard` or
/// `sn.graph.no`.
struct FeatureSpec {
  Source source = Source::marketplace;
  Family family = Family::content;
  Feature feature = Feature::common_entities;
  EntityKind entity_kind = EntityKind::purchases;  // content only
  GraphKind graph = GraphKind::social;             // network only

  static FeatureSpec parse(std::string_view id);
  std::string id() const;

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

/// Every valid feature identifier, in canonical order.
const std::vector<std::string>& all_feature_ids();

// --- content features over sorted ranges ----------------------------------

template <std::ranges::forward_range A, std::ranges::forward_range B>
std::size_t common_entities(const A& a, const B& b) {
  std::size_t n = 0;
  auto i = std::ranges::begin(a);
  auto j = std::ranges::begin(b);
  while (i != std::ranges::end(a) && j != std::ranges::end(b)) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

template <std::ranges::forward_range A, std::ranges::forward_range B>
std::size_t total_entities(const A& a, const B& b) {
  return static_cast<std::size_t>(std::ranges::distance(a) + std::ranges::distance(b)) -
         common_entities(a, b);
}

/// 0 when both sets are empty.
template <std::ranges::forward_range A, std::ranges::forward_range B>
double jaccard_entities(const A& a, const B& b) {
  const auto common = common_entities(a, b);
  const auto total = static_cast<std::size_t>(std::ranges::distance(a) +
                                              std::ranges::distance(b)) -
                     common;
  return total == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(total);
}

// --- network features -------------------------------------------------------

std::size_t common_neighbors(const InteractionGraph& g, VertexIndex u, VertexIndex v);
double jaccard_neighbors(const InteractionGraph& g, VertexIndex u, VertexIndex v);
/// Natural log; shared neighbors of degree <= 1 are skipped.
double adamic_adar(const InteractionGraph& g, VertexIndex u, VertexIndex v);
double neighborhood_overlap(const InteractionGraph& g, VertexIndex u, VertexIndex v);
std::size_t preferential_attachment(const InteractionGraph& g, VertexIndex u, VertexIndex v);

/// Number of interaction rows with actor u and target v (one direction).
std::size_t directed_interactions(const Corpus& corpus, std::string_view u, std::string_view v);

// --- neighborhoods ------------------------------------------------------------

struct ScoredNeighbor {
  VertexIndex index = 0;
  UserId user;
  double similarity = 0.0;
};

/// Candidates for one target, descending by similarity, ties by ascending id.
struct SimilarityMatrixSlice {
  UserId target;
  std::vector<ScoredNeighbor> scored;
};

/// Dense per-kind entity profiles with an inverted index.
struct DenseProfiles {
  std::vector<std::string> entities;                   // sorted names
  std::vector<std::vector<std::uint32_t>> by_user;     // sorted entity indices
  std::vector<std::vector<VertexIndex>> holders;       // sorted users per entity
};

DenseProfiles make_dense_profiles(const Corpus& corpus, EntityKind kind);

/// Precomputed profiles, graphs and directed interaction counts for one
/// corpus. The corpus must outlive the index. Immutable after construction,
/// so concurrent queries are safe.
class SimilarityIndex {
 public:
  explicit SimilarityIndex(const Corpus& corpus);

  const Corpus& corpus() const noexcept { return *corpus_; }
  const DenseProfiles& profiles(EntityKind kind) const {
    return profiles_[static_cast<std::size_t>(kind)];
  }
  const InteractionGraph& graph(GraphKind kind) const {
    return kind == GraphKind::social ? social_ : colocation_;
  }
  std::uint32_t directed_count(VertexIndex actor, VertexIndex target) const;

  /// The feature value exactly as defined, directed interactions one-way.
  double similarity(const FeatureSpec& feature, VertexIndex u, VertexIndex v) const;

  /// The value used to form neighborhoods: identical to similarity() except
  /// that directed interactions take the larger of the two directions.
  double neighborhood_similarity(const FeatureSpec& feature, VertexIndex u, VertexIndex v) const;

  /// Top-k candidates with positive similarity. A target without data for
  /// the feature's source (empty profile or isolated vertex) gets an empty
  /// slice, and candidates without such data are never returned. Throws
  /// UnknownUser for ids outside the universe.
  SimilarityMatrixSlice k_nearest(const FeatureSpec& feature, std::string_view target,
                                  std::size_t k) const;
  SimilarityMatrixSlice k_nearest(const FeatureSpec& feature, VertexIndex target,
                                  std::size_t k) const;

 private:
  bool has_data(const FeatureSpec& feature, VertexIndex u) const;

  const Corpus* corpus_;
  std::vector<DenseProfiles> profiles_;
  InteractionGraph social_;
  InteractionGraph colocation_;
  std::vector<std::vector<std::pair<VertexIndex, std::uint32_t>>> outgoing_;  // sorted
};

}  // namespace hybridrec
