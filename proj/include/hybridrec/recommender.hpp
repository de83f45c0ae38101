#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hybridrec/corpus.hpp"
#include "hybridrec/simfeatures.hpp"

namespace hybridrec {

/// What a list ranks: products, or the top-/low-level category of products.
enum class Task { products, low_categories, top_categories };

inline constexpr Task kAllTasks[] = {Task::products, Task::low_categories, Task::top_categories};

std::string_view to_string(Task task);
std::optional<Task> parse_task(std::string_view text);

enum class CategoryLevel { top, low };

inline constexpr std::size_t kDefaultListLength = 10;
inline constexpr std::size_t kDefaultNeighborhood = 40;
inline constexpr std::string_view kMostPopularId = "most_popular";

struct ScoredItem {
  std::string id;
  double score = 0.0;

  friend bool operator==(const ScoredItem&, const ScoredItem&) = default;
};

/// Ranked top-N list: descending score, ties by ascending item id.
struct RecommendationList {
  UserId target;
  Task kind = Task::products;
  std::vector<ScoredItem> items;

  bool empty() const noexcept { return items.empty(); }
  std::vector<std::string> ids() const;
};

/// Component id -> weight.
using HybridWeights = std::map<std::string, double>;

/// Sorts by descending score with ascending-id tie-break and keeps the first
/// n. Scores closer than a relative 1e-12 are treated as tied so that sums
/// evaluated in different orders rank identically.
std::vector<ScoredItem> rank_items(std::vector<ScoredItem> items, std::size_t n);

/// Popularity by training purchase rows. Product lists omit the target's own
/// purchases.
class MostPopular {
 public:
  explicit MostPopular(const Corpus& training);

  RecommendationList recommend(const UserId& target, Task task, std::size_t n) const;
  /// Purchase-row count for an item under a task (0 if unseen).
  std::size_t count(Task task, const std::string& item) const;

 private:
  std::vector<std::vector<ScoredItem>> ranked_;  // per task, fully ranked
  std::vector<std::map<std::string, std::size_t>> counts_;
  std::map<UserId, std::set<ProductId>> owned_;
};

/// Every product owned by a neighbor and not by the target, scored by the
/// summed similarity of the neighbors owning it. Unranked, untruncated.
std::vector<ScoredItem> cf_product_candidates(const SimilarityIndex& index,
                                              const SimilarityMatrixSlice& slice);

RecommendationList cf_products(const SimilarityIndex& index, const SimilarityMatrixSlice& slice,
                               std::size_t n);

/// Category frequency over the full candidate product pool, normalised by
/// the pool's number of categorised products.
RecommendationList cf_categories(const SimilarityIndex& index, const SimilarityMatrixSlice& slice,
                                 CategoryLevel level, std::size_t n);

/// Min-max rescale into [0, 1]; constant lists map to 1.
RecommendationList normalize_scores(RecommendationList list);

/// Item score = sum of (score in component, 0 if absent) x component weight.
/// Components missing from `weights` weigh 0.
RecommendationList weighted_sum_hybrid(const std::map<std::string, RecommendationList>& lists,
                                       const HybridWeights& weights, std::size_t n);

/// Component weight = its nDCG@10; throws std::runtime_error when no
/// component scores above 0.
HybridWeights derive_hybrid_weights(const std::map<std::string, double>& ndcg_at_10);

/// A top-N recommender for all three tasks.
class Recommender {
 public:
  virtual ~Recommender() = default;
  virtual const std::string& id() const = 0;
  virtual RecommendationList recommend(const UserId& target, Task task, std::size_t n) const = 0;
};

class MostPopularRecommender final : public Recommender {
 public:
  explicit MostPopularRecommender(const Corpus& training) : model_(training) {}
  const std::string& id() const override { return id_; }
  RecommendationList recommend(const UserId& target, Task task, std::size_t n) const override {
    return model_.recommend(target, task, n);
  }

 private:
  std::string id_{kMostPopularId};
  MostPopular model_;
};

/// User-based k-NN collaborative filtering over one similarity feature.
class CfRecommender final : public Recommender {
 public:
  CfRecommender(const SimilarityIndex& index, FeatureSpec feature,
                std::size_t k = kDefaultNeighborhood);
  const std::string& id() const override { return id_; }
  RecommendationList recommend(const UserId& target, Task task, std::size_t n) const override;

 private:
  const SimilarityIndex* index_;
  FeatureSpec feature_;
  std::size_t k_;
  std::string id_;
};

/// Weighted Sum hybrid: normalised component lists combined per task with
/// per-task weights.
class WeightedSumRecommender final : public Recommender {
 public:
  WeightedSumRecommender(std::string id, std::vector<std::shared_ptr<const Recommender>> components,
                         std::map<Task, HybridWeights> weights);
  const std::string& id() const override { return id_; }
  RecommendationList recommend(const UserId& target, Task task, std::size_t n) const override;
  const std::map<Task, HybridWeights>& weights() const noexcept { return weights_; }

 private:
  std::string id_;
  std::vector<std::shared_ptr<const Recommender>> components_;
  std::map<Task, HybridWeights> weights_;
};

}  // namespace hybridrec
