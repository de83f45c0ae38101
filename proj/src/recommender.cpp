#include "hybridrec/recommender.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace hybridrec {

std::string_view to_string(Task task) {
  switch (task) {
    case Task::products: return "products";
    case Task::low_categories: return "low_categories";
    case Task::top_categories: return "top_categories";
  }
  return "?";
}

std::optional<Task> parse_task(std::string_view text) {
  for (const auto t : kAllTasks) {
    if (to_string(t) == text) return t;
  }
  return std::nullopt;
}

std::vector<std::string> RecommendationList::ids() const {
  std::vector<std::string> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(item.id);
  return out;
}

std::vector<ScoredItem> rank_items(std::vector<ScoredItem> items, std::size_t n) {
  std::sort(items.begin(), items.end(), [](const ScoredItem& a, const ScoredItem& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  });
  if (!items.empty()) {
    double scale = 0.0;
    for (const auto& item : items) scale = std::max(scale, std::abs(item.score));
    const double tolerance = 1e-12 * std::max(scale, 1e-300);
    std::size_t begin = 0;
    while (begin < items.size() && begin < n) {
      std::size_t end = begin + 1;
      while (end < items.size() && items[begin].score - items[end].score <= tolerance) ++end;
      if (end - begin > 1) {
        std::sort(items.begin() + static_cast<std::ptrdiff_t>(begin),
                  items.begin() + static_cast<std::ptrdiff_t>(end),
                  [](const ScoredItem& a, const ScoredItem& b) { return a.id < b.id; });
      }
      begin = end;
    }
  }
  if (items.size() > n) items.resize(n);
  return items;
}

MostPopular::MostPopular(const Corpus& training)
    : ranked_(3), counts_(3) {
  for (const auto& p : training.purchases()) {
    const Product& product = *training.find_product(p.product);
    ++counts_[static_cast<std::size_t>(Task::products)][product.id];
    if (const auto top = top_level_category(product)) {
      ++counts_[static_cast<std::size_t>(Task::top_categories)][*top];
    }
    if (const auto low = low_level_category(product)) {
      ++counts_[static_cast<std::size_t>(Task::low_categories)][*low];
    }
    owned_[p.buyer].insert(p.product);
  }
  for (std::size_t t = 0; t < 3; ++t) {
    std::vector<ScoredItem> items;
    for (const auto& [id, c] : counts_[t]) items.push_back({id, static_cast<double>(c)});
    ranked_[t] = rank_items(std::move(items), std::numeric_limits<std::size_t>::max());
  }
}

std::size_t MostPopular::count(Task task, const std::string& item) const {
  const auto& c = counts_[static_cast<std::size_t>(task)];
  const auto it = c.find(item);
  return it == c.end() ? 0 : it->second;
}

RecommendationList MostPopular::recommend(const UserId& target, Task task, std::size_t n) const {
  RecommendationList list{target, task, {}};
  const std::set<ProductId>* owned = nullptr;
  if (task == Task::products) {
    if (const auto it = owned_.find(target); it != owned_.end()) owned = &it->second;
  }
  for (const auto& item : ranked_[static_cast<std::size_t>(task)]) {
    if (list.items.size() >= n) break;
    if (owned && owned->contains(item.id)) continue;
    list.items.push_back(item);
  }
  return list;
}

std::vector<ScoredItem> cf_product_candidates(const SimilarityIndex& index,
                                              const SimilarityMatrixSlice& slice) {
  const auto& purchases = index.profiles(EntityKind::purchases);
  const auto target = index.corpus().user_index(slice.target);
  if (!target) throw UnknownUser(slice.target);
  const auto& owned = purchases.by_user[*target];

  // Neighbors are visited in slice order, so each item's sum is accumulated
  // in a fixed order.
  std::unordered_map<std::uint32_t, double> scores;
  for (const auto& neighbor : slice.scored) {
    for (const auto item : purchases.by_user[neighbor.index]) {
      if (std::binary_search(owned.begin(), owned.end(), item)) continue;
      scores[item] += neighbor.similarity;
    }
  }
  std::vector<ScoredItem> out;
  out.reserve(scores.size());
  for (const auto& [item, score] : scores) out.push_back({purchases.entities[item], score});
  std::sort(out.begin(), out.end(),
            [](const ScoredItem& a, const ScoredItem& b) { return a.id < b.id; });
  return out;
}

RecommendationList cf_products(const SimilarityIndex& index, const SimilarityMatrixSlice& slice,
                               std::size_t n) {
  return {slice.target, Task::products, rank_items(cf_product_candidates(index, slice), n)};
}

RecommendationList cf_categories(const SimilarityIndex& index, const SimilarityMatrixSlice& slice,
                                 CategoryLevel level, std::size_t n) {
  const Task task = level == CategoryLevel::top ? Task::top_categories : Task::low_categories;
  RecommendationList list{slice.target, task, {}};

  std::map<CategoryId, std::size_t> occurrences;
  std::size_t pool = 0;
  for (const auto& candidate : cf_product_candidates(index, slice)) {
    const Product& product = *index.corpus().find_product(candidate.id);
    const auto category =
        level == CategoryLevel::top ? top_level_category(product) : low_level_category(product);
    if (!category) continue;
    ++occurrences[*category];
    ++pool;
  }
  if (pool == 0) return list;

  std::vector<ScoredItem> items;
  items.reserve(occurrences.size());
  for (const auto& [category, c] : occurrences) {
    items.push_back({category, static_cast<double>(c) / static_cast<double>(pool)});
  }
  list.items = rank_items(std::move(items), n);
  return list;
}

RecommendationList normalize_scores(RecommendationList list) {
  if (list.items.empty()) return list;
  const auto [lo, hi] = std::minmax_element(
      list.items.begin(), list.items.end(),
      [](const ScoredItem& a, const ScoredItem& b) { return a.score < b.score; });
  const double min = lo->score;
  const double range = hi->score - min;
  for (auto& item : list.items) item.score = range > 0.0 ? (item.score - min) / range : 1.0;
  return list;
}

RecommendationList weighted_sum_hybrid(const std::map<std::string, RecommendationList>& lists,
                                       const HybridWeights& weights, std::size_t n) {
  RecommendationList out;
  std::map<std::string, double> combined;
  for (const auto& [component, list] : lists) {
    if (out.target.empty()) {
      out.target = list.target;
      out.kind = list.kind;
    }
    const auto w = weights.find(component);
    if (w == weights.end() || w->second <= 0.0) continue;
    for (const auto& item : list.items) combined[item.id] += item.score * w->second;
  }
  std::vector<ScoredItem> items;
  items.reserve(combined.size());
  for (const auto& [id, score] : combined) items.push_back({id, score});
  out.items = rank_items(std::move(items), n);
  return out;
}

HybridWeights derive_hybrid_weights(const std::map<std::string, double>& ndcg_at_10) {
  HybridWeights weights;
  bool informative = false;
  for (const auto& [component, ndcg] : ndcg_at_10) {
    const double w = ndcg > 0.0 ? ndcg : 0.0;
    weights[component] = w;
    informative = informative || w > 0.0;
  }
  if (!informative) throw std::runtime_error("no informative component: every nDCG@10 is 0");
  return weights;
}

CfRecommender::CfRecommender(const SimilarityIndex& index, FeatureSpec feature, std::size_t k)
    : index_(&index), feature_(feature), k_(k), id_(feature.id()) {}

RecommendationList CfRecommender::recommend(const UserId& target, Task task, std::size_t n) const {
  const auto slice = index_->k_nearest(feature_, target, k_);
  switch (task) {
    case Task::products: return cf_products(*index_, slice, n);
    case Task::low_categories: return cf_categories(*index_, slice, CategoryLevel::low, n);
    case Task::top_categories: return cf_categories(*index_, slice, CategoryLevel::top, n);
  }
  return {target, task, {}};
}

WeightedSumRecommender::WeightedSumRecommender(
    std::string id, std::vector<std::shared_ptr<const Recommender>> components,
    std::map<Task, HybridWeights> weights)
    : id_(std::move(id)), components_(std::move(components)), weights_(std::move(weights)) {
  if (components_.empty()) throw std::invalid_argument("hybrid '" + id_ + "' has no components");
}

RecommendationList WeightedSumRecommender::recommend(const UserId& target, Task task,
                                                     std::size_t n) const {
  const auto w = weights_.find(task);
  if (w == weights_.end()) {
    throw std::logic_error("hybrid '" + id_ + "' has no weights for task " +
                           std::string(to_string(task)));
  }
  std::map<std::string, RecommendationList> lists;
  for (const auto& component : components_) {
    const auto cw = w->second.find(component->id());
    if (cw == w->second.end() || cw->second <= 0.0) continue;
    lists.emplace(component->id(), normalize_scores(component->recommend(target, task, n)));
  }
  auto out = weighted_sum_hybrid(lists, w->second, n);
  out.target = target;
  out.kind = task;
  return out;
}

}  // namespace hybridrec
