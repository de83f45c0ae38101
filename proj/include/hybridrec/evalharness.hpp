#pragma once

// Offline holdout evaluation: withhold-10 split with post-filtering, the
// per-user ranking metrics, and experiment reports.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hybridrec/corpus.hpp"
#include "hybridrec/recommender.hpp"

namespace hybridrec {

inline constexpr std::size_t kHoldoutSize = 10;

struct Split {
  std::vector<Purchase> training;
  std::map<UserId, std::set<ProductId>> test;  // eligible users only
  std::vector<UserId> eligible;                 // sorted
  std::uint64_t seed = 0;
};

/// Users with at least 11 distinct products get 10 of them (sampled with
/// `seed`) withheld; every purchase row of a withheld product leaves the
/// training set. Everyone else keeps all purchases and is not evaluated.
Split make_split(const Corpus& corpus, std::uint64_t seed);

/// Inner holdout carved from a training corpus for weighting hybrids: each
/// listed user with at least 2 distinct training products has up to 10 of
/// them withheld, always keeping one.
Split make_weighting_split(const Corpus& training, const std::vector<UserId>& users,
                           std::uint64_t seed);

// --- per-user metrics; `recommended` is ranked, only its first k count ---

double recall_at_k(std::span<const std::string> recommended, const std::set<std::string>& relevant,
                   std::size_t k);
/// Denominator is k even for shorter lists.
double precision_at_k(std::span<const std::string> recommended,
                      const std::set<std::string>& relevant, std::size_t k);
double dcg_at_k(std::span<const std::string> recommended, const std::set<std::string>& relevant,
                std::size_t k);
/// 0 when there is nothing relevant.
double ndcg_at_k(std::span<const std::string> recommended, const std::set<std::string>& relevant,
                 std::size_t k);

using ItemDistance = std::function<double(const std::string&, const std::string&)>;

/// 1 - Jaccard of the two category path sets; 0 for the same product.
double category_distance(const Product& i, const Product& j);
/// category_distance over product ids of `corpus`; the corpus must outlive it.
ItemDistance make_category_distance(const Corpus& corpus);

/// Mean distance over ordered pairs of the first min(k, size) items; lists
/// shorter than 2 give 0.
double diversity_at_k(std::span<const std::string> recommended, const ItemDistance& distance,
                      std::size_t k);

/// Share of lists that are non-empty; 0 for no lists.
double user_coverage(std::span<const RecommendationList> results);

/// The relevant set for a user: withheld products, or their categories at
/// the task's level (uncategorised products contribute nothing).
std::set<std::string> relevant_items(const Corpus& corpus, const std::set<ProductId>& withheld,
                                     Task task);

/// harsh: unserved users count as 0 in every accuracy average.
/// skip: accuracy and diversity are averaged over served users only.
enum class Averaging { harsh, skip };

std::string_view to_string(Averaging averaging);

struct EvalOptions {
  std::size_t list_length = kDefaultListLength;
  Averaging averaging = Averaging::harsh;
};

struct CurvePoint {
  std::size_t k = 0;
  double recall = 0.0;
  double precision = 0.0;
};

struct MetricRow {
  std::string recommender;
  double ndcg = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double diversity = 0.0;
  double user_coverage = 0.0;
  std::size_t eligible = 0;
  std::size_t served = 0;
  std::size_t short_lists = 0;  // product lists too short for diversity
  std::vector<CurvePoint> curve;  // k = 1..list_length
};

struct EvalReport {
  Task task = Task::products;
  std::uint64_t seed = 0;
  std::size_t neighborhood = kDefaultNeighborhood;
  EvalOptions options;
  std::vector<MetricRow> rows;
  std::map<std::string, HybridWeights> weights;  // hybrid id -> weights for this task
};

/// Scores one recommender on every eligible user. Diversity always uses the
/// recommender's product list, also for category tasks.
MetricRow evaluate(const Recommender& recommender, const Corpus& corpus, const Split& split,
                   Task task, const ItemDistance& distance, const EvalOptions& options = {});

EvalReport run_experiment(const Corpus& corpus, const Split& split,
                          const std::vector<std::shared_ptr<const Recommender>>& recommenders,
                          Task task, const EvalOptions& options = {});

/// Writes <task>_metrics.csv, <task>_curves.csv and <task>_meta.csv.
void write_report(const EvalReport& report, const std::filesystem::path& dir);

}  // namespace hybridrec
