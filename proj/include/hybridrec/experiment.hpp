#pragma once

// Config-driven experiment runner: split the corpus, build the configured
// recommenders on the training data, weight hybrids on an inner holdout and
// evaluate every recommender on every requested task.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hybridrec/corpus.hpp"
#include "hybridrec/evalharness.hpp"
#include "hybridrec/recommender.hpp"
#include "hybridrec/simfeatures.hpp"

namespace hybridrec {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A single recommender (feature id or `most_popular`) or, when `components`
/// is non-empty, a Weighted Sum hybrid over them.
struct RecommenderDef {
  std::string id;
  std::vector<std::string> components;
  std::optional<HybridWeights> weights;  // explicit; otherwise derived per task

  bool is_hybrid() const noexcept { return !components.empty(); }
};

struct ExperimentConfig {
  std::filesystem::path dataset;
  std::uint64_t seed = 42;
  std::size_t neighborhood = kDefaultNeighborhood;
  std::size_t list_length = kDefaultListLength;
  std::vector<Task> tasks{std::begin(kAllTasks), std::end(kAllTasks)};
  std::vector<RecommenderDef> recommenders;
  std::filesystem::path output = "results";
  Averaging averaging = Averaging::harsh;

  /// Throws ConfigError.
  void validate() const;
};

/// Expands `*`, `mp.*`, `sn.graph.*` style patterns against the feature ids;
/// exact ids (and `most_popular`) pass through. Throws ConfigError when a
/// pattern matches nothing or an id is unknown.
std::vector<std::string> expand_recommender_ids(std::string_view pattern);

/// JSON config. Relative paths resolve against `base_dir`. Throws ConfigError.
ExperimentConfig parse_config(std::string_view json_text,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Holds the split, training corpus and similarity index for one seed and
/// builds recommenders against them.
class Experiment {
 public:
  /// `corpus` must outlive the experiment.
  Experiment(const Corpus& corpus, ExperimentConfig config);

  const Split& split() const noexcept { return split_; }
  const Corpus& training() const noexcept { return *training_; }
  const SimilarityIndex& index() const noexcept { return *index_; }
  const ExperimentConfig& config() const noexcept { return config_; }

  /// Builds (and caches) the recommender for a definition; hybrids get their
  /// per-task weights here.
  std::shared_ptr<const Recommender> recommender(const RecommenderDef& def);

  /// nDCG@10 of a component on the inner weighting holdout.
  double weighting_ndcg(const std::string& component, Task task);

  EvalReport run(Task task);
  std::vector<EvalReport> run_all();

 private:
  std::shared_ptr<const Recommender> single(const std::string& id, const SimilarityIndex& index,
                                            const Corpus& training);
  void prepare_weighting();

  const Corpus* corpus_;
  ExperimentConfig config_;
  Split split_;
  std::unique_ptr<Corpus> training_;
  std::unique_ptr<SimilarityIndex> index_;
  std::map<std::string, std::shared_ptr<const Recommender>> built_;

  Split weighting_split_;
  std::unique_ptr<Corpus> weighting_training_;
  std::unique_ptr<SimilarityIndex> weighting_index_;
  std::map<std::pair<std::string, Task>, double> weighting_scores_;
};

/// Loads the dataset, runs every task and writes the reports to
/// config.output. Returns the reports.
std::vector<EvalReport> run_config(const ExperimentConfig& config);

}  // namespace hybridrec
