#include "hybridrec/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace hybridrec {

namespace {

using nlohmann::json;

// Separates the inner weighting holdout's sampling from the outer split.
constexpr std::uint64_t kWeightingSeedSalt = 0x9E3779B97F4A7C15ull;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

template <typename T>
T get(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

Task task_from(const std::string& text) {
  const auto t = parse_task(text);
  if (!t) throw ConfigError("unknown task '" + text + "'");
  return *t;
}

}  // namespace

std::vector<std::string> expand_recommender_ids(std::string_view pattern) {
  if (pattern == kMostPopularId) return {std::string(pattern)};
  const auto& ids = all_feature_ids();
  if (pattern.ends_with('*')) {
    const auto prefix = pattern.substr(0, pattern.size() - 1);
    std::vector<std::string> out;
    for (const auto& id : ids) {
      if (id.starts_with(prefix)) out.push_back(id);
    }
    if (out.empty()) throw ConfigError("pattern '" + std::string(pattern) + "' matches no feature");
    return out;
  }
  if (std::find(ids.begin(), ids.end(), pattern) == ids.end()) {
    throw ConfigError("unknown feature id '" + std::string(pattern) + "'");
  }
  return {std::string(pattern)};
}

void ExperimentConfig::validate() const {
  if (neighborhood < 1) throw ConfigError("k (neighborhood) must be >= 1");
  if (list_length < 1) throw ConfigError("N (list length) must be >= 1");
  if (tasks.empty()) throw ConfigError("no task selected");
  if (recommenders.empty()) throw ConfigError("at least one recommender is required");
  std::set<std::string> seen;
  for (const auto& def : recommenders) {
    if (!seen.insert(def.id).second) throw ConfigError("duplicate recommender id '" + def.id + "'");
    if (!def.is_hybrid()) {
      expand_recommender_ids(def.id);
      continue;
    }
    for (const auto& c : def.components) expand_recommender_ids(c);
    if (def.weights) {
      bool positive = false;
      for (const auto& [component, w] : *def.weights) {
        if (std::find(def.components.begin(), def.components.end(), component) ==
            def.components.end()) {
          throw ConfigError("hybrid '" + def.id + "' weights unknown component '" + component + "'");
        }
        if (!(w >= 0.0)) throw ConfigError("hybrid '" + def.id + "' has a negative weight");
        positive = positive || w > 0.0;
      }
      if (!positive) throw ConfigError("hybrid '" + def.id + "' needs a positive weight");
    }
  }
}

ExperimentConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse failure: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig config;
  if (j.contains("dataset")) config.dataset = resolve(base_dir, get<std::string>(j, "dataset", ""));
  if (j.contains("output")) config.output = resolve(base_dir, get<std::string>(j, "output", ""));
  config.seed = get<std::uint64_t>(j, "seed", config.seed);
  const auto k = get<long long>(j, "k", static_cast<long long>(config.neighborhood));
  const auto n = get<long long>(j, "n", static_cast<long long>(config.list_length));
  if (k < 1) throw ConfigError("k (neighborhood) must be >= 1");
  if (n < 1) throw ConfigError("N (list length) must be >= 1");
  config.neighborhood = static_cast<std::size_t>(k);
  config.list_length = static_cast<std::size_t>(n);

  if (j.contains("task")) {
    const auto t = get<std::string>(j, "task", "");
    config.tasks = t == "all" ? config.tasks : std::vector<Task>{task_from(t)};
  }
  if (j.contains("tasks")) {
    config.tasks.clear();
    for (const auto& t : get<std::vector<std::string>>(j, "tasks", {})) {
      config.tasks.push_back(task_from(t));
    }
  }

  const auto averaging = get<std::string>(j, "averaging", "harsh");
  if (averaging == "harsh") {
    config.averaging = Averaging::harsh;
  } else if (averaging == "skip") {
    config.averaging = Averaging::skip;
  } else {
    throw ConfigError("averaging must be 'harsh' or 'skip'");
  }

  if (!j.contains("recommenders") || !j["recommenders"].is_array()) {
    throw ConfigError("config needs a 'recommenders' array");
  }
  for (const auto& entry : j["recommenders"]) {
    if (entry.is_string()) {
      for (auto& id : expand_recommender_ids(entry.get<std::string>())) {
        config.recommenders.push_back({std::move(id), {}, std::nullopt});
      }
      continue;
    }
    if (!entry.is_object() || !entry.contains("id") || !entry.contains("hybrid")) {
      throw ConfigError("hybrid entries need 'id' and 'hybrid' keys");
    }
    RecommenderDef def;
    def.id = get<std::string>(entry, "id", "");
    std::set<std::string> components;
    for (const auto& pattern : get<std::vector<std::string>>(entry, "hybrid", {})) {
      for (auto& id : expand_recommender_ids(pattern)) {
        if (components.insert(id).second) def.components.push_back(std::move(id));
      }
    }
    if (def.id.empty() || def.components.empty()) {
      throw ConfigError("hybrid '" + def.id + "' needs an id and at least one component");
    }
    if (entry.contains("weights")) def.weights = get<HybridWeights>(entry, "weights", {});
    config.recommenders.push_back(std::move(def));
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path());
}

Experiment::Experiment(const Corpus& corpus, ExperimentConfig config)
    : corpus_(&corpus), config_(std::move(config)) {
  config_.validate();
  split_ = make_split(corpus, config_.seed);
  training_ = std::make_unique<Corpus>(corpus.with_purchases(split_.training));
  index_ = std::make_unique<SimilarityIndex>(*training_);
}

std::shared_ptr<const Recommender> Experiment::single(const std::string& id,
                                                      const SimilarityIndex& index,
                                                      const Corpus& training) {
  if (id == kMostPopularId) return std::make_shared<MostPopularRecommender>(training);
  return std::make_shared<CfRecommender>(index, FeatureSpec::parse(id), config_.neighborhood);
}

void Experiment::prepare_weighting() {
  if (weighting_index_) return;
  weighting_split_ = make_weighting_split(*training_, split_.eligible,
                                          config_.seed ^ kWeightingSeedSalt);
  weighting_training_ =
      std::make_unique<Corpus>(training_->with_purchases(weighting_split_.training));
  weighting_index_ = std::make_unique<SimilarityIndex>(*weighting_training_);
}

double Experiment::weighting_ndcg(const std::string& component, Task task) {
  const auto key = std::make_pair(component, task);
  if (const auto it = weighting_scores_.find(key); it != weighting_scores_.end()) {
    return it->second;
  }
  prepare_weighting();
  const auto rec = single(component, *weighting_index_, *weighting_training_);
  EvalOptions options;
  options.list_length = kDefaultListLength;
  const auto distance = make_category_distance(*weighting_training_);
  const double ndcg =
      evaluate(*rec, *weighting_training_, weighting_split_, task, distance, options).ndcg;
  weighting_scores_.emplace(key, ndcg);
  return ndcg;
}

std::shared_ptr<const Recommender> Experiment::recommender(const RecommenderDef& def) {
  if (const auto it = built_.find(def.id); it != built_.end()) return it->second;
  std::shared_ptr<const Recommender> rec;
  if (!def.is_hybrid()) {
    rec = single(def.id, *index_, *training_);
  } else {
    std::vector<std::shared_ptr<const Recommender>> components;
    for (const auto& c : def.components) {
      auto it = built_.find(c);
      if (it == built_.end()) it = built_.emplace(c, single(c, *index_, *training_)).first;
      components.push_back(it->second);
    }
    std::map<Task, HybridWeights> weights;
    for (const auto task : kAllTasks) {
      if (def.weights) {
        weights[task] = *def.weights;
        continue;
      }
      std::map<std::string, double> scores;
      for (const auto& c : def.components) scores[c] = weighting_ndcg(c, task);
      try {
        weights[task] = derive_hybrid_weights(scores);
      } catch (const std::runtime_error& e) {
        throw std::runtime_error("hybrid '" + def.id + "', task " + std::string(to_string(task)) +
                                 ": " + e.what());
      }
    }
    rec = std::make_shared<WeightedSumRecommender>(def.id, std::move(components),
                                                   std::move(weights));
  }
  built_.emplace(def.id, rec);
  return rec;
}

EvalReport Experiment::run(Task task) {
  std::vector<std::shared_ptr<const Recommender>> recs;
  for (const auto& def : config_.recommenders) recs.push_back(recommender(def));
  EvalOptions options;
  options.list_length = config_.list_length;
  options.averaging = config_.averaging;
  auto report = run_experiment(*corpus_, split_, recs, task, options);
  report.neighborhood = config_.neighborhood;
  return report;
}

std::vector<EvalReport> Experiment::run_all() {
  std::vector<EvalReport> reports;
  for (const auto task : config_.tasks) reports.push_back(run(task));
  return reports;
}

std::vector<EvalReport> run_config(const ExperimentConfig& config) {
  config.validate();
  if (config.dataset.empty()) throw ConfigError("config names no dataset directory");
  const Corpus corpus = load_corpus(CorpusPaths::in_directory(config.dataset));
  Experiment experiment(corpus, config);
  auto reports = experiment.run_all();
  for (const auto& r : reports) write_report(r, config.output);
  return reports;
}

}  // namespace hybridrec
