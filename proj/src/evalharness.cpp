#include "hybridrec/evalharness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "hybridrec/random.hpp"

namespace hybridrec {

namespace {

std::size_t hits_at(std::span<const std::string> recommended, const std::set<std::string>& relevant,
                    std::size_t k) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < std::min(k, recommended.size()); ++i) {
    if (relevant.contains(recommended[i])) ++hits;
  }
  return hits;
}

// Picks `count` of `items` without replacement (partial Fisher-Yates).
std::set<ProductId> sample(std::vector<ProductId> items, std::size_t count, Rng& rng) {
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.index(items.size() - i));
    std::swap(items[i], items[j]);
  }
  return {items.begin(), items.begin() + static_cast<std::ptrdiff_t>(count)};
}

Split holdout(const Corpus& corpus, const std::vector<UserId>& users, std::uint64_t seed,
              std::size_t min_distinct, bool keep_one) {
  std::map<UserId, std::set<ProductId>> owned;
  for (const auto& p : corpus.purchases()) owned[p.buyer].insert(p.product);

  Split split;
  split.seed = seed;
  Rng rng(seed);
  for (const auto& user : users) {
    const auto it = owned.find(user);
    if (it == owned.end() || it->second.size() < min_distinct) continue;
    const std::size_t n = it->second.size();
    const std::size_t take = keep_one ? std::min(kHoldoutSize, n - 1) : kHoldoutSize;
    split.test.emplace(user, sample({it->second.begin(), it->second.end()}, take, rng));
    split.eligible.push_back(user);
  }
  for (const auto& p : corpus.purchases()) {
    const auto it = split.test.find(p.buyer);
    if (it != split.test.end() && it->second.contains(p.product)) continue;
    split.training.push_back(p);
  }
  return split;
}

std::string fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

}  // namespace

Split make_split(const Corpus& corpus, std::uint64_t seed) {
  return holdout(corpus, corpus.users(), seed, kHoldoutSize + 1, false);
}

Split make_weighting_split(const Corpus& training, const std::vector<UserId>& users,
                           std::uint64_t seed) {
  std::vector<UserId> sorted = users;
  std::sort(sorted.begin(), sorted.end());
  return holdout(training, sorted, seed, 2, true);
}

double recall_at_k(std::span<const std::string> recommended, const std::set<std::string>& relevant,
                   std::size_t k) {
  if (relevant.empty()) return 0.0;
  return static_cast<double>(hits_at(recommended, relevant, k)) /
         static_cast<double>(relevant.size());
}

double precision_at_k(std::span<const std::string> recommended,
                      const std::set<std::string>& relevant, std::size_t k) {
  if (k == 0) return 0.0;
  return static_cast<double>(hits_at(recommended, relevant, k)) / static_cast<double>(k);
}

double dcg_at_k(std::span<const std::string> recommended, const std::set<std::string>& relevant,
                std::size_t k) {
  double dcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, recommended.size()); ++i) {
    // Binary relevance: gain 2^1 - 1 = 1 at rank i + 1.
    if (relevant.contains(recommended[i])) dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  }
  return dcg;
}

double ndcg_at_k(std::span<const std::string> recommended, const std::set<std::string>& relevant,
                 std::size_t k) {
  double ideal = 0.0;
  for (std::size_t i = 0; i < std::min(k, relevant.size()); ++i) {
    ideal += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  }
  if (ideal == 0.0) return 0.0;
  return dcg_at_k(recommended, relevant, k) / ideal;
}

double category_distance(const Product& i, const Product& j) {
  if (i.id == j.id) return 0.0;
  const std::set<std::string> a(i.category_path.begin(), i.category_path.end());
  const std::set<std::string> b(j.category_path.begin(), j.category_path.end());
  return 1.0 - jaccard_entities(a, b);
}

ItemDistance make_category_distance(const Corpus& corpus) {
  return [&corpus](const std::string& i, const std::string& j) {
    const Product* a = corpus.find_product(i);
    const Product* b = corpus.find_product(j);
    if (!a || !b) throw std::out_of_range("unknown product in distance: " + (a ? j : i));
    return category_distance(*a, *b);
  };
}

double diversity_at_k(std::span<const std::string> recommended, const ItemDistance& distance,
                      std::size_t k) {
  const std::size_t m = std::min(k, recommended.size());
  if (m < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j) sum += distance(recommended[i], recommended[j]);
    }
  }
  return sum / static_cast<double>(m * (m - 1));
}

double user_coverage(std::span<const RecommendationList> results) {
  if (results.empty()) return 0.0;
  const auto served =
      std::count_if(results.begin(), results.end(), [](const auto& l) { return !l.empty(); });
  return static_cast<double>(served) / static_cast<double>(results.size());
}

std::set<std::string> relevant_items(const Corpus& corpus, const std::set<ProductId>& withheld,
                                     Task task) {
  if (task == Task::products) return withheld;
  std::set<std::string> out;
  for (const auto& id : withheld) {
    const Product* p = corpus.find_product(id);
    if (!p) continue;
    const auto c = task == Task::top_categories ? top_level_category(*p) : low_level_category(*p);
    if (c) out.insert(*c);
  }
  return out;
}

std::string_view to_string(Averaging averaging) {
  return averaging == Averaging::harsh ? "harsh" : "skip";
}

MetricRow evaluate(const Recommender& recommender, const Corpus& corpus, const Split& split,
                   Task task, const ItemDistance& distance, const EvalOptions& options) {
  const std::size_t n = options.list_length;
  MetricRow row;
  row.recommender = recommender.id();
  row.eligible = split.eligible.size();
  row.curve.resize(n);
  std::vector<double> curve_recall(n, 0.0);
  std::vector<double> curve_precision(n, 0.0);

  // Sums run in eligible (sorted id) order, so results are reproducible.
  for (const auto& user : split.eligible) {
    const auto list = recommender.recommend(user, task, n);
    const auto ids = list.ids();
    const auto relevant = relevant_items(corpus, split.test.at(user), task);

    std::vector<std::string> product_ids;
    if (task == Task::products) {
      product_ids = ids;
    } else {
      product_ids = recommender.recommend(user, Task::products, n).ids();
    }

    if (list.empty()) continue;  // contributes 0 under both averaging modes
    ++row.served;
    row.ndcg += ndcg_at_k(ids, relevant, n);
    row.precision += precision_at_k(ids, relevant, n);
    row.recall += recall_at_k(ids, relevant, n);
    if (product_ids.size() < 2) ++row.short_lists;
    row.diversity += diversity_at_k(product_ids, distance, n);
    for (std::size_t k = 1; k <= n; ++k) {
      curve_recall[k - 1] += recall_at_k(ids, relevant, k);
      curve_precision[k - 1] += precision_at_k(ids, relevant, k);
    }
  }

  const std::size_t denom = options.averaging == Averaging::harsh ? row.eligible : row.served;
  const double scale = denom ? 1.0 / static_cast<double>(denom) : 0.0;
  row.ndcg *= scale;
  row.precision *= scale;
  row.recall *= scale;
  row.diversity *= scale;
  for (std::size_t k = 1; k <= n; ++k) {
    row.curve[k - 1] = {k, curve_recall[k - 1] * scale, curve_precision[k - 1] * scale};
  }
  row.user_coverage =
      row.eligible ? static_cast<double>(row.served) / static_cast<double>(row.eligible) : 0.0;
  return row;
}

EvalReport run_experiment(const Corpus& corpus, const Split& split,
                          const std::vector<std::shared_ptr<const Recommender>>& recommenders,
                          Task task, const EvalOptions& options) {
  EvalReport report;
  report.task = task;
  report.seed = split.seed;
  report.options = options;
  const auto distance = make_category_distance(corpus);
  for (const auto& r : recommenders) {
    report.rows.push_back(evaluate(*r, corpus, split, task, distance, options));
    if (const auto* hybrid = dynamic_cast<const WeightedSumRecommender*>(r.get())) {
      if (const auto it = hybrid->weights().find(task); it != hybrid->weights().end()) {
        report.weights[r->id()] = it->second;
      }
    }
  }
  return report;
}

void write_report(const EvalReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string task(to_string(report.task));
  const std::string n = std::to_string(report.options.list_length);
  auto open = [&](const std::string& name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    return out;
  };

  {
    auto out = open(task + "_metrics.csv");
    out << "recommender,ndcg@" << n << ",p@" << n << ",r@" << n << ",d@" << n
        << ",uc,eligible,served,short_lists\n";
    for (const auto& r : report.rows) {
      out << r.recommender << ',' << fixed(r.ndcg) << ',' << fixed(r.precision) << ','
          << fixed(r.recall) << ',' << fixed(r.diversity) << ',' << fixed(r.user_coverage) << ','
          << r.eligible << ',' << r.served << ',' << r.short_lists << '\n';
    }
  }
  {
    auto out = open(task + "_curves.csv");
    out << "recommender,k,recall,precision\n";
    for (const auto& r : report.rows) {
      for (const auto& p : r.curve) {
        out << r.recommender << ',' << p.k << ',' << fixed(p.recall) << ',' << fixed(p.precision)
            << '\n';
      }
    }
  }
  {
    auto out = open(task + "_meta.csv");
    out << "key,value\n";
    out << "task," << task << '\n';
    out << "seed," << report.seed << '\n';
    out << "neighborhood," << report.neighborhood << '\n';
    out << "list_length," << report.options.list_length << '\n';
    out << "averaging," << to_string(report.options.averaging) << '\n';
    out << "eligibility,at least " << kHoldoutSize + 1 << " distinct purchases\n";
    for (const auto& r : report.rows) out << "recommender," << r.recommender << '\n';
    for (const auto& [hybrid, weights] : report.weights) {
      for (const auto& [component, w] : weights) {
        out << "weight[" << hybrid << "][" << component << "]," << fixed(w) << '\n';
      }
    }
  }
}

}  // namespace hybridrec
