#include <gtest/gtest.h>

#include <map>
#include <cmath>
#include <numeric>
#include <random>

#include "hybridrec/recommender.hpp"
#include "oracle.hpp"

using namespace hybridrec;

namespace {

std::vector<std::string> ids(const RecommendationList& list) { return list.ids(); }

/// Target t, neighbors v1 (owns p1, p2) and v2 (owns p2).
struct CfFixture {
  Corpus corpus;
  std::unique_ptr<SimilarityIndex> index;

  explicit CfFixture(std::vector<Purchase> target_purchases = {{"t", "p3"}}) {
    CorpusTables t;
    t.products = {{"p1", "s1", {"A", "X"}}, {"p2", "s1", {"A", "Y"}},
                  {"p3", "s2", {"B"}},      {"p4", "s2", {}}};
    t.purchases = {{"v1", "p1"}, {"v1", "p2"}, {"v2", "p2"}};
    for (auto& p : target_purchases) t.purchases.push_back(std::move(p));
    corpus = Corpus(std::move(t));
    index = std::make_unique<SimilarityIndex>(corpus);
  }

  SimilarityMatrixSlice slice(std::vector<std::pair<std::string, double>> neighbors) const {
    SimilarityMatrixSlice s{"t", {}};
    for (const auto& [user, sim] : neighbors) {
      s.scored.push_back({static_cast<VertexIndex>(*corpus.user_index(user)), user, sim});
    }
    return s;
  }
};

/// Fixed-list recommender for hybrid tests.
class ListRecommender final : public Recommender {
 public:
  ListRecommender(std::string id, std::vector<ScoredItem> items)
      : id_(std::move(id)), items_(std::move(items)) {}
  const std::string& id() const override { return id_; }
  RecommendationList recommend(const UserId& target, Task task, std::size_t n) const override {
    return {target, task, rank_items(items_, n)};
  }

 private:
  std::string id_;
  std::vector<ScoredItem> items_;
};

std::vector<ScoredItem> random_items(std::mt19937& rng, std::size_t pool, std::size_t count) {
  std::vector<ScoredItem> items;
  std::vector<std::size_t> order(pool);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::uniform_int_distribution<int> coarse(0, 6);  // coarse scores force ties
  std::uniform_real_distribution<double> fine(0.0, 5.0);
  const bool use_coarse = rng() % 2 == 0;
  for (std::size_t i = 0; i < count && i < pool; ++i) {
    items.push_back({oracle::name("x", order[i]),
                     use_coarse ? static_cast<double>(coarse(rng)) : fine(rng)});
  }
  return items;
}

}  // namespace

TEST(MostPopular, RanksByPurchaseRows) {
  CorpusTables t;
  t.products = {{"p1", "s", {"A"}}, {"p2", "s", {"B"}}};
  t.purchases = {{"a", "p1"}, {"b", "p1"}, {"c", "p1"}, {"d", "p2"}};
  const MostPopular mp{Corpus(t)};
  const auto list = mp.recommend("z", Task::products, 2);
  ASSERT_EQ(list.items.size(), 2u);
  EXPECT_EQ(list.items[0], (ScoredItem{"p1", 3.0}));
  EXPECT_EQ(list.items[1], (ScoredItem{"p2", 1.0}));

  const auto mine = mp.recommend("a", Task::products, 2);
  ASSERT_EQ(mine.items.size(), 1u);
  EXPECT_EQ(mine.items[0], (ScoredItem{"p2", 1.0}));
}

TEST(MostPopular, CategoryCountsMatchRecount) {
  const auto tables = oracle::random_tables(21, {.users = 80, .purchases = 500});
  const Corpus corpus(tables);
  const MostPopular mp(corpus);
  std::map<std::string, std::size_t> top, low, products;
  for (const auto& row : tables.purchases) {
    const auto* p = oracle::product(tables, row.product);
    ++products[p->id];
    if (!p->category_path.empty()) {
      ++top[p->category_path.front()];
      ++low[p->category_path.back()];
    }
  }
  for (const auto& [c, n] : top) EXPECT_EQ(mp.count(Task::top_categories, c), n);
  for (const auto& [c, n] : low) EXPECT_EQ(mp.count(Task::low_categories, c), n);
  for (const auto& [p, n] : products) EXPECT_EQ(mp.count(Task::products, p), n);

  const auto list = mp.recommend("nobody", Task::low_categories, 100);
  EXPECT_EQ(list.items.size(), low.size());
  for (std::size_t i = 1; i < list.items.size(); ++i) {
    const auto& a = list.items[i - 1];
    const auto& b = list.items[i];
    EXPECT_TRUE(a.score > b.score || (a.score == b.score && a.id < b.id));
  }
}

TEST(CfProducts, SummedNeighborSimilarity) {
  const CfFixture f;
  const auto list = cf_products(*f.index, f.slice({{"v1", 0.5}, {"v2", 0.3}}), 10);
  ASSERT_EQ(list.items.size(), 2u);
  EXPECT_EQ(list.items[0].id, "p2");
  EXPECT_NEAR(list.items[0].score, 0.8, 1e-12);
  EXPECT_EQ(list.items[1].id, "p1");
  EXPECT_NEAR(list.items[1].score, 0.5, 1e-12);
}

TEST(CfProducts, ExcludesOwnedItems) {
  const CfFixture f(std::vector<Purchase>{{"t", "p2"}});
  const auto list = cf_products(*f.index, f.slice({{"v1", 0.5}, {"v2", 0.3}}), 10);
  ASSERT_EQ(list.items.size(), 1u);
  EXPECT_EQ(list.items[0].id, "p1");
  EXPECT_NEAR(list.items[0].score, 0.5, 1e-12);
}

TEST(CfProducts, EmptySliceEmptyList) {
  const CfFixture f;
  EXPECT_TRUE(cf_products(*f.index, f.slice({}), 10).empty());
  EXPECT_TRUE(cf_categories(*f.index, f.slice({}), CategoryLevel::top, 10).empty());
}

TEST(CfProducts, MonotoneInNeighbors) {
  const auto tables = oracle::random_tables(5, {.users = 40, .purchases = 250});
  const Corpus corpus(tables);
  const SimilarityIndex index(corpus);
  const auto spec = FeatureSpec::parse("mp.sellers.jaccard");
  for (const auto& u : corpus.users()) {
    const auto full = index.k_nearest(spec, u, 40);
    SimilarityMatrixSlice partial{u, {}};
    std::map<std::string, double> previous;
    for (const auto& neighbor : full.scored) {
      partial.scored.push_back(neighbor);
      std::map<std::string, double> now;
      for (const auto& item : cf_product_candidates(index, partial)) now[item.id] = item.score;
      for (const auto& [item, score] : previous) EXPECT_GE(now[item], score - 1e-12);
      previous = std::move(now);
    }
  }
}

TEST(CfCategories, FrequencyOverCandidatePool) {
  // Candidates p1 (A / X) and p2 (A / Y); p3 is owned.
  const CfFixture f;
  const auto slice = f.slice({{"v1", 0.5}, {"v2", 0.3}});
  const auto top = cf_categories(*f.index, slice, CategoryLevel::top, 10);
  ASSERT_EQ(top.items.size(), 1u);
  EXPECT_EQ(top.items[0].id, "A");
  EXPECT_DOUBLE_EQ(top.items[0].score, 1.0);
  const auto low = cf_categories(*f.index, slice, CategoryLevel::low, 10);
  EXPECT_EQ(ids(low), (std::vector<std::string>{"X", "Y"}));
  EXPECT_DOUBLE_EQ(low.items[0].score, 0.5);
}

TEST(CfCategories, TwoThirdsOneThird) {
  CorpusTables t;
  t.products = {{"p1", "s", {"A"}}, {"p2", "s", {"A", "Q"}}, {"p3", "s", {"B"}}, {"p4", "s", {}},
                {"p0", "s", {}}};
  t.purchases = {{"v", "p1"}, {"v", "p2"}, {"v", "p3"}, {"v", "p4"}, {"t", "p0"}};
  const Corpus corpus(t);
  const SimilarityIndex index(corpus);
  const SimilarityMatrixSlice slice{"t", {{static_cast<VertexIndex>(*corpus.user_index("v")), "v", 1.0}}};
  const auto list = cf_categories(index, slice, CategoryLevel::top, 10);
  ASSERT_EQ(list.items.size(), 2u);
  EXPECT_EQ(list.items[0].id, "A");
  EXPECT_NEAR(list.items[0].score, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(list.items[1].id, "B");
  EXPECT_NEAR(list.items[1].score, 1.0 / 3.0, 1e-12);
}

TEST(CfCategories, AllUncategorizedGivesEmpty) {
  CorpusTables t;
  t.products = {{"p1", "s", {}}, {"p2", "s", {}}};
  t.purchases = {{"v", "p1"}, {"t", "p2"}};
  const Corpus corpus(t);
  const SimilarityIndex index(corpus);
  const SimilarityMatrixSlice slice{"t", {{static_cast<VertexIndex>(*corpus.user_index("v")), "v", 1.0}}};
  EXPECT_TRUE(cf_categories(index, slice, CategoryLevel::low, 10).empty());
}

TEST(CfCategories, ScoresSumToOne) {
  const auto tables = oracle::random_tables(8, {.users = 50, .purchases = 300});
  const Corpus corpus(tables);
  const SimilarityIndex index(corpus);
  const auto spec = FeatureSpec::parse("mp.categories.jaccard");
  for (const auto& u : corpus.users()) {
    const auto slice = index.k_nearest(spec, u, 40);
    for (const auto level : {CategoryLevel::top, CategoryLevel::low}) {
      const auto list = cf_categories(index, slice, level, 1000);
      if (list.empty()) continue;
      double sum = 0.0;
      for (const auto& item : list.items) sum += item.score;
      EXPECT_NEAR(sum, 1.0, 1e-9);
    }
  }
}

TEST(Normalize, MinMax) {
  RecommendationList list{"u", Task::products, {{"a", 4}, {"b", 2}, {"c", 0}}};
  const auto n = normalize_scores(list);
  EXPECT_EQ(ids(n), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_DOUBLE_EQ(n.items[0].score, 1.0);
  EXPECT_DOUBLE_EQ(n.items[1].score, 0.5);
  EXPECT_DOUBLE_EQ(n.items[2].score, 0.0);

  const auto flat = normalize_scores({"u", Task::products, {{"a", 3}, {"b", 3}}});
  EXPECT_DOUBLE_EQ(flat.items[0].score, 1.0);
  EXPECT_DOUBLE_EQ(flat.items[1].score, 1.0);

  EXPECT_TRUE(normalize_scores({"u", Task::products, {}}).empty());
}

TEST(WeightedSum, Examples) {
  std::map<std::string, RecommendationList> lists{
      {"A", {"u", Task::products, {{"x", 1.0}}}}, {"B", {"u", Task::products, {{"y", 1.0}}}}};
  const auto out = weighted_sum_hybrid(lists, {{"A", 0.2}, {"B", 0.1}}, 10);
  ASSERT_EQ(out.items.size(), 2u);
  EXPECT_EQ(out.items[0].id, "x");
  EXPECT_NEAR(out.items[0].score, 0.2, 1e-12);
  EXPECT_EQ(out.items[1].id, "y");
  EXPECT_NEAR(out.items[1].score, 0.1, 1e-12);

  lists["B"] = {"u", Task::products, {{"x", 0.5}}};
  const auto both = weighted_sum_hybrid(lists, {{"A", 0.2}, {"B", 0.1}}, 10);
  ASSERT_EQ(both.items.size(), 1u);
  EXPECT_NEAR(both.items[0].score, 0.25, 1e-12);

  std::map<std::string, RecommendationList> empty{{"A", {"u", Task::products, {}}}};
  EXPECT_TRUE(weighted_sum_hybrid(empty, {{"A", 1.0}}, 10).empty());
}

TEST(WeightedSum, MissingWeightCountsZero) {
  std::map<std::string, RecommendationList> lists{
      {"A", {"u", Task::products, {{"x", 1.0}}}}, {"B", {"u", Task::products, {{"y", 1.0}}}}};
  const auto out = weighted_sum_hybrid(lists, {{"A", 0.3}}, 10);
  EXPECT_EQ(ids(out), (std::vector<std::string>{"x"}));
}

TEST(DeriveWeights, CopiesNdcg) {
  const auto w = derive_hybrid_weights({{"sn.graph.no", 0.1434}, {"mp.sellers.jaccard", 0.0158}});
  EXPECT_DOUBLE_EQ(w.at("sn.graph.no"), 0.1434);
  EXPECT_DOUBLE_EQ(w.at("mp.sellers.jaccard"), 0.0158);
  EXPECT_DOUBLE_EQ(derive_hybrid_weights({{"a", 0.5}}).at("a"), 0.5);
  const auto zero = derive_hybrid_weights({{"a", 0.5}, {"b", 0.0}});
  EXPECT_DOUBLE_EQ(zero.at("b"), 0.0);
  EXPECT_THROW(derive_hybrid_weights({{"a", 0.0}, {"b", 0.0}}), std::runtime_error);
  try {
    derive_hybrid_weights({{"a", 0.0}});
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("no informative component"), std::string::npos);
  }
}

TEST(HybridLaws, SingleComponentAndWeightScaling) {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> weight(0.01, 1.0);
  std::uniform_real_distribution<double> log_scale(-6.0, 6.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    auto a = std::make_shared<ListRecommender>("a", random_items(rng, 25, 1 + rng() % 15));
    auto b = std::make_shared<ListRecommender>("b", random_items(rng, 25, rng() % 15));
    auto c = std::make_shared<ListRecommender>("c", random_items(rng, 25, rng() % 15));

    const WeightedSumRecommender single("h", {a}, {{Task::products, {{"a", weight(rng)}}}});
    EXPECT_EQ(ids(single.recommend("u", Task::products, n)),
              ids(a->recommend("u", Task::products, n)));

    HybridWeights w{{"a", weight(rng)}, {"b", weight(rng)}, {"c", weight(rng)}};
    const double factor = std::pow(10.0, log_scale(rng));
    HybridWeights scaled;
    for (const auto& [k, v] : w) scaled[k] = v * factor;
    const WeightedSumRecommender h1("h", {a, b, c}, {{Task::products, w}});
    const WeightedSumRecommender h2("h", {a, b, c}, {{Task::products, scaled}});
    EXPECT_EQ(ids(h1.recommend("u", Task::products, n)), ids(h2.recommend("u", Task::products, n)));
  }
}

TEST(ProductLists, NeverContainTrainingPurchases) {
  const auto tables = oracle::random_tables(31, {.users = 40, .purchases = 300});
  const Corpus corpus(tables);
  const SimilarityIndex index(corpus);
  const auto owned = oracle::profiles(tables, "purchases");
  auto mp = std::make_shared<MostPopularRecommender>(corpus);
  auto cf = std::make_shared<CfRecommender>(index, FeatureSpec::parse("sn.graph.cn"));
  const WeightedSumRecommender hybrid("h", {mp, cf},
                                      {{Task::products, {{"most_popular", 0.1}, {"sn.graph.cn", 0.4}}}});
  for (const auto& u : corpus.users()) {
    const auto mine = oracle::get(owned, u);
    for (const Recommender* r : {static_cast<const Recommender*>(mp.get()),
                                 static_cast<const Recommender*>(cf.get()),
                                 static_cast<const Recommender*>(&hybrid)}) {
      const auto list = r->recommend(u, Task::products, 10);
      EXPECT_LE(list.items.size(), 10u);
      for (const auto& item : list.items) EXPECT_FALSE(mine.count(item.id)) << r->id() << " " << u;
    }
  }
}
