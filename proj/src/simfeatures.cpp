#include "hybridrec/simfeatures.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <utility>

namespace hybridrec {

namespace {

struct ContentSource {
  std::string_view prefix;
  Source source;
  EntityKind kind;
};

constexpr std::array<ContentSource, 8> kContentSources{{
    {"mp.purchases", Source::marketplace, EntityKind::purchases},
    {"mp.sellers", Source::marketplace, EntityKind::sellers},
    {"mp.categories", Source::marketplace, EntityKind::categories},
    {"sn.groups", Source::social, EntityKind::groups},
    {"sn.interests", Source::social, EntityKind::interests},
    {"loc.favored", Source::location, EntityKind::favored_locations},
    {"loc.shared", Source::location, EntityKind::shared_locations},
    {"loc.monitored", Source::location, EntityKind::monitored_locations},
}};

constexpr std::array<std::pair<std::string_view, Feature>, 3> kContentFeatures{{
    {"common", Feature::common_entities},
    {"total", Feature::total_entities},
    {"jaccard", Feature::jaccard_entities},
}};

constexpr std::array<std::pair<std::string_view, Feature>, 6> kNetworkFeatures{{
    {"directed", Feature::directed_interactions},
    {"cn", Feature::common_neighbors},
    {"jaccard", Feature::jaccard_neighbors},
    {"aa", Feature::adamic_adar},
    {"no", Feature::neighborhood_overlap},
    {"pa", Feature::preferential_attachment},
}};

std::string_view source_prefix(Source s) {
  switch (s) {
    case Source::marketplace: return "mp";
    case Source::social: return "sn";
    case Source::location: return "loc";
  }
  return "?";
}

double inverse_log_degree(std::size_t degree) {
  return degree > 1 ? 1.0 / std::log(static_cast<double>(degree)) : 0.0;
}

}  // namespace

FeatureSpec FeatureSpec::parse(std::string_view id) {
  const auto last_dot = id.rfind('.');
  if (last_dot == std::string_view::npos) throw UnknownFeature(std::string(id));
  const auto prefix = id.substr(0, last_dot);
  const auto name = id.substr(last_dot + 1);

  for (const auto& cs : kContentSources) {
    if (cs.prefix != prefix) continue;
    for (const auto& [fname, feature] : kContentFeatures) {
      if (fname == name) {
        FeatureSpec spec;
        spec.source = cs.source;
        spec.family = Family::content;
        spec.feature = feature;
        spec.entity_kind = cs.kind;
        return spec;
      }
    }
  }
  const bool social = prefix == "sn.graph";
  if (social || prefix == "loc.graph") {
    for (const auto& [fname, feature] : kNetworkFeatures) {
      if (fname != name) continue;
      // Directed interactions exist only in the social network.
      if (feature == Feature::directed_interactions && !social) break;
      FeatureSpec spec;
      spec.source = social ? Source::social : Source::location;
      spec.family = Family::network;
      spec.feature = feature;
      spec.graph = social ? GraphKind::social : GraphKind::colocation;
      return spec;
    }
  }
  throw UnknownFeature(std::string(id));
}

std::string FeatureSpec::id() const {
  if (family == Family::content) {
    for (const auto& cs : kContentSources) {
      if (cs.kind != entity_kind) continue;
      for (const auto& [fname, f] : kContentFeatures) {
        if (f == feature) return std::string(cs.prefix) + "." + std::string(fname);
      }
    }
  } else {
    for (const auto& [fname, f] : kNetworkFeatures) {
      if (f == feature) {
        return std::string(graph == GraphKind::social ? "sn" : "loc") + ".graph." +
               std::string(fname);
      }
    }
  }
  return std::string(source_prefix(source)) + ".?";
}

const std::vector<std::string>& all_feature_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    auto add_content = [&](std::string_view prefix) {
      for (const auto& [name, f] : kContentFeatures) {
        out.push_back(std::string(prefix) + "." + std::string(name));
      }
    };
    add_content("mp.purchases");
    add_content("mp.sellers");
    add_content("mp.categories");
    add_content("sn.groups");
    add_content("sn.interests");
    for (const auto& [name, f] : kNetworkFeatures) out.push_back("sn.graph." + std::string(name));
    add_content("loc.favored");
    add_content("loc.shared");
    add_content("loc.monitored");
    for (const auto& [name, f] : kNetworkFeatures) {
      if (f != Feature::directed_interactions) out.push_back("loc.graph." + std::string(name));
    }
    return out;
  }();
  return ids;
}

std::size_t common_neighbors(const InteractionGraph& g, VertexIndex u, VertexIndex v) {
  return common_entities(g.neighbors(u), g.neighbors(v));
}

double jaccard_neighbors(const InteractionGraph& g, VertexIndex u, VertexIndex v) {
  return jaccard_entities(g.neighbors(u), g.neighbors(v));
}

double adamic_adar(const InteractionGraph& g, VertexIndex u, VertexIndex v) {
  const auto a = g.neighbors(u);
  const auto b = g.neighbors(v);
  double sum = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      sum += inverse_log_degree(g.degree(a[i]));
      ++i;
      ++j;
    }
  }
  return sum;
}

double neighborhood_overlap(const InteractionGraph& g, VertexIndex u, VertexIndex v) {
  const auto denom = g.degree(u) + g.degree(v);
  if (denom == 0) return 0.0;
  return static_cast<double>(common_neighbors(g, u, v)) / static_cast<double>(denom);
}

std::size_t preferential_attachment(const InteractionGraph& g, VertexIndex u, VertexIndex v) {
  return g.degree(u) * g.degree(v);
}

std::size_t directed_interactions(const Corpus& corpus, std::string_view u, std::string_view v) {
  return static_cast<std::size_t>(std::count_if(
      corpus.social().begin(), corpus.social().end(),
      [&](const SocialInteraction& s) { return s.actor == u && s.target == v; }));
}

DenseProfiles make_dense_profiles(const Corpus& corpus, EntityKind kind) {
  const ProfileMap profiles = build_entity_profiles(corpus, kind);
  DenseProfiles dense;
  std::set<std::string> names;
  for (const auto& [user, profile] : profiles) names.insert(profile.entities.begin(), profile.entities.end());
  dense.entities.assign(names.begin(), names.end());
  dense.holders.resize(dense.entities.size());
  dense.by_user.resize(corpus.users().size());

  std::map<std::string_view, std::uint32_t> lookup;
  for (std::uint32_t i = 0; i < dense.entities.size(); ++i) lookup.emplace(dense.entities[i], i);

  // ProfileMap iterates users in the same sorted order as corpus.users().
  VertexIndex u = 0;
  for (const auto& [user, profile] : profiles) {
    auto& row = dense.by_user[u];
    row.reserve(profile.entities.size());
    for (const auto& e : profile.entities) {
      const auto idx = lookup.at(e);
      row.push_back(idx);  // sorted: set order == name order == index order
      dense.holders[idx].push_back(u);
    }
    ++u;
  }
  return dense;
}

SimilarityIndex::SimilarityIndex(const Corpus& corpus)
    : corpus_(&corpus),
      social_(build_social_graph(corpus)),
      colocation_(build_colocation_graph(corpus)),
      outgoing_(corpus.users().size()) {
  for (const auto kind : kAllEntityKinds) profiles_.push_back(make_dense_profiles(corpus, kind));

  std::map<std::pair<VertexIndex, VertexIndex>, std::uint32_t> counts;
  for (const auto& s : corpus.social()) {
    ++counts[{static_cast<VertexIndex>(*corpus.user_index(s.actor)),
              static_cast<VertexIndex>(*corpus.user_index(s.target))}];
  }
  for (const auto& [key, n] : counts) outgoing_[key.first].emplace_back(key.second, n);
}

std::uint32_t SimilarityIndex::directed_count(VertexIndex actor, VertexIndex target) const {
  const auto& out = outgoing_[actor];
  const auto it = std::lower_bound(out.begin(), out.end(), std::make_pair(target, std::uint32_t{0}));
  return it != out.end() && it->first == target ? it->second : 0;
}

double SimilarityIndex::similarity(const FeatureSpec& f, VertexIndex u, VertexIndex v) const {
  if (f.family == Family::content) {
    const auto& p = profiles(f.entity_kind).by_user;
    switch (f.feature) {
      case Feature::common_entities: return static_cast<double>(common_entities(p[u], p[v]));
      case Feature::total_entities: return static_cast<double>(total_entities(p[u], p[v]));
      case Feature::jaccard_entities: return jaccard_entities(p[u], p[v]);
      default: break;
    }
    throw UnknownFeature(f.id());
  }
  const auto& g = graph(f.graph);
  switch (f.feature) {
    case Feature::directed_interactions: return directed_count(u, v);
    case Feature::common_neighbors: return static_cast<double>(common_neighbors(g, u, v));
    case Feature::jaccard_neighbors: return jaccard_neighbors(g, u, v);
    case Feature::adamic_adar: return adamic_adar(g, u, v);
    case Feature::neighborhood_overlap: return neighborhood_overlap(g, u, v);
    case Feature::preferential_attachment:
      return static_cast<double>(preferential_attachment(g, u, v));
    default: break;
  }
  throw UnknownFeature(f.id());
}

double SimilarityIndex::neighborhood_similarity(const FeatureSpec& f, VertexIndex u,
                                                VertexIndex v) const {
  if (f.feature == Feature::directed_interactions) {
    return std::max(directed_count(u, v), directed_count(v, u));
  }
  return similarity(f, u, v);
}

bool SimilarityIndex::has_data(const FeatureSpec& f, VertexIndex u) const {
  if (f.family == Family::content) return !profiles(f.entity_kind).by_user[u].empty();
  return graph(f.graph).degree(u) > 0;
}

SimilarityMatrixSlice SimilarityIndex::k_nearest(const FeatureSpec& f, std::string_view target,
                                                 std::size_t k) const {
  const auto u = corpus_->user_index(target);
  if (!u) throw UnknownUser(std::string(target));
  return k_nearest(f, static_cast<VertexIndex>(*u), k);
}

SimilarityMatrixSlice SimilarityIndex::k_nearest(const FeatureSpec& f, VertexIndex u,
                                                 std::size_t k) const {
  const auto& users = corpus_->users();
  if (u >= users.size()) throw UnknownUser("#" + std::to_string(u));
  SimilarityMatrixSlice slice{users[u], {}};
  if (k == 0 || !has_data(f, u)) return slice;

  std::vector<std::pair<double, VertexIndex>> candidates;
  auto keep = [&](VertexIndex v, double sim) {
    if (v != u && sim > 0.0) candidates.emplace_back(sim, v);
  };

  // Overlap-based features only need users reachable through a shared entity
  // or a shared neighbor; the accumulators hold |intersection| (and the
  // Adamic/Adar sum) for exactly those users.
  std::vector<std::uint32_t> overlap(users.size(), 0);
  std::vector<double> aa_sum;
  std::vector<VertexIndex> touched;

  switch (f.feature) {
    case Feature::common_entities:
    case Feature::jaccard_entities: {
      const auto& p = profiles(f.entity_kind);
      for (const auto e : p.by_user[u]) {
        for (const auto v : p.holders[e]) {
          if (overlap[v]++ == 0) touched.push_back(v);
        }
      }
      std::sort(touched.begin(), touched.end());
      const double du = static_cast<double>(p.by_user[u].size());
      for (const auto v : touched) {
        const double c = overlap[v];
        if (f.feature == Feature::common_entities) {
          keep(v, c);
        } else {
          keep(v, c / (du + static_cast<double>(p.by_user[v].size()) - c));
        }
      }
      break;
    }
    case Feature::total_entities: {
      const auto& p = profiles(f.entity_kind).by_user;
      for (VertexIndex v = 0; v < users.size(); ++v) {
        if (!p[v].empty()) keep(v, static_cast<double>(total_entities(p[u], p[v])));
      }
      break;
    }
    case Feature::directed_interactions: {
      for (const auto v : social_.neighbors(u)) keep(v, neighborhood_similarity(f, u, v));
      break;
    }
    case Feature::common_neighbors:
    case Feature::jaccard_neighbors:
    case Feature::adamic_adar:
    case Feature::neighborhood_overlap: {
      const auto& g = graph(f.graph);
      const bool adamic = f.feature == Feature::adamic_adar;
      if (adamic) aa_sum.assign(users.size(), 0.0);
      // z ascending, so each Adamic/Adar sum accumulates in the same order as
      // a merge over the two sorted neighbor lists.
      for (const auto z : g.neighbors(u)) {
        const double w = adamic ? inverse_log_degree(g.degree(z)) : 0.0;
        for (const auto v : g.neighbors(z)) {
          if (overlap[v]++ == 0) touched.push_back(v);
          if (adamic) aa_sum[v] += w;
        }
      }
      std::sort(touched.begin(), touched.end());
      const double du = static_cast<double>(g.degree(u));
      for (const auto v : touched) {
        const double c = overlap[v];
        const double dv = static_cast<double>(g.degree(v));
        switch (f.feature) {
          case Feature::common_neighbors: keep(v, c); break;
          case Feature::jaccard_neighbors: keep(v, c / (du + dv - c)); break;
          case Feature::adamic_adar: keep(v, aa_sum[v]); break;
          default: keep(v, c / (du + dv)); break;
        }
      }
      break;
    }
    case Feature::preferential_attachment: {
      const auto& g = graph(f.graph);
      const double du = static_cast<double>(g.degree(u));
      for (VertexIndex v = 0; v < users.size(); ++v) keep(v, du * static_cast<double>(g.degree(v)));
      break;
    }
  }

  auto better = [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  };
  const auto take = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                    candidates.end(), better);
  slice.scored.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    const auto [sim, v] = candidates[i];
    slice.scored.push_back({v, users[v], sim});
  }
  return slice;
}

}  // namespace hybridrec
