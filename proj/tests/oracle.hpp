#pragma once

// Brute-force reference implementations used by the tests. Everything here
// works on the raw tables with std::set / std::map and shares no code with
// the library beyond the plain data types.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hybridrec/corpus.hpp"

namespace oracle {

using hybridrec::CorpusTables;
using StrSet = std::set<std::string>;
using Adjacency = std::map<std::string, StrSet>;

inline std::string name(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%03zu", prefix, i);
  return buf;
}

struct RandomCorpusOptions {
  std::size_t users = 60;
  std::size_t products = 40;
  std::size_t purchases = 300;
  std::size_t social = 150;
  std::size_t memberships = 120;
  std::size_t interests = 80;
  std::size_t locations = 120;
  std::size_t events = 12;
};

/// Small id pools so that overlaps, ties and isolated users all occur.
inline CorpusTables random_tables(std::uint32_t seed, const RandomCorpusOptions& o = {}) {
  std::mt19937 rng(seed);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  const char* categories[] = {"A", "B", "C", "D", "E", "F", "G"};
  CorpusTables t;
  for (std::size_t p = 0; p < o.products; ++p) {
    hybridrec::Product product{name("p", p), name("s", pick(6)), {}};
    const std::size_t depth = pick(5);
    std::vector<std::string> pool(std::begin(categories), std::end(categories));
    std::shuffle(pool.begin(), pool.end(), rng);
    product.category_path.assign(pool.begin(), pool.begin() + depth);
    t.products.push_back(product);
  }
  for (std::size_t i = 0; i < o.purchases; ++i) {
    t.purchases.push_back({name("u", pick(o.users)), name("p", pick(o.products))});
  }
  const hybridrec::SocialKind kinds[] = {hybridrec::SocialKind::love, hybridrec::SocialKind::comment,
                                         hybridrec::SocialKind::wallpost};
  for (std::size_t i = 0; i < o.social; ++i) {
    const auto a = pick(o.users);
    const auto b = pick(o.users);
    if (a == b) continue;
    t.social.push_back({name("u", a), name("u", b), kinds[pick(3)]});
  }
  for (std::size_t i = 0; i < o.memberships; ++i) {
    t.memberships.push_back({name("u", pick(o.users)), name("g", pick(15))});
  }
  for (std::size_t i = 0; i < o.interests; ++i) {
    t.interests.push_back({name("u", pick(o.users)), name("i", pick(10))});
  }
  for (std::size_t i = 0; i < o.locations; ++i) {
    const auto user = name("u", pick(o.users));
    switch (pick(3)) {
      case 0:
        t.locations.push_back({user, name("lf", pick(12)), hybridrec::LocationKind::favored, {}});
        break;
      case 1:
        t.locations.push_back({user, name("ls", pick(8)), hybridrec::LocationKind::shared, {}});
        break;
      default: {
        const auto e = pick(o.events);
        t.locations.push_back(
            {user, name("lm", e % 4), hybridrec::LocationKind::monitored, name("e", e)});
      }
    }
  }
  return t;
}

inline const hybridrec::Product* product(const CorpusTables& t, const std::string& id) {
  for (const auto& p : t.products) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

/// Delta(u) by entity kind name: purchases, sellers, categories, groups,
/// interests, favored, shared, monitored.
inline std::map<std::string, StrSet> profiles(const CorpusTables& t, const std::string& kind) {
  std::map<std::string, StrSet> out;
  if (kind == "purchases" || kind == "sellers" || kind == "categories") {
    for (const auto& row : t.purchases) {
      const auto* p = product(t, row.product);
      if (kind == "purchases") out[row.buyer].insert(p->id);
      if (kind == "sellers") out[row.buyer].insert(p->seller);
      if (kind == "categories") {
        for (const auto& c : p->category_path) out[row.buyer].insert(c);
      }
    }
  } else if (kind == "groups") {
    for (const auto& m : t.memberships) out[m.user].insert(m.group);
  } else if (kind == "interests") {
    for (const auto& i : t.interests) out[i.user].insert(i.interest);
  } else {
    for (const auto& l : t.locations) {
      if (std::string(hybridrec::to_string(l.kind)) == kind) out[l.user].insert(l.location);
    }
  }
  return out;
}

inline Adjacency social_adjacency(const CorpusTables& t) {
  Adjacency g;
  for (const auto& s : t.social) {
    g[s.actor].insert(s.target);
    g[s.target].insert(s.actor);
  }
  return g;
}

inline std::map<std::pair<std::string, std::string>, std::size_t> social_weights(
    const CorpusTables& t) {
  std::map<std::pair<std::string, std::string>, std::size_t> w;
  for (const auto& s : t.social) ++w[std::minmax(s.actor, s.target)];
  return w;
}

/// Pair weight = number of events both users attended.
inline std::map<std::pair<std::string, std::string>, std::size_t> colocation_weights(
    const CorpusTables& t) {
  std::map<std::string, StrSet> attendees;
  for (const auto& l : t.locations) {
    if (l.kind == hybridrec::LocationKind::monitored) attendees[*l.event].insert(l.user);
  }
  std::set<std::string> users;
  for (const auto& [e, a] : attendees) users.insert(a.begin(), a.end());
  std::map<std::pair<std::string, std::string>, std::size_t> w;
  for (const auto& u : users) {
    for (const auto& v : users) {
      if (!(u < v)) continue;
      std::size_t both = 0;
      for (const auto& [e, a] : attendees) both += a.count(u) && a.count(v);
      if (both) w[{u, v}] = both;
    }
  }
  return w;
}

inline Adjacency colocation_adjacency(const CorpusTables& t) {
  Adjacency g;
  for (const auto& [pair, w] : colocation_weights(t)) {
    g[pair.first].insert(pair.second);
    g[pair.second].insert(pair.first);
  }
  return g;
}

inline StrSet get(const std::map<std::string, StrSet>& m, const std::string& key) {
  const auto it = m.find(key);
  return it == m.end() ? StrSet{} : it->second;
}

inline StrSet intersection(const StrSet& a, const StrSet& b) {
  StrSet out;
  for (const auto& x : a) {
    if (b.count(x)) out.insert(x);
  }
  return out;
}

inline StrSet set_union(StrSet a, const StrSet& b) {
  a.insert(b.begin(), b.end());
  return a;
}

inline std::size_t directed(const CorpusTables& t, const std::string& u, const std::string& v) {
  std::size_t n = 0;
  for (const auto& s : t.social) n += s.actor == u && s.target == v;
  return n;
}

/// Feature value by name on plain sets. Content names: common, total,
/// jaccard. Network names: cn, jaccard_n, aa, no, pa.
inline double content(const std::string& feature, const StrSet& a, const StrSet& b) {
  const double common = static_cast<double>(intersection(a, b).size());
  const double total = static_cast<double>(set_union(a, b).size());
  if (feature == "common") return common;
  if (feature == "total") return total;
  return total == 0 ? 0.0 : common / total;
}

inline double network(const std::string& feature, const Adjacency& g, const std::string& u,
                      const std::string& v) {
  const auto gu = get(g, u);
  const auto gv = get(g, v);
  const auto shared = intersection(gu, gv);
  if (feature == "cn") return static_cast<double>(shared.size());
  if (feature == "jaccard") {
    const auto all = set_union(gu, gv);
    return all.empty() ? 0.0 : static_cast<double>(shared.size()) / static_cast<double>(all.size());
  }
  if (feature == "aa") {
    double sum = 0.0;
    for (const auto& z : shared) {
      const auto d = get(g, z).size();
      if (d > 1) sum += 1.0 / std::log(static_cast<double>(d));
    }
    return sum;
  }
  if (feature == "no") {
    const auto deg = gu.size() + gv.size();
    return deg == 0 ? 0.0 : static_cast<double>(shared.size()) / static_cast<double>(deg);
  }
  return static_cast<double>(gu.size() * gv.size());  // pa
}

/// Similarity for a feature id such as `mp.sellers.jaccard` or `sn.graph.aa`.
/// `symmetric` selects the neighborhood reading of directed interactions.
struct Features {
  const CorpusTables& t;
  std::map<std::string, std::map<std::string, StrSet>> profile_cache;
  Adjacency social;
  Adjacency colocation;

  explicit Features(const CorpusTables& tables)
      : t(tables), social(social_adjacency(tables)), colocation(colocation_adjacency(tables)) {}

  static std::vector<std::string> split_id(const std::string& id) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t dot; (dot = id.find('.', start)) != std::string::npos; start = dot + 1) {
      parts.push_back(id.substr(start, dot - start));
    }
    parts.push_back(id.substr(start));
    return parts;
  }

  const std::map<std::string, StrSet>& profile(const std::string& kind) {
    auto it = profile_cache.find(kind);
    if (it == profile_cache.end()) it = profile_cache.emplace(kind, profiles(t, kind)).first;
    return it->second;
  }

  double value(const std::string& id, const std::string& u, const std::string& v,
               bool symmetric = false) {
    const auto parts = split_id(id);
    if (parts[1] == "graph") {
      if (parts[2] == "directed") {
        const auto uv = directed(t, u, v);
        return static_cast<double>(symmetric ? std::max(uv, directed(t, v, u)) : uv);
      }
      return network(parts[2], parts[0] == "sn" ? social : colocation, u, v);
    }
    const auto& p = profile(parts[1]);
    return content(parts[2], get(p, u), get(p, v));
  }

  bool has_data(const std::string& id, const std::string& u) {
    const auto parts = split_id(id);
    if (parts[1] == "graph") return !get(parts[0] == "sn" ? social : colocation, u).empty();
    return !get(profile(parts[1]), u).empty();
  }
};

struct Neighbor {
  std::string user;
  double sim;
};

/// Exhaustive all-pairs k-NN: positive similarity, both users carrying data
/// for the feature's source, descending similarity, ascending id.
inline std::vector<Neighbor> k_nearest(Features& f, const std::vector<std::string>& universe,
                                       const std::string& id, const std::string& target,
                                       std::size_t k) {
  std::vector<Neighbor> all;
  if (!f.has_data(id, target)) return all;
  for (const auto& v : universe) {
    if (v == target || !f.has_data(id, v)) continue;
    const double s = f.value(id, target, v, true);
    if (s > 0) all.push_back({v, s});
  }
  std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.sim != b.sim ? a.sim > b.sim : a.user < b.user;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

/// Neighbor-item double loop: pred(u, i) = sum of sim over neighbors owning
/// i, for items the target does not own. Sorted by score, then id.
inline std::vector<std::pair<std::string, double>> cf_products(
    const CorpusTables& t, const std::string& target, const std::vector<Neighbor>& neighbors,
    std::size_t n) {
  const auto owned = profiles(t, "purchases");
  const auto mine = get(owned, target);
  std::vector<std::pair<std::string, double>> scored;
  for (const auto& p : t.products) {
    if (mine.count(p.id)) continue;
    double score = 0.0;
    bool any = false;
    for (const auto& nb : neighbors) {
      if (get(owned, nb.user).count(p.id)) {
        score += nb.sim;
        any = true;
      }
    }
    if (any) scored.emplace_back(p.id, score);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (scored.size() > n) scored.resize(n);
  return scored;
}

// Naive per-user metrics.
inline double recall(const std::vector<std::string>& list, const StrSet& rel, std::size_t k) {
  if (rel.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < list.size() && i < k; ++i) hits += rel.count(list[i]);
  return static_cast<double>(hits) / static_cast<double>(rel.size());
}

inline double precision(const std::vector<std::string>& list, const StrSet& rel, std::size_t k) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < list.size() && i < k; ++i) hits += rel.count(list[i]);
  return static_cast<double>(hits) / static_cast<double>(k);
}

inline double ndcg(const std::vector<std::string>& list, const StrSet& rel, std::size_t k) {
  double dcg = 0.0;
  double idcg = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double gain = 1.0 / std::log2(static_cast<double>(i) + 2.0);
    if (i < list.size() && rel.count(list[i])) dcg += gain;
    if (i < rel.size()) idcg += gain;
  }
  return idcg == 0.0 ? 0.0 : dcg / idcg;
}

inline double path_distance(const CorpusTables& t, const std::string& a, const std::string& b) {
  if (a == b) return 0.0;
  const auto* pa = product(t, a);
  const auto* pb = product(t, b);
  const StrSet sa(pa->category_path.begin(), pa->category_path.end());
  const StrSet sb(pb->category_path.begin(), pb->category_path.end());
  const auto all = set_union(sa, sb);
  if (all.empty()) return 1.0;
  return 1.0 - static_cast<double>(intersection(sa, sb).size()) / static_cast<double>(all.size());
}

inline double diversity(const CorpusTables& t, const std::vector<std::string>& list,
                        std::size_t k) {
  const std::size_t m = std::min(list.size(), k);
  if (m < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j) sum += path_distance(t, list[i], list[j]);
    }
  }
  return sum / static_cast<double>(m * (m - 1));
}

}  // namespace oracle
