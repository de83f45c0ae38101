#include "hybridrec/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "hybridrec/random.hpp"

namespace hybridrec {

namespace {

constexpr std::size_t kSellersPerCluster = 3;
constexpr std::size_t kGroupsPerCluster = 4;
constexpr std::size_t kInterestsPerCluster = 3;
constexpr std::size_t kFavoredPerCluster = 6;
constexpr std::size_t kSharedPerCluster = 4;
constexpr std::size_t kVenuesPerCluster = 3;
constexpr std::size_t kEventsPerCluster = 8;
constexpr std::size_t kMidsPerCluster = 2;
constexpr double kUncategorizedShare = 0.1;
constexpr double kOffTopicShare = 0.2;
constexpr double kRepeatPurchaseShare = 0.05;
// Consumables: niche products outside the popularity draw that a minority of
// users re-buy many times, inflating purchase-row counts.
constexpr std::size_t kConsumablesPerCluster = 2;
constexpr double kConsumerShare = 0.25;
constexpr std::uint64_t kMinConsumableRows = 6;
constexpr std::uint64_t kMaxConsumableRows = 12;

std::string id(const char* prefix, std::size_t a) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%04zu", prefix, a);
  return buf;
}

std::string id(const char* prefix, std::size_t a, std::size_t b) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%02zu_%03zu", prefix, a, b);
  return buf;
}

// Count drawn uniformly from [mean/2, 3*mean/2].
std::size_t around(double mean, Rng& rng) {
  const auto lo = static_cast<std::uint64_t>(std::ceil(mean / 2.0));
  const auto hi = static_cast<std::uint64_t>(std::floor(mean * 1.5));
  return static_cast<std::size_t>(hi <= lo ? lo : rng.between(lo, hi));
}

class Generator {
 public:
  explicit Generator(const SyntheticSpec& spec) : spec_(spec), rng_(spec.seed) {
    members_.resize(spec.clusters);
    social_.resize(spec.users);
    located_.resize(spec.users);
    for (std::size_t u = 0; u < spec.users; ++u) {
      social_[u] = !rng_.chance(spec.dropout);
      located_[u] = !rng_.chance(spec.dropout);
      if (social_[u]) members_[u % spec.clusters].push_back(u);
    }
    top_levels_ = std::max<std::size_t>(2, (spec.clusters + 1) / 2);
    products_per_cluster_ =
        std::max<std::size_t>(12, static_cast<std::size_t>(std::lround(3.0 * spec.purchase_intensity)));
  }

  SyntheticDataset run() {
    for (std::size_t u = 0; u < spec_.users; ++u) {
      data_.user_cluster.emplace(user(u), u % spec_.clusters);
    }
    make_products();
    make_purchases();
    make_social();
    make_memberships();
    make_interests();
    make_locations();
    return std::move(data_);
  }

 private:
  std::string user(std::size_t u) const { return id("u", u); }
  std::size_t catalogue_per_cluster() const { return products_per_cluster_ + kConsumablesPerCluster; }

  // The own cluster, or with probability `noise` a different one.
  std::size_t pick_cluster(std::size_t own) {
    if (spec_.clusters > 1 && rng_.chance(spec_.noise)) {
      const auto other = static_cast<std::size_t>(rng_.index(spec_.clusters - 1));
      return other >= own ? other + 1 : other;
    }
    return own;
  }

  void make_products() {
    for (std::size_t c = 0; c < spec_.clusters; ++c) {
      for (std::size_t j = 0; j < catalogue_per_cluster(); ++j) {
        Product p;
        p.id = id("p", c, j);
        p.seller = id("s", c, static_cast<std::size_t>(rng_.index(kSellersPerCluster)));
        if (!rng_.chance(kUncategorizedShare)) {
          const std::size_t top = rng_.chance(kOffTopicShare)
                                      ? static_cast<std::size_t>(rng_.index(top_levels_))
                                      : c % top_levels_;
          const std::size_t depth = static_cast<std::size_t>(rng_.between(1, kMaxCategoryDepth));
          const std::size_t mid = c * kMidsPerCluster + rng_.index(kMidsPerCluster);
          std::string path = "T" + std::to_string(top);
          p.category_path.push_back(path);
          if (depth >= 2) p.category_path.push_back(path += ".M" + std::to_string(mid));
          if (depth >= 3) p.category_path.push_back(path += ".L" + std::to_string(rng_.index(3)));
          if (depth >= 4) p.category_path.push_back(path += ".S" + std::to_string(rng_.index(2)));
        }
        data_.product_cluster.emplace(p.id, c);
        data_.tables.products.push_back(std::move(p));
      }
    }
    // Popularity decays with rank inside each cluster's catalogue.
    double total = 0.0;
    for (std::size_t j = 0; j < products_per_cluster_; ++j) {
      total += 1.0 / std::pow(static_cast<double>(j) + 1.0, 0.8);
      popularity_cdf_.push_back(total);
    }
    for (auto& x : popularity_cdf_) x /= total;
  }

  std::size_t popular_rank() {
    const double r = rng_.real();
    const auto it = std::upper_bound(popularity_cdf_.begin(), popularity_cdf_.end(), r);
    return std::min<std::size_t>(static_cast<std::size_t>(it - popularity_cdf_.begin()),
                                 products_per_cluster_ - 1);
  }

  void make_purchases() {
    for (std::size_t u = 0; u < spec_.users; ++u) {
      const std::size_t own = u % spec_.clusters;
      const std::size_t rows = around(spec_.purchase_intensity, rng_);
      std::set<std::size_t> bought;
      std::vector<std::size_t> order;
      for (std::size_t r = 0; r < rows; ++r) {
        if (!order.empty() && rng_.chance(kRepeatPurchaseShare)) {
          order.push_back(order[rng_.index(order.size())]);
          continue;
        }
        for (int attempt = 0; attempt < 32; ++attempt) {
          const std::size_t c = pick_cluster(own);
          const std::size_t product = c * catalogue_per_cluster() + popular_rank();
          if (bought.insert(product).second) {
            order.push_back(product);
            break;
          }
        }
      }
      if (rng_.chance(kConsumerShare)) {
        const std::size_t product = pick_cluster(own) * catalogue_per_cluster() +
                                    products_per_cluster_ + rng_.index(kConsumablesPerCluster);
        const auto rows = rng_.between(kMinConsumableRows, kMaxConsumableRows);
        order.insert(order.end(), rows, product);
      }
      for (const auto product : order) {
        data_.tables.purchases.push_back({user(u), data_.tables.products[product].id});
      }
    }
  }

  void make_social() {
    static constexpr SocialKind kinds[] = {SocialKind::love, SocialKind::comment,
                                           SocialKind::wallpost};
    for (std::size_t u = 0; u < spec_.users; ++u) {
      if (!social_[u]) continue;
      const std::size_t own = u % spec_.clusters;
      const std::size_t count = around(spec_.social_intensity, rng_);
      for (std::size_t i = 0; i < count; ++i) {
        const auto& pool = members_[pick_cluster(own)];
        if (pool.empty() || (pool.size() == 1 && pool.front() == u)) continue;
        std::size_t target = u;
        while (target == u) target = pool[rng_.index(pool.size())];
        data_.tables.social.push_back({user(u), user(target), kinds[rng_.index(3)]});
      }
    }
  }

  void make_memberships() {
    for (std::size_t u = 0; u < spec_.users; ++u) {
      if (!social_[u]) continue;
      std::set<std::string> groups;
      const std::size_t count = static_cast<std::size_t>(rng_.between(1, 3));
      for (std::size_t i = 0; i < count; ++i) {
        groups.insert(id("g", pick_cluster(u % spec_.clusters), rng_.index(kGroupsPerCluster)));
      }
      for (const auto& g : groups) data_.tables.memberships.push_back({user(u), g});
    }
  }

  void make_interests() {
    for (std::size_t u = 0; u < spec_.users; ++u) {
      if (!social_[u]) continue;
      std::set<std::string> interests;
      const std::size_t count = static_cast<std::size_t>(rng_.between(1, 2));
      for (std::size_t i = 0; i < count; ++i) {
        const std::size_t c = pick_cluster(u % spec_.clusters);
        interests.insert(id("i", c * kInterestsPerCluster + rng_.index(kInterestsPerCluster)));
      }
      for (const auto& t : interests) data_.tables.interests.push_back({user(u), t});
    }
  }

  void make_locations() {
    for (std::size_t u = 0; u < spec_.users; ++u) {
      if (!located_[u]) continue;
      const std::size_t own = u % spec_.clusters;
      std::set<std::string> favored;
      const std::size_t n_favored = static_cast<std::size_t>(rng_.between(1, 5));
      for (std::size_t i = 0; i < n_favored; ++i) {
        favored.insert(id("lf", pick_cluster(own), rng_.index(kFavoredPerCluster)));
      }
      for (const auto& l : favored) {
        data_.tables.locations.push_back({user(u), l, LocationKind::favored, std::nullopt});
      }

      std::set<std::string> shared;
      const std::size_t n_shared = static_cast<std::size_t>(rng_.between(0, 2));
      for (std::size_t i = 0; i < n_shared; ++i) {
        shared.insert(id("ls", pick_cluster(own), rng_.index(kSharedPerCluster)));
      }
      for (const auto& l : shared) {
        data_.tables.locations.push_back({user(u), l, LocationKind::shared, std::nullopt});
      }

      // Event j of cluster c is held at venue j % kVenuesPerCluster of c.
      std::set<std::pair<std::size_t, std::size_t>> events;
      const std::size_t n_events = around(spec_.event_intensity, rng_);
      for (std::size_t i = 0; i < n_events; ++i) {
        events.emplace(pick_cluster(own), rng_.index(kEventsPerCluster));
      }
      for (const auto& [c, j] : events) {
        data_.tables.locations.push_back(
            {user(u), id("lm", c, j % kVenuesPerCluster), LocationKind::monitored, id("e", c, j)});
      }
    }
  }

  const SyntheticSpec& spec_;
  Rng rng_;
  SyntheticDataset data_;
  std::vector<bool> social_;
  std::vector<bool> located_;
  std::vector<std::vector<std::size_t>> members_;  // socially active users per cluster
  std::size_t top_levels_ = 0;
  std::size_t products_per_cluster_ = 0;
  std::vector<double> popularity_cdf_;
};

}  // namespace

void SyntheticSpec::validate() const {
  if (users < 1) throw std::invalid_argument("users must be >= 1");
  if (clusters < 1) throw std::invalid_argument("clusters must be >= 1");
  if (clusters > users) throw std::invalid_argument("clusters must not exceed users");
  if (!(noise >= 0.0 && noise <= 1.0)) throw std::invalid_argument("noise must lie in [0, 1]");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("dropout must lie in [0, 1)");
  if (!(purchase_intensity >= 1.0) || !(social_intensity >= 1.0) || !(event_intensity >= 1.0)) {
    throw std::invalid_argument("intensities must be >= 1");
  }
}

SyntheticDataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  return Generator(spec).run();
}

std::string manifest_json(const SyntheticDataset& data, const SyntheticSpec& spec) {
  nlohmann::ordered_json m;
  m["spec"] = {{"users", spec.users},
               {"clusters", spec.clusters},
               {"purchase_intensity", spec.purchase_intensity},
               {"social_intensity", spec.social_intensity},
               {"event_intensity", spec.event_intensity},
               {"noise", spec.noise},
               {"dropout", spec.dropout},
               {"seed", spec.seed}};
  m["counts"] = {{"users", data.user_cluster.size()},
                 {"products", data.tables.products.size()},
                 {"purchases", data.tables.purchases.size()},
                 {"social", data.tables.social.size()},
                 {"groups", data.tables.memberships.size()},
                 {"interests", data.tables.interests.size()},
                 {"locations", data.tables.locations.size()}};
  m["user_cluster"] = data.user_cluster;
  m["product_cluster"] = data.product_cluster;
  return m.dump(2) + "\n";
}

void write_synthetic(const SyntheticDataset& data, const SyntheticSpec& spec,
                     const std::filesystem::path& dir) {
  write_corpus(data.tables, dir);
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  out << manifest_json(data, spec);
}

}  // namespace hybridrec
