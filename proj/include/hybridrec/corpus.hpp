#pragma once

// Three-source data model: marketplace (products, purchases), social network
// (interactions, groups, interests) and location data (favored, shared and
// monitored locations).

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hybridrec {

using UserId = std::string;
using ProductId = std::string;
using SellerId = std::string;
using CategoryId = std::string;
using GroupId = std::string;
using InterestId = std::string;
using LocationId = std::string;
using EventId = std::string;

/// Maximum depth of the category hierarchy.
inline constexpr std::size_t kMaxCategoryDepth = 4;

struct Product {
  ProductId id;
  SellerId seller;
  /// Ordered top-level -> low-level.
  std::vector<CategoryId> category_path;
};

struct Purchase {
  UserId buyer;
  ProductId product;
};

enum class SocialKind { love, comment, wallpost };

struct SocialInteraction {
  UserId actor;
  UserId target;
  SocialKind kind = SocialKind::love;
};

struct Membership {
  UserId user;
  GroupId group;
};

struct InterestTag {
  UserId user;
  InterestId interest;
};

enum class LocationKind { favored, shared, monitored };

struct LocationRecord {
  UserId user;
  LocationId location;
  LocationKind kind = LocationKind::favored;
  std::optional<EventId> event;  // present iff kind == monitored
};

enum class EntityKind {
  purchases,
  sellers,
  categories,
  groups,
  interests,
  favored_locations,
  shared_locations,
  monitored_locations
};

inline constexpr EntityKind kAllEntityKinds[] = {
    EntityKind::purchases,         EntityKind::sellers,
    EntityKind::categories,        EntityKind::groups,
    EntityKind::interests,         EntityKind::favored_locations,
    EntityKind::shared_locations,  EntityKind::monitored_locations};

std::string_view to_string(SocialKind kind);
std::string_view to_string(LocationKind kind);
std::string_view to_string(EntityKind kind);
std::optional<SocialKind> parse_social_kind(std::string_view text);
std::optional<LocationKind> parse_location_kind(std::string_view text);

/// Raised for malformed input rows and integrity violations. `file` and
/// `line` are empty/zero when the violation is not tied to a file row.
class DataError : public std::runtime_error {
 public:
  DataError(std::string message, std::string file = {}, std::size_t line = 0,
            std::string field = {});

  const std::string& message() const noexcept { return message_; }
  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string message_;
  std::string file_;
  std::size_t line_;
  std::string field_;
};

struct CorpusTables {
  std::vector<Product> products;
  std::vector<Purchase> purchases;
  std::vector<SocialInteraction> social;
  std::vector<Membership> memberships;
  std::vector<InterestTag> interests;
  std::vector<LocationRecord> locations;
};

/// Immutable, validated corpus. The user universe is the sorted union of
/// every user referenced by any table (plus any explicitly supplied users),
/// so a user's dense index is also its rank in lexicographic id order.
class Corpus {
 public:
  Corpus() = default;
  /// Validates and takes ownership. Throws DataError.
  explicit Corpus(CorpusTables tables, const std::vector<UserId>& extra_users = {});

  const std::vector<Product>& products() const noexcept { return tables_.products; }
  const std::vector<Purchase>& purchases() const noexcept { return tables_.purchases; }
  const std::vector<SocialInteraction>& social() const noexcept { return tables_.social; }
  const std::vector<Membership>& memberships() const noexcept { return tables_.memberships; }
  const std::vector<InterestTag>& interests() const noexcept { return tables_.interests; }
  const std::vector<LocationRecord>& locations() const noexcept { return tables_.locations; }
  const CorpusTables& tables() const noexcept { return tables_; }

  const std::vector<UserId>& users() const noexcept { return users_; }
  std::optional<std::size_t> user_index(std::string_view user) const;
  const Product* find_product(std::string_view id) const;

  /// Same corpus with the purchase table replaced; the user universe is kept.
  Corpus with_purchases(std::vector<Purchase> purchases) const;

 private:
  CorpusTables tables_;
  std::vector<UserId> users_;
  std::unordered_map<std::string, std::size_t> user_lookup_;
  std::unordered_map<std::string, std::size_t> product_lookup_;
};

struct CorpusPaths {
  std::filesystem::path products;
  std::filesystem::path purchases;
  std::filesystem::path social;
  std::filesystem::path groups;
  std::filesystem::path interests;
  std::filesystem::path locations;

  /// Standard file names inside one dataset directory.
  static CorpusPaths in_directory(const std::filesystem::path& dir);
};

Corpus load_corpus(const CorpusPaths& paths);

/// Writes the six tables in the loader's format.
void write_corpus(const CorpusTables& tables, const std::filesystem::path& dir);

std::optional<CategoryId> top_level_category(const Product& product);
std::optional<CategoryId> low_level_category(const Product& product);

struct EntityProfile {
  UserId user;
  EntityKind entity_kind = EntityKind::purchases;
  std::set<std::string> entities;
};

using ProfileMap = std::map<UserId, EntityProfile>;

/// Delta(u) for every user of the universe; users without records map to the
/// empty set.
ProfileMap build_entity_profiles(const Corpus& corpus, EntityKind kind);

}  // namespace hybridrec
