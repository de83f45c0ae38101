#include "hybridrec/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_set>
#include <utility>

namespace hybridrec {

namespace {

constexpr std::string_view kProductsFile = "products.csv";
constexpr std::string_view kPurchasesFile = "purchases.csv";
constexpr std::string_view kSocialFile = "social.csv";
constexpr std::string_view kGroupsFile = "groups.csv";
constexpr std::string_view kInterestsFile = "interests.csv";
constexpr std::string_view kLocationsFile = "locations.csv";

// Row r of a table sits on line r + 2 of its file (line 1 is the header).
std::size_t file_line(std::size_t row) { return row + 2; }

std::vector<std::string> split(std::string_view line, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, char delim) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += delim;
    out += parts[i];
  }
  return out;
}

struct Row {
  std::size_t line;
  std::vector<std::string> fields;
};

// Reads a delimited file, checks the header, and returns the data rows.
std::vector<Row> read_table(const std::filesystem::path& path,
                            const std::vector<std::string_view>& header) {
  const std::string name = path.string();
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file", name);

  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t pending_blank = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
      }
      const auto cols = split(line, ',');
      if (cols.size() != header.size() ||
          !std::equal(cols.begin(), cols.end(), header.begin())) {
        std::string expected;
        for (std::size_t i = 0; i < header.size(); ++i) {
          if (i) expected += ',';
          expected += header[i];
        }
        throw DataError("bad header, expected '" + expected + "'", name, line_no);
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) {
      if (!pending_blank) pending_blank = line_no;
      continue;
    }
    if (pending_blank) throw DataError("blank line inside table", name, pending_blank);
    auto fields = split(line, ',');
    if (fields.size() != header.size()) {
      throw DataError("expected " + std::to_string(header.size()) + " fields, got " +
                          std::to_string(fields.size()),
                      name, line_no);
    }
    rows.push_back({line_no, std::move(fields)});
  }
  if (!header_seen) throw DataError("missing header row", name, 1);
  return rows;
}

void require_nonempty(const std::string& value, const std::string& file, std::size_t line,
                      std::string_view field) {
  if (value.empty()) throw DataError("empty identifier", file, line, std::string(field));
}

template <typename Pair>
void dedup_pairs(std::vector<Pair>& rows, std::string Pair::*first, std::string Pair::*second) {
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<Pair> kept;
  kept.reserve(rows.size());
  for (auto& row : rows) {
    if (seen.emplace(row.*first, row.*second).second) kept.push_back(std::move(row));
  }
  rows = std::move(kept);
}

}  // namespace

std::string_view to_string(SocialKind kind) {
  switch (kind) {
    case SocialKind::love: return "love";
    case SocialKind::comment: return "comment";
    case SocialKind::wallpost: return "wallpost";
  }
  return "?";
}

std::string_view to_string(LocationKind kind) {
  switch (kind) {
    case LocationKind::favored: return "favored";
    case LocationKind::shared: return "shared";
    case LocationKind::monitored: return "monitored";
  }
  return "?";
}

std::string_view to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::purchases: return "purchases";
    case EntityKind::sellers: return "sellers";
    case EntityKind::categories: return "categories";
    case EntityKind::groups: return "groups";
    case EntityKind::interests: return "interests";
    case EntityKind::favored_locations: return "favored";
    case EntityKind::shared_locations: return "shared";
    case EntityKind::monitored_locations: return "monitored";
  }
  return "?";
}

std::optional<SocialKind> parse_social_kind(std::string_view text) {
  if (text == "love") return SocialKind::love;
  if (text == "comment") return SocialKind::comment;
  if (text == "wallpost") return SocialKind::wallpost;
  return std::nullopt;
}

std::optional<LocationKind> parse_location_kind(std::string_view text) {
  if (text == "favored") return LocationKind::favored;
  if (text == "shared") return LocationKind::shared;
  if (text == "monitored") return LocationKind::monitored;
  return std::nullopt;
}

DataError::DataError(std::string message, std::string file, std::size_t line, std::string field)
    : std::runtime_error([&] {
        std::string what;
        if (!file.empty()) {
          what += file;
          if (line) what += ":" + std::to_string(line);
          what += ": ";
        }
        what += message;
        if (!field.empty()) what += " (field '" + field + "')";
        return what;
      }()),
      message_(std::move(message)),
      file_(std::move(file)),
      line_(line),
      field_(std::move(field)) {}

Corpus::Corpus(CorpusTables tables, const std::vector<UserId>& extra_users)
    : tables_(std::move(tables)) {
  const std::string products_file(kProductsFile);
  for (std::size_t r = 0; r < tables_.products.size(); ++r) {
    const auto& p = tables_.products[r];
    require_nonempty(p.id, products_file, file_line(r), "product_id");
    require_nonempty(p.seller, products_file, file_line(r), "seller_id");
    if (p.category_path.size() > kMaxCategoryDepth) {
      throw DataError("category path deeper than 4 levels", products_file, file_line(r),
                      "category_path");
    }
    std::set<std::string_view> distinct;
    for (const auto& c : p.category_path) {
      require_nonempty(c, products_file, file_line(r), "category_path");
      if (!distinct.insert(c).second) {
        throw DataError("repeated category '" + c + "' in path", products_file, file_line(r),
                        "category_path");
      }
    }
    if (!product_lookup_.emplace(p.id, r).second) {
      throw DataError("duplicate product id '" + p.id + "'", products_file, file_line(r),
                      "product_id");
    }
  }

  std::set<UserId> universe(extra_users.begin(), extra_users.end());

  const std::string purchases_file(kPurchasesFile);
  for (std::size_t r = 0; r < tables_.purchases.size(); ++r) {
    const auto& p = tables_.purchases[r];
    require_nonempty(p.buyer, purchases_file, file_line(r), "buyer_id");
    require_nonempty(p.product, purchases_file, file_line(r), "product_id");
    if (!product_lookup_.contains(p.product)) {
      throw DataError("dangling reference to unknown product '" + p.product + "'",
                      purchases_file, file_line(r), "product_id");
    }
    universe.insert(p.buyer);
  }

  const std::string social_file(kSocialFile);
  for (std::size_t r = 0; r < tables_.social.size(); ++r) {
    const auto& s = tables_.social[r];
    require_nonempty(s.actor, social_file, file_line(r), "actor_id");
    require_nonempty(s.target, social_file, file_line(r), "target_id");
    if (s.actor == s.target) {
      throw DataError("self-interaction by '" + s.actor + "'", social_file, file_line(r),
                      "target_id");
    }
    universe.insert(s.actor);
    universe.insert(s.target);
  }

  const std::string groups_file(kGroupsFile);
  for (std::size_t r = 0; r < tables_.memberships.size(); ++r) {
    const auto& m = tables_.memberships[r];
    require_nonempty(m.user, groups_file, file_line(r), "user_id");
    require_nonempty(m.group, groups_file, file_line(r), "group_id");
    universe.insert(m.user);
  }

  const std::string interests_file(kInterestsFile);
  for (std::size_t r = 0; r < tables_.interests.size(); ++r) {
    const auto& t = tables_.interests[r];
    require_nonempty(t.user, interests_file, file_line(r), "user_id");
    require_nonempty(t.interest, interests_file, file_line(r), "interest_id");
    universe.insert(t.user);
  }

  const std::string locations_file(kLocationsFile);
  for (std::size_t r = 0; r < tables_.locations.size(); ++r) {
    const auto& l = tables_.locations[r];
    require_nonempty(l.user, locations_file, file_line(r), "user_id");
    require_nonempty(l.location, locations_file, file_line(r), "location_id");
    if (l.kind == LocationKind::monitored) {
      if (!l.event || l.event->empty()) {
        throw DataError("monitored location without event id", locations_file, file_line(r),
                        "event_id");
      }
    } else if (l.event) {
      throw DataError("event id on a non-monitored location", locations_file, file_line(r),
                      "event_id");
    }
    universe.insert(l.user);
  }

  dedup_pairs(tables_.memberships, &Membership::user, &Membership::group);
  dedup_pairs(tables_.interests, &InterestTag::user, &InterestTag::interest);

  users_.assign(universe.begin(), universe.end());
  for (std::size_t i = 0; i < users_.size(); ++i) {
    if (users_[i].empty()) throw DataError("empty user id");
    user_lookup_.emplace(users_[i], i);
  }
}

std::optional<std::size_t> Corpus::user_index(std::string_view user) const {
  const auto it = user_lookup_.find(std::string(user));
  if (it == user_lookup_.end()) return std::nullopt;
  return it->second;
}

const Product* Corpus::find_product(std::string_view id) const {
  const auto it = product_lookup_.find(std::string(id));
  return it == product_lookup_.end() ? nullptr : &tables_.products[it->second];
}

Corpus Corpus::with_purchases(std::vector<Purchase> purchases) const {
  CorpusTables tables = tables_;
  tables.purchases = std::move(purchases);
  return Corpus(std::move(tables), users_);
}

CorpusPaths CorpusPaths::in_directory(const std::filesystem::path& dir) {
  return {dir / kProductsFile, dir / kPurchasesFile, dir / kSocialFile,
          dir / kGroupsFile,   dir / kInterestsFile, dir / kLocationsFile};
}

Corpus load_corpus(const CorpusPaths& paths) {
  CorpusTables tables;

  for (auto& row : read_table(paths.products, {"product_id", "seller_id", "category_path"})) {
    Product p{std::move(row.fields[0]), std::move(row.fields[1]), {}};
    if (!row.fields[2].empty()) p.category_path = split(row.fields[2], '|');
    tables.products.push_back(std::move(p));
  }
  for (auto& row : read_table(paths.purchases, {"buyer_id", "product_id"})) {
    tables.purchases.push_back({std::move(row.fields[0]), std::move(row.fields[1])});
  }
  for (auto& row : read_table(paths.social, {"actor_id", "target_id", "kind"})) {
    const auto kind = parse_social_kind(row.fields[2]);
    if (!kind) {
      throw DataError("unknown interaction kind '" + row.fields[2] + "'", paths.social.string(),
                      row.line, "kind");
    }
    tables.social.push_back({std::move(row.fields[0]), std::move(row.fields[1]), *kind});
  }
  for (auto& row : read_table(paths.groups, {"user_id", "group_id"})) {
    tables.memberships.push_back({std::move(row.fields[0]), std::move(row.fields[1])});
  }
  for (auto& row : read_table(paths.interests, {"user_id", "interest_id"})) {
    tables.interests.push_back({std::move(row.fields[0]), std::move(row.fields[1])});
  }
  for (auto& row :
       read_table(paths.locations, {"user_id", "location_id", "kind", "event_id"})) {
    const auto kind = parse_location_kind(row.fields[2]);
    if (!kind) {
      throw DataError("unknown location kind '" + row.fields[2] + "'",
                      paths.locations.string(), row.line, "kind");
    }
    LocationRecord rec{std::move(row.fields[0]), std::move(row.fields[1]), *kind, std::nullopt};
    if (!row.fields[3].empty()) rec.event = std::move(row.fields[3]);
    tables.locations.push_back(std::move(rec));
  }

  // Integrity errors name the canonical file; point them at the real path.
  // Rows map 1:1 onto lines because blank lines are only tolerated at the end.
  try {
    return Corpus(std::move(tables));
  } catch (const DataError& e) {
    const std::pair<std::string_view, const std::filesystem::path*> files[] = {
        {kProductsFile, &paths.products}, {kPurchasesFile, &paths.purchases},
        {kSocialFile, &paths.social},     {kGroupsFile, &paths.groups},
        {kInterestsFile, &paths.interests}, {kLocationsFile, &paths.locations}};
    for (const auto& [name, path] : files) {
      if (e.file() == name) {
        throw DataError(e.message(), path->string(), e.line(), e.field());
      }
    }
    throw;
  }
}

void write_corpus(const CorpusTables& tables, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto paths = CorpusPaths::in_directory(dir);
  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
  };
  {
    auto out = open(paths.products);
    out << "product_id,seller_id,category_path\n";
    for (const auto& p : tables.products) {
      out << p.id << ',' << p.seller << ',' << join(p.category_path, '|') << '\n';
    }
  }
  {
    auto out = open(paths.purchases);
    out << "buyer_id,product_id\n";
    for (const auto& p : tables.purchases) out << p.buyer << ',' << p.product << '\n';
  }
  {
    auto out = open(paths.social);
    out << "actor_id,target_id,kind\n";
    for (const auto& s : tables.social) {
      out << s.actor << ',' << s.target << ',' << to_string(s.kind) << '\n';
    }
  }
  {
    auto out = open(paths.groups);
    out << "user_id,group_id\n";
    for (const auto& m : tables.memberships) out << m.user << ',' << m.group << '\n';
  }
  {
    auto out = open(paths.interests);
    out << "user_id,interest_id\n";
    for (const auto& t : tables.interests) out << t.user << ',' << t.interest << '\n';
  }
  {
    auto out = open(paths.locations);
    out << "user_id,location_id,kind,event_id\n";
    for (const auto& l : tables.locations) {
      out << l.user << ',' << l.location << ',' << to_string(l.kind) << ','
          << l.event.value_or("") << '\n';
    }
  }
}

std::optional<CategoryId> top_level_category(const Product& product) {
  if (product.category_path.empty()) return std::nullopt;
  return product.category_path.front();
}

std::optional<CategoryId> low_level_category(const Product& product) {
  if (product.category_path.empty()) return std::nullopt;
  return product.category_path.back();
}

ProfileMap build_entity_profiles(const Corpus& corpus, EntityKind kind) {
  ProfileMap profiles;
  for (const auto& u : corpus.users()) profiles.emplace(u, EntityProfile{u, kind, {}});
  auto add = [&](const UserId& user, const std::string& entity) {
    profiles.at(user).entities.insert(entity);
  };

  switch (kind) {
    case EntityKind::purchases:
    case EntityKind::sellers:
    case EntityKind::categories:
      for (const auto& p : corpus.purchases()) {
        const Product& product = *corpus.find_product(p.product);
        if (kind == EntityKind::purchases) {
          add(p.buyer, product.id);
        } else if (kind == EntityKind::sellers) {
          add(p.buyer, product.seller);
        } else {
          for (const auto& c : product.category_path) add(p.buyer, c);
        }
      }
      break;
    case EntityKind::groups:
      for (const auto& m : corpus.memberships()) add(m.user, m.group);
      break;
    case EntityKind::interests:
      for (const auto& t : corpus.interests()) add(t.user, t.interest);
      break;
    case EntityKind::favored_locations:
    case EntityKind::shared_locations:
    case EntityKind::monitored_locations: {
      const LocationKind wanted = kind == EntityKind::favored_locations ? LocationKind::favored
                                  : kind == EntityKind::shared_locations
                                      ? LocationKind::shared
                                      : LocationKind::monitored;
      for (const auto& l : corpus.locations()) {
        if (l.kind == wanted) add(l.user, l.location);
      }
      break;
    }
  }
  return profiles;
}

}  // namespace hybridrec
