#pragma once

// Planted-cluster dataset generator. Users of one cluster share products,
// sellers, categories, groups, interests, locations, events and social ties;
// a `noise` share of every choice is redirected to another cluster, and a
// `dropout` share of users leaves no trace in the social or location source.
// Each cluster also has a few consumables outside the popularity draw that a
// quarter of its users buy many times over.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "hybridrec/corpus.hpp"

namespace hybridrec {

struct SyntheticSpec {
  std::size_t users = 200;
  std::size_t clusters = 10;
  double purchase_intensity = 14.0;  // mean regular purchase rows per user
  double social_intensity = 8.0;     // mean interactions initiated per user
  double event_intensity = 5.0;      // mean monitored events attended per user
  double noise = 0.1;                // cross-cluster share in [0, 1]
  /// Share of users absent from the social source, and independently from
  /// the location source, in [0, 1). Everyone keeps marketplace data.
  double dropout = 0.2;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument.
  void validate() const;
};

struct SyntheticDataset {
  CorpusTables tables;
  std::map<UserId, std::size_t> user_cluster;
  std::map<ProductId, std::size_t> product_cluster;
};

SyntheticDataset generate_synthetic(const SyntheticSpec& spec);

/// Manifest: spec, per-table row counts and planted cluster assignments.
std::string manifest_json(const SyntheticDataset& data, const SyntheticSpec& spec);

/// Writes the six corpus files plus manifest.json into `dir`.
void write_synthetic(const SyntheticDataset& data, const SyntheticSpec& spec,
                     const std::filesystem::path& dir);

}  // namespace hybridrec
