// hybridrec: experiment runner, synthetic dataset generator and dataset
// validator.
//
// Exit codes: 0 success, 1 config error, 2 data error, 3 runtime error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hybridrec/corpus.hpp"
#include "hybridrec/experiment.hpp"
#include "hybridrec/synthetic.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kDataError = 2, kRuntimeError = 3 };

int run_command(const std::string& config_path, std::optional<std::uint64_t> seed,
                const std::string& task, const std::string& out) {
  auto config = hybridrec::load_config(config_path);
  if (seed) config.seed = *seed;
  if (!task.empty()) {
    if (task == "all") {
      config.tasks.assign(std::begin(hybridrec::kAllTasks), std::end(hybridrec::kAllTasks));
    } else if (const auto t = hybridrec::parse_task(task)) {
      config.tasks = {*t};
    } else {
      throw hybridrec::ConfigError("unknown task '" + task + "'");
    }
  }
  if (!out.empty()) config.output = out;

  const auto reports = hybridrec::run_config(config);
  for (const auto& report : reports) {
    std::printf("%s\n", std::string(hybridrec::to_string(report.task)).c_str());
    std::printf("  %-24s %8s %8s %8s %8s %8s\n", "recommender", "nDCG", "P", "R", "D", "UC");
    for (const auto& row : report.rows) {
      std::printf("  %-24s %8.4f %8.4f %8.4f %8.4f %7.2f%%\n", row.recommender.c_str(), row.ndcg,
                  row.precision, row.recall, row.diversity, 100.0 * row.user_coverage);
    }
  }
  std::printf("reports written to %s\n", config.output.string().c_str());
  return kOk;
}

int generate_command(const hybridrec::SyntheticSpec& spec, const std::string& out) {
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw hybridrec::ConfigError(e.what());
  }
  const auto data = hybridrec::generate_synthetic(spec);
  try {
    hybridrec::write_synthetic(data, spec, out);
  } catch (const std::filesystem::filesystem_error& e) {
    throw std::runtime_error(std::string("unwritable output directory: ") + e.what());
  }
  std::printf("wrote %zu users, %zu products, %zu purchases, %zu interactions to %s\n",
              data.user_cluster.size(), data.tables.products.size(), data.tables.purchases.size(),
              data.tables.social.size(), out.c_str());
  return kOk;
}

int validate_command(const std::string& dir) {
  const auto corpus = hybridrec::load_corpus(hybridrec::CorpusPaths::in_directory(dir));
  std::printf("ok: %zu users, %zu products, %zu purchases, %zu interactions, %zu memberships, "
              "%zu interests, %zu location records\n",
              corpus.users().size(), corpus.products().size(), corpus.purchases().size(),
              corpus.social().size(), corpus.memberships().size(), corpus.interests().size(),
              corpus.locations().size());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-source hybrid recommender experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string task;
  std::string run_out;
  auto* run = app.add_subcommand("run", "Run the experiments described by a config file");
  run->add_option("--config", config_path, "JSON experiment config")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Override the split seed");
  run->add_option("--task", task, "products, low_categories, top_categories or all");
  run->add_option("--out", run_out, "Override the report directory");

  hybridrec::SyntheticSpec spec;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "Write a planted-cluster synthetic dataset");
  gen->add_option("--users", spec.users, "Number of users")->required();
  gen->add_option("--clusters", spec.clusters, "Number of clusters")->required();
  gen->add_option("--noise", spec.noise, "Cross-cluster share in [0, 1]")->required();
  gen->add_option("--seed", spec.seed, "Generator seed")->required();
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--purchases", spec.purchase_intensity, "Mean regular purchases per user");
  gen->add_option("--interactions", spec.social_intensity, "Mean interactions per user");
  gen->add_option("--events", spec.event_intensity, "Mean events attended per user");
  gen->add_option("--dropout", spec.dropout, "Share of users missing from each non-market source");

  std::string data_dir;
  auto* val = app.add_subcommand("validate", "Load and validate a dataset directory");
  val->add_option("--data", data_dir, "Dataset directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) {
      return run_command(config_path,
                         seed_opt->count() ? std::optional<std::uint64_t>(seed) : std::nullopt,
                         task, run_out);
    }
    if (*gen) return generate_command(spec, gen_out);
    if (*val) return validate_command(data_dir);
  } catch (const hybridrec::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const hybridrec::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kRuntimeError;
}
