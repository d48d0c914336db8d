/*
 * Copyright (c) 2026, the cvbench authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// cvbench command-line driver: one subcommand per pipeline stage plus `run`.

#include "cvbench/cvbench.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace cvbench;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  for (auto& item : io::split(s, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<InternalIndex> parse_indexes(const std::string& s) {
  if (s == "all") return all_internal_indexes();
  std::vector<InternalIndex> out;
  for (const auto& name : split_list(s)) out.push_back(parse_internal_index(name));
  return out;
}

std::vector<Algorithm> parse_algorithms(const std::string& s) {
  if (s == "all") return {kAlgorithms.begin(), kAlgorithms.end()};
  std::vector<Algorithm> out;
  for (const auto& name : split_list(s)) out.push_back(parse_algorithm(name));
  return out;
}

SuiteConfig load_suite(const std::string& suite, const std::string& config, const Globals& g, bool seed_given) {
  SuiteConfig c = config.empty() ? builtin_suite(suite.empty() ? "desk-small" : suite)
                                 : parse_suite_config(io::read_text(config));
  if (seed_given) c.seed = g.seed;
  c.eval.seed = c.seed;
  c.eval.jobs = g.jobs;
  return c;
}

fs::path require_out(const Globals& g) {
  if (g.out.empty()) throw Error("--out is required");
  return g.out;
}

int cmd_generate(const Globals& g, bool seed_given, const std::string& suite, const std::string& config) {
  const auto c = load_suite(suite, config, g, seed_given);
  validate(c);
  const auto ds = stage_generate(c, require_out(g));
  std::printf("generated %zu datasets into %s\n", ds.size(), g.out.c_str());
  return 0;
}

int cmd_cluster(const Globals& g, const std::string& data, const std::string& algos, int kmin,
                const std::string& kmax, int scenario, const std::string& import) {
  EvalSpec spec;
  spec.seed = g.seed;
  spec.jobs = g.jobs;
  spec.algorithms = parse_algorithms(algos);
  const auto out = require_out(g);
  if (fs::is_directory(data)) {
    stage_candidates(scenario, io::read_dataset_dir(data), spec, out);
    std::printf("wrote %s\n", partitions_dir(out, scenario).c_str());
    return 0;
  }
  const auto ds = io::read_dataset(data);
  std::vector<NamedCollection> collections;
  if (scenario == 2) {
    collections = scenario2_candidates(ds, spec);
  } else {
    SweepSpec sweep;
    sweep.k_min = kmin;
    sweep.k_max = kmax == "auto" ? compute_k_max(ds.truth.k_star) : std::stoi(kmax);
    sweep.algorithms = spec.algorithms;
    for (auto& [algo, parts] : sweep_varied_k(ds.points, sweep, derive_seed(g.seed, fnv1a(ds.id)))) {
      collections.push_back({to_string(algo), std::move(parts), {}, {}});
    }
  }
  auto records = io::to_records(collections);
  if (!import.empty()) {
    for (auto& r : io::read_partitions(import, ds.size())) {
      if (r.collection.empty()) r.collection = "imported";
      records.push_back(std::move(r));
    }
  }
  io::write_partitions(out, records);
  std::printf("wrote %zu partitions to %s\n", records.size(), out.c_str());
  return 0;
}

int cmd_index(const Globals& g, const std::string& data, const std::string& partitions, const std::string& indexes) {
  const auto ds = io::read_dataset(data);
  const auto recs = io::read_partitions(partitions, ds.size());
  const auto ids = parse_indexes(indexes);
  const IndexContext ctx(ds.points);
  std::ostringstream os;
  os << "dataset,collection,source,k,index,orientation,raw,adjusted\n";
  for (const auto& r : recs) {
    PartitionEvaluator ev(ctx, r.partition);
    for (auto id : ids) {
      os << ds.id << ',' << r.collection << ',' << r.partition.source << ',' << r.partition.k << ',' << to_string(id)
         << ',' << to_string(descriptor(id).orientation) << ',';
      if (auto s = ev.try_score(id)) {
        os << io::format_double(s->raw) << ',' << io::format_double(s->adjusted) << '\n';
      } else {
        os << ",\n";
      }
    }
  }
  io::write_text(require_out(g), os.str());
  return 0;
}

int cmd_external(const Globals& g, const std::string& data, const std::string& partitions) {
  const auto ds = io::read_dataset(data);
  const auto collections = io::to_collections(io::read_partitions(partitions, ds.size()));
  std::ostringstream os;
  os << "dataset,collection,source,k";
  for (auto e : kExternalIndexes) os << ',' << to_string(e);
  os << ",aggregated_rank\n";
  for (const auto& nc : collections) {
    if (nc.partitions.size() < 2) throw Error("collection '" + nc.group + "' needs at least 2 partitions");
    const auto c = make_collection(ds.id, nc.group, ds.truth.labels, nc.partitions);
    for (std::size_t i = 0; i < c.partitions.size(); ++i) {
      os << ds.id << ',' << nc.group << ',' << c.partitions[i].source << ',' << c.partitions[i].k;
      for (double v : c.external[i]) os << ',' << io::format_double(v);
      os << ',' << io::format_double(c.reference_ranks[i]) << '\n';
    }
  }
  io::write_text(require_out(g), os.str());
  return 0;
}

int cmd_scenario3(const Globals& g, const std::string& data, const std::string& variant, const std::string& mode,
                  int runs, int target) {
  const auto out = require_out(g);
  if (fs::is_directory(data)) {
    EvalSpec spec;
    spec.jobs = g.jobs;
    spec.fixed_k_runs = runs;
    stage_candidates(3, io::read_dataset_dir(data), spec, out);
    std::printf("wrote %s\n", partitions_dir(out, 3).c_str());
    return 0;
  }
  const auto ds = io::read_dataset(data);
  if (variant != "p1" && variant != "p2") throw Error("--variant must be p1 or p2");
  RankedPartitionSet set;
  if (mode == "varied") {
    set = variant == "p1" ? procedure1_varied(ds) : procedure2_varied(ds);
  } else if (mode == "fixed") {
    const int k_star = ds.truth.k_star;
    if (target <= 0) {
      target = variant == "p1" ? std::max(2, (7 * k_star + 5) / 10)
                               : std::min(static_cast<int>(ds.size()) - 1, (13 * k_star + 5) / 10);
    }
    set = procedure_fixed_k(ds, variant == "p1" ? SupervisedVariant::p1_fixed : SupervisedVariant::p2_fixed, target,
                            runs);
  } else {
    throw Error("--mode must be varied or fixed");
  }
  for (const auto& w : set.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  if (set.rejected_runs > 0) std::fprintf(stderr, "rejected runs: %d\n", set.rejected_runs);
  if (!set.emitted()) {
    std::fprintf(stderr, "skipped: only %zu partitions (at least %zu required)\n", set.partitions.size(),
                 kMinRankedPartitions);
  }
  io::write_partitions(out, io::to_records({{to_string(set.variant), set.partitions, set.reference_ranks, {}}}));
  return 0;
}

int cmd_eval(const Globals& g, int scenario, const std::string& data, std::string partitions,
             const std::string& indexes) {
  if (partitions.empty()) partitions = (fs::path(data).lexically_normal().parent_path() / "partitions").string();
  EvalSpec spec;
  spec.seed = g.seed;
  spec.jobs = g.jobs;
  spec.indexes = parse_indexes(indexes);
  const auto result = stage_eval(scenario, io::read_dataset_dir(data), partitions, spec, require_out(g));
  std::printf("scenario %d: %zu accepted collections, %zu rejected or skipped, %zu records\n", scenario,
              result.accepted_collections, result.rejects.size(), result.records.size());
  return 0;
}

int cmd_stats(const Globals& g, const std::string& records) {
  stage_stats(records, require_out(g));
  return 0;
}

int cmd_run(const Globals& g, bool seed_given, const std::string& suite, const std::string& config) {
  const auto c = load_suite(suite, config, g, seed_given);
  const auto summary = run_pipeline(c, require_out(g));
  std::printf("suite %s: %zu datasets\n", c.suite.c_str(), summary.datasets);
  for (const auto& [s, r] : summary.scenarios) {
    std::printf("  scenario %d: %zu accepted collections, %zu rejected or skipped, %zu records\n", s,
                r.accepted_collections, r.rejects.size(), r.records.size());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cvbench: clustering validity index benchmark"};
  app.require_subcommand(1);
  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "Suite seed")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output path");

  std::string suite, config, data, partitions, algos = "all", kmax = "auto", indexes = "all", records, import;
  std::string variant = "p1", mode = "varied";
  int kmin = 2, scenario = 1, runs = 5, target = 0;

  auto* gen = app.add_subcommand("generate", "Generate the datasets of a suite");
  gen->add_option("--suite", suite, "Built-in suite (desk-small, desk)");
  gen->add_option("--config", config, "Key-value suite config file");

  auto* cluster = app.add_subcommand("cluster", "Produce candidate partitions");
  cluster->add_option("--data", data, "Dataset CSV or directory")->required();
  cluster->add_option("--algos", algos, "Comma-separated algorithms or 'all'");
  cluster->add_option("--kmin", kmin, "Smallest k")->capture_default_str();
  cluster->add_option("--kmax", kmax, "Largest k or 'auto'")->capture_default_str();
  cluster->add_option("--scenario", scenario, "1 = varied k, 2 = fixed-k targets")->check(CLI::Range(1, 2));
  cluster->add_option("--import", import, "Partition JSON to append");

  auto* index = app.add_subcommand("index", "Internal index values per partition");
  index->add_option("--data", data, "Dataset CSV")->required();
  index->add_option("--partitions", partitions, "Partition JSON")->required();
  index->add_option("--indexes", indexes, "Comma-separated indexes or 'all'");

  auto* external = app.add_subcommand("external", "External scores and aggregated ranks");
  external->add_option("--data", data, "Dataset CSV")->required();
  external->add_option("--partitions", partitions, "Partition JSON")->required();

  auto* s3 = app.add_subcommand("scenario3-gen", "Supervised ranked partition sets");
  s3->add_option("--data", data, "Dataset CSV or directory")->required();
  s3->add_option("--variant", variant, "p1 (merge) or p2 (split)");
  s3->add_option("--mode", mode, "varied or fixed");
  s3->add_option("--runs", runs, "Fixed-k runs")->capture_default_str();
  s3->add_option("--target", target, "Fixed-k target (default: 30% rule)");

  auto* eval = app.add_subcommand("eval", "Evaluate one scenario");
  eval->add_option("--scenario", scenario, "1, 2 or 3")->required()->check(CLI::Range(1, 3));
  eval->add_option("--data", data, "Dataset directory")->required();
  eval->add_option("--partitions", partitions, "Partition root (default: sibling 'partitions')");
  eval->add_option("--indexes", indexes, "Comma-separated indexes or 'all'");

  auto* stats = app.add_subcommand("stats", "Statistical tests on evaluation records");
  stats->add_option("--records", records, "records.csv from eval")->required();

  auto* run = app.add_subcommand("run", "Full pipeline");
  run->add_option("--suite", suite, "Built-in suite (desk-small, desk)");
  run->add_option("--config", config, "Key-value suite config file");

  CLI11_PARSE(app, argc, argv);
  const bool seed_given = seed_opt->count() > 0;

  try {
    if (*gen) return cmd_generate(g, seed_given, suite, config);
    if (*cluster) return cmd_cluster(g, data, algos, kmin, kmax, scenario, import);
    if (*index) return cmd_index(g, data, partitions, indexes);
    if (*external) return cmd_external(g, data, partitions);
    if (*s3) return cmd_scenario3(g, data, variant, mode, runs, target);
    if (*eval) return cmd_eval(g, scenario, data, partitions, indexes);
    if (*stats) return cmd_stats(g, records);
    if (*run) return cmd_run(g, seed_given, suite, config);
  } catch (const StageError& e) {
    std::fprintf(stderr, "error in stage %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
