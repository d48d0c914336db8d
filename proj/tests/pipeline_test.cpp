// Copyright 2026 The cvbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>

#include "cvbench/pipeline.hpp"

namespace cvbench {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("cvbench_pipe_" + std::to_string(std::random_device{}()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

SuiteConfig small_suite() {
  return apply_config(builtin_suite("desk-small"), {{"indexes", "silhouette,vrc,dbcv"},
                                                    {"algorithms", "kmeans,average"},
                                                    {"k_star", "3"},
                                                    {"seed", "17"}});
}

TEST(Pipeline, RunIsReproducible) {
  TempDir a, b;
  const auto c = small_suite();
  const auto ra = run_pipeline(c, a.path());
  run_pipeline(c, b.path());
  EXPECT_EQ(ra.datasets, 4u);
  for (int s : {1, 2, 3}) {
    const auto rel = fs::path("eval") / ("s" + std::to_string(s));
    for (const char* file : {"summary.csv", "records.csv", "rejects.csv"}) {
      EXPECT_EQ(io::read_text(a.path() / rel / file), io::read_text(b.path() / rel / file)) << rel / file;
    }
    EXPECT_TRUE(fs::exists(a.path() / "stats" / ("s" + std::to_string(s)) / "pairwise.csv"));
  }
  EXPECT_GT(ra.scenarios.at(1).records.size(), 0u);
  const auto manifest = nlohmann::json::parse(io::read_text(a.path() / "manifest.json"));
  EXPECT_EQ(manifest.at("config_hash").get<std::string>(), config_hash(c));
  EXPECT_EQ(manifest.at("datasets").get<int>(), 4);
  EXPECT_FALSE(manifest.at("declared_deviations").empty());
}

TEST(Pipeline, EvalStageNeedsPartitionFiles) {
  TempDir dir;
  auto c = small_suite();
  const auto datasets = stage_generate(c, dir.path() / "datasets");
  EXPECT_THROW(stage_eval(1, datasets, dir.path() / "partitions", c.eval, dir.path() / "eval"), Error);
  stage_candidates(1, datasets, c.eval, dir.path() / "partitions");
  const auto direct = run_scenario(1, datasets, c.eval);
  const auto staged = stage_eval(1, datasets, dir.path() / "partitions", c.eval, dir.path() / "eval");
  ASSERT_EQ(direct.records.size(), staged.records.size());
  for (std::size_t i = 0; i < direct.records.size(); ++i) {
    EXPECT_EQ(direct.records[i].rho_all, staged.records[i].rho_all);
    EXPECT_EQ(direct.records[i].top_pick_hit, staged.records[i].top_pick_hit);
  }
}

TEST(Pipeline, ValidationNamesTheStage) {
  TempDir dir;
  auto c = small_suite();
  c.k_stars.clear();
  try {
    run_pipeline(c, dir.path());
    FAIL() << "expected StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "validate");
    EXPECT_NE(std::string(e.what()).find("empty dataset grid"), std::string::npos);
  }
  c = small_suite();
  c.distributions = {Distribution::uniform};
  EXPECT_THROW(validate(c), Error);
  c.scenarios = {1, 2};
  EXPECT_NO_THROW(validate(c));
}

TEST(Config, ParseAndHash) {
  const auto c = parse_suite_config("base = desk-small\nseed = 9\nk_star = 5, 6\ncompactness = 0.2, random\nnoise = 0.1\n");
  EXPECT_EQ(c.suite, "desk-small");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.k_stars, (std::vector<int>{5, 6}));
  ASSERT_EQ(c.compactness.size(), 2u);
  EXPECT_TRUE(c.compactness[1].random_unit);
  EXPECT_EQ(c.noise_fractions, (std::vector<double>{0.1}));
  EXPECT_EQ(config_hash(c), config_hash(parse_suite_config(canonical_config(c))));
  auto d = c;
  d.seed = 10;
  EXPECT_NE(config_hash(c), config_hash(d));
  EXPECT_THROW(parse_suite_config("colour = red\n"), Error);
  EXPECT_THROW(builtin_suite("huge"), Error);
}

TEST(Grid, IdsAndSeedsAreStable) {
  const auto c = builtin_suite("desk");
  const auto plans = expand_grid(c);
  EXPECT_EQ(plans.size(), 120u);
  std::set<std::string> ids;
  std::set<std::uint64_t> seeds;
  for (const auto& p : plans) {
    ids.insert(p.id);
    seeds.insert(p.config.seed);
  }
  EXPECT_EQ(ids.size(), plans.size());
  EXPECT_EQ(seeds.size(), plans.size());
  EXPECT_EQ(expand_grid(c)[7].config.seed, plans[7].config.seed);
}

}  // namespace
}  // namespace cvbench
