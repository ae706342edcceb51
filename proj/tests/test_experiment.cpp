// Copyright 2026 The recflow Authors
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

#include "recflow/experiment.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace recflow {
namespace {

namespace fs = std::filesystem;

class ExperimentTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("recflow_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir_);
    dataset_path_ = (dir_ / "ratings.dat").string();
    std::ofstream out(dataset_path_);
    // 12 users x 15 items, seeded; every user rates at least 6 items.
    std::mt19937_64 rng(4242);
    for (int u = 0; u < 12; ++u) {
      std::vector<int> items;
      for (int i = 0; i < 15; ++i) items.push_back(i);
      for (std::size_t i = items.size(); i > 1; --i) {
        std::swap(items[i - 1], items[static_cast<std::size_t>(rng() % i)]);
      }
      const int count = 6 + static_cast<int>(rng() % 6);
      for (int i = 0; i < count; ++i) {
        out << u << "::" << items[static_cast<std::size_t>(i)] << "::"
            << 1 + rng() % 5 << "\n";
      }
    }
  }

  void TearDown() override {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }

  ExperimentConfig base_config() const {
    ExperimentConfig cfg;
    cfg.dataset_path = dataset_path_;
    cfg.format = RatingFormat::double_colon;
    cfg.recommender = "IB";
    cfg.k_grid = {3, 5};
    cfg.display = 2;
    cfg.target = "uniform";
    cfg.modes = {"TOP"};
    cfg.folds = 2;
    cfg.seed = 9;
    cfg.min_user_ratings = 4;
    cfg.min_item_ratings = 1;
    cfg.clamp_display = true;
    return cfg;
  }

  fs::path dir_;
  std::string dataset_path_;
};

TEST_F(ExperimentTest, SmokeTopOnlyComputesPrecisionPerFold) {
  const RunRecord record = run_experiment(base_config());
  EXPECT_EQ(record.rows.size(), 4u);  // 2 folds x 2 k x 1 mode
  for (const RunRow& row : record.rows) {
    EXPECT_GE(row.metrics.precision, 0.0);
    EXPECT_LE(row.metrics.precision, 1.0);
    EXPECT_EQ(row.mode, "TOP");
  }
}

TEST_F(ExperimentTest, FlowOptimumNeverBeatenByOtherModes) {
  ExperimentConfig cfg = base_config();
  cfg.modes = {"TOP", "GOL", "AGG", "PC", "FD", "AB", "GRD"};
  const RunRecord record = run_experiment(cfg);  // throws InternalError on violation
  std::map<std::pair<int, int>, long long> gol;
  for (const RunRow& row : record.rows) {
    if (row.mode == "GOL") gol[{row.fold, row.k}] = row.discrepancy_raw;
  }
  for (const RunRow& row : record.rows) {
    EXPECT_GE(row.discrepancy_raw, gol.at({row.fold, row.k})) << row.mode;
  }
}

TEST_F(ExperimentTest, BatchedSolvesNeverBeatGlobalOptimum) {
  ExperimentConfig cfg = base_config();
  cfg.modes = {"GOL"};
  const RunRecord global = run_experiment(cfg);
  cfg.user_batches = 4;
  const RunRecord batched = run_experiment(cfg);
  ASSERT_EQ(global.rows.size(), batched.rows.size());
  for (std::size_t i = 0; i < global.rows.size(); ++i) {
    EXPECT_GE(batched.rows[i].discrepancy_raw, global.rows[i].discrepancy_raw);
  }
  EXPECT_NE(global.fingerprint, batched.fingerprint);
}

TEST_F(ExperimentTest, NestedKSweepNonIncreasingForUniformTarget) {
  ExperimentConfig cfg = base_config();
  cfg.modes = {"GOL"};
  cfg.k_grid = {2, 3, 5, 8};
  const RunRecord record = run_experiment(cfg);  // internal assert also active
  long long previous = -1;
  for (const RunRow& row : record.rows) {
    if (row.fold != 0) continue;
    if (previous >= 0) EXPECT_LE(row.discrepancy_raw, previous);
    previous = row.discrepancy_raw;
  }
}

TEST_F(ExperimentTest, RerunsProduceByteIdenticalMetricsCsv) {
  ExperimentConfig cfg = base_config();
  cfg.modes = {"TOP", "GOL"};
  const RunRecord first = run_experiment(cfg);
  const RunRecord second = run_experiment(cfg);
  EXPECT_EQ(first.fingerprint, second.fingerprint);
  emit_outputs(first, (dir_ / "out1").string());
  emit_outputs(second, (dir_ / "out2").string());
  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  };
  EXPECT_EQ(slurp(dir_ / "out1" / "metrics.csv"), slurp(dir_ / "out2" / "metrics.csv"));
}

TEST_F(ExperimentTest, SummaryJsonMirrorsEveryCsvRowBitExactly) {
  ExperimentConfig cfg = base_config();
  cfg.modes = {"TOP", "GOL"};
  const RunRecord record = run_experiment(cfg);
  emit_outputs(record, (dir_ / "out").string());
  std::ifstream csv_in(dir_ / "out" / "metrics.csv");
  std::string header;
  std::getline(csv_in, header);
  std::vector<std::string> csv_rows;
  std::string line;
  while (std::getline(csv_in, line)) csv_rows.push_back(line);
  std::ifstream json_in(dir_ / "out" / "summary.json");
  const nlohmann::json summary = nlohmann::json::parse(json_in);
  EXPECT_EQ(summary.at("csv_header").get<std::string>(), header);
  ASSERT_EQ(summary.at("rows").size(), csv_rows.size());
  for (std::size_t i = 0; i < csv_rows.size(); ++i) {
    EXPECT_EQ(summary.at("rows")[i].at("csv").get<std::string>(), csv_rows[i]);
  }
}

TEST_F(ExperimentTest, EmptyRecordEmitsHeaderOnlyCsv) {
  RunRecord record;
  record.config = base_config();
  emit_outputs(record, (dir_ / "empty").string());
  std::ifstream in(dir_ / "empty" / "metrics.csv");
  std::string header, extra;
  EXPECT_TRUE(static_cast<bool>(std::getline(in, header)));
  EXPECT_FALSE(static_cast<bool>(std::getline(in, extra)));
}

TEST_F(ExperimentTest, RowCountMatchesModesTimesFoldsTimesK) {
  ExperimentConfig cfg = base_config();
  cfg.modes = {"TOP", "GOL"};
  cfg.k_grid = {4};
  const RunRecord record = run_experiment(cfg);
  EXPECT_EQ(record.rows.size(), 4u);  // 2 modes x 2 folds x 1 k
  emit_outputs(record, (dir_ / "count").string());
  std::ifstream in(dir_ / "count" / "metrics.csv");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 5u);  // header + 4 rows
}

TEST_F(ExperimentTest, DimacsDumpsWrittenOnRequest) {
  ExperimentConfig cfg = base_config();
  cfg.modes = {"GOL"};
  cfg.k_grid = {4};
  cfg.emit_dimacs = true;
  const RunRecord record = run_experiment(cfg);
  EXPECT_EQ(record.dimacs_dumps.size(), 2u);  // one per fold
  emit_outputs(record, (dir_ / "dimacs").string());
  EXPECT_TRUE(fs::exists(dir_ / "dimacs" / "fold0_k4.dimacs"));
}

TEST_F(ExperimentTest, ConfigFileRoundTripAndOverrides) {
  std::ostringstream cfg_text;
  cfg_text << "dataset=" << dataset_path_ << "\n"
           << "format=double-colon\n"
           << "recommender=IB\n"
           << "k_grid=3,5\n"
           << "display=2\n"
           << "modes=TOP,GOL\n"
           << "folds=2\n"
           << "seed=9\n"
           << "min_user_ratings=4\n"
           << "min_item_ratings=1\n"
           << "clamp_display=true\n";
  std::istringstream in(cfg_text.str());
  ExperimentConfig cfg = load_config(in);
  EXPECT_EQ(cfg.k_grid, (std::vector<int>{3, 5}));
  EXPECT_EQ(cfg.modes, (std::vector<std::string>{"TOP", "GOL"}));
  apply_config_entry(cfg, "display", "3");
  EXPECT_EQ(cfg.display, 3);
  EXPECT_THROW(apply_config_entry(cfg, "no_such_key", "1"), DataError);
}

TEST_F(ExperimentTest, InvalidConfigsRejected) {
  ExperimentConfig cfg = base_config();
  cfg.folds = 1;
  EXPECT_THROW(run_experiment(cfg), DataError);
  cfg = base_config();
  cfg.k_grid = {1};  // below display
  EXPECT_THROW(run_experiment(cfg), DataError);
  cfg = base_config();
  cfg.modes = {};
  EXPECT_THROW(run_experiment(cfg), DataError);
  cfg = base_config();
  cfg.modes = {"CAT"};  // no categories file
  EXPECT_THROW(run_experiment(cfg), DataError);
}

TEST_F(ExperimentTest, WorkerPoolMatchesSequentialResults) {
  ExperimentConfig cfg = base_config();
  cfg.modes = {"TOP", "GOL", "AGG"};
  const RunRecord sequential = run_experiment(cfg);
  cfg.workers = 3;
  const RunRecord parallel = run_experiment(cfg);
  ASSERT_EQ(sequential.rows.size(), parallel.rows.size());
  for (std::size_t i = 0; i < sequential.rows.size(); ++i) {
    EXPECT_EQ(sequential.rows[i].discrepancy_raw, parallel.rows[i].discrepancy_raw);
    EXPECT_EQ(sequential.rows[i].metrics.precision, parallel.rows[i].metrics.precision);
  }
}

}  // namespace
}  // namespace recflow
