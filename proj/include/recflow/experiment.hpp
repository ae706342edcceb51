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

#ifndef RECFLOW_EXPERIMENT_HPP
#define RECFLOW_EXPERIMENT_HPP

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "recflow/common.hpp"
#include "recflow/constructions.hpp"
#include "recflow/dimacs.hpp"
#include "recflow/graph.hpp"
#include "recflow/greedy.hpp"
#include "recflow/metrics.hpp"
#include "recflow/ratings.hpp"
#include "recflow/relevance.hpp"
#include "recflow/rerankers.hpp"
#include "recflow/targets.hpp"

namespace recflow {

/// Everything a sweep needs, loadable from a key=value file with flag
/// overrides on top. Field names double as config keys.
struct ExperimentConfig {
  std::string dataset_path;
  RatingFormat format = RatingFormat::double_colon;
  std::string recommender = "IB";  // IB | UB | RW | imported
  std::string scores_path;         // for recommender=imported
  std::vector<int> k_grid{50, 100, 200, 300, 400, 500};
  int display = 10;                // c
  std::string target = "uniform";  // uniform | proportional | blend
  double blend_alpha = 0.5;
  std::vector<std::string> modes{"TOP", "GOL"};
  int folds = 10;
  std::uint64_t seed = 1;
  int user_batches = 1;
  int min_user_ratings = 20;
  int min_item_ratings = 10;
  double relevance_threshold = 3.0;
  double mu = 1.0;  // WGT
  int neighborhood_size = 100;
  bool inverted_ib = true;   // inverted neighborhoods for IB (off for UB)
  bool inverted_ub = false;
  double rw_alpha = 1.5;
  double bayes_alpha = 0.5;
  bool clamp_display = false;
  int two_slope_threshold = 20;
  int two_slope_s1 = 1;
  int two_slope_s2 = 2;
  GreedyConfig greedy;
  std::string categories_path;  // JSON {"categories":[per-item], "minimums":[...]}
  bool emit_dimacs = false;
  int workers = 1;

  void validate() const {
    if (folds < 2) throw DataError("config: folds must be >= 2");
    if (display < 1) throw DataError("config: display must be >= 1");
    for (int k : k_grid) {
      if (k < display) {
        throw DataError("config: k-grid entry " + std::to_string(k) +
                        " below display constant " + std::to_string(display));
      }
    }
    if (modes.empty()) throw DataError("config: no modes selected");
  }
};

/// One evaluated (fold, k, mode) cell.
struct RunRow {
  int fold = 0;
  int k = 0;
  std::string mode;
  MetricsReport metrics;
  long long discrepancy_raw = 0;
  double relevance = 0.0;  // total relevance of the chosen edges
  double wall_ms = 0.0;    // excluded from metrics.csv to keep reruns byte-identical
};

struct RunRecord {
  std::uint64_t fingerprint = 0;
  ExperimentConfig config;
  std::vector<RunRow> rows;
  std::vector<std::pair<std::string, std::string>> dimacs_dumps;  // (name, body)
};

// --- config file ----------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

inline RatingFormat parse_format(const std::string& name) {
  if (name == "double-colon" || name == "ml" || name == "::") {
    return RatingFormat::double_colon;
  }
  if (name == "comma" || name == "csv") return RatingFormat::comma;
  if (name == "tab" || name == "tsv") return RatingFormat::tab;
  throw DataError("unknown rating format '" + name + "'");
}

inline const char* format_name(RatingFormat f) {
  switch (f) {
    case RatingFormat::double_colon: return "double-colon";
    case RatingFormat::comma: return "comma";
    case RatingFormat::tab: return "tab";
  }
  return "?";
}

}  // namespace detail

inline void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                               const std::string& value) {
  if (key == "dataset") cfg.dataset_path = value;
  else if (key == "format") cfg.format = detail::parse_format(value);
  else if (key == "recommender") cfg.recommender = value;
  else if (key == "scores") cfg.scores_path = value;
  else if (key == "k_grid") {
    cfg.k_grid.clear();
    for (const std::string& part : detail::split_list(value)) {
      cfg.k_grid.push_back(std::stoi(part));
    }
  } else if (key == "display") cfg.display = std::stoi(value);
  else if (key == "target") cfg.target = value;
  else if (key == "blend_alpha") cfg.blend_alpha = std::stod(value);
  else if (key == "modes") cfg.modes = detail::split_list(value);
  else if (key == "folds") cfg.folds = std::stoi(value);
  else if (key == "seed") cfg.seed = std::stoull(value);
  else if (key == "user_batches") cfg.user_batches = std::stoi(value);
  else if (key == "min_user_ratings") cfg.min_user_ratings = std::stoi(value);
  else if (key == "min_item_ratings") cfg.min_item_ratings = std::stoi(value);
  else if (key == "relevance_threshold") cfg.relevance_threshold = std::stod(value);
  else if (key == "mu") cfg.mu = std::stod(value);
  else if (key == "neighborhood_size") cfg.neighborhood_size = std::stoi(value);
  else if (key == "inverted_ib") cfg.inverted_ib = value == "true" || value == "1";
  else if (key == "inverted_ub") cfg.inverted_ub = value == "true" || value == "1";
  else if (key == "rw_alpha") cfg.rw_alpha = std::stod(value);
  else if (key == "bayes_alpha") cfg.bayes_alpha = std::stod(value);
  else if (key == "clamp_display") cfg.clamp_display = value == "true" || value == "1";
  else if (key == "two_slope_threshold") cfg.two_slope_threshold = std::stoi(value);
  else if (key == "two_slope_s1") cfg.two_slope_s1 = std::stoi(value);
  else if (key == "two_slope_s2") cfg.two_slope_s2 = std::stoi(value);
  else if (key == "greedy_q_grid") {
    cfg.greedy.q_grid.clear();
    for (const std::string& part : detail::split_list(value)) {
      cfg.greedy.q_grid.push_back(std::stod(part));
    }
  } else if (key == "greedy_slack") cfg.greedy.slack = std::stod(value);
  else if (key == "categories") cfg.categories_path = value;
  else if (key == "emit_dimacs") cfg.emit_dimacs = value == "true" || value == "1";
  else if (key == "workers") cfg.workers = std::stoi(value);
  else throw DataError("unknown config key '" + key + "'");
}

inline ExperimentConfig load_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError("config line " + std::to_string(line_number) + " is not key=value");
    }
    apply_config_entry(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

/// Canonical config rendering; the fingerprint hashes this plus the byte
/// content of every referenced input file.
inline std::string canonical_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "dataset=" << cfg.dataset_path << '\n'
      << "format=" << detail::format_name(cfg.format) << '\n'
      << "recommender=" << cfg.recommender << '\n'
      << "scores=" << cfg.scores_path << '\n';
  out << "k_grid=";
  for (std::size_t i = 0; i < cfg.k_grid.size(); ++i) out << (i ? "," : "") << cfg.k_grid[i];
  out << '\n' << "display=" << cfg.display << '\n'
      << "target=" << cfg.target << '\n'
      << "blend_alpha=" << format_double(cfg.blend_alpha) << '\n';
  out << "modes=";
  for (std::size_t i = 0; i < cfg.modes.size(); ++i) out << (i ? "," : "") << cfg.modes[i];
  out << '\n' << "folds=" << cfg.folds << '\n'
      << "seed=" << cfg.seed << '\n'
      << "user_batches=" << cfg.user_batches << '\n'
      << "min_user_ratings=" << cfg.min_user_ratings << '\n'
      << "min_item_ratings=" << cfg.min_item_ratings << '\n'
      << "relevance_threshold=" << format_double(cfg.relevance_threshold) << '\n'
      << "mu=" << format_double(cfg.mu) << '\n'
      << "neighborhood_size=" << cfg.neighborhood_size << '\n'
      << "inverted_ib=" << cfg.inverted_ib << '\n'
      << "inverted_ub=" << cfg.inverted_ub << '\n'
      << "rw_alpha=" << format_double(cfg.rw_alpha) << '\n'
      << "bayes_alpha=" << format_double(cfg.bayes_alpha) << '\n'
      << "clamp_display=" << cfg.clamp_display << '\n'
      << "two_slope=" << cfg.two_slope_threshold << ',' << cfg.two_slope_s1 << ','
      << cfg.two_slope_s2 << '\n';
  out << "greedy_q_grid=";
  for (std::size_t i = 0; i < cfg.greedy.q_grid.size(); ++i) {
    out << (i ? "," : "") << format_double(cfg.greedy.q_grid[i]);
  }
  out << '\n' << "greedy_slack=" << format_double(cfg.greedy.slack) << '\n'
      << "categories=" << cfg.categories_path << '\n';
  return out.str();
}

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline CategorySpec load_categories(const std::string& path) {
  const std::string body = read_file(path);
  nlohmann::json doc = nlohmann::json::parse(body);
  CategorySpec cats;
  for (const auto& c : doc.at("categories")) cats.category_of.push_back(c.get<int>());
  for (const auto& a : doc.at("minimums")) cats.minimums.push_back(a.get<long long>());
  return cats;
}

// Binary relevance for the CDG-bin mode: an edge counts when it sits in
// its user's top-`display` candidates by predicted relevance.
inline std::vector<char> top_display_flags(const CandidateGraph& g) {
  std::vector<char> flags(g.edges.size(), false);
  std::vector<int> order;
  for (int u = 0; u < g.user_count; ++u) {
    order.clear();
    for (std::size_t idx = g.offsets[static_cast<std::size_t>(u)];
         idx < g.offsets[static_cast<std::size_t>(u) + 1]; ++idx) {
      order.push_back(static_cast<int>(idx));
    }
    std::sort(order.begin(), order.end(), [&g](int a, int b) {
      const CandidateEdge& ea = g.edges[static_cast<std::size_t>(a)];
      const CandidateEdge& eb = g.edges[static_cast<std::size_t>(b)];
      return ea.weight_fp != eb.weight_fp ? ea.weight_fp > eb.weight_fp : ea.item < eb.item;
    });
    const int take = std::min<int>(g.display[static_cast<std::size_t>(u)],
                                   static_cast<int>(order.size()));
    for (int i = 0; i < take; ++i) flags[static_cast<std::size_t>(order[i])] = true;
  }
  return flags;
}

struct BatchView {
  CandidateGraph graph;
  std::vector<int> parent_edge;  // batch edge index -> parent edge index
  std::vector<int> users;        // batch user -> parent user
};

inline std::vector<BatchView> split_batches(const CandidateGraph& g, int batches) {
  std::vector<BatchView> views(static_cast<std::size_t>(batches));
  for (int b = 0; b < batches; ++b) {
    const int lo = static_cast<int>(static_cast<long long>(g.user_count) * b / batches);
    const int hi = static_cast<int>(static_cast<long long>(g.user_count) * (b + 1) / batches);
    BatchView& view = views[static_cast<std::size_t>(b)];
    view.graph.user_count = hi - lo;
    view.graph.item_count = g.item_count;
    for (int u = lo; u < hi; ++u) {
      view.users.push_back(u);
      view.graph.display.push_back(g.display[static_cast<std::size_t>(u)]);
      for (std::size_t idx = g.offsets[static_cast<std::size_t>(u)];
           idx < g.offsets[static_cast<std::size_t>(u) + 1]; ++idx) {
        CandidateEdge e = g.edges[idx];
        e.user = u - lo;
        view.graph.edges.push_back(e);
        view.parent_edge.push_back(static_cast<int>(idx));
      }
    }
    view.graph.finalize();
  }
  return views;
}

// Rescales a real target to a batch's display total; spill units are
// rounded back in by largest remainder.
inline TargetDistribution scale_target(const TargetDistribution& t, long long batch_total,
                                       long long full_total) {
  TargetDistribution scaled;
  scaled.real.resize(t.real.size());
  for (std::size_t j = 0; j < t.real.size(); ++j) {
    scaled.real[j] = full_total > 0
                         ? t.real[j] * static_cast<double>(batch_total) /
                               static_cast<double>(full_total)
                         : 0.0;
  }
  scaled.counts = largest_remainder_round(scaled.real, batch_total);
  return scaled;
}

}  // namespace detail

/// Solves one diversification mode over a candidate graph. Flow modes
/// honor `user_batches` by solving per-batch against rescaled targets and
/// merging; rerankers and greedy are per-user and run globally.
inline SolutionSubgraph solve_mode(const CandidateGraph& g, const TargetDistribution& t,
                                   const std::string& mode, const ExperimentConfig& cfg,
                                   const SeenModel& seen, std::size_t user_population,
                                   std::uint64_t greedy_seed,
                                   const CategorySpec* cats) {
  const auto flow_solve = [&](const CandidateGraph& graph,
                              const TargetDistribution& target) -> SolutionSubgraph {
    if (mode == "GOL") return two_pass(graph, target).subgraph;
    if (mode == "AGG") return max_aggdiv(graph).subgraph;
    if (mode == "WGT") return weighted(graph, target, cfg.mu).subgraph;
    if (mode == "CDG-bin") {
      return binary_cdg(graph, target, detail::top_display_flags(graph)).subgraph;
    }
    if (mode == "CDG-full") return full_cdg(graph, target).subgraph;
    if (mode == "2SLOPE") {
      return two_slope(graph, target, cfg.two_slope_threshold,
                       {cfg.two_slope_s1, cfg.two_slope_s2})
          .subgraph;
    }
    throw DataError("unknown flow mode '" + mode + "'");
  };

  if (mode == "TOP") return rerank_top(g);
  if (mode == "PC") return rerank_pc(g, seen);
  if (mode == "FD") return rerank_fd(g, seen, user_population);
  if (mode == "AB") return rerank_bayes(g, cfg.bayes_alpha);
  if (mode == "GRD") {
    GreedyConfig greedy = cfg.greedy;
    greedy.seed = greedy_seed;
    return greedy_sweep(g, t, greedy);
  }
  if (mode == "CAT") {
    if (cats == nullptr) throw DataError("CAT mode needs a categories file");
    // Category floors are global constraints; batching is not applied.
    return min_discrepancy_with_categories(g, t, *cats).subgraph;
  }

  if (cfg.user_batches <= 1) return flow_solve(g, t);

  const long long full_total = g.total_display();
  SolutionSubgraph merged;
  merged.parent = &g;
  for (detail::BatchView& view : detail::split_batches(g, cfg.user_batches)) {
    const TargetDistribution scaled =
        detail::scale_target(t, view.graph.total_display(), full_total);
    const SolutionSubgraph part = flow_solve(view.graph, scaled);
    for (int e : part.chosen) {
      merged.chosen.push_back(view.parent_edge[static_cast<std::size_t>(e)]);
    }
  }
  std::sort(merged.chosen.begin(), merged.chosen.end());
  merged.rank_by_weight();
  check_solution_degrees(merged);
  return merged;
}

/// Ingest -> score -> threshold -> target -> diversify -> evaluate, over
/// every fold x k x mode combination. Runtime cross-checks: the two-pass
/// solution is never beaten on discrepancy by another mode on the same
/// instance, and its discrepancy is non-increasing along a nested k-grid
/// when the target does not depend on k.
inline RunRecord run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  RunRecord record;
  record.config = cfg;
  {
    std::uint64_t h = fnv1a(canonical_config(cfg));
    h = fnv1a(detail::read_file(cfg.dataset_path), h);
    if (!cfg.scores_path.empty()) h = fnv1a(detail::read_file(cfg.scores_path), h);
    if (!cfg.categories_path.empty()) h = fnv1a(detail::read_file(cfg.categories_path), h);
    record.fingerprint = h;
  }

  RatingDataset ds;
  {
    std::ifstream in(cfg.dataset_path, std::ios::binary);
    if (!in) throw DataError("cannot open dataset '" + cfg.dataset_path + "'");
    ds = parse_ratings(in, cfg.format);
  }
  ds = prefilter(ds, cfg.min_user_ratings, cfg.min_item_ratings);

  CategorySpec cats;
  const bool want_categories =
      std::find(cfg.modes.begin(), cfg.modes.end(), "CAT") != cfg.modes.end();
  if (want_categories) {
    if (cfg.categories_path.empty()) throw DataError("CAT mode needs categories=");
    cats = detail::load_categories(cfg.categories_path);
  }

  std::vector<int> k_grid = cfg.k_grid;
  std::sort(k_grid.begin(), k_grid.end());

  for (int fold = 0; fold < cfg.folds; ++fold) {
    const std::string stage_fold = "fold " + std::to_string(fold);
    FoldSplit split = make_fold(ds, cfg.folds, cfg.relevance_threshold, cfg.seed, fold);

    RelevanceFunction rel;
    try {
      if (cfg.recommender == "IB") {
        rel = score_item_based(split.train, {cfg.neighborhood_size, cfg.inverted_ib});
      } else if (cfg.recommender == "UB") {
        rel = score_user_based(split.train, {cfg.neighborhood_size, cfg.inverted_ub});
      } else if (cfg.recommender == "RW") {
        rel = score_random_walk(split.train, cfg.rw_alpha);
      } else if (cfg.recommender == "imported") {
        std::ifstream scores(cfg.scores_path, std::ios::binary);
        if (!scores) throw DataError("cannot open scores '" + cfg.scores_path + "'");
        rel = import_scores(scores, &split.train);
      } else {
        throw DataError("unknown recommender '" + cfg.recommender + "'");
      }
    } catch (const Error& e) {
      throw DataError(stage_fold + ", scoring: " + e.what());
    }
    const SeenModel seen = make_seen_model(split.train);

    long long previous_gol = -1;
    long long previous_display = -1;
    for (int k : k_grid) {
      const std::string stage = stage_fold + ", k=" + std::to_string(k);
      CandidateGraph g = top_k_candidates(rel, k, cfg.display);
      if (cfg.clamp_display) g = clamp_display(g);

      TargetDistribution target;
      if (cfg.target == "uniform") {
        target = uniform_target(g);
      } else if (cfg.target == "proportional") {
        target = proportional_target(g);
      } else if (cfg.target == "blend") {
        target = blend_target(uniform_target(g), proportional_target(g), cfg.blend_alpha,
                              g.total_display());
      } else {
        throw DataError(stage + ": unknown target '" + cfg.target + "'");
      }
      if (want_categories) cats.validate(target, g.total_display());

      struct ModeOutcome {
        SolutionSubgraph solution;
        double wall_ms = 0.0;
      };
      std::vector<ModeOutcome> outcomes(cfg.modes.size());
      const auto run_one = [&](std::size_t m) {
        const auto start = std::chrono::steady_clock::now();
        outcomes[m].solution = solve_mode(
            g, target, cfg.modes[m], cfg, seen, split.train.user_ids.size(),
            mix_seed(cfg.seed, (static_cast<std::uint64_t>(fold) << 20) ^
                                   static_cast<std::uint64_t>(k)),
            want_categories ? &cats : nullptr);
        outcomes[m].wall_ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - start)
                                  .count();
      };
      try {
        if (cfg.workers > 1) {
          std::vector<std::future<void>> jobs;
          for (std::size_t m = 0; m < cfg.modes.size(); ++m) {
            jobs.push_back(std::async(std::launch::async, run_one, m));
            if (static_cast<int>(jobs.size()) == cfg.workers) {
              for (auto& job : jobs) job.get();
              jobs.clear();
            }
          }
          for (auto& job : jobs) job.get();
        } else {
          for (std::size_t m = 0; m < cfg.modes.size(); ++m) run_one(m);
        }
      } catch (const Error& e) {
        throw Error(stage + ": " + e.what());
      }

      long long gol_discrepancy = -1;
      for (std::size_t m = 0; m < cfg.modes.size(); ++m) {
        RunRow row;
        row.fold = fold;
        row.k = k;
        row.mode = cfg.modes[m];
        row.metrics = evaluate(outcomes[m].solution, target, split.test_relevant, cfg.display);
        row.discrepancy_raw = discrepancy_of(indegree_vector(outcomes[m].solution), target);
        row.relevance = from_fixed(outcomes[m].solution.total_relevance_fp());
        row.wall_ms = outcomes[m].wall_ms;
        if (cfg.modes[m] == "GOL") gol_discrepancy = row.discrepancy_raw;
        record.rows.push_back(std::move(row));
      }
      if (gol_discrepancy >= 0 && cfg.user_batches <= 1) {
        for (std::size_t m = 0; m < cfg.modes.size(); ++m) {
          const RunRow& row = record.rows[record.rows.size() - cfg.modes.size() + m];
          if (row.discrepancy_raw < gol_discrepancy) {
            throw InternalError(stage + ": mode " + row.mode +
                                " beat the flow optimum on discrepancy");
          }
        }
        // Nested candidate sets with an unchanged target can only help
        // the optimizer; clamping may alter display totals across k, in
        // which case the comparison is void.
        if (cfg.target == "uniform" && g.total_display() == previous_display) {
          if (previous_gol >= 0 && gol_discrepancy > previous_gol) {
            throw InternalError(stage + ": discrepancy increased on a nested k sweep");
          }
        }
        previous_gol = gol_discrepancy;
        previous_display = g.total_display();
      }
      if (cfg.emit_dimacs) {
        std::ostringstream name;
        name << "fold" << fold << "_k" << k << ".dimacs";
        std::ostringstream body;
        write_dimacs(build_discrepancy_network(g, target), body);
        record.dimacs_dumps.emplace_back(name.str(), body.str());
      }
    }
  }
  return record;
}

// --- output emission ------------------------------------------------------

namespace detail {

inline const char* kCsvHeader =
    "dataset,recommender,target,mode,k,fold,n,D,A,G,E,P,CG,DCG,discrepancy,relevance";

inline std::string csv_row(const RunRecord& record, const RunRow& row) {
  std::ostringstream out;
  out << record.config.dataset_path << ',' << record.config.recommender << ','
      << record.config.target << ',' << row.mode << ',' << row.k << ',' << row.fold << ','
      << row.metrics.n << ',' << format_double(row.metrics.discrepancy_normalized) << ','
      << format_double(row.metrics.aggdiv_fraction) << ','
      << format_double(row.metrics.gini_index) << ','
      << format_double(row.metrics.entropy_nats) << ','
      << format_double(row.metrics.precision) << ',' << format_double(row.metrics.cg)
      << ',' << format_double(row.metrics.dcg) << ',' << row.discrepancy_raw << ','
      << format_double(row.relevance);
  return out.str();
}

}  // namespace detail

/// Writes metrics.csv, summary.json, tradeoff.csv and any DIMACS dumps.
/// Rerunning an identical config reproduces metrics.csv byte for byte;
/// wall-clock numbers live only in summary.json. The JSON mirrors every
/// CSV cell as the same formatted string.
inline std::vector<std::string> emit_outputs(const RunRecord& record,
                                             const std::string& outdir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec) throw DataError("cannot create output directory '" + outdir + "'");
  std::vector<std::string> written;

  const fs::path csv_path = fs::path(outdir) / "metrics.csv";
  {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw DataError("cannot write '" + csv_path.string() + "'");
    csv << detail::kCsvHeader << '\n';
    for (const RunRow& row : record.rows) csv << detail::csv_row(record, row) << '\n';
  }
  written.push_back(csv_path.string());

  nlohmann::json summary;
  summary["fingerprint"] = record.fingerprint;
  summary["config"] = canonical_config(record.config);
  summary["csv_header"] = detail::kCsvHeader;
  nlohmann::json rows = nlohmann::json::array();
  for (const RunRow& row : record.rows) {
    nlohmann::json r;
    r["csv"] = detail::csv_row(record, row);
    r["wall_ms"] = row.wall_ms;
    rows.push_back(std::move(r));
  }
  summary["rows"] = std::move(rows);

  // Fold means per (mode, k), plus signed-rank significance against TOP.
  std::map<std::pair<std::string, int>, std::vector<const RunRow*>> groups;
  for (const RunRow& row : record.rows) groups[{row.mode, row.k}].push_back(&row);
  nlohmann::json aggregates = nlohmann::json::array();
  for (const auto& [key, group] : groups) {
    double mean_d = 0.0, mean_p = 0.0, mean_a = 0.0, mean_g = 0.0, mean_e = 0.0;
    for (const RunRow* row : group) {
      mean_d += row->metrics.discrepancy_normalized;
      mean_p += row->metrics.precision;
      mean_a += row->metrics.aggdiv_fraction;
      mean_g += row->metrics.gini_index;
      mean_e += row->metrics.entropy_nats;
    }
    const double count = static_cast<double>(group.size());
    nlohmann::json entry;
    entry["mode"] = key.first;
    entry["k"] = key.second;
    entry["folds"] = group.size();
    entry["mean_D"] = format_double(mean_d / count);
    entry["mean_P"] = format_double(mean_p / count);
    entry["mean_A"] = format_double(mean_a / count);
    entry["mean_G"] = format_double(mean_g / count);
    entry["mean_E"] = format_double(mean_e / count);
    const auto top = groups.find({std::string("TOP"), key.second});
    if (key.first != "TOP" && top != groups.end() &&
        top->second.size() == group.size() && group.size() >= 5) {
      std::vector<double> top_p, mode_p;
      for (std::size_t i = 0; i < group.size(); ++i) {
        top_p.push_back(top->second[i]->metrics.precision);
        mode_p.push_back(group[i]->metrics.precision);
      }
      const auto [stat, p_value] = signed_rank(top_p, mode_p);
      entry["precision_signed_rank_stat"] = format_double(stat);
      entry["precision_signed_rank_p"] = format_double(p_value);
    }
    aggregates.push_back(std::move(entry));
  }
  summary["aggregates"] = std::move(aggregates);

  const fs::path json_path = fs::path(outdir) / "summary.json";
  {
    std::ofstream json_file(json_path, std::ios::binary);
    if (!json_file) throw DataError("cannot write '" + json_path.string() + "'");
    json_file << summary.dump(2) << '\n';
  }
  written.push_back(json_path.string());

  // Plot-ready trade-off series: mean discrepancy vs mean precision per
  // mode as k grows.
  const fs::path tradeoff_path = fs::path(outdir) / "tradeoff.csv";
  {
    std::ofstream tradeoff(tradeoff_path, std::ios::binary);
    if (!tradeoff) throw DataError("cannot write '" + tradeoff_path.string() + "'");
    tradeoff << "mode,k,mean_D,mean_P\n";
    for (const auto& [key, group] : groups) {
      double mean_d = 0.0, mean_p = 0.0;
      for (const RunRow* row : group) {
        mean_d += row->metrics.discrepancy_normalized;
        mean_p += row->metrics.precision;
      }
      const double count = static_cast<double>(group.size());
      tradeoff << key.first << ',' << key.second << ',' << format_double(mean_d / count)
               << ',' << format_double(mean_p / count) << '\n';
    }
  }
  written.push_back(tradeoff_path.string());

  for (const auto& [name, body] : record.dimacs_dumps) {
    const fs::path dimacs_path = fs::path(outdir) / name;
    std::ofstream out(dimacs_path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + dimacs_path.string() + "'");
    out << body;
    written.push_back(dimacs_path.string());
  }
  return written;
}

}  // namespace recflow

#endif  // RECFLOW_EXPERIMENT_HPP
