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

// Command-line front end: ingest ratings, score them, build candidate
// supergraphs, diversify with any of the flow/reranking/greedy modes,
// evaluate solutions, run full sweeps, and export flow networks as DIMACS.
//
// Exit codes: 0 ok, 1 usage, 2 data error, 3 infeasible instance.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "recflow/recflow.hpp"

namespace {

using recflow::CandidateGraph;
using recflow::CategorySpec;
using recflow::DiscrepancyResult;
using recflow::ExperimentConfig;
using recflow::RatingDataset;
using recflow::RelevanceFunction;
using recflow::SolutionSubgraph;
using recflow::TargetDistribution;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw recflow::DataError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw recflow::DataError("cannot write '" + path + "'");
  return out;
}

TargetDistribution make_target(const CandidateGraph& g, const std::string& kind,
                               double alpha, const std::string& target_file) {
  if (!target_file.empty()) {
    auto in = open_input(target_file);
    return recflow::read_target_tsv(in);
  }
  if (kind == "uniform") return recflow::uniform_target(g);
  if (kind == "proportional") return recflow::proportional_target(g);
  if (kind == "blend") {
    return recflow::blend_target(recflow::uniform_target(g),
                                 recflow::proportional_target(g), alpha,
                                 g.total_display());
  }
  throw recflow::DataError("unknown target kind '" + kind + "'");
}

CategorySpec load_categories_file(const std::string& path) {
  auto in = open_input(path);
  nlohmann::json doc = nlohmann::json::parse(in);
  CategorySpec cats;
  for (const auto& c : doc.at("categories")) cats.category_of.push_back(c.get<int>());
  for (const auto& a : doc.at("minimums")) cats.minimums.push_back(a.get<long long>());
  return cats;
}

struct DiversifyArgs {
  std::string graph_path;
  std::string mode = "GOL";
  std::string target_kind = "uniform";
  std::string target_file;
  double blend_alpha = 0.5;
  double mu = 1.0;
  double bayes_alpha = 0.5;
  std::string categories_path;
  bool clamp = false;
  int two_slope_threshold = 20;
  int two_slope_s1 = 1;
  int two_slope_s2 = 2;
  std::uint64_t seed = 1;
  std::string output;
  std::string summary_path;
};

void add_diversify_options(CLI::App* cmd, DiversifyArgs& args, bool with_outputs) {
  cmd->add_option("--graph", args.graph_path, "candidate graph TSV")->required();
  cmd->add_option("--mode", args.mode,
                  "TOP|AGG|PC|FD|AB|GOL|WGT|GRD|CDG-bin|CDG-full|CAT|2SLOPE");
  cmd->add_option("--target", args.target_kind, "uniform|proportional|blend");
  cmd->add_option("--target-file", args.target_file, "explicit target TSV");
  cmd->add_option("--alpha", args.blend_alpha, "blend coefficient");
  cmd->add_option("--mu", args.mu, "weighted-method coefficient");
  cmd->add_option("--bayes-alpha", args.bayes_alpha, "Bayes reranking exponent");
  cmd->add_option("--categories", args.categories_path, "category spec JSON");
  cmd->add_flag("--clamp-display", args.clamp,
                "clamp display constraints to candidate counts");
  cmd->add_option("--two-slope-threshold", args.two_slope_threshold, "knee width");
  cmd->add_option("--two-slope-s1", args.two_slope_s1, "first overflow slope");
  cmd->add_option("--two-slope-s2", args.two_slope_s2, "second overflow slope");
  cmd->add_option("--seed", args.seed, "greedy seed");
  if (with_outputs) {
    cmd->add_option("--output", args.output, "solution TSV path")->required();
    cmd->add_option("--summary", args.summary_path, "JSON summary path");
  }
}

int run_diversify(const DiversifyArgs& args) {
  auto graph_in = open_input(args.graph_path);
  CandidateGraph g = recflow::read_graph_tsv(graph_in);
  if (args.clamp) g = recflow::clamp_display(g);
  const TargetDistribution target =
      make_target(g, args.target_kind, args.blend_alpha, args.target_file);

  const auto start = std::chrono::steady_clock::now();
  SolutionSubgraph solution;
  long long discrepancy = 0;
  long long flow_cost = 0;
  recflow::Fixed relevance_fp = 0;
  std::vector<std::string> warnings;
  const auto take = [&](DiscrepancyResult&& r) {
    discrepancy = r.discrepancy;
    flow_cost = r.flow_cost;
    relevance_fp = r.total_relevance_fp;
    warnings = std::move(r.warnings);
    solution = std::move(r.subgraph);
  };
  if (args.mode == "GOL") {
    take(recflow::two_pass(g, target));
  } else if (args.mode == "AGG") {
    take(recflow::max_aggdiv(g));
  } else if (args.mode == "WGT") {
    take(recflow::weighted(g, target, args.mu));
  } else if (args.mode == "CDG-bin") {
    take(recflow::binary_cdg(g, target, recflow::detail::top_display_flags(g)));
  } else if (args.mode == "CDG-full") {
    take(recflow::full_cdg(g, target));
  } else if (args.mode == "CAT") {
    if (args.categories_path.empty()) {
      throw recflow::DataError("CAT mode needs --categories");
    }
    take(recflow::min_discrepancy_with_categories(
        g, target, load_categories_file(args.categories_path)));
  } else if (args.mode == "2SLOPE") {
    take(recflow::two_slope(g, target, args.two_slope_threshold,
                            {args.two_slope_s1, args.two_slope_s2}));
  } else {
    if (args.mode == "TOP") {
      solution = recflow::rerank_top(g);
    } else if (args.mode == "AB") {
      solution = recflow::rerank_bayes(g, args.bayes_alpha);
    } else if (args.mode == "GRD") {
      recflow::GreedyConfig greedy;
      greedy.seed = args.seed;
      solution = recflow::greedy_sweep(g, target, greedy);
    } else if (args.mode == "PC" || args.mode == "FD") {
      throw recflow::DataError(
          args.mode + " reranking needs training data; use the sweep subcommand");
    } else {
      throw recflow::DataError("unknown mode '" + args.mode + "'");
    }
    discrepancy = recflow::discrepancy_of(recflow::indegree_vector(solution), target);
    relevance_fp = solution.total_relevance_fp();
  }
  const double wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();

  for (const std::string& w : warnings) std::cerr << "warning: " << w << '\n';
  {
    auto out = open_output(args.output);
    recflow::write_solution_tsv(solution, out);
  }
  nlohmann::json summary;
  summary["mode"] = args.mode;
  summary["discrepancy"] = discrepancy;
  summary["relevance"] = recflow::from_fixed(relevance_fp);
  summary["flow_cost"] = flow_cost;
  summary["wall_ms"] = wall_ms;
  if (!args.summary_path.empty()) {
    auto out = open_output(args.summary_path);
    out << summary.dump(2) << '\n';
  }
  std::cout << summary.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diversity-optimized recommendation subgraphs via min-cost flow"};
  app.require_subcommand(1);

  // --- ingest ---------------------------------------------------------------
  std::string in_path, out_path, format_name = "double-colon";
  int min_user = 20, min_item = 10;
  auto* ingest = app.add_subcommand("ingest", "parse + prefilter a rating file");
  ingest->add_option("--input", in_path, "rating file")->required();
  ingest->add_option("--format", format_name, "double-colon|comma|tab");
  ingest->add_option("--min-user-ratings", min_user, "user support floor");
  ingest->add_option("--min-item-ratings", min_item, "item support floor");
  ingest->add_option("--output", out_path, "canonical TSV output")->required();

  // --- score ----------------------------------------------------------------
  std::string score_in, score_out, recommender = "IB", scores_path, emit = "graph";
  std::string score_format = "tab";
  int neighborhood = 100, top_k = 100, display = 10;
  double rw_alpha = 1.5;
  bool inverted = false, no_inverted = false;
  auto* score = app.add_subcommand("score", "train a CF scorer and emit scores or a graph");
  score->add_option("--input", score_in, "canonical ratings TSV")->required();
  score->add_option("--format", score_format, "double-colon|comma|tab");
  score->add_option("--recommender", recommender, "IB|UB|RW|imported");
  score->add_option("--scores", scores_path, "score TSV for recommender=imported");
  score->add_option("--neighborhood", neighborhood, "neighborhood size");
  score->add_flag("--inverted", inverted, "force inverted neighborhoods");
  score->add_flag("--no-inverted", no_inverted, "force direct neighborhoods");
  score->add_option("--rw-alpha", rw_alpha, "random-walk transition exponent");
  score->add_option("--emit", emit, "scores|graph");
  score->add_option("--k", top_k, "candidates per user (graph emission)");
  score->add_option("--display", display, "display constraint (graph emission)");
  score->add_option("--output", score_out, "output path")->required();

  // --- diversify --------------------------------------------------------------
  DiversifyArgs dargs;
  auto* diversify = app.add_subcommand("diversify", "select a recommendation subgraph");
  add_diversify_options(diversify, dargs, true);

  // --- evaluate ---------------------------------------------------------------
  std::string eval_graph, eval_solution, eval_test, eval_out;
  std::string eval_target = "uniform", eval_target_file;
  double eval_alpha = 0.5;
  int eval_n = 10;
  auto* evaluate = app.add_subcommand("evaluate", "metric panel for a solution");
  evaluate->add_option("--graph", eval_graph, "candidate graph TSV")->required();
  evaluate->add_option("--solution", eval_solution, "solution TSV")->required();
  evaluate->add_option("--target", eval_target, "uniform|proportional|blend");
  evaluate->add_option("--target-file", eval_target_file, "explicit target TSV");
  evaluate->add_option("--alpha", eval_alpha, "blend coefficient");
  evaluate->add_option("--test", eval_test, "held-out relevant pairs TSV (user item)");
  evaluate->add_option("--n", eval_n, "metric cutoff label");
  evaluate->add_option("--output", eval_out, "JSON output (default stdout)");

  // --- sweep ------------------------------------------------------------------
  std::string config_path, sweep_out = "out";
  std::vector<std::string> overrides;
  auto* sweep = app.add_subcommand("sweep", "full cross-validated experiment");
  sweep->add_option("--config", config_path, "key=value experiment config")->required();
  sweep->add_option("--set", overrides, "config overrides key=value")->take_all();
  sweep->add_option("--out", sweep_out, "output directory");

  // --- export-dimacs ------------------------------------------------------------
  DiversifyArgs xargs;
  std::string dimacs_out;
  auto* export_dimacs =
      app.add_subcommand("export-dimacs", "emit a mode's flow network in DIMACS");
  add_diversify_options(export_dimacs, xargs, false);
  export_dimacs->add_option("--output", dimacs_out, "DIMACS output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*ingest) {
      auto in = open_input(in_path);
      RatingDataset ds = recflow::parse_ratings(in, recflow::detail::parse_format(format_name));
      ds = recflow::prefilter(ds, min_user, min_item);
      auto out = open_output(out_path);
      recflow::write_canonical_tsv(ds, out);
      std::cout << "users=" << ds.user_count() << " items=" << ds.item_count()
                << " ratings=" << ds.triples.size()
                << " duplicates=" << ds.duplicate_count << '\n';
    } else if (*score) {
      auto in = open_input(score_in);
      RatingDataset ds = recflow::parse_ratings(in, recflow::detail::parse_format(score_format));
      RelevanceFunction rel;
      if (recommender == "IB" || recommender == "UB") {
        bool use_inverted = recommender == "IB";  // mirrors the sweep defaults
        if (inverted) use_inverted = true;
        if (no_inverted) use_inverted = false;
        rel = recommender == "IB"
                  ? recflow::score_item_based(ds, {neighborhood, use_inverted})
                  : recflow::score_user_based(ds, {neighborhood, use_inverted});
      } else if (recommender == "RW") {
        rel = recflow::score_random_walk(ds, rw_alpha);
      } else if (recommender == "imported") {
        auto scores_in = open_input(scores_path);
        rel = recflow::import_scores(scores_in, &ds);
      } else {
        throw recflow::DataError("unknown recommender '" + recommender + "'");
      }
      auto out = open_output(score_out);
      if (emit == "scores") {
        recflow::export_scores(rel, out);
      } else if (emit == "graph") {
        recflow::write_graph_tsv(recflow::top_k_candidates(rel, top_k, display), out);
      } else {
        throw recflow::DataError("unknown emission '" + emit + "'");
      }
    } else if (*diversify) {
      return run_diversify(dargs);
    } else if (*evaluate) {
      auto graph_in = open_input(eval_graph);
      const CandidateGraph g = recflow::read_graph_tsv(graph_in);
      auto solution_in = open_input(eval_solution);
      const SolutionSubgraph h = recflow::read_solution_tsv(g, solution_in);
      const TargetDistribution target =
          make_target(g, eval_target, eval_alpha, eval_target_file);
      std::vector<std::pair<int, int>> relevant;
      if (!eval_test.empty()) {
        auto test_in = open_input(eval_test);
        std::string line;
        while (std::getline(test_in, line)) {
          if (line.empty() || line[0] == '#') continue;
          std::istringstream row(line);
          int u = 0, v = 0;
          if (row >> u >> v) relevant.emplace_back(u, v);
        }
        std::sort(relevant.begin(), relevant.end());
      }
      const recflow::MetricsReport report = recflow::evaluate(h, target, relevant, eval_n);
      nlohmann::json doc;
      doc["n"] = report.n;
      doc["D"] = report.discrepancy_normalized;
      doc["A"] = report.aggdiv_fraction;
      doc["G"] = report.gini_index;
      doc["E"] = report.entropy_nats;
      doc["P"] = report.precision;
      doc["CG"] = report.cg;
      doc["DCG"] = report.dcg;
      if (eval_out.empty()) {
        std::cout << doc.dump(2) << '\n';
      } else {
        auto out = open_output(eval_out);
        out << doc.dump(2) << '\n';
      }
    } else if (*sweep) {
      auto config_in = open_input(config_path);
      ExperimentConfig cfg = recflow::load_config(config_in);
      for (const std::string& entry : overrides) {
        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos) {
          throw recflow::DataError("override '" + entry + "' is not key=value");
        }
        recflow::apply_config_entry(cfg, entry.substr(0, eq), entry.substr(eq + 1));
      }
      if (const char* workers = std::getenv("RECFLOW_WORKERS")) {
        cfg.workers = std::max(1, std::atoi(workers));
      }
      recflow::RunRecord record;
      try {
        record = recflow::run_experiment(cfg);
      } catch (...) {
        // Flush whatever completed before the failing stage.
        if (!record.rows.empty()) recflow::emit_outputs(record, sweep_out);
        throw;
      }
      for (const std::string& file : recflow::emit_outputs(record, sweep_out)) {
        std::cout << file << '\n';
      }
    } else if (*export_dimacs) {
      auto graph_in = open_input(xargs.graph_path);
      CandidateGraph g = recflow::read_graph_tsv(graph_in);
      if (xargs.clamp) g = recflow::clamp_display(g);
      const TargetDistribution target =
          make_target(g, xargs.target_kind, xargs.blend_alpha, xargs.target_file);
      recflow::FlowNetwork net;
      if (xargs.mode == "GOL" || xargs.mode == "discrepancy") {
        net = recflow::build_discrepancy_network(g, target);
      } else if (xargs.mode == "two-pass") {
        net = recflow::build_two_pass_network(g, target);
      } else if (xargs.mode == "AGG") {
        net = recflow::build_aggdiv_network(g);
      } else if (xargs.mode == "WGT") {
        net = recflow::build_weighted_network(g, target, xargs.mu);
      } else if (xargs.mode == "CDG-bin") {
        net = recflow::build_binary_cdg_network(g, target,
                                                recflow::detail::top_display_flags(g));
      } else if (xargs.mode == "CDG-full") {
        net = recflow::build_full_cdg_network(g, target);
      } else if (xargs.mode == "CAT") {
        if (xargs.categories_path.empty()) {
          throw recflow::DataError("CAT mode needs --categories");
        }
        net = recflow::build_category_network(g, target,
                                              load_categories_file(xargs.categories_path));
      } else if (xargs.mode == "2SLOPE") {
        net = recflow::build_two_slope_network(
            g, target, xargs.two_slope_threshold,
            {xargs.two_slope_s1, xargs.two_slope_s2});
      } else {
        throw recflow::DataError("mode '" + xargs.mode + "' has no flow network");
      }
      auto out = open_output(dimacs_out);
      recflow::write_dimacs(net, out);
      std::cout << "nodes=" << net.node_count() << " arcs=" << net.arc_count() << '\n';
    }
  } catch (const recflow::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 3;
  } catch (const recflow::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
