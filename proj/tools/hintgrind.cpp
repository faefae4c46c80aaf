// Copyright 2026 The Hintgrind Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// hintgrind command line. Exit codes: 0 proof, 1 saturated, 2 resource out,
// 3 configuration error, 4 any other error. Commands other than a single
// `prove` exit 0 on success.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hintgrind/harness.hpp"

namespace hg = hintgrind;
namespace fs = std::filesystem;

namespace {

constexpr int kConfigExit = 3;
constexpr int kErrorExit = 4;

struct Common {
  std::string limit = "T60-G10000";
  long long seed = -1;
  int jobs = 1;
  std::uint32_t hash_base = 1u << 15;
};

void add_common(CLI::App* app, Common& c, bool with_limit) {
  if (with_limit) app->add_option("--limit", c.limit, "resource limit T<seconds>-G<generated>")->capture_default_str();
  app->add_option("--seed", c.seed, "seed (falls back to HINTGRIND_SEED, then 0)");
  app->add_option("--jobs", c.jobs, "problems run concurrently")->capture_default_str()->check(CLI::PositiveNumber);
}

std::vector<hg::SelectMethod> parse_methods(const std::vector<std::string>& names) {
  std::vector<hg::SelectMethod> out;
  for (const auto& n : names) out.push_back(hg::parse_select_method(n));
  return out;
}

std::vector<int> watchlist_ids(const std::optional<std::string>& dir) {
  std::vector<int> ids;
  if (dir)
    for (const auto& f : hg::list_watchlist_dir(*dir)) ids.push_back(f.id);
  return ids;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hintgrind: watchlist and learned guidance for a saturation prover"};
  app.require_subcommand(1);
  Common common;

  // prove
  auto* prove = app.add_subcommand("prove", "prove one problem or every .p file in a directory");
  std::string problem;
  std::string mode = "baseline";
  std::optional<std::string> watchlists, model, out_dir;
  bool watch_priority = false, single_index = false, no_subsumption = false;
  prove->add_option("problem", problem, "problem file or directory")->required();
  prove->add_option("--mode", mode, "baseline | proofwatch | enigma | enigmawatch")->capture_default_str();
  prove->add_option("--watchlists", watchlists, "watchlist directory");
  prove->add_option("--model", model, "model file");
  prove->add_option("--out", out_dir, "directory for results, traces and proofs");
  prove->add_flag("--watch-priority", watch_priority, "enigmawatch: also prefer watchlist matches");
  prove->add_flag("--single-index", single_index, "index all watchlist clauses in one bucket");
  prove->add_flag("--no-forward-subsumption", no_subsumption, "keep clauses subsumed by processed ones");
  add_common(prove, common, true);

  // bench-index
  auto* bench = app.add_subcommand("bench-index", "compare single and multi watchlist indexing");
  std::string bench_problems, bench_watchlists;
  long long bench_limit = 1000;
  std::optional<std::string> bench_csv;
  bench->add_option("problems", bench_problems, "problem file or directory")->required();
  bench->add_option("--watchlists", bench_watchlists, "watchlist directory")->required();
  bench->add_option("--generated", bench_limit, "generated-clause limit per search")->capture_default_str();
  bench->add_option("--out", bench_csv, "CSV file (default stdout)");
  add_common(bench, common, false);

  // export-train
  auto* exp = app.add_subcommand("export-train", "turn solved traces into training examples");
  std::string exp_problems, exp_traces, exp_out;
  std::optional<std::string> exp_watchlists;
  exp->add_option("--problems", exp_problems, "problem directory")->required();
  exp->add_option("--traces", exp_traces, "trace directory")->required();
  exp->add_option("--watchlists", exp_watchlists, "watchlists whose ratios become features");
  exp->add_option("--hash-base", common.hash_base, "hash range per feature block")->capture_default_str();
  exp->add_option("--out", exp_out, "example file")->required();

  // train
  auto* tr = app.add_subcommand("train", "train a boosted tree model");
  std::string tr_examples, tr_out;
  hg::TrainParams params;
  tr->add_option("examples", tr_examples, "example file")->required();
  tr->add_option("--out", tr_out, "model file")->required();
  tr->add_option("--rounds", params.rounds)->capture_default_str();
  tr->add_option("--max-depth", params.max_depth)->capture_default_str();
  tr->add_option("--learning-rate", params.learning_rate)->capture_default_str();
  tr->add_option("--min-child-weight", params.min_child_weight)->capture_default_str();
  tr->add_option("--subsample", params.subsample)->capture_default_str();
  tr->add_option("--lambda", params.lambda)->capture_default_str();
  tr->add_option("--seed", common.seed, "seed (falls back to HINTGRIND_SEED, then 0)");

  // select
  auto* sel = app.add_subcommand("select", "pick k watchlists from watch-pass traces");
  std::string sel_traces, sel_watchlists, sel_out, sel_method = "mean";
  std::size_t sel_k = 16;
  sel->add_option("--traces", sel_traces, "trace directory of the watch pass")->required();
  sel->add_option("--watchlists", sel_watchlists, "all candidate watchlists")->required();
  sel->add_option("--method", sel_method, "mean | var | corr | rand")->capture_default_str();
  sel->add_option("--k", sel_k, "watchlists to keep")->capture_default_str();
  sel->add_option("--out", sel_out, "output directory")->required();
  sel->add_option("--seed", common.seed, "seed for rand (falls back to HINTGRIND_SEED, then 0)");

  // loop
  auto* lp = app.add_subcommand("loop", "run the prove/train loop over <root>/problems");
  hg::LoopOptions lo;
  std::string lo_root;
  std::vector<std::string> lo_methods{"mean"};
  lp->add_option("root", lo_root, "experiment root holding problems/")->required();
  lp->add_option("--loops", lo.loops, "learning loops after loop 0")->capture_default_str();
  lp->add_option("--k", lo.k, "watchlists per selection")->capture_default_str();
  lp->add_option("--method", lo_methods, "selection methods")->capture_default_str();
  lp->add_option("--hash-base", lo.hash_base)->capture_default_str();
  lp->add_option("--rounds", lo.train.rounds)->capture_default_str();
  lp->add_option("--max-depth", lo.train.max_depth)->capture_default_str();
  lp->add_flag("--watch-priority", lo.watch_priority, "enigmawatch: also prefer watchlist matches");
  lp->add_flag("--watch-pass-priority", lo.watch_pass_priority, "watch pass runs as proofwatch");
  add_common(lp, common, true);

  // gen-corpus
  auto* gen = app.add_subcommand("gen-corpus", "write a seeded synthetic corpus");
  hg::CorpusParams cp;
  std::string gen_out;
  int bench_lists = 0;
  gen->add_option("--out", gen_out, "corpus root; problems go to <out>/problems")->required();
  gen->add_option("--problems", cp.problems)->capture_default_str();
  gen->add_option("--predicates", cp.predicates)->capture_default_str();
  gen->add_option("--single-rules", cp.single_rules)->capture_default_str();
  gen->add_option("--double-rules", cp.double_rules)->capture_default_str();
  gen->add_option("--rule-share", cp.rule_share)->capture_default_str();
  gen->add_option("--hypotheses", cp.hypotheses)->capture_default_str();
  gen->add_option("--start-depth", cp.start_depth)->capture_default_str();
  gen->add_option("--min-depth", cp.min_depth)->capture_default_str();
  gen->add_option("--max-depth", cp.max_depth)->capture_default_str();
  gen->add_option("--min-decoy", cp.min_decoy)->capture_default_str();
  gen->add_option("--max-decoy", cp.max_decoy)->capture_default_str();
  gen->add_option("--bench-watchlists", bench_lists, "also write this many random watchlists of 100 clauses");
  gen->add_option("--seed", common.seed, "seed (falls back to HINTGRIND_SEED, then 1)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*prove) {
      hg::ProveOptions o;
      o.mode = hg::parse_mode(mode);
      o.search.limits = hg::Limits::parse(common.limit);
      o.search.forward_subsumption = !no_subsumption;
      o.index = single_index ? hg::IndexMode::Single : hg::IndexMode::Multi;
      o.watch_priority = watch_priority;
      o.seed = hg::resolve_seed(common.seed);
      auto artifacts = hg::Artifacts::load(watchlists ? std::optional<fs::path>(*watchlists) : std::nullopt,
                                           model ? std::optional<fs::path>(*model) : std::nullopt);
      hg::validate_mode(o, artifacts, watchlists.has_value());
      auto problems = hg::list_problems(problem);
      if (fs::is_regular_file(problem)) {
        auto outcome = hg::prove(problem, o, artifacts);
        if (out_dir) {
          hg::write_search_files(*out_dir, outcome);
          hg::write_text(fs::path(*out_dir) / "results.jsonl", hg::make_record(outcome, o).json().dump() + "\n");
        }
        std::cout << hg::make_record(outcome, o).json().dump() << "\n";
        return hg::exit_code(outcome.result.verdict);
      }
      fs::path dir = out_dir ? fs::path(*out_dir) : fs::path("out");
      auto records = hg::prove_all(problems, o, artifacts, dir, common.jobs);
      for (const auto& r : records) std::cout << r.json().dump() << "\n";
      return 0;
    }
    if (*bench) {
      auto rep = hg::bench_index(hg::list_problems(bench_problems), bench_watchlists, bench_limit, common.jobs);
      if (bench_csv)
        hg::write_text(*bench_csv, rep.csv());
      else
        std::cout << rep.csv();
      std::cerr << "call reduction " << rep.call_reduction() << "x, traces "
                << (rep.all_same() ? "identical" : "DIFFER") << "\n";
      if (!rep.all_same()) return kErrorExit;
      return 0;
    }
    if (*exp) {
      auto keep = watchlist_ids(exp_watchlists);
      hg::FeatureConfig layout{common.hash_base, static_cast<std::uint32_t>(keep.size())};
      auto set = hg::export_examples(exp_problems, exp_traces, layout, keep);
      hg::write_examples(exp_out, set);
      std::cerr << set.examples.size() << " examples\n";
      return 0;
    }
    if (*tr) {
      auto set = hg::read_examples(tr_examples);
      params.seed = hg::resolve_seed(common.seed);
      hg::TrainReport report;
      auto m = hg::train(set.examples, params, set.layout, &report);
      hg::save_model(m, tr_out);
      auto stats = hg::model_stats(m);
      std::cerr << "examples " << report.positives << " pos / " << report.negatives << " neg, accuracy "
                << report.positive_accuracy << " / " << report.negative_accuracy << ", features "
                << stats.clause_features << " clause / " << stats.conjecture_features << " conjecture / "
                << stats.watchlist_features << " watchlist"
                << (stats.watchlist_at_first_root ? ", first split on a watchlist" : "") << "\n";
      return 0;
    }
    if (*sel) {
      auto m = hg::build_mean_matrix(hg::read_traces(sel_traces, true), &std::cerr);
      auto chosen = hg::select_and_copy(m, sel_watchlists, hg::parse_select_method(sel_method), sel_k,
                                        hg::resolve_seed(common.seed), fs::path(sel_out) / "watchlists");
      hg::write_text(fs::path(sel_out) / "selection.txt", hg::format_selection(chosen));
      std::cout << hg::format_selection(chosen);
      return 0;
    }
    if (*lp) {
      lo.root = lo_root;
      lo.limits = hg::Limits::parse(common.limit);
      lo.selections = parse_methods(lo_methods);
      lo.jobs = common.jobs;
      lo.seed = hg::resolve_seed(common.seed);
      hg::run_loop(lo, std::cerr);
      std::cout << hg::read_file((fs::path(lo_root) / "report.csv").string());
      return 0;
    }
    if (*gen) {
      cp.seed = hg::resolve_seed(common.seed, 1);
      hg::write_corpus(gen_out, cp);
      if (bench_lists > 0) {
        hg::BenchWatchlistParams bp;
        bp.lists = bench_lists;
        bp.predicates = cp.predicates;
        bp.seed = cp.seed;
        hg::write_bench_watchlists(fs::path(gen_out) / "bench-watchlists", bp);
      }
      return 0;
    }
  } catch (const hg::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kErrorExit;
  }
  return 0;
}
