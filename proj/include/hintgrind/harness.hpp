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

#pragma once

// Experiment orchestration: single searches under a guidance mode, batch
// runs, training-data export, index benchmarks and the prove/train loop.
//
// Searches never share mutable state. Watchlist files and the model are
// read once; each search parses the watchlists into its own symbol table
// after its problem, so symbol ids depend only on the search's own inputs.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "hintgrind/common.hpp"
#include "hintgrind/corpus.hpp"
#include "hintgrind/features.hpp"
#include "hintgrind/learner.hpp"
#include "hintgrind/proofwatch.hpp"
#include "hintgrind/saturation.hpp"
#include "hintgrind/selection.hpp"
#include "hintgrind/tptp.hpp"

namespace hintgrind {

namespace fs = std::filesystem;

enum class Mode : std::uint8_t { Baseline, ProofWatch, Enigma, EnigmaWatch };

inline std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::Baseline: return "baseline";
    case Mode::ProofWatch: return "proofwatch";
    case Mode::Enigma: return "enigma";
    case Mode::EnigmaWatch: return "enigmawatch";
  }
  return "?";
}

inline Mode parse_mode(std::string_view s) {
  if (s == "baseline") return Mode::Baseline;
  if (s == "proofwatch") return Mode::ProofWatch;
  if (s == "enigma") return Mode::Enigma;
  if (s == "enigmawatch") return Mode::EnigmaWatch;
  throw ConfigError("unknown mode '" + std::string(s) + "'");
}

// Read-only inputs shared by every search of a batch.
struct Artifacts {
  std::vector<WatchlistFile> watchlist_files;
  std::vector<std::string> watchlist_texts;
  std::shared_ptr<const Model> model;

  static Artifacts load(const std::optional<fs::path>& watchlists, const std::optional<fs::path>& model) {
    Artifacts a;
    if (watchlists) {
      a.watchlist_files = list_watchlist_dir(*watchlists);
      for (const auto& f : a.watchlist_files) a.watchlist_texts.push_back(read_file(f.path.string()));
    }
    if (model) a.model = std::make_shared<const Model>(load_model(model->string()));
    return a;
  }
};

struct ProveOptions {
  Mode mode = Mode::Baseline;
  SearchConfig search;
  IndexMode index = IndexMode::Multi;
  bool watch_priority = false;  // enigmawatch only: also prefer matching clauses
  std::uint64_t seed = 0;
  int loop = -1;
  std::string label;  // method name in records; defaults to the mode
};

// Checks the mode against the loaded artifacts before any search runs.
inline void validate_mode(const ProveOptions& o, const Artifacts& a, bool watchlists_given) {
  switch (o.mode) {
    case Mode::Baseline:
      if (a.model) throw ConfigError("baseline mode takes no model");
      break;
    case Mode::ProofWatch:
      if (!watchlists_given) throw ConfigError("proofwatch mode needs --watchlists");
      if (a.model) throw ConfigError("proofwatch mode takes no model");
      break;
    case Mode::Enigma:
      if (!a.model) throw ConfigError("enigma mode needs --model");
      if (watchlists_given) throw ConfigError("enigma mode takes no watchlists; use enigmawatch");
      break;
    case Mode::EnigmaWatch:
      if (!a.model) throw ConfigError("enigmawatch mode needs --model");
      if (!watchlists_given) throw ConfigError("enigmawatch mode needs --watchlists");
      break;
  }
  if (a.model && a.model->watchlist_count != a.watchlist_files.size())
    throw ConfigError("model expects " + std::to_string(a.model->watchlist_count) + " watchlists, " +
                      std::to_string(a.watchlist_files.size()) + " given");
}

struct ProveOutcome {
  Problem problem;
  SearchResult result;
};

inline ProveOutcome prove(const fs::path& problem_file, const ProveOptions& o, const Artifacts& a) {
  ProveOutcome out;
  out.problem = load_problem(problem_file.string());
  Guidance g;
  if (!a.watchlist_files.empty()) {
    std::vector<Watchlist> lists;
    lists.reserve(a.watchlist_files.size());
    for (std::size_t i = 0; i < a.watchlist_files.size(); ++i)
      lists.push_back(parse_watchlist(a.watchlist_files[i], a.watchlist_texts[i], *out.problem.symbols));
    bool priority = o.mode == Mode::ProofWatch || (o.mode == Mode::EnigmaWatch && o.watch_priority);
    g.set_watchlists(lists, out.problem.symbols, priority, o.index);
  }
  if (a.model) g.set_model(a.model, out.problem);
  out.result = given_clause_loop(out.problem, o.search, g);
  return out;
}

// One JSONL record per search.
struct Record {
  std::string problem;
  std::string method;
  int loop = -1;
  Verdict verdict = Verdict::Saturated;
  std::int64_t processed = 0;
  std::int64_t generated = 0;
  std::int64_t elapsed_ms = 0;
  std::int64_t watch_subsumption_calls = 0;
  std::int64_t forward_subsumed = 0;
  std::size_t watchlists = 0;
  std::string limit;
  std::uint64_t seed = 0;

  nlohmann::ordered_json json() const {
    nlohmann::ordered_json j;
    j["problem"] = problem;
    j["method"] = method;
    j["loop"] = loop;
    j["verdict"] = verdict_name(verdict);
    j["processed"] = processed;
    j["generated"] = generated;
    j["forward_subsumed"] = forward_subsumed;
    j["watchlists"] = watchlists;
    j["watch_subsumption_calls"] = watch_subsumption_calls;
    j["limit"] = limit;
    j["seed"] = seed;
    j["elapsed_ms"] = elapsed_ms;
    return j;
  }

  static Record from_json(const nlohmann::json& j) {
    Record r;
    r.problem = j.at("problem").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.loop = j.at("loop").get<int>();
    std::string v = j.at("verdict").get<std::string>();
    r.verdict = v == "proof" ? Verdict::Proof : v == "saturated" ? Verdict::Saturated : Verdict::ResourceOut;
    r.processed = j.at("processed").get<std::int64_t>();
    r.generated = j.at("generated").get<std::int64_t>();
    r.forward_subsumed = j.at("forward_subsumed").get<std::int64_t>();
    r.watchlists = j.at("watchlists").get<std::size_t>();
    r.watch_subsumption_calls = j.at("watch_subsumption_calls").get<std::int64_t>();
    r.limit = j.at("limit").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.elapsed_ms = j.at("elapsed_ms").get<std::int64_t>();
    return r;
  }
};

inline Record make_record(const ProveOutcome& out, const ProveOptions& o) {
  Record r;
  r.problem = out.problem.name;
  r.method = o.label.empty() ? std::string(mode_name(o.mode)) : o.label;
  r.loop = o.loop;
  r.verdict = out.result.verdict;
  r.processed = out.result.stats.processed;
  r.generated = out.result.stats.generated;
  r.elapsed_ms = out.result.stats.elapsed_ms;
  r.watch_subsumption_calls = static_cast<std::int64_t>(out.result.stats.watch.subsumption_calls);
  r.forward_subsumed = out.result.stats.forward_subsumed;
  r.watchlists = out.result.watchlist_ids.size();
  r.limit = o.search.limits.str();
  r.seed = o.seed;
  return r;
}

inline void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + p.string());
}

// <dir>/traces/<name>.trace and .given, plus <dir>/proofs/<name>.proof when
// a proof was found.
inline void write_search_files(const fs::path& dir, const ProveOutcome& out) {
  const std::string& name = out.problem.name;
  if (!out.result.trace.empty() || out.result.verdict != Verdict::Proof) {
    write_text(dir / "traces" / (name + ".trace"), format_trace(name, out.result));
    write_text(dir / "traces" / (name + ".given"), format_given(out.result, *out.problem.symbols));
  }
  if (out.result.verdict == Verdict::Proof)
    write_text(dir / "proofs" / (name + ".proof"), format_proof(out.result, out.problem));
}

// Runs fn(i) for i in [0, n) on `jobs` threads.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

inline std::vector<fs::path> list_problems(const fs::path& dir) {
  std::vector<fs::path> out;
  if (fs::is_regular_file(dir)) return {dir};
  if (!fs::is_directory(dir)) throw std::runtime_error("no such problem file or directory: " + dir.string());
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".p") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  std::set<std::string> names;
  for (const auto& p : out)
    if (!names.insert(p.stem().string()).second) throw std::runtime_error("duplicate problem name " + p.stem().string());
  return out;
}

// Proves every problem, writes search files under `out_dir` and returns the
// records in problem order. results.jsonl and results.csv go to out_dir.
inline std::vector<Record> prove_all(const std::vector<fs::path>& problems, const ProveOptions& o,
                                     const Artifacts& a, const fs::path& out_dir, int jobs) {
  std::vector<Record> records(problems.size());
  parallel_for(problems.size(), jobs, [&](std::size_t i) {
    ProveOutcome out = prove(problems[i], o, a);
    write_search_files(out_dir, out);
    records[i] = make_record(out, o);
  });
  std::string jsonl, csv = "problem,method,loop,verdict,processed,generated,elapsed_ms\n";
  for (const auto& r : records) {
    jsonl += r.json().dump() + "\n";
    csv += r.problem + "," + r.method + "," + std::to_string(r.loop) + "," + std::string(verdict_name(r.verdict)) +
           "," + std::to_string(r.processed) + "," + std::to_string(r.generated) + "," +
           std::to_string(r.elapsed_ms) + "\n";
  }
  write_text(out_dir / "results.jsonl", jsonl);
  write_text(out_dir / "results.csv", csv);
  return records;
}

inline std::vector<Record> read_records(const fs::path& jsonl) {
  std::vector<Record> out;
  std::istringstream in(read_file(jsonl.string()));
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(Record::from_json(nlohmann::json::parse(line)));
  return out;
}

// ---------------------------------------------------------------------------
// Training data.
//
// Example files hold one `<label> <index>:<value> ...` line per given clause,
// preceded by a `# layout <hash_base> <watchlists>` line.

struct ExampleSet {
  FeatureConfig layout;
  std::vector<Example> examples;
};

// Examples from one solved search. `keep` lists the watchlist ids whose
// ratios become features, in order; each must appear in the trace header.
inline std::vector<Example> examples_from_trace(const Problem& prob, const Trace& trace,
                                                std::string_view given_text, const FeatureConfig& layout,
                                                const std::vector<int>& keep) {
  std::vector<std::size_t> column;
  for (int id : keep) {
    auto it = std::find(trace.watchlist_ids.begin(), trace.watchlist_ids.end(), id);
    if (it == trace.watchlist_ids.end())
      throw ConfigError("watchlist " + std::to_string(id) + " missing from trace of " + trace.problem);
    column.push_back(static_cast<std::size_t>(it - trace.watchlist_ids.begin()));
  }
  // Given clauses are parsed into a private copy of the problem's symbols.
  auto symbols = std::make_shared<SymbolTable>(*prob.symbols);
  std::map<ClauseId, Clause> given;
  for (auto& nc : parse_clauses(given_text, *symbols)) {
    if (nc.name.size() < 2 || nc.name[0] != 'g') throw std::runtime_error("bad given clause name " + nc.name);
    given.emplace(parse_int(std::string_view(nc.name).substr(1)), std::move(nc.clause));
  }
  ConjectureBlock conj = ConjectureBlock::of(conjecture_features(prob), layout.hash_base);
  std::vector<Example> out;
  std::vector<double> psv(keep.size());
  for (const auto& step : trace.steps) {
    auto it = given.find(step.given);
    if (it == given.end()) throw std::runtime_error("given clause " + std::to_string(step.given) + " missing");
    for (std::size_t i = 0; i < column.size(); ++i) psv[i] = step.psv[column[i]];
    out.push_back(Example{build_vector(it->second, *symbols, conj, psv, layout), step.positive ? 1 : 0});
  }
  return out;
}

inline bool trace_has_proof(const Trace& t) {
  return std::any_of(t.steps.begin(), t.steps.end(), [](const TraceStep& s) { return s.positive; });
}

// Collects examples from every solved trace under `trace_dir`, matching
// problems by name in `problem_dir`.
inline ExampleSet export_examples(const fs::path& problem_dir, const fs::path& trace_dir,
                                  const FeatureConfig& layout, const std::vector<int>& keep) {
  if (keep.size() != layout.watchlist_count) throw ConfigError("watchlist selection does not match layout");
  layout.validate();
  ExampleSet set;
  set.layout = layout;
  std::vector<fs::path> traces;
  for (const auto& e : fs::directory_iterator(trace_dir))
    if (e.path().extension() == ".trace") traces.push_back(e.path());
  std::sort(traces.begin(), traces.end());
  for (const auto& tp : traces) {
    Trace t = parse_trace(read_file(tp.string()));
    if (!trace_has_proof(t)) continue;
    Problem prob = load_problem((problem_dir / (t.problem + ".p")).string());
    fs::path gp = tp;
    gp.replace_extension(".given");
    auto ex = examples_from_trace(prob, t, read_file(gp.string()), layout, keep);
    set.examples.insert(set.examples.end(), std::make_move_iterator(ex.begin()), std::make_move_iterator(ex.end()));
  }
  return set;
}

inline void write_examples(const fs::path& p, const ExampleSet& set) {
  std::string out = "# layout " + std::to_string(set.layout.hash_base) + " " +
                    std::to_string(set.layout.watchlist_count) + "\n";
  for (const auto& e : set.examples) out += format_example(e.label, e.vector) + "\n";
  write_text(p, out);
}

inline ExampleSet read_examples(const fs::path& p) {
  ExampleSet set;
  std::istringstream in(read_file(p.string()));
  std::string line;
  bool have_layout = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream h(line);
      std::string hash, key;
      h >> hash >> key >> set.layout.hash_base >> set.layout.watchlist_count;
      if (key != "layout" || !h) throw std::runtime_error("bad example header: " + line);
      set.layout.validate();
      have_layout = true;
      continue;
    }
    if (!have_layout) throw std::runtime_error("example file without layout header");
    set.examples.push_back(parse_example(line, set.layout.dim()));
  }
  if (!have_layout) throw std::runtime_error("example file without layout header");
  return set;
}

// ---------------------------------------------------------------------------
// Watchlist selection files: `<id> <source>` per line.

inline std::string format_selection(const std::vector<WatchlistFile>& chosen) {
  std::string out;
  for (const auto& f : chosen) out += std::to_string(f.id) + " " + f.source + "\n";
  return out;
}

inline std::vector<int> parse_selection(std::string_view text) {
  std::vector<int> ids;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto sp = line.find(' ');
    ids.push_back(static_cast<int>(parse_int(line.substr(0, sp))));
  }
  return ids;
}

inline std::vector<Trace> read_traces(const fs::path& dir, bool solved_only) {
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".trace") paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  std::vector<Trace> out;
  for (const auto& p : paths) {
    Trace t = parse_trace(read_file(p.string()));
    if (!solved_only || trace_has_proof(t)) out.push_back(std::move(t));
  }
  return out;
}

// Selects k watchlists and copies them to `dest`. Returns the chosen files
// in selection order.
inline std::vector<WatchlistFile> select_and_copy(const MeanMatrix& m, const fs::path& watchlist_dir,
                                                  SelectMethod method, std::size_t k, std::uint64_t seed,
                                                  const fs::path& dest) {
  auto files = list_watchlist_dir(watchlist_dir);
  std::map<int, WatchlistFile> by_id;
  for (const auto& f : files) by_id[f.id] = f;
  std::vector<WatchlistFile> chosen;
  for (std::size_t col : select_watchlists(m, method, k, seed)) {
    int id = m.watchlist_ids[col];
    auto it = by_id.find(id);
    if (it == by_id.end()) throw std::runtime_error("selected watchlist " + std::to_string(id) + " not on disk");
    chosen.push_back(it->second);
  }
  fs::remove_all(dest);
  fs::create_directories(dest);
  for (const auto& f : chosen) fs::copy_file(f.path, dest / f.path.filename());
  return chosen;
}

// ---------------------------------------------------------------------------
// Index benchmark: each problem runs with Single and Multi indexing under
// proofwatch guidance; traces must agree.

struct BenchRow {
  std::string problem;
  double single_ms = 0;
  double multi_ms = 0;
  std::uint64_t single_calls = 0;
  std::uint64_t multi_calls = 0;
  bool same_trace = false;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::uint64_t single_calls = 0;
  std::uint64_t multi_calls = 0;

  double call_reduction() const {
    return multi_calls == 0 ? 0.0 : static_cast<double>(single_calls) / static_cast<double>(multi_calls);
  }
  bool all_same() const {
    return std::all_of(rows.begin(), rows.end(), [](const BenchRow& r) { return r.same_trace; });
  }
  bool multi_never_worse() const {
    return std::all_of(rows.begin(), rows.end(), [](const BenchRow& r) { return r.multi_calls <= r.single_calls; });
  }

  std::string csv() const {
    auto ratio = [](double a, double b) { return b == 0 ? 0.0 : a / b; };
    std::string out = "problem,single_ms,multi_ms,speedup,single_calls,multi_calls,reduction,same_trace\n";
    auto line = [&](const std::string& name, double sm, double mm, double sc, double mc, const std::string& same) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%s,%.1f,%.1f,%.2f,%.0f,%.0f,%.2f,%s\n", name.c_str(), sm, mm, ratio(sm, mm), sc,
                    mc, ratio(sc, mc), same.c_str());
      out += buf;
    };
    for (const auto& r : rows)
      line(r.problem, r.single_ms, r.multi_ms, static_cast<double>(r.single_calls),
           static_cast<double>(r.multi_calls), r.same_trace ? "yes" : "no");
    if (rows.empty()) return out;
    double sm = 0, mm = 0;
    for (const auto& r : rows) {
      sm += r.single_ms;
      mm += r.multi_ms;
    }
    double n = static_cast<double>(rows.size());
    line("avg", sm / n, mm / n, static_cast<double>(single_calls) / n, static_cast<double>(multi_calls) / n, "");
    // Best and worst by call reduction.
    auto red = [&](const BenchRow& r) { return ratio(static_cast<double>(r.single_calls), static_cast<double>(r.multi_calls)); };
    auto [lo, hi] = std::minmax_element(rows.begin(), rows.end(),
                                        [&](const BenchRow& a, const BenchRow& b) { return red(a) < red(b); });
    line("best", hi->single_ms, hi->multi_ms, static_cast<double>(hi->single_calls),
         static_cast<double>(hi->multi_calls), hi->problem);
    line("worst", lo->single_ms, lo->multi_ms, static_cast<double>(lo->single_calls),
         static_cast<double>(lo->multi_calls), lo->problem);
    return out;
  }
};

inline BenchReport bench_index(const std::vector<fs::path>& problems, const fs::path& watchlist_dir,
                               std::int64_t generated_limit, int jobs = 1) {
  Artifacts a = Artifacts::load(watchlist_dir, std::nullopt);
  BenchReport rep;
  rep.rows.resize(problems.size());
  parallel_for(problems.size(), jobs, [&](std::size_t i) {
    ProveOptions o;
    o.mode = Mode::ProofWatch;
    o.search.limits.generated_limit = generated_limit;
    o.search.limits.time_limit_s = 3600;
    BenchRow row;
    std::string traces[2];
    for (int m = 0; m < 2; ++m) {
      o.index = m == 0 ? IndexMode::Single : IndexMode::Multi;
      auto t0 = std::chrono::steady_clock::now();
      ProveOutcome out = prove(problems[i], o, a);
      double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      traces[m] = std::string(verdict_name(out.result.verdict)) + "\n" + format_trace(out.problem.name, out.result);
      (m == 0 ? row.single_ms : row.multi_ms) = ms;
      (m == 0 ? row.single_calls : row.multi_calls) = out.result.stats.watch.subsumption_calls;
      row.problem = out.problem.name;
    }
    row.same_trace = traces[0] == traces[1];
    rep.rows[i] = row;
  });
  for (const auto& r : rep.rows) {
    rep.single_calls += r.single_calls;
    rep.multi_calls += r.multi_calls;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// The loop.
//
// <root>/problems/*.p is the corpus. Loop 0 proves everything with the
// baseline, turns each proof into a watchlist, reruns the baseline with all
// watchlists loaded to record proof-state vectors, builds the mean matrix
// and selects watchlists per method. The watch pass leaves clause order
// alone by default: with priority on, its traces are short and say little
// about the clauses an unguided search drowns in. Loop t >= 1 trains one model per method on
// the solved traces of the watch pass and of the method's own earlier
// loops, then proves everything again. Every stage leaves a .done marker
// and is skipped when the marker exists.

struct LoopOptions {
  fs::path root;
  int loops = 1;
  Limits limits;
  std::size_t k = 16;
  std::vector<SelectMethod> selections{SelectMethod::Mean};
  TrainParams train;
  std::uint32_t hash_base = 1u << 15;
  int jobs = 1;
  std::uint64_t seed = 0;
  bool watch_priority = false;
  bool proofwatch_runs = true;  // loop 0 also runs proofwatch per selection
  bool watch_pass_priority = false;
};

inline std::string_view select_method_name(SelectMethod m) {
  switch (m) {
    case SelectMethod::Mean: return "mean";
    case SelectMethod::Var: return "var";
    case SelectMethod::Corr: return "corr";
    case SelectMethod::Rand: return "rand";
  }
  return "?";
}

struct LoopReport {
  int loop = 0;
  std::vector<std::pair<std::string, std::set<std::string>>> solved;  // method -> problems
  std::set<std::string> union_solved;

  std::size_t solved_by(const std::string& method) const {
    for (const auto& [m, s] : solved)
      if (m == method) return s.size();
    throw std::out_of_range("no method " + method + " in loop " + std::to_string(loop));
  }
};

class LoopRunner {
 public:
  LoopRunner(LoopOptions o, std::ostream& log) : o_(std::move(o)), log_(log) {}

  std::vector<LoopReport> run() {
    problems_ = list_problems(o_.root / "problems");
    if (problems_.empty()) throw std::runtime_error("no problems under " + (o_.root / "problems").string());
    std::vector<LoopReport> reports;
    reports.push_back(loop0());
    for (int t = 1; t <= o_.loops; ++t) reports.push_back(loop_t(t));
    write_report(reports);
    return reports;
  }

 private:
  fs::path loop_dir(int t) const { return o_.root / "runs" / ("loop" + std::to_string(t)); }

  bool done(const fs::path& dir) const { return fs::exists(dir / ".done"); }
  void mark(const fs::path& dir) const { write_text(dir / ".done", ""); }

  std::vector<Record> run_stage(const fs::path& dir, const ProveOptions& po, const Artifacts& a) {
    if (done(dir)) {
      log_ << "skip " << dir.string() << " (done)\n";
      return read_records(dir / "results.jsonl");
    }
    for (const char* sub : {"traces", "proofs"}) fs::remove_all(dir / sub);
    auto start = std::chrono::steady_clock::now();
    auto recs = prove_all(problems_, po, a, dir, o_.jobs);
    mark(dir);
    std::size_t solved = std::count_if(recs.begin(), recs.end(), [](const Record& r) { return r.verdict == Verdict::Proof; });
    log_ << "loop " << po.loop << " " << po.label << ": " << solved << "/" << recs.size() << " solved in "
         << std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - start).count()
         << "s\n";
    return recs;
  }

  ProveOptions options(Mode mode, int loop, std::string label) const {
    ProveOptions po;
    po.mode = mode;
    po.search.limits = o_.limits;
    po.seed = o_.seed;
    po.loop = loop;
    po.label = std::move(label);
    po.watch_priority = o_.watch_priority;
    return po;
  }

  static std::set<std::string> solved_set(const std::vector<Record>& recs) {
    std::set<std::string> s;
    for (const auto& r : recs)
      if (r.verdict == Verdict::Proof) s.insert(r.problem);
    return s;
  }

  void add(LoopReport& rep, const std::string& method, const std::vector<Record>& recs) {
    auto s = solved_set(recs);
    rep.union_solved.insert(s.begin(), s.end());
    rep.solved.emplace_back(method, std::move(s));
    for (const auto& r : recs) verdicts_[r.problem]["loop" + std::to_string(rep.loop) + ":" + method] = verdict_name(r.verdict);
  }

  LoopReport loop0() {
    LoopReport rep;
    rep.loop = 0;
    fs::path dir = loop_dir(0);
    auto base = run_stage(dir / "baseline", options(Mode::Baseline, 0, "baseline"), Artifacts{});
    add(rep, "baseline", base);

    // Proofs become watchlists, numbered in problem order.
    fs::path wdir = o_.root / "watchlists";
    if (!done(wdir)) {
      fs::remove_all(wdir);
      fs::create_directories(wdir);
      fs::remove_all(o_.root / "proofs");
      int id = 0;
      for (const auto& r : base) {
        if (r.verdict != Verdict::Proof) continue;
        fs::path proof = dir / "baseline" / "proofs" / (r.problem + ".proof");
        std::string text = read_file(proof.string());
        write_text(o_.root / "proofs" / (r.problem + ".proof"), text);
        // The proof minus its empty clause is the watchlist.
        SymbolTable symbols;
        std::vector<Clause> clauses;
        for (auto& nc : parse_clauses(text, symbols))
          if (!nc.clause.empty()) clauses.push_back(std::move(nc.clause));
        if (!clauses.empty()) write_watchlist(wdir, id++, r.problem, clauses, symbols);
      }
      mark(wdir);
    }
    if (list_watchlist_dir(wdir).empty()) throw std::runtime_error("loop 0 found no proofs; nothing to learn from");

    Artifacts all = Artifacts::load(wdir, std::nullopt);
    auto watch = run_stage(dir / "watch",
                           options(o_.watch_pass_priority ? Mode::ProofWatch : Mode::Baseline, 0, "watch-all"), all);
    add(rep, "watch-all", watch);

    MeanMatrix m = build_mean_matrix(read_traces(dir / "watch" / "traces", true), &log_);
    for (auto method : o_.selections) {
      std::string name(select_method_name(method));
      fs::path sel_dir = dir / ("select-" + name);
      if (!done(sel_dir)) {
        std::size_t k = std::min(o_.k, m.columns());
        auto chosen = select_and_copy(m, wdir, method, k, o_.seed, sel_dir / "watchlists");
        write_text(sel_dir / "selection.txt", format_selection(chosen));
        mark(sel_dir);
      }
      if (o_.proofwatch_runs) {
        Artifacts sel = Artifacts::load(sel_dir / "watchlists", std::nullopt);
        auto recs = run_stage(dir / ("proofwatch-" + name), options(Mode::ProofWatch, 0, "proofwatch-" + name), sel);
        add(rep, "proofwatch-" + name, recs);
      }
    }
    return rep;
  }

  // Trains (or reuses) a model from the watch pass plus earlier own loops.
  fs::path train_stage(const fs::path& dir, const std::string& method, const std::vector<int>& keep, int t) {
    fs::path model = dir / "model.gbt";
    if (done(dir)) return model;
    FeatureConfig layout{o_.hash_base, static_cast<std::uint32_t>(keep.size())};
    ExampleSet set;
    set.layout = layout;
    std::vector<fs::path> sources{loop_dir(0) / "watch" / "traces"};
    for (int u = 1; u < t; ++u) sources.push_back(loop_dir(u) / method / "traces");
    for (const auto& src : sources) {
      auto part = export_examples(o_.root / "problems", src, layout, keep);
      set.examples.insert(set.examples.end(), std::make_move_iterator(part.examples.begin()),
                          std::make_move_iterator(part.examples.end()));
    }
    write_examples(dir / "train.examples", set);
    TrainParams p = o_.train;
    p.seed = o_.seed;
    TrainReport tr;
    auto start = std::chrono::steady_clock::now();
    Model m = train(set.examples, p, layout, &tr);
    save_model(m, model.string());
    ModelStats ms = model_stats(m);
    nlohmann::ordered_json j;
    j["method"] = method;
    j["loop"] = t;
    j["examples"] = set.examples.size();
    j["positives"] = tr.positives;
    j["negatives"] = tr.negatives;
    j["positive_accuracy"] = tr.positive_accuracy;
    j["negative_accuracy"] = tr.negative_accuracy;
    j["features"] = ms.total();
    j["clause_features"] = ms.clause_features;
    j["conjecture_features"] = ms.conjecture_features;
    j["watchlist_features"] = ms.watchlist_features;
    j["watchlist_at_first_root"] = ms.watchlist_at_first_root;
    write_text(dir / "train.json", j.dump(2) + "\n");
    log_ << "loop " << t << " " << method << ": trained on " << set.examples.size() << " examples in "
         << std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - start).count()
         << "s, pos acc " << tr.positive_accuracy << ", neg acc " << tr.negative_accuracy << ", watchlist features "
         << ms.watchlist_features << "\n";
    mark(dir);
    return model;
  }

  LoopReport loop_t(int t) {
    LoopReport rep;
    rep.loop = t;
    fs::path dir = loop_dir(t);
    {
      fs::path mdir = dir / "enigma";
      fs::path model = train_stage(mdir / "model", "enigma", {}, t);
      Artifacts a = Artifacts::load(std::nullopt, model);
      add(rep, "enigma", run_stage(mdir, options(Mode::Enigma, t, "enigma"), a));
    }
    for (auto method : o_.selections) {
      std::string name = "enigmawatch-" + std::string(select_method_name(method));
      fs::path sel_dir = loop_dir(0) / ("select-" + std::string(select_method_name(method)));
      std::vector<int> keep;
      for (const auto& f : list_watchlist_dir(sel_dir / "watchlists")) keep.push_back(f.id);
      fs::path mdir = dir / name;
      fs::path model = train_stage(mdir / "model", name, keep, t);
      Artifacts a = Artifacts::load(sel_dir / "watchlists", model);
      add(rep, name, run_stage(mdir, options(Mode::EnigmaWatch, t, name), a));
    }
    return rep;
  }

  void write_report(const std::vector<LoopReport>& reports) {
    std::string csv = "loop,method,solved,problems\n";
    std::string jsonl;
    for (const auto& rep : reports) {
      for (const auto& [m, s] : rep.solved) {
        csv += std::to_string(rep.loop) + "," + m + "," + std::to_string(s.size()) + "," +
               std::to_string(problems_.size()) + "\n";
      }
      csv += std::to_string(rep.loop) + ",union," + std::to_string(rep.union_solved.size()) + "," +
             std::to_string(problems_.size()) + "\n";
      nlohmann::ordered_json j;
      j["loop"] = rep.loop;
      for (const auto& [m, s] : rep.solved) j["solved"][m] = s.size();
      j["union"] = rep.union_solved.size();
      j["problems"] = problems_.size();
      jsonl += j.dump() + "\n";
    }
    write_text(o_.root / "report.csv", csv);
    write_text(o_.root / "report.jsonl", jsonl);

    std::vector<std::string> columns;
    for (const auto& rep : reports)
      for (const auto& [m, s] : rep.solved) columns.push_back("loop" + std::to_string(rep.loop) + ":" + m);
    std::string vm = "problem";
    for (const auto& c : columns) vm += "," + c;
    vm += "\n";
    for (const auto& p : problems_) {
      std::string name = p.stem().string();
      vm += name;
      for (const auto& c : columns) vm += "," + verdicts_[name][c];
      vm += "\n";
    }
    write_text(o_.root / "verdicts.csv", vm);
  }

  LoopOptions o_;
  std::ostream& log_;
  std::vector<fs::path> problems_;
  std::map<std::string, std::map<std::string, std::string>> verdicts_;
};

inline std::vector<LoopReport> run_loop(const LoopOptions& o, std::ostream& log) {
  LoopRunner r(o, log);
  return r.run();
}

// Writes <dir>/problems/*.p.
inline void write_corpus(const fs::path& dir, const CorpusParams& p) {
  for (const auto& gp : generate_corpus(p)) write_text(dir / "problems" / (gp.name + ".p"), gp.text);
}

// Writes <dir>/<id>_bench<id>.w for index benchmarks.
inline void write_bench_watchlists(const fs::path& dir, const BenchWatchlistParams& p) {
  auto lists = generate_bench_watchlists(p);
  for (std::size_t i = 0; i < lists.size(); ++i) {
    int id = static_cast<int>(i);
    write_text(dir / watchlist_file_name(id, "bench" + std::to_string(id)), lists[i]);
  }
}

}  // namespace hintgrind
