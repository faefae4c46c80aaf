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

// Gradient-boosted regression trees for binary classification on sparse
// vectors. Logistic loss, second-order leaf values, exact greedy splits over
// every distinct value present in the data, trees grown level by level.
//
// A split sends x < threshold left. Absent features read as 0 everywhere,
// including during training, so the implicit zeros of a column are treated
// as one more group of equal values.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hintgrind/common.hpp"
#include "hintgrind/features.hpp"

namespace hintgrind {

struct TrainParams {
  int max_depth = 9;
  int rounds = 200;
  double learning_rate = 0.3;
  double min_child_weight = 1.0;
  double subsample = 1.0;
  double lambda = 1.0;  // L2 penalty on leaf values
  std::uint64_t seed = 0;
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;

  double score(const SparseVector& v) const {
    std::int32_t n = 0;
    while (!nodes[static_cast<std::size_t>(n)].is_leaf()) {
      const TreeNode& node = nodes[static_cast<std::size_t>(n)];
      n = v.get(static_cast<std::uint32_t>(node.feature)) < node.threshold ? node.left : node.right;
    }
    return nodes[static_cast<std::size_t>(n)].value;
  }

  int depth() const { return depth_from(0); }

 private:
  int depth_from(std::int32_t n) const {
    const TreeNode& node = nodes[static_cast<std::size_t>(n)];
    if (node.is_leaf()) return 0;
    return 1 + std::max(depth_from(node.left), depth_from(node.right));
  }
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Model {
  std::vector<Tree> trees;
  double learning_rate = 0.3;
  double base_score = 0.0;  // margin before any tree
  std::uint32_t hash_base = 1u << 15;
  std::uint32_t watchlist_count = 0;

  double margin(const SparseVector& v) const {
    double sum = 0.0;
    for (const auto& t : trees) sum += t.score(v);
    return base_score + learning_rate * sum;
  }
  double predict(const SparseVector& v) const { return sigmoid(margin(v)); }

  FeatureConfig layout() const { return FeatureConfig{hash_base, watchlist_count}; }
};

inline double predict(const Model& m, const SparseVector& v) { return m.predict(v); }

// Probabilities >= 0.5 map to weight 1, everything else to 10.
inline double clause_weight(double probability) { return probability >= 0.5 ? 1.0 : 10.0; }

struct ModelStats {
  std::size_t clause_features = 0;
  std::size_t conjecture_features = 0;
  std::size_t watchlist_features = 0;
  bool watchlist_at_first_root = false;

  std::size_t total() const { return clause_features + conjecture_features + watchlist_features; }
};

inline ModelStats model_stats(const Model& m) {
  std::set<std::int32_t> used;
  for (const auto& t : m.trees)
    for (const auto& n : t.nodes)
      if (!n.is_leaf()) used.insert(n.feature);
  ModelStats s;
  for (auto f : used) {
    auto u = static_cast<std::uint32_t>(f);
    if (u < m.hash_base) ++s.clause_features;
    else if (u < 2 * m.hash_base) ++s.conjecture_features;
    else ++s.watchlist_features;
  }
  if (!m.trees.empty() && !m.trees[0].nodes[0].is_leaf())
    s.watchlist_at_first_root = static_cast<std::uint32_t>(m.trees[0].nodes[0].feature) >= 2 * m.hash_base;
  return s;
}

struct TrainReport {
  double positive_accuracy = 0.0;
  double negative_accuracy = 0.0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t features_used = 0;
  std::vector<double> loss;  // mean logistic loss before round 0, then after each round
};

namespace detail {

inline double logistic_loss(double margin, int label) {
  // log(1 + exp(-y m)) with y in {-1, +1}, computed stably.
  double z = label ? margin : -margin;
  return z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

struct ColumnEntry {
  double value;
  std::uint32_t row;
};

struct SplitCandidate {
  double gain = 0.0;
  std::int32_t feature = -1;
  double threshold = 0.0;
};

// Exact greedy split search. Columns are pre-sorted once; each tree level
// makes one pass over every column for all open nodes at once. Negative
// values are scanned left to right and positive values right to left, so the
// implicit zeros always sit on the side that is not being accumulated and
// never need explicit totals.
class TreeTrainer {
 public:
  TreeTrainer(std::span<const Example> examples, const TrainParams& params)
      : examples_(examples), params_(params) {
    std::uint32_t max_index = 0;
    for (const auto& ex : examples_)
      for (const auto& e : ex.vector.entries) max_index = std::max(max_index, e.first + 1);
    std::vector<std::vector<ColumnEntry>> cols(max_index);
    for (std::uint32_t r = 0; r < examples_.size(); ++r)
      for (const auto& [i, v] : examples_[r].vector.entries) cols[i].push_back({v, r});
    for (std::uint32_t f = 0; f < max_index; ++f) {
      if (cols[f].empty()) continue;
      std::sort(cols[f].begin(), cols[f].end(), [](const ColumnEntry& a, const ColumnEntry& b) {
        return a.value < b.value || (a.value == b.value && a.row < b.row);
      });
      auto first_positive = std::find_if(cols[f].begin(), cols[f].end(),
                                         [](const ColumnEntry& e) { return e.value > 0.0; });
      features_.push_back(static_cast<std::int32_t>(f));
      split_at_.push_back(static_cast<std::size_t>(first_positive - cols[f].begin()));
      columns_.push_back(std::move(cols[f]));
    }
  }

  Tree grow(const std::vector<double>& grad, const std::vector<double>& hess,
            const std::vector<char>& active) {
    const std::size_t n = examples_.size();
    Tree tree;
    tree.nodes.push_back(TreeNode{});
    node_of_row_.assign(n, -1);
    for (std::size_t r = 0; r < n; ++r)
      if (active[r]) node_of_row_[r] = 0;
    std::vector<std::int32_t> level{0};
    for (int depth = 0; !level.empty(); ++depth) {
      slot_of_node_.assign(tree.nodes.size(), -1);
      for (std::size_t s = 0; s < level.size(); ++s)
        slot_of_node_[static_cast<std::size_t>(level[s])] = static_cast<std::int32_t>(s);
      std::vector<Sums> totals(level.size());
      for (std::size_t r = 0; r < n; ++r) {
        auto s = slot(r);
        if (s < 0) continue;
        totals[static_cast<std::size_t>(s)].add(grad[r], hess[r]);
      }
      std::vector<SplitCandidate> best(level.size());
      if (depth < params_.max_depth) find_splits(grad, hess, totals, best);

      std::vector<std::int32_t> next;
      for (std::size_t s = 0; s < level.size(); ++s) {
        auto id = static_cast<std::size_t>(level[s]);
        if (best[s].feature < 0) {
          tree.nodes[id].value = -totals[s].g / (totals[s].h + params_.lambda);
          continue;
        }
        auto left = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{});
        tree.nodes.push_back(TreeNode{});
        tree.nodes[id].feature = best[s].feature;
        tree.nodes[id].threshold = best[s].threshold;
        tree.nodes[id].left = left;
        tree.nodes[id].right = left + 1;
        next.push_back(left);
        next.push_back(left + 1);
      }
      for (std::size_t r = 0; r < n; ++r) {
        if (slot(r) < 0) continue;
        const TreeNode& tn = tree.nodes[static_cast<std::size_t>(node_of_row_[r])];
        if (tn.is_leaf()) {
          node_of_row_[r] = -1;
          continue;
        }
        double x = examples_[r].vector.get(static_cast<std::uint32_t>(tn.feature));
        node_of_row_[r] = x < tn.threshold ? tn.left : tn.right;
      }
      level.swap(next);
    }
    return tree;
  }

 private:
  struct Sums {
    double g = 0.0;
    double h = 0.0;
    std::size_t count = 0;
    void add(double dg, double dh) {
      g += dg;
      h += dh;
      ++count;
    }
  };

  struct Scan {
    Sums acc;
    double last = 0.0;
    std::uint32_t stamp = 0;
  };

  std::int32_t slot(std::size_t row) const {
    auto node = node_of_row_[row];
    if (node < 0 || static_cast<std::size_t>(node) >= slot_of_node_.size()) return -1;
    return slot_of_node_[static_cast<std::size_t>(node)];
  }

  double score(double g, double h) const { return g * g / (h + params_.lambda); }

  void consider(const Sums& total, const Sums& left, std::int32_t feature, double threshold,
                SplitCandidate& best) const {
    if (left.count == 0 || left.count == total.count) return;
    double hl = left.h, hr = total.h - left.h;
    if (hl < params_.min_child_weight || hr < params_.min_child_weight) return;
    double gl = left.g, gr = total.g - left.g;
    double gain = score(gl, hl) + score(gr, hr) - score(total.g, total.h);
    if (gain <= 1e-12 || gain <= best.gain) return;
    best = SplitCandidate{gain, feature, threshold};
  }

  static double midpoint(double lo, double hi) {
    double m = lo + (hi - lo) / 2.0;
    return m > lo ? m : hi;
  }

  static Sums minus(const Sums& a, const Sums& b) {
    return Sums{a.g - b.g, a.h - b.h, a.count - b.count};
  }

  void find_splits(const std::vector<double>& grad, const std::vector<double>& hess,
                   const std::vector<Sums>& totals, std::vector<SplitCandidate>& best) {
    std::vector<Scan> scan(totals.size());
    std::vector<std::int32_t> touched;
    std::uint32_t stamp = 0;
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      const auto& col = columns_[c];
      const std::int32_t feature = features_[c];
      const std::size_t split = split_at_[c];

      // Negative values, ascending; acc holds the left side.
      ++stamp;
      touched.clear();
      for (std::size_t k = 0; k < split; ++k) {
        const auto& e = col[k];
        auto s = slot(e.row);
        if (s < 0) continue;
        auto& st = scan[static_cast<std::size_t>(s)];
        if (st.stamp != stamp) {
          st = Scan{};
          st.stamp = stamp;
          touched.push_back(s);
        } else if (e.value != st.last) {
          consider(totals[static_cast<std::size_t>(s)], st.acc, feature, midpoint(st.last, e.value),
                   best[static_cast<std::size_t>(s)]);
        }
        st.acc.add(grad[e.row], hess[e.row]);
        st.last = e.value;
      }
      for (auto s : touched) {
        auto& st = scan[static_cast<std::size_t>(s)];
        consider(totals[static_cast<std::size_t>(s)], st.acc, feature, midpoint(st.last, 0.0),
                 best[static_cast<std::size_t>(s)]);
      }

      // Positive values, descending; acc holds the right side.
      ++stamp;
      touched.clear();
      for (std::size_t k = col.size(); k-- > split;) {
        const auto& e = col[k];
        auto s = slot(e.row);
        if (s < 0) continue;
        auto& st = scan[static_cast<std::size_t>(s)];
        const auto& tot = totals[static_cast<std::size_t>(s)];
        if (st.stamp != stamp) {
          st = Scan{};
          st.stamp = stamp;
          touched.push_back(s);
        } else if (e.value != st.last) {
          consider(tot, minus(tot, st.acc), feature, midpoint(e.value, st.last),
                   best[static_cast<std::size_t>(s)]);
        }
        st.acc.add(grad[e.row], hess[e.row]);
        st.last = e.value;
      }
      for (auto s : touched) {
        auto& st = scan[static_cast<std::size_t>(s)];
        const auto& tot = totals[static_cast<std::size_t>(s)];
        consider(tot, minus(tot, st.acc), feature, midpoint(0.0, st.last),
                 best[static_cast<std::size_t>(s)]);
      }
    }
  }

  std::span<const Example> examples_;
  TrainParams params_;
  std::vector<std::int32_t> features_;
  std::vector<std::size_t> split_at_;
  std::vector<std::vector<ColumnEntry>> columns_;
  std::vector<std::int32_t> node_of_row_;
  std::vector<std::int32_t> slot_of_node_;
};

}  // namespace detail

// Fits params.rounds trees. Requires at least one example of each label.
inline Model train(std::span<const Example> examples, const TrainParams& params,
                   FeatureConfig layout = {}, TrainReport* report = nullptr) {
  if (examples.empty()) throw ConfigError("no training examples");
  if (params.rounds < 1 || params.max_depth < 1) throw ConfigError("rounds and depth must be >= 1");
  if (params.subsample <= 0.0 || params.subsample > 1.0) throw ConfigError("subsample must be in (0, 1]");
  std::size_t positives = 0;
  for (const auto& ex : examples) positives += ex.label ? 1 : 0;
  const std::size_t negatives = examples.size() - positives;
  if (positives == 0 || negatives == 0) throw ConfigError("training data must contain both labels");

  Model model;
  model.learning_rate = params.learning_rate;
  model.hash_base = layout.hash_base;
  model.watchlist_count = layout.watchlist_count;
  model.base_score = std::log(static_cast<double>(positives) / static_cast<double>(negatives));

  const std::size_t n = examples.size();
  std::vector<double> margin(n, model.base_score);
  std::vector<double> grad(n), hess(n);
  std::vector<char> active(n, 1);
  Rng rng(params.seed);
  detail::TreeTrainer trainer(examples, params);

  auto mean_loss = [&] {
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) sum += detail::logistic_loss(margin[r], examples[r].label);
    return sum / static_cast<double>(n);
  };
  if (report) report->loss.push_back(mean_loss());

  for (int round = 0; round < params.rounds; ++round) {
    for (std::size_t r = 0; r < n; ++r) {
      double p = sigmoid(margin[r]);
      grad[r] = p - examples[r].label;
      hess[r] = std::max(p * (1.0 - p), 1e-16);
    }
    if (params.subsample < 1.0)
      for (std::size_t r = 0; r < n; ++r) active[r] = uniform01(rng) < params.subsample ? 1 : 0;
    Tree tree = trainer.grow(grad, hess, active);
    for (std::size_t r = 0; r < n; ++r)
      margin[r] += params.learning_rate * tree.score(examples[r].vector);
    model.trees.push_back(std::move(tree));
    if (report) report->loss.push_back(mean_loss());
  }

  if (report) {
    std::size_t pos_ok = 0, neg_ok = 0;
    for (std::size_t r = 0; r < n; ++r) {
      bool said_positive = sigmoid(margin[r]) >= 0.5;
      if (examples[r].label) pos_ok += said_positive ? 1 : 0;
      else neg_ok += said_positive ? 0 : 1;
    }
    report->positives = positives;
    report->negatives = negatives;
    report->positive_accuracy = static_cast<double>(pos_ok) / static_cast<double>(positives);
    report->negative_accuracy = static_cast<double>(neg_ok) / static_cast<double>(negatives);
    report->features_used = model_stats(model).total();
  }
  return model;
}

// ---------------------------------------------------------------------------
// model.gbt: a versioned text format with one block per tree, nodes in
// preorder (a split line is followed by its left then its right subtree).
//
//   hintgrind-gbt 1
//   base_score <x>
//   learning_rate <x>
//   hash_base <n>
//   watchlists <n>
//   trees <count>
//   tree <i>
//   split <feature> <threshold>
//   leaf <value>
//   end

namespace detail {

inline void write_subtree(std::ostream& out, const Tree& t, std::int32_t n) {
  const TreeNode& node = t.nodes[static_cast<std::size_t>(n)];
  if (node.is_leaf()) {
    out << "leaf " << format_double(node.value) << '\n';
    return;
  }
  out << "split " << node.feature << ' ' << format_double(node.threshold) << '\n';
  write_subtree(out, t, node.left);
  write_subtree(out, t, node.right);
}

inline std::int32_t read_subtree(std::istream& in, Tree& t, int depth) {
  if (depth > 4096) throw std::runtime_error("model tree too deep");
  std::string kind;
  if (!(in >> kind)) throw std::runtime_error("truncated model file");
  auto id = static_cast<std::int32_t>(t.nodes.size());
  t.nodes.push_back(TreeNode{});
  std::string a, b;
  if (kind == "leaf") {
    in >> a;
    t.nodes[static_cast<std::size_t>(id)].value = parse_double(a);
  } else if (kind == "split") {
    in >> a >> b;
    auto feature = static_cast<std::int32_t>(parse_int(a));
    double thr = parse_double(b);
    std::int32_t left = read_subtree(in, t, depth + 1);
    std::int32_t right = read_subtree(in, t, depth + 1);
    auto& node = t.nodes[static_cast<std::size_t>(id)];
    node.feature = feature;
    node.threshold = thr;
    node.left = left;
    node.right = right;
  } else {
    throw std::runtime_error("unexpected '" + kind + "' in model file");
  }
  return id;
}

}  // namespace detail

inline std::string serialize_model(const Model& m) {
  std::ostringstream out;
  out << "hintgrind-gbt 1\n";
  out << "base_score " << format_double(m.base_score) << '\n';
  out << "learning_rate " << format_double(m.learning_rate) << '\n';
  out << "hash_base " << m.hash_base << '\n';
  out << "watchlists " << m.watchlist_count << '\n';
  out << "trees " << m.trees.size() << '\n';
  for (std::size_t i = 0; i < m.trees.size(); ++i) {
    out << "tree " << i << '\n';
    detail::write_subtree(out, m.trees[i], 0);
  }
  out << "end\n";
  return out.str();
}

inline Model parse_model(const std::string& text) {
  std::istringstream in(text);
  Model m;
  std::string key, value;
  in >> key >> value;
  if (key != "hintgrind-gbt" || value != "1") throw std::runtime_error("not a hintgrind-gbt v1 model");
  std::size_t count = 0;
  auto expect = [&](const char* k) {
    if (!(in >> key >> value) || key != k) throw std::runtime_error(std::string("model file: expected ") + k);
    return value;
  };
  m.base_score = parse_double(expect("base_score"));
  m.learning_rate = parse_double(expect("learning_rate"));
  m.hash_base = static_cast<std::uint32_t>(parse_int(expect("hash_base")));
  m.watchlist_count = static_cast<std::uint32_t>(parse_int(expect("watchlists")));
  count = static_cast<std::size_t>(parse_int(expect("trees")));
  for (std::size_t i = 0; i < count; ++i) {
    expect("tree");
    Tree t;
    detail::read_subtree(in, t, 0);
    m.trees.push_back(std::move(t));
  }
  if (!(in >> key) || key != "end") throw std::runtime_error("model file: missing end marker");
  return m;
}

inline void save_model(const Model& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << serialize_model(m);
}

inline Model load_model(const std::string& path) { return parse_model(read_file(path)); }

}  // namespace hintgrind
