/*
 * Copyright 2026 The Hearthcast Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "hearthcast/constrained_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>

#include <fmt/format.h>

#include "hearthcast/errors.hpp"
#include "hearthcast/matrix.hpp"

namespace hearthcast {

namespace {

// Centered second moments of (surface, target) over a leaf.
struct LeafStats {
  std::size_t n = 0;
  double mean_s = 0.0;
  double mean_y = 0.0;
  double sss = 0.0;
  double ssy = 0.0;
  double syy = 0.0;
  bool constant_surface = true;
};

LeafStats ComputeStats(const std::vector<double>* surface,
                       std::span<const double> targets,
                       std::span<const std::size_t> rows) {
  LeafStats s;
  s.n = rows.size();
  if (rows.empty()) return s;
  const auto n = static_cast<double>(rows.size());
  double sum_y = 0.0;
  double sum_s = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t r : rows) {
    sum_y += targets[r];
    if (surface) {
      const double v = (*surface)[r];
      sum_s += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  s.mean_y = sum_y / n;
  s.mean_s = surface ? sum_s / n : 0.0;
  s.constant_surface = !surface || lo == hi;
  for (std::size_t r : rows) {
    const double dy = targets[r] - s.mean_y;
    s.syy += dy * dy;
    if (!s.constant_surface) {
      const double ds = (*surface)[r] - s.mean_s;
      s.sss += ds * ds;
      s.ssy += ds * dy;
    }
  }
  return s;
}

LeafLinear LocalLeaf(const LeafStats& s) {
  LeafLinear leaf{s.mean_y, 0.0, s.n};
  if (!s.constant_surface && s.ssy > 0.0) {
    leaf.beta = s.ssy / s.sss;
    leaf.alpha = s.mean_y - leaf.beta * s.mean_s;
  }
  return leaf;
}

double PooledBeta(std::span<const LeafStats> leaves) {
  double sss = 0.0;
  double ssy = 0.0;
  for (const auto& s : leaves) {
    sss += s.sss;
    ssy += s.ssy;
  }
  return sss > 0.0 && ssy > 0.0 ? ssy / sss : 0.0;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// f(point) >= value or f(point) <= value for a leaf line f.
struct PointBound {
  double point = 0.0;
  double value = 0.0;
};

struct Constraints {
  std::vector<PointBound> lower;
  std::vector<PointBound> upper;

  double MaxLower() const {
    double m = -kInf;
    for (const auto& b : lower) m = std::max(m, b.value);
    return m;
  }
  double MinUpper() const {
    double m = kInf;
    for (const auto& b : upper) m = std::min(m, b.value);
    return m;
  }
};

// Line parameterized by its value at the leaf mean surface.
struct LeafFit {
  double c = 0.0;
  double beta = 0.0;
};

double Objective(const LeafStats& s, const LeafFit& f) {
  const double d = s.mean_y - f.c;
  return std::max(0.0, s.syy - 2.0 * f.beta * s.ssy + f.beta * f.beta * s.sss) +
         static_cast<double>(s.n) * d * d;
}

bool Feasible(const LeafStats& s, const Constraints& k, const LeafFit& f) {
  if (!(f.beta >= 0.0) || !std::isfinite(f.c) || !std::isfinite(f.beta)) {
    return false;
  }
  for (const auto& b : k.lower) {
    if (f.c + f.beta * (b.point - s.mean_s) <
        b.value - 1e-12 * (1.0 + std::abs(b.value))) {
      return false;
    }
  }
  for (const auto& b : k.upper) {
    if (f.c + f.beta * (b.point - s.mean_s) >
        b.value + 1e-12 * (1.0 + std::abs(b.value))) {
      return false;
    }
  }
  return true;
}

const LeafFit* BestFeasible(const LeafStats& s, const Constraints& k,
                            const std::vector<LeafFit>& candidates) {
  const LeafFit* best = nullptr;
  double best_objective = kInf;
  for (const auto& f : candidates) {
    if (!Feasible(s, k, f)) continue;
    const double objective = Objective(s, f);
    if (best == nullptr || objective < best_objective) {
      best = &f;
      best_objective = objective;
    }
  }
  return best;
}

// Least squares line with beta >= 0 satisfying the point bounds. A convex QP
// in two variables: the optimum solves the equality problem of an active set
// of at most two constraints, so every such set is solved in closed form and
// the best feasible candidate wins (earlier candidates on ties). With
// `fixed_beta` the slope is held whenever some intercept is feasible.
// Requires MaxLower() <= MinUpper(), which makes a constant line feasible.
LeafLinear SolveLeaf(const LeafStats& s, const Constraints& k,
                     std::optional<double> fixed_beta) {
  struct Active {
    double d;
    double v;
  };
  std::vector<Active> active;
  for (const auto* group : {&k.lower, &k.upper}) {
    for (const auto& b : *group) active.push_back({b.point - s.mean_s, b.value});
  }
  const double n = static_cast<double>(s.n);
  const LeafFit fallback{std::clamp(s.mean_y, k.MaxLower(), k.MinUpper()), 0.0};

  std::vector<LeafFit> candidates;
  const LeafFit* best = nullptr;
  if (fixed_beta) {
    const double beta = *fixed_beta;
    candidates.push_back({s.mean_y, beta});
    for (const auto& a : active) candidates.push_back({a.v - beta * a.d, beta});
    if (beta == 0.0) candidates.push_back(fallback);
    best = BestFeasible(s, k, candidates);
  }
  if (best == nullptr) {
    candidates.clear();
    candidates.push_back({s.mean_y, LocalLeaf(s).beta});
    candidates.push_back({s.mean_y, 0.0});
    for (const auto& a : active) {
      const double den = s.sss + n * a.d * a.d;
      if (den > 0.0) {
        const double beta = (s.ssy - n * a.d * (s.mean_y - a.v)) / den;
        candidates.push_back({a.v - beta * a.d, beta});
      }
      candidates.push_back({a.v, 0.0});
    }
    for (std::size_t i = 0; i < active.size(); ++i) {
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        if (active[i].d == active[j].d) continue;
        const double beta =
            (active[j].v - active[i].v) / (active[j].d - active[i].d);
        candidates.push_back({active[i].v - beta * active[i].d, beta});
      }
    }
    candidates.push_back(fallback);
    best = BestFeasible(s, k, candidates);
  }
  if (best == nullptr) best = &fallback;
  return LeafLinear{best->c - best->beta * s.mean_s, best->beta, s.n};
}

struct Range {
  std::size_t begin = 0;
  std::size_t end = 0;
  int node = -1;

  std::size_t size() const { return end - begin; }
};

const std::vector<double>* SurfaceColumn(const FeatureMatrix& matrix,
                                         const LevelwiseOptions& options) {
  if (options.surface_column < 0) return nullptr;
  return &matrix.columns[static_cast<std::size_t>(options.surface_column)];
}

// Children SSE of `rows` under `rule`, or nullopt when the split violates the
// minimum bucket or does not lower the node SSE.
std::optional<double> EvaluateRule(const FeatureMatrix& matrix,
                                   std::span<const double> targets,
                                   std::span<const std::size_t> rows,
                                   const SplitRule& rule,
                                   std::size_t min_bucket, double node_sse) {
  const auto& column = matrix.columns[static_cast<std::size_t>(rule.column)];
  double mean = 0.0;
  for (std::size_t r : rows) mean += targets[r];
  mean /= static_cast<double>(rows.size());
  std::size_t nl = 0;
  double sl = 0.0, ql = 0.0, sr = 0.0, qr = 0.0;
  for (std::size_t r : rows) {
    const double d = targets[r] - mean;
    if (rule.GoesLeft(column[r])) {
      ++nl;
      sl += d;
      ql += d * d;
    } else {
      sr += d;
      qr += d * d;
    }
  }
  const std::size_t nr = rows.size() - nl;
  if (nl < min_bucket || nr < min_bucket || nl == 0 || nr == 0) {
    return std::nullopt;
  }
  const double after = std::max(0.0, ql - sl * sl / static_cast<double>(nl)) +
                       std::max(0.0, qr - sr * sr / static_cast<double>(nr));
  if (!(after < node_sse * (1.0 - 1e-12))) return std::nullopt;
  return after;
}

// Candidate rules on `column` built from the pooled rows of a level.
std::vector<SplitRule> PooledCandidates(const FeatureMatrix& matrix,
                                        std::span<const double> targets,
                                        std::span<const std::size_t> rows,
                                        int column) {
  const auto& values = matrix.columns[static_cast<std::size_t>(column)];
  std::vector<SplitRule> out;
  if (matrix.specs[static_cast<std::size_t>(column)].categorical) {
    std::vector<double> sum(64, 0.0);
    std::vector<std::size_t> count(64, 0);
    for (std::size_t r : rows) {
      const auto c = static_cast<std::size_t>(values[r]);
      sum[c] += targets[r];
      ++count[c];
    }
    std::vector<std::size_t> present;
    for (std::size_t c = 0; c < 64; ++c) {
      if (count[c] > 0) present.push_back(c);
    }
    std::stable_sort(present.begin(), present.end(), [&](auto a, auto b) {
      return sum[a] / count[a] < sum[b] / count[b];
    });
    std::uint64_t mask = 0;
    for (std::size_t k = 0; k + 1 < present.size(); ++k) {
      mask |= std::uint64_t{1} << present[k];
      out.push_back(SplitRule{column, true, 0.0, mask});
    }
    return out;
  }
  std::vector<double> sorted;
  sorted.reserve(rows.size());
  for (std::size_t r : rows) sorted.push_back(values[r]);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct;
  std::vector<std::size_t> cumulative;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (distinct.empty() || distinct.back() != sorted[i]) {
      distinct.push_back(sorted[i]);
      cumulative.push_back(0);
    }
    cumulative.back() = i + 1;
  }
  const std::size_t m = distinct.size();
  std::vector<std::size_t> cuts;
  if (m <= kMaxNumericCuts) {
    for (std::size_t t = 0; t + 1 < m; ++t) cuts.push_back(t);
  } else {
    const std::size_t n = sorted.size();
    for (std::size_t j = 1; j <= kMaxNumericCuts; ++j) {
      const std::size_t rank =
          (j * n + kMaxNumericCuts) / (kMaxNumericCuts + 1);
      const auto t = static_cast<std::size_t>(
          std::lower_bound(cumulative.begin(), cumulative.end(), rank) -
          cumulative.begin());
      if (t + 1 < m && (cuts.empty() || cuts.back() != t)) cuts.push_back(t);
    }
  }
  for (std::size_t t : cuts) {
    const double lo = distinct[t];
    const double hi = distinct[t + 1];
    double threshold = lo + (hi - lo) / 2.0;
    if (!(threshold >= lo && threshold < hi)) threshold = lo;
    out.push_back(SplitRule{column, false, threshold, 0});
  }
  return out;
}

// Split decision for every frontier range on `column`.
std::vector<std::optional<SplitRule>> ChooseSplits(
    const FeatureMatrix& matrix, std::span<const double> targets,
    std::span<const std::size_t> rows, std::span<const Range> frontier,
    int column, const LevelwiseOptions& options) {
  std::vector<std::optional<SplitRule>> rules(frontier.size());
  if (options.threshold_mode == ThresholdMode::kPerNode) {
    const int columns[] = {column};
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      const auto node_rows = rows.subspan(frontier[i].begin, frontier[i].size());
      if (auto split = FindBestSplit(matrix, targets, node_rows,
                                     options.min_bucket, columns)) {
        rules[i] = split->rule;
      }
    }
    return rules;
  }

  // Shared mode: one rule for the whole level.
  std::vector<std::size_t> pooled;
  std::vector<double> node_sse;
  for (const auto& range : frontier) {
    const auto node_rows = rows.subspan(range.begin, range.size());
    pooled.insert(pooled.end(), node_rows.begin(), node_rows.end());
    node_sse.push_back(NodeSse(targets, node_rows));
  }
  const double before = std::accumulate(node_sse.begin(), node_sse.end(), 0.0);
  double best_total = before * (1.0 - 1e-12);
  std::optional<SplitRule> best;
  for (const auto& rule : PooledCandidates(matrix, targets, pooled, column)) {
    double total = 0.0;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      const auto after = EvaluateRule(
          matrix, targets, rows.subspan(frontier[i].begin, frontier[i].size()),
          rule, std::max<std::size_t>(options.min_bucket, 1), node_sse[i]);
      total += after.value_or(node_sse[i]);
    }
    if (total < best_total) {
      best_total = total;
      best = rule;
    }
  }
  if (!best) return rules;
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    if (EvaluateRule(matrix, targets,
                     rows.subspan(frontier[i].begin, frontier[i].size()), *best,
                     std::max<std::size_t>(options.min_bucket, 1),
                     node_sse[i])) {
      rules[i] = *best;
    }
  }
  return rules;
}

// Level-by-level growth shared by fitting and schedule search.
struct GrowthState {
  std::vector<std::size_t> rows;
  std::vector<Range> frontier;
  std::vector<Range> closed;
  std::vector<LevelNode> nodes;
  int level = 0;
};

GrowthState InitialState(std::size_t n) {
  GrowthState s;
  s.rows.resize(n);
  std::iota(s.rows.begin(), s.rows.end(), std::size_t{0});
  LevelNode root;
  root.support = n;
  s.nodes.push_back(root);
  s.frontier.push_back({0, n, 0});
  return s;
}

// Splits the frontier on `column`; returns the number of nodes split.
std::size_t Grow(GrowthState& s, const FeatureMatrix& matrix,
                 std::span<const double> targets, int column,
                 const LevelwiseOptions& options) {
  const auto rules =
      ChooseSplits(matrix, targets, s.rows, s.frontier, column, options);
  std::vector<Range> next;
  std::size_t splits = 0;
  for (std::size_t i = 0; i < s.frontier.size(); ++i) {
    const Range range = s.frontier[i];
    if (!rules[i]) {
      s.closed.push_back(range);
      continue;
    }
    ++splits;
    const std::size_t n_left = PartitionRows(
        matrix, *rules[i],
        std::span<std::size_t>(s.rows).subspan(range.begin, range.size()));
    const int left = static_cast<int>(s.nodes.size());
    const int right = left + 1;
    LevelNode child;
    child.level = s.level + 1;
    child.support = n_left;
    s.nodes.push_back(child);
    child.support = range.size() - n_left;
    s.nodes.push_back(child);
    auto& parent = s.nodes[static_cast<std::size_t>(range.node)];
    parent.rule = *rules[i];
    parent.left = left;
    parent.right = right;
    next.push_back({range.begin, range.begin + n_left, left});
    next.push_back({range.begin + n_left, range.end, right});
  }
  s.frontier = std::move(next);
  ++s.level;
  return splits;
}

struct FittedLeaves {
  std::vector<LeafLinear> leaves;  // Closed ranges, then frontier ranges.
  double sse = 0.0;
};

struct Interval {
  double lo = -kInf;
  double hi = kInf;

  bool Contains(double p) const { return lo <= p && p <= hi; }
};

Constraints Restrict(const Constraints& k, const Interval& interval) {
  Constraints out;
  for (const auto& b : k.lower) {
    if (interval.Contains(b.point)) out.lower.push_back(b);
  }
  for (const auto& b : k.upper) {
    if (interval.Contains(b.point)) out.upper.push_back(b);
  }
  return out;
}

// True when a split on a 0/1 column sends 0 left and 1 right.
bool SplitsFlag(const SplitRule& rule) {
  return !rule.categorical && rule.threshold >= 0.0 && rule.threshold < 1.0;
}

const SurfaceIndicator* IndicatorFor(const LevelwiseOptions& options,
                                     int column) {
  for (const auto& ind : options.surface_indicators) {
    if (ind.column == column) return &ind;
  }
  return nullptr;
}

// Leaf lines for a grown structure.
//
// With monotone_surface, predictions must not drop where a record crosses a
// surface boundary: a surface split threshold, or an edge of an indicator
// column such as the low-consumption flag. Every such split adds the point
// bound f(p) <= m to the leaves on the low side and f(p) >= m to the leaves
// on the high side that can be reached at p. The meeting value m is the
// midpoint between the highest low-side line and the lowest high-side line
// at p, so it binds only when they conflict. It is clamped so that every
// node keeps max(lower bounds) <= min(upper bounds), which keeps all leaf
// problems feasible. Nodes are visited parents first.
FittedLeaves FitLeaves(const GrowthState& s, const FeatureMatrix& matrix,
                       std::span<const double> targets,
                       const LevelwiseOptions& options) {
  const auto* surface = SurfaceColumn(matrix, options);
  const std::span<const std::size_t> rows(s.rows);
  const std::size_t num_nodes = s.nodes.size();
  std::vector<LeafStats> stats(num_nodes);
  std::vector<int> leaf_order;
  for (const auto* group : {&s.closed, &s.frontier}) {
    for (const auto& range : *group) {
      stats[static_cast<std::size_t>(range.node)] =
          ComputeStats(surface, targets, rows.subspan(range.begin, range.size()));
      leaf_order.push_back(range.node);
    }
  }

  std::optional<double> fixed_beta;
  if (options.leaf_model == LeafModelKind::kMean) fixed_beta = 0.0;
  if (options.leaf_model == LeafModelKind::kGlobalSurface) {
    std::vector<LeafStats> leaf_stats;
    for (int id : leaf_order) leaf_stats.push_back(stats[static_cast<std::size_t>(id)]);
    fixed_beta = PooledBeta(leaf_stats);
  }

  std::vector<Constraints> bounds(num_nodes);
  const bool monotone = options.monotone_surface && surface != nullptr;
  if (monotone) {
    // Surface interval of every node; children follow their parents.
    std::vector<Interval> interval(num_nodes);
    for (std::size_t i = 0; i < num_nodes; ++i) {
      const auto& node = s.nodes[i];
      if (node.is_leaf()) continue;
      Interval left = interval[i];
      Interval right = interval[i];
      if (node.rule.column == options.surface_column && !node.rule.categorical) {
        left.hi = std::min(left.hi, node.rule.threshold);
        right.lo = std::max(right.lo, node.rule.threshold);
      } else if (const auto* ind = IndicatorFor(options, node.rule.column);
                 ind != nullptr && SplitsFlag(node.rule)) {
        right.lo = std::max(right.lo, ind->lower_edge);
        right.hi = std::min(right.hi, ind->upper_edge);
      }
      interval[static_cast<std::size_t>(node.left)] = left;
      interval[static_cast<std::size_t>(node.right)] = right;
    }
    // Leaves under every node, in node order.
    std::vector<std::vector<int>> leaves_under(num_nodes);
    for (std::size_t i = num_nodes; i-- > 0;) {
      const auto& node = s.nodes[i];
      if (node.is_leaf()) {
        leaves_under[i] = {static_cast<int>(i)};
      } else {
        leaves_under[i] = leaves_under[static_cast<std::size_t>(node.left)];
        const auto& r = leaves_under[static_cast<std::size_t>(node.right)];
        leaves_under[i].insert(leaves_under[i].end(), r.begin(), r.end());
      }
    }

    struct Edge {
      int low_side;   // Receives f(p) <= m.
      int high_side;  // Receives f(p) >= m.
      double point;
    };
    for (std::size_t i = 0; i < num_nodes; ++i) {
      const auto& node = s.nodes[i];
      if (node.is_leaf()) continue;
      const auto li = static_cast<std::size_t>(node.left);
      const auto ri = static_cast<std::size_t>(node.right);
      bounds[li] = Restrict(bounds[i], interval[li]);
      bounds[ri] = Restrict(bounds[i], interval[ri]);

      std::vector<Edge> edges;
      if (node.rule.column == options.surface_column && !node.rule.categorical) {
        edges.push_back({node.left, node.right, node.rule.threshold});
      } else if (const auto* ind = IndicatorFor(options, node.rule.column);
                 ind != nullptr && SplitsFlag(node.rule)) {
        // The flag is 1 on the right, inside (lower_edge, upper_edge].
        if (std::isfinite(ind->upper_edge)) {
          edges.push_back({node.right, node.left, ind->upper_edge});
        }
        if (std::isfinite(ind->lower_edge)) {
          edges.push_back({node.left, node.right, ind->lower_edge});
        }
      }

      double raw = 0.0;
      double low = -kInf;
      double high = kInf;
      std::vector<Edge> live;
      for (const auto& e : edges) {
        const auto low_i = static_cast<std::size_t>(e.low_side);
        const auto high_i = static_cast<std::size_t>(e.high_side);
        double top = -kInf;
        double bottom = kInf;
        for (int leaf : leaves_under[low_i]) {
          const auto l = static_cast<std::size_t>(leaf);
          if (!interval[l].Contains(e.point)) continue;
          top = std::max(top, SolveLeaf(stats[l], Restrict(bounds[low_i], interval[l]),
                                        fixed_beta)
                                  .Predict(e.point));
        }
        for (int leaf : leaves_under[high_i]) {
          const auto l = static_cast<std::size_t>(leaf);
          if (!interval[l].Contains(e.point)) continue;
          bottom = std::min(
              bottom, SolveLeaf(stats[l], Restrict(bounds[high_i], interval[l]),
                                fixed_beta)
                          .Predict(e.point));
        }
        // No record crosses here.
        if (!std::isfinite(top) || !std::isfinite(bottom)) continue;
        raw += 0.5 * (top + bottom);
        low = std::max(low, bounds[low_i].MaxLower());
        high = std::min(high, bounds[high_i].MinUpper());
        live.push_back(e);
      }
      if (live.empty()) continue;
      // Two-sided indicators share one meeting value so both children stay
      // feasible.
      const double mid =
          std::clamp(raw / static_cast<double>(live.size()), low, high);
      for (const auto& e : live) {
        bounds[static_cast<std::size_t>(e.low_side)].upper.push_back({e.point, mid});
        bounds[static_cast<std::size_t>(e.high_side)].lower.push_back({e.point, mid});
      }
    }
  }

  FittedLeaves out;
  for (int id : leaf_order) {
    const auto& st = stats[static_cast<std::size_t>(id)];
    const LeafLinear leaf =
        SolveLeaf(st, bounds[static_cast<std::size_t>(id)], fixed_beta);
    out.sse += Objective(st, {leaf.alpha + leaf.beta * st.mean_s, leaf.beta});
    out.leaves.push_back(leaf);
  }
  return out;
}

double StateSse(const GrowthState& s, const FeatureMatrix& matrix,
                std::span<const double> targets,
                const LevelwiseOptions& options) {
  return FitLeaves(s, matrix, targets, options).sse;
}

void CheckSchedule(const FeatureMatrix& matrix, std::span<const int> schedule) {
  if (schedule.size() > kMaxScheduleLength) {
    throw ConfigError(fmt::format("schedule has {} levels, the limit is {}",
                                  schedule.size(), kMaxScheduleLength));
  }
  for (int c : schedule) {
    if (c < 0 || static_cast<std::size_t>(c) >= matrix.num_columns()) {
      throw ConfigError("schedule references an unknown column");
    }
  }
}

nlohmann::json NodeToJson(const std::vector<LevelNode>& nodes, int index,
                          std::span<const ColumnSpec> specs) {
  const auto& node = nodes[static_cast<std::size_t>(index)];
  if (node.is_leaf()) {
    return {{"level", node.level},
            {"leaf",
             {{"alpha", node.leaf.alpha},
              {"beta", node.leaf.beta},
              {"support", node.leaf.support}}}};
  }
  return {{"level", node.level},
          {"support", node.support},
          {"split", node.rule.ToJson(specs[node.rule.column])},
          {"left", NodeToJson(nodes, node.left, specs)},
          {"right", NodeToJson(nodes, node.right, specs)}};
}

int NodeFromJson(const nlohmann::json& json, std::span<const ColumnSpec> specs,
                 std::span<const int> schedule, int level,
                 std::vector<LevelNode>& nodes) {
  const int index = static_cast<int>(nodes.size());
  nodes.emplace_back();
  nodes[index].level = level;
  if (json.contains("leaf")) {
    const auto& leaf = json.at("leaf");
    nodes[index].leaf = LeafLinear{leaf.at("alpha").get<double>(),
                                   leaf.at("beta").get<double>(),
                                   leaf.at("support").get<std::size_t>()};
    if (nodes[index].leaf.beta < 0.0) throw ModelError("leaf with beta < 0");
    nodes[index].support = nodes[index].leaf.support;
    return index;
  }
  if (static_cast<std::size_t>(level) >= schedule.size()) {
    throw ModelError("tree deeper than its schedule");
  }
  nodes[index].rule = SplitRule::FromJson(json.at("split"), specs);
  if (nodes[index].rule.column != schedule[static_cast<std::size_t>(level)]) {
    throw ModelError(fmt::format("node at level {} does not split on the "
                                 "level feature",
                                 level));
  }
  nodes[index].support = json.value("support", std::size_t{0});
  const int left = NodeFromJson(json.at("left"), specs, schedule, level + 1, nodes);
  const int right =
      NodeFromJson(json.at("right"), specs, schedule, level + 1, nodes);
  nodes[index].left = left;
  nodes[index].right = right;
  return index;
}

std::string_view LeafModelName(LeafModelKind kind) {
  switch (kind) {
    case LeafModelKind::kMean: return "mean";
    case LeafModelKind::kSurfaceLinear: return "surface_linear";
    case LeafModelKind::kGlobalSurface: return "global_surface";
  }
  return "?";
}

std::vector<int> SlotsToColumns(std::span<const Slot> slots) {
  std::vector<int> out;
  for (Slot s : slots) out.push_back(SlotIndex(s));
  return out;
}

Slot ParseSlot(const std::string& name) {
  const auto slot = SlotByName(name);
  if (!slot) throw ConfigError("unknown feature '" + name + "'");
  return *slot;
}

// Surface edges of the low-consumption flag: the flag can only be 1 inside
// (lower_edge, upper_edge]. A "!=" clause on the surface is not bounded.
std::vector<SurfaceIndicator> IndicatorsFor(const LowConsumptionRule& rule) {
  SurfaceIndicator ind;
  ind.column = SlotIndex(Slot::kLowConsumption);
  bool any = false;
  for (const auto& clause : rule.clauses()) {
    if (clause.field != "surface_m2") continue;
    const double v = std::get<double>(clause.value);
    switch (clause.op) {
      case RuleClause::Op::kLt:
      case RuleClause::Op::kLe:
        ind.upper_edge = std::min(ind.upper_edge, v);
        any = true;
        break;
      case RuleClause::Op::kGt:
      case RuleClause::Op::kGe:
        ind.lower_edge = std::max(ind.lower_edge, v);
        any = true;
        break;
      case RuleClause::Op::kEq:
        ind.lower_edge = std::max(ind.lower_edge, v);
        ind.upper_edge = std::min(ind.upper_edge, v);
        any = true;
        break;
      case RuleClause::Op::kNe:
        break;
    }
  }
  if (!any) return {};
  return {ind};
}

LevelwiseOptions OptionsFor(const ConstrainedTreeConfig& config,
                            const LowConsumptionRule& rule) {
  LevelwiseOptions o;
  o.min_bucket = config.min_bucket;
  o.leaf_model = config.leaf_model;
  o.threshold_mode = config.threshold_mode;
  o.surface_column = SlotIndex(Slot::kSurface);
  o.monotone_surface = config.monotone_surface;
  o.surface_indicators = IndicatorsFor(rule);
  return o;
}

std::vector<ScheduleCandidate> CandidatesFor(std::span<const Slot> slots) {
  std::vector<ScheduleCandidate> out;
  for (Slot s : slots) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& c) {
      return c.column == SlotIndex(s);
    });
    if (it != out.end()) continue;
    out.push_back({SlotIndex(s), s == Slot::kSurface ? 2 : 1});
  }
  return out;
}

}  // namespace

LeafLinear FitLeafLinear(std::span<const double> surface,
                         std::span<const double> targets,
                         std::span<const std::size_t> rows) {
  if (rows.empty()) throw DataError("cannot fit a leaf without rows");
  const std::vector<double> column(surface.begin(), surface.end());
  return LocalLeaf(ComputeStats(&column, targets, rows));
}

std::string TraceStep::Text() const {
  return fmt::format("{} → {}", rule, went_left ? "left" : "right");
}

nlohmann::json ExplanationTrace::ToJson() const {
  nlohmann::json steps_json = nlohmann::json::array();
  for (const auto& s : steps) {
    steps_json.push_back({{"level", s.level},
                          {"feature", s.feature},
                          {"rule", s.rule},
                          {"branch", s.went_left ? "left" : "right"},
                          {"text", s.Text()}});
  }
  return {{"steps", steps_json},
          {"leaf_id", leaf_id},
          {"alpha", alpha},
          {"beta", beta},
          {"surface", surface},
          {"surface_contribution", surface_contribution},
          {"prediction", prediction}};
}

std::string ExplanationTrace::Text() const {
  std::string out;
  for (const auto& s : steps) out += s.Text() + "\n";
  out += fmt::format("leaf {}: {:.2f} + {:.4f}×surface({}) = {:.2f} kWh\n",
                     leaf_id, alpha, beta, surface, prediction);
  return out;
}

LevelwiseTree LevelwiseTree::Fit(const FeatureMatrix& matrix,
                                 std::span<const double> targets,
                                 std::span<const int> schedule,
                                 const LevelwiseOptions& options) {
  CheckSchedule(matrix, schedule);
  if (options.min_bucket < 1) throw ConfigError("min_bucket must be >= 1");
  const std::size_t n = matrix.num_rows();
  if (n == 0 || n < options.min_bucket) {
    throw DataError(fmt::format("{} training rows, min_bucket is {}", n,
                                options.min_bucket));
  }
  GrowthState state = InitialState(n);
  for (int column : schedule) {
    if (state.frontier.empty()) break;
    Grow(state, matrix, targets, column, options);
  }

  const FittedLeaves fitted = FitLeaves(state, matrix, targets, options);
  std::size_t k = 0;
  for (const auto* group : {&state.closed, &state.frontier}) {
    for (const auto& range : *group) {
      state.nodes[static_cast<std::size_t>(range.node)].leaf = fitted.leaves[k++];
    }
  }

  LevelwiseTree tree;
  tree.schedule_.assign(schedule.begin(), schedule.end());
  tree.nodes_ = std::move(state.nodes);
  tree.options_ = options;
  tree.training_sse_ = fitted.sse;
  return tree;
}

double LevelwiseTree::Predict(std::span<const double> features) const {
  if (nodes_.empty()) throw ModelError("predict on an unfitted tree");
  const LevelNode* node = &nodes_.front();
  while (!node->is_leaf()) {
    node = &nodes_[static_cast<std::size_t>(
        node->rule.GoesLeft(features[node->rule.column]) ? node->left
                                                         : node->right)];
  }
  const double surface =
      options_.surface_column >= 0 ? features[options_.surface_column] : 0.0;
  return node->leaf.Predict(surface);
}

ExplanationTrace LevelwiseTree::Explain(std::span<const double> features,
                                        std::span<const ColumnSpec> specs) const {
  if (nodes_.empty()) throw ModelError("explain on an unfitted tree");
  ExplanationTrace trace;
  int index = 0;
  while (!nodes_[static_cast<std::size_t>(index)].is_leaf()) {
    const auto& node = nodes_[static_cast<std::size_t>(index)];
    const auto& spec = specs[static_cast<std::size_t>(node.rule.column)];
    const bool left = node.rule.GoesLeft(features[node.rule.column]);
    trace.steps.push_back({node.level, spec.name, node.rule.Describe(spec), left});
    index = left ? node.left : node.right;
  }
  const auto& leaf = nodes_[static_cast<std::size_t>(index)].leaf;
  trace.leaf_id = index;
  trace.alpha = leaf.alpha;
  trace.beta = leaf.beta;
  trace.surface =
      options_.surface_column >= 0 ? features[options_.surface_column] : 0.0;
  trace.surface_contribution = leaf.beta * trace.surface;
  trace.prediction = leaf.Predict(trace.surface);
  return trace;
}

int LevelwiseTree::Depth() const {
  int depth = 0;
  for (const auto& n : nodes_) depth = std::max(depth, n.level);
  return depth;
}

std::size_t LevelwiseTree::NumLeaves() const {
  return static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(), [](const auto& n) { return n.is_leaf(); }));
}

nlohmann::json LevelwiseTree::ToJson(std::span<const ColumnSpec> specs) const {
  if (nodes_.empty()) throw ModelError("cannot serialize an unfitted tree");
  nlohmann::json levels = nlohmann::json::array();
  for (int c : schedule_) levels.push_back(specs[static_cast<std::size_t>(c)].name);
  return {{"levels", levels},
          {"training_sse", training_sse_},
          {"root", NodeToJson(nodes_, 0, specs)}};
}

LevelwiseTree LevelwiseTree::FromJson(const nlohmann::json& json,
                                      std::span<const ColumnSpec> specs,
                                      const LevelwiseOptions& options) {
  LevelwiseTree tree;
  for (const auto& name : json.at("levels")) {
    const auto it = std::find_if(specs.begin(), specs.end(), [&](const auto& s) {
      return s.name == name.get<std::string>();
    });
    if (it == specs.end()) throw ModelError("unknown level feature");
    tree.schedule_.push_back(static_cast<int>(it - specs.begin()));
  }
  if (tree.schedule_.size() > kMaxScheduleLength) {
    throw ModelError("schedule longer than the depth limit");
  }
  tree.options_ = options;
  tree.training_sse_ = json.value("training_sse", 0.0);
  NodeFromJson(json.at("root"), specs, tree.schedule_, 0, tree.nodes_);
  return tree;
}

std::size_t CountSchedules(std::span<const ScheduleCandidate> candidates) {
  std::vector<int> uses(candidates.size(), 0);
  std::size_t count = 0;
  auto recurse = [&](auto& self, std::size_t length) -> void {
    if (length == kMaxScheduleLength) return;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (uses[i] >= candidates[i].max_uses) continue;
      ++uses[i];
      ++count;
      self(self, length + 1);
      --uses[i];
    }
  };
  recurse(recurse, 0);
  return count;
}

ScheduleSearchResult SearchSchedule(const FeatureMatrix& matrix,
                                    std::span<const double> targets,
                                    std::span<const ScheduleCandidate> candidates,
                                    const LevelwiseOptions& options,
                                    SearchMode mode,
                                    std::size_t exhaustive_cap) {
  if (candidates.empty()) throw ConfigError("no candidate features");
  for (const auto& c : candidates) {
    if (c.column < 0 || static_cast<std::size_t>(c.column) >= matrix.num_columns() ||
        c.max_uses < 1) {
      throw ConfigError("invalid schedule candidate");
    }
  }
  const std::size_t n = matrix.num_rows();
  if (n == 0 || n < options.min_bucket) {
    throw DataError(fmt::format("{} training rows, min_bucket is {}", n,
                                options.min_bucket));
  }

  ScheduleSearchResult result;
  std::vector<int> uses(candidates.size(), 0);

  if (mode == SearchMode::kGreedy) {
    GrowthState state = InitialState(n);
    double current = StateSse(state, matrix, targets, options);
    while (result.schedule.size() < kMaxScheduleLength && !state.frontier.empty()) {
      std::optional<std::size_t> best;
      double best_sse = current;
      GrowthState best_state;
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (uses[i] >= candidates[i].max_uses) continue;
        GrowthState next = state;
        const std::size_t splits =
            Grow(next, matrix, targets, candidates[i].column, options);
        ++result.schedules_evaluated;
        if (splits == 0) continue;
        const double sse = StateSse(next, matrix, targets, options);
        if (sse < best_sse) {
          best_sse = sse;
          best = i;
          best_state = std::move(next);
        }
      }
      if (!best) break;
      ++uses[*best];
      result.schedule.push_back(candidates[*best].column);
      state = std::move(best_state);
      current = best_sse;
    }
    if (result.schedule.empty()) result.schedule.push_back(candidates[0].column);
  } else {
    const std::size_t space = CountSchedules(candidates);
    if (space > exhaustive_cap) {
      throw ConfigError(fmt::format(
          "exhaustive search over {} schedules exceeds the cap of {}", space,
          exhaustive_cap));
    }
    double best_sse = std::numeric_limits<double>::infinity();
    std::vector<int> schedule;
    auto dfs = [&](auto& self, const GrowthState& state) -> void {
      if (schedule.size() == kMaxScheduleLength) return;
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (uses[i] >= candidates[i].max_uses) continue;
        GrowthState next = state;
        Grow(next, matrix, targets, candidates[i].column, options);
        ++uses[i];
        schedule.push_back(candidates[i].column);
        ++result.schedules_evaluated;
        const double sse = StateSse(next, matrix, targets, options);
        if (sse < best_sse) {
          best_sse = sse;
          result.schedule = schedule;
        }
        if (!next.frontier.empty()) self(self, next);
        schedule.pop_back();
        --uses[i];
      }
    };
    dfs(dfs, InitialState(n));
  }
  result.tree = LevelwiseTree::Fit(matrix, targets, result.schedule, options);
  return result;
}

std::vector<Slot> DefaultSchedule() {
  return {Slot::kLowConsumption, Slot::kTariffIndex,      Slot::kOccupants,
          Slot::kHeatingType,    Slot::kWaterHeatingType, Slot::kSurface,
          Slot::kSurface};
}

std::vector<Slot> ScheduleCandidates() {
  return {Slot::kLowConsumption, Slot::kTariffIndex,      Slot::kOccupants,
          Slot::kHeatingType,    Slot::kWaterHeatingType, Slot::kSurface};
}

void ConstrainedTreeConfig::Validate() const {
  if (min_bucket < 1) throw ConfigError("min_bucket must be >= 1");
  if (schedule.size() > kMaxScheduleLength) {
    throw ConfigError(fmt::format("schedule has {} levels, the limit is {}",
                                  schedule.size(), kMaxScheduleLength));
  }
  if (candidates.empty()) throw ConfigError("no candidate features");
  if (!search && schedule.empty()) throw ConfigError("empty schedule");
  if (search && search_mode == SearchMode::kExhaustive) {
    const auto space = CountSchedules(CandidatesFor(candidates));
    if (space > exhaustive_cap) {
      throw ConfigError(fmt::format(
          "exhaustive search over {} schedules exceeds the cap of {}", space,
          exhaustive_cap));
    }
  }
}

nlohmann::json ConstrainedTreeConfig::ToJson() const {
  nlohmann::json schedule_json;
  if (search) {
    schedule_json = "search";
  } else {
    schedule_json = nlohmann::json::array();
    for (Slot s : schedule) schedule_json.push_back(SlotName(s));
  }
  nlohmann::json candidates_json = nlohmann::json::array();
  for (Slot s : candidates) candidates_json.push_back(SlotName(s));
  return {{"min_bucket", min_bucket},
          {"schedule", schedule_json},
          {"candidates", candidates_json},
          {"search_mode",
           search_mode == SearchMode::kGreedy ? "greedy" : "exhaustive"},
          {"exhaustive_cap", exhaustive_cap},
          {"leaf_model", LeafModelName(leaf_model)},
          {"threshold_mode",
           threshold_mode == ThresholdMode::kPerNode ? "per_node" : "shared"},
          {"monotone_surface", monotone_surface}};
}

ConstrainedTreeConfig ConstrainedTreeConfig::FromJson(const nlohmann::json& json) {
  ConstrainedTreeConfig c;
  try {
    c.min_bucket = json.value("min_bucket", c.min_bucket);
    if (json.contains("schedule")) {
      const auto& s = json.at("schedule");
      if (s.is_string()) {
        if (s.get<std::string>() != "search") {
          throw ConfigError("schedule must be a feature list or \"search\"");
        }
        c.search = true;
      } else {
        c.schedule.clear();
        for (const auto& name : s) c.schedule.push_back(ParseSlot(name.get<std::string>()));
      }
    }
    if (json.contains("candidates")) {
      c.candidates.clear();
      for (const auto& name : json.at("candidates")) {
        c.candidates.push_back(ParseSlot(name.get<std::string>()));
      }
    }
    const auto mode = json.value("search_mode", std::string("greedy"));
    if (mode == "greedy") {
      c.search_mode = SearchMode::kGreedy;
    } else if (mode == "exhaustive") {
      c.search_mode = SearchMode::kExhaustive;
    } else {
      throw ConfigError("search_mode must be greedy or exhaustive");
    }
    c.exhaustive_cap = json.value("exhaustive_cap", c.exhaustive_cap);
    c.monotone_surface = json.value("monotone_surface", c.monotone_surface);
    const auto leaf = json.value("leaf_model", std::string("surface_linear"));
    if (leaf == "mean") {
      c.leaf_model = LeafModelKind::kMean;
    } else if (leaf == "surface_linear") {
      c.leaf_model = LeafModelKind::kSurfaceLinear;
    } else if (leaf == "global_surface") {
      c.leaf_model = LeafModelKind::kGlobalSurface;
    } else {
      throw ConfigError("unknown leaf_model '" + leaf + "'");
    }
    const auto thresholds = json.value("threshold_mode", std::string("per_node"));
    if (thresholds == "per_node") {
      c.threshold_mode = ThresholdMode::kPerNode;
    } else if (thresholds == "shared") {
      c.threshold_mode = ThresholdMode::kShared;
    } else {
      throw ConfigError("threshold_mode must be per_node or shared");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("constrained tree config: ") + e.what());
  }
  c.Validate();
  return c;
}

ConstrainedTreeModel::ConstrainedTreeModel(LevelwiseTree tree,
                                           ConstrainedTreeConfig config,
                                           LowConsumptionRule rule)
    : tree_(std::move(tree)), config_(std::move(config)), rule_(std::move(rule)) {}

std::unique_ptr<ConstrainedTreeModel> ConstrainedTreeModel::Fit(
    const Dataset& train, const ConstrainedTreeConfig& config,
    const LowConsumptionRule& rule) {
  config.Validate();
  const FeatureMatrix m = EncodeDataset(train, rule);
  const std::vector<double> y = Targets(train);
  const LevelwiseOptions options = OptionsFor(config, rule);
  LevelwiseTree tree;
  if (config.search) {
    const auto candidates = CandidatesFor(config.candidates);
    tree = SearchSchedule(m, y, candidates, options, config.search_mode,
                          config.exhaustive_cap)
               .tree;
  } else {
    tree = LevelwiseTree::Fit(m, y, SlotsToColumns(config.schedule), options);
  }
  return std::make_unique<ConstrainedTreeModel>(std::move(tree), config, rule);
}

double ConstrainedTreeModel::Predict(const HouseholdRecord& record) const {
  return tree_.Predict(Encode(record, rule_));
}

ExplanationTrace ConstrainedTreeModel::Explain(
    const HouseholdRecord& record) const {
  return tree_.Explain(Encode(record, rule_), HouseholdSchema());
}

std::vector<Slot> ConstrainedTreeModel::Levels() const {
  std::vector<Slot> out;
  for (int c : tree_.schedule()) out.push_back(static_cast<Slot>(c));
  return out;
}

nlohmann::json ConstrainedTreeModel::Body() const {
  nlohmann::json body = tree_.ToJson(HouseholdSchema());
  body["config"] = config_.ToJson();
  body["low_consumption_rule"] = rule_.ToJson();
  return body;
}

std::unique_ptr<ConstrainedTreeModel> ConstrainedTreeModel::FromBody(
    const nlohmann::json& body) {
  auto config = ConstrainedTreeConfig::FromJson(body.at("config"));
  auto rule = LowConsumptionRule::FromJson(body.at("low_consumption_rule"));
  auto tree =
      LevelwiseTree::FromJson(body, HouseholdSchema(), OptionsFor(config, rule));
  return std::make_unique<ConstrainedTreeModel>(std::move(tree),
                                                std::move(config), std::move(rule));
}

}  // namespace hearthcast
