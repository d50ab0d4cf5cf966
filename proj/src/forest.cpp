#include "chainlab/learn/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "chainlab/common.hpp"

namespace chainlab::learn {

namespace {

struct Split {
  bool found = false;
  int feature = -1;
  double threshold = 0;
  double sse = 0;
};

double subset_mean(const std::vector<double>& y, const std::vector<int>& idx) {
  double s = 0;
  for (int i : idx) s += y[i];
  return idx.empty() ? 0.0 : s / static_cast<double>(idx.size());
}

// Best SSE split on one feature; midpoint thresholds between distinct
// adjacent values.
Split best_split_on(const std::vector<FeatureVec>& x,
                    const std::vector<double>& y, const std::vector<int>& idx,
                    int feature, uint32_t min_leaf) {
  Split best;
  std::vector<int> order = idx;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (x[a][feature] != x[b][feature]) return x[a][feature] < x[b][feature];
    return a < b;
  });
  const size_t n = order.size();
  std::vector<double> prefix(n + 1, 0), prefix_sq(n + 1, 0);
  for (size_t i = 0; i < n; i++) {
    prefix[i + 1] = prefix[i] + y[order[i]];
    prefix_sq[i + 1] = prefix_sq[i] + y[order[i]] * y[order[i]];
  }
  auto sse_range = [&](size_t lo, size_t hi) {  // [lo, hi)
    double cnt = static_cast<double>(hi - lo);
    double sum = prefix[hi] - prefix[lo];
    double sq = prefix_sq[hi] - prefix_sq[lo];
    return sq - sum * sum / cnt;
  };
  for (size_t i = min_leaf; i + min_leaf <= n; i++) {
    double lo = x[order[i - 1]][feature];
    double hi = x[order[i]][feature];
    if (lo == hi) continue;
    double sse = sse_range(0, i) + sse_range(i, n);
    double threshold = lo + (hi - lo) / 2;
    if (!best.found || sse < best.sse ||
        (sse == best.sse && threshold < best.threshold)) {
      best.found = true;
      best.feature = feature;
      best.threshold = threshold;
      best.sse = sse;
    }
  }
  return best;
}

}  // namespace

double RandomForest::Tree::predict(const FeatureVec& x) const {
  int cur = 0;
  while (nodes[cur].feature >= 0)
    cur = x[nodes[cur].feature] <= nodes[cur].threshold ? nodes[cur].left
                                                        : nodes[cur].right;
  return nodes[cur].value;
}

RandomForest RandomForest::train(const std::vector<FeatureVec>& x,
                                 const std::vector<double>& y,
                                 const ForestParams& params, uint64_t seed) {
  RandomForest forest;
  if (x.empty()) return forest;
  const size_t n = x.size();
  for (uint32_t t = 0; t < params.trees; t++) {
    std::mt19937_64 rng(mix_seed(seed, 0xf07e57 ^ t));
    std::uniform_int_distribution<size_t> pick(0, n - 1);
    std::vector<int> bag(n);
    for (size_t i = 0; i < n; i++) bag[i] = static_cast<int>(pick(rng));

    Tree tree;
    // Iterative build keeps node ids deterministic (preorder).
    struct Pending {
      int node;
      std::vector<int> idx;
      uint32_t depth;
    };
    tree.nodes.push_back({});
    std::vector<Pending> stack{{0, bag, 0}};
    while (!stack.empty()) {
      Pending cur = std::move(stack.back());
      stack.pop_back();
      Node& node = tree.nodes[cur.node];
      double mean = subset_mean(y, cur.idx);
      bool constant = std::all_of(cur.idx.begin(), cur.idx.end(),
                                  [&](int i) { return y[i] == y[cur.idx[0]]; });
      if (cur.depth >= params.max_depth ||
          cur.idx.size() < 2 * params.min_leaf || constant) {
        node.value = mean;
        continue;
      }
      std::array<int, kFeatureDim> feats;
      std::iota(feats.begin(), feats.end(), 0);
      for (uint32_t i = 0; i < params.features_per_split; i++) {
        std::uniform_int_distribution<uint32_t> d(i, kFeatureDim - 1);
        std::swap(feats[i], feats[d(rng)]);
      }
      std::array<int, kFeatureDim> chosen{};
      std::copy_n(feats.begin(), params.features_per_split, chosen.begin());
      std::sort(chosen.begin(), chosen.begin() + params.features_per_split);

      Split best;
      for (uint32_t i = 0; i < params.features_per_split; i++) {
        Split s = best_split_on(x, y, cur.idx, chosen[i], params.min_leaf);
        if (!s.found) continue;
        if (!best.found || s.sse < best.sse) best = s;
      }
      if (!best.found) {
        node.value = mean;
        continue;
      }
      std::vector<int> left, right;
      for (int i : cur.idx)
        (x[i][best.feature] <= best.threshold ? left : right).push_back(i);
      node.feature = best.feature;
      node.threshold = best.threshold;
      node.left = static_cast<int>(tree.nodes.size());
      node.right = node.left + 1;
      int l = node.left, r = node.right;
      tree.nodes.push_back({});
      tree.nodes.push_back({});
      // Right pushed first so the left child is processed (and numbered)
      // next; ids stay preorder.
      stack.push_back({r, std::move(right), cur.depth + 1});
      stack.push_back({l, std::move(left), cur.depth + 1});
    }
    forest.trees_.push_back(std::move(tree));
  }
  return forest;
}

double RandomForest::predict(const FeatureVec& x) const {
  if (trees_.empty()) return 0;
  double s = 0;
  for (const auto& t : trees_) s += t.predict(x);
  return s / static_cast<double>(trees_.size());
}

void RandomForest::dump(std::ostream& os) const {
  os << "forest trees=" << trees_.size() << "\n";
  for (size_t t = 0; t < trees_.size(); t++) {
    os << "tree " << t << " nodes=" << trees_[t].nodes.size() << "\n";
    for (size_t i = 0; i < trees_[t].nodes.size(); i++) {
      const auto& n = trees_[t].nodes[i];
      if (n.feature < 0)
        os << "  " << i << " leaf " << n.value << "\n";
      else
        os << "  " << i << " split f" << n.feature << " <= " << n.threshold
           << " -> " << n.left << "," << n.right << "\n";
    }
  }
}

}  // namespace chainlab::learn
