#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace chainlab::learn {

constexpr size_t kFeatureDim = 7;
using FeatureVec = std::array<double, kFeatureDim>;

struct ForestParams {
  uint32_t trees = 20;
  uint32_t max_depth = 8;
  uint32_t min_leaf = 2;
  uint32_t features_per_split = 3;
};

// Regression random forest with bagging and per-split feature subsampling.
// Fully deterministic given (data, params, seed): splits minimize SSE with
// midpoint thresholds, ties resolved by lowest feature index then lowest
// threshold.
class RandomForest {
 public:
  static RandomForest train(const std::vector<FeatureVec>& x,
                            const std::vector<double>& y,
                            const ForestParams& params, uint64_t seed);

  double predict(const FeatureVec& x) const;

  // Structured text form, identical across peers that trained on identical
  // inputs. Used by tests to diff models.
  void dump(std::ostream& os) const;

  bool empty() const { return trees_.empty(); }

 private:
  struct Node {
    int feature = -1;      // -1 marks a leaf
    double threshold = 0;
    double value = 0;      // leaf mean
    int left = -1;
    int right = -1;
  };
  struct Tree {
    std::vector<Node> nodes;
    double predict(const FeatureVec& x) const;
  };

  std::vector<Tree> trees_;
};

}  // namespace chainlab::learn
