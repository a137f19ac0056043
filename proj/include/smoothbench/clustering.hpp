#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "smoothbench/evaluation.hpp"
#include "smoothbench/smoothers.hpp"

namespace smoothbench {

using Point3 = std::array<double, 3>;

/// Clustering features of one method: (var, err = mae, aic) and their z-scores.
struct MethodScore {
  MethodId method;
  Point3 features;
  Point3 z_features;
};

/// Replaces a -infinity AIC by (min finite AIC - 10), then z-scores each feature column
/// (sample standard deviation; a constant column maps to zero). With `standardize` false,
/// z_features is a copy of the raw features.
std::vector<MethodScore> make_scores(std::span<const PerformanceIndex> indices, bool standardize = true);

struct KMedoidResult {
  std::vector<int> assignments;       // cluster id per point
  std::vector<std::size_t> medoids;   // point index per cluster id
  double cost = 0.0;                  // sum of distances to the assigned medoid
  std::vector<double> cost_trace;     // cost after initialization and after each accepted swap
};

double euclidean(const Point3& a, const Point3& b);

/// Total distance of every point to its nearest medoid.
double medoid_cost(std::span<const Point3> points, std::span<const std::size_t> medoids);

/// PAM-style k-medoids with the Park-Jun initialization. When the number of candidate
/// medoid sets is small (at most 20000), the result is finished by exhaustive enumeration,
/// so small problems are solved exactly. The seed only orders exact ties.
KMedoidResult k_medoid(std::span<const Point3> points, int k, std::uint64_t seed);

enum class ClusterLabel { Best, Middle, Worst };
std::string_view to_string(ClusterLabel label);

struct ClusterResult {
  std::vector<MethodId> methods;      // clustered methods, input order
  std::vector<ClusterLabel> labels;   // per method
  std::array<MethodId, 3> medoids{};  // by label: best, middle, worst
  MethodId optimal{};
  double cost = 0.0;

  bool operator==(const ClusterResult&) const = default;
};

/// Orders cluster ids by mean z-AIC ascending, ties broken by mean MAE. Returns the label
/// of each cluster id.
std::vector<ClusterLabel> rank_clusters(std::span<const int> assignments, std::span<const MethodScore> scores);

/// Best-cluster member minimizing summed distance to the other members.
MethodId select_optimal(const ClusterResult& clusters, std::span<const MethodScore> scores);

/// k = 3 clustering of the scores, ranking and optimal selection.
ClusterResult cluster_methods(std::span<const MethodScore> scores, std::uint64_t seed);

}  // namespace smoothbench
