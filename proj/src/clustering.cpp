#include "smoothbench/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "smoothbench/error.hpp"
#include "smoothbench/random.hpp"

namespace smoothbench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// Nearest medoid per point; a medoid always claims itself, other ties go to the medoid
// listed first in `medoids`.
std::vector<int> assign(std::span<const Point3> points, std::span<const std::size_t> medoids) {
  std::vector<int> out(points.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    double best = kInf;
    for (std::size_t c = 0; c < medoids.size(); ++c) {
      if (medoids[c] == i) {
        out[i] = static_cast<int>(c);
        best = -1.0;
        break;
      }
      const double d = euclidean(points[i], points[medoids[c]]);
      if (d < best) {
        best = d;
        out[i] = static_cast<int>(c);
      }
    }
  }
  return out;
}

// Lexicographic scan over all k-subsets; keeps the first strictly cheapest one.
std::vector<std::size_t> exhaustive_medoids(std::span<const Point3> points, std::size_t k, double& cost) {
  const std::size_t n = points.size();
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::size_t> best = idx;
  cost = medoid_cost(points, idx);
  while (true) {
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
    const double c = medoid_cost(points, idx);
    if (c < cost) {
      cost = c;
      best = idx;
    }
  }
  return best;
}

}  // namespace

double euclidean(const Point3& a, const Point3& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < 3; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double medoid_cost(std::span<const Point3> points, std::span<const std::size_t> medoids) {
  double total = 0.0;
  for (const auto& p : points) {
    double best = kInf;
    for (std::size_t m : medoids) best = std::min(best, euclidean(p, points[m]));
    total += best;
  }
  return total;
}

std::vector<MethodScore> make_scores(std::span<const PerformanceIndex> indices, bool standardize) {
  double min_aic = kInf;
  for (const auto& pi : indices) {
    if (std::isfinite(pi.aic)) min_aic = std::min(min_aic, pi.aic);
  }
  const double aic_floor = std::isfinite(min_aic) ? min_aic - 10.0 : 0.0;

  std::vector<MethodScore> scores;
  for (const auto& pi : indices) {
    const double a = std::isfinite(pi.aic) ? pi.aic : aic_floor;
    scores.push_back({pi.method, {pi.var, pi.mae, a}, {pi.var, pi.mae, a}});
  }
  if (!standardize || scores.size() < 2) {
    if (standardize) {
      for (auto& s : scores) s.z_features = {0.0, 0.0, 0.0};
    }
    return scores;
  }
  for (std::size_t f = 0; f < 3; ++f) {
    double mean = 0.0;
    for (const auto& s : scores) mean += s.features[f];
    mean /= static_cast<double>(scores.size());
    double ss = 0.0;
    for (const auto& s : scores) ss += (s.features[f] - mean) * (s.features[f] - mean);
    const double sd = std::sqrt(ss / static_cast<double>(scores.size() - 1));
    for (auto& s : scores) s.z_features[f] = sd > 0.0 ? (s.features[f] - mean) / sd : 0.0;
  }
  return scores;
}

KMedoidResult k_medoid(std::span<const Point3> points, int k, std::uint64_t seed) {
  const std::size_t n = points.size();
  if (k < 1) throw Error(ErrorKind::InvalidParams, "k must be positive");
  const auto kk = static_cast<std::size_t>(k);
  if (n < kk) {
    throw Error(ErrorKind::TooFewPoints, "k-medoids needs at least " + std::to_string(k) + " points, got " +
                                             std::to_string(n));
  }

  // Seeded rank of each point, consulted only when scores tie exactly.
  std::vector<std::size_t> tie_rank(n);
  {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[uniform_index(rng, i)]);
    for (std::size_t r = 0; r < n; ++r) tie_rank[perm[r]] = r;
  }

  // Park-Jun: v_j = sum_i d_ij / sum_l d_il; the k smallest v_j seed the medoids.
  std::vector<double> row_sum(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < n; ++l) row_sum[i] += euclidean(points[i], points[l]);
  }
  std::vector<double> v(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (row_sum[i] > 0.0) v[j] += euclidean(points[i], points[j]) / row_sum[i];
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return v[a] != v[b] ? v[a] < v[b] : tie_rank[a] < tie_rank[b];
  });
  std::vector<std::size_t> medoids(order.begin(), order.begin() + k);

  KMedoidResult result;
  double cost = medoid_cost(points, medoids);
  result.cost_trace.push_back(cost);

  // Steepest-descent swaps: apply the single best improving (medoid, non-medoid) exchange.
  for (int iter = 0; iter < 100; ++iter) {
    double best_cost = cost;
    std::size_t best_slot = kk, best_point = n;
    for (std::size_t slot = 0; slot < kk; ++slot) {
      for (std::size_t cand : order) {
        if (std::find(medoids.begin(), medoids.end(), cand) != medoids.end()) continue;
        auto trial = medoids;
        trial[slot] = cand;
        const double c = medoid_cost(points, trial);
        if (c < best_cost - 1e-12 * std::max(1.0, std::fabs(best_cost))) {
          best_cost = c;
          best_slot = slot;
          best_point = cand;
        }
      }
    }
    if (best_slot == kk) break;
    medoids[best_slot] = best_point;
    cost = best_cost;
    result.cost_trace.push_back(cost);
  }

  if (binomial(n, kk) <= 20000.0) {
    double exact = 0.0;
    auto candidate = exhaustive_medoids(points, kk, exact);
    if (exact < cost - 1e-12 * std::max(1.0, std::fabs(cost))) {
      medoids = std::move(candidate);
      cost = exact;
      result.cost_trace.push_back(cost);
    }
  }

  // Equal-cost medoid choices (a two-member cluster has two) are settled by coordinates,
  // so the answer does not depend on the input order; the seeded rank decides exact duplicates.
  auto assignments = assign(points, medoids);
  for (std::size_t c = 0; c < kk; ++c) {
    std::size_t pick = medoids[c];
    double pick_sum = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      if (assignments[i] != static_cast<int>(c)) continue;
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (assignments[j] == static_cast<int>(c)) sum += euclidean(points[i], points[j]);
      }
      const double tol = std::isfinite(pick_sum) ? 1e-12 * std::max(1.0, pick_sum) : 0.0;
      const bool tied = std::fabs(sum - pick_sum) <= tol;
      if (sum < pick_sum - tol ||
          (tied && (points[i] < points[pick] || (points[i] == points[pick] && tie_rank[i] < tie_rank[pick])))) {
        pick = i;
        pick_sum = sum;
      }
    }
    medoids[c] = pick;
  }
  std::sort(medoids.begin(), medoids.end());
  result.medoids = medoids;
  result.assignments = assign(points, medoids);
  result.cost = medoid_cost(points, medoids);
  return result;
}

std::string_view to_string(ClusterLabel label) {
  switch (label) {
    case ClusterLabel::Best: return "best";
    case ClusterLabel::Middle: return "middle";
    case ClusterLabel::Worst: return "worst";
  }
  return "unknown";
}

std::vector<ClusterLabel> rank_clusters(std::span<const int> assignments, std::span<const MethodScore> scores) {
  int clusters = 0;
  for (int a : assignments) clusters = std::max(clusters, a + 1);
  std::vector<double> aic(static_cast<std::size_t>(clusters), 0.0), err(aic.size(), 0.0), count(aic.size(), 0.0);
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    const auto c = static_cast<std::size_t>(assignments[i]);
    aic[c] += scores[i].z_features[2];
    err[c] += scores[i].features[1];
    count[c] += 1.0;
  }
  std::vector<std::size_t> order(aic.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t c = 0; c < aic.size(); ++c) {
    if (count[c] > 0.0) {
      aic[c] /= count[c];
      err[c] /= count[c];
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double tol = 1e-12 * std::max({1.0, std::fabs(aic[a]), std::fabs(aic[b])});
    if (std::fabs(aic[a] - aic[b]) > tol) return aic[a] < aic[b];
    return err[a] < err[b];
  });
  static constexpr std::array<ClusterLabel, 3> ladder{ClusterLabel::Best, ClusterLabel::Middle, ClusterLabel::Worst};
  std::vector<ClusterLabel> labels(aic.size(), ClusterLabel::Worst);
  for (std::size_t r = 0; r < order.size(); ++r) labels[order[r]] = ladder[std::min<std::size_t>(r, 2)];
  return labels;
}

MethodId select_optimal(const ClusterResult& clusters, std::span<const MethodScore> scores) {
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < clusters.labels.size(); ++i) {
    if (clusters.labels[i] == ClusterLabel::Best) members.push_back(i);
  }
  if (members.empty()) throw Error(ErrorKind::Internal, "best cluster is empty");
  std::size_t best = members.front();
  double best_sum = kInf;
  for (std::size_t i : members) {
    double sum = 0.0;
    for (std::size_t j : members) sum += euclidean(scores[i].z_features, scores[j].z_features);
    // Prefer the cluster's own medoid among equal sums.
    const bool is_medoid = clusters.methods[i] == clusters.medoids[0];
    const double tol = std::isfinite(best_sum) ? 1e-12 * std::max(1.0, best_sum) : 0.0;
    if (sum < best_sum - tol || (std::fabs(sum - best_sum) <= tol && is_medoid)) {
      best_sum = sum;
      best = i;
    }
  }
  return clusters.methods[best];
}

ClusterResult cluster_methods(std::span<const MethodScore> scores, std::uint64_t seed) {
  std::vector<Point3> pts;
  for (const auto& s : scores) pts.push_back(s.z_features);
  const auto km = k_medoid(pts, 3, seed);
  const auto cluster_labels = rank_clusters(km.assignments, scores);

  ClusterResult out;
  out.cost = km.cost;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out.methods.push_back(scores[i].method);
    out.labels.push_back(cluster_labels[static_cast<std::size_t>(km.assignments[i])]);
  }
  for (std::size_t c = 0; c < km.medoids.size(); ++c) {
    out.medoids[static_cast<std::size_t>(cluster_labels[c])] = scores[km.medoids[c]].method;
  }
  out.optimal = select_optimal(out, scores);
  return out;
}

}  // namespace smoothbench
