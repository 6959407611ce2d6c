#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rcdamage/error.hpp"
#include "rcdamage/geometry.hpp"
#include "rcdamage/yolo_decode.hpp"

namespace rcdamage {

struct BoxDims {
  double width = 0.0;
  double height = 0.0;
  bool operator==(const BoxDims &) const = default;
  auto operator<=>(const BoxDims &) const = default;
};

struct ClusterResult {
  std::vector<AnchorPrior> anchors; // sorted by area, largest first
  double mean_iou = 0.0;
  std::vector<std::size_t> assignments;
  int iterations = 0;
  std::uint64_t seed = 0;
};

inline constexpr int kmeans_max_iterations = 300;

namespace detail {

inline double dims_iou(const BoxDims &d, const AnchorPrior &c) {
  return shape_iou(d.width, d.height, c.width, c.height);
}

// Index of the best-matching centroid; ties go to the lower index.
inline std::size_t nearest(const BoxDims &d, const std::vector<AnchorPrior> &centroids,
                           double *best_iou = nullptr) {
  std::size_t best = 0;
  double best_v = -1.0;
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double v = dims_iou(d, centroids[c]);
    if (v > best_v) {
      best_v = v;
      best = c;
    }
  }
  if (best_iou)
    *best_iou = best_v;
  return best;
}

// k-means++ seeding with d = 1 - IoU as the distance.
inline std::vector<AnchorPrior> seed_plus_plus(const std::vector<BoxDims> &dims, std::size_t k,
                                               std::mt19937_64 &rng) {
  std::vector<AnchorPrior> centroids;
  centroids.reserve(k);
  std::uniform_int_distribution<std::size_t> pick(0, dims.size() - 1);
  const BoxDims &first = dims[pick(rng)];
  centroids.push_back({first.width, first.height});

  std::vector<double> weight(dims.size());
  while (centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      double best = 0.0;
      nearest(dims[i], centroids, &best);
      const double d = 1.0 - best;
      weight[i] = d * d;
      total += weight[i];
    }
    std::size_t chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      const double target = u(rng);
      double acc = 0.0;
      chosen = dims.size() - 1;
      for (std::size_t i = 0; i < dims.size(); ++i) {
        acc += weight[i];
        if (target < acc && weight[i] > 0.0) {
          chosen = i;
          break;
        }
      }
      // Rounding can land on a zero-weight tail element; walk back.
      while (weight[chosen] <= 0.0 && chosen > 0)
        --chosen;
    }
    centroids.push_back({dims[chosen].width, dims[chosen].height});
  }
  return centroids;
}

inline ClusterResult kmeans_single(const std::vector<BoxDims> &dims, std::size_t k,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<AnchorPrior> centroids = seed_plus_plus(dims, k, rng);
  std::vector<std::size_t> assign(dims.size(), 0);
  std::vector<double> fit(dims.size(), 0.0);

  auto assign_all = [&] {
    bool changed = false;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      const std::size_t c = nearest(dims[i], centroids, &fit[i]);
      changed = changed || c != assign[i];
      assign[i] = c;
    }
    return changed;
  };

  int iter = 0;
  assign_all();
  while (iter < kmeans_max_iterations) {
    ++iter;
    std::vector<double> sw(k, 0.0), sh(k, 0.0);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < dims.size(); ++i) {
      sw[assign[i]] += dims[i].width;
      sh[assign[i]] += dims[i].height;
      ++count[assign[i]];
    }
    std::vector<bool> used_for_repair(dims.size(), false);
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] > 0) {
        centroids[c] = {sw[c] / static_cast<double>(count[c]),
                        sh[c] / static_cast<double>(count[c])};
        continue;
      }
      // Empty cluster: reseed with the worst-fitting box (lowest index on ties).
      std::size_t worst = 0;
      double worst_fit = 2.0;
      for (std::size_t i = 0; i < dims.size(); ++i) {
        if (!used_for_repair[i] && fit[i] < worst_fit) {
          worst_fit = fit[i];
          worst = i;
        }
      }
      used_for_repair[worst] = true;
      centroids[c] = {dims[worst].width, dims[worst].height};
    }
    if (!assign_all())
      break;
  }

  ClusterResult r;
  r.seed = seed;
  r.iterations = iter;
  r.mean_iou = std::accumulate(fit.begin(), fit.end(), 0.0) / static_cast<double>(dims.size());

  // Reorder anchors by area, largest first, and remap assignments.
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double aa = centroids[a].area(), ab = centroids[b].area();
    if (aa != ab)
      return aa > ab;
    return centroids[a].width > centroids[b].width;
  });
  std::vector<std::size_t> rank(k);
  for (std::size_t pos = 0; pos < k; ++pos) {
    r.anchors.push_back(centroids[order[pos]]);
    rank[order[pos]] = pos;
  }
  r.assignments.resize(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i)
    r.assignments[i] = rank[assign[i]];
  return r;
}

} // namespace detail

inline std::size_t count_distinct(const std::vector<BoxDims> &dims) {
  return std::set<BoxDims>(dims.begin(), dims.end()).size();
}

/// K-means over box sizes with distance 1 - IoU (co-centered boxes) and mean
/// updates. Each restart r uses seed + r; the run with the highest mean IoU
/// wins, ties going to the lowest seed.
inline ClusterResult kmeans_iou(const std::vector<BoxDims> &dims, std::size_t k,
                                std::uint64_t seed = 0, int restarts = 1) {
  if (dims.empty())
    throw input_error("kmeans: no box dimensions supplied");
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (!(dims[i].width > 0.0) || !(dims[i].height > 0.0) ||
        !std::isfinite(dims[i].width) || !std::isfinite(dims[i].height))
      throw input_error("kmeans: box " + std::to_string(i) +
                        " must have finite positive width and height");
  }
  if (k < 1)
    throw input_error("kmeans: k must be >= 1");
  if (restarts < 1)
    throw input_error("kmeans: restarts must be >= 1");
  const std::size_t distinct = count_distinct(dims);
  if (k > distinct)
    throw input_error("kmeans: k = " + std::to_string(k) + " exceeds the " +
                      std::to_string(distinct) + " distinct box sizes");

  ClusterResult best;
  for (int r = 0; r < restarts; ++r) {
    ClusterResult run = detail::kmeans_single(dims, k, seed + static_cast<std::uint64_t>(r));
    if (r == 0 || run.mean_iou > best.mean_iou)
      best = std::move(run);
  }
  return best;
}

struct SweepPoint {
  std::size_t k = 0;
  double mean_iou = 0.0;
};

/// Mean IoU for each k in [k_first, k_last], the curve used to choose the
/// number of anchors.
inline std::vector<SweepPoint> sweep_k(const std::vector<BoxDims> &dims, std::size_t k_first,
                                       std::size_t k_last, std::uint64_t seed = 0,
                                       int restarts = 1) {
  if (k_first < 1 || k_last < k_first)
    throw input_error("sweep: k range must satisfy 1 <= first <= last");
  std::vector<SweepPoint> out;
  for (std::size_t k = k_first; k <= k_last; ++k)
    out.push_back({k, kmeans_iou(dims, k, seed, restarts).mean_iou});
  return out;
}

} // namespace rcdamage
