#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kitbench/errors.hpp"
#include "kitbench/kitnet.hpp"

namespace kitbench::kitnet {
namespace {

struct Node {
  int left = -1;
  int right = -1;
  std::size_t size = 1;
  std::size_t feature = 0;
};

// 1 - |pearson|, with zero-variance features treated as uncorrelated.
std::vector<double> correlation_distance(const Matrix& rows) {
  const std::size_t n = rows.cols();
  const std::size_t count = rows.rows();
  std::vector<double> mean(n, 0.0);
  for (std::size_t r = 0; r < count; ++r) {
    const auto row = rows.row(r);
    for (std::size_t i = 0; i < n; ++i) mean[i] += row[i];
  }
  for (double& m : mean) m /= static_cast<double>(count);

  std::vector<double> cov(n * n, 0.0);
  std::vector<double> centered(n);
  for (std::size_t r = 0; r < count; ++r) {
    const auto row = rows.row(r);
    for (std::size_t i = 0; i < n; ++i) centered[i] = row[i] - mean[i];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) cov[i * n + j] += centered[i] * centered[j];
    }
  }

  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double vi = cov[i * n + i];
      const double vj = cov[j * n + j];
      double corr = 0.0;
      if (vi > 0.0 && vj > 0.0) corr = cov[i * n + j] / std::sqrt(vi * vj);
      const double d = std::clamp(1.0 - std::abs(corr), 0.0, 1.0);
      dist[i * n + j] = d;
      dist[j * n + i] = d;
    }
  }
  return dist;
}

// UPGMA dendrogram; returns the node list with the root last.
std::vector<Node> average_linkage(std::vector<double> dist, std::size_t n) {
  std::vector<Node> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i].feature = i;

  // `active[a]` is the node id of active cluster a; dist is indexed by active slot.
  std::vector<int> active(n);
  for (std::size_t i = 0; i < n; ++i) active[i] = static_cast<int>(i);
  std::vector<bool> alive(n, true);

  for (std::size_t merges = 0; merges + 1 < n; ++merges) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0;
    std::size_t bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!alive[j]) continue;
        if (dist[i * n + j] < best) {
          best = dist[i * n + j];
          bi = i;
          bj = j;
        }
      }
    }
    Node merged;
    merged.left = active[bi];
    merged.right = active[bj];
    const double si = static_cast<double>(nodes[static_cast<std::size_t>(merged.left)].size);
    const double sj = static_cast<double>(nodes[static_cast<std::size_t>(merged.right)].size);
    merged.size = nodes[static_cast<std::size_t>(merged.left)].size +
                  nodes[static_cast<std::size_t>(merged.right)].size;
    nodes.push_back(merged);

    // Slot bi becomes the merged cluster (Lance-Williams update), slot bj dies.
    for (std::size_t k = 0; k < n; ++k) {
      if (!alive[k] || k == bi || k == bj) continue;
      const double d = (si * dist[bi * n + k] + sj * dist[bj * n + k]) / (si + sj);
      dist[bi * n + k] = d;
      dist[k * n + bi] = d;
    }
    alive[bj] = false;
    active[bi] = static_cast<int>(nodes.size() - 1);
  }
  return nodes;
}

void collect_leaves(const std::vector<Node>& nodes, int id, std::vector<std::size_t>& out) {
  const Node& node = nodes[static_cast<std::size_t>(id)];
  if (node.left < 0) {
    out.push_back(node.feature);
    return;
  }
  collect_leaves(nodes, node.left, out);
  collect_leaves(nodes, node.right, out);
}

void split_oversized(const std::vector<Node>& nodes, int id, std::size_t m,
                     std::vector<std::vector<std::size_t>>& clusters) {
  const Node& node = nodes[static_cast<std::size_t>(id)];
  if (node.size <= m) {
    std::vector<std::size_t> members;
    collect_leaves(nodes, id, members);
    std::sort(members.begin(), members.end());
    clusters.push_back(std::move(members));
    return;
  }
  split_oversized(nodes, node.left, m, clusters);
  split_oversized(nodes, node.right, m, clusters);
}

}  // namespace

std::size_t FeatureMap::feature_count() const {
  std::size_t total = 0;
  for (const auto& c : clusters) total += c.size();
  return total;
}

void FeatureMap::validate(std::size_t n) const {
  if (max_cluster_size == 0) throw ShapeError("feature map max cluster size must be >= 1");
  std::vector<int> seen(n, 0);
  for (const auto& cluster : clusters) {
    if (cluster.empty()) throw ShapeError("feature map contains an empty cluster");
    if (cluster.size() > max_cluster_size) {
      throw ShapeError("feature map cluster of size " + std::to_string(cluster.size()) +
                       " exceeds the bound " + std::to_string(max_cluster_size));
    }
    for (std::size_t f : cluster) {
      if (f >= n) throw ShapeError("feature map index " + std::to_string(f) + " out of range");
      if (seen[f]++ != 0) throw ShapeError("feature " + std::to_string(f) + " mapped twice");
    }
  }
  for (std::size_t f = 0; f < n; ++f) {
    if (seen[f] == 0) throw ShapeError("feature " + std::to_string(f) + " not mapped");
  }
}

FeatureMap build_feature_map(const Matrix& rows, std::size_t max_cluster_size) {
  if (rows.rows() < 2) throw CalibrationError("feature map needs at least 2 rows");
  if (max_cluster_size == 0) throw CalibrationError("max cluster size must be >= 1");
  const std::size_t n = rows.cols();
  if (n == 0) throw CalibrationError("feature map needs at least one feature");

  FeatureMap fm;
  fm.max_cluster_size = max_cluster_size;
  const std::vector<Node> nodes = average_linkage(correlation_distance(rows), n);
  split_oversized(nodes, static_cast<int>(nodes.size() - 1), max_cluster_size, fm.clusters);
  std::sort(fm.clusters.begin(), fm.clusters.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return fm;
}

}  // namespace kitbench::kitnet
