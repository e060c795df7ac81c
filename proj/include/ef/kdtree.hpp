#pragma once

#include "ef/se3.hpp"

#include <vector>

namespace ef {

/// Exact 3D k-d tree for fixed-radius neighbor queries. Median-split build,
/// O(n log n); queries return indices into the original point array in
/// ascending order so downstream statistics are deterministic.
class KdTree3 {
 public:
  explicit KdTree3(const std::vector<Vec3>& points);

  void radius_search(const Vec3& query, double radius,
                     std::vector<int>& out_indices) const;

  std::size_t size() const { return pts_.size(); }

 private:
  struct Node {
    int index = -1;     // point index at this node
    int left = -1;
    int right = -1;
    int axis = 0;
  };

  int Build(int begin, int end, int depth);
  void Search(int node, const Vec3& q, double r2, double radius,
              std::vector<int>& out) const;

  std::vector<Vec3> pts_;
  std::vector<int> order_;   // permutation being partitioned during build
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace ef
