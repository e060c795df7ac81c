#include "ef/kdtree.hpp"

#include <algorithm>

namespace ef {

KdTree3::KdTree3(const std::vector<Vec3>& points) : pts_(points) {
  order_.resize(pts_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
  nodes_.reserve(pts_.size());
  if (!pts_.empty()) root_ = Build(0, static_cast<int>(pts_.size()), 0);
}

int KdTree3::Build(int begin, int end, int depth) {
  if (begin >= end) return -1;
  const int axis = depth % 3;
  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](int a, int b) {
                     if (pts_[a][axis] != pts_[b][axis])
                       return pts_[a][axis] < pts_[b][axis];
                     return a < b;  // stable order for duplicate coordinates
                   });
  const int self = static_cast<int>(nodes_.size());
  nodes_.push_back({order_[mid], -1, -1, axis});
  const int left = Build(begin, mid, depth + 1);
  const int right = Build(mid + 1, end, depth + 1);
  nodes_[self].left = left;
  nodes_[self].right = right;
  return self;
}

void KdTree3::radius_search(const Vec3& query, double radius,
                            std::vector<int>& out) const {
  out.clear();
  if (root_ >= 0) Search(root_, query, radius * radius, radius, out);
  std::sort(out.begin(), out.end());
}

void KdTree3::Search(int node, const Vec3& q, double r2, double radius,
                     std::vector<int>& out) const {
  const Node& n = nodes_[static_cast<size_t>(node)];
  const Vec3& p = pts_[static_cast<size_t>(n.index)];
  if ((p - q).squaredNorm() <= r2) out.push_back(n.index);
  const double delta = q[n.axis] - p[n.axis];
  const int near = delta <= 0 ? n.left : n.right;
  const int far = delta <= 0 ? n.right : n.left;
  if (near >= 0) Search(near, q, r2, radius, out);
  if (far >= 0 && std::abs(delta) <= radius) Search(far, q, r2, radius, out);
}

}  // namespace ef
