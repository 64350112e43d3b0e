// Copyright 2026 The lsw Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lsw/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "lsw/error.hpp"

namespace lsw {

KdTree3::KdTree3(std::vector<State> points, std::vector<int> labels)
    : points_(std::move(points)), labels_(std::move(labels)) {
  require(points_.size() == labels_.size(), "one label per point");
  require(!points_.empty(), "kd-tree needs at least one point");
  std::vector<std::size_t> idx(points_.size());
  std::iota(idx.begin(), idx.end(), 0);
  nodes_.reserve(points_.size());
  root_ = build(idx, 0, idx.size(), 0);
}

int KdTree3::build(std::vector<std::size_t>& idx, std::size_t lo, std::size_t hi, int depth) {
  if (lo >= hi) return -1;
  const int axis = depth % 3;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::nth_element(idx.begin() + static_cast<std::ptrdiff_t>(lo),
                   idx.begin() + static_cast<std::ptrdiff_t>(mid),
                   idx.begin() + static_cast<std::ptrdiff_t>(hi),
                   [&](std::size_t a, std::size_t b) {
                     const double va = points_[a][axis], vb = points_[b][axis];
                     return va < vb || (va == vb && a < b);
                   });
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({idx[mid], axis});
  const int left = build(idx, lo, mid, depth + 1);
  const int right = build(idx, mid + 1, hi, depth + 1);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

void KdTree3::search(int node, const State& q, Hit& best) const {
  if (node < 0) return;
  const Node& n = nodes_[static_cast<std::size_t>(node)];
  const State& p = points_[n.point];
  const double d2 = (p - q).squaredNorm();
  const int label = labels_[n.point];
  if (d2 < best.d2 || (d2 == best.d2 && label < best.label)) best = {d2, label, n.point};
  const double diff = q[n.axis] - p[n.axis];
  const int near = diff < 0.0 ? n.left : n.right;
  const int far = diff < 0.0 ? n.right : n.left;
  search(near, q, best);
  // <= keeps equidistant points on the far side eligible for the tie rule
  if (diff * diff <= best.d2) search(far, q, best);
}

KdTree3::Hit KdTree3::nearest(const State& q) const {
  Hit best{std::numeric_limits<double>::infinity(), std::numeric_limits<int>::max(), 0};
  search(root_, q, best);
  return best;
}

}  // namespace lsw
