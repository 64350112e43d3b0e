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

#pragma once

#include <cstddef>
#include <vector>

#include "lsw/dynamics.hpp"

namespace lsw {

/// Static 3-d tree over labelled points.  Nearest-neighbour queries break
/// distance ties toward the smallest label.
class KdTree3 {
 public:
  KdTree3(std::vector<State> points, std::vector<int> labels);

  struct Hit {
    double d2;
    int label;
    std::size_t index;
  };
  Hit nearest(const State& q) const;

  std::size_t size() const { return points_.size(); }

 private:
  struct Node {
    std::size_t point;
    int axis;
    int left = -1;
    int right = -1;
  };
  int build(std::vector<std::size_t>& idx, std::size_t lo, std::size_t hi, int depth);
  void search(int node, const State& q, Hit& best) const;

  std::vector<State> points_;
  std::vector<int> labels_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace lsw
