// Copyright 2026 The LFM Auction Authors
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


// Minimal reverse-mode automatic differentiation over dense matrices.

#ifndef LFM_AUTODIFF_HPP_
#define LFM_AUTODIFF_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace lfm::ad {

using Matrix = Eigen::MatrixXd;

struct Node {
  Matrix value;
  Matrix grad;  // same shape as value once touched by backward
  bool requires_grad = false;
  std::function<void(Node&)> backward;  // pushes grad into the inputs

  void accumulate(const Matrix& g);
};

using Var = std::shared_ptr<Node>;

// A trainable tensor outliving any single tape.
Var parameter(Matrix value);
void zero_grad(const Var& v);

// Records operations in creation order so backward can replay them in
// reverse. One tape per forward pass.
class Tape {
 public:
  Var constant(Matrix value);
  // Sets d(root)/d(root) = 1 and propagates to every recorded node and
  // every parameter reachable from root. root must be 1x1.
  void backward(const Var& root);

  // Hash of every activation mask taken at a kink (ReLU sign, clamp
  // saturation). Two forward passes with equal signatures evaluate the same
  // smooth piece of the function.
  std::uint64_t kink_signature() const { return signature_; }
  void mix_signature(std::uint64_t bits);

  Var record(Matrix value, bool requires_grad,
             std::function<void(Node&)> backward);

 private:
  std::vector<Var> nodes_;
  std::uint64_t signature_ = 0x84222325cbf29ce4ULL;
};

Var matmul(Tape& t, const Var& a, const Var& b);
Var add(Tape& t, const Var& a, const Var& b);
// x (n x d) plus a 1 x d row broadcast over all rows.
Var add_row(Tape& t, const Var& x, const Var& row);
Var scale(Tape& t, const Var& x, double factor);
Var relu(Tape& t, const Var& x);
Var sigmoid(Tape& t, const Var& x);
Var concat_cols(Tape& t, const Var& a, const Var& b);
// Stacks the inputs vertically; all must share the column count.
Var concat_rows(Tape& t, const std::vector<Var>& parts);
// Row i of the result is row index[i] of x.
Var gather_rows(Tape& t, const Var& x, const std::vector<int>& index);
// Row s of the result is the mean of the rows of x whose segment is s;
// empty segments give zero rows.
Var segment_mean(Tape& t, const Var& x, const std::vector<int>& segment,
                 int segments);
Var segment_sum(Tape& t, const Var& x, const std::vector<int>& segment,
                int segments);
Var sum(Tape& t, const Var& x);
// -(1/n) sum_i w_i [y_i log p_i + (1 - y_i) log(1 - p_i)] with p clamped to
// [eps, 1 - eps]; p is n x 1. Gradient is zero where the clamp is active.
Var weighted_bce(Tape& t, const Var& p, const std::vector<int>& labels,
                 const std::vector<double>& weights, double eps = 1e-7);

}  // namespace lfm::ad

#endif  // LFM_AUTODIFF_HPP_
