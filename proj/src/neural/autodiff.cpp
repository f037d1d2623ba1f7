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


#include "lfm/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace lfm::ad {

void Node::accumulate(const Matrix& g) {
  if (grad.size() == 0) {
    grad = g;
  } else {
    grad += g;
  }
}

Var parameter(Matrix value) {
  auto v = std::make_shared<Node>();
  v->value = std::move(value);
  v->requires_grad = true;
  return v;
}

void zero_grad(const Var& v) { v->grad = Matrix::Zero(v->value.rows(), v->value.cols()); }

Var Tape::constant(Matrix value) {
  auto v = std::make_shared<Node>();
  v->value = std::move(value);
  return v;
}

Var Tape::record(Matrix value, bool requires_grad,
                 std::function<void(Node&)> backward) {
  auto v = std::make_shared<Node>();
  v->value = std::move(value);
  v->requires_grad = requires_grad;
  if (requires_grad) {
    v->backward = std::move(backward);
    nodes_.push_back(v);
  }
  return v;
}

void Tape::mix_signature(std::uint64_t bits) {
  signature_ ^= bits + 0x9e3779b97f4a7c15ULL + (signature_ << 6) + (signature_ >> 2);
}

void Tape::backward(const Var& root) {
  if (root->value.rows() != 1 || root->value.cols() != 1) {
    throw std::invalid_argument("backward needs a scalar root");
  }
  root->grad = Matrix::Ones(1, 1);
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    Node& n = **it;
    if (n.grad.size() == 0 || !n.backward) continue;
    n.backward(n);
  }
}

namespace {

bool any_grad(const Var& a) { return a->requires_grad; }
bool any_grad(const Var& a, const Var& b) {
  return a->requires_grad || b->requires_grad;
}

void check_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
  }
}

}  // namespace

Var matmul(Tape& t, const Var& a, const Var& b) {
  if (a->value.cols() != b->value.rows()) {
    throw std::invalid_argument("matmul: inner dimensions differ");
  }
  return t.record(a->value * b->value, any_grad(a, b), [a, b](Node& out) {
    if (a->requires_grad) a->accumulate(out.grad * b->value.transpose());
    if (b->requires_grad) b->accumulate(a->value.transpose() * out.grad);
  });
}

Var add(Tape& t, const Var& a, const Var& b) {
  check_same_shape(a->value, b->value, "add");
  return t.record(a->value + b->value, any_grad(a, b), [a, b](Node& out) {
    if (a->requires_grad) a->accumulate(out.grad);
    if (b->requires_grad) b->accumulate(out.grad);
  });
}

Var add_row(Tape& t, const Var& x, const Var& row) {
  if (row->value.rows() != 1 || row->value.cols() != x->value.cols()) {
    throw std::invalid_argument("add_row: row shape mismatch");
  }
  Matrix v = x->value;
  v.rowwise() += row->value.row(0);
  return t.record(std::move(v), any_grad(x, row), [x, row](Node& out) {
    if (x->requires_grad) x->accumulate(out.grad);
    if (row->requires_grad) row->accumulate(out.grad.colwise().sum());
  });
}

Var scale(Tape& t, const Var& x, double factor) {
  return t.record(x->value * factor, any_grad(x), [x, factor](Node& out) {
    x->accumulate(out.grad * factor);
  });
}

Var relu(Tape& t, const Var& x) {
  Matrix v = x->value.cwiseMax(0.0);
  std::uint64_t bits = 0xcbf29ce484222325ULL;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    bits = (bits ^ (x->value.data()[i] > 0.0 ? 1u : 0u)) * 0x100000001b3ULL;
  }
  t.mix_signature(bits);
  return t.record(std::move(v), any_grad(x), [x](Node& out) {
    x->accumulate((x->value.array() > 0.0).cast<double>() * out.grad.array());
  });
}

Var sigmoid(Tape& t, const Var& x) {
  Matrix v = x->value.unaryExpr([](double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
  });
  Matrix s = v;
  return t.record(std::move(v), any_grad(x), [x, s](Node& out) {
    x->accumulate((s.array() * (1.0 - s.array()) * out.grad.array()).matrix());
  });
}

Var concat_cols(Tape& t, const Var& a, const Var& b) {
  if (a->value.rows() != b->value.rows()) {
    throw std::invalid_argument("concat_cols: row counts differ");
  }
  const Eigen::Index ca = a->value.cols();
  const Eigen::Index cb = b->value.cols();
  Matrix v(a->value.rows(), ca + cb);
  v << a->value, b->value;
  return t.record(std::move(v), any_grad(a, b), [a, b, ca, cb](Node& out) {
    if (a->requires_grad) a->accumulate(out.grad.leftCols(ca));
    if (b->requires_grad) b->accumulate(out.grad.rightCols(cb));
  });
}

Var concat_rows(Tape& t, const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: no inputs");
  const Eigen::Index cols = parts.front()->value.cols();
  Eigen::Index rows = 0;
  bool grad = false;
  for (const Var& p : parts) {
    if (p->value.cols() != cols) {
      throw std::invalid_argument("concat_rows: column counts differ");
    }
    rows += p->value.rows();
    grad |= p->requires_grad;
  }
  Matrix v(rows, cols);
  Eigen::Index at = 0;
  for (const Var& p : parts) {
    v.middleRows(at, p->value.rows()) = p->value;
    at += p->value.rows();
  }
  return t.record(std::move(v), grad, [parts](Node& out) {
    Eigen::Index from = 0;
    for (const Var& p : parts) {
      const Eigen::Index r = p->value.rows();
      if (p->requires_grad) p->accumulate(out.grad.middleRows(from, r));
      from += r;
    }
  });
}

Var gather_rows(Tape& t, const Var& x, const std::vector<int>& index) {
  const Eigen::Index rows = x->value.rows();
  Matrix v(static_cast<Eigen::Index>(index.size()), x->value.cols());
  for (size_t i = 0; i < index.size(); ++i) {
    if (index[i] < 0 || index[i] >= rows) {
      throw std::out_of_range("gather_rows: index out of range");
    }
    v.row(static_cast<Eigen::Index>(i)) = x->value.row(index[i]);
  }
  return t.record(std::move(v), any_grad(x), [x, index](Node& out) {
    Matrix g = Matrix::Zero(x->value.rows(), x->value.cols());
    for (size_t i = 0; i < index.size(); ++i) {
      g.row(index[i]) += out.grad.row(static_cast<Eigen::Index>(i));
    }
    x->accumulate(g);
  });
}

namespace {

Var segment_reduce(Tape& t, const Var& x, const std::vector<int>& segment,
                   int segments, bool mean) {
  if (static_cast<Eigen::Index>(segment.size()) != x->value.rows()) {
    throw std::invalid_argument("segment reduce: one segment id per row");
  }
  std::vector<double> count(static_cast<size_t>(segments), 0.0);
  for (int s : segment) {
    if (s < 0 || s >= segments) {
      throw std::out_of_range("segment reduce: segment out of range");
    }
    count[s] += 1.0;
  }
  if (!mean) std::fill(count.begin(), count.end(), 1.0);
  Matrix v = Matrix::Zero(segments, x->value.cols());
  for (size_t i = 0; i < segment.size(); ++i) {
    v.row(segment[i]) += x->value.row(static_cast<Eigen::Index>(i));
  }
  for (int s = 0; s < segments; ++s) {
    if (count[s] > 0.0) v.row(s) /= count[s];
  }
  return t.record(std::move(v), any_grad(x), [x, segment, count](Node& out) {
    Matrix g(x->value.rows(), x->value.cols());
    for (size_t i = 0; i < segment.size(); ++i) {
      g.row(static_cast<Eigen::Index>(i)) =
          out.grad.row(segment[i]) / count[segment[i]];
    }
    x->accumulate(g);
  });
}

}  // namespace

Var segment_mean(Tape& t, const Var& x, const std::vector<int>& segment,
                 int segments) {
  return segment_reduce(t, x, segment, segments, true);
}

Var segment_sum(Tape& t, const Var& x, const std::vector<int>& segment,
                int segments) {
  return segment_reduce(t, x, segment, segments, false);
}

Var sum(Tape& t, const Var& x) {
  Matrix v(1, 1);
  v(0, 0) = x->value.sum();
  return t.record(std::move(v), any_grad(x), [x](Node& out) {
    x->accumulate(Matrix::Constant(x->value.rows(), x->value.cols(),
                                   out.grad(0, 0)));
  });
}

Var weighted_bce(Tape& t, const Var& p, const std::vector<int>& labels,
                 const std::vector<double>& weights, double eps) {
  const Eigen::Index n = p->value.rows();
  if (p->value.cols() != 1 || static_cast<Eigen::Index>(labels.size()) != n ||
      static_cast<Eigen::Index>(weights.size()) != n) {
    throw std::invalid_argument("weighted_bce: size mismatch");
  }
  if (n == 0) throw std::invalid_argument("weighted_bce: empty input");
  double total = 0.0;
  std::uint64_t bits = 0x100000001b3ULL;
  std::vector<char> clamped(static_cast<size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    double q = p->value(i, 0);
    if (q < eps || q > 1.0 - eps) {
      clamped[i] = 1;
      q = std::clamp(q, eps, 1.0 - eps);
    }
    bits = (bits ^ static_cast<std::uint64_t>(clamped[i])) * 0x100000001b3ULL;
    total += weights[i] * (labels[i] != 0 ? std::log(q) : std::log(1.0 - q));
  }
  t.mix_signature(bits);
  Matrix v(1, 1);
  v(0, 0) = -total / static_cast<double>(n);
  return t.record(std::move(v), any_grad(p),
                  [p, labels, weights, clamped, n](Node& out) {
                    Matrix g = Matrix::Zero(n, 1);
                    const double scale_by = -out.grad(0, 0) / static_cast<double>(n);
                    for (Eigen::Index i = 0; i < n; ++i) {
                      if (clamped[i] != 0) continue;
                      const double q = p->value(i, 0);
                      g(i, 0) = scale_by * weights[i] *
                                (labels[i] != 0 ? 1.0 / q : -1.0 / (1.0 - q));
                    }
                    p->accumulate(g);
                  });
}

}  // namespace lfm::ad
