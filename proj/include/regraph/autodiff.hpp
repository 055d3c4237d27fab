#pragma once

#include <functional>
#include <vector>

#include "regraph/tensor.hpp"

namespace regraph {

// Small reverse-mode tape over Tensor2 values. One tape per forward pass;
// backward() walks the nodes in reverse creation order.
class Tape {
 public:
  struct Var {
    std::size_t id = static_cast<std::size_t>(-1);
    bool valid() const { return id != static_cast<std::size_t>(-1); }
  };

  Var leaf(Tensor2 value);

  const Tensor2& value(Var v) const { return nodes_[v.id].value; }
  const Tensor2& grad(Var v) const { return nodes_[v.id].grad; }

  Var matmul(Var a, Var b);
  // a * const
  Var matmul_const(Var a, const Tensor2& b);
  // const * b
  Var const_matmul(const Tensor2& a, Var b);
  Var add(Var a, Var b);
  Var add_row_vector(Var a, Var bias);
  Var relu(Var a);
  Var hadamard(Var a, Var b);
  // elementwise product with a constant (used for sparsity masks)
  Var mul_const(Var a, const Tensor2& c);
  Var row_softmax(Var a);
  Var masked_row_softmax(Var a, Tensor2 mask);
  Var l2_normalize_rows(Var a, double eps);
  Var concat_cols(const std::vector<Var>& parts);
  // same data, new shape (rows*cols preserved)
  Var reshape(Var a, std::size_t rows, std::size_t cols);
  // a * b^T where b is a variable
  Var matmul_nt(Var a, Var b);

  // mean over batch of -log softmax(logits)[i, labels[i]]; 1x1 output
  Var cross_entropy_mean(Var logits, std::vector<int> labels);
  // mean smooth-L1 over all entries; 1x1 output
  Var smooth_l1_mean(Var pred, Tensor2 target);
  // sum of 1x1 scalars
  Var add_scalars(const std::vector<Var>& scalars);

  // Seeds d(loss)/d(loss) = 1 and back-propagates. loss must be 1x1.
  void backward(Var loss);

 private:
  struct Node {
    Tensor2 value;
    Tensor2 grad;
    std::function<void(Tape&)> back;  // empty for leaves
  };

  Var push(Tensor2 value, std::function<void(Tape&)> back);
  Tensor2& mut_grad(std::size_t id) { return nodes_[id].grad; }

  std::vector<Node> nodes_;
};

}  // namespace regraph
