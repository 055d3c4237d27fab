#include "regraph/autodiff.hpp"

#include <cmath>
#include <limits>

#include "regraph/kernels.hpp"

namespace regraph {

namespace {

void accumulate(Tensor2& dst, const Tensor2& src) {
  kernels::axpy(dst.data.data(), 1.0, src.data.data(), dst.size());
}

}  // namespace

Tape::Var Tape::push(Tensor2 value, std::function<void(Tape&)> back) {
  Node n;
  n.grad = Tensor2(value.rows, value.cols);
  n.value = std::move(value);
  n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Tape::Var Tape::leaf(Tensor2 value) { return push(std::move(value), {}); }

Tape::Var Tape::matmul(Var a, Var b) {
  Tensor2 out = regraph::matmul(value(a), value(b));
  return push(std::move(out), [a, b, self = Var{nodes_.size()}](Tape& t) {
    const Tensor2& g = t.grad(self);
    accumulate(t.mut_grad(a.id), regraph::matmul_nt(g, t.value(b)));
    accumulate(t.mut_grad(b.id), regraph::matmul_tn(t.value(a), g));
  });
}

Tape::Var Tape::matmul_const(Var a, const Tensor2& b) {
  Tensor2 out = regraph::matmul(value(a), b);
  return push(std::move(out), [a, b, self = Var{nodes_.size()}](Tape& t) {
    accumulate(t.mut_grad(a.id), regraph::matmul_nt(t.grad(self), b));
  });
}

Tape::Var Tape::const_matmul(const Tensor2& a, Var b) {
  Tensor2 out = regraph::matmul(a, value(b));
  return push(std::move(out), [a, b, self = Var{nodes_.size()}](Tape& t) {
    accumulate(t.mut_grad(b.id), regraph::matmul_tn(a, t.grad(self)));
  });
}

Tape::Var Tape::matmul_nt(Var a, Var b) {
  Tensor2 out = regraph::matmul_nt(value(a), value(b));
  return push(std::move(out), [a, b, self = Var{nodes_.size()}](Tape& t) {
    const Tensor2& g = t.grad(self);
    // C = A B^T: dA += dC B ; dB += dC^T A
    accumulate(t.mut_grad(a.id), regraph::matmul(g, t.value(b)));
    accumulate(t.mut_grad(b.id), regraph::matmul_tn(g, t.value(a)));
  });
}

Tape::Var Tape::add(Var a, Var b) {
  Tensor2 out = regraph::add(value(a), value(b));
  return push(std::move(out), [a, b, self = Var{nodes_.size()}](Tape& t) {
    accumulate(t.mut_grad(a.id), t.grad(self));
    accumulate(t.mut_grad(b.id), t.grad(self));
  });
}

Tape::Var Tape::add_row_vector(Var a, Var bias) {
  Tensor2 out = regraph::add_row_vector(value(a), value(bias));
  return push(std::move(out), [a, bias, self = Var{nodes_.size()}](Tape& t) {
    const Tensor2& g = t.grad(self);
    accumulate(t.mut_grad(a.id), g);
    Tensor2& db = t.mut_grad(bias.id);
    for (std::size_t i = 0; i < g.rows; ++i) {
      kernels::axpy(db.row(0), 1.0, g.row(i), g.cols);
    }
  });
}

Tape::Var Tape::relu(Var a) {
  Tensor2 out = regraph::relu(value(a));
  return push(std::move(out), [a, self = Var{nodes_.size()}](Tape& t) {
    const Tensor2& x = t.value(a);
    const Tensor2& g = t.grad(self);
    kernels::relu_backward(t.mut_grad(a.id).data.data(), x.data.data(), g.data.data(), x.size());
  });
}

Tape::Var Tape::hadamard(Var a, Var b) {
  Tensor2 out = regraph::hadamard(value(a), value(b));
  return push(std::move(out), [a, b, self = Var{nodes_.size()}](Tape& t) {
    const Tensor2& g = t.grad(self);
    accumulate(t.mut_grad(a.id), regraph::hadamard(g, t.value(b)));
    accumulate(t.mut_grad(b.id), regraph::hadamard(g, t.value(a)));
  });
}

Tape::Var Tape::mul_const(Var a, const Tensor2& c) {
  Tensor2 out = regraph::hadamard(value(a), c);
  return push(std::move(out), [a, c, self = Var{nodes_.size()}](Tape& t) {
    accumulate(t.mut_grad(a.id), regraph::hadamard(t.grad(self), c));
  });
}

Tape::Var Tape::row_softmax(Var a) {
  Tensor2 ones(value(a).rows, value(a).cols);
  std::fill(ones.data.begin(), ones.data.end(), 1.0);
  return masked_row_softmax(a, std::move(ones));
}

Tape::Var Tape::masked_row_softmax(Var a, Tensor2 mask) {
  Tensor2 out = regraph::masked_row_softmax(value(a), mask);
  return push(std::move(out), [a, mask = std::move(mask), self = Var{nodes_.size()}](Tape& t) {
    const Tensor2& y = t.value(self);
    const Tensor2& dy = t.grad(self);
    Tensor2& dx = t.mut_grad(a.id);
    for (std::size_t i = 0; i < y.rows; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < y.cols; ++j) {
        if (mask.at(i, j) != 0.0) dot += dy.at(i, j) * y.at(i, j);
      }
      for (std::size_t j = 0; j < y.cols; ++j) {
        if (mask.at(i, j) != 0.0) dx.at(i, j) += y.at(i, j) * (dy.at(i, j) - dot);
      }
    }
  });
}

Tape::Var Tape::l2_normalize_rows(Var a, double eps) {
  Tensor2 out = regraph::l2_normalize_rows(value(a), eps);
  return push(std::move(out), [a, eps, self = Var{nodes_.size()}](Tape& t) {
    const Tensor2& x = t.value(a);
    const Tensor2& y = t.value(self);
    const Tensor2& dy = t.grad(self);
    Tensor2& dx = t.mut_grad(a.id);
    for (std::size_t i = 0; i < x.rows; ++i) {
      double ss = 0.0;
      for (std::size_t j = 0; j < x.cols; ++j) ss += x.at(i, j) * x.at(i, j);
      const double norm = std::sqrt(ss);
      if (norm < eps) {
        kernels::axpy(dx.row(i), 1.0 / eps, dy.row(i), x.cols);
      } else {
        double dot = 0.0;
        for (std::size_t j = 0; j < x.cols; ++j) dot += y.at(i, j) * dy.at(i, j);
        for (std::size_t j = 0; j < x.cols; ++j) {
          dx.at(i, j) += (dy.at(i, j) - y.at(i, j) * dot) / norm;
        }
      }
    }
  });
}

Tape::Var Tape::concat_cols(const std::vector<Var>& parts) {
  std::vector<const Tensor2*> vals;
  vals.reserve(parts.size());
  for (Var p : parts) vals.push_back(&value(p));
  Tensor2 out = regraph::concat_cols(vals);
  return push(std::move(out), [parts, self = Var{nodes_.size()}](Tape& t) {
    const Tensor2& g = t.grad(self);
    std::size_t off = 0;
    for (Var p : parts) {
      Tensor2& dp = t.mut_grad(p.id);
      for (std::size_t i = 0; i < dp.rows; ++i) {
        for (std::size_t j = 0; j < dp.cols; ++j) dp.at(i, j) += g.at(i, off + j);
      }
      off += dp.cols;
    }
  });
}

Tape::Var Tape::reshape(Var a, std::size_t rows, std::size_t cols) {
  const Tensor2& x = value(a);
  if (rows * cols != x.size()) {
    throw DimensionError("reshape: " + shape_str(x) + " to " + std::to_string(rows) + "x" +
                         std::to_string(cols));
  }
  Tensor2 out(rows, cols, x.data);
  return push(std::move(out), [a, self = Var{nodes_.size()}](Tape& t) {
    const Tensor2& g = t.grad(self);
    Tensor2& da = t.mut_grad(a.id);
    kernels::axpy(da.data.data(), 1.0, g.data.data(), da.size());
  });
}

Tape::Var Tape::cross_entropy_mean(Var logits, std::vector<int> labels) {
  const Tensor2& z = value(logits);
  if (labels.size() != z.rows) {
    throw DimensionError("cross_entropy_mean: " + std::to_string(labels.size()) +
                         " labels for " + shape_str(z));
  }
  Tensor2 probs = regraph::row_softmax(z);
  double loss = 0.0;
  for (std::size_t i = 0; i < z.rows; ++i) {
    loss -= std::log(std::max(probs.at(i, labels[i]), 1e-300));
  }
  Tensor2 out(1, 1);
  out.at(0, 0) = loss / static_cast<double>(z.rows);
  return push(std::move(out), [logits, labels = std::move(labels), probs = std::move(probs),
                               self = Var{nodes_.size()}](Tape& t) {
    const double g = t.grad(self).at(0, 0) / static_cast<double>(probs.rows);
    Tensor2& dz = t.mut_grad(logits.id);
    for (std::size_t i = 0; i < probs.rows; ++i) {
      for (std::size_t j = 0; j < probs.cols; ++j) {
        double d = probs.at(i, j) - (static_cast<int>(j) == labels[i] ? 1.0 : 0.0);
        dz.at(i, j) += g * d;
      }
    }
  });
}

Tape::Var Tape::smooth_l1_mean(Var pred, Tensor2 target) {
  const Tensor2& p = value(pred);
  if (!p.same_shape(target)) {
    throw DimensionError("smooth_l1_mean: " + shape_str(p) + " vs " + shape_str(target));
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p.data[i] - target.data[i];
    const double a = std::fabs(d);
    loss += a < 1.0 ? 0.5 * d * d : a - 0.5;
  }
  Tensor2 out(1, 1);
  out.at(0, 0) = loss / static_cast<double>(p.size());
  return push(std::move(out),
              [pred, target = std::move(target), self = Var{nodes_.size()}](Tape& t) {
    const Tensor2& p = t.value(pred);
    const double g = t.grad(self).at(0, 0) / static_cast<double>(p.size());
    Tensor2& dp = t.mut_grad(pred.id);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double d = p.data[i] - target.data[i];
      dp.data[i] += g * (d < -1.0 ? -1.0 : d > 1.0 ? 1.0 : d);
    }
  });
}

Tape::Var Tape::add_scalars(const std::vector<Var>& scalars) {
  double sum = 0.0;
  for (Var s : scalars) sum += value(s).at(0, 0);
  Tensor2 out(1, 1);
  out.at(0, 0) = sum;
  return push(std::move(out), [scalars, self = Var{nodes_.size()}](Tape& t) {
    const double g = t.grad(self).at(0, 0);
    for (Var s : scalars) t.mut_grad(s.id).at(0, 0) += g;
  });
}

void Tape::backward(Var loss) {
  if (value(loss).rows != 1 || value(loss).cols != 1) {
    throw DimensionError("backward: loss must be 1x1, got " + shape_str(value(loss)));
  }
  for (auto& n : nodes_) std::fill(n.grad.data.begin(), n.grad.data.end(), 0.0);
  nodes_[loss.id].grad.at(0, 0) = 1.0;
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    if (nodes_[i].back) nodes_[i].back(*this);
  }
}

}  // namespace regraph
