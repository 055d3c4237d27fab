#pragma once

#include <map>
#include <string>

#include "regraph/rng.hpp"
#include "regraph/tensor.hpp"

namespace regraph {

// Named learnable tensors with matching-shape gradients. Iteration order is
// the map's lexicographic key order, which keeps every sweep deterministic.
class ParamStore {
 public:
  struct Entry {
    Tensor2 value;
    Tensor2 grad;
  };

  void add(const std::string& name, Tensor2 value);
  bool has(const std::string& name) const { return entries_.count(name) != 0; }

  Tensor2& value(const std::string& name);
  const Tensor2& value(const std::string& name) const;
  Tensor2& grad(const std::string& name);
  const Tensor2& grad(const std::string& name) const;

  void zero_grads();

  const std::map<std::string, Entry>& entries() const { return entries_; }
  std::map<std::string, Entry>& entries() { return entries_; }

 private:
  Entry& lookup(const std::string& name);
  const Entry& lookup(const std::string& name) const;

  std::map<std::string, Entry> entries_;
};

// Glorot-uniform init: U[-a, a] with a = sqrt(6 / (fan_in + fan_out)).
Tensor2 glorot_uniform(std::size_t rows, std::size_t cols, std::size_t fan_in,
                       std::size_t fan_out, Rng& rng);

}  // namespace regraph
