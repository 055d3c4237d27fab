#include "regraph/param_store.hpp"

#include <cmath>
#include <stdexcept>

namespace regraph {

void ParamStore::add(const std::string& name, Tensor2 value) {
  if (entries_.count(name)) {
    throw std::invalid_argument("ParamStore: duplicate parameter '" + name + "'");
  }
  Tensor2 grad(value.rows, value.cols);
  entries_.emplace(name, Entry{std::move(value), std::move(grad)});
}

ParamStore::Entry& ParamStore::lookup(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) {
    throw std::invalid_argument("ParamStore: unknown parameter '" + name + "'");
  }
  return it->second;
}

const ParamStore::Entry& ParamStore::lookup(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) {
    throw std::invalid_argument("ParamStore: unknown parameter '" + name + "'");
  }
  return it->second;
}

Tensor2& ParamStore::value(const std::string& name) { return lookup(name).value; }
const Tensor2& ParamStore::value(const std::string& name) const { return lookup(name).value; }
Tensor2& ParamStore::grad(const std::string& name) { return lookup(name).grad; }
const Tensor2& ParamStore::grad(const std::string& name) const { return lookup(name).grad; }

void ParamStore::zero_grads() {
  for (auto& [name, entry] : entries_) {
    std::fill(entry.grad.data.begin(), entry.grad.data.end(), 0.0);
  }
}

Tensor2 glorot_uniform(std::size_t rows, std::size_t cols, std::size_t fan_in,
                       std::size_t fan_out, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor2 t(rows, cols);
  for (double& v : t.data) v = rng.uniform(-a, a);
  return t;
}

}  // namespace regraph
