// Named parameter arrays with paired gradient storage.
#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "mindgauge/common.hpp"

namespace mindgauge {

struct Param {
  std::vector<std::size_t> shape;
  std::vector<double> value;
  std::vector<double> grad;

  std::size_t size() const { return value.size(); }
};

inline std::size_t shape_size(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

// Insertion-ordered collection of parameters. Iteration order is the order
// of registration, which keeps initialization and update sweeps
// deterministic.
class ParameterSet {
 public:
  Param& add(const std::string& name, std::vector<std::size_t> shape) {
    if (index_.count(name)) throw Error("params", "duplicate parameter " + name);
    index_[name] = params_.size();
    names_.push_back(name);
    Param p;
    p.shape = std::move(shape);
    p.value.assign(shape_size(p.shape), 0.0);
    p.grad.assign(p.value.size(), 0.0);
    params_.push_back(std::move(p));
    return params_.back();
  }

  bool has(const std::string& name) const { return index_.count(name) != 0; }

  Param& at(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw Error("params", "no parameter " + name);
    return params_[it->second];
  }

  const Param& at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw Error("params", "no parameter " + name);
    return params_[it->second];
  }

  const std::vector<std::string>& names() const { return names_; }
  std::size_t count() const { return params_.size(); }
  Param& param(std::size_t i) { return params_[i]; }
  const Param& param(std::size_t i) const { return params_[i]; }

  std::size_t total_size() const {
    std::size_t n = 0;
    for (const Param& p : params_) n += p.size();
    return n;
  }

  void zero_grads() {
    for (Param& p : params_) std::fill(p.grad.begin(), p.grad.end(), 0.0);
  }

  double grad_norm() const {
    double sq = 0.0;
    for (const Param& p : params_) {
      for (double g : p.grad) sq += g * g;
    }
    return std::sqrt(sq);
  }

  bool grads_finite() const {
    for (const Param& p : params_) {
      for (double g : p.grad) {
        if (!std::isfinite(g)) return false;
      }
    }
    return true;
  }

  bool values_finite() const {
    for (const Param& p : params_) {
      for (double v : p.value) {
        if (!std::isfinite(v)) return false;
      }
    }
    return true;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Param> params_;
};

}  // namespace mindgauge
