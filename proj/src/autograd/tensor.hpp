// Copyright 2026 The translit Authors
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
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "common/error.hpp"

namespace translit::ag {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& s);
std::string shape_str(const Shape& s);

// Dense row-major tensor with an optional gradient buffer.
template <typename T>
struct Node {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;  // allocated on first use
  bool requires_grad = false;
  std::string name;

  std::size_t size() const { return value.size(); }
  std::size_t cols() const { return shape.empty() ? 1 : shape.back(); }
  std::size_t rows() const { return shape.empty() || cols() == 0 ? 1 : value.size() / cols(); }
  T* g() {
    if (grad.size() != value.size()) grad.assign(value.size(), T(0));
    return grad.data();
  }
  void zero_grad() { grad.assign(value.size(), T(0)); }
};

template <typename T>
using Var = std::shared_ptr<Node<T>>;

template <typename T>
Var<T> make_tensor(Shape shape, bool requires_grad = false, std::string name = {}) {
  auto n = std::make_shared<Node<T>>();
  n->value.assign(numel(shape), T(0));
  n->shape = std::move(shape);
  n->requires_grad = requires_grad;
  n->name = std::move(name);
  return n;
}

template <typename T>
Var<T> make_tensor(Shape shape, std::vector<T> data, bool requires_grad = false) {
  if (numel(shape) != data.size()) {
    fail(ErrorKind::kInvalidArgument, "tensor data length " + std::to_string(data.size()) +
                                          " does not match shape " + shape_str(shape));
  }
  auto n = std::make_shared<Node<T>>();
  n->shape = std::move(shape);
  n->value = std::move(data);
  n->requires_grad = requires_grad;
  return n;
}

// Tape of backward closures in creation order. Ops record only when some
// input requires a gradient and recording is enabled.
template <typename T>
class Graph {
 public:
  explicit Graph(bool record = true) : record_(record) {}

  bool recording() const { return record_; }
  bool wants(const Var<T>& v) const { return record_ && v && v->requires_grad; }

  void push(std::function<void()> backward) { tape_.push_back(std::move(backward)); }
  std::size_t size() const { return tape_.size(); }

  // Seeds d(loss)/d(loss) = 1 and runs the tape in reverse. A second call
  // on the same graph is an error.
  void backward(const Var<T>& loss) {
    if (done_) fail(ErrorKind::kInvalidArgument, "backward called twice on the same graph");
    if (!loss || loss->size() != 1) fail(ErrorKind::kInvalidArgument, "backward needs a scalar loss");
    done_ = true;
    if (!loss->requires_grad) return;
    loss->g()[0] += T(1);
    for (auto it = tape_.rbegin(); it != tape_.rend(); ++it) (*it)();
    tape_.clear();
  }

 private:
  bool record_;
  bool done_ = false;
  std::vector<std::function<void()>> tape_;
};

// Named parameters in registration order. A tied alias refers to an
// existing parameter and is not counted or stored twice.
template <typename T>
class ParamStore {
 public:
  Var<T> add(const std::string& name, Shape shape);
  void alias(const std::string& name, const std::string& target);

  const Var<T>& get(const std::string& name) const;
  bool has(const std::string& name) const { return index_.count(name) || aliases_.count(name); }

  const std::vector<Var<T>>& params() const { return params_; }
  const std::map<std::string, std::string>& aliases() const { return aliases_; }
  std::size_t count() const;  // scalar parameters, duplicates excluded

  void zero_grad();

 private:
  std::vector<Var<T>> params_;
  std::map<std::string, std::size_t> index_;
  std::map<std::string, std::string> aliases_;
};

}  // namespace translit::ag
