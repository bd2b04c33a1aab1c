// Copyright 2026 The eevact Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EEVACT_TENSOR_HPP_
#define EEVACT_TENSOR_HPP_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace eevact {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {

struct TensorImpl {
  Shape shape;
  std::vector<float> data;
  std::vector<float> grad;  // empty until a gradient is accumulated
  bool requires_grad = false;

  std::vector<float>& grad_buffer() {
    if (grad.empty()) grad.assign(data.size(), 0.0f);
    return grad;
  }
};

using TensorPtr = std::shared_ptr<TensorImpl>;

}  // namespace detail

// Dense row-major float32 array with an optional gradient. Copies of a Tensor
// share storage; ops always produce fresh tensors.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<float> data, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, float value, bool requires_grad = false);
  static Tensor scalar(float value, bool requires_grad = false);

  bool defined() const { return impl_ != nullptr; }
  const Shape& shape() const { return impl_->shape; }
  std::size_t rank() const { return impl_->shape.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const { return impl_->data.size(); }

  std::span<const float> data() const { return impl_->data; }
  // Parameters are updated in place by the optimizer; ops never mutate inputs.
  std::span<float> mutable_data() { return impl_->data; }
  float item() const;
  float operator[](std::size_t i) const { return impl_->data[i]; }

  bool requires_grad() const { return impl_ && impl_->requires_grad; }
  void set_requires_grad(bool value) { impl_->requires_grad = value; }
  bool has_grad() const { return impl_ && !impl_->grad.empty(); }
  // Gradient view; all zeros when nothing was accumulated.
  std::vector<float> grad() const;
  std::span<float> mutable_grad() { return impl_->grad_buffer(); }
  void zero_grad() { impl_->grad.clear(); }

  const detail::TensorPtr& impl() const { return impl_; }
  static Tensor wrap(detail::TensorPtr impl);

 private:
  detail::TensorPtr impl_;
};

// Reverse-mode record. Ops append one backward closure per node while the tape
// is active on the current thread; closures run in reverse creation order, so
// every node is visited exactly once after all of its consumers.
class Tape {
 public:
  using BackwardFn = std::function<void()>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  void record(BackwardFn fn) { nodes_.push_back(std::move(fn)); }

  // Seeds d(loss)/d(loss) = 1 and propagates. Throws StateError when called a
  // second time before reset().
  void backward(const Tensor& loss);

  // Drops all nodes (and the activations they keep alive).
  void reset();

  std::size_t size() const { return nodes_.size(); }
  bool consumed() const { return consumed_; }

  // Tape active on this thread, or nullptr.
  static Tape* active();

 private:
  friend class TapeScope;
  std::vector<BackwardFn> nodes_;
  bool consumed_ = false;
};

// Activates a tape on the current thread for the scope's lifetime.
class TapeScope {
 public:
  explicit TapeScope(Tape& tape);
  ~TapeScope();
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* previous_;
};

// The active tape when at least one input requires grad, else nullptr.
template <typename... Ts>
Tape* recording_tape(const Ts&... inputs) {
  Tape* tape = Tape::active();
  if (tape == nullptr) return nullptr;
  const bool any = (... || (inputs.defined() && inputs.requires_grad()));
  return any ? tape : nullptr;
}

// Output tensor for an op; marked as requiring grad when `tracked`.
Tensor make_result(Shape shape, std::vector<float> data, bool tracked);

// Accumulates into an input gradient when that input takes part in autodiff.
inline bool wants_grad(const detail::TensorPtr& t) { return t && t->requires_grad; }

// Arctan surrogate for the Heaviside step:
//   g(u) = 1 / (pi * (1 + (pi * slope * u)^2))
struct Surrogate {
  float slope = 2.0f;

  float derivative(float u) const;
  // Antiderivative of g, used as the smoothed step in gradient oracles.
  double primitive(double u) const;
};

}  // namespace eevact

#endif  // EEVACT_TENSOR_HPP_
