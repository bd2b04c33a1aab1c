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

#include "eevact/tensor.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "eevact/error.hpp"

namespace eevact {
namespace {
thread_local Tape* g_active_tape = nullptr;
}  // namespace

std::size_t shape_numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape, std::vector<float> data, bool requires_grad)
    : impl_(std::make_shared<detail::TensorImpl>()) {
  if (shape_numel(shape) != data.size()) {
    throw ArgumentError("tensor data length " + std::to_string(data.size()) +
                        " does not match shape " + shape_str(shape));
  }
  impl_->shape = std::move(shape);
  impl_->data = std::move(data);
  impl_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) { return full(std::move(shape), 0.0f, requires_grad); }

Tensor Tensor::full(Shape shape, float value, bool requires_grad) {
  const std::size_t n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<float>(n, value), requires_grad);
}

Tensor Tensor::scalar(float value, bool requires_grad) { return Tensor({1}, {value}, requires_grad); }

Tensor Tensor::wrap(detail::TensorPtr impl) {
  Tensor t;
  t.impl_ = std::move(impl);
  return t;
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= rank()) {
    throw ArgumentError("axis " + std::to_string(axis) + " out of range for shape " + shape_str(shape()));
  }
  return impl_->shape[axis];
}

float Tensor::item() const {
  if (numel() != 1) throw ArgumentError("item() needs a single-element tensor, got " + shape_str(shape()));
  return impl_->data[0];
}

std::vector<float> Tensor::grad() const {
  if (!impl_->grad.empty()) return impl_->grad;
  return std::vector<float>(impl_->data.size(), 0.0f);
}

Tensor make_result(Shape shape, std::vector<float> data, bool tracked) {
  return Tensor(std::move(shape), std::move(data), tracked);
}

void Tape::backward(const Tensor& loss) {
  if (consumed_) throw StateError("backward() already ran on this tape; call reset() first");
  if (nodes_.empty()) throw StateError("backward() on an empty tape");
  if (!loss.defined() || loss.numel() != 1) throw ArgumentError("backward() needs a scalar loss");
  if (!loss.requires_grad()) throw ArgumentError("loss does not depend on any tracked tensor");
  consumed_ = true;
  loss.impl()->grad_buffer()[0] = 1.0f;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) (*it)();
}

void Tape::reset() {
  nodes_.clear();
  consumed_ = false;
}

Tape* Tape::active() { return g_active_tape; }

TapeScope::TapeScope(Tape& tape) : previous_(g_active_tape) { g_active_tape = &tape; }

TapeScope::~TapeScope() { g_active_tape = previous_; }

float Surrogate::derivative(float u) const {
  const float z = std::numbers::pi_v<float> * slope * u;
  return 1.0f / (std::numbers::pi_v<float> * (1.0f + z * z));
}

double Surrogate::primitive(double u) const {
  const double s = static_cast<double>(slope);
  return std::atan(std::numbers::pi * s * u) / (std::numbers::pi * std::numbers::pi * s);
}

}  // namespace eevact
