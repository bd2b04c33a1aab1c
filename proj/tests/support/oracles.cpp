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

#include "oracles.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "eevact/ops.hpp"

namespace eevact::testing {

Tensor random_tensor(const Shape& shape, std::mt19937_64& rng, float scale, bool requires_grad) {
  std::normal_distribution<float> dist(0.0f, scale);
  std::vector<float> data(shape_numel(shape));
  for (float& x : data) x = dist(rng);
  return Tensor(shape, std::move(data), requires_grad);
}

double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-6});
}

namespace {

std::vector<Tensor> clone_all(const std::vector<Tensor>& inputs, bool requires_grad) {
  std::vector<Tensor> out;
  for (const Tensor& t : inputs) {
    const auto d = t.data();
    out.emplace_back(t.shape(), std::vector<float>(d.begin(), d.end()), requires_grad);
  }
  return out;
}

double weighted_sum(const Tensor& out, const std::vector<float>& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += static_cast<double>(w[i]) * out[i];
  return s;
}

double weighted_sum(const std::vector<double>& out, const std::vector<float>& w) {
  if (out.size() != w.size()) throw std::logic_error("reference output size differs from f");
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += static_cast<double>(w[i]) * out[i];
  return s;
}

}  // namespace

GradientCheck check_gradient(const TensorFn& f, const std::vector<Tensor>& inputs, std::uint64_t seed, double step,
                             const ReferenceFn& reference, const std::vector<std::size_t>& wrt) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> which = wrt;
  if (which.empty()) {
    for (std::size_t i = 0; i < inputs.size(); ++i) which.push_back(i);
  }

  std::vector<Tensor> tracked = clone_all(inputs, false);
  for (std::size_t i : which) tracked[i].set_requires_grad(true);
  std::vector<float> w;
  {
    Tape tape;
    TapeScope scope(tape);
    const Tensor out = f(tracked);
    std::normal_distribution<float> dist(0.0f, 1.0f);
    w.resize(out.numel());
    for (float& x : w) x = dist(rng);
    const Tensor loss = ops::sum_all(ops::mul(out, Tensor(out.shape(), w)));
    tape.backward(loss);
  }

  const auto loss_at = [&](const std::vector<Tensor>& x) {
    return reference ? weighted_sum(reference(x), w) : weighted_sum(f(x), w);
  };
  GradientCheck result;
  std::vector<double> all_analytic, all_numeric;
  for (std::size_t i : which) {
    std::vector<double> analytic(tracked[i].numel(), 0.0), numeric(tracked[i].numel());
    if (tracked[i].has_grad()) {
      const auto grad = tracked[i].grad();
      for (std::size_t k = 0; k < grad.size(); ++k) analytic[k] = grad[k];
    }
    std::vector<Tensor> probe = clone_all(inputs, false);
    // Central differences at h and 2h, combined to cancel the h^2 term.
    // Steps are taken as actually representable in float.
    const auto central = [&](float& x, float x0, double h) {
      const float hi = static_cast<float>(x0 + h), lo = static_cast<float>(x0 - h);
      x = hi;
      const double up = loss_at(probe);
      x = lo;
      const double down = loss_at(probe);
      x = x0;
      return (up - down) / (static_cast<double>(hi) - static_cast<double>(lo));
    };
    for (std::size_t k = 0; k < numeric.size(); ++k) {
      float& x = probe[i].mutable_data()[k];
      const float x0 = x;
      numeric[k] = (4.0 * central(x, x0, step) - central(x, x0, 2 * step)) / 3.0;
    }
    const double err = relative_error(analytic, numeric);
    if (err > result.worst) {
      result.worst = err;
      result.worst_input = i;
    }
    all_analytic.insert(all_analytic.end(), analytic.begin(), analytic.end());
    all_numeric.insert(all_numeric.end(), numeric.begin(), numeric.end());
  }
  result.overall = relative_error(all_analytic, all_numeric);
  return result;
}

std::vector<double> naive_conv2d(const Tensor& input, const Tensor& weight, int stride, int padding) {
  const int n = static_cast<int>(input.dim(0)), c = static_cast<int>(input.dim(1));
  const int h = static_cast<int>(input.dim(2)), w = static_cast<int>(input.dim(3));
  const int o = static_cast<int>(weight.dim(0)), k = static_cast<int>(weight.dim(2));
  const int oh = (h + 2 * padding - k) / stride + 1, ow = (w + 2 * padding - k) / stride + 1;
  std::vector<double> out(static_cast<std::size_t>(n) * o * oh * ow, 0.0);
  for (int b = 0; b < n; ++b)
    for (int oc = 0; oc < o; ++oc)
      for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
          double acc = 0.0;
          for (int ic = 0; ic < c; ++ic)
            for (int ky = 0; ky < k; ++ky)
              for (int kx = 0; kx < k; ++kx) {
                const int iy = y * stride - padding + ky, ix = x * stride - padding + kx;
                if (iy < 0 || ix < 0 || iy >= h || ix >= w) continue;
                acc += static_cast<double>(input[((b * c + ic) * h + iy) * w + ix]) *
                       weight[((oc * c + ic) * k + ky) * k + kx];
              }
          out[((b * o + oc) * oh + y) * ow + x] = acc;
        }
  return out;
}

AdlifClosedForm::AdlifClosedForm(double alpha, double beta, double a, double x) {
  m_[0][0] = alpha;
  m_[0][1] = -(1.0 - alpha);
  m_[1][0] = (1.0 - beta) * a;
  m_[1][1] = beta;
  c_[0] = (1.0 - alpha) * x;
  c_[1] = 0.0;
  const C tr = m_[0][0] + m_[1][1];
  const C det = m_[0][0] * m_[1][1] - m_[0][1] * m_[1][0];
  const C disc = std::sqrt(tr * tr - 4.0 * det);
  l1_ = (tr + disc) / 2.0;
  l2_ = (tr - disc) / 2.0;
}

double AdlifClosedForm::power(int t, int i, int j) const {
  const double id = i == j ? 1.0 : 0.0;
  const C p1 = std::pow(l1_, t), p2 = std::pow(l2_, t);
  return ((p1 * (m_[i][j] - l2_ * id) - p2 * (m_[i][j] - l1_ * id)) / (l1_ - l2_)).real();
}

// z_t = (I - M)^{-1} (I - M^t) c
std::pair<double, double> AdlifClosedForm::at(int t) const {
  const double b0 = c_[0] - (power(t, 0, 0) * c_[0] + power(t, 0, 1) * c_[1]);
  const double b1 = c_[1] - (power(t, 1, 0) * c_[0] + power(t, 1, 1) * c_[1]);
  const double i00 = 1 - m_[0][0], i01 = -m_[0][1], i10 = -m_[1][0], i11 = 1 - m_[1][1];
  const double det = i00 * i11 - i01 * i10;
  return {(i11 * b0 - i01 * b1) / det, (-i10 * b0 + i00 * b1) / det};
}

double smooth_step(double u, double slope) {
  return 0.5 + std::atan(std::numbers::pi * slope * u) / (std::numbers::pi * std::numbers::pi * slope);
}

OpKind expected_op_kind(const std::string& name, const NetworkConfig& config) {
  const bool gated = config.fusion == FusionKind::egu || config.fusion == FusionKind::egru;
  if (name == "common.conv") return OpKind::mac;  // real-valued event counts
  if (name == "fusion.recurrent_ur" || name == "fusion.recurrent_z" || name == "fusion.state") return OpKind::mac;
  if (name == "readout") return gated ? OpKind::mac : OpKind::ac;
  return OpKind::ac;  // binary spikes
}

SynOpsOracle synops_from_activity(const ForwardTrace& trace, const Network& net) {
  const auto& conns = net.connections();
  if (trace.activity.size() != conns.size()) throw std::runtime_error("trace has no activity masks");
  SynOpsOracle r;
  r.ops.assign(conns.size(), std::vector<std::uint64_t>(trace.steps, 0));
  for (std::size_t i = 0; i < conns.size(); ++i) {
    const Connection& c = conns[i];
    const std::size_t elems = c.in_elements();
    for (std::size_t t = 0; t < trace.steps; ++t) {
      const auto& mask = trace.activity[i][t];
      if (mask.size() != trace.batch * elems) throw std::runtime_error("mask size mismatch for " + c.name);
      std::uint64_t count = 0;
      for (std::size_t b = 0; b < trace.batch; ++b) {
        const std::uint8_t* m = mask.data() + b * elems;
        if (c.shape == ConnectionShape::conv) {
          const ConvGeometry& g = c.conv;
          for (int oy = 0; oy < g.out_height; ++oy)
            for (int ox = 0; ox < g.out_width; ++ox)
              for (int ky = 0; ky < g.kernel; ++ky)
                for (int kx = 0; kx < g.kernel; ++kx) {
                  const int iy = oy * g.stride - g.padding + ky, ix = ox * g.stride - g.padding + kx;
                  if (iy < 0 || ix < 0 || iy >= g.in_height || ix >= g.in_width) continue;
                  for (int ic = 0; ic < g.in_channels; ++ic) {
                    if (m[(static_cast<std::size_t>(ic) * g.in_height + iy) * g.in_width + ix]) {
                      count += static_cast<std::uint64_t>(g.out_channels);
                    }
                  }
                }
        } else {
          std::uint64_t active = 0;
          for (std::size_t e = 0; e < elems; ++e) active += m[e] ? 1 : 0;
          count += c.shape == ConnectionShape::dense ? active * c.out_features : active * c.multiplicity;
        }
      }
      r.ops[i][t] = count;
      (expected_op_kind(c.name, net.config()) == OpKind::mac ? r.macs : r.acs) += count;
    }
  }
  return r;
}

TempDir::TempDir(const std::string& tag) {
  std::random_device rd;
  const auto base = std::filesystem::temp_directory_path();
  for (int attempt = 0; attempt < 100; ++attempt) {
    path_ = base / ("eevact-" + tag + "-" + std::to_string(rd()));
    if (std::filesystem::create_directory(path_)) return;
  }
  throw std::runtime_error("cannot create a temporary directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_valid_svg(const std::string& text, std::string* why) {
  namespace pt = boost::property_tree;
  try {
    std::istringstream in(text);
    pt::ptree tree;
    pt::read_xml(in, tree);
    const auto root = tree.get_child_optional("svg");
    if (!root) {
      if (why) *why = "root element is not <svg>";
      return false;
    }
    if (root->get<std::string>("<xmlattr>.xmlns", "") != "http://www.w3.org/2000/svg") {
      if (why) *why = "missing SVG namespace";
      return false;
    }
    return true;
  } catch (const pt::xml_parser_error& e) {
    if (why) *why = e.what();
    return false;
  }
}

}  // namespace eevact::testing
