// Copyright 2026 The Taskroute Authors
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

#include "taskroute/loramoe.h"

#include <algorithm>
#include <cmath>

#include "taskroute/error.h"

namespace taskroute {
namespace {

[[noreturn]] void ShapeError(const std::string& what) {
  throw Error(ErrorCode::kShapeMismatch, what);
}

std::string Shape(const DenseMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows * cols) {
    ShapeError("matrix " + std::to_string(rows) + "x" + std::to_string(cols) +
               " given " + std::to_string(entries_.size()) + " entries");
  }
  for (double v : entries_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidInput, "matrix entry is not finite");
    }
  }
}

DenseMatrix DenseMatrix::Identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector DenseMatrix::Apply(std::span<const double> x) const {
  if (x.size() != cols_) {
    ShapeError("cannot apply " + Shape(*this) + " matrix to vector of " +
               std::to_string(x.size()));
  }
  Vector y(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    double acc = 0.0;
    const double* row = &entries_[r * cols_];
    for (std::size_t c = 0; c < cols_; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
  return y;
}

bool DenseMatrix::IsZero() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](double v) { return v == 0.0; });
}

void CheckLayer(const LoRAMoELayer& layer) {
  if (layer.experts.empty()) ShapeError("layer has no experts");
  if (layer.rank == 0) ShapeError("rank must be positive");
  if (!(layer.alpha > 0.0) || !std::isfinite(layer.alpha)) {
    ShapeError("alpha must be positive and finite");
  }
  const std::size_t d_in = layer.d_in();
  const std::size_t d_out = layer.d_out();
  if (d_in == 0 || d_out == 0) ShapeError("base matrix is empty");
  for (std::size_t i = 0; i < layer.experts.size(); ++i) {
    const auto& e = layer.experts[i];
    if (e.a.rows() != layer.rank || e.a.cols() != d_in) {
      ShapeError("expert " + std::to_string(i) + " A is " + Shape(e.a) +
                 ", want " + std::to_string(layer.rank) + "x" +
                 std::to_string(d_in));
    }
    if (e.b.rows() != d_out || e.b.cols() != layer.rank) {
      ShapeError("expert " + std::to_string(i) + " B is " + Shape(e.b) +
                 ", want " + std::to_string(d_out) + "x" +
                 std::to_string(layer.rank));
    }
  }
  if (layer.gate.rows() != layer.experts.size() || layer.gate.cols() != d_in) {
    ShapeError("gate is " + Shape(layer.gate) + ", want " +
               std::to_string(layer.experts.size()) + "x" + std::to_string(d_in));
  }
}

GateWeights Gate(std::span<const double> x, const DenseMatrix& gate) {
  if (gate.rows() == 0) ShapeError("gate has no rows");
  Vector logits = gate.Apply(x);
  double peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& l : logits) {
    l = std::exp(l - peak);
    total += l;
  }
  for (double& l : logits) l /= total;
  return GateWeights{std::move(logits)};
}

Vector ExpertDelta(const LoraExpert& expert, double alpha, std::size_t rank,
                   std::span<const double> x) {
  if (rank == 0 || expert.a.rows() != rank || expert.b.cols() != rank) {
    ShapeError("expert factors disagree with rank " + std::to_string(rank));
  }
  Vector down = expert.a.Apply(x);
  Vector delta = expert.b.Apply(down);
  const double scale = alpha / static_cast<double>(rank);
  for (double& v : delta) v *= scale;
  return delta;
}

Vector LoRAMoEForward(const LoRAMoELayer& layer, std::span<const double> x) {
  CheckLayer(layer);
  Vector out = layer.base.Apply(x);
  GateWeights w = Gate(x, layer.gate);
  for (std::size_t i = 0; i < layer.experts.size(); ++i) {
    const auto& e = layer.experts[i];
    if (e.b.IsZero()) continue;
    Vector delta = ExpertDelta(e, layer.alpha, layer.rank, x);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += w.weights[i] * delta[k];
  }
  return out;
}

Vector DenseEquivalent(const LoRAMoELayer& layer, std::span<const double> x) {
  CheckLayer(layer);
  const std::size_t d_in = layer.d_in();
  const std::size_t d_out = layer.d_out();
  const std::size_t n = layer.experts.size();
  if (x.size() != d_in) ShapeError("input size does not match d_in");

  std::vector<double> weights(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double logit = 0.0;
    for (std::size_t c = 0; c < d_in; ++c) logit += layer.gate(i, c) * x[c];
    weights[i] = std::exp(logit);
    total += weights[i];
  }
  for (double& w : weights) w /= total;

  Vector out(d_out, 0.0);
  for (std::size_t r = 0; r < d_out; ++r) {
    for (std::size_t c = 0; c < d_in; ++c) out[r] += layer.base(r, c) * x[c];
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = layer.experts[i];
    DenseMatrix update(d_out, d_in);
    for (std::size_t r = 0; r < d_out; ++r) {
      for (std::size_t c = 0; c < d_in; ++c) {
        double acc = 0.0;
        for (std::size_t k = 0; k < layer.rank; ++k) acc += e.b(r, k) * e.a(k, c);
        update(r, c) = layer.scale() * acc;
      }
    }
    for (std::size_t r = 0; r < d_out; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < d_in; ++c) acc += update(r, c) * x[c];
      out[r] += weights[i] * acc;
    }
  }
  return out;
}

double Activate(Activation act, double v) {
  switch (act) {
    case Activation::kIdentity: return v;
    case Activation::kRelu: return v > 0.0 ? v : 0.0;
    case Activation::kGelu: {
      constexpr double k = 0.7978845608028654;  // sqrt(2 / pi)
      return 0.5 * v * (1.0 + std::tanh(k * (v + 0.044715 * v * v * v)));
    }
    case Activation::kSilu: return v / (1.0 + std::exp(-v));
  }
  return v;
}

Vector FfnBlockForward(const FfnBlock& block, std::span<const double> x) {
  if (block.up.d_in() != x.size() || block.down.d_out() != x.size()) {
    ShapeError("block does not map a " + std::to_string(x.size()) +
               "-vector to itself");
  }
  if (block.up.d_out() != block.down.d_in()) {
    ShapeError("inner layers disagree on the hidden width");
  }
  if (!block.up_bias.empty() && block.up_bias.size() != block.up.d_out()) {
    ShapeError("up_bias has the wrong size");
  }
  if (!block.down_bias.empty() && block.down_bias.size() != x.size()) {
    ShapeError("down_bias has the wrong size");
  }
  Vector hidden = LoRAMoEForward(block.up, x);
  for (std::size_t k = 0; k < hidden.size(); ++k) {
    double pre = hidden[k] + (block.up_bias.empty() ? 0.0 : block.up_bias[k]);
    hidden[k] = Activate(block.activation, pre);
  }
  Vector inner = LoRAMoEForward(block.down, hidden);
  Vector out(x.begin(), x.end());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] += inner[k] + (block.down_bias.empty() ? 0.0 : block.down_bias[k]);
  }
  return out;
}

LayerGradients Backward(const LoRAMoELayer& layer, std::span<const double> x,
                        std::span<const double> loss_grad) {
  CheckLayer(layer);
  if (x.size() != layer.d_in() || loss_grad.size() != layer.d_out()) {
    ShapeError("backward inputs do not match the layer");
  }
  const std::size_t n = layer.experts.size();
  const double s = layer.scale();
  GateWeights w = Gate(x, layer.gate);

  LayerGradients grads;
  std::vector<double> contribution(n);  // dL/dw_i
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = layer.experts[i];
    Vector u = e.a.Apply(x);
    Vector v = e.b.Apply(u);

    DenseMatrix db(layer.d_out(), layer.rank);
    for (std::size_t r = 0; r < layer.d_out(); ++r) {
      for (std::size_t k = 0; k < layer.rank; ++k) {
        db(r, k) = w.weights[i] * s * loss_grad[r] * u[k];
      }
    }
    DenseMatrix da(layer.rank, layer.d_in());
    for (std::size_t k = 0; k < layer.rank; ++k) {
      double back = 0.0;  // (B^T g)_k
      for (std::size_t r = 0; r < layer.d_out(); ++r) back += e.b(r, k) * loss_grad[r];
      for (std::size_t c = 0; c < layer.d_in(); ++c) {
        da(k, c) = w.weights[i] * s * back * x[c];
      }
    }
    double dot = 0.0;
    for (std::size_t r = 0; r < layer.d_out(); ++r) dot += loss_grad[r] * s * v[r];
    contribution[i] = dot;
    grads.a.push_back(std::move(da));
    grads.b.push_back(std::move(db));
  }

  // Softmax Jacobian: dL/dl_j = w_j (c_j - sum_i w_i c_i).
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += w.weights[i] * contribution[i];
  grads.gate = DenseMatrix(n, layer.d_in());
  for (std::size_t j = 0; j < n; ++j) {
    double dlogit = w.weights[j] * (contribution[j] - mean);
    for (std::size_t c = 0; c < layer.d_in(); ++c) grads.gate(j, c) = dlogit * x[c];
  }
  return grads;
}

Loss SumOfSquaresLoss() {
  return Loss{
      [](std::span<const double> o) {
        double total = 0.0;
        for (double v : o) total += v * v;
        return total;
      },
      [](std::span<const double> o) {
        Vector g(o.begin(), o.end());
        for (double& v : g) v *= 2.0;
        return g;
      },
  };
}

namespace {

struct ParamCheck {
  GradCheckReport& report;

  void Record(double analytic, double numeric, const std::string& name) {
    if (!std::isfinite(analytic) || !std::isfinite(numeric)) {
      throw Error(ErrorCode::kNonFiniteGradient, "gradient of " + name +
                                                     " is not finite");
    }
    double denom = std::max({std::abs(analytic), std::abs(numeric), kGradCheckFloor});
    double rel = std::abs(analytic - numeric) / denom;
    ++report.parameters_checked;
    if (report.worst_parameter.empty() || rel > report.max_relative_error) {
      report.max_relative_error = rel;
      report.worst_parameter = name;
    }
  }
};

std::string ParamName(const char* group, std::size_t index, std::size_t r,
                      std::size_t c) {
  std::string name(group);
  if (index != static_cast<std::size_t>(-1)) name += "[" + std::to_string(index) + "]";
  return name + "(" + std::to_string(r) + "," + std::to_string(c) + ")";
}

}  // namespace

GradCheckReport GradCheck(const LoRAMoELayer& layer, std::span<const double> x,
                          const Loss& loss, double eps) {
  if (!(eps >= 1e-7 && eps <= 1e-3)) {
    throw Error(ErrorCode::kInvalidInput, "eps must lie in [1e-7, 1e-3]");
  }
  CheckLayer(layer);
  Vector out = LoRAMoEForward(layer, x);
  Vector g = loss.gradient(out);
  LayerGradients grads = Backward(layer, x, g);

  GradCheckReport report;
  report.frozen_excluded = {"W0"};
  ParamCheck check{report};
  LoRAMoELayer probe = layer;

  auto central = [&](double& param) {
    const double saved = param;
    param = saved + eps;
    double plus = loss.value(LoRAMoEForward(probe, x));
    param = saved - eps;
    double minus = loss.value(LoRAMoEForward(probe, x));
    param = saved;
    return (plus - minus) / (2.0 * eps);
  };

  for (std::size_t i = 0; i < probe.experts.size(); ++i) {
    auto& e = probe.experts[i];
    for (std::size_t r = 0; r < e.a.rows(); ++r) {
      for (std::size_t c = 0; c < e.a.cols(); ++c) {
        check.Record(grads.a[i](r, c), central(e.a(r, c)), ParamName("A", i, r, c));
      }
    }
    for (std::size_t r = 0; r < e.b.rows(); ++r) {
      for (std::size_t c = 0; c < e.b.cols(); ++c) {
        check.Record(grads.b[i](r, c), central(e.b(r, c)), ParamName("B", i, r, c));
      }
    }
  }
  for (std::size_t r = 0; r < probe.gate.rows(); ++r) {
    for (std::size_t c = 0; c < probe.gate.cols(); ++c) {
      check.Record(grads.gate(r, c), central(probe.gate(r, c)),
                   ParamName("Wg", static_cast<std::size_t>(-1), r, c));
    }
  }
  return report;
}

namespace {

Json MatrixToJson(const DenseMatrix& m) {
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.entries()}};
}

DenseMatrix MatrixFromJson(const Json& j) {
  return DenseMatrix(Field<std::size_t>(j, "rows"), Field<std::size_t>(j, "cols"),
                     Field<std::vector<double>>(j, "data"));
}

constexpr const char* kCheckpointFormat = "taskroute.loramoe";
constexpr int kCheckpointVersion = 1;

}  // namespace

Json LayerToJson(const LoRAMoELayer& layer) {
  CheckLayer(layer);
  Json experts = Json::array();
  for (const auto& e : layer.experts) {
    experts.push_back(Json{{"a", MatrixToJson(e.a)}, {"b", MatrixToJson(e.b)}});
  }
  return Json{{"format", kCheckpointFormat},
              {"version", kCheckpointVersion},
              {"d_in", layer.d_in()},
              {"d_out", layer.d_out()},
              {"rank", layer.rank},
              {"alpha", layer.alpha},
              {"base", MatrixToJson(layer.base)},
              {"gate", MatrixToJson(layer.gate)},
              {"experts", experts}};
}

LoRAMoELayer LayerFromJson(const Json& j) {
  if (FieldOr<std::string>(j, "format", "") != kCheckpointFormat) {
    throw Error(ErrorCode::kInvalidInput, "not a taskroute.loramoe checkpoint");
  }
  int version = Field<int>(j, "version");
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::kInvalidInput,
                "unsupported checkpoint version " + std::to_string(version));
  }
  LoRAMoELayer layer;
  layer.base = MatrixFromJson(Field<Json>(j, "base"));
  layer.gate = MatrixFromJson(Field<Json>(j, "gate"));
  layer.alpha = Field<double>(j, "alpha");
  layer.rank = Field<std::size_t>(j, "rank");
  for (const auto& e : Field<Json>(j, "experts")) {
    layer.experts.push_back(
        {MatrixFromJson(Field<Json>(e, "a")), MatrixFromJson(Field<Json>(e, "b"))});
  }
  CheckLayer(layer);
  if (Field<std::size_t>(j, "d_in") != layer.d_in() ||
      Field<std::size_t>(j, "d_out") != layer.d_out()) {
    ShapeError("declared d_in/d_out disagree with the base matrix");
  }
  return layer;
}

}  // namespace taskroute
