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

#ifndef TASKROUTE_LORAMOE_H_
#define TASKROUTE_LORAMOE_H_

// Mixture of low-rank adapters over a frozen linear map:
//
//   o = W0 x + (alpha / r) * sum_i w_i(x) B_i A_i x,   w(x) = softmax(Wg x)
//
// Column-vector convention: x has d_in entries, W0 is d_out x d_in, each A_i
// is r x d_in, each B_i is d_out x r and Wg is N x d_in.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "taskroute/json_io.h"

namespace taskroute {

using Vector = std::vector<double>;

// Row-major matrix of finite doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);  // zero-filled
  // Throws Error(kShapeMismatch) if entries.size() != rows * cols and
  // Error(kInvalidInput) if an entry is not finite.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static DenseMatrix Identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const {
    return entries_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) {
    return entries_[r * cols_ + c];
  }
  const std::vector<double>& entries() const { return entries_; }
  std::vector<double>& mutable_entries() { return entries_; }

  // this * x. Throws Error(kShapeMismatch) if x.size() != cols().
  Vector Apply(std::span<const double> x) const;

  bool IsZero() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

struct LoraExpert {
  DenseMatrix a;  // r x d_in
  DenseMatrix b;  // d_out x r

  friend bool operator==(const LoraExpert&, const LoraExpert&) = default;
};

struct LoRAMoELayer {
  DenseMatrix base;  // W0, frozen
  std::vector<LoraExpert> experts;
  DenseMatrix gate;  // Wg
  double alpha = 1.0;
  std::size_t rank = 1;

  std::size_t d_in() const { return base.cols(); }
  std::size_t d_out() const { return base.rows(); }
  double scale() const { return alpha / static_cast<double>(rank); }

  friend bool operator==(const LoRAMoELayer&, const LoRAMoELayer&) = default;
};

// Throws Error(kShapeMismatch) unless N >= 1, every expert has shape
// (r x d_in, d_out x r), Wg is N x d_in, alpha > 0 and r >= 1.
void CheckLayer(const LoRAMoELayer& layer);

struct GateWeights {
  std::vector<double> weights;
};

// softmax(Wg x), evaluated with the max logit subtracted.
GateWeights Gate(std::span<const double> x, const DenseMatrix& gate);

// (alpha / r) * B (A x), never forming B A.
Vector ExpertDelta(const LoraExpert& expert, double alpha, std::size_t rank,
                   std::span<const double> x);

// Experts whose B is entirely zero are skipped, so a layer with all-zero B
// factors returns exactly W0 x.
Vector LoRAMoEForward(const LoRAMoELayer& layer, std::span<const double> x);

// Reference evaluation materializing every (alpha / r) B_i A_i as a dense
// d_out x d_in matrix and using an unshifted softmax. Meant for small
// layers in tests.
Vector DenseEquivalent(const LoRAMoELayer& layer, std::span<const double> x);

enum class Activation { kIdentity, kRelu, kGelu, kSilu };

double Activate(Activation act, double v);

// Residual feed-forward block: x + down(act(up(x) + up_bias)) + down_bias.
struct FfnBlock {
  LoRAMoELayer up;    // d_model -> d_hidden
  LoRAMoELayer down;  // d_hidden -> d_model
  Activation activation = Activation::kGelu;
  Vector up_bias;     // empty or d_hidden entries
  Vector down_bias;   // empty or d_model entries
};

Vector FfnBlockForward(const FfnBlock& block, std::span<const double> x);

// Gradients of a scalar loss with respect to the trainable parameters.
struct LayerGradients {
  std::vector<DenseMatrix> a;  // one per expert, r x d_in
  std::vector<DenseMatrix> b;  // one per expert, d_out x r
  DenseMatrix gate;            // N x d_in
};

// Backpropagates dL/do through the layer, including the softmax gate.
LayerGradients Backward(const LoRAMoELayer& layer, std::span<const double> x,
                        std::span<const double> loss_grad);

struct Loss {
  std::function<double(std::span<const double>)> value;
  std::function<Vector(std::span<const double>)> gradient;
};

// L(o) = sum_k o_k^2.
Loss SumOfSquaresLoss();

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_parameter;  // e.g. "B[1](0,0)"
  std::size_t parameters_checked = 0;
  // The frozen base W0 is never perturbed; always {"W0"}.
  std::vector<std::string> frozen_excluded;
};

// Denominator floor of the relative error |g - f| / max(|g|, |f|, floor).
inline constexpr double kGradCheckFloor = 1e-6;

// Compares Backward against central differences with step `eps` on every
// entry of every A_i, B_i and Wg. Throws Error(kInvalidInput) if eps is
// outside [1e-7, 1e-3] and Error(kNonFiniteGradient) on NaN or infinity.
GradCheckReport GradCheck(const LoRAMoELayer& layer, std::span<const double> x,
                          const Loss& loss, double eps);

// Versioned JSON checkpoint:
//   {"format": "taskroute.loramoe", "version": 1, "d_in", "d_out", "rank",
//    "alpha", "base": M, "gate": M, "experts": [{"a": M, "b": M}, ...]}
// with M = {"rows", "cols", "data": [row-major entries]}.
Json LayerToJson(const LoRAMoELayer& layer);
// Validates every shape invariant; throws Error(kShapeMismatch) or
// Error(kInvalidInput).
LoRAMoELayer LayerFromJson(const Json& j);

}  // namespace taskroute

#endif  // TASKROUTE_LORAMOE_H_
