// Copyright 2026  sfpro authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SFPRO_TAPE_HPP_
#define SFPRO_TAPE_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "sfpro/stft.hpp"
#include "sfpro/tensor.hpp"

namespace sfpro {

using ValueId = int32_t;
constexpr ValueId kNoValue = -1;

// Reverse-mode tape. Ops record a backward closure at application time;
// backward() replays them in exact reverse order, accumulating gradients.
// A tape is confined to one training step and is never shared across
// concurrent steps; kernels parallelize internally with deterministic
// per-element reduction order.
class Tape {
 public:
  ValueId leaf(Tensor t, bool requires_grad = false);

  const Tensor& value(ValueId id) const { return nodes_[id].value; }
  const Tensor& grad(ValueId id) const { return nodes_[id].grad; }
  bool requires_grad(ValueId id) const { return nodes_[id].requires_grad; }
  int64_t size() const { return static_cast<int64_t>(nodes_.size()); }

  // Seeds d(root)/d(root) = 1 and propagates to all reachable leaves.
  // root must be scalar.
  void backward(ValueId root);

  // -- convolutions ---------------------------------------------------------
  ValueId conv1d(ValueId x, ValueId w, ValueId b, int64_t stride, int64_t pad);
  ValueId conv2d(ValueId x, ValueId w, ValueId b, int64_t sh, int64_t sw,
                 int64_t ph, int64_t pw);
  ValueId conv2d_transpose(ValueId x, ValueId w, ValueId b, int64_t sh,
                           int64_t sw, int64_t ph, int64_t pw);

  // -- dense ----------------------------------------------------------------
  // x: (n), w: (p, n), b: (p) or kNoValue -> (p)
  ValueId linear(ValueId x, ValueId w, ValueId b);

  // -- elementwise ----------------------------------------------------------
  ValueId add(ValueId a, ValueId b);
  ValueId sub(ValueId a, ValueId b);
  ValueId mul(ValueId a, ValueId b);
  // scale * x + shift, elementwise constants
  ValueId affine(ValueId x, double scale, double shift);
  ValueId sigmoid(ValueId x);
  ValueId tanh(ValueId x);
  ValueId leaky_relu(ValueId x, double slope);

  // -- shape plumbing -------------------------------------------------------
  ValueId concat(ValueId a, ValueId b, int axis);
  ValueId decimate2_time(ValueId x);   // (B,C,T) -> (B,C,T/2), even indices
  ValueId upsample2_time(ValueId x);   // (B,C,T) -> (B,C,2T), linear midpoints
  ValueId select_row(ValueId x, int64_t row);        // (N,D) -> (D)
  ValueId stack_rows(const std::vector<ValueId>& rows);  // N x (D) -> (N,D)
  ValueId mean_rows(ValueId x);                      // (N,D) -> (D)
  ValueId cnk_to_nd(ValueId x);               // (1,C,N,K) -> (N, C*K)
  ValueId nd_to_cnk(ValueId x, int64_t c, int64_t k);  // inverse
  ValueId broadcast_freq(ValueId v, int64_t frames);   // (K) -> (1,1,N,K)
  ValueId add_channel_bias(ValueId x, ValueId v);      // (1,C,N,K) + (C)

  // -- signal ops -----------------------------------------------------------
  ValueId stft(ValueId x, const StftConfig& cfg);          // (1,1,T)->(1,2,N,K)
  ValueId istft(ValueId s, const StftConfig& cfg, int64_t out_len);
  ValueId magnitude(ValueId s);                            // (1,2,N,K)->(1,1,N,K)
  // h: (1, 2*(2L+1)*(2I+1), N, K), x: (1,2,N,K) -> (1,2,N,K)
  ValueId deep_filter(ValueId h, ValueId x, int64_t L, int64_t I);

  // -- reductions -----------------------------------------------------------
  ValueId sum_sq_diff(ValueId a, ValueId b);  // scalar sum((a-b)^2)

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    std::function<void(Tape&)> backprop;
  };

  ValueId push(Tensor value, bool requires_grad);
  Tensor& grad_rw(ValueId id) { return nodes_[id].grad; }

  std::vector<Node> nodes_;
};

// GRU step (Cho formulation, reset gate applied to the recurrent term):
//   r = sigmoid(Wr x + Ur h + br)
//   z = sigmoid(Wz x + Uz h + bz)
//   n = tanh(Wn x + r * (Un h) + bn)
//   h' = (1 - z) * n + z * h
struct GruWeights {
  ValueId wr, ur, br;
  ValueId wz, uz, bz;
  ValueId wn, un, bn;
};
ValueId gru_cell(Tape& t, ValueId x, ValueId h, const GruWeights& w);

// LSTM step:
//   i = sigmoid(Wi x + Ui h + bi), f = sigmoid(Wf x + Uf h + bf)
//   g = tanh(Wg x + Ug h + bg),    o = sigmoid(Wo x + Uo h + bo)
//   c' = f * c + i * g,            h' = o * tanh(c')
struct LstmWeights {
  ValueId wi, ui, bi;
  ValueId wf, uf, bf;
  ValueId wg, ug, bg;
  ValueId wo, uo, bo;
};
struct LstmState {
  ValueId h, c;
};
LstmState lstm_cell(Tape& t, ValueId x, const LstmState& s,
                    const LstmWeights& w);

}  // namespace sfpro

#endif  // SFPRO_TAPE_HPP_
