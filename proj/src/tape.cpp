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

#include "sfpro/tape.hpp"

#include <cmath>

#include "sfpro/kernels.hpp"

namespace sfpro {

namespace {
constexpr int64_t kOmpMinElems = 1 << 14;
}

ValueId Tape::push(Tensor value, bool requires_grad) {
  Node n;
  n.requires_grad = requires_grad;
  if (requires_grad) n.grad = Tensor::zeros(value.dims);
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return static_cast<ValueId>(nodes_.size() - 1);
}

ValueId Tape::leaf(Tensor t, bool requires_grad) {
  return push(std::move(t), requires_grad);
}

void Tape::backward(ValueId root) {
  SFPRO_CHECK_ARG(nodes_[root].value.numel() == 1,
                  "backward: root must be scalar");
  SFPRO_CHECK_ARG(nodes_[root].requires_grad,
                  "backward: root does not require grad");
  nodes_[root].grad.data[0] = 1.0;
  for (ValueId i = root; i >= 0; --i) {
    if (nodes_[i].requires_grad && nodes_[i].backprop) nodes_[i].backprop(*this);
  }
}

// ---------------------------------------------------------------------------
// convolutions
// ---------------------------------------------------------------------------

ValueId Tape::conv1d(ValueId x, ValueId w, ValueId b, int64_t stride,
                     int64_t pad) {
  const Tensor& xv = value(x);
  const Tensor& wv = value(w);
  SFPRO_CHECK_ARG(xv.rank() == 3 && wv.rank() == 3,
                  "conv1d: expects x (B,Ci,T), w (Co,Ci,K)");
  const int64_t B = xv.dim(0), Ci = xv.dim(1), T = xv.dim(2);
  const int64_t Co = wv.dim(0), K = wv.dim(2);
  SFPRO_CHECK_ARG(wv.dim(1) == Ci, "conv1d: channel mismatch");
  const double* bias = nullptr;
  if (b != kNoValue) {
    SFPRO_CHECK_ARG(value(b).numel() == Co, "conv1d: bias size mismatch");
    bias = value(b).data.data();
  }
  const int64_t To = (T + 2 * pad - K) / stride + 1;
  SFPRO_CHECK_ARG(To >= 1, "conv1d: output would be empty");

  Tensor y = Tensor::zeros({B, Co, To});
  kernels::conv1d_forward(xv.data.data(), B, Ci, T, wv.data.data(), Co, K,
                          stride, pad, bias, y.data.data(), To);
  const bool rg = requires_grad(x) || requires_grad(w) ||
                  (b != kNoValue && requires_grad(b));
  ValueId out = push(std::move(y), rg);
  if (rg) {
    nodes_[out].backprop = [=](Tape& t) {
      const double* g = t.nodes_[out].grad.data.data();
      if (t.requires_grad(x))
        kernels::conv1d_backward_input(g, B, Co, To, t.value(w).data.data(),
                                       Ci, K, stride, pad,
                                       t.grad_rw(x).data.data(), T);
      if (t.requires_grad(w) || (b != kNoValue && t.requires_grad(b))) {
        double* dw = t.requires_grad(w) ? t.grad_rw(w).data.data() : nullptr;
        double* db = (b != kNoValue && t.requires_grad(b))
                         ? t.grad_rw(b).data.data()
                         : nullptr;
        if (dw)
          kernels::conv1d_backward_weight(g, B, Co, To, t.value(x).data.data(),
                                          Ci, T, K, stride, pad, dw, db);
        else if (db)
          for (int64_t bb = 0; bb < B; ++bb)
            for (int64_t co = 0; co < Co; ++co)
              for (int64_t to = 0; to < To; ++to)
                db[co] += g[(bb * Co + co) * To + to];
      }
    };
  }
  return out;
}

ValueId Tape::conv2d(ValueId x, ValueId w, ValueId b, int64_t sh, int64_t sw,
                     int64_t ph, int64_t pw) {
  const Tensor& xv = value(x);
  const Tensor& wv = value(w);
  SFPRO_CHECK_ARG(xv.rank() == 4 && wv.rank() == 4,
                  "conv2d: expects x (B,Ci,H,W), w (Co,Ci,Kh,Kw)");
  const int64_t B = xv.dim(0), Ci = xv.dim(1), H = xv.dim(2), W = xv.dim(3);
  const int64_t Co = wv.dim(0), Kh = wv.dim(2), Kw = wv.dim(3);
  SFPRO_CHECK_ARG(wv.dim(1) == Ci, "conv2d: channel mismatch");
  const double* bias = nullptr;
  if (b != kNoValue) {
    SFPRO_CHECK_ARG(value(b).numel() == Co, "conv2d: bias size mismatch");
    bias = value(b).data.data();
  }
  const int64_t Ho = (H + 2 * ph - Kh) / sh + 1;
  const int64_t Wo = (W + 2 * pw - Kw) / sw + 1;
  SFPRO_CHECK_ARG(Ho >= 1 && Wo >= 1, "conv2d: output would be empty");

  Tensor y = Tensor::zeros({B, Co, Ho, Wo});
  kernels::conv2d_forward(xv.data.data(), B, Ci, H, W, wv.data.data(), Co, Kh,
                          Kw, sh, sw, ph, pw, bias, y.data.data(), Ho, Wo);
  const bool rg = requires_grad(x) || requires_grad(w) ||
                  (b != kNoValue && requires_grad(b));
  ValueId out = push(std::move(y), rg);
  if (rg) {
    nodes_[out].backprop = [=](Tape& t) {
      const double* g = t.nodes_[out].grad.data.data();
      if (t.requires_grad(x))
        kernels::conv2d_backward_input(g, B, Co, Ho, Wo,
                                       t.value(w).data.data(), Ci, Kh, Kw, sh,
                                       sw, ph, pw, t.grad_rw(x).data.data(), H,
                                       W);
      if (t.requires_grad(w)) {
        double* db = (b != kNoValue && t.requires_grad(b))
                         ? t.grad_rw(b).data.data()
                         : nullptr;
        kernels::conv2d_backward_weight(g, B, Co, Ho, Wo,
                                        t.value(x).data.data(), Ci, H, W, Kh,
                                        Kw, sh, sw, ph, pw,
                                        t.grad_rw(w).data.data(), db);
      }
    };
  }
  return out;
}

ValueId Tape::conv2d_transpose(ValueId x, ValueId w, ValueId b, int64_t sh,
                               int64_t sw, int64_t ph, int64_t pw) {
  const Tensor& xv = value(x);
  const Tensor& wv = value(w);
  SFPRO_CHECK_ARG(xv.rank() == 4 && wv.rank() == 4,
                  "conv2d_transpose: expects x (B,Ci,H,W), w (Ci,Co,Kh,Kw)");
  const int64_t B = xv.dim(0), Ci = xv.dim(1), H = xv.dim(2), W = xv.dim(3);
  SFPRO_CHECK_ARG(wv.dim(0) == Ci, "conv2d_transpose: channel mismatch");
  const int64_t Co = wv.dim(1), Kh = wv.dim(2), Kw = wv.dim(3);
  const double* bias = nullptr;
  if (b != kNoValue) {
    SFPRO_CHECK_ARG(value(b).numel() == Co,
                    "conv2d_transpose: bias size mismatch");
    bias = value(b).data.data();
  }
  const int64_t Ho = (H - 1) * sh - 2 * ph + Kh;
  const int64_t Wo = (W - 1) * sw - 2 * pw + Kw;
  SFPRO_CHECK_ARG(Ho >= 1 && Wo >= 1, "conv2d_transpose: output would be empty");

  Tensor y = Tensor::zeros({B, Co, Ho, Wo});
  kernels::conv2d_transpose_forward(xv.data.data(), B, Ci, H, W,
                                    wv.data.data(), Co, Kh, Kw, sh, sw, ph, pw,
                                    bias, y.data.data(), Ho, Wo);
  const bool rg = requires_grad(x) || requires_grad(w) ||
                  (b != kNoValue && requires_grad(b));
  ValueId out = push(std::move(y), rg);
  if (rg) {
    nodes_[out].backprop = [=](Tape& t) {
      const double* g = t.nodes_[out].grad.data.data();
      if (t.requires_grad(x))
        kernels::conv2d_transpose_backward_input(
            g, B, Co, Ho, Wo, t.value(w).data.data(), Ci, Kh, Kw, sh, sw, ph,
            pw, t.grad_rw(x).data.data(), H, W);
      if (t.requires_grad(w)) {
        double* db = (b != kNoValue && t.requires_grad(b))
                         ? t.grad_rw(b).data.data()
                         : nullptr;
        kernels::conv2d_transpose_backward_weight(
            g, B, Co, Ho, Wo, t.value(x).data.data(), Ci, H, W, Kh, Kw, sh, sw,
            ph, pw, t.grad_rw(w).data.data(), db);
      }
    };
  }
  return out;
}

// ---------------------------------------------------------------------------
// dense / elementwise
// ---------------------------------------------------------------------------

ValueId Tape::linear(ValueId x, ValueId w, ValueId b) {
  const Tensor& xv = value(x);
  const Tensor& wv = value(w);
  SFPRO_CHECK_ARG(wv.rank() == 2, "linear: weight must be (p, n)");
  const int64_t p = wv.dim(0), n = wv.dim(1);
  SFPRO_CHECK_ARG(xv.numel() == n, "linear: input size mismatch");
  const double* bias = nullptr;
  if (b != kNoValue) {
    SFPRO_CHECK_ARG(value(b).numel() == p, "linear: bias size mismatch");
    bias = value(b).data.data();
  }
  Tensor y = Tensor::zeros({p});
  kernels::matvec(wv.data.data(), p, n, xv.data.data(), bias, y.data.data());
  const bool rg = requires_grad(x) || requires_grad(w) ||
                  (b != kNoValue && requires_grad(b));
  ValueId out = push(std::move(y), rg);
  if (rg) {
    nodes_[out].backprop = [=](Tape& t) {
      const double* g = t.nodes_[out].grad.data.data();
      double* dx = t.requires_grad(x) ? t.grad_rw(x).data.data() : nullptr;
      double* dw = t.requires_grad(w) ? t.grad_rw(w).data.data() : nullptr;
      double* db = (b != kNoValue && t.requires_grad(b))
                       ? t.grad_rw(b).data.data()
                       : nullptr;
      kernels::matvec_backward(t.value(w).data.data(), p, n,
                               t.value(x).data.data(), g, dx, dw, db);
    };
  }
  return out;
}

ValueId Tape::add(ValueId a, ValueId b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  SFPRO_CHECK_ARG(av.same_shape(bv), "add: shape mismatch " + av.shape_str() +
                                         " vs " + bv.shape_str());
  Tensor y = Tensor::zeros(av.dims);
  const int64_t n = y.numel();
#pragma omp parallel for schedule(static) if (n > kOmpMinElems)
  for (int64_t i = 0; i < n; ++i) y.data[i] = av.data[i] + bv.data[i];
  const bool rg = requires_grad(a) || requires_grad(b);
  ValueId out = push(std::move(y), rg);
  if (rg) {
    nodes_[out].backprop = [=](Tape& t) {
      const auto& g = t.nodes_[out].grad.data;
      if (t.requires_grad(a)) {
        auto& da = t.grad_rw(a).data;
        for (int64_t i = 0; i < n; ++i) da[i] += g[i];
      }
      if (t.requires_grad(b)) {
        auto& db = t.grad_rw(b).data;
        for (int64_t i = 0; i < n; ++i) db[i] += g[i];
      }
    };
  }
  return out;
}

ValueId Tape::sub(ValueId a, ValueId b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  SFPRO_CHECK_ARG(av.same_shape(bv), "sub: shape mismatch");
  Tensor y = Tensor::zeros(av.dims);
  const int64_t n = y.numel();
  for (int64_t i = 0; i < n; ++i) y.data[i] = av.data[i] - bv.data[i];
  const bool rg = requires_grad(a) || requires_grad(b);
  ValueId out = push(std::move(y), rg);
  if (rg) {
    nodes_[out].backprop = [=](Tape& t) {
      const auto& g = t.nodes_[out].grad.data;
      if (t.requires_grad(a)) {
        auto& da = t.grad_rw(a).data;
        for (int64_t i = 0; i < n; ++i) da[i] += g[i];
      }
      if (t.requires_grad(b)) {
        auto& db = t.grad_rw(b).data;
        for (int64_t i = 0; i < n; ++i) db[i] -= g[i];
      }
    };
  }
  return out;
}

ValueId Tape::mul(ValueId a, ValueId b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  SFPRO_CHECK_ARG(av.same_shape(bv), "mul: shape mismatch");
  Tensor y = Tensor::zeros(av.dims);
  const int64_t n = y.numel();
#pragma omp parallel for schedule(static) if (n > kOmpMinElems)
  for (int64_t i = 0; i < n; ++i) y.data[i] = av.data[i] * bv.data[i];
  const bool rg = requires_grad(a) || requires_grad(b);
  ValueId out = push(std::move(y), rg);
  if (rg) {
    nodes_[out].backprop = [=](Tape& t) {
      const auto& g = t.nodes_[out].grad.data;
      if (t.requires_grad(a)) {
        auto& da = t.grad_rw(a).data;
        const auto& vb = t.value(b).data;
        for (int64_t i = 0; i < n; ++i) da[i] += g[i] * vb[i];
      }
      if (t.requires_grad(b)) {
        auto& db = t.grad_rw(b).data;
        const auto& va = t.value(a).data;
        for (int64_t i = 0; i < n; ++i) db[i] += g[i] * va[i];
      }
    };
  }
  return out;
}

ValueId Tape::affine(ValueId x, double scale, double shift) {
  const Tensor& xv = value(x);
  Tensor y = Tensor::zeros(xv.dims);
  const int64_t n = y.numel();
  for (int64_t i = 0; i < n; ++i) y.data[i] = scale * xv.data[i] + shift;
  const bool rg = requires_grad(x);
  ValueId out = push(std::move(y), rg);
  if (rg) {
    nodes_[out].backprop = [=](Tape& t) {
      const auto& g = t.nodes_[out].grad.data;
      auto& dx = t.grad_rw(x).data;
      for (int64_t i = 0; i < n; ++i) dx[i] += scale * g[i];
    };
  }
  return out;
}

ValueId Tape::sigmoid(ValueId x) {
  const Tensor& xv = value(x);
  Tensor y = Tensor::zeros(xv.dims);
  const int64_t n = y.numel();
#pragma omp parallel for schedule(static) if (n > kOmpMinElems)
  for (int64_t i = 0; i < n; ++i) y.data[i] = 1.0 / (1.0 + std::exp(-xv.data[i]));
  const bool rg = requires_grad(x);
  ValueId out = push(std::move(y), rg);
  if (rg) {
    nodes_[out].backprop = [=](Tape& t) {
      const auto& g = t.nodes_[out].grad.data;
      const auto& yv = t.nodes_[out].value.data;
      auto& dx = t.grad_rw(x).data;
      for (int64_t i = 0; i < n; ++i) dx[i] += g[i] * yv[i] * (1.0 - yv[i]);
    };
  }
  return out;
}

ValueId Tape::tanh(ValueId x) {
  const Tensor& xv = value(x);
  Tensor y = Tensor::zeros(xv.dims);
  const int64_t n = y.numel();
#pragma omp parallel for schedule(static) if (n > kOmpMinElems)
  for (int64_t i = 0; i < n; ++i) y.data[i] = std::tanh(xv.data[i]);
  const bool rg = requires_grad(x);
  ValueId out = push(std::move(y), rg);
  if (rg) {
    nodes_[out].backprop = [=](Tape& t) {
      const auto& g = t.nodes_[out].grad.data;
      const auto& yv = t.nodes_[out].value.data;
      auto& dx = t.grad_rw(x).data;
      for (int64_t i = 0; i < n; ++i) dx[i] += g[i] * (1.0 - yv[i] * yv[i]);
    };
  }
  return out;
}

ValueId Tape::leaky_relu(ValueId x, double slope) {
  const Tensor& xv = value(x);
  Tensor y = Tensor::zeros(xv.dims);
  const int64_t n = y.numel();
#pragma omp parallel for schedule(static) if (n > kOmpMinElems)
  for (int64_t i = 0; i < n; ++i) {
    const double v = xv.data[i];
    y.data[i] = v > 0.0 ? v : slope * v;
  }
  const bool rg = requires_grad(x);
  ValueId out = push(std::move(y), rg);
  if (rg) {
    nodes_[out].backprop = [=](Tape& t) {
      const auto& g = t.nodes_[out].grad.data;
      const auto& vx = t.value(x).data;
      auto& dx = t.grad_rw(x).data;
      for (int64_t i = 0; i < n; ++i)
        dx[i] += g[i] * (vx[i] > 0.0 ? 1.0 : slope);
    };
  }
  return out;
}

// ---------------------------------------------------------------------------
// shape plumbing
// ---------------------------------------------------------------------------

ValueId Tape::concat(ValueId a, ValueId b, int axis) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  SFPRO_CHECK_ARG(av.rank() == bv.rank(), "concat: rank mismatch");
  SFPRO_CHECK_ARG(axis >= 0 && axis < av.rank(), "concat: bad axis");
  for (int i = 0; i < av.rank(); ++i)
    if (i != axis)
      SFPRO_CHECK_ARG(av.dim(i) == bv.dim(i), "concat: shape mismatch");

  int64_t outer = 1, inner = 1;
  for (int i = 0; i < axis; ++i) outer *= av.dim(i);
  for (int i = axis + 1; i < av.rank(); ++i) inner *= av.dim(i);
  const int64_t na = av.dim(axis), nb = bv.dim(axis);

  std::vector<int64_t> dims = av.dims;
  dims[axis] = na + nb;
  Tensor y = Tensor::zeros(dims);
  for (int64_t o = 0; o < outer; ++o) {
    double* dst = y.data.data() + o * (na + nb) * inner;
    const double* pa = av.data.data() + o * na * inner;
    const double* pb = bv.data.data() + o * nb * inner;
    std::copy(pa, pa + na * inner, dst);
    std::copy(pb, pb + nb * inner, dst + na * inner);
  }
  const bool rg = requires_grad(a) || requires_grad(b);
  ValueId out = push(std::move(y), rg);
  if (rg) {
    nodes_[out].backprop = [=](Tape& t) {
      const auto& g = t.nodes_[out].grad.data;
      for (int64_t o = 0; o < outer; ++o) {
        const double* gp = g.data() + o * (na + nb) * inner;
        if (t.requires_grad(a)) {
          auto& da = t.grad_rw(a).data;
          for (int64_t i = 0; i < na * inner; ++i)
            da[o * na * inner + i] += gp[i];
        }
        if (t.requires_grad(b)) {
          auto& db = t.grad_rw(b).data;
          for (int64_t i = 0; i < nb * inner; ++i)
            db[o * nb * inner + i] += gp[na * inner + i];
        }
      }
    };
  }
  return out;
}

ValueId Tape::decimate2_time(ValueId x) {
  const Tensor& xv = value(x);
  SFPRO_CHECK_ARG(xv.rank() == 3, "decimate2_time: expects (B,C,T)");
  const int64_t B = xv.dim(0), C = xv.dim(1), T = xv.dim(2);
  SFPRO_CHECK_ARG(T % 2 == 0, "decimate2_time: odd time length");
  const int64_t Th = T / 2;
  Tensor y = Tensor::zeros({B, C, Th});
  for (int64_t bc = 0; bc < B * C; ++bc)
    for (int64_t t = 0; t < Th; ++t)
      y.data[bc * Th + t] = xv.data[bc * T + 2 * t];
  const bool rg = requires_grad(x);
  ValueId out = push(std::move(y), rg);
  if (rg) {
    nodes_[out].backprop = [=](Tape& t) {
      const auto& g = t.nodes_[out].grad.data;
      auto& dx = t.grad_rw(x).data;
      for (int64_t bc = 0; bc < B * C; ++bc)
        for (int64_t i = 0; i < Th; ++i)
          dx[bc * T + 2 * i] += g[bc * Th + i];
    };
  }
  return out;
}

ValueId Tape::upsample2_time(ValueId x) {
  const Tensor& xv = value(x);
  SFPRO_CHECK_ARG(xv.rank() == 3, "upsample2_time: expects (B,C,T)");
  const int64_t B = xv.dim(0), C = xv.dim(1), T = xv.dim(2);
  Tensor y = Tensor::zeros({B, C, 2 * T});
  for (int64_t bc = 0; bc < B * C; ++bc) {
    const double* src = xv.data.data() + bc * T;
    double* dst = y.data.data() + bc * 2 * T;
    for (int64_t t = 0; t < T; ++t) {
      dst[2 * t] = src[t];
      dst[2 * t + 1] = (t + 1 < T) ? 0.5 * (src[t] + src[t + 1]) : src[t];
    }
  }
  const bool rg = requires_grad(x);
  ValueId out = push(std::move(y), rg);
  if (rg) {
    nodes_[out].backprop = [=](Tape& t) {
      const auto& g = t.nodes_[out].grad.data;
      auto& dx = t.grad_rw(x).data;
      for (int64_t bc = 0; bc < B * C; ++bc) {
        const double* gp = g.data() + bc * 2 * T;
        double* dp = dx.data() + bc * T;
        for (int64_t i = 0; i < T; ++i) {
          double acc = gp[2 * i];
          if (i + 1 < T)
            acc += 0.5 * gp[2 * i + 1];
          else
            acc += gp[2 * i + 1];
          if (i > 0) acc += 0.5 * gp[2 * i - 1];
          dp[i] += acc;
        }
      }
    };
  }
  return out;
}

ValueId Tape::select_row(ValueId x, int64_t row) {
  const Tensor& xv = value(x);
  SFPRO_CHECK_ARG(xv.rank() == 2, "select_row: expects (N,D)");
  const int64_t N = xv.dim(0), D = xv.dim(1);
  SFPRO_CHECK_ARG(row >= 0 && row < N, "select_row: row out of range");
  Tensor y = Tensor::zeros({D});
  std::copy(xv.data.begin() + row * D, xv.data.begin() + (row + 1) * D,
            y.data.begin());
  const bool rg = requires_grad(x);
  ValueId out = push(std::move(y), rg);
  if (rg) {
    nodes_[out].backprop = [=](Tape& t) {
      const auto& g = t.nodes_[out].grad.data;
      auto& dx = t.grad_rw(x).data;
      for (int64_t d = 0; d < D; ++d) dx[row * D + d] += g[d];
    };
  }
  return out;
}

ValueId Tape::stack_rows(const std::vector<ValueId>& rows) {
  SFPRO_CHECK_ARG(!rows.empty(), "stack_rows: empty input");
  const int64_t N = static_cast<int64_t>(rows.size());
  const int64_t D = value(rows[0]).numel();
  Tensor y = Tensor::zeros({N, D});
  bool rg = false;
  for (int64_t i = 0; i < N; ++i) {
    const Tensor& r = value(rows[i]);
    SFPRO_CHECK_ARG(r.numel() == D, "stack_rows: row size mismatch");
    std::copy(r.data.begin(), r.data.end(), y.data.begin() + i * D);
    rg = rg || requires_grad(rows[i]);
  }
  ValueId out = push(std::move(y), rg);
  if (rg) {
    std::vector<ValueId> ids = rows;
    nodes_[out].backprop = [=](Tape& t) {
      const auto& g = t.nodes_[out].grad.data;
      for (int64_t i = 0; i < N; ++i) {
        if (!t.requires_grad(ids[i])) continue;
        auto& dr = t.grad_rw(ids[i]).data;
        for (int64_t d = 0; d < D; ++d) dr[d] += g[i * D + d];
      }
    };
  }
  return out;
}

ValueId Tape::mean_rows(ValueId x) {
  const Tensor& xv = value(x);
  SFPRO_CHECK_ARG(xv.rank() == 2, "mean_rows: expects (N,D)");
  const int64_t N = xv.dim(0), D = xv.dim(1);
  Tensor y = Tensor::zeros({D});
  for (int64_t i = 0; i < N; ++i)
    for (int64_t d = 0; d < D; ++d) y.data[d] += xv.data[i * D + d];
  for (int64_t d = 0; d < D; ++d) y.data[d] /= static_cast<double>(N);
  const bool rg = requires_grad(x);
  ValueId out = push(std::move(y), rg);
  if (rg) {
    nodes_[out].backprop = [=](Tape& t) {
      const auto& g = t.nodes_[out].grad.data;
      auto& dx = t.grad_rw(x).data;
      const double inv = 1.0 / static_cast<double>(N);
      for (int64_t i = 0; i < N; ++i)
        for (int64_t d = 0; d < D; ++d) dx[i * D + d] += g[d] * inv;
    };
  }
  return out;
}

ValueId Tape::cnk_to_nd(ValueId x) {
  const Tensor& xv = value(x);
  SFPRO_CHECK_ARG(xv.rank() == 4 && xv.dim(0) == 1,
                  "cnk_to_nd: expects (1,C,N,K)");
  const int64_t C = xv.dim(1), N = xv.dim(2), K = xv.dim(3);
  Tensor y = Tensor::zeros({N, C * K});
  for (int64_t c = 0; c < C; ++c)
    for (int64_t n = 0; n < N; ++n)
      for (int64_t k = 0; k < K; ++k)
        y.data[n * C * K + c * K + k] = xv.data[(c * N + n) * K + k];
  const bool rg = requires_grad(x);
  ValueId out = push(std::move(y), rg);
  if (rg) {
    nodes_[out].backprop = [=](Tape& t) {
      const auto& g = t.nodes_[out].grad.data;
      auto& dx = t.grad_rw(x).data;
      for (int64_t c = 0; c < C; ++c)
        for (int64_t n = 0; n < N; ++n)
          for (int64_t k = 0; k < K; ++k)
            dx[(c * N + n) * K + k] += g[n * C * K + c * K + k];
    };
  }
  return out;
}

ValueId Tape::nd_to_cnk(ValueId x, int64_t c, int64_t k) {
  const Tensor& xv = value(x);
  SFPRO_CHECK_ARG(xv.rank() == 2 && xv.dim(1) == c * k,
                  "nd_to_cnk: expects (N, C*K)");
  const int64_t N = xv.dim(0);
  Tensor y = Tensor::zeros({1, c, N, k});
  for (int64_t ci = 0; ci < c; ++ci)
    for (int64_t n = 0; n < N; ++n)
      for (int64_t ki = 0; ki < k; ++ki)
        y.data[(ci * N + n) * k + ki] = xv.data[n * c * k + ci * k + ki];
  const bool rg = requires_grad(x);
  ValueId out = push(std::move(y), rg);
  if (rg) {
    nodes_[out].backprop = [=](Tape& t) {
      const auto& g = t.nodes_[out].grad.data;
      auto& dx = t.grad_rw(x).data;
      for (int64_t ci = 0; ci < c; ++ci)
        for (int64_t n = 0; n < N; ++n)
          for (int64_t ki = 0; ki < k; ++ki)
            dx[n * c * k + ci * k + ki] += g[(ci * N + n) * k + ki];
    };
  }
  return out;
}

ValueId Tape::broadcast_freq(ValueId v, int64_t frames) {
  const Tensor& vv = value(v);
  SFPRO_CHECK_ARG(vv.rank() == 1, "broadcast_freq: expects (K)");
  const int64_t K = vv.dim(0);
  Tensor y = Tensor::zeros({1, 1, frames, K});
  for (int64_t n = 0; n < frames; ++n)
    std::copy(vv.data.begin(), vv.data.end(), y.data.begin() + n * K);
  const bool rg = requires_grad(v);
  ValueId out = push(std::move(y), rg);
  if (rg) {
    nodes_[out].backprop = [=](Tape& t) {
      const auto& g = t.nodes_[out].grad.data;
      auto& dv = t.grad_rw(v).data;
      for (int64_t n = 0; n < frames; ++n)
        for (int64_t k = 0; k < K; ++k) dv[k] += g[n * K + k];
    };
  }
  return out;
}

ValueId Tape::add_channel_bias(ValueId x, ValueId v) {
  const Tensor& xv = value(x);
  const Tensor& vv = value(v);
  SFPRO_CHECK_ARG(xv.rank() == 4 && xv.dim(0) == 1,
                  "add_channel_bias: expects (1,C,N,K)");
  const int64_t C = xv.dim(1), N = xv.dim(2), K = xv.dim(3);
  SFPRO_CHECK_ARG(vv.numel() == C, "add_channel_bias: channel mismatch");
  Tensor y = Tensor::zeros(xv.dims);
  for (int64_t c = 0; c < C; ++c)
    for (int64_t i = 0; i < N * K; ++i)
      y.data[c * N * K + i] = xv.data[c * N * K + i] + vv.data[c];
  const bool rg = requires_grad(x) || requires_grad(v);
  ValueId out = push(std::move(y), rg);
  if (rg) {
    nodes_[out].backprop = [=](Tape& t) {
      const auto& g = t.nodes_[out].grad.data;
      if (t.requires_grad(x)) {
        auto& dx = t.grad_rw(x).data;
        for (int64_t i = 0; i < C * N * K; ++i) dx[i] += g[i];
      }
      if (t.requires_grad(v)) {
        auto& dv = t.grad_rw(v).data;
        for (int64_t c = 0; c < C; ++c) {
          double acc = 0.0;
          for (int64_t i = 0; i < N * K; ++i) acc += g[c * N * K + i];
          dv[c] += acc;
        }
      }
    };
  }
  return out;
}

// ---------------------------------------------------------------------------
// signal ops
// ---------------------------------------------------------------------------

ValueId Tape::stft(ValueId x, const StftConfig& cfg) {
  const Tensor& xv = value(x);
  SFPRO_CHECK_ARG(xv.rank() == 3 && xv.dim(0) == 1 && xv.dim(1) == 1,
                  "stft op: expects (1,1,T)");
  const int64_t T = xv.dim(2);
  SFPRO_CHECK_ARG(T >= cfg.fft_size, "stft op: signal shorter than one frame");
  const int64_t N = cfg.num_frames(T), K = cfg.bins();
  const DftTables& tables = dft_tables(cfg.fft_size);
  Tensor y = Tensor::zeros({1, 2, N, K});
  kernels::stft_forward(xv.data.data(), T, tables, cfg.hop, N, y.data.data(),
                        y.data.data() + N * K);
  const bool rg = requires_grad(x);
  ValueId out = push(std::move(y), rg);
  if (rg) {
    const int64_t hop = cfg.hop;
    const int64_t fft = cfg.fft_size;
    nodes_[out].backprop = [=](Tape& t) {
      const auto& g = t.nodes_[out].grad.data;
      kernels::stft_adjoint(g.data(), g.data() + N * K, N, dft_tables(fft),
                            hop, t.grad_rw(x).data.data(), T);
    };
  }
  return out;
}

ValueId Tape::istft(ValueId s, const StftConfig& cfg, int64_t out_len) {
  const Tensor& sv = value(s);
  SFPRO_CHECK_ARG(sv.rank() == 4 && sv.dim(0) == 1 && sv.dim(1) == 2,
                  "istft op: expects (1,2,N,K)");
  const int64_t N = sv.dim(2), K = sv.dim(3);
  SFPRO_CHECK_ARG(K == cfg.bins(), "istft op: bins != fft_size/2+1");
  const DftTables& tables = dft_tables(cfg.fft_size);
  Tensor y = Tensor::zeros({1, 1, out_len});
  kernels::istft_wola(sv.data.data(), sv.data.data() + N * K, N, tables,
                      cfg.hop, y.data.data(), out_len);
  const bool rg = requires_grad(s);
  ValueId out = push(std::move(y), rg);
  if (rg) {
    const int64_t hop = cfg.hop;
    const int64_t fft = cfg.fft_size;
    nodes_[out].backprop = [=](Tape& t) {
      const auto& g = t.nodes_[out].grad.data;
      auto& ds = t.grad_rw(s).data;
      kernels::istft_adjoint(g.data(), out_len, N, dft_tables(fft), hop,
                             ds.data(), ds.data() + N * K);
    };
  }
  return out;
}

ValueId Tape::magnitude(ValueId s) {
  const Tensor& sv = value(s);
  SFPRO_CHECK_ARG(sv.rank() == 4 && sv.dim(0) == 1 && sv.dim(1) == 2,
                  "magnitude op: expects (1,2,N,K)");
  const int64_t N = sv.dim(2), K = sv.dim(3);
  const int64_t plane = N * K;
  Tensor y = Tensor::zeros({1, 1, N, K});
  for (int64_t i = 0; i < plane; ++i) {
    const double re = sv.data[i], im = sv.data[plane + i];
    y.data[i] = std::sqrt(re * re + im * im);
  }
  const bool rg = requires_grad(s);
  ValueId out = push(std::move(y), rg);
  if (rg) {
    nodes_[out].backprop = [=](Tape& t) {
      const auto& g = t.nodes_[out].grad.data;
      const auto& yv = t.nodes_[out].value.data;
      const auto& sv2 = t.value(s).data;
      auto& ds = t.grad_rw(s).data;
      for (int64_t i = 0; i < plane; ++i) {
        if (yv[i] < 1e-300) continue;  // subgradient 0 at the origin
        ds[i] += g[i] * sv2[i] / yv[i];
        ds[plane + i] += g[i] * sv2[plane + i] / yv[i];
      }
    };
  }
  return out;
}

ValueId Tape::deep_filter(ValueId h, ValueId x, int64_t L, int64_t I) {
  const Tensor& hv = value(h);
  const Tensor& xv = value(x);
  SFPRO_CHECK_ARG(xv.rank() == 4 && xv.dim(0) == 1 && xv.dim(1) == 2,
                  "deep_filter op: x must be (1,2,N,K)");
  const int64_t N = xv.dim(2), K = xv.dim(3);
  const int64_t taps = (2 * L + 1) * (2 * I + 1);
  SFPRO_CHECK_ARG(hv.rank() == 4 && hv.dim(0) == 1 && hv.dim(1) == 2 * taps &&
                      hv.dim(2) == N && hv.dim(3) == K,
                  "deep_filter op: H shape mismatch");
  Tensor y = Tensor::zeros({1, 2, N, K});
  kernels::deep_filter_forward(hv.data.data(), xv.data.data(),
                               xv.data.data() + N * K, N, K, L, I,
                               y.data.data(), y.data.data() + N * K);
  const bool rg = requires_grad(h) || requires_grad(x);
  ValueId out = push(std::move(y), rg);
  if (rg) {
    nodes_[out].backprop = [=](Tape& t) {
      const auto& g = t.nodes_[out].grad.data;
      double* dh = t.requires_grad(h) ? t.grad_rw(h).data.data() : nullptr;
      double* dxre = t.requires_grad(x) ? t.grad_rw(x).data.data() : nullptr;
      double* dxim = dxre ? dxre + N * K : nullptr;
      kernels::deep_filter_backward(
          t.value(h).data.data(), t.value(x).data.data(),
          t.value(x).data.data() + N * K, g.data(), g.data() + N * K, N, K, L,
          I, dh, dxre, dxim);
    };
  }
  return out;
}

ValueId Tape::sum_sq_diff(ValueId a, ValueId b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  SFPRO_CHECK_ARG(av.same_shape(bv), "sum_sq_diff: shape mismatch " +
                                         av.shape_str() + " vs " +
                                         bv.shape_str());
  const int64_t n = av.numel();
  double acc = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    const double d = av.data[i] - bv.data[i];
    acc += d * d;
  }
  const bool rg = requires_grad(a) || requires_grad(b);
  ValueId out = push(Tensor::scalar(acc), rg);
  if (rg) {
    nodes_[out].backprop = [=](Tape& t) {
      const double g = t.nodes_[out].grad.data[0];
      const auto& va = t.value(a).data;
      const auto& vb = t.value(b).data;
      if (t.requires_grad(a)) {
        auto& da = t.grad_rw(a).data;
        for (int64_t i = 0; i < n; ++i)
          da[i] += 2.0 * g * (va[i] - vb[i]);
      }
      if (t.requires_grad(b)) {
        auto& db = t.grad_rw(b).data;
        for (int64_t i = 0; i < n; ++i)
          db[i] -= 2.0 * g * (va[i] - vb[i]);
      }
    };
  }
  return out;
}

// ---------------------------------------------------------------------------
// recurrent cells
// ---------------------------------------------------------------------------

ValueId gru_cell(Tape& t, ValueId x, ValueId h, const GruWeights& w) {
  ValueId r = t.sigmoid(t.add(t.linear(x, w.wr, w.br), t.linear(h, w.ur, kNoValue)));
  ValueId z = t.sigmoid(t.add(t.linear(x, w.wz, w.bz), t.linear(h, w.uz, kNoValue)));
  ValueId n = t.tanh(
      t.add(t.linear(x, w.wn, w.bn), t.mul(r, t.linear(h, w.un, kNoValue))));
  // h' = (1-z)*n + z*h
  return t.add(t.mul(t.affine(z, -1.0, 1.0), n), t.mul(z, h));
}

LstmState lstm_cell(Tape& t, ValueId x, const LstmState& s,
                    const LstmWeights& w) {
  ValueId i = t.sigmoid(t.add(t.linear(x, w.wi, w.bi), t.linear(s.h, w.ui, kNoValue)));
  ValueId f = t.sigmoid(t.add(t.linear(x, w.wf, w.bf), t.linear(s.h, w.uf, kNoValue)));
  ValueId g = t.tanh(t.add(t.linear(x, w.wg, w.bg), t.linear(s.h, w.ug, kNoValue)));
  ValueId o = t.sigmoid(t.add(t.linear(x, w.wo, w.bo), t.linear(s.h, w.uo, kNoValue)));
  LstmState out;
  out.c = t.add(t.mul(f, s.c), t.mul(i, g));
  out.h = t.mul(o, t.tanh(out.c));
  return out;
}

}  // namespace sfpro
