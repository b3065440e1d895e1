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

#include "sfpro/kernels.hpp"

#include <algorithm>
#include <cstring>
#include <vector>

namespace sfpro {
namespace kernels {

namespace {
// Parallelism does not pay below this many inner-loop operations.
constexpr int64_t kOmpMinWork = 1 << 14;
constexpr double kWolaFloor = 1e-12;
}  // namespace

// ---------------------------------------------------------------------------
// conv1d
// ---------------------------------------------------------------------------

void conv1d_forward(const double* x, int64_t B, int64_t Ci, int64_t T,
                    const double* w, int64_t Co, int64_t K, int64_t stride,
                    int64_t pad, const double* bias, double* y, int64_t To) {
  const int64_t total = B * Co * To;
#pragma omp parallel for schedule(static) if (total * Ci * K > kOmpMinWork)
  for (int64_t idx = 0; idx < total; ++idx) {
    const int64_t b = idx / (Co * To);
    const int64_t co = (idx / To) % Co;
    const int64_t to = idx % To;
    double acc = bias ? bias[co] : 0.0;
    for (int64_t ci = 0; ci < Ci; ++ci) {
      const double* xr = x + (b * Ci + ci) * T;
      const double* wr = w + (co * Ci + ci) * K;
      const int64_t base = to * stride - pad;
      for (int64_t k = 0; k < K; ++k) {
        const int64_t t = base + k;
        if (t >= 0 && t < T) acc += xr[t] * wr[k];
      }
    }
    y[idx] = acc;
  }
}

void conv1d_backward_input(const double* dy, int64_t B, int64_t Co, int64_t To,
                           const double* w, int64_t Ci, int64_t K,
                           int64_t stride, int64_t pad, double* dx,
                           int64_t T) {
  const int64_t total = B * Ci * T;
#pragma omp parallel for schedule(static) if (total * Co * K > kOmpMinWork)
  for (int64_t idx = 0; idx < total; ++idx) {
    const int64_t b = idx / (Ci * T);
    const int64_t ci = (idx / T) % Ci;
    const int64_t t = idx % T;
    double acc = 0.0;
    for (int64_t co = 0; co < Co; ++co) {
      const double* dyr = dy + (b * Co + co) * To;
      const double* wr = w + (co * Ci + ci) * K;
      for (int64_t k = 0; k < K; ++k) {
        const int64_t num = t + pad - k;
        if (num < 0 || num % stride != 0) continue;
        const int64_t to = num / stride;
        if (to >= 0 && to < To) acc += wr[k] * dyr[to];
      }
    }
    dx[idx] += acc;
  }
}

void conv1d_backward_weight(const double* dy, int64_t B, int64_t Co,
                            int64_t To, const double* x, int64_t Ci, int64_t T,
                            int64_t K, int64_t stride, int64_t pad, double* dw,
                            double* dbias) {
  const int64_t total = Co * Ci * K;
#pragma omp parallel for schedule(static) if (total * B * To > kOmpMinWork)
  for (int64_t idx = 0; idx < total; ++idx) {
    const int64_t co = idx / (Ci * K);
    const int64_t ci = (idx / K) % Ci;
    const int64_t k = idx % K;
    double acc = 0.0;
    for (int64_t b = 0; b < B; ++b) {
      const double* dyr = dy + (b * Co + co) * To;
      const double* xr = x + (b * Ci + ci) * T;
      for (int64_t to = 0; to < To; ++to) {
        const int64_t t = to * stride + k - pad;
        if (t >= 0 && t < T) acc += dyr[to] * xr[t];
      }
    }
    dw[idx] += acc;
  }
  if (dbias) {
#pragma omp parallel for schedule(static) if (Co * B * To > kOmpMinWork)
    for (int64_t co = 0; co < Co; ++co) {
      double acc = 0.0;
      for (int64_t b = 0; b < B; ++b) {
        const double* dyr = dy + (b * Co + co) * To;
        for (int64_t to = 0; to < To; ++to) acc += dyr[to];
      }
      dbias[co] += acc;
    }
  }
}

// ---------------------------------------------------------------------------
// conv2d
// ---------------------------------------------------------------------------

void conv2d_forward(const double* x, int64_t B, int64_t Ci, int64_t H,
                    int64_t W, const double* w, int64_t Co, int64_t Kh,
                    int64_t Kw, int64_t sh, int64_t sw, int64_t ph, int64_t pw,
                    const double* bias, double* y, int64_t Ho, int64_t Wo) {
  const int64_t total = B * Co * Ho * Wo;
#pragma omp parallel for schedule(static) if (total * Ci * Kh * Kw > kOmpMinWork)
  for (int64_t idx = 0; idx < total; ++idx) {
    const int64_t b = idx / (Co * Ho * Wo);
    const int64_t co = (idx / (Ho * Wo)) % Co;
    const int64_t oh = (idx / Wo) % Ho;
    const int64_t ow = idx % Wo;
    double acc = bias ? bias[co] : 0.0;
    for (int64_t ci = 0; ci < Ci; ++ci) {
      const double* xp = x + ((b * Ci + ci) * H) * W;
      const double* wp = w + ((co * Ci + ci) * Kh) * Kw;
      for (int64_t kh = 0; kh < Kh; ++kh) {
        const int64_t ih = oh * sh + kh - ph;
        if (ih < 0 || ih >= H) continue;
        for (int64_t kw = 0; kw < Kw; ++kw) {
          const int64_t iw = ow * sw + kw - pw;
          if (iw >= 0 && iw < W) acc += xp[ih * W + iw] * wp[kh * Kw + kw];
        }
      }
    }
    y[idx] = acc;
  }
}

void conv2d_backward_input(const double* dy, int64_t B, int64_t Co, int64_t Ho,
                           int64_t Wo, const double* w, int64_t Ci, int64_t Kh,
                           int64_t Kw, int64_t sh, int64_t sw, int64_t ph,
                           int64_t pw, double* dx, int64_t H, int64_t W) {
  const int64_t total = B * Ci * H * W;
#pragma omp parallel for schedule(static) if (total * Co * Kh * Kw > kOmpMinWork)
  for (int64_t idx = 0; idx < total; ++idx) {
    const int64_t b = idx / (Ci * H * W);
    const int64_t ci = (idx / (H * W)) % Ci;
    const int64_t ih = (idx / W) % H;
    const int64_t iw = idx % W;
    double acc = 0.0;
    for (int64_t co = 0; co < Co; ++co) {
      const double* dyp = dy + ((b * Co + co) * Ho) * Wo;
      const double* wp = w + ((co * Ci + ci) * Kh) * Kw;
      for (int64_t kh = 0; kh < Kh; ++kh) {
        const int64_t nh = ih + ph - kh;
        if (nh < 0 || nh % sh != 0) continue;
        const int64_t oh = nh / sh;
        if (oh >= Ho) continue;
        for (int64_t kw = 0; kw < Kw; ++kw) {
          const int64_t nw = iw + pw - kw;
          if (nw < 0 || nw % sw != 0) continue;
          const int64_t ow = nw / sw;
          if (ow < Wo) acc += dyp[oh * Wo + ow] * wp[kh * Kw + kw];
        }
      }
    }
    dx[idx] += acc;
  }
}

void conv2d_backward_weight(const double* dy, int64_t B, int64_t Co,
                            int64_t Ho, int64_t Wo, const double* x,
                            int64_t Ci, int64_t H, int64_t W, int64_t Kh,
                            int64_t Kw, int64_t sh, int64_t sw, int64_t ph,
                            int64_t pw, double* dw, double* dbias) {
  const int64_t total = Co * Ci * Kh * Kw;
#pragma omp parallel for schedule(static) if (total * B * Ho * Wo > kOmpMinWork)
  for (int64_t idx = 0; idx < total; ++idx) {
    const int64_t co = idx / (Ci * Kh * Kw);
    const int64_t ci = (idx / (Kh * Kw)) % Ci;
    const int64_t kh = (idx / Kw) % Kh;
    const int64_t kw = idx % Kw;
    double acc = 0.0;
    for (int64_t b = 0; b < B; ++b) {
      const double* dyp = dy + ((b * Co + co) * Ho) * Wo;
      const double* xp = x + ((b * Ci + ci) * H) * W;
      for (int64_t oh = 0; oh < Ho; ++oh) {
        const int64_t ih = oh * sh + kh - ph;
        if (ih < 0 || ih >= H) continue;
        for (int64_t ow = 0; ow < Wo; ++ow) {
          const int64_t iw = ow * sw + kw - pw;
          if (iw >= 0 && iw < W) acc += dyp[oh * Wo + ow] * xp[ih * W + iw];
        }
      }
    }
    dw[idx] += acc;
  }
  if (dbias) {
#pragma omp parallel for schedule(static) if (Co * B * Ho * Wo > kOmpMinWork)
    for (int64_t co = 0; co < Co; ++co) {
      double acc = 0.0;
      for (int64_t b = 0; b < B; ++b) {
        const double* dyp = dy + ((b * Co + co) * Ho) * Wo;
        for (int64_t i = 0; i < Ho * Wo; ++i) acc += dyp[i];
      }
      dbias[co] += acc;
    }
  }
}

// ---------------------------------------------------------------------------
// transposed conv2d
// ---------------------------------------------------------------------------

void conv2d_transpose_forward(const double* x, int64_t B, int64_t Ci,
                              int64_t H, int64_t W, const double* w,
                              int64_t Co, int64_t Kh, int64_t Kw, int64_t sh,
                              int64_t sw, int64_t ph, int64_t pw,
                              const double* bias, double* y, int64_t Ho,
                              int64_t Wo) {
  const int64_t total = B * Co * Ho * Wo;
#pragma omp parallel for schedule(static) if (total * Ci * Kh * Kw > kOmpMinWork)
  for (int64_t idx = 0; idx < total; ++idx) {
    const int64_t b = idx / (Co * Ho * Wo);
    const int64_t co = (idx / (Ho * Wo)) % Co;
    const int64_t oh = (idx / Wo) % Ho;
    const int64_t ow = idx % Wo;
    double acc = bias ? bias[co] : 0.0;
    for (int64_t ci = 0; ci < Ci; ++ci) {
      const double* xp = x + ((b * Ci + ci) * H) * W;
      const double* wp = w + ((ci * Co + co) * Kh) * Kw;
      for (int64_t kh = 0; kh < Kh; ++kh) {
        const int64_t nh = oh + ph - kh;
        if (nh < 0 || nh % sh != 0) continue;
        const int64_t ih = nh / sh;
        if (ih >= H) continue;
        for (int64_t kw = 0; kw < Kw; ++kw) {
          const int64_t nw = ow + pw - kw;
          if (nw < 0 || nw % sw != 0) continue;
          const int64_t iw = nw / sw;
          if (iw < W) acc += xp[ih * W + iw] * wp[kh * Kw + kw];
        }
      }
    }
    y[idx] = acc;
  }
}

void conv2d_transpose_backward_input(const double* dy, int64_t B, int64_t Co,
                                     int64_t Ho, int64_t Wo, const double* w,
                                     int64_t Ci, int64_t Kh, int64_t Kw,
                                     int64_t sh, int64_t sw, int64_t ph,
                                     int64_t pw, double* dx, int64_t H,
                                     int64_t W) {
  const int64_t total = B * Ci * H * W;
#pragma omp parallel for schedule(static) if (total * Co * Kh * Kw > kOmpMinWork)
  for (int64_t idx = 0; idx < total; ++idx) {
    const int64_t b = idx / (Ci * H * W);
    const int64_t ci = (idx / (H * W)) % Ci;
    const int64_t ih = (idx / W) % H;
    const int64_t iw = idx % W;
    double acc = 0.0;
    for (int64_t co = 0; co < Co; ++co) {
      const double* dyp = dy + ((b * Co + co) * Ho) * Wo;
      const double* wp = w + ((ci * Co + co) * Kh) * Kw;
      for (int64_t kh = 0; kh < Kh; ++kh) {
        const int64_t oh = ih * sh + kh - ph;
        if (oh < 0 || oh >= Ho) continue;
        for (int64_t kw = 0; kw < Kw; ++kw) {
          const int64_t ow = iw * sw + kw - pw;
          if (ow >= 0 && ow < Wo) acc += dyp[oh * Wo + ow] * wp[kh * Kw + kw];
        }
      }
    }
    dx[idx] += acc;
  }
}

void conv2d_transpose_backward_weight(const double* dy, int64_t B, int64_t Co,
                                      int64_t Ho, int64_t Wo, const double* x,
                                      int64_t Ci, int64_t H, int64_t W,
                                      int64_t Kh, int64_t Kw, int64_t sh,
                                      int64_t sw, int64_t ph, int64_t pw,
                                      double* dw, double* dbias) {
  const int64_t total = Ci * Co * Kh * Kw;
#pragma omp parallel for schedule(static) if (total * B * H * W > kOmpMinWork)
  for (int64_t idx = 0; idx < total; ++idx) {
    const int64_t ci = idx / (Co * Kh * Kw);
    const int64_t co = (idx / (Kh * Kw)) % Co;
    const int64_t kh = (idx / Kw) % Kh;
    const int64_t kw = idx % Kw;
    double acc = 0.0;
    for (int64_t b = 0; b < B; ++b) {
      const double* dyp = dy + ((b * Co + co) * Ho) * Wo;
      const double* xp = x + ((b * Ci + ci) * H) * W;
      for (int64_t ih = 0; ih < H; ++ih) {
        const int64_t oh = ih * sh + kh - ph;
        if (oh < 0 || oh >= Ho) continue;
        for (int64_t iw = 0; iw < W; ++iw) {
          const int64_t ow = iw * sw + kw - pw;
          if (ow >= 0 && ow < Wo) acc += xp[ih * W + iw] * dyp[oh * Wo + ow];
        }
      }
    }
    dw[idx] += acc;
  }
  if (dbias) {
#pragma omp parallel for schedule(static) if (Co * B * Ho * Wo > kOmpMinWork)
    for (int64_t co = 0; co < Co; ++co) {
      double acc = 0.0;
      for (int64_t b = 0; b < B; ++b) {
        const double* dyp = dy + ((b * Co + co) * Ho) * Wo;
        for (int64_t i = 0; i < Ho * Wo; ++i) acc += dyp[i];
      }
      dbias[co] += acc;
    }
  }
}

// ---------------------------------------------------------------------------
// dense
// ---------------------------------------------------------------------------

void matmul(const double* a, int64_t m, int64_t k, const double* b, int64_t n,
            double* c) {
#pragma omp parallel for schedule(static) if (m * n * k > kOmpMinWork)
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int64_t l = 0; l < k; ++l) acc += a[i * k + l] * b[l * n + j];
      c[i * n + j] = acc;
    }
  }
}

void matvec(const double* w, int64_t p, int64_t n, const double* x,
            const double* bias, double* y) {
#pragma omp parallel for schedule(static) if (p * n > kOmpMinWork)
  for (int64_t i = 0; i < p; ++i) {
    double acc = bias ? bias[i] : 0.0;
    const double* wr = w + i * n;
    for (int64_t j = 0; j < n; ++j) acc += wr[j] * x[j];
    y[i] = acc;
  }
}

void matvec_backward(const double* w, int64_t p, int64_t n, const double* x,
                     const double* dy, double* dx, double* dw, double* dbias) {
  if (dx) {
#pragma omp parallel for schedule(static) if (p * n > kOmpMinWork)
    for (int64_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int64_t i = 0; i < p; ++i) acc += w[i * n + j] * dy[i];
      dx[j] += acc;
    }
  }
  if (dw) {
#pragma omp parallel for schedule(static) if (p * n > kOmpMinWork)
    for (int64_t i = 0; i < p; ++i) {
      double* dwr = dw + i * n;
      for (int64_t j = 0; j < n; ++j) dwr[j] += dy[i] * x[j];
    }
  }
  if (dbias)
    for (int64_t i = 0; i < p; ++i) dbias[i] += dy[i];
}

// ---------------------------------------------------------------------------
// deep filter
// ---------------------------------------------------------------------------

void deep_filter_forward(const double* h, const double* xre, const double* xim,
                         int64_t N, int64_t K, int64_t L, int64_t I,
                         double* yre, double* yim) {
  const int64_t Lt = 2 * L + 1, Li = 2 * I + 1;
  const int64_t plane = N * K;
#pragma omp parallel for schedule(static) if (plane * Lt * Li > kOmpMinWork)
  for (int64_t idx = 0; idx < plane; ++idx) {
    const int64_t n = idx / K;
    const int64_t k = idx % K;
    double re = 0.0, im = 0.0;
    for (int64_t lt = 0; lt < Lt; ++lt) {
      const int64_t sn = n - (lt - L);
      if (sn < 0 || sn >= N) continue;
      for (int64_t li = 0; li < Li; ++li) {
        const int64_t sk = k - (li - I);
        if (sk < 0 || sk >= K) continue;
        const double a = h[((lt * Li + li) * N + n) * K + k];
        const double b = h[(((Lt * Li) + lt * Li + li) * N + n) * K + k];
        const double u = xre[sn * K + sk];
        const double v = xim[sn * K + sk];
        re += a * u + b * v;
        im += a * v - b * u;
      }
    }
    yre[idx] = re;
    yim[idx] = im;
  }
}

void deep_filter_backward(const double* h, const double* xre,
                          const double* xim, const double* gre,
                          const double* gim, int64_t N, int64_t K, int64_t L,
                          int64_t I, double* dh, double* dxre, double* dxim) {
  const int64_t Lt = 2 * L + 1, Li = 2 * I + 1;
  const int64_t plane = N * K;
  if (dh) {
    const int64_t taps = Lt * Li;
#pragma omp parallel for schedule(static) if (plane * taps > kOmpMinWork)
    for (int64_t idx = 0; idx < taps * plane; ++idx) {
      const int64_t tap = idx / plane;
      const int64_t n = (idx % plane) / K;
      const int64_t k = idx % K;
      const int64_t lt = tap / Li, li = tap % Li;
      const int64_t sn = n - (lt - L);
      const int64_t sk = k - (li - I);
      if (sn < 0 || sn >= N || sk < 0 || sk >= K) continue;
      const double u = xre[sn * K + sk];
      const double v = xim[sn * K + sk];
      const double gr = gre[n * K + k];
      const double gi = gim[n * K + k];
      dh[idx] += gr * u + gi * v;
      dh[taps * plane + idx] += gr * v - gi * u;
    }
  }
  if (dxre) {
#pragma omp parallel for schedule(static) if (plane * Lt * Li > kOmpMinWork)
    for (int64_t idx = 0; idx < plane; ++idx) {
      const int64_t m = idx / K;
      const int64_t q = idx % K;
      double du = 0.0, dv = 0.0;
      for (int64_t lt = 0; lt < Lt; ++lt) {
        const int64_t n = m + (lt - L);
        if (n < 0 || n >= N) continue;
        for (int64_t li = 0; li < Li; ++li) {
          const int64_t k = q + (li - I);
          if (k < 0 || k >= K) continue;
          const double a = h[((lt * Li + li) * N + n) * K + k];
          const double b = h[(((Lt * Li) + lt * Li + li) * N + n) * K + k];
          const double gr = gre[n * K + k];
          const double gi = gim[n * K + k];
          du += gr * a - gi * b;
          dv += gr * b + gi * a;
        }
      }
      dxre[idx] += du;
      dxim[idx] += dv;
    }
  }
}

// ---------------------------------------------------------------------------
// STFT / iSTFT
// ---------------------------------------------------------------------------

void stft_forward(const double* x, int64_t len, const DftTables& t,
                  int64_t hop, int64_t num_frames, double* sre, double* sim) {
  (void)len;
  const int64_t F = t.fft_size, K = t.bins;
#pragma omp parallel for schedule(static) if (num_frames * K * F > kOmpMinWork)
  for (int64_t m = 0; m < num_frames; ++m) {
    std::vector<double> xw(F);
    const double* xp = x + m * hop;
    for (int64_t n = 0; n < F; ++n) xw[n] = xp[n] * t.window[n];
    for (int64_t k = 0; k < K; ++k) {
      const double* ck = t.cos_t.data() + k * F;
      const double* sk = t.sin_t.data() + k * F;
      double re = 0.0, im = 0.0;
      for (int64_t n = 0; n < F; ++n) {
        re += xw[n] * ck[n];
        im -= xw[n] * sk[n];
      }
      sre[m * K + k] = re;
      sim[m * K + k] = im;
    }
  }
}

void stft_adjoint(const double* dre, const double* dim, int64_t num_frames,
                  const DftTables& t, int64_t hop, double* dx, int64_t len) {
  const int64_t F = t.fft_size, K = t.bins;
#pragma omp parallel for schedule(static) if (len * K > kOmpMinWork)
  for (int64_t i = 0; i < len; ++i) {
    const int64_t m_lo = (i < F) ? 0 : (i - F) / hop + 1;
    const int64_t m_hi = std::min(num_frames - 1, i / hop);
    double acc = 0.0;
    for (int64_t m = m_lo; m <= m_hi; ++m) {
      const int64_t n = i - m * hop;
      const double wn = t.window[n];
      double g = 0.0;
      for (int64_t k = 0; k < K; ++k) {
        g += dre[m * K + k] * t.cos_t[k * F + n] -
             dim[m * K + k] * t.sin_t[k * F + n];
      }
      acc += wn * g;
    }
    dx[i] += acc;
  }
}

namespace {

// Per-frame inverse one-sided DFT: the real part of the Hermitian
// extension, so imaginary content at DC/Nyquist is discarded.
void frame_idft(const double* re, const double* im, const DftTables& t,
                double* out) {
  const int64_t F = t.fft_size, K = t.bins;
  const double inv = 1.0 / static_cast<double>(F);
  for (int64_t n = 0; n < F; ++n) {
    double acc = 0.0;
    for (int64_t k = 0; k < K; ++k) {
      const double c = (k == 0 || k == K - 1) ? 1.0 : 2.0;
      acc += c * (re[k] * t.cos_t[k * F + n] - im[k] * t.sin_t[k * F + n]);
    }
    out[n] = acc * inv;
  }
}

}  // namespace

void istft_wola(const double* sre, const double* sim, int64_t num_frames,
                const DftTables& t, int64_t hop, double* out,
                int64_t out_length) {
  const int64_t F = t.fft_size, K = t.bins;
  std::vector<double> frames(num_frames * F);
#pragma omp parallel for schedule(static) if (num_frames * F * K > kOmpMinWork)
  for (int64_t m = 0; m < num_frames; ++m)
    frame_idft(sre + m * K, sim + m * K, t, frames.data() + m * F);

#pragma omp parallel for schedule(static) if (out_length * F > kOmpMinWork)
  for (int64_t i = 0; i < out_length; ++i) {
    const int64_t m_lo = (i < F) ? 0 : (i - F) / hop + 1;
    const int64_t m_hi = std::min(num_frames - 1, i / hop);
    double num = 0.0, den = 0.0;
    for (int64_t m = m_lo; m <= m_hi; ++m) {
      const int64_t n = i - m * hop;
      const double wn = t.window[n];
      num += wn * frames[m * F + n];
      den += wn * wn;
    }
    out[i] = (den > kWolaFloor) ? num / den : 0.0;
  }
}

void istft_adjoint(const double* dout, int64_t out_length, int64_t num_frames,
                   const DftTables& t, int64_t hop, double* dre, double* dim) {
  const int64_t F = t.fft_size, K = t.bins;
  // Shared WOLA denominators, then per-frame adjoint of the inverse DFT.
  std::vector<double> den(out_length, 0.0);
#pragma omp parallel for schedule(static) if (out_length * 4 > kOmpMinWork)
  for (int64_t i = 0; i < out_length; ++i) {
    const int64_t m_lo = (i < F) ? 0 : (i - F) / hop + 1;
    const int64_t m_hi = std::min(num_frames - 1, i / hop);
    double d = 0.0;
    for (int64_t m = m_lo; m <= m_hi; ++m) {
      const double wn = t.window[i - m * hop];
      d += wn * wn;
    }
    den[i] = d;
  }

  const double inv = 1.0 / static_cast<double>(F);
#pragma omp parallel for schedule(static) if (num_frames * F * K > kOmpMinWork)
  for (int64_t m = 0; m < num_frames; ++m) {
    std::vector<double> dframe(F, 0.0);
    for (int64_t n = 0; n < F; ++n) {
      const int64_t i = m * hop + n;
      if (i >= out_length || den[i] <= kWolaFloor) continue;
      dframe[n] = dout[i] * t.window[n] / den[i];
    }
    for (int64_t k = 0; k < K; ++k) {
      const double c = ((k == 0 || k == K - 1) ? 1.0 : 2.0) * inv;
      double dr = 0.0, di = 0.0;
      for (int64_t n = 0; n < F; ++n) {
        dr += dframe[n] * c * t.cos_t[k * F + n];
        di -= dframe[n] * c * t.sin_t[k * F + n];
      }
      dre[m * K + k] += dr;
      dim[m * K + k] += di;
    }
  }
}

// ---------------------------------------------------------------------------
// serial reference implementations
// ---------------------------------------------------------------------------

namespace serial {

void conv1d_forward(const double* x, int64_t B, int64_t Ci, int64_t T,
                    const double* w, int64_t Co, int64_t K, int64_t stride,
                    int64_t pad, const double* bias, double* y, int64_t To) {
  for (int64_t b = 0; b < B; ++b)
    for (int64_t co = 0; co < Co; ++co)
      for (int64_t to = 0; to < To; ++to) {
        double acc = bias ? bias[co] : 0.0;
        for (int64_t ci = 0; ci < Ci; ++ci)
          for (int64_t k = 0; k < K; ++k) {
            const int64_t t = to * stride + k - pad;
            if (t >= 0 && t < T)
              acc += x[(b * Ci + ci) * T + t] * w[(co * Ci + ci) * K + k];
          }
        y[(b * Co + co) * To + to] = acc;
      }
}

void conv1d_backward_input(const double* dy, int64_t B, int64_t Co, int64_t To,
                           const double* w, int64_t Ci, int64_t K,
                           int64_t stride, int64_t pad, double* dx,
                           int64_t T) {
  // Scatter form: independent summation order from the parallel kernel.
  for (int64_t b = 0; b < B; ++b)
    for (int64_t co = 0; co < Co; ++co)
      for (int64_t to = 0; to < To; ++to) {
        const double g = dy[(b * Co + co) * To + to];
        for (int64_t ci = 0; ci < Ci; ++ci)
          for (int64_t k = 0; k < K; ++k) {
            const int64_t t = to * stride + k - pad;
            if (t >= 0 && t < T)
              dx[(b * Ci + ci) * T + t] += g * w[(co * Ci + ci) * K + k];
          }
      }
}

void conv1d_backward_weight(const double* dy, int64_t B, int64_t Co,
                            int64_t To, const double* x, int64_t Ci, int64_t T,
                            int64_t K, int64_t stride, int64_t pad, double* dw,
                            double* dbias) {
  for (int64_t b = 0; b < B; ++b)
    for (int64_t co = 0; co < Co; ++co)
      for (int64_t to = 0; to < To; ++to) {
        const double g = dy[(b * Co + co) * To + to];
        if (dbias) dbias[co] += g;
        for (int64_t ci = 0; ci < Ci; ++ci)
          for (int64_t k = 0; k < K; ++k) {
            const int64_t t = to * stride + k - pad;
            if (t >= 0 && t < T)
              dw[(co * Ci + ci) * K + k] += g * x[(b * Ci + ci) * T + t];
          }
      }
}

void conv2d_forward(const double* x, int64_t B, int64_t Ci, int64_t H,
                    int64_t W, const double* w, int64_t Co, int64_t Kh,
                    int64_t Kw, int64_t sh, int64_t sw, int64_t ph, int64_t pw,
                    const double* bias, double* y, int64_t Ho, int64_t Wo) {
  for (int64_t b = 0; b < B; ++b)
    for (int64_t co = 0; co < Co; ++co)
      for (int64_t oh = 0; oh < Ho; ++oh)
        for (int64_t ow = 0; ow < Wo; ++ow) {
          double acc = bias ? bias[co] : 0.0;
          for (int64_t ci = 0; ci < Ci; ++ci)
            for (int64_t kh = 0; kh < Kh; ++kh)
              for (int64_t kw = 0; kw < Kw; ++kw) {
                const int64_t ih = oh * sh + kh - ph;
                const int64_t iw = ow * sw + kw - pw;
                if (ih >= 0 && ih < H && iw >= 0 && iw < W)
                  acc += x[((b * Ci + ci) * H + ih) * W + iw] *
                         w[((co * Ci + ci) * Kh + kh) * Kw + kw];
              }
          y[((b * Co + co) * Ho + oh) * Wo + ow] = acc;
        }
}

void conv2d_transpose_forward(const double* x, int64_t B, int64_t Ci,
                              int64_t H, int64_t W, const double* w,
                              int64_t Co, int64_t Kh, int64_t Kw, int64_t sh,
                              int64_t sw, int64_t ph, int64_t pw,
                              const double* bias, double* y, int64_t Ho,
                              int64_t Wo) {
  // Textbook scatter form: every input pixel stamps a strided kernel copy.
  for (int64_t i = 0; i < B * Co * Ho * Wo; ++i)
    y[i] = bias ? bias[(i / (Ho * Wo)) % Co] : 0.0;
  for (int64_t b = 0; b < B; ++b)
    for (int64_t ci = 0; ci < Ci; ++ci)
      for (int64_t ih = 0; ih < H; ++ih)
        for (int64_t iw = 0; iw < W; ++iw) {
          const double xv = x[((b * Ci + ci) * H + ih) * W + iw];
          for (int64_t co = 0; co < Co; ++co)
            for (int64_t kh = 0; kh < Kh; ++kh)
              for (int64_t kw = 0; kw < Kw; ++kw) {
                const int64_t oh = ih * sh + kh - ph;
                const int64_t ow = iw * sw + kw - pw;
                if (oh >= 0 && oh < Ho && ow >= 0 && ow < Wo)
                  y[((b * Co + co) * Ho + oh) * Wo + ow] +=
                      xv * w[((ci * Co + co) * Kh + kh) * Kw + kw];
              }
        }
}

void matmul(const double* a, int64_t m, int64_t k, const double* b, int64_t n,
            double* c) {
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int64_t l = 0; l < k; ++l) acc += a[i * k + l] * b[l * n + j];
      c[i * n + j] = acc;
    }
}

void deep_filter_forward(const double* h, const double* xre, const double* xim,
                         int64_t N, int64_t K, int64_t L, int64_t I,
                         double* yre, double* yim) {
  const int64_t Lt = 2 * L + 1, Li = 2 * I + 1;
  for (int64_t n = 0; n < N; ++n)
    for (int64_t k = 0; k < K; ++k) {
      double re = 0.0, im = 0.0;
      for (int64_t lt = 0; lt < Lt; ++lt)
        for (int64_t li = 0; li < Li; ++li) {
          const int64_t sn = n - (lt - L);
          const int64_t sk = k - (li - I);
          if (sn < 0 || sn >= N || sk < 0 || sk >= K) continue;
          const double a = h[((lt * Li + li) * N + n) * K + k];
          const double b = h[(((Lt * Li) + lt * Li + li) * N + n) * K + k];
          re += a * xre[sn * K + sk] + b * xim[sn * K + sk];
          im += a * xim[sn * K + sk] - b * xre[sn * K + sk];
        }
      yre[n * K + k] = re;
      yim[n * K + k] = im;
    }
}

void stft_forward(const double* x, int64_t len, const DftTables& t,
                  int64_t hop, int64_t num_frames, double* sre, double* sim) {
  (void)len;
  const int64_t F = t.fft_size, K = t.bins;
  for (int64_t m = 0; m < num_frames; ++m)
    for (int64_t k = 0; k < K; ++k) {
      double re = 0.0, im = 0.0;
      for (int64_t n = 0; n < F; ++n) {
        const double xw = x[m * hop + n] * t.window[n];
        re += xw * t.cos_t[k * F + n];
        im -= xw * t.sin_t[k * F + n];
      }
      sre[m * K + k] = re;
      sim[m * K + k] = im;
    }
}

}  // namespace serial

}  // namespace kernels
}  // namespace sfpro
