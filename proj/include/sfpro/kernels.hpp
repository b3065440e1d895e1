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

#ifndef SFPRO_KERNELS_HPP_
#define SFPRO_KERNELS_HPP_

#include <cstdint>
#include <vector>

namespace sfpro {

// Precomputed one-sided DFT basis plus the analysis window.
// cos_t/sin_t are bins x fft_size, row-major.
struct DftTables {
  int64_t fft_size = 0;
  int64_t bins = 0;
  std::vector<double> cos_t;
  std::vector<double> sin_t;
  std::vector<double> window;
};

// Cached per fft_size; thread-safe.
const DftTables& dft_tables(int64_t fft_size);

namespace kernels {

// OpenMP-parallel kernels. Each output element is produced by exactly one
// loop iteration with a fixed-order inner reduction, so results are
// bit-identical across runs and thread counts. The serial:: namespace
// below keeps reference implementations (scatter-form where that gives an
// independent summation order) for tests and the kernel benchmark.

// -- 1-D convolution (cross-correlation), x: (B, Ci, T), w: (Co, Ci, K) --
void conv1d_forward(const double* x, int64_t B, int64_t Ci, int64_t T,
                    const double* w, int64_t Co, int64_t K, int64_t stride,
                    int64_t pad, const double* bias, double* y, int64_t To);
void conv1d_backward_input(const double* dy, int64_t B, int64_t Co,
                           int64_t To, const double* w, int64_t Ci, int64_t K,
                           int64_t stride, int64_t pad, double* dx, int64_t T);
void conv1d_backward_weight(const double* dy, int64_t B, int64_t Co,
                            int64_t To, const double* x, int64_t Ci, int64_t T,
                            int64_t K, int64_t stride, int64_t pad, double* dw,
                            double* dbias);

// -- 2-D convolution over (time, freq), x: (B, Ci, H, W), w: (Co, Ci, Kh, Kw)
void conv2d_forward(const double* x, int64_t B, int64_t Ci, int64_t H,
                    int64_t W, const double* w, int64_t Co, int64_t Kh,
                    int64_t Kw, int64_t sh, int64_t sw, int64_t ph, int64_t pw,
                    const double* bias, double* y, int64_t Ho, int64_t Wo);
void conv2d_backward_input(const double* dy, int64_t B, int64_t Co, int64_t Ho,
                           int64_t Wo, const double* w, int64_t Ci, int64_t Kh,
                           int64_t Kw, int64_t sh, int64_t sw, int64_t ph,
                           int64_t pw, double* dx, int64_t H, int64_t W);
void conv2d_backward_weight(const double* dy, int64_t B, int64_t Co,
                            int64_t Ho, int64_t Wo, const double* x,
                            int64_t Ci, int64_t H, int64_t W, int64_t Kh,
                            int64_t Kw, int64_t sh, int64_t sw, int64_t ph,
                            int64_t pw, double* dw, double* dbias);

// -- transposed 2-D convolution, x: (B, Ci, H, W), w: (Ci, Co, Kh, Kw) --
// Ho = (H-1)*sh - 2*ph + Kh, likewise Wo.
void conv2d_transpose_forward(const double* x, int64_t B, int64_t Ci,
                              int64_t H, int64_t W, const double* w,
                              int64_t Co, int64_t Kh, int64_t Kw, int64_t sh,
                              int64_t sw, int64_t ph, int64_t pw,
                              const double* bias, double* y, int64_t Ho,
                              int64_t Wo);
void conv2d_transpose_backward_input(const double* dy, int64_t B, int64_t Co,
                                     int64_t Ho, int64_t Wo, const double* w,
                                     int64_t Ci, int64_t Kh, int64_t Kw,
                                     int64_t sh, int64_t sw, int64_t ph,
                                     int64_t pw, double* dx, int64_t H,
                                     int64_t W);
void conv2d_transpose_backward_weight(const double* dy, int64_t B, int64_t Co,
                                      int64_t Ho, int64_t Wo, const double* x,
                                      int64_t Ci, int64_t H, int64_t W,
                                      int64_t Kh, int64_t Kw, int64_t sh,
                                      int64_t sw, int64_t ph, int64_t pw,
                                      double* dw, double* dbias);

// -- dense: c (m, n) = a (m, k) * b (k, n) --
void matmul(const double* a, int64_t m, int64_t k, const double* b, int64_t n,
            double* c);
// y (p) = W (p, n) * x (n) + bias (optional)
void matvec(const double* w, int64_t p, int64_t n, const double* x,
            const double* bias, double* y);
// dx (n) += W^T dy; dW += dy x^T; dbias += dy
void matvec_backward(const double* w, int64_t p, int64_t n, const double* x,
                     const double* dy, double* dx, double* dw, double* dbias);

// -- per-bin complex 2-D filtering --
// h: (2*Lt*Li, N, K) channel-major, real taps first then imaginary; tap
// (lt, li) maps to time offset l = lt - L and freq offset i = li - I.
// y(n,k) = sum conj(h) * x(n-l, k-i), zero outside the spectrogram.
void deep_filter_forward(const double* h, const double* xre, const double* xim,
                         int64_t N, int64_t K, int64_t L, int64_t I,
                         double* yre, double* yim);
void deep_filter_backward(const double* h, const double* xre,
                          const double* xim, const double* gre,
                          const double* gim, int64_t N, int64_t K, int64_t L,
                          int64_t I, double* dh, double* dxre, double* dxim);

// -- STFT analysis / WOLA synthesis and their adjoints --
void stft_forward(const double* x, int64_t len, const DftTables& t,
                  int64_t hop, int64_t num_frames, double* sre, double* sim);
void stft_adjoint(const double* dre, const double* dim, int64_t num_frames,
                  const DftTables& t, int64_t hop, double* dx, int64_t len);
void istft_wola(const double* sre, const double* sim, int64_t num_frames,
                const DftTables& t, int64_t hop, double* out,
                int64_t out_length);
void istft_adjoint(const double* dout, int64_t out_length, int64_t num_frames,
                   const DftTables& t, int64_t hop, double* dre, double* dim);

namespace serial {

void conv1d_forward(const double* x, int64_t B, int64_t Ci, int64_t T,
                    const double* w, int64_t Co, int64_t K, int64_t stride,
                    int64_t pad, const double* bias, double* y, int64_t To);
void conv1d_backward_input(const double* dy, int64_t B, int64_t Co,
                           int64_t To, const double* w, int64_t Ci, int64_t K,
                           int64_t stride, int64_t pad, double* dx, int64_t T);
void conv1d_backward_weight(const double* dy, int64_t B, int64_t Co,
                            int64_t To, const double* x, int64_t Ci, int64_t T,
                            int64_t K, int64_t stride, int64_t pad, double* dw,
                            double* dbias);
void conv2d_forward(const double* x, int64_t B, int64_t Ci, int64_t H,
                    int64_t W, const double* w, int64_t Co, int64_t Kh,
                    int64_t Kw, int64_t sh, int64_t sw, int64_t ph, int64_t pw,
                    const double* bias, double* y, int64_t Ho, int64_t Wo);
void conv2d_transpose_forward(const double* x, int64_t B, int64_t Ci,
                              int64_t H, int64_t W, const double* w,
                              int64_t Co, int64_t Kh, int64_t Kw, int64_t sh,
                              int64_t sw, int64_t ph, int64_t pw,
                              const double* bias, double* y, int64_t Ho,
                              int64_t Wo);
void matmul(const double* a, int64_t m, int64_t k, const double* b, int64_t n,
            double* c);
void deep_filter_forward(const double* h, const double* xre, const double* xim,
                         int64_t N, int64_t K, int64_t L, int64_t I,
                         double* yre, double* yim);
void stft_forward(const double* x, int64_t len, const DftTables& t,
                  int64_t hop, int64_t num_frames, double* sre, double* sim);

}  // namespace serial

}  // namespace kernels
}  // namespace sfpro

#endif  // SFPRO_KERNELS_HPP_
