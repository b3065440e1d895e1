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

#ifndef SFPRO_TENSOR_HPP_
#define SFPRO_TENSOR_HPP_

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "sfpro/common.hpp"

namespace sfpro {

// Dense row-major tensor of doubles.
struct Tensor {
  std::vector<int64_t> dims;
  std::vector<double> data;

  Tensor() = default;

  static Tensor zeros(std::vector<int64_t> d) {
    Tensor t;
    t.dims = std::move(d);
    t.data.assign(t.count(t.dims), 0.0);
    return t;
  }

  static Tensor from(std::vector<int64_t> d, std::vector<double> values) {
    Tensor t;
    t.dims = std::move(d);
    t.data = std::move(values);
    SFPRO_CHECK_ARG(t.count(t.dims) == static_cast<int64_t>(t.data.size()),
                    "tensor: dims do not match data length");
    return t;
  }

  static Tensor scalar(double v) { return from({1}, {v}); }

  int64_t numel() const { return static_cast<int64_t>(data.size()); }
  int64_t rank() const { return static_cast<int64_t>(dims.size()); }
  int64_t dim(int i) const { return dims[i]; }

  bool same_shape(const Tensor& o) const { return dims == o.dims; }

  std::string shape_str() const {
    std::string s = "(";
    for (size_t i = 0; i < dims.size(); ++i) {
      if (i) s += ", ";
      s += std::to_string(dims[i]);
    }
    return s + ")";
  }

 private:
  static int64_t count(const std::vector<int64_t>& d) {
    int64_t n = 1;
    for (int64_t v : d) n *= v;
    return n;
  }
};

}  // namespace sfpro

#endif  // SFPRO_TENSOR_HPP_
