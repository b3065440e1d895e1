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

#ifndef SFPRO_COMMON_HPP_
#define SFPRO_COMMON_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sfpro {

// Errors carry a distinct message per failure mode; callers match on text.
#define SFPRO_CHECK(cond, msg)                 \
  do {                                         \
    if (!(cond)) throw std::runtime_error(msg); \
  } while (0)

#define SFPRO_CHECK_ARG(cond, msg)                \
  do {                                            \
    if (!(cond)) throw std::invalid_argument(msg); \
  } while (0)

}  // namespace sfpro

#endif  // SFPRO_COMMON_HPP_
