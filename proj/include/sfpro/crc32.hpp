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

#ifndef SFPRO_CRC32_HPP_
#define SFPRO_CRC32_HPP_

#include <cstddef>
#include <cstdint>

namespace sfpro {

// CRC-32 (IEEE 802.3 polynomial), as used by PNG and the checkpoint trailer.
uint32_t crc32(const uint8_t* data, size_t len, uint32_t crc = 0);

}  // namespace sfpro

#endif  // SFPRO_CRC32_HPP_
