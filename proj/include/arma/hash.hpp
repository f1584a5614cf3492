// Copyright 2026 The arma-planar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ARMA_HASH_HPP_
#define ARMA_HASH_HPP_

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace arma {

// Incremental 64-bit FNV-1a.
class Fnv1a {
 public:
  static constexpr uint64_t kOffset = 0xcbf29ce484222325ULL;
  static constexpr uint64_t kPrime = 0x100000001b3ULL;

  void update(const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= kPrime;
    }
  }
  void update(std::string_view s) { update(s.data(), s.size()); }
  uint64_t digest() const { return h_; }

 private:
  uint64_t h_ = kOffset;
};

inline uint64_t fnv1a(const void* data, size_t n) {
  Fnv1a h;
  h.update(data, n);
  return h.digest();
}

}  // namespace arma

#endif  // ARMA_HASH_HPP_
