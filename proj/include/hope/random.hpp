/*
 * Copyright 2026 The HOPE Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef HOPE_RANDOM_HPP_
#define HOPE_RANDOM_HPP_

#include <openssl/rand.h>

#include <cstdint>
#include <random>
#include <span>

#include "hope/error.hpp"

namespace hope {

// Source of random bytes injected into every sampling routine. Instances are
// not required to be thread-safe; give each thread its own.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void Fill(std::span<std::uint8_t> out) = 0;
};

// Operating-system CSPRNG (via OpenSSL RAND_bytes). The default everywhere
// outside of tests.
class SecureRandom final : public RandomSource {
 public:
  void Fill(std::span<std::uint8_t> out) override {
    if (out.empty()) return;
    if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
      throw Error(ErrorCode::kExhausted, "RAND_bytes failed");
    }
  }
};

// Deterministic stream for known-answer tests and reproducible benchmarks.
// Not suitable for key material.
class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(std::uint64_t seed) : engine_(seed) {}

  void Fill(std::span<std::uint8_t> out) override {
    std::size_t i = 0;
    while (i < out.size()) {
      std::uint64_t word = engine_();
      for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
        out[i] = static_cast<std::uint8_t>(word >> (8 * b));
      }
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hope

#endif  // HOPE_RANDOM_HPP_
