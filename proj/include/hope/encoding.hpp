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

#ifndef HOPE_ENCODING_HPP_
#define HOPE_ENCODING_HPP_

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hope/error.hpp"
#include "hope/numtheory.hpp"

namespace hope {

using Fingerprint = std::array<std::uint8_t, 16>;

// Big integers travel as lowercase hexadecimal without leading zeros; zero
// is "0".
inline std::string ToHex(const BigInt& x) {
  if (x < 0) throw Error(ErrorCode::kInvalidArgument, "hex encoding takes non-negative values");
  return x.get_str(16);
}

inline BigInt ParseHex(std::string_view text) {
  if (text.empty()) throw Error(ErrorCode::kBadEncoding, "empty hex string");
  if (text.size() > 1 && text[0] == '0') {
    throw Error(ErrorCode::kBadEncoding, "hex string has leading zeros");
  }
  for (char c : text) {
    bool ok = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    if (!ok) throw Error(ErrorCode::kBadEncoding, "invalid hex digit in '" + std::string(text) + "'");
  }
  return BigInt(std::string(text), 16);
}

inline std::string BytesToHex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

inline std::vector<std::uint8_t> HexToBytes(std::string_view text) {
  if (text.size() % 2 != 0) throw Error(ErrorCode::kBadEncoding, "odd-length byte string");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    throw Error(ErrorCode::kBadEncoding, "invalid hex digit");
  };
  std::vector<std::uint8_t> out(text.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(nibble(text[2 * i]) << 4 | nibble(text[2 * i + 1]));
  }
  return out;
}

inline std::string Base64Encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  int written = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(written));
  return out;
}

inline std::vector<std::uint8_t> Base64Decode(std::string_view text) {
  if (text.size() % 4 != 0) throw Error(ErrorCode::kBadEncoding, "base64 length not a multiple of 4");
  std::size_t padding = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    bool alpha = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                 c == '+' || c == '/';
    if (c == '=') {
      if (i + 2 < text.size()) throw Error(ErrorCode::kBadEncoding, "misplaced base64 padding");
      ++padding;
    } else if (!alpha || padding != 0) {
      throw Error(ErrorCode::kBadEncoding, "invalid base64 character");
    }
  }
  std::vector<std::uint8_t> out(text.size() / 4 * 3);
  if (text.empty()) return out;
  int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                          static_cast<int>(text.size()));
  if (n < 0) throw Error(ErrorCode::kBadEncoding, "invalid base64");
  out.resize(static_cast<std::size_t>(n) - padding);
  return out;
}

// First 16 bytes of SHA-256 over the big-endian bytes of the modulus.
inline Fingerprint FingerprintOf(const BigInt& modulus) {
  std::vector<std::uint8_t> bytes = ToBytes(modulus);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kExhausted, "SHA-256 failed");
  }
  Fingerprint fp{};
  std::copy_n(digest.begin(), fp.size(), fp.begin());
  return fp;
}

inline std::string FingerprintHex(const Fingerprint& fp) { return BytesToHex(fp); }

inline Fingerprint ParseFingerprint(std::string_view text) {
  std::vector<std::uint8_t> bytes = HexToBytes(text);
  if (bytes.size() != 16) throw Error(ErrorCode::kBadEncoding, "fingerprint must be 16 bytes");
  Fingerprint fp{};
  std::copy(bytes.begin(), bytes.end(), fp.begin());
  return fp;
}

}  // namespace hope

#endif  // HOPE_ENCODING_HPP_
