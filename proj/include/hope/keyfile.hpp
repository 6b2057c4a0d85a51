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

#ifndef HOPE_KEYFILE_HPP_
#define HOPE_KEYFILE_HPP_

// Versioned JSON documents for keys:
//   public:     {version, kind:"public", n_hex}
//   private:    {version, kind:"private", p_hex, q_hex}
//   comparison: {version, kind:"comparison", ck0_hex, ck1_hex, m_bound_hex,
//                epoch, fingerprint_hex}
// Loading recomputes every derived quantity and rejects inconsistent files.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "hope/encoding.hpp"
#include "hope/error.hpp"
#include "hope/hope.hpp"
#include "hope/paillier.hpp"
#include "json.hpp"

namespace hope {

using Json = nlohmann::json;

inline constexpr int kKeyFileVersion = 1;

namespace detail {

inline const Json& RequireField(const Json& j, std::string_view name) {
  if (!j.is_object()) throw Error(ErrorCode::kCorruptFile, "expected a JSON object");
  auto it = j.find(name);
  if (it == j.end()) throw Error(ErrorCode::kCorruptFile, "missing field '" + std::string(name) + "'");
  return *it;
}

inline std::string RequireString(const Json& j, std::string_view name) {
  const Json& v = RequireField(j, name);
  if (!v.is_string()) throw Error(ErrorCode::kCorruptFile, "field '" + std::string(name) + "' must be a string");
  return v.get<std::string>();
}

inline std::uint64_t RequireUnsigned(const Json& j, std::string_view name) {
  const Json& v = RequireField(j, name);
  // Values built in memory are signed JSON integers; parsed ones are unsigned.
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw Error(ErrorCode::kCorruptFile, "field '" + std::string(name) + "' must be an unsigned integer");
  }
  return v.get<std::uint64_t>();
}

inline BigInt RequireHex(const Json& j, std::string_view name) {
  return ParseHex(RequireString(j, name));
}

inline void CheckHeader(const Json& j, std::string_view kind) {
  if (RequireUnsigned(j, "version") != kKeyFileVersion) {
    throw Error(ErrorCode::kVersionMismatch, "unsupported key file version");
  }
  if (RequireString(j, "kind") != kind) {
    throw Error(ErrorCode::kCorruptFile, "expected a " + std::string(kind) + " key");
  }
}

}  // namespace detail

inline Json PublicKeyToJson(const PublicKey& pk) {
  return Json{{"version", kKeyFileVersion}, {"kind", "public"}, {"n_hex", ToHex(pk.n())}};
}

inline PublicKey PublicKeyFromJson(const Json& j) {
  detail::CheckHeader(j, "public");
  return PublicKey(detail::RequireHex(j, "n_hex"));
}

inline Json PrivateKeyToJson(const PrivateKey& sk) {
  return Json{{"version", kKeyFileVersion},
              {"kind", "private"},
              {"p_hex", ToHex(sk.p())},
              {"q_hex", ToHex(sk.q())}};
}

inline PrivateKey PrivateKeyFromJson(const Json& j) {
  detail::CheckHeader(j, "private");
  return PrivateKey::FromPrimes(detail::RequireHex(j, "p_hex"), detail::RequireHex(j, "q_hex"));
}

inline Json ComparisonKeyToJson(const ComparisonKey& ck) {
  return Json{{"version", kKeyFileVersion},
              {"kind", "comparison"},
              {"ck0_hex", ToHex(ck.ck0)},
              {"ck1_hex", ToHex(ck.ck1)},
              {"m_bound_hex", ToHex(ck.bound_m)},
              {"epoch", ck.epoch},
              {"fingerprint_hex", FingerprintHex(ck.key_fingerprint)}};
}

// Parses without a public key; call ValidateComparisonKey before use.
inline ComparisonKey ComparisonKeyFromJson(const Json& j) {
  detail::CheckHeader(j, "comparison");
  ComparisonKey ck;
  ck.ck0 = detail::RequireHex(j, "ck0_hex");
  ck.ck1 = detail::RequireHex(j, "ck1_hex");
  ck.bound_m = detail::RequireHex(j, "m_bound_hex");
  ck.epoch = detail::RequireUnsigned(j, "epoch");
  ck.key_fingerprint = ParseFingerprint(detail::RequireString(j, "fingerprint_hex"));
  return ck;
}

inline ComparisonKey ComparisonKeyFromJson(const Json& j, const PublicKey& pk) {
  ComparisonKey ck = ComparisonKeyFromJson(j);
  ValidateComparisonKey(ck, pk);
  return ck;
}

inline std::string DumpDocument(const Json& j) { return j.dump(2) + "\n"; }

inline std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kCorruptFile, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void WriteTextFile(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kCorruptFile, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kCorruptFile, "short write to " + path.string());
}

inline Json ParseDocument(std::string_view text) {
  Json j = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw Error(ErrorCode::kCorruptFile, "not a JSON document");
  return j;
}

inline Json ReadDocument(const std::filesystem::path& path) {
  return ParseDocument(ReadTextFile(path));
}

inline PublicKey LoadPublicKey(const std::filesystem::path& path) {
  return PublicKeyFromJson(ReadDocument(path));
}

inline PrivateKey LoadPrivateKey(const std::filesystem::path& path) {
  return PrivateKeyFromJson(ReadDocument(path));
}

inline ComparisonKey LoadComparisonKey(const std::filesystem::path& path, const PublicKey& pk) {
  return ComparisonKeyFromJson(ReadDocument(path), pk);
}

}  // namespace hope

#endif  // HOPE_KEYFILE_HPP_
