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

#ifndef HOPE_KAT_HPP_
#define HOPE_KAT_HPP_

// Known-answer vectors over the toy key p = 5, q = 7 (n = 35), generated
// from a seeded stream so that the same seed always yields the same bytes.

#include <cstdint>
#include <string>
#include <vector>

#include "hope/encoding.hpp"
#include "hope/hope.hpp"
#include "hope/keyfile.hpp"
#include "hope/paillier.hpp"
#include "hope/random.hpp"

namespace hope {

inline constexpr std::uint64_t kKatVersion = 1;

namespace detail {

inline long ToLong(const BigInt& x) { return x.get_si(); }

}  // namespace detail

inline Json GenerateKat(std::uint64_t seed) {
  const InsecureTestMode mode;
  SeededRandom rng(seed);
  KeyPair keys = insecure::KeyPairFromPrimes(mode, 5, 7);
  const PublicKey& pk = keys.public_key;
  const PrivateKey& sk = keys.private_key;
  const BigInt& n = pk.n();

  Json kat{{"version", kKatVersion},
           {"seed", seed},
           {"p_hex", ToHex(sk.p())},
           {"q_hex", ToHex(sk.q())},
           {"n_hex", ToHex(n)},
           {"phi_hex", ToHex(sk.phi())},
           {"phi_inv_hex", ToHex(sk.phi_inv())}};

  std::vector<Ciphertext> cts;
  std::vector<long> plains;
  Json enc = Json::array();
  for (long m = -detail::ToLong(pk.half()); m < detail::ToLong(n - pk.half()); ++m) {
    BigInt r = RandomCoprime(n, n, rng);
    Ciphertext c = insecure::EncryptWith(mode, m, pk, r);
    enc.push_back(Json{{"m", m}, {"r_hex", ToHex(r)}, {"c_hex", ToHex(c.value())}});
    cts.push_back(c);
    plains.push_back(m);
  }
  kat["encrypt"] = std::move(enc);

  Json add = Json::array(), sub = Json::array();
  for (int i = 0; i < 16; ++i) {
    std::size_t a = static_cast<std::size_t>(RandomBelow(cts.size(), rng).get_ui());
    std::size_t b = static_cast<std::size_t>(RandomBelow(cts.size(), rng).get_ui());
    Ciphertext s = EvalAdd(cts[a], cts[b]);
    Ciphertext d = EvalSub(cts[a], cts[b]);
    add.push_back(Json{{"a_hex", ToHex(cts[a].value())},
                       {"b_hex", ToHex(cts[b].value())},
                       {"result_hex", ToHex(s.value())},
                       {"plain", detail::ToLong(Decrypt(s, sk))}});
    sub.push_back(Json{{"a_hex", ToHex(cts[a].value())},
                       {"b_hex", ToHex(cts[b].value())},
                       {"result_hex", ToHex(d.value())},
                       {"plain", detail::ToLong(Decrypt(d, sk))}});
  }
  kat["add"] = std::move(add);
  kat["sub"] = std::move(sub);

  const BigInt bound = 2;
  std::vector<insecure::ComparisonKeyParams> params = {{2, 3, 11}};
  for (int i = 0; i < 3; ++i) {
    insecure::ComparisonKeyParams p;
    p.zeta = RandomCoprime(n, n, rng);
    p.eta = RandomCoprime(n, MaxBlindingFactor(n, bound) + 1, rng);
    p.eta0 = RandomCoprime(n, n, rng);
    params.push_back(p);
  }
  Json keys_json = Json::array(), cmp = Json::array();
  for (std::size_t k = 0; k < params.size(); ++k) {
    ComparisonKey ck = insecure::ComparisonKeyFromParams(mode, sk, bound, params[k]);
    keys_json.push_back(Json{{"zeta_hex", ToHex(params[k].zeta)},
                             {"eta_hex", ToHex(params[k].eta)},
                             {"eta0_hex", ToHex(params[k].eta0)},
                             {"m_bound_hex", ToHex(bound)},
                             {"ck0_hex", ToHex(ck.ck0)},
                             {"ck0_mod_n_hex", ToHex(Mod(ck.ck0, n))},
                             {"ck1_hex", ToHex(ck.ck1)}});
    for (long a = -2; a <= 2; ++a) {
      for (long b = -2; b <= 2; ++b) {
        Ciphertext ca = Encrypt(a, pk, rng);
        Ciphertext cb = Encrypt(b, pk, rng);
        CmpResult r = EvalCmp(ca, cb, ck, pk);
        cmp.push_back(Json{{"key", k},
                           {"a", a},
                           {"b", b},
                           {"a_hex", ToHex(ca.value())},
                           {"b_hex", ToHex(cb.value())},
                           {"sign", r.sign},
                           {"blinded", detail::ToLong(r.blinded_diff)}});
      }
    }
  }
  kat["comparison_keys"] = std::move(keys_json);
  kat["compare"] = std::move(cmp);
  return kat;
}

// Re-derives every vector with the library; returns one message per
// mismatch (empty means the file replays cleanly).
inline std::vector<std::string> ReplayKat(const Json& kat) {
  const InsecureTestMode mode;
  std::vector<std::string> failures;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };
  auto hex = [](const Json& j, const char* name) { return ParseHex(detail::RequireString(j, name)); };

  if (detail::RequireUnsigned(kat, "version") != kKatVersion) {
    throw Error(ErrorCode::kVersionMismatch, "unsupported KAT version");
  }
  KeyPair keys = insecure::KeyPairFromPrimes(mode, hex(kat, "p_hex"), hex(kat, "q_hex"));
  const PublicKey& pk = keys.public_key;
  const PrivateKey& sk = keys.private_key;
  expect(ToHex(pk.n()) == detail::RequireString(kat, "n_hex"), "n");
  expect(ToHex(sk.phi()) == detail::RequireString(kat, "phi_hex"), "phi");
  expect(ToHex(sk.phi_inv()) == detail::RequireString(kat, "phi_inv_hex"), "phi_inv");

  for (const Json& v : detail::RequireField(kat, "encrypt")) {
    const long m = v.at("m").get<long>();
    Ciphertext c = insecure::EncryptWith(mode, m, pk, hex(v, "r_hex"));
    expect(ToHex(c.value()) == detail::RequireString(v, "c_hex"), "encrypt m=" + std::to_string(m));
    expect(Decrypt(c, sk) == m, "decrypt m=" + std::to_string(m));
  }
  for (const char* op : {"add", "sub"}) {
    for (const Json& v : detail::RequireField(kat, op)) {
      Ciphertext a = Ciphertext::FromValue(pk, hex(v, "a_hex"));
      Ciphertext b = Ciphertext::FromValue(pk, hex(v, "b_hex"));
      Ciphertext r = std::string(op) == "add" ? EvalAdd(a, b) : EvalSub(a, b);
      expect(ToHex(r.value()) == detail::RequireString(v, "result_hex"), std::string(op) + " value");
      expect(Decrypt(r, sk) == v.at("plain").get<long>(), std::string(op) + " plaintext");
    }
  }
  std::vector<ComparisonKey> cks;
  for (const Json& v : detail::RequireField(kat, "comparison_keys")) {
    insecure::ComparisonKeyParams p{hex(v, "zeta_hex"), hex(v, "eta_hex"), hex(v, "eta0_hex")};
    ComparisonKey ck = insecure::ComparisonKeyFromParams(mode, sk, hex(v, "m_bound_hex"), p);
    expect(ToHex(ck.ck0) == detail::RequireString(v, "ck0_hex"), "ck0");
    expect(ToHex(Mod(ck.ck0, pk.n())) == detail::RequireString(v, "ck0_mod_n_hex"), "ck0 mod n");
    expect(ToHex(ck.ck1) == detail::RequireString(v, "ck1_hex"), "ck1");
    cks.push_back(std::move(ck));
  }
  for (const Json& v : detail::RequireField(kat, "compare")) {
    const std::size_t k = v.at("key").get<std::size_t>();
    if (k >= cks.size()) {
      failures.push_back("compare references unknown key");
      continue;
    }
    Ciphertext a = Ciphertext::FromValue(pk, hex(v, "a_hex"));
    Ciphertext b = Ciphertext::FromValue(pk, hex(v, "b_hex"));
    CmpResult r = EvalCmp(a, b, cks[k], pk);
    const std::string tag = "compare key=" + std::to_string(k) + " a=" +
                            std::to_string(v.at("a").get<long>()) + " b=" +
                            std::to_string(v.at("b").get<long>());
    expect(r.sign == v.at("sign").get<int>(), tag + " sign");
    expect(r.blinded_diff == v.at("blinded").get<long>(), tag + " blinded");
  }
  return failures;
}

}  // namespace hope

#endif  // HOPE_KAT_HPP_
