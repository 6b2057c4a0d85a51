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

#ifndef HOPE_HOPE_HPP_
#define HOPE_HOPE_HPP_

// Order-revealing extension of Paillier.
//
// Signed plaintexts m in [-floor(n/2), n - floor(n/2)) are encrypted as
// Enc(m mod n) and decrypted with the symmetric residue, so negation is the
// inverse mod n^2 and subtraction is EvalAdd(c0, EvalNeg(c1)).
//
// A comparison key (ck0, ck1) lets a server learn eta * (m0 - m1) smod n,
// hence Sgn(m0 - m1), without being able to decrypt:
//
//   t        = (c0 * c1^-1)^ck0 mod n^2           (t = 1 mod n)
//   blinded  = ((t - 1) / n) * ck1 mod n, smod n   (= eta * (m0 - m1))
//
// with ck0 = eta0 * phi^zeta and ck1 = eta1 * phi^-zeta mod n, so that
// ck0 * ck1 = eta0 * eta1 = eta (mod n).
//
// Two points where the construction needs pinning down:
//
//  * ck0 is an exponent of Z*_{n^2}: it must stay a multiple of phi, which
//    is what annihilates the r^n randomizers, so it is never reduced modulo
//    n (that leaves t != 1 (mod n) for almost every ciphertext pair). Random
//    keys use ck0 = phi * k for a short k and derive eta0 from it; explicit
//    (zeta, eta0) are lifted modulo the group order n * phi.
//
//  * The sign of eta * d smod n equals Sgn(d) only while eta * |d| <= n/2.
//    Keys are therefore generated for a plaintext bound M, with
//    eta <= floor(n / (4M)); comparisons are correct whenever |m0|, |m1| <= M.

#include <algorithm>
#include <cstdint>
#include <utility>

#include "hope/encoding.hpp"
#include "hope/error.hpp"
#include "hope/numtheory.hpp"
#include "hope/paillier.hpp"
#include "hope/random.hpp"

namespace hope {

inline const BigInt& DefaultComparisonBound() {
  static const BigInt bound = BigInt(1) << 63;
  return bound;
}

struct ComparisonKey {
  BigInt ck0;      // exponent, a multiple of phi; ck0 = eta0 * phi^zeta (mod n)
  BigInt ck1;      // multiplier, 0 < ck1 < n
  BigInt bound_m;  // plaintext bound M the key was generated for
  Fingerprint key_fingerprint{};
  std::uint64_t epoch = 0;

  friend bool operator==(const ComparisonKey&, const ComparisonKey&) = default;
};

struct CmpResult {
  int sign = 0;  // -1, 0 or +1
  BigInt blinded_diff;
};

// L(c^ck0 mod n^2) for one ciphertext. Comparing two prepared keys costs a
// subtraction and a multiplication instead of an exponentiation mod n^2.
struct PreparedKey {
  BigInt exponent_log;
  Fingerprint key_fingerprint{};
  std::uint64_t epoch = 0;
};

inline BigInt MaxBlindingFactor(const BigInt& n, const BigInt& bound_m) {
  return n / (4 * bound_m);
}

inline BigInt BlindingFactor(const ComparisonKey& ck, const PublicKey& pk) {
  return Mod(ck.ck0 * ck.ck1, pk.n());
}

// Structural checks the server can perform without the private key.
inline void ValidateComparisonKey(const ComparisonKey& ck, const PublicKey& pk) {
  if (ck.key_fingerprint != pk.fingerprint()) {
    throw Error(ErrorCode::kKeyMismatch, "comparison key belongs to a different modulus");
  }
  const BigInt& n = pk.n();
  if (ck.bound_m < 1) throw Error(ErrorCode::kInvalidKey, "comparison bound must be >= 1");
  if (ck.ck0 <= 0 || ck.ck0 >= pk.n_squared() || Gcd(ck.ck0, n) != 1) {
    throw Error(ErrorCode::kInvalidKey, "ck0 is not a unit exponent");
  }
  if (ck.ck1 <= 0 || ck.ck1 >= n || Gcd(ck.ck1, n) != 1) {
    throw Error(ErrorCode::kInvalidKey, "ck1 is not in Z*_n");
  }
  const BigInt eta = BlindingFactor(ck, pk);
  if (eta < 1 || eta > MaxBlindingFactor(n, ck.bound_m)) {
    throw Error(ErrorCode::kInvalidKey, "blinding factor exceeds floor(n / 4M)");
  }
}

namespace detail {

inline void CheckKey(const Fingerprint& have, const Fingerprint& want) {
  if (have != want) throw Error(ErrorCode::kKeyMismatch, "fingerprint mismatch");
}

inline ComparisonKey AssembleComparisonKey(const PrivateKey& sk, const BigInt& bound_m,
                                           const BigInt& ck0, const BigInt& zeta,
                                           const BigInt& eta1, std::uint64_t epoch) {
  const BigInt& n = sk.public_key().n();
  ComparisonKey ck;
  ck.ck0 = ck0;
  ck.ck1 = eta1 * ModInverse(ModPow(sk.phi(), zeta, n), n) % n;
  ck.bound_m = bound_m;
  ck.key_fingerprint = sk.public_key().fingerprint();
  ck.epoch = epoch;
  return ck;
}

// eta0 * phi^zeta reduced modulo n * phi = |Z*_{n^2}|, keeping phi | ck0.
inline BigInt LiftExponent(const PrivateKey& sk, const BigInt& zeta, const BigInt& eta0) {
  const BigInt order = sk.public_key().n() * sk.phi();
  return eta0 * ModPow(sk.phi(), zeta, order) % order;
}

// The full symmetric residue range [-floor(n/2), n - floor(n/2)): every
// residue mod n has exactly one representative, which Decrypt returns.
inline void CheckSignedPlaintext(const BigInt& m, const PublicKey& pk) {
  if (m < -pk.half() || m >= pk.n() - pk.half()) {
    throw Error(ErrorCode::kPlaintextOutOfRange, "plaintext must lie in [-floor(n/2), n - floor(n/2))");
  }
}

inline void CheckBound(const BigInt& n, const BigInt& bound_m) {
  if (bound_m < 1) throw Error(ErrorCode::kInvalidArgument, "comparison bound must be >= 1");
  if (MaxBlindingFactor(n, bound_m) < 1) {
    throw Error(ErrorCode::kBoundTooLarge, "floor(n / 4M) < 1");
  }
}

inline CmpResult FinishComparison(const BigInt& exponent_log, const ComparisonKey& ck,
                                  const BigInt& n) {
  CmpResult out;
  out.blinded_diff = Smod(exponent_log * ck.ck1, n);
  out.sign = Sgn(out.blinded_diff);
  return out;
}

// (t - 1) / n for t = c^ck0 mod n^2.
inline BigInt ExponentLog(const BigInt& base, const ComparisonKey& ck, const PublicKey& pk) {
  BigInt t = ModPow(base, ck.ck0, pk.n_squared()) - 1;
  if (!mpz_divisible_p(t.get_mpz_t(), pk.n().get_mpz_t())) {
    throw Error(ErrorCode::kMalformedCiphertext, "t - 1 is not divisible by n");
  }
  return t / pk.n();
}

}  // namespace detail

// Enc(m mod n) for m in [-floor(n/2), n - floor(n/2)).
inline Ciphertext Encrypt(const BigInt& m, const PublicKey& pk, RandomSource& rng) {
  detail::CheckSignedPlaintext(m, pk);
  return paillier::Encrypt(Mod(m, pk.n()), pk, rng);
}

inline BigInt Decrypt(const Ciphertext& c, const PrivateKey& sk) {
  return Smod(paillier::Decrypt(c, sk), sk.public_key().n());
}

using paillier::EvalAdd;

inline Ciphertext EvalNeg(const Ciphertext& c) {
  try {
    return Ciphertext(detail::TrustedTag(), ModInverse(c.value(), c.n_squared()), c.key());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNotInvertible) {
      throw Error(ErrorCode::kMalformedCiphertext, "ciphertext has no inverse mod n^2");
    }
    throw;
  }
}

inline Ciphertext EvalSub(const Ciphertext& c0, const Ciphertext& c1) {
  detail::CheckKey(c0.key_fingerprint(), c1.key_fingerprint());
  return EvalAdd(c0, EvalNeg(c1));
}

// Samples zeta <- Z*_n, eta <- [1, floor(n/4M)] coprime to n and a short
// unit k, sets ck0 = phi * k and derives eta0 = ck0 * phi^-zeta (mod n), so
// ck0 = eta0 * phi^zeta (mod n) and ck0 * ck1 = eta (mod n). The exponent is
// |n| + 128 bits instead of the 2|n| of a uniform eta0 lifted mod n * phi.
inline ComparisonKey GenerateComparisonKey(const PrivateKey& sk, const BigInt& bound_m,
                                           RandomSource& rng, std::uint64_t epoch = 0) {
  const BigInt& n = sk.public_key().n();
  detail::CheckBound(n, bound_m);
  BigInt zeta = RandomCoprime(n, n, rng);
  BigInt eta = RandomCoprime(n, MaxBlindingFactor(n, bound_m) + 1, rng);
  BigInt k = RandomCoprime(n, std::min<BigInt>(n, BigInt(1) << 128), rng);
  BigInt ck0 = sk.phi() * k;
  BigInt eta0 = Mod(ck0, n) * ModInverse(ModPow(sk.phi(), zeta, n), n) % n;
  BigInt eta1 = eta * ModInverse(eta0, n) % n;
  return detail::AssembleComparisonKey(sk, bound_m, ck0, zeta, eta1, epoch);
}

inline ComparisonKey RotateComparisonKey(const PrivateKey& sk, const ComparisonKey& old,
                                         RandomSource& rng) {
  detail::CheckKey(old.key_fingerprint, sk.public_key().fingerprint());
  return GenerateComparisonKey(sk, old.bound_m, rng, old.epoch + 1);
}

// Sign of the plaintext inside a difference ciphertext; correct for
// |d| <= 2M.
inline CmpResult EvalSign(const Ciphertext& diff, const ComparisonKey& ck, const PublicKey& pk) {
  detail::CheckKey(diff.key_fingerprint(), pk.fingerprint());
  detail::CheckKey(ck.key_fingerprint, pk.fingerprint());
  return detail::FinishComparison(detail::ExponentLog(diff.value(), ck, pk), ck, pk.n());
}

// Sgn(m0 - m1) for |m0|, |m1| <= ck.bound_m. The bound is a caller contract
// the server cannot check.
inline CmpResult EvalCmp(const Ciphertext& c0, const Ciphertext& c1, const ComparisonKey& ck,
                         const PublicKey& pk) {
  detail::CheckKey(c0.key_fingerprint(), pk.fingerprint());
  detail::CheckKey(c1.key_fingerprint(), pk.fingerprint());
  return EvalSign(EvalSub(c0, c1), ck, pk);
}

inline PreparedKey Prepare(const Ciphertext& c, const ComparisonKey& ck, const PublicKey& pk) {
  detail::CheckKey(c.key_fingerprint(), pk.fingerprint());
  detail::CheckKey(ck.key_fingerprint, pk.fingerprint());
  return PreparedKey{detail::ExponentLog(c.value(), ck, pk), pk.fingerprint(), ck.epoch};
}

// Same result as EvalCmp on the underlying ciphertexts: with
// c_i^ck0 = 1 + n*k_i (mod n^2), (c0 / c1)^ck0 = 1 + n*(k0 - k1).
inline CmpResult EvalCmp(const PreparedKey& a, const PreparedKey& b, const ComparisonKey& ck,
                         const PublicKey& pk) {
  detail::CheckKey(a.key_fingerprint, pk.fingerprint());
  detail::CheckKey(b.key_fingerprint, pk.fingerprint());
  if (a.epoch != ck.epoch || b.epoch != ck.epoch) {
    throw Error(ErrorCode::kKeyMismatch, "prepared key from another comparison-key epoch");
  }
  return detail::FinishComparison(a.exponent_log - b.exponent_log, ck, pk.n());
}

namespace insecure {

struct ComparisonKeyParams {
  BigInt zeta;
  BigInt eta;
  BigInt eta0;
};

// Deterministic comparison key from explicit (zeta, eta, eta0).
inline ComparisonKey ComparisonKeyFromParams(InsecureTestMode, const PrivateKey& sk,
                                             const BigInt& bound_m,
                                             const ComparisonKeyParams& params,
                                             std::uint64_t epoch = 0) {
  const BigInt& n = sk.public_key().n();
  hope::detail::CheckBound(n, bound_m);
  for (const BigInt* v : {&params.zeta, &params.eta0}) {
    if (*v <= 0 || *v >= n || Gcd(*v, n) != 1) {
      throw Error(ErrorCode::kInvalidArgument, "zeta and eta0 must lie in Z*_n");
    }
  }
  if (params.eta < 1 || params.eta > MaxBlindingFactor(n, bound_m) || Gcd(params.eta, n) != 1) {
    throw Error(ErrorCode::kInvalidArgument, "eta must be a unit in [1, floor(n/4M)]");
  }
  BigInt eta1 = params.eta * ModInverse(params.eta0, n) % n;
  return hope::detail::AssembleComparisonKey(
      sk, bound_m, hope::detail::LiftExponent(sk, params.zeta, params.eta0), params.zeta, eta1, epoch);
}

// eta0 and eta1 drawn independently from all of Z*_n, so eta is unbounded.
// Exists to demonstrate that such keys mis-order some in-bound pairs.
inline ComparisonKey GenerateUnboundedComparisonKey(InsecureTestMode, const PrivateKey& sk,
                                                    const BigInt& bound_m, RandomSource& rng) {
  const BigInt& n = sk.public_key().n();
  BigInt zeta = RandomCoprime(n, n, rng);
  BigInt eta0 = RandomCoprime(n, n, rng);
  BigInt eta1 = RandomCoprime(n, n, rng);
  return hope::detail::AssembleComparisonKey(sk, bound_m, hope::detail::LiftExponent(sk, zeta, eta0),
                                             zeta, eta1, 0);
}

// Signed encryption with caller-supplied r in Z*_n.
inline Ciphertext EncryptWith(InsecureTestMode mode, const BigInt& m, const PublicKey& pk,
                              const BigInt& r) {
  detail::CheckSignedPlaintext(m, pk);
  return PaillierEncryptWith(mode, Mod(m, pk.n()), pk, r);
}

}  // namespace insecure

}  // namespace hope

#endif  // HOPE_HOPE_HPP_
