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

#ifndef HOPE_NUMTHEORY_HPP_
#define HOPE_NUMTHEORY_HPP_

// Arbitrary-precision number theory used by the Paillier and HOPE layers.
//
// Integers are GMP `mpz_class` values. Signedness is a property of the value,
// not the type; functions state which range they accept. Modular
// exponentiation with a large odd modulus (the n^2 case that dominates every
// encrypt, decrypt and compare) is routed through OpenSSL's Montgomery
// ladder, which is measurably faster than mpz_powm at 4096 bits.

#include <gmpxx.h>
#include <openssl/bn.h>

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hope/error.hpp"
#include "hope/random.hpp"

namespace hope {

using BigInt = mpz_class;

inline constexpr int kDefaultPrimalityRounds = 64;
inline constexpr int kDefaultCoprimeRetryBudget = 10'000;

namespace detail {

inline constexpr std::size_t kMontgomeryThresholdBits = 1024;

struct BnDeleter {
  void operator()(BIGNUM* bn) const { BN_clear_free(bn); }
};
struct BnCtxDeleter {
  void operator()(BN_CTX* ctx) const { BN_CTX_free(ctx); }
};
using BnPtr = std::unique_ptr<BIGNUM, BnDeleter>;

inline BN_CTX* ThreadBnContext() {
  thread_local std::unique_ptr<BN_CTX, BnCtxDeleter> ctx(BN_CTX_new());
  if (!ctx) throw Error(ErrorCode::kExhausted, "BN_CTX_new failed");
  return ctx.get();
}

inline BnPtr ToBn(const BigInt& value) {
  std::size_t count = 0;
  std::vector<unsigned char> buf((mpz_sizeinbase(value.get_mpz_t(), 2) + 7) / 8 + 1);
  mpz_export(buf.data(), &count, 1, 1, 1, 0, value.get_mpz_t());
  BnPtr bn(BN_bin2bn(buf.data(), static_cast<int>(count), nullptr));
  if (!bn) throw Error(ErrorCode::kExhausted, "BN_bin2bn failed");
  return bn;
}

inline BigInt FromBn(const BIGNUM* bn) {
  std::vector<unsigned char> buf(static_cast<std::size_t>(BN_num_bytes(bn)));
  BN_bn2bin(bn, buf.data());
  BigInt out;
  mpz_import(out.get_mpz_t(), buf.size(), 1, 1, 1, 0, buf.data());
  return out;
}

// base must already be reduced; modulus odd.
inline BigInt MontgomeryPow(const BigInt& base, const BigInt& exp,
                            const BigInt& modulus) {
  BnPtr b = ToBn(base), e = ToBn(exp), m = ToBn(modulus);
  BnPtr r(BN_new());
  if (!r || BN_mod_exp_mont(r.get(), b.get(), e.get(), m.get(),
                            ThreadBnContext(), nullptr) != 1) {
    throw Error(ErrorCode::kExhausted, "BN_mod_exp_mont failed");
  }
  return FromBn(r.get());
}

inline std::vector<std::uint32_t> SieveSmallPrimes(std::uint32_t limit) {
  std::vector<bool> composite(limit + 1, false);
  std::vector<std::uint32_t> primes;
  for (std::uint32_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (std::uint64_t j = std::uint64_t{i} * i; j <= limit; j += i) composite[j] = true;
  }
  return primes;
}

inline const std::vector<std::uint32_t>& SmallPrimes() {
  static const std::vector<std::uint32_t> primes = SieveSmallPrimes(2000);
  return primes;
}

inline SecureRandom& ThreadSecureRandom() {
  thread_local SecureRandom rng;
  return rng;
}

}  // namespace detail

inline std::size_t BitLength(const BigInt& x) {
  return x == 0 ? 0 : mpz_sizeinbase(x.get_mpz_t(), 2);
}

inline int Sgn(const BigInt& x) { return sgn(x); }

// Big-endian magnitude bytes without leading zeros (empty for zero).
inline std::vector<std::uint8_t> ToBytes(const BigInt& x) {
  std::vector<std::uint8_t> out((BitLength(x) + 7) / 8);
  std::size_t count = 0;
  if (!out.empty()) mpz_export(out.data(), &count, 1, 1, 1, 0, x.get_mpz_t());
  out.resize(count);
  return out;
}

inline BigInt FromBytes(std::span<const std::uint8_t> bytes) {
  BigInt out;
  if (!bytes.empty()) mpz_import(out.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  return out;
}

// Least non-negative residue, regardless of the sign of x.
inline BigInt Mod(const BigInt& x, const BigInt& modulus) {
  BigInt r;
  mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), modulus.get_mpz_t());
  return r;
}

inline BigInt FloorHalf(const BigInt& n) {
  BigInt h;
  mpz_fdiv_q_2exp(h.get_mpz_t(), n.get_mpz_t(), 1);
  return h;
}

inline BigInt Gcd(const BigInt& a, const BigInt& b) {
  if (a == 0 && b == 0) throw Error(ErrorCode::kInvalidArgument, "gcd(0, 0) is undefined");
  BigInt g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

// Returns x in (0, modulus) with a*x = 1 (mod modulus).
inline BigInt ModInverse(const BigInt& a, const BigInt& modulus) {
  if (modulus < 2) throw Error(ErrorCode::kInvalidArgument, "modulus must be >= 2");
  BigInt inv;
  if (mpz_invert(inv.get_mpz_t(), a.get_mpz_t(), modulus.get_mpz_t()) == 0) {
    throw Error(ErrorCode::kNotInvertible, "gcd(a, modulus) != 1");
  }
  return inv;
}

inline BigInt ModPow(const BigInt& base, const BigInt& exp, const BigInt& modulus) {
  if (modulus < 2) throw Error(ErrorCode::kInvalidArgument, "modulus must be >= 2");
  if (exp < 0) throw Error(ErrorCode::kInvalidArgument, "negative exponent");
  if (exp == 0) return BigInt(1);
  BigInt b = Mod(base, modulus);
  if (mpz_odd_p(modulus.get_mpz_t()) &&
      BitLength(modulus) >= detail::kMontgomeryThresholdBits) {
    return detail::MontgomeryPow(b, exp, modulus);
  }
  BigInt r;
  mpz_powm(r.get_mpz_t(), b.get_mpz_t(), exp.get_mpz_t(), modulus.get_mpz_t());
  return r;
}

// Uniform integer with at most `bits` bits.
inline BigInt RandomBits(std::size_t bits, RandomSource& rng) {
  if (bits == 0) return BigInt(0);
  std::vector<std::uint8_t> buf((bits + 7) / 8);
  rng.Fill(buf);
  if (std::size_t excess = buf.size() * 8 - bits; excess != 0) {
    buf[0] &= static_cast<std::uint8_t>(0xFFu >> excess);
  }
  return FromBytes(buf);
}

// Uniform over [0, upper).
inline BigInt RandomBelow(const BigInt& upper, RandomSource& rng) {
  if (upper <= 0) throw Error(ErrorCode::kInvalidArgument, "upper bound must be positive");
  const std::size_t bits = BitLength(upper);
  for (;;) {
    BigInt x = RandomBits(bits, rng);
    if (x < upper) return x;
  }
}

// Miller-Rabin. Below 2^64 the fixed witness set {2, ..., 37} makes the
// answer exact; above it, `rounds` random witnesses bound the false-positive
// rate by 4^-rounds.
inline bool IsProbablePrime(const BigInt& x, int rounds, RandomSource& rng) {
  if (rounds < 1) throw Error(ErrorCode::kInvalidArgument, "rounds must be >= 1");
  if (x < 2) return false;
  for (std::uint32_t p : detail::SmallPrimes()) {
    if (x == p) return true;
    if (mpz_divisible_ui_p(x.get_mpz_t(), p)) return false;
  }
  const BigInt x_minus_1 = x - 1;
  BigInt d = x_minus_1;
  std::size_t s = mpz_scan1(d.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);

  auto witness_passes = [&](const BigInt& a) {
    BigInt y = ModPow(a, d, x);
    if (y == 1 || y == x_minus_1) return true;
    for (std::size_t i = 1; i < s; ++i) {
      y = y * y % x;
      if (y == x_minus_1) return true;
      if (y == 1) return false;
    }
    return false;
  };

  if (BitLength(x) <= 64) {
    static constexpr std::array<unsigned, 12> kWitnesses = {2, 3, 5, 7, 11, 13,
                                                            17, 19, 23, 29, 31, 37};
    for (unsigned a : kWitnesses) {
      if (!witness_passes(BigInt(a))) return false;
    }
    return true;
  }
  for (int i = 0; i < rounds; ++i) {
    BigInt a = RandomBelow(x - 3, rng) + 2;  // [2, x-2]
    if (!witness_passes(a)) return false;
  }
  return true;
}

inline bool IsProbablePrime(const BigInt& x, int rounds = kDefaultPrimalityRounds) {
  return IsProbablePrime(x, rounds, detail::ThreadSecureRandom());
}

// Odd probable prime with exactly `bits` bits.
inline BigInt RandomPrime(std::size_t bits, RandomSource& rng,
                          int rounds = kDefaultPrimalityRounds) {
  if (bits < 3) throw Error(ErrorCode::kInvalidArgument, "prime size must be >= 3 bits");
  for (std::size_t attempt = 0; attempt < 10'000'000; ++attempt) {
    BigInt candidate = RandomBits(bits, rng);
    mpz_setbit(candidate.get_mpz_t(), bits - 1);
    mpz_setbit(candidate.get_mpz_t(), 0);
    if (IsProbablePrime(candidate, rounds, rng)) return candidate;
  }
  throw Error(ErrorCode::kExhausted, "no prime found");
}

// Uniform over {x : 1 <= x < upper, gcd(x, modulus) = 1} by rejection.
inline BigInt RandomCoprime(const BigInt& modulus, const BigInt& upper, RandomSource& rng,
                            int retry_budget = kDefaultCoprimeRetryBudget) {
  if (upper < 2 || upper > modulus) {
    throw Error(ErrorCode::kInvalidArgument, "need 2 <= upper <= modulus");
  }
  const BigInt span = upper - 1;
  for (int i = 0; i < retry_budget; ++i) {
    BigInt x = RandomBelow(span, rng) + 1;
    if (Gcd(x, modulus) == 1) return x;
  }
  throw Error(ErrorCode::kExhausted, "no unit found within the retry budget");
}

// Symmetric residue: ((x + floor(n/2)) mod n) - floor(n/2), which lies in
// [-floor(n/2), n - 1 - floor(n/2)].
inline BigInt Smod(const BigInt& x, const BigInt& n) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "modulus must be >= 2");
  const BigInt half = FloorHalf(n);
  return Mod(x + half, n) - half;
}

}  // namespace hope

#endif  // HOPE_NUMTHEORY_HPP_
