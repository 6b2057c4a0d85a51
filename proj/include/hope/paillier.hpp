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

#ifndef HOPE_PAILLIER_HPP_
#define HOPE_PAILLIER_HPP_

// Textbook Paillier with generator g = n + 1.
//
//   Enc(m)  = (n+1)^m * r^n mod n^2,            r <- Z*_n
//   Dec(c)  = L(c^phi mod n^2) * phi^-1 mod n,   L(u) = (u - 1) / n
//   c0 (+) c1 = c0 * c1 mod n^2
//
// Key generation insists on p !| (q-1) and q !| (p-1), which makes
// gcd(n, phi(n)) = 1 so that phi itself is the decryption exponent.

#include <cstddef>
#include <memory>
#include <utility>

#include "hope/encoding.hpp"
#include "hope/error.hpp"
#include "hope/numtheory.hpp"
#include "hope/random.hpp"

namespace hope {

// Tag required by every entry point that bypasses production safeguards
// (caller-chosen primes or randomness). Never construct it outside tests,
// KAT tooling, or explicit --insecure-test CLI paths.
struct InsecureTestMode {
  explicit InsecureTestMode() = default;
};

inline constexpr std::size_t kDefaultModulusBits = 2048;
inline constexpr int kKeygenRetryBudget = 10'000;

namespace detail {

struct KeyParams {
  BigInt n;
  BigInt n_squared;
  BigInt half;  // floor(n / 2)
  Fingerprint fingerprint;
};

struct TrustedTag {
  explicit TrustedTag() = default;
};

}  // namespace detail

class PublicKey {
 public:
  explicit PublicKey(const BigInt& n) {
    if (n < 15 || mpz_even_p(n.get_mpz_t())) {
      throw Error(ErrorCode::kInvalidKey, "modulus must be an odd integer >= 15");
    }
    auto params = std::make_shared<detail::KeyParams>();
    params->n = n;
    params->n_squared = n * n;
    params->half = FloorHalf(n);
    params->fingerprint = FingerprintOf(n);
    params_ = std::move(params);
  }

  const BigInt& n() const { return params_->n; }
  const BigInt& n_squared() const { return params_->n_squared; }
  const BigInt& half() const { return params_->half; }
  const Fingerprint& fingerprint() const { return params_->fingerprint; }
  std::size_t bits() const { return BitLength(params_->n); }

  const std::shared_ptr<const detail::KeyParams>& params() const { return params_; }

  friend bool operator==(const PublicKey& a, const PublicKey& b) { return a.n() == b.n(); }

 private:
  std::shared_ptr<const detail::KeyParams> params_;
};

// An element of Z*_{n^2} bound to the key that produced it.
class Ciphertext {
 public:
  // Validates 0 < value < n^2 and gcd(value, n) = 1.
  static Ciphertext FromValue(const PublicKey& pk, BigInt value) {
    if (value <= 0 || value >= pk.n_squared()) {
      throw Error(ErrorCode::kMalformedCiphertext, "ciphertext outside (0, n^2)");
    }
    if (Gcd(value, pk.n()) != 1) {
      throw Error(ErrorCode::kMalformedCiphertext, "ciphertext is not a unit mod n^2");
    }
    return Ciphertext(detail::TrustedTag(), std::move(value), pk.params());
  }

  Ciphertext(detail::TrustedTag, BigInt value, std::shared_ptr<const detail::KeyParams> key)
      : value_(std::move(value)), key_(std::move(key)) {}

  const BigInt& value() const { return value_; }
  const Fingerprint& key_fingerprint() const { return key_->fingerprint; }
  const BigInt& n() const { return key_->n; }
  const BigInt& n_squared() const { return key_->n_squared; }
  const std::shared_ptr<const detail::KeyParams>& key() const { return key_; }

  friend bool operator==(const Ciphertext& a, const Ciphertext& b) {
    return a.key_fingerprint() == b.key_fingerprint() && a.value_ == b.value_;
  }

 private:
  BigInt value_;
  std::shared_ptr<const detail::KeyParams> key_;
};

class PrivateKey {
 public:
  // Rejects anything that violates the key invariants: both factors odd
  // probable primes, distinct, p !| (q-1), q !| (p-1).
  static PrivateKey FromPrimes(const BigInt& p, const BigInt& q) {
    if (p == q) throw Error(ErrorCode::kInvalidKey, "p and q must be distinct");
    for (const BigInt* f : {&p, &q}) {
      if (*f < 3 || mpz_even_p(f->get_mpz_t()) || !IsProbablePrime(*f)) {
        throw Error(ErrorCode::kInvalidKey, "factor " + f->get_str() + " is not an odd prime");
      }
    }
    if (mpz_divisible_p(BigInt(q - 1).get_mpz_t(), p.get_mpz_t())) {
      throw Error(ErrorCode::kInvalidKey, "p divides q - 1");
    }
    if (mpz_divisible_p(BigInt(p - 1).get_mpz_t(), q.get_mpz_t())) {
      throw Error(ErrorCode::kInvalidKey, "q divides p - 1");
    }
    return PrivateKey(p, q);
  }

  const BigInt& p() const { return p_; }
  const BigInt& q() const { return q_; }
  const BigInt& phi() const { return phi_; }
  const BigInt& phi_inv() const { return phi_inv_; }
  const PublicKey& public_key() const { return public_; }

 private:
  PrivateKey(const BigInt& p, const BigInt& q)
      : p_(p < q ? p : q),
        q_(p < q ? q : p),
        phi_((p - 1) * (q - 1)),
        phi_inv_(ModInverse(phi_, p * q)),
        public_(p * q) {}

  BigInt p_;
  BigInt q_;
  BigInt phi_;
  BigInt phi_inv_;
  PublicKey public_;
};

struct KeyPair {
  PublicKey public_key;
  PrivateKey private_key;
};

namespace paillier {

// Draws p and q of ceil(bits/2) bits each until the pair satisfies the key
// invariants. n has 2*ceil(bits/2) or 2*ceil(bits/2) - 1 bits.
inline KeyPair KeyGen(std::size_t bits, RandomSource& rng) {
  if (bits < 6) throw Error(ErrorCode::kInvalidArgument, "modulus size must be >= 6 bits");
  const std::size_t prime_bits = (bits + 1) / 2;
  for (int attempt = 0; attempt < kKeygenRetryBudget; ++attempt) {
    BigInt p = RandomPrime(prime_bits, rng);
    BigInt q = RandomPrime(prime_bits, rng);
    if (p == q) continue;
    if (mpz_divisible_p(BigInt(q - 1).get_mpz_t(), p.get_mpz_t()) ||
        mpz_divisible_p(BigInt(p - 1).get_mpz_t(), q.get_mpz_t())) {
      continue;
    }
    PrivateKey sk = PrivateKey::FromPrimes(p, q);
    return KeyPair{sk.public_key(), std::move(sk)};
  }
  throw Error(ErrorCode::kExhausted, "no admissible prime pair within the retry budget");
}

namespace detail {

inline Ciphertext EncryptWith(const BigInt& m, const PublicKey& pk, const BigInt& r) {
  // (n+1)^m = 1 + n*m (mod n^2) by the binomial theorem.
  const BigInt& n2 = pk.n_squared();
  BigInt g_m = Mod(1 + pk.n() * m, n2);
  BigInt value = g_m * ModPow(r, pk.n(), n2) % n2;
  return Ciphertext(hope::detail::TrustedTag(), std::move(value), pk.params());
}

inline void CheckPlaintext(const BigInt& m, const PublicKey& pk) {
  if (m < 0 || m >= pk.n()) {
    throw Error(ErrorCode::kPlaintextOutOfRange, "plaintext must lie in [0, n)");
  }
}

inline void CheckSameKey(const Fingerprint& a, const Fingerprint& b) {
  if (a != b) throw Error(ErrorCode::kKeyMismatch, "ciphertext belongs to a different key");
}

}  // namespace detail

inline Ciphertext Encrypt(const BigInt& m, const PublicKey& pk, RandomSource& rng) {
  detail::CheckPlaintext(m, pk);
  return detail::EncryptWith(m, pk, RandomCoprime(pk.n(), pk.n(), rng));
}

inline BigInt Decrypt(const Ciphertext& c, const PrivateKey& sk) {
  const PublicKey& pk = sk.public_key();
  detail::CheckSameKey(c.key_fingerprint(), pk.fingerprint());
  BigInt u = ModPow(c.value(), sk.phi(), pk.n_squared()) - 1;
  if (!mpz_divisible_p(u.get_mpz_t(), pk.n().get_mpz_t())) {
    throw Error(ErrorCode::kMalformedCiphertext, "c^phi - 1 is not divisible by n");
  }
  BigInt l = u / pk.n();
  return l * sk.phi_inv() % pk.n();
}

inline Ciphertext EvalAdd(const Ciphertext& c0, const Ciphertext& c1) {
  detail::CheckSameKey(c0.key_fingerprint(), c1.key_fingerprint());
  return Ciphertext(hope::detail::TrustedTag(), c0.value() * c1.value() % c0.n_squared(),
                    c0.key());
}

}  // namespace paillier

namespace insecure {

// Test-mode key construction from explicit primes. Size limits are skipped;
// the structural checks in PrivateKey::FromPrimes are not.
inline KeyPair KeyPairFromPrimes(InsecureTestMode, const BigInt& p, const BigInt& q) {
  PrivateKey sk = PrivateKey::FromPrimes(p, q);
  return KeyPair{sk.public_key(), std::move(sk)};
}

// Test-mode encryption with caller-supplied randomness r in Z*_n.
inline Ciphertext PaillierEncryptWith(InsecureTestMode, const BigInt& m, const PublicKey& pk,
                                      const BigInt& r) {
  paillier::detail::CheckPlaintext(m, pk);
  if (r <= 0 || r >= pk.n() || Gcd(r, pk.n()) != 1) {
    throw Error(ErrorCode::kInvalidArgument, "r must be a unit in Z*_n");
  }
  return paillier::detail::EncryptWith(m, pk, r);
}

}  // namespace insecure

}  // namespace hope

#endif  // HOPE_PAILLIER_HPP_
