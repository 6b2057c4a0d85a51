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

#include "hope/paillier.hpp"

#include <gtest/gtest.h>

#include <set>

#include "hope/error.hpp"
#include "hope/numtheory.hpp"
#include "hope/random.hpp"
#include "oracle.hpp"

namespace {

using ::hope::BigInt;
using ::hope::Ciphertext;
using ::hope::Error;
using ::hope::ErrorCode;
using ::hope::InsecureTestMode;
using ::hope::KeyPair;

template <typename F>
ErrorCode CodeOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected hope::Error";
  return ErrorCode::kProtocol;
}

KeyPair ToyKeys() { return hope::insecure::KeyPairFromPrimes(InsecureTestMode(), 5, 7); }

const KeyPair& LargeKeys() {
  static const KeyPair keys = [] {
    hope::SecureRandom rng;
    return hope::paillier::KeyGen(2048, rng);
  }();
  return keys;
}

TEST(PaillierKeyTest, ForcedToyPrimes) {
  KeyPair k = ToyKeys();
  EXPECT_EQ(k.public_key.n(), 35);
  EXPECT_EQ(k.public_key.n_squared(), 1225);
  EXPECT_EQ(k.private_key.phi(), 24);
  EXPECT_EQ(k.private_key.phi_inv(), 19);
}

TEST(PaillierKeyTest, RejectsConstraintViolations) {
  InsecureTestMode mode;
  // 3 | (7 - 1)
  EXPECT_EQ(CodeOf([&] { hope::insecure::KeyPairFromPrimes(mode, 3, 7); }), ErrorCode::kInvalidKey);
  EXPECT_EQ(CodeOf([&] { hope::insecure::KeyPairFromPrimes(mode, 7, 3); }), ErrorCode::kInvalidKey);
  EXPECT_EQ(CodeOf([&] { hope::insecure::KeyPairFromPrimes(mode, 7, 7); }), ErrorCode::kInvalidKey);
  EXPECT_EQ(CodeOf([&] { hope::insecure::KeyPairFromPrimes(mode, 2, 7); }), ErrorCode::kInvalidKey);
  EXPECT_EQ(CodeOf([&] { hope::insecure::KeyPairFromPrimes(mode, 9, 7); }), ErrorCode::kInvalidKey);
}

TEST(PaillierKeyTest, GeneratedKeysSatisfyInvariants) {
  hope::SeededRandom rng(77);
  for (std::size_t bits : {6u, 7u, 8u, 10u, 16u, 32u, 64u, 128u}) {
    for (int i = 0; i < 10; ++i) {
      KeyPair k = hope::paillier::KeyGen(bits, rng);
      const auto& sk = k.private_key;
      ASSERT_NE(sk.p(), sk.q());
      ASSERT_TRUE(hope::IsProbablePrime(sk.p()) && hope::IsProbablePrime(sk.q()));
      ASSERT_FALSE(mpz_divisible_p(BigInt(sk.q() - 1).get_mpz_t(), sk.p().get_mpz_t()));
      ASSERT_FALSE(mpz_divisible_p(BigInt(sk.p() - 1).get_mpz_t(), sk.q().get_mpz_t()));
      ASSERT_EQ(hope::Gcd(k.public_key.n(), sk.phi()), 1);
      ASSERT_EQ(sk.phi() * sk.phi_inv() % k.public_key.n(), 1);
      const std::size_t nbits = k.public_key.bits();
      const std::size_t top = 2 * ((bits + 1) / 2);
      ASSERT_TRUE(nbits == top || nbits == top - 1) << bits << " -> " << nbits;
    }
  }
  EXPECT_EQ(CodeOf([&] { hope::paillier::KeyGen(5, rng); }), ErrorCode::kInvalidArgument);
}

TEST(PaillierKeyTest, ProductionSizedKey) {
  const KeyPair& k = LargeKeys();
  EXPECT_GE(k.public_key.bits(), 2047u);
  EXPECT_LE(k.public_key.bits(), 2049u);
  EXPECT_EQ(hope::BitLength(k.private_key.p()), 1024u);
}

TEST(PaillierKeyTest, FingerprintIsFunctionOfModulus) {
  KeyPair a = ToyKeys(), b = ToyKeys();
  EXPECT_EQ(a.public_key.fingerprint(), b.public_key.fingerprint());
  EXPECT_NE(a.public_key.fingerprint(), LargeKeys().public_key.fingerprint());
}

TEST(PaillierEncryptTest, ForcedRandomnessKnownAnswers) {
  KeyPair k = ToyKeys();
  InsecureTestMode mode;
  EXPECT_EQ(hope::insecure::PaillierEncryptWith(mode, 3, k.public_key, 1).value(), 106);
  EXPECT_EQ(hope::insecure::PaillierEncryptWith(mode, 0, k.public_key, 1).value(), 1);
  EXPECT_EQ(CodeOf([&] { hope::insecure::PaillierEncryptWith(mode, 3, k.public_key, 5); }),
            ErrorCode::kInvalidArgument);
}

TEST(PaillierEncryptTest, MatchesDefiningFormula) {
  // (n+1)^m r^n mod n^2 computed with generic exponentiation.
  KeyPair k = ToyKeys();
  InsecureTestMode mode;
  for (std::uint64_t m = 0; m < 35; ++m) {
    for (std::uint64_t r = 1; r < 35; ++r) {
      if (hope::oracle::Gcd(r, 35) != 1) continue;
      std::uint64_t expected =
          hope::oracle::PowMod(36, m, 1225) * hope::oracle::PowMod(r, 35, 1225) % 1225;
      ASSERT_EQ(hope::insecure::PaillierEncryptWith(mode, m, k.public_key, r).value(), expected);
    }
  }
}

TEST(PaillierEncryptTest, Randomized) {
  hope::SecureRandom rng;
  const KeyPair& k = LargeKeys();
  Ciphertext a = hope::paillier::Encrypt(12345, k.public_key, rng);
  Ciphertext b = hope::paillier::Encrypt(12345, k.public_key, rng);
  EXPECT_NE(a.value(), b.value());
  EXPECT_EQ(hope::Gcd(a.value(), k.public_key.n_squared()), 1);
}

TEST(PaillierEncryptTest, PlaintextRange) {
  hope::SeededRandom rng(1);
  KeyPair k = ToyKeys();
  EXPECT_EQ(CodeOf([&] { hope::paillier::Encrypt(35, k.public_key, rng); }),
            ErrorCode::kPlaintextOutOfRange);
  EXPECT_EQ(CodeOf([&] { hope::paillier::Encrypt(-1, k.public_key, rng); }),
            ErrorCode::kPlaintextOutOfRange);
}

TEST(PaillierDecryptTest, KnownAnswer) {
  KeyPair k = ToyKeys();
  EXPECT_EQ(hope::ModPow(106, 24, 1225), 71);
  EXPECT_EQ(hope::paillier::Decrypt(Ciphertext::FromValue(k.public_key, 106), k.private_key), 3);
}

TEST(PaillierDecryptTest, ExhaustiveToyRoundTripAgainstEnumeration) {
  KeyPair k = ToyKeys();
  InsecureTestMode mode;
  for (std::uint64_t m = 0; m < 35; ++m) {
    for (std::uint64_t r = 1; r < 35; ++r) {
      if (hope::oracle::Gcd(r, 35) != 1) continue;
      Ciphertext c = hope::insecure::PaillierEncryptWith(mode, m, k.public_key, r);
      ASSERT_EQ(hope::Gcd(c.value(), 1225), 1);
      ASSERT_EQ(*hope::oracle::BruteDecrypt(c.value().get_ui(), 35), m);
      ASSERT_EQ(hope::paillier::Decrypt(c, k.private_key), m);
    }
  }
}

TEST(PaillierDecryptTest, LargeKeyRoundTrip) {
  hope::SecureRandom rng;
  const KeyPair& k = LargeKeys();
  for (int i = 0; i < 20; ++i) {
    BigInt m = hope::RandomBelow(k.public_key.n(), rng);
    ASSERT_EQ(hope::paillier::Decrypt(hope::paillier::Encrypt(m, k.public_key, rng), k.private_key), m);
  }
  BigInt top = k.public_key.n() - 1;
  EXPECT_EQ(hope::paillier::Decrypt(hope::paillier::Encrypt(top, k.public_key, rng), k.private_key), top);
}

TEST(PaillierDecryptTest, Errors) {
  KeyPair k = ToyKeys();
  hope::SecureRandom rng;
  Ciphertext foreign = hope::paillier::Encrypt(1, LargeKeys().public_key, rng);
  EXPECT_EQ(CodeOf([&] { hope::paillier::Decrypt(foreign, k.private_key); }), ErrorCode::kKeyMismatch);
  Ciphertext bad(hope::detail::TrustedTag(), 5, k.public_key.params());
  EXPECT_EQ(CodeOf([&] { hope::paillier::Decrypt(bad, k.private_key); }),
            ErrorCode::kMalformedCiphertext);
}

TEST(CiphertextTest, FromValueValidatesMembership) {
  KeyPair k = ToyKeys();
  EXPECT_EQ(CodeOf([&] { Ciphertext::FromValue(k.public_key, 0); }), ErrorCode::kMalformedCiphertext);
  EXPECT_EQ(CodeOf([&] { Ciphertext::FromValue(k.public_key, 1225); }), ErrorCode::kMalformedCiphertext);
  EXPECT_EQ(CodeOf([&] { Ciphertext::FromValue(k.public_key, 14); }), ErrorCode::kMalformedCiphertext);
  EXPECT_NO_THROW(Ciphertext::FromValue(k.public_key, 1224));
}

TEST(PaillierEvalAddTest, ExhaustiveToy) {
  KeyPair k = ToyKeys();
  hope::SeededRandom rng(19);
  for (std::uint64_t a = 0; a < 35; ++a) {
    Ciphertext ca = hope::paillier::Encrypt(a, k.public_key, rng);
    for (std::uint64_t b = 0; b < 35; ++b) {
      Ciphertext cb = hope::paillier::Encrypt(b, k.public_key, rng);
      Ciphertext sum = hope::paillier::EvalAdd(ca, cb);
      ASSERT_EQ(sum.value(), ca.value() * cb.value() % 1225);
      ASSERT_EQ(hope::paillier::Decrypt(sum, k.private_key), (a + b) % 35);
    }
  }
}

TEST(PaillierEvalAddTest, AdditiveIdentityAndKeyMismatch) {
  hope::SecureRandom rng;
  const KeyPair& k = LargeKeys();
  Ciphertext c = hope::paillier::Encrypt(987654321, k.public_key, rng);
  Ciphertext zero = hope::paillier::Encrypt(0, k.public_key, rng);
  EXPECT_EQ(hope::paillier::Decrypt(hope::paillier::EvalAdd(c, zero), k.private_key), 987654321);
  BigInt a = hope::RandomBelow(k.public_key.n(), rng), b = hope::RandomBelow(k.public_key.n(), rng);
  Ciphertext s = hope::paillier::EvalAdd(hope::paillier::Encrypt(a, k.public_key, rng),
                                         hope::paillier::Encrypt(b, k.public_key, rng));
  EXPECT_EQ(hope::paillier::Decrypt(s, k.private_key), (a + b) % k.public_key.n());
  Ciphertext toy = hope::paillier::Encrypt(1, ToyKeys().public_key, rng);
  EXPECT_EQ(CodeOf([&] { hope::paillier::EvalAdd(c, toy); }), ErrorCode::kKeyMismatch);
}

// (1 + n)^x = 1 + n x (mod n^2)
TEST(PaillierLemmaTest, BinomialIdentity) {
  for (std::uint64_t x = 0; x < 35; ++x) {
    ASSERT_EQ(hope::ModPow(36, x, 1225), (1 + 35 * x) % 1225);
  }
  hope::SecureRandom rng;
  const BigInt& n = LargeKeys().public_key.n();
  const BigInt& n2 = LargeKeys().public_key.n_squared();
  for (int i = 0; i < 25; ++i) {
    BigInt x = hope::RandomBelow(n, rng);
    ASSERT_EQ(hope::ModPow(n + 1, x, n2), hope::Mod(1 + n * x, n2));
  }
}

// r^(n phi(n)) = 1 (mod n^2) for r in Z*_{n^2}
TEST(PaillierLemmaTest, GroupOrderAnnihilates) {
  for (std::uint64_t r = 1; r < 1225; ++r) {
    if (hope::oracle::Gcd(r, 1225) != 1) continue;
    ASSERT_EQ(hope::ModPow(r, 35 * 24, 1225), 1);
  }
  hope::SecureRandom rng;
  const KeyPair& k = LargeKeys();
  BigInt order = k.public_key.n() * k.private_key.phi();
  for (int i = 0; i < 10; ++i) {
    BigInt r = hope::RandomCoprime(k.public_key.n_squared(), k.public_key.n_squared(), rng);
    ASSERT_EQ(hope::ModPow(r, order, k.public_key.n_squared()), 1);
  }
}

}  // namespace
