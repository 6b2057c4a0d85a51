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

#ifndef HOPE_CLIENT_HPP_
#define HOPE_CLIENT_HPP_

// Stateless data-owner client. Everything it needs comes from its key
// material (pk, optionally sk, and the comparison bound M); nothing derived
// from stored data survives a call. Each operation is exactly one request
// and one response.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hope/encoding.hpp"
#include "hope/error.hpp"
#include "hope/hope.hpp"
#include "hope/keyfile.hpp"
#include "hope/ostore.hpp"
#include "hope/wire.hpp"

namespace hope {

struct RangeRow {
  std::uint64_t entry_id = 0;
  std::vector<std::uint8_t> payload;
  Ciphertext key;
  std::optional<BigInt> plaintext;  // filled when the client holds sk
};

struct GroupRow {
  Ciphertext representative;
  std::size_t count = 0;
  std::optional<BigInt> plaintext;
};

struct SetupAck {
  Fingerprint fingerprint{};
  BigInt bound_m;
  std::uint64_t epoch = 0;
};

struct ServerStatus {
  bool initialized = false;
  IndexStats stats;
  std::uint64_t epoch = 0;
  BigInt bound_m;
  Fingerprint fingerprint{};
};

class Client {
 public:
  Client(Transport& transport, PublicKey pk, std::optional<PrivateKey> sk, BigInt bound_m,
         RandomSource& rng)
      : transport_(transport),
        pk_(std::move(pk)),
        sk_(std::move(sk)),
        bound_m_(std::move(bound_m)),
        rng_(rng) {
    if (sk_ && sk_->public_key() != pk_) {
      throw Error(ErrorCode::kKeyMismatch, "private key does not match the public key");
    }
  }

  SetupAck Setup(const ComparisonKey& ck) {
    ValidateComparisonKey(ck, pk_);
    Json body{{"public_key", PublicKeyToJson(pk_)}, {"comparison_key", ComparisonKeyToJson(ck)}};
    Json resp = Call(MessageType::kSetup, std::move(body), MessageType::kAck);
    SetupAck ack;
    ack.fingerprint = ParseFingerprint(detail::RequireString(resp, "fingerprint_hex"));
    ack.bound_m = ParseHex(detail::RequireString(resp, "m_bound_hex"));
    ack.epoch = detail::RequireUnsigned(resp, "epoch");
    return ack;
  }

  // Encrypts locally and sends a single INSERT; returns the server's id.
  std::uint64_t Insert(const BigInt& m, std::span<const std::uint8_t> payload) {
    CheckBound(m);
    Ciphertext c = Encrypt(m, pk_, rng_);
    Json body{{"key_hex", CiphertextToHex(c)}, {"payload_b64", Base64Encode(payload)}};
    Json resp = Call(MessageType::kInsert, std::move(body), MessageType::kAck);
    return detail::RequireUnsigned(resp, "entry_id");
  }

  std::vector<RangeRow> Range(const BigInt& lo, const BigInt& hi, RangeOptions options = {}) {
    CheckBound(lo);
    CheckBound(hi);
    if (lo > hi) throw Error(ErrorCode::kInvalidArgument, "range lower bound exceeds upper bound");
    Json body{{"lo_hex", CiphertextToHex(Encrypt(lo, pk_, rng_))},
              {"hi_hex", CiphertextToHex(Encrypt(hi, pk_, rng_))},
              {"lo_inclusive", options.lo_inclusive},
              {"hi_inclusive", options.hi_inclusive}};
    Json resp = Call(MessageType::kRange, std::move(body), MessageType::kResult);
    std::vector<RangeRow> rows;
    for (const Json& e : detail::RequireField(resp, "entries")) {
      Ciphertext key = CiphertextFromHex(pk_, detail::RequireString(e, "key_hex"));
      std::optional<BigInt> plain;
      if (sk_) plain = Decrypt(key, *sk_);
      rows.push_back(RangeRow{detail::RequireUnsigned(e, "id"),
                              Base64Decode(detail::RequireString(e, "payload_b64")), std::move(key),
                              std::move(plain)});
    }
    return rows;
  }

  std::vector<GroupRow> GroupBy() {
    Json resp = Call(MessageType::kGroupBy, Json::object(), MessageType::kResult);
    std::vector<GroupRow> rows;
    for (const Json& g : detail::RequireField(resp, "groups")) {
      Ciphertext key = CiphertextFromHex(pk_, detail::RequireString(g, "key_hex"));
      std::optional<BigInt> plain;
      if (sk_) plain = Decrypt(key, *sk_);
      rows.push_back(GroupRow{std::move(key), detail::RequireUnsigned(g, "count"), std::move(plain)});
    }
    return rows;
  }

  // Generates a fresh comparison key for epoch old_epoch + 1 and installs it.
  // Returns the new key so the caller can persist it.
  ComparisonKey RotateComparisonKey(const PrivateKey& sk, std::uint64_t old_epoch) {
    if (sk.public_key() != pk_) throw Error(ErrorCode::kKeyMismatch, "private key does not match");
    ComparisonKey next = GenerateComparisonKey(sk, bound_m_, rng_, old_epoch + 1);
    Json body{{"old_epoch", old_epoch}, {"comparison_key", ComparisonKeyToJson(next)}};
    Call(MessageType::kRotateCk, std::move(body), MessageType::kAck);
    return next;
  }

  ServerStatus Stats() {
    Json resp = Call(MessageType::kStats, Json::object(), MessageType::kResult);
    ServerStatus status;
    status.initialized = detail::RequireField(resp, "initialized").get<bool>();
    if (!status.initialized) return status;
    status.stats.size = detail::RequireUnsigned(resp, "size");
    status.stats.comparisons = detail::RequireUnsigned(resp, "comparisons");
    status.stats.depth = detail::RequireUnsigned(resp, "depth");
    status.epoch = detail::RequireUnsigned(resp, "epoch");
    status.bound_m = ParseHex(detail::RequireString(resp, "m_bound_hex"));
    status.fingerprint = ParseFingerprint(detail::RequireString(resp, "fingerprint_hex"));
    return status;
  }

  // Asks the server to write a snapshot; an empty path uses the server's
  // configured default. Returns the path written.
  std::string Snapshot(const std::string& path = {}) {
    Json body = Json::object();
    if (!path.empty()) body["path"] = path;
    Json resp = Call(MessageType::kSnapshot, std::move(body), MessageType::kAck);
    return detail::RequireString(resp, "path");
  }

  const PublicKey& public_key() const { return pk_; }
  const BigInt& bound_m() const { return bound_m_; }

 private:
  void CheckBound(const BigInt& m) const {
    if (abs(m) > bound_m_) {
      throw Error(ErrorCode::kPlaintextOutOfRange, "|m| exceeds the comparison bound M");
    }
  }

  Json Call(MessageType type, Json body, MessageType expected) {
    transport_.Send(MakeMessage(type, std::move(body), pk_.fingerprint()));
    Json resp = transport_.Receive();
    try {
      const std::string name = detail::RequireString(resp, "type");
      const Json& resp_body = detail::RequireField(resp, "body");
      if (name == MessageTypeName(MessageType::kError)) {
        throw ServerError(detail::RequireString(resp_body, "code"),
                          detail::RequireString(resp_body, "message"));
      }
      if (name != MessageTypeName(expected)) {
        throw Error(ErrorCode::kProtocol, "unexpected response type " + name);
      }
      return resp_body;
    } catch (const ServerError&) {
      throw;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kProtocol) throw;
      throw Error(ErrorCode::kProtocol, std::string("malformed response: ") + e.what());
    }
  }

  Transport& transport_;
  PublicKey pk_;
  std::optional<PrivateKey> sk_;
  BigInt bound_m_;
  RandomSource& rng_;
};

}  // namespace hope

#endif  // HOPE_CLIENT_HPP_
