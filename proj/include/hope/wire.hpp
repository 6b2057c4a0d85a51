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

#ifndef HOPE_WIRE_HPP_
#define HOPE_WIRE_HPP_

// Wire format shared by the server and the client.
//
// Each frame is a 4-byte big-endian length followed by that many bytes of
// UTF-8 JSON:
//
//   {"type": "INSERT", "protocol_version": 1, "key_fingerprint": "<32 hex>",
//    "body": {...}}
//
// Big integers are lowercase hex without leading zeros, byte strings are
// base64. key_fingerprint is omitted only before SETUP.

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <atomic>
#include <cerrno>
#include <cstdint>
#include <cstring>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hope/encoding.hpp"
#include "hope/error.hpp"
#include "hope/keyfile.hpp"
#include "hope/paillier.hpp"

namespace hope {

inline constexpr std::uint64_t kProtocolVersion = 1;
inline constexpr std::size_t kMaxFrameBytes = std::size_t{64} << 20;

enum class MessageType {
  kSetup,
  kInsert,
  kRange,
  kGroupBy,
  kRotateCk,
  kStats,
  kSnapshot,
  kAck,
  kResult,
  kError,
};

inline constexpr std::array<std::pair<MessageType, std::string_view>, 10> kMessageTypeNames = {{
    {MessageType::kSetup, "SETUP"},
    {MessageType::kInsert, "INSERT"},
    {MessageType::kRange, "RANGE"},
    {MessageType::kGroupBy, "GROUP_BY"},
    {MessageType::kRotateCk, "ROTATE_CK"},
    {MessageType::kStats, "STATS"},
    {MessageType::kSnapshot, "SNAPSHOT"},
    {MessageType::kAck, "ACK"},
    {MessageType::kResult, "RESULT"},
    {MessageType::kError, "ERROR"},
}};

inline std::string_view MessageTypeName(MessageType type) {
  for (const auto& [t, name] : kMessageTypeNames) {
    if (t == type) return name;
  }
  return "UNKNOWN";
}

inline std::optional<MessageType> ParseMessageType(std::string_view name) {
  for (const auto& [t, n] : kMessageTypeNames) {
    if (n == name) return t;
  }
  return std::nullopt;
}

inline Json MakeMessage(MessageType type, Json body,
                        const std::optional<Fingerprint>& fingerprint = std::nullopt) {
  Json msg{{"type", MessageTypeName(type)},
           {"protocol_version", kProtocolVersion},
           {"body", std::move(body)}};
  if (fingerprint) msg["key_fingerprint"] = FingerprintHex(*fingerprint);
  return msg;
}

inline Json MakeErrorMessage(std::string_view code, std::string_view message,
                             const std::optional<Fingerprint>& fingerprint = std::nullopt) {
  return MakeMessage(MessageType::kError, Json{{"code", code}, {"message", message}}, fingerprint);
}

inline std::string SerializeMessage(const Json& msg) {
  return msg.dump(-1, ' ', false, Json::error_handler_t::replace);
}

inline std::string CiphertextToHex(const Ciphertext& c) { return ToHex(c.value()); }

inline Ciphertext CiphertextFromHex(const PublicKey& pk, std::string_view hex) {
  return Ciphertext::FromValue(pk, ParseHex(hex));
}

// ---- framed socket I/O -----------------------------------------------------

namespace detail {

inline void WriteAll(int fd, const char* data, std::size_t size) {
  while (size > 0) {
    ssize_t n = ::send(fd, data, size, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kTransport, std::string("send: ") + std::strerror(errno));
    }
    data += n;
    size -= static_cast<std::size_t>(n);
  }
}

// False on EOF before the first byte; throws on EOF mid-buffer.
inline bool ReadExact(int fd, char* data, std::size_t size) {
  std::size_t got = 0;
  while (got < size) {
    ssize_t n = ::recv(fd, data + got, size - got, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kTransport, std::string("recv: ") + std::strerror(errno));
    }
    if (n == 0) {
      if (got == 0) return false;
      throw Error(ErrorCode::kTransport, "connection closed mid-frame");
    }
    got += static_cast<std::size_t>(n);
  }
  return true;
}

}  // namespace detail

inline std::string EncodeFrame(std::string_view payload) {
  if (payload.size() > kMaxFrameBytes) throw Error(ErrorCode::kTransport, "frame too large");
  const auto len = static_cast<std::uint32_t>(payload.size());
  std::string frame(4, '\0');
  frame[0] = static_cast<char>(len >> 24);
  frame[1] = static_cast<char>(len >> 16);
  frame[2] = static_cast<char>(len >> 8);
  frame[3] = static_cast<char>(len);
  frame.append(payload);
  return frame;
}

inline void WriteFrame(int fd, std::string_view payload) {
  std::string frame = EncodeFrame(payload);
  detail::WriteAll(fd, frame.data(), frame.size());
}

// nullopt on clean EOF.
inline std::optional<std::string> ReadFrame(int fd) {
  std::array<unsigned char, 4> header{};
  if (!detail::ReadExact(fd, reinterpret_cast<char*>(header.data()), header.size())) {
    return std::nullopt;
  }
  const std::uint32_t len = std::uint32_t{header[0]} << 24 | std::uint32_t{header[1]} << 16 |
                            std::uint32_t{header[2]} << 8 | std::uint32_t{header[3]};
  if (len > kMaxFrameBytes) throw Error(ErrorCode::kTransport, "frame exceeds size limit");
  std::string payload(len, '\0');
  if (len > 0 && !detail::ReadExact(fd, payload.data(), len)) {
    throw Error(ErrorCode::kTransport, "connection closed mid-frame");
  }
  return payload;
}

// ---- transports ------------------------------------------------------------

// One message at a time in each direction. Client code only ever sends a
// request and then receives its response.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void Send(const Json& message) = 0;
  virtual Json Receive() = 0;
};

class TcpTransport final : public Transport {
 public:
  TcpTransport(const std::string& host, std::uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string service = std::to_string(port);
    if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
      throw Error(ErrorCode::kTransport, "resolve " + host + ": " + ::gai_strerror(rc));
    }
    for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
      int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
        fd_ = fd;
        break;
      }
      ::close(fd);
    }
    ::freeaddrinfo(res);
    if (fd_ < 0) throw Error(ErrorCode::kTransport, "cannot connect to " + host + ":" + service);
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }

  TcpTransport(const TcpTransport&) = delete;
  TcpTransport& operator=(const TcpTransport&) = delete;
  ~TcpTransport() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void Send(const Json& message) override { WriteFrame(fd_, SerializeMessage(message)); }

  Json Receive() override {
    std::optional<std::string> frame = ReadFrame(fd_);
    if (!frame) throw Error(ErrorCode::kTransport, "server closed the connection");
    Json msg = Json::parse(*frame, nullptr, false);
    if (msg.is_discarded()) throw Error(ErrorCode::kTransport, "server sent invalid JSON");
    return msg;
  }

  int fd() const { return fd_; }

 private:
  int fd_ = -1;
};

// In-process transport that hands each request to a handler and records
// every message crossing it, in order. Used to prove that a query is exactly
// one request followed by one response.
class LoopbackTransport final : public Transport {
 public:
  enum class Direction { kClientToServer, kServerToClient };
  struct Record {
    Direction direction;
    Json message;
  };

  explicit LoopbackTransport(std::function<Json(const Json&)> handler)
      : handler_(std::move(handler)) {}

  void Send(const Json& message) override {
    // Round-trip through the serialized form so nothing non-wire leaks through.
    Json wire = Json::parse(SerializeMessage(message));
    log_.push_back({Direction::kClientToServer, wire});
    Json response = Json::parse(SerializeMessage(handler_(wire)));
    log_.push_back({Direction::kServerToClient, response});
    pending_.push_back(std::move(response));
  }

  Json Receive() override {
    if (pending_.empty()) throw Error(ErrorCode::kTransport, "no response pending");
    Json msg = std::move(pending_.front());
    pending_.erase(pending_.begin());
    return msg;
  }

  const std::vector<Record>& log() const { return log_; }
  std::size_t message_count() const { return log_.size(); }
  void ClearLog() { log_.clear(); }

 private:
  std::function<Json(const Json&)> handler_;
  std::vector<Record> log_;
  std::vector<Json> pending_;
};

}  // namespace hope

#endif  // HOPE_WIRE_HPP_
