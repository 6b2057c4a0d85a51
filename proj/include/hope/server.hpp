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

#ifndef HOPE_SERVER_HPP_
#define HOPE_SERVER_HPP_

// Outsourced-database server. It holds the public key, the comparison key
// and the encrypted index, and nothing else: no factor of n, no phi(n), no
// plaintext. All ordering work for INSERT, RANGE and GROUP_BY happens here
// without contacting the client.
//
// Concurrency: SETUP, INSERT and ROTATE_CK take the state lock exclusively;
// RANGE, GROUP_BY, STATS and SNAPSHOT share it.

#include <fcntl.h>

#include <atomic>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "hope/encoding.hpp"
#include "hope/error.hpp"
#include "hope/hope.hpp"
#include "hope/keyfile.hpp"
#include "hope/ostore.hpp"
#include "hope/wire.hpp"

namespace hope {

inline constexpr std::uint64_t kSnapshotVersion = 1;

struct ServerOptions {
  IndexOptions index;
  // Used by SNAPSHOT requests that do not name a path.
  std::filesystem::path default_snapshot_path;
};

namespace detail {

inline std::string WireErrorCode(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCorruptFile:
    case ErrorCode::kInvalidArgument:
      return "bad-request";
    default:
      return std::string(ErrorCodeName(code));
  }
}

inline Json EntryToJson(const IndexEntry& e) {
  return Json{{"id", e.entry_id},
              {"key_hex", CiphertextToHex(e.key)},
              {"payload_b64", Base64Encode(e.payload)}};
}

inline bool OptionalBool(const Json& body, const char* name, bool fallback) {
  auto it = body.find(name);
  if (it == body.end()) return fallback;
  if (!it->is_boolean()) throw Error(ErrorCode::kCorruptFile, std::string(name) + " must be boolean");
  return it->get<bool>();
}

}  // namespace detail

class Server {
 public:
  explicit Server(ServerOptions options = {}) : options_(std::move(options)) {}

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Rebuilds a server from a snapshot file by re-inserting every entry in
  // the stored order.
  static std::unique_ptr<Server> Restore(const std::filesystem::path& path,
                                         ServerOptions options = {}) {
    auto server = std::make_unique<Server>(std::move(options));
    server->LoadSnapshot(ReadDocument(path));
    return server;
  }

  // Handles one decoded request. Never throws; failures become ERROR
  // messages and leave the state untouched.
  Json Handle(const Json& request) {
    std::optional<Fingerprint> fp = CurrentFingerprint();
    try {
      return Dispatch(request);
    } catch (const Error& e) {
      return MakeErrorMessage(detail::WireErrorCode(e.code()), e.what(), fp);
    } catch (const std::exception& e) {
      return MakeErrorMessage("internal", e.what(), fp);
    }
  }

  // Handles one raw frame payload.
  std::string HandleFrame(std::string_view payload) {
    Json request = Json::parse(payload, nullptr, false);
    if (request.is_discarded()) {
      return SerializeMessage(MakeErrorMessage("bad-encoding", "frame is not valid JSON",
                                               CurrentFingerprint()));
    }
    return SerializeMessage(Handle(request));
  }

  Json SnapshotDocument() const {
    std::shared_lock lock(mu_);
    Json doc{{"version", kSnapshotVersion}, {"pk", nullptr}, {"ck", nullptr}, {"entries", Json::array()}};
    if (state_) {
      doc["pk"] = PublicKeyToJson(state_->index.public_key());
      doc["ck"] = ComparisonKeyToJson(state_->index.comparison_key());
      for (const IndexEntry& e : state_->index.Entries()) doc["entries"].push_back(detail::EntryToJson(e));
    }
    return doc;
  }

  void Snapshot(const std::filesystem::path& path) const {
    const std::string text = DumpDocument(SnapshotDocument());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    WriteTextFile(tmp, text);
    std::filesystem::rename(tmp, path);
  }

  bool initialized() const {
    std::shared_lock lock(mu_);
    return state_ != nullptr;
  }

  std::optional<IndexStats> stats() const {
    std::shared_lock lock(mu_);
    if (!state_) return std::nullopt;
    return state_->index.Stats();
  }

  // Read-only view for in-process inspection; nullptr before SETUP.
  // The caller must not hold it across concurrent mutations.
  const EncryptedIndex* index() const {
    std::shared_lock lock(mu_);
    return state_ ? &state_->index : nullptr;
  }

 private:
  struct State {
    EncryptedIndex index;
  };

  std::optional<Fingerprint> CurrentFingerprint() const {
    std::shared_lock lock(mu_);
    if (!state_) return std::nullopt;
    return state_->index.public_key().fingerprint();
  }

  Json Dispatch(const Json& request) {
    if (!request.is_object()) throw Error(ErrorCode::kCorruptFile, "message must be an object");
    const std::string type_name = detail::RequireString(request, "type");
    std::optional<MessageType> type = ParseMessageType(type_name);
    if (!type) throw Error(ErrorCode::kCorruptFile, "unknown message type " + type_name);
    if (detail::RequireUnsigned(request, "protocol_version") != kProtocolVersion) {
      return MakeErrorMessage("unsupported-version", "protocol_version must be 1", CurrentFingerprint());
    }
    const Json& body = detail::RequireField(request, "body");
    if (!body.is_object()) throw Error(ErrorCode::kCorruptFile, "body must be an object");

    switch (*type) {
      case MessageType::kSetup: return HandleSetup(request, body);
      case MessageType::kStats: return HandleStats();
      case MessageType::kInsert: return HandleInsert(request, body);
      case MessageType::kRange: return HandleRange(request, body);
      case MessageType::kGroupBy: return HandleGroupBy(request);
      case MessageType::kRotateCk: return HandleRotate(request, body);
      case MessageType::kSnapshot: return HandleSnapshot(request, body);
      default:
        throw Error(ErrorCode::kCorruptFile, type_name + " is not a request type");
    }
  }

  // Precondition: lock held. Returns an ERROR message if the request may not
  // proceed.
  std::optional<Json> CheckSession(const Json& request) const {
    if (!state_) return MakeErrorMessage("not-initialized", "SETUP has not been performed");
    const Fingerprint& fp = state_->index.public_key().fingerprint();
    auto it = request.find("key_fingerprint");
    if (it == request.end() || !it->is_string()) {
      return MakeErrorMessage("bad-request", "missing key_fingerprint", fp);
    }
    if (it->get<std::string>() != FingerprintHex(fp)) {
      return MakeErrorMessage("key-mismatch", "request is for a different key", fp);
    }
    return std::nullopt;
  }

  Json HandleSetup(const Json& request, const Json& body) {
    PublicKey pk = PublicKeyFromJson(detail::RequireField(body, "public_key"));
    ComparisonKey ck = ComparisonKeyFromJson(detail::RequireField(body, "comparison_key"));
    if (auto it = request.find("key_fingerprint");
        it != request.end() && (!it->is_string() || it->get<std::string>() != FingerprintHex(pk.fingerprint()))) {
      throw Error(ErrorCode::kKeyMismatch, "key_fingerprint does not match the public key");
    }
    ValidateComparisonKey(ck, pk);
    std::unique_lock lock(mu_);
    if (state_) {
      return MakeErrorMessage("already-initialized", "server already holds keys",
                              state_->index.public_key().fingerprint());
    }
    state_ = std::make_unique<State>(State{EncryptedIndex(pk, ck, options_.index)});
    return MakeMessage(MessageType::kAck,
                       Json{{"fingerprint_hex", FingerprintHex(pk.fingerprint())},
                            {"m_bound_hex", ToHex(ck.bound_m)},
                            {"epoch", ck.epoch}},
                       pk.fingerprint());
  }

  Json HandleStats() const {
    std::shared_lock lock(mu_);
    if (!state_) return MakeMessage(MessageType::kResult, Json{{"initialized", false}});
    const EncryptedIndex& idx = state_->index;
    IndexStats s = idx.Stats();
    return MakeMessage(MessageType::kResult,
                       Json{{"initialized", true},
                            {"size", s.size},
                            {"comparisons", s.comparisons},
                            {"depth", s.depth},
                            {"epoch", idx.comparison_key().epoch},
                            {"m_bound_hex", ToHex(idx.comparison_key().bound_m)},
                            {"fingerprint_hex", FingerprintHex(idx.public_key().fingerprint())}},
                       idx.public_key().fingerprint());
  }

  Json HandleInsert(const Json& request, const Json& body) {
    std::unique_lock lock(mu_);
    if (auto err = CheckSession(request)) return *err;
    EncryptedIndex& idx = state_->index;
    Ciphertext key = CiphertextFromHex(idx.public_key(), detail::RequireString(body, "key_hex"));
    std::vector<std::uint8_t> payload = Base64Decode(detail::RequireString(body, "payload_b64"));
    std::uint64_t id = idx.Insert(std::move(key), std::move(payload));
    return MakeMessage(MessageType::kAck, Json{{"entry_id", id}}, idx.public_key().fingerprint());
  }

  Json HandleRange(const Json& request, const Json& body) const {
    std::shared_lock lock(mu_);
    if (auto err = CheckSession(request)) return *err;
    const EncryptedIndex& idx = state_->index;
    Ciphertext lo = CiphertextFromHex(idx.public_key(), detail::RequireString(body, "lo_hex"));
    Ciphertext hi = CiphertextFromHex(idx.public_key(), detail::RequireString(body, "hi_hex"));
    RangeOptions opts{detail::OptionalBool(body, "lo_inclusive", true),
                      detail::OptionalBool(body, "hi_inclusive", true)};
    Json entries = Json::array();
    for (const IndexEntry& e : idx.Range(lo, hi, opts)) entries.push_back(detail::EntryToJson(e));
    return MakeMessage(MessageType::kResult, Json{{"entries", std::move(entries)}},
                       idx.public_key().fingerprint());
  }

  Json HandleGroupBy(const Json& request) const {
    std::shared_lock lock(mu_);
    if (auto err = CheckSession(request)) return *err;
    const EncryptedIndex& idx = state_->index;
    Json groups = Json::array();
    for (const GroupCount& g : idx.GroupBy()) {
      groups.push_back(Json{{"key_hex", CiphertextToHex(g.representative)}, {"count", g.count}});
    }
    return MakeMessage(MessageType::kResult, Json{{"groups", std::move(groups)}},
                       idx.public_key().fingerprint());
  }

  Json HandleRotate(const Json& request, const Json& body) {
    std::unique_lock lock(mu_);
    if (auto err = CheckSession(request)) return *err;
    EncryptedIndex& idx = state_->index;
    const Fingerprint& fp = idx.public_key().fingerprint();
    const std::uint64_t old_epoch = detail::RequireUnsigned(body, "old_epoch");
    ComparisonKey next = ComparisonKeyFromJson(detail::RequireField(body, "comparison_key"));
    const ComparisonKey& current = idx.comparison_key();
    if (old_epoch != current.epoch || next.epoch != current.epoch + 1) {
      return MakeErrorMessage("stale-epoch",
                              "server is at epoch " + std::to_string(current.epoch), fp);
    }
    if (next.bound_m != current.bound_m) {
      throw Error(ErrorCode::kInvalidKey, "rotation must keep the comparison bound");
    }
    ValidateComparisonKey(next, idx.public_key());
    idx.ReplaceComparisonKey(std::move(next));
    return MakeMessage(MessageType::kAck, Json{{"epoch", idx.comparison_key().epoch}}, fp);
  }

  Json HandleSnapshot(const Json& request, const Json& body) const {
    std::filesystem::path path = options_.default_snapshot_path;
    if (auto it = body.find("path"); it != body.end()) {
      if (!it->is_string()) throw Error(ErrorCode::kCorruptFile, "path must be a string");
      path = it->get<std::string>();
    }
    if (path.empty()) throw Error(ErrorCode::kInvalidArgument, "no snapshot path given or configured");
    std::optional<Fingerprint> fp;
    {
      std::shared_lock lock(mu_);
      if (auto err = CheckSession(request)) return *err;
      fp = state_->index.public_key().fingerprint();
    }
    Snapshot(path);
    return MakeMessage(MessageType::kAck, Json{{"path", path.string()}}, fp);
  }

  void LoadSnapshot(const Json& doc) {
    if (!doc.is_object()) throw Error(ErrorCode::kCorruptFile, "snapshot must be an object");
    if (detail::RequireUnsigned(doc, "version") != kSnapshotVersion) {
      throw Error(ErrorCode::kVersionMismatch, "unsupported snapshot version");
    }
    const Json& pk_doc = detail::RequireField(doc, "pk");
    const Json& ck_doc = detail::RequireField(doc, "ck");
    const Json& entries = detail::RequireField(doc, "entries");
    if (!entries.is_array()) throw Error(ErrorCode::kCorruptFile, "entries must be an array");
    if (pk_doc.is_null() && ck_doc.is_null()) {
      if (!entries.empty()) throw Error(ErrorCode::kCorruptFile, "entries without keys");
      return;
    }
    try {
      PublicKey pk = PublicKeyFromJson(pk_doc);
      ComparisonKey ck = ComparisonKeyFromJson(ck_doc, pk);
      EncryptedIndex index(pk, ck, options_.index);
      std::set<std::uint64_t> seen;
      for (const Json& e : entries) {
        const std::uint64_t id = detail::RequireUnsigned(e, "id");
        if (!seen.insert(id).second) throw Error(ErrorCode::kCorruptFile, "duplicate entry id");
        index.InsertWithId(IndexEntry{CiphertextFromHex(pk, detail::RequireString(e, "key_hex")),
                                      Base64Decode(detail::RequireString(e, "payload_b64")), id});
      }
      std::unique_lock lock(mu_);
      state_ = std::make_unique<State>(State{std::move(index)});
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kVersionMismatch) throw;
      throw Error(ErrorCode::kCorruptFile, std::string("snapshot: ") + e.what());
    }
  }

  ServerOptions options_;
  mutable std::shared_mutex mu_;
  std::unique_ptr<State> state_;
};

// Blocking TCP front end: one thread per connection, each looping over
// framed requests until the peer disconnects or Stop() is called.
class TcpServer {
 public:
  TcpServer(Server& server, const std::string& host, std::uint16_t port) : server_(server) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    const std::string service = std::to_string(port);
    if (int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(), service.c_str(), &hints, &res);
        rc != 0) {
      throw Error(ErrorCode::kTransport, std::string("resolve: ") + ::gai_strerror(rc));
    }
    for (addrinfo* ai = res; ai != nullptr && listen_fd_ < 0; ai = ai->ai_next) {
      int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
      if (fd < 0) continue;
      int one = 1;
      ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
      if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 64) == 0) {
        listen_fd_ = fd;
      } else {
        ::close(fd);
      }
    }
    ::freeaddrinfo(res);
    if (listen_fd_ < 0) throw Error(ErrorCode::kTransport, "cannot listen on " + host + ":" + service);
    sockaddr_storage addr{};
    socklen_t len = sizeof(addr);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.ss_family == AF_INET6 ? reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port
                                             : reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
  }

  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  ~TcpServer() {
    Stop();
    JoinConnections();
    if (listen_fd_ >= 0) ::close(listen_fd_);
  }

  std::uint16_t port() const { return port_; }

  // Accepts connections until Stop().
  void Run() {
    while (!stopping_.load()) {
      pollfd pfd{listen_fd_, POLLIN, 0};
      int rc = ::poll(&pfd, 1, 100);
      if (rc <= 0) continue;
      int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd < 0) continue;
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
      std::lock_guard lock(threads_mu_);
      threads_.emplace_back([this, fd] { ServeConnection(fd); });
    }
    JoinConnections();
  }

  void Stop() { stopping_.store(true); }

 private:
  void ServeConnection(int fd) {
    try {
      while (!stopping_.load()) {
        pollfd pfd{fd, POLLIN, 0};
        int rc = ::poll(&pfd, 1, 100);
        if (rc == 0) continue;
        if (rc < 0) break;
        std::optional<std::string> frame = ReadFrame(fd);
        if (!frame) break;
        WriteFrame(fd, server_.HandleFrame(*frame));
      }
    } catch (const Error&) {
      // Framing broke (oversized or truncated frame); drop the connection.
    }
    ::close(fd);
  }

  void JoinConnections() {
    std::vector<std::thread> threads;
    {
      std::lock_guard lock(threads_mu_);
      threads.swap(threads_);
    }
    for (std::thread& t : threads) {
      if (t.joinable()) t.join();
    }
  }

  Server& server_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::mutex threads_mu_;
  std::vector<std::thread> threads_;
};

}  // namespace hope

#endif  // HOPE_SERVER_HPP_
