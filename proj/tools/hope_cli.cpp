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

// hope: key lifecycle, ad-hoc crypto operations, KAT generation, benchmarks,
// and the client/server front ends.
//
// Exit codes: 0 ok, 2 usage / malformed input, 3 key error,
// 4 crypto error, 5 protocol or transport error.

#include <csignal>

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "hope/client.hpp"
#include "hope/hope.hpp"
#include "hope/kat.hpp"
#include "hope/keyfile.hpp"
#include "hope/ostore.hpp"
#include "hope/server.hpp"

namespace {

namespace fs = std::filesystem;
using hope::BigInt;
using hope::Error;
using hope::ErrorCode;
using hope::Json;

enum Exit : int { kOk = 0, kUsage = 2, kKeyError = 3, kCryptoError = 4, kProtocolError = 5 };

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadEncoding:
    case ErrorCode::kInvalidArgument:
      return kUsage;
    case ErrorCode::kKeyMismatch:
    case ErrorCode::kInvalidKey:
    case ErrorCode::kCorruptFile:
    case ErrorCode::kVersionMismatch:
    case ErrorCode::kBoundTooLarge:
      return kKeyError;
    case ErrorCode::kPlaintextOutOfRange:
    case ErrorCode::kMalformedCiphertext:
    case ErrorCode::kNotInvertible:
    case ErrorCode::kExhausted:
      return kCryptoError;
    case ErrorCode::kProtocol:
    case ErrorCode::kTransport:
      return kProtocolError;
  }
  return kCryptoError;
}

struct Globals {
  bool insecure = false;
  std::optional<std::uint64_t> seed;
};

void RequireInsecure(const Globals& g, const std::string& what) {
  if (!g.insecure) throw Error(ErrorCode::kInvalidArgument, what + " requires --insecure-test");
}

std::unique_ptr<hope::RandomSource> MakeRng(const Globals& g) {
  if (g.seed) {
    RequireInsecure(g, "--seed");
    return std::make_unique<hope::SeededRandom>(*g.seed);
  }
  return std::make_unique<hope::SecureRandom>();
}

// "@path" reads the value from a file.
std::string Resolve(const std::string& arg) {
  if (arg.empty() || arg[0] != '@') return arg;
  std::string text = hope::ReadTextFile(arg.substr(1));
  const auto end = text.find_last_not_of(" \t\r\n");
  return end == std::string::npos ? std::string() : text.substr(0, end + 1);
}

BigInt ParseDecimal(const std::string& raw) {
  static const std::regex kDecimal("-?(0|[1-9][0-9]*)");
  const std::string s = Resolve(raw);
  if (!std::regex_match(s, kDecimal) || s == "-0") {
    throw Error(ErrorCode::kBadEncoding, "not a decimal integer: '" + s + "'");
  }
  return BigInt(s, 10);
}

// Malformed fields inside key files are key errors, not usage errors.
template <typename F>
auto LoadKey(const fs::path& path, F&& load) {
  try {
    return load(hope::ReadDocument(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kBadEncoding) throw;
    throw Error(ErrorCode::kCorruptFile, path.string() + ": " + e.what());
  }
}

hope::PublicKey LoadPk(const std::string& path) {
  return LoadKey(path, [](const Json& j) { return hope::PublicKeyFromJson(j); });
}

hope::PrivateKey LoadSk(const std::string& path) {
  return LoadKey(path, [](const Json& j) { return hope::PrivateKeyFromJson(j); });
}

hope::ComparisonKey LoadCk(const std::string& path, const hope::PublicKey& pk) {
  return LoadKey(path, [&pk](const Json& j) { return hope::ComparisonKeyFromJson(j, pk); });
}

hope::Ciphertext LoadCiphertext(const hope::PublicKey& pk, const std::string& arg) {
  return hope::CiphertextFromHex(pk, Resolve(arg));
}

std::pair<std::string, std::uint16_t> ParseEndpoint(const std::string& s) {
  const auto colon = s.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "expected host:port, got " + s);
  const BigInt port = ParseDecimal(s.substr(colon + 1));
  if (port < 0 || port > 65535) throw Error(ErrorCode::kInvalidArgument, "port out of range");
  return {s.substr(0, colon), static_cast<std::uint16_t>(port.get_ui())};
}

// ---- keygen ------------------------------------------------------------------

struct KeygenArgs {
  std::size_t bits = hope::kDefaultModulusBits;
  std::string bound_m;
  std::string out_dir = ".";
  std::string test_p, test_q;
};

int CmdKeygen(const Globals& g, const KeygenArgs& a) {
  auto rng = MakeRng(g);
  std::optional<hope::KeyPair> keys;
  if (!a.test_p.empty() || !a.test_q.empty()) {
    RequireInsecure(g, "--test-p/--test-q");
    if (a.test_p.empty() || a.test_q.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "--test-p and --test-q go together");
    }
    keys.emplace(hope::insecure::KeyPairFromPrimes(hope::InsecureTestMode(), ParseDecimal(a.test_p),
                                                   ParseDecimal(a.test_q)));
  } else {
    if (a.bits < 1024) RequireInsecure(g, "--bits below 1024");
    keys.emplace(hope::paillier::KeyGen(a.bits, *rng));
  }
  const BigInt& n = keys->public_key.n();
  BigInt bound;
  if (!a.bound_m.empty()) {
    bound = ParseDecimal(a.bound_m);
  } else {
    // 2^63 unless the modulus is too small to support it.
    BigInt fallback = n / 8;
    bound = fallback < hope::DefaultComparisonBound() ? fallback : hope::DefaultComparisonBound();
    if (bound < 1) bound = 1;
  }
  hope::ComparisonKey ck = hope::GenerateComparisonKey(keys->private_key, bound, *rng);

  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  hope::WriteTextFile(dir / "public.json", hope::DumpDocument(hope::PublicKeyToJson(keys->public_key)));
  hope::WriteTextFile(dir / "private.json", hope::DumpDocument(hope::PrivateKeyToJson(keys->private_key)));
  hope::WriteTextFile(dir / "comparison.json", hope::DumpDocument(hope::ComparisonKeyToJson(ck)));
  std::cout << "fingerprint " << hope::FingerprintHex(keys->public_key.fingerprint()) << "\n"
            << "bits " << keys->public_key.bits() << "\n"
            << "m_bound " << bound.get_str() << "\n";
  return kOk;
}

// ---- ad-hoc operations -------------------------------------------------------

struct OpArgs {
  std::string pk, sk, ck;
  std::string m, c, a, b;
  bool show_blinded = false;
};

int CmdEnc(const Globals& g, const OpArgs& a) {
  auto rng = MakeRng(g);
  hope::PublicKey pk = LoadPk(a.pk);
  std::cout << hope::CiphertextToHex(hope::Encrypt(ParseDecimal(a.m), pk, *rng)) << "\n";
  return kOk;
}

int CmdDec(const OpArgs& a) {
  hope::PrivateKey sk = LoadSk(a.sk);
  std::cout << hope::Decrypt(LoadCiphertext(sk.public_key(), a.c), sk).get_str() << "\n";
  return kOk;
}

int CmdAddSub(const OpArgs& a, bool subtract) {
  hope::PublicKey pk = LoadPk(a.pk);
  hope::Ciphertext x = LoadCiphertext(pk, a.a), y = LoadCiphertext(pk, a.b);
  std::cout << hope::CiphertextToHex(subtract ? hope::EvalSub(x, y) : hope::EvalAdd(x, y)) << "\n";
  return kOk;
}

int CmdCmp(const OpArgs& a) {
  hope::PublicKey pk = LoadPk(a.pk);
  hope::ComparisonKey ck = LoadCk(a.ck, pk);
  hope::CmpResult r = hope::EvalCmp(LoadCiphertext(pk, a.a), LoadCiphertext(pk, a.b), ck, pk);
  std::cout << (r.sign < 0 ? "LT" : r.sign > 0 ? "GT" : "EQ") << "\n";
  if (a.show_blinded) std::cout << r.blinded_diff.get_str() << "\n";
  return kOk;
}

// ---- kat -----------------------------------------------------------------------

int CmdKat(std::uint64_t seed, const std::string& out) {
  const std::string text = hope::DumpDocument(hope::GenerateKat(seed));
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    hope::WriteTextFile(out, text);
  }
  return kOk;
}

// ---- bench ---------------------------------------------------------------------

struct BenchArgs {
  std::size_t bits = hope::kDefaultModulusBits;
  std::vector<std::string> ops{"all"};
  std::size_t count = 100;
  bool json = false;
};

struct BenchRow {
  std::string op;
  std::size_t count;
  double mean_us;
};

template <typename F>
BenchRow Time(const std::string& op, std::size_t count, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < count; ++i) body(i);
  const std::chrono::duration<double, std::micro> elapsed = std::chrono::steady_clock::now() - start;
  return {op, count, elapsed.count() / static_cast<double>(count)};
}

int CmdBench(const Globals& g, const BenchArgs& a) {
  static const std::vector<std::string> kAll = {"modpow", "enc", "dec", "add", "sub", "cmp",
                                                "cmp_prepared", "insert", "range"};
  std::vector<std::string> ops;
  for (const std::string& op : a.ops) {
    if (op == "all") {
      ops = kAll;
      break;
    }
    if (std::find(kAll.begin(), kAll.end(), op) == kAll.end()) {
      throw Error(ErrorCode::kInvalidArgument, "unknown bench op " + op);
    }
    ops.push_back(op);
  }
  if (a.count == 0) throw Error(ErrorCode::kInvalidArgument, "--count must be positive");
  if (a.bits < 1024) RequireInsecure(g, "--bits below 1024");

  auto rng = MakeRng(g);
  hope::KeyPair keys = hope::paillier::KeyGen(a.bits, *rng);
  const hope::PublicKey& pk = keys.public_key;
  BigInt bound = pk.n() / 8;
  if (bound > hope::DefaultComparisonBound()) bound = hope::DefaultComparisonBound();
  if (bound < 1) bound = 1;
  hope::ComparisonKey ck = hope::GenerateComparisonKey(keys.private_key, bound, *rng);

  std::vector<BigInt> plains;
  std::vector<hope::Ciphertext> cts;
  for (std::size_t i = 0; i < a.count + 1; ++i) {
    plains.push_back(hope::RandomBelow(2 * bound + 1, *rng) - bound);
    cts.push_back(hope::Encrypt(plains.back(), pk, *rng));
  }

  std::vector<BenchRow> rows;
  for (const std::string& op : ops) {
    if (op == "modpow") {
      // Reference cost: one n-sized exponent modulo n^2.
      std::vector<BigInt> exps;
      for (std::size_t i = 0; i < a.count; ++i) exps.push_back(hope::RandomBelow(pk.n(), *rng));
      rows.push_back(Time(op, a.count, [&](std::size_t i) {
        (void)hope::ModPow(cts[i].value(), exps[i], pk.n_squared());
      }));
    } else if (op == "enc") {
      rows.push_back(Time(op, a.count, [&](std::size_t i) { (void)hope::Encrypt(plains[i], pk, *rng); }));
    } else if (op == "dec") {
      rows.push_back(Time(op, a.count, [&](std::size_t i) { (void)hope::Decrypt(cts[i], keys.private_key); }));
    } else if (op == "add") {
      rows.push_back(Time(op, a.count, [&](std::size_t i) { (void)hope::EvalAdd(cts[i], cts[i + 1]); }));
    } else if (op == "sub") {
      rows.push_back(Time(op, a.count, [&](std::size_t i) { (void)hope::EvalSub(cts[i], cts[i + 1]); }));
    } else if (op == "cmp") {
      rows.push_back(Time(op, a.count, [&](std::size_t i) { (void)hope::EvalCmp(cts[i], cts[i + 1], ck, pk); }));
    } else if (op == "cmp_prepared") {
      std::vector<hope::PreparedKey> prepared;
      for (const auto& c : cts) prepared.push_back(hope::Prepare(c, ck, pk));
      rows.push_back(Time(op, a.count, [&](std::size_t i) {
        (void)hope::EvalCmp(prepared[i], prepared[i + 1], ck, pk);
      }));
    } else if (op == "insert" || op == "range") {
      hope::EncryptedIndex index(pk, ck);
      BenchRow insert = Time("insert", a.count, [&](std::size_t i) { index.Insert(cts[i], {}); });
      if (op == "insert") {
        rows.push_back(insert);
      } else {
        rows.push_back(Time(op, a.count, [&](std::size_t i) {
          // The querying client knows its own bounds.
          const bool ordered = plains[i] <= plains[i + 1];
          (void)index.Range(cts[ordered ? i : i + 1], cts[ordered ? i + 1 : i]);
        }));
      }
    }
  }

  if (a.json) {
    Json out{{"bits", pk.bits()}, {"rows", Json::array()}};
    for (const BenchRow& r : rows) {
      out["rows"].push_back(Json{{"op", r.op},
                                 {"count", r.count},
                                 {"mean_us", r.mean_us},
                                 {"ops_per_s", 1e6 / r.mean_us}});
    }
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "bits " << pk.bits() << "\n";
    std::cout << std::left << std::setw(14) << "op" << std::right << std::setw(8) << "count"
              << std::setw(14) << "mean_us" << std::setw(14) << "ops/s" << "\n";
    for (const BenchRow& r : rows) {
      std::cout << std::left << std::setw(14) << r.op << std::right << std::setw(8) << r.count
                << std::setw(14) << std::fixed << std::setprecision(1) << r.mean_us << std::setw(14)
                << std::setprecision(1) << 1e6 / r.mean_us << "\n";
    }
  }
  return kOk;
}

// ---- serve ---------------------------------------------------------------------

std::atomic<hope::TcpServer*> g_running{nullptr};

extern "C" void OnSignal(int) {
  if (hope::TcpServer* s = g_running.load()) s->Stop();
}

struct ServeArgs {
  std::string listen = "127.0.0.1:7878";
  std::string restore;
  std::string snapshot_path;
  bool no_prepared_cache = false;
};

int CmdServe(const ServeArgs& a) {
  hope::ServerOptions options;
  options.index.cache_prepared_keys = !a.no_prepared_cache;
  options.default_snapshot_path = a.snapshot_path;
  std::unique_ptr<hope::Server> server = a.restore.empty()
                                             ? std::make_unique<hope::Server>(options)
                                             : hope::Server::Restore(a.restore, options);
  auto [host, port] = ParseEndpoint(a.listen);
  hope::TcpServer tcp(*server, host, port);
  g_running.store(&tcp);
  std::signal(SIGINT, OnSignal);
  std::signal(SIGTERM, OnSignal);
  std::cout << "listening " << host << ":" << tcp.port() << std::endl;
  tcp.Run();
  g_running.store(nullptr);
  if (!a.snapshot_path.empty()) {
    server->Snapshot(a.snapshot_path);
    std::cout << "snapshot " << a.snapshot_path << std::endl;
  }
  return kOk;
}

// ---- client --------------------------------------------------------------------

struct ClientArgs {
  std::string server = "127.0.0.1:7878";
  std::string pk, sk, ck, bound_m;
  std::string m, payload, payload_b64;
  std::string lo, hi;
  bool lo_exclusive = false, hi_exclusive = false;
  std::optional<std::uint64_t> old_epoch;
  std::string ck_out, path;
};

int CmdClient(const Globals& g, const std::string& action, const ClientArgs& a) {
  auto rng = MakeRng(g);
  hope::PublicKey pk = LoadPk(a.pk);
  std::optional<hope::PrivateKey> sk;
  if (!a.sk.empty()) sk = LoadSk(a.sk);
  std::optional<hope::ComparisonKey> ck;
  if (!a.ck.empty()) ck = LoadCk(a.ck, pk);
  auto [host, port] = ParseEndpoint(a.server);
  hope::TcpTransport transport(host, port);

  // The client keeps no state, so M comes from a key file, a flag, or the
  // server's STATS answer.
  BigInt bound;
  if (ck) {
    bound = ck->bound_m;
  } else if (!a.bound_m.empty()) {
    bound = ParseDecimal(a.bound_m);
  } else if (action == "insert" || action == "range") {
    hope::Client probe(transport, pk, std::nullopt, 1, *rng);
    hope::ServerStatus status = probe.Stats();
    if (!status.initialized) throw hope::ServerError("not-initialized", "SETUP has not been performed");
    bound = status.bound_m;
  } else {
    bound = 1;
  }
  hope::Client client(transport, pk, sk, bound, *rng);

  if (action == "setup") {
    if (!ck) throw Error(ErrorCode::kInvalidArgument, "setup needs --ck");
    hope::SetupAck ack = client.Setup(*ck);
    std::cout << "fingerprint " << hope::FingerprintHex(ack.fingerprint) << "\n"
              << "epoch " << ack.epoch << "\n"
              << "m_bound " << ack.bound_m.get_str() << "\n";
  } else if (action == "insert") {
    std::vector<std::uint8_t> payload =
        a.payload_b64.empty() ? std::vector<std::uint8_t>(a.payload.begin(), a.payload.end())
                              : hope::Base64Decode(Resolve(a.payload_b64));
    std::cout << "entry_id " << client.Insert(ParseDecimal(a.m), payload) << "\n";
  } else if (action == "range") {
    hope::RangeOptions opts{!a.lo_exclusive, !a.hi_exclusive};
    for (const hope::RangeRow& r : client.Range(ParseDecimal(a.lo), ParseDecimal(a.hi), opts)) {
      std::cout << r.entry_id << "\t"
                << (r.plaintext ? r.plaintext->get_str() : hope::CiphertextToHex(r.key)) << "\t"
                << hope::Base64Encode(r.payload) << "\n";
    }
  } else if (action == "group-by") {
    for (const hope::GroupRow& r : client.GroupBy()) {
      std::cout << (r.plaintext ? r.plaintext->get_str() : hope::CiphertextToHex(r.representative))
                << "\t" << r.count << "\n";
    }
  } else if (action == "rotate-ck") {
    if (!sk) throw Error(ErrorCode::kInvalidArgument, "rotate-ck needs --sk");
    std::uint64_t old_epoch;
    if (a.old_epoch) {
      old_epoch = *a.old_epoch;
    } else if (ck) {
      old_epoch = ck->epoch;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "rotate-ck needs --old-epoch or --ck");
    }
    if (!ck) {
      // Rotation keeps M; learn it from the server.
      hope::ServerStatus status = client.Stats();
      hope::Client rotating(transport, pk, sk, status.bound_m, *rng);
      hope::ComparisonKey next = rotating.RotateComparisonKey(*sk, old_epoch);
      ck = next;
    } else {
      ck = client.RotateComparisonKey(*sk, old_epoch);
    }
    const std::string doc = hope::DumpDocument(hope::ComparisonKeyToJson(*ck));
    if (a.ck_out.empty()) {
      std::cout << doc;
    } else {
      hope::WriteTextFile(a.ck_out, doc);
      std::cout << "epoch " << ck->epoch << "\n";
    }
  } else if (action == "stats") {
    hope::ServerStatus s = client.Stats();
    std::cout << "initialized " << (s.initialized ? "true" : "false") << "\n";
    if (s.initialized) {
      std::cout << "size " << s.stats.size << "\n"
                << "comparisons " << s.stats.comparisons << "\n"
                << "depth " << s.stats.depth << "\n"
                << "epoch " << s.epoch << "\n"
                << "m_bound " << s.bound_m.get_str() << "\n"
                << "fingerprint " << hope::FingerprintHex(s.fingerprint) << "\n";
    }
  } else if (action == "snapshot") {
    std::cout << "snapshot " << client.Snapshot(a.path) << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HOPE: order-revealing Paillier encryption toolkit", "hope"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed = 0;
  app.add_flag("--insecure-test", g.insecure, "Allow test primes, seeded randomness and small keys");
  auto* seed_opt = app.add_option("--seed", seed, "Deterministic randomness (needs --insecure-test)");

  KeygenArgs keygen;
  auto* c_keygen = app.add_subcommand("keygen", "Generate public, private and comparison key files");
  c_keygen->add_option("--bits", keygen.bits, "Modulus size")->capture_default_str();
  c_keygen->add_option("--bound-m", keygen.bound_m, "Plaintext bound M for comparisons (decimal)");
  c_keygen->add_option("--out-dir", keygen.out_dir, "Output directory")->capture_default_str();
  c_keygen->add_option("--test-p", keygen.test_p, "Explicit prime p (test mode)");
  c_keygen->add_option("--test-q", keygen.test_q, "Explicit prime q (test mode)");

  OpArgs op;
  auto* c_enc = app.add_subcommand("enc", "Encrypt a signed decimal plaintext");
  c_enc->add_option("--pk", op.pk, "Public key file")->required();
  c_enc->add_option("--m", op.m, "Plaintext (decimal or @file)")->required();
  auto* c_dec = app.add_subcommand("dec", "Decrypt a hex ciphertext");
  c_dec->add_option("--sk", op.sk, "Private key file")->required();
  c_dec->add_option("--c", op.c, "Ciphertext (hex or @file)")->required();
  auto* c_add = app.add_subcommand("add", "Homomorphic addition");
  auto* c_sub = app.add_subcommand("sub", "Homomorphic subtraction a - b");
  for (auto* c : {c_add, c_sub}) {
    c->add_option("--pk", op.pk, "Public key file")->required();
    c->add_option("--a", op.a, "Ciphertext (hex or @file)")->required();
    c->add_option("--b", op.b, "Ciphertext (hex or @file)")->required();
  }
  auto* c_cmp = app.add_subcommand("cmp", "Compare two ciphertexts: LT, EQ or GT");
  c_cmp->add_option("--pk", op.pk, "Public key file")->required();
  c_cmp->add_option("--ck", op.ck, "Comparison key file")->required();
  c_cmp->add_option("--a", op.a, "Ciphertext (hex or @file)")->required();
  c_cmp->add_option("--b", op.b, "Ciphertext (hex or @file)")->required();
  c_cmp->add_flag("--show-blinded", op.show_blinded, "Also print the blinded difference");

  std::uint64_t kat_seed = 1;
  std::string kat_out;
  auto* c_kat = app.add_subcommand("kat", "Emit deterministic known-answer vectors (n = 35)");
  c_kat->add_option("--seed", kat_seed, "Seed")->capture_default_str();
  c_kat->add_option("--out", kat_out, "Output file (default stdout)");

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Measure operation latency");
  c_bench->add_option("--bits", bench.bits, "Modulus size")->capture_default_str();
  c_bench->add_option("--ops", bench.ops, "modpow, enc, dec, add, sub, cmp, cmp_prepared, insert, range, all")
      ->delimiter(',');
  c_bench->add_option("--count", bench.count, "Operations per row")->capture_default_str();
  c_bench->add_flag("--json", bench.json, "Machine-readable output");

  ServeArgs serve;
  auto* c_serve = app.add_subcommand("serve", "Run the encrypted-index server");
  c_serve->add_option("--listen", serve.listen, "host:port (port 0 picks one)")->capture_default_str();
  c_serve->add_option("--restore", serve.restore, "Snapshot to restore at start");
  c_serve->add_option("--snapshot-path", serve.snapshot_path, "Default SNAPSHOT path; written at shutdown");
  c_serve->add_flag("--no-prepared-cache", serve.no_prepared_cache, "Exponentiate on every comparison");

  ClientArgs client;
  std::uint64_t old_epoch = 0;
  auto* c_client = app.add_subcommand("client", "Run one client action against a server");
  c_client->require_subcommand(1);
  c_client->add_option("--server", client.server, "host:port")->capture_default_str();
  c_client->add_option("--pk", client.pk, "Public key file")->required();
  c_client->add_option("--sk", client.sk, "Private key file (decrypts results)");
  c_client->add_option("--ck", client.ck, "Comparison key file");
  c_client->add_option("--bound-m", client.bound_m, "Plaintext bound M (decimal)");
  c_client->add_subcommand("setup", "Send pk and ck to the server");
  auto* a_insert = c_client->add_subcommand("insert", "Insert one row");
  a_insert->add_option("--m", client.m, "Key plaintext (decimal or @file)")->required();
  a_insert->add_option("--payload", client.payload, "Payload text");
  a_insert->add_option("--payload-b64", client.payload_b64, "Payload as base64");
  auto* a_range = c_client->add_subcommand("range", "Rows with lo <= key <= hi");
  a_range->add_option("--lo", client.lo, "Lower bound (decimal)")->required();
  a_range->add_option("--hi", client.hi, "Upper bound (decimal)")->required();
  a_range->add_flag("--lo-exclusive", client.lo_exclusive);
  a_range->add_flag("--hi-exclusive", client.hi_exclusive);
  c_client->add_subcommand("group-by", "Count rows per distinct key");
  auto* a_rotate = c_client->add_subcommand("rotate-ck", "Install a fresh comparison key");
  auto* epoch_opt = a_rotate->add_option("--old-epoch", old_epoch, "Epoch the server is at");
  a_rotate->add_option("--ck-out", client.ck_out, "Where to write the new comparison key");
  c_client->add_subcommand("stats", "Server statistics");
  auto* a_snapshot = c_client->add_subcommand("snapshot", "Ask the server to write a snapshot");
  a_snapshot->add_option("--path", client.path, "Server-side path");

  // Client-level options may also follow the action.
  for (CLI::App* action : c_client->get_subcommands([](CLI::App*) { return true; })) action->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  if (*seed_opt) g.seed = seed;
  if (*epoch_opt) client.old_epoch = old_epoch;

  try {
    if (*c_keygen) return CmdKeygen(g, keygen);
    if (*c_enc) return CmdEnc(g, op);
    if (*c_dec) return CmdDec(op);
    if (*c_add) return CmdAddSub(op, false);
    if (*c_sub) return CmdAddSub(op, true);
    if (*c_cmp) return CmdCmp(op);
    if (*c_kat) return CmdKat(kat_seed, kat_out);
    if (*c_bench) return CmdBench(g, bench);
    if (*c_serve) return CmdServe(serve);
    if (*c_client) return CmdClient(g, c_client->get_subcommands().front()->get_name(), client);
  } catch (const hope::ServerError& e) {
    std::cerr << "hope: server error: " << e.remote_code() << ": " << e.what() << "\n";
    return kProtocolError;
  } catch (const Error& e) {
    std::cerr << "hope: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "hope: " << e.what() << "\n";
    return kCryptoError;
  }
  return kUsage;
}
