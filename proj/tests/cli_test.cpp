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

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "hope/hope.hpp"
#include "hope/kat.hpp"
#include "hope/keyfile.hpp"
#include "hope/wire.hpp"

namespace {

namespace fs = std::filesystem;
using ::hope::BigInt;
using ::hope::Json;

struct Result {
  int rc = -1;
  std::string out;
  std::string err;
};

std::string Quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hope_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result Run(const std::vector<std::string>& args) {
    std::string cmd = Quote(HOPE_CLI_PATH);
    for (const auto& a : args) cmd += " " + Quote(a);
    const fs::path err = dir_ / "stderr.txt";
    cmd += " 2>" + Quote(err.string());
    Result r;
    FILE* p = ::popen(cmd.c_str(), "r");
    if (p == nullptr) return r;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof(buf), p)) > 0) r.out.append(buf, n);
    const int status = ::pclose(p);
    r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = hope::ReadTextFile(err);
    return r;
  }

  std::string Ok(const std::vector<std::string>& args) {
    Result r = Run(args);
    EXPECT_EQ(r.rc, 0) << r.err;
    if (!r.out.empty() && r.out.back() == '\n') r.out.pop_back();
    return r.out;
  }

  // Toy keys: n = 35, M = 2 (comparison key from the CLI, eta <= 4).
  fs::path ToyKeys() {
    const fs::path d = dir_ / "toy";
    Ok({"--insecure-test", "keygen", "--test-p", "5", "--test-q", "7", "--bound-m", "2", "--out-dir",
        d.string()});
    return d;
  }
  fs::path MediumKeys(const std::string& seed = "11") {
    const fs::path d = dir_ / ("medium" + seed);
    Ok({"--insecure-test", "--seed", seed, "keygen", "--bits", "512", "--bound-m", "1000000", "--out-dir",
        d.string()});
    return d;
  }

  fs::path dir_;
};

TEST_F(CliTest, KeygenWithTestPrimes) {
  fs::path d = ToyKeys();
  Json pk = hope::ReadDocument(d / "public.json");
  EXPECT_EQ(pk.at("n_hex"), "23");
  Json sk = hope::ReadDocument(d / "private.json");
  EXPECT_EQ(sk.at("p_hex"), "5");
  EXPECT_EQ(sk.at("q_hex"), "7");
  for (const char* name : {"public.json", "private.json", "comparison.json"}) {
    // write -> read -> write is byte-identical
    std::string text = hope::ReadTextFile(d / name);
    Json j = hope::ParseDocument(text);
    std::string again;
    if (j.at("kind") == "public") again = hope::DumpDocument(hope::PublicKeyToJson(hope::PublicKeyFromJson(j)));
    if (j.at("kind") == "private") again = hope::DumpDocument(hope::PrivateKeyToJson(hope::PrivateKeyFromJson(j)));
    if (j.at("kind") == "comparison") {
      again = hope::DumpDocument(hope::ComparisonKeyToJson(
          hope::ComparisonKeyFromJson(j, hope::LoadPublicKey(d / "public.json"))));
    }
    EXPECT_EQ(again, text) << name;
  }
}

TEST_F(CliTest, KeygenRejections) {
  Result r = Run({"--insecure-test", "keygen", "--test-p", "3", "--test-q", "7", "--out-dir", (dir_ / "x").string()});
  EXPECT_EQ(r.rc, 3);
  EXPECT_NE(r.err.find("p divides q - 1"), std::string::npos) << r.err;
  EXPECT_EQ(Run({"keygen", "--test-p", "5", "--test-q", "7", "--out-dir", (dir_ / "y").string()}).rc, 2);
  EXPECT_EQ(Run({"keygen", "--bits", "512", "--out-dir", (dir_ / "z").string()}).rc, 2);
  EXPECT_EQ(Run({"--seed", "1", "keygen", "--bits", "2048", "--out-dir", (dir_ / "w").string()}).rc, 2);
  EXPECT_EQ(Run({"--insecure-test", "keygen", "--test-p", "5", "--test-q", "7", "--bound-m", "9", "--out-dir",
                 (dir_ / "v").string()}).rc,
            3);
  EXPECT_EQ(Run({"keygen", "--bogus"}).rc, 2);
  EXPECT_EQ(Run({}).rc, 2);
}

TEST_F(CliTest, ProductionKeygenShape) {
  const fs::path d = dir_ / "prod";
  Ok({"keygen", "--bits", "2048", "--out-dir", d.string()});
  hope::PublicKey pk = hope::LoadPublicKey(d / "public.json");
  hope::PrivateKey sk = hope::LoadPrivateKey(d / "private.json");
  hope::ComparisonKey ck = hope::LoadComparisonKey(d / "comparison.json", pk);
  EXPECT_EQ(sk.public_key(), pk);
  EXPECT_GE(pk.bits(), 2047u);
  EXPECT_EQ(ck.bound_m, hope::DefaultComparisonBound());
}

// Seeded CLI runs reproduce the corresponding library calls exactly.
TEST_F(CliTest, GoldenAgainstLibrary) {
  fs::path d = MediumKeys("5");
  hope::SeededRandom rng(5);
  hope::KeyPair keys = hope::paillier::KeyGen(512, rng);
  hope::ComparisonKey ck = hope::GenerateComparisonKey(keys.private_key, 1000000, rng);
  EXPECT_EQ(hope::ReadTextFile(d / "public.json"), hope::DumpDocument(hope::PublicKeyToJson(keys.public_key)));
  EXPECT_EQ(hope::ReadTextFile(d / "comparison.json"), hope::DumpDocument(hope::ComparisonKeyToJson(ck)));

  const std::string pk = (d / "public.json").string();
  const std::string c = Ok({"--insecure-test", "--seed", "77", "enc", "--pk", pk, "--m", "-42"});
  hope::SeededRandom enc_rng(77);
  hope::Ciphertext expected = hope::Encrypt(-42, keys.public_key, enc_rng);
  EXPECT_EQ(c, hope::ToHex(expected.value()));

  const std::string c2 = Ok({"enc", "--pk", pk, "--m", "1000"});
  hope::Ciphertext x = hope::CiphertextFromHex(keys.public_key, c);
  hope::Ciphertext y = hope::CiphertextFromHex(keys.public_key, c2);
  EXPECT_EQ(Ok({"add", "--pk", pk, "--a", c, "--b", c2}), hope::ToHex(hope::EvalAdd(x, y).value()));
  EXPECT_EQ(Ok({"sub", "--pk", pk, "--a", c, "--b", c2}), hope::ToHex(hope::EvalSub(x, y).value()));
  hope::CmpResult r = hope::EvalCmp(x, y, ck, keys.public_key);
  EXPECT_EQ(Ok({"cmp", "--pk", pk, "--ck", (d / "comparison.json").string(), "--a", c, "--b", c2,
                "--show-blinded"}),
            "LT\n" + r.blinded_diff.get_str());
}

TEST_F(CliTest, EncDecAndComparisons) {
  fs::path d = MediumKeys();
  const std::string pk = (d / "public.json").string(), sk = (d / "private.json").string(),
                    ck = (d / "comparison.json").string();
  const std::string c = Ok({"enc", "--pk", pk, "--m", "-42"});
  EXPECT_EQ(Ok({"dec", "--sk", sk, "--c", c}), "-42");
  // @file arguments
  hope::WriteTextFile(dir_ / "c.hex", c + "\n");
  EXPECT_EQ(Ok({"dec", "--sk", sk, "--c", "@" + (dir_ / "c.hex").string()}), "-42");

  auto enc = [&](const std::string& m) { return Ok({"enc", "--pk", pk, "--m", m}); };
  EXPECT_EQ(Ok({"cmp", "--pk", pk, "--ck", ck, "--a", enc("5"), "--b", enc("5")}), "EQ");
  EXPECT_EQ(Ok({"cmp", "--pk", pk, "--ck", ck, "--a", enc("7"), "--b", enc("3")}), "GT");
  EXPECT_EQ(Ok({"cmp", "--pk", pk, "--ck", ck, "--a", enc("-1000000"), "--b", enc("999999")}), "LT");
  EXPECT_EQ(Ok({"dec", "--sk", sk, "--c", Ok({"sub", "--pk", pk, "--a", enc("3"), "--b", enc("10")})}), "-7");

  hope::PublicKey pub = hope::LoadPublicKey(pk);
  hope::ComparisonKey cmp = hope::LoadComparisonKey(ck, pub);
  const BigInt eta = hope::BlindingFactor(cmp, pub);
  EXPECT_EQ(Ok({"cmp", "--pk", pk, "--ck", ck, "--a", enc("7"), "--b", enc("3"), "--show-blinded"}),
            "GT\n" + BigInt(eta * 4).get_str());
}

TEST_F(CliTest, ToyKeysSignedRange) {
  fs::path d = ToyKeys();
  const std::string pk = (d / "public.json").string(), sk = (d / "private.json").string();
  for (int m = -17; m <= 17; ++m) {
    ASSERT_EQ(Ok({"dec", "--sk", sk, "--c", Ok({"enc", "--pk", pk, "--m", std::to_string(m)})}),
              std::to_string(m));
  }
  EXPECT_EQ(Run({"enc", "--pk", pk, "--m", "18"}).rc, 4);
}

TEST_F(CliTest, DistinctExitCodes) {
  fs::path d = MediumKeys();
  fs::path other = MediumKeys("12");
  const std::string pk = (d / "public.json").string(), sk = (d / "private.json").string();
  const std::string c = Ok({"enc", "--pk", pk, "--m", "1"});

  EXPECT_EQ(Run({"dec", "--sk", sk, "--c", "xyz"}).rc, 2);                      // malformed input
  EXPECT_EQ(Run({"enc", "--pk", pk, "--m", "1.5"}).rc, 2);                       // malformed input
  EXPECT_EQ(Run({"enc", "--pk", pk}).rc, 2);                                     // usage
  EXPECT_EQ(Run({"cmp", "--pk", pk, "--ck", (other / "comparison.json").string(), "--a", c, "--b", c}).rc,
            3);                                                                  // key mismatch
  EXPECT_EQ(Run({"enc", "--pk", (dir_ / "nope.json").string(), "--m", "1"}).rc, 3);  // missing key file
  hope::WriteTextFile(dir_ / "bad.json", "{\"version\":1,\"kind\":\"public\",\"n_hex\":\"0x1\"}");
  EXPECT_EQ(Run({"enc", "--pk", (dir_ / "bad.json").string(), "--m", "1"}).rc, 3);  // corrupt key file
  const std::string huge = hope::LoadPublicKey(pk).n().get_str();
  EXPECT_EQ(Run({"enc", "--pk", pk, "--m", huge}).rc, 4);                        // out of range
  EXPECT_EQ(Run({"dec", "--sk", sk, "--c", "0"}).rc, 4);                         // not a ciphertext
  EXPECT_EQ(Run({"client", "--server", "127.0.0.1:1", "--pk", pk, "stats"}).rc, 5);  // transport
}

TEST_F(CliTest, KatIsDeterministicAndReplays) {
  const fs::path a = dir_ / "a.json", b = dir_ / "b.json";
  Ok({"kat", "--seed", "3", "--out", a.string()});
  Ok({"kat", "--seed", "3", "--out", b.string()});
  EXPECT_EQ(hope::ReadTextFile(a), hope::ReadTextFile(b));
  EXPECT_EQ(Ok({"kat", "--seed", "3"}) + "\n", hope::ReadTextFile(a));
  Json kat = hope::ReadDocument(a);
  EXPECT_TRUE(hope::ReplayKat(kat).empty());
  const Json& worked = kat.at("comparison_keys").at(0);
  EXPECT_EQ(worked.at("zeta_hex"), "2");
  EXPECT_EQ(worked.at("eta_hex"), "3");
  EXPECT_EQ(worked.at("eta0_hex"), "b");
  EXPECT_EQ(worked.at("ck0_mod_n_hex"), "1");
  EXPECT_EQ(worked.at("ck1_hex"), "3");
}

TEST_F(CliTest, BenchReport) {
  Json report = Json::parse(Ok({"bench", "--bits", "2048", "--ops", "cmp,modpow", "--count", "100", "--json"}));
  ASSERT_EQ(report.at("rows").size(), 2u);
  const Json& cmp = report.at("rows").at(0);
  const Json& modpow = report.at("rows").at(1);
  EXPECT_EQ(cmp.at("op"), "cmp");
  EXPECT_EQ(cmp.at("count"), 100);
  EXPECT_GT(cmp.at("mean_us").get<double>(), 0.0);
  // One comparison is one exponentiation mod n^2 (with an exponent twice
  // as long) plus cheap arithmetic.
  const double ratio = cmp.at("mean_us").get<double>() / modpow.at("mean_us").get<double>();
  EXPECT_GT(ratio, 0.5);
  EXPECT_LT(ratio, 10.0);

  Json all = Json::parse(Ok({"bench", "--bits", "1024", "--ops", "all", "--count", "3", "--json"}));
  std::vector<std::string> ops;
  for (const Json& row : all.at("rows")) ops.push_back(row.at("op"));
  EXPECT_EQ(ops, (std::vector<std::string>{"modpow", "enc", "dec", "add", "sub", "cmp", "cmp_prepared",
                                           "insert", "range"}));
  std::string table = Ok({"bench", "--bits", "1024", "--ops", "enc", "--count", "2"});
  EXPECT_NE(table.find("enc"), std::string::npos);
  EXPECT_EQ(Run({"bench", "--ops", "nope"}).rc, 2);
}

// ---- serve + client, each client action in a fresh process -----------------

class ServerProcess {
 public:
  ServerProcess(const std::vector<std::string>& extra) {
    int fds[2];
    if (::pipe(fds) != 0) return;
    pid_ = ::fork();
    if (pid_ == 0) {
      ::dup2(fds[1], STDOUT_FILENO);
      ::close(fds[0]);
      ::close(fds[1]);
      std::vector<std::string> args{HOPE_CLI_PATH, "serve", "--listen", "127.0.0.1:0"};
      args.insert(args.end(), extra.begin(), extra.end());
      std::vector<char*> argv;
      for (auto& a : args) argv.push_back(a.data());
      argv.push_back(nullptr);
      ::execv(argv[0], argv.data());
      ::_exit(127);
    }
    ::close(fds[1]);
    out_ = ::fdopen(fds[0], "r");
    char line[256];
    if (std::fgets(line, sizeof(line), out_) != nullptr) {
      std::string s(line);
      endpoint_ = s.substr(s.find(' ') + 1);
      while (!endpoint_.empty() && endpoint_.back() == '\n') endpoint_.pop_back();
    }
  }
  ~ServerProcess() { Stop(); }

  // SIGTERM, then wait; returns the rest of stdout.
  std::string Stop() {
    std::string rest;
    if (pid_ > 0) {
      ::kill(pid_, SIGTERM);
      char buf[256];
      while (std::fgets(buf, sizeof(buf), out_) != nullptr) rest += buf;
      int status = 0;
      ::waitpid(pid_, &status, 0);
      exit_code_ = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
      std::fclose(out_);
      pid_ = -1;
    }
    return rest;
  }

  const std::string& endpoint() const { return endpoint_; }
  int exit_code() const { return exit_code_; }

 private:
  pid_t pid_ = -1;
  FILE* out_ = nullptr;
  std::string endpoint_;
  int exit_code_ = -1;
};

TEST_F(CliTest, ScriptedServeAndClientSession) {
  fs::path d = MediumKeys();
  const std::string pk = (d / "public.json").string(), sk = (d / "private.json").string(),
                    ck = (d / "comparison.json").string();
  const fs::path snap = dir_ / "snap.json";
  auto server = std::make_unique<ServerProcess>(std::vector<std::string>{"--snapshot-path", snap.string()});
  ASSERT_FALSE(server->endpoint().empty());
  const std::string ep = server->endpoint();
  auto client = [&](std::vector<std::string> args) {
    std::vector<std::string> full{"client", "--server", ep, "--pk", pk};
    full.insert(full.end(), args.begin(), args.end());
    return full;
  };

  Result early = Run(client({"insert", "--bound-m", "10", "--m", "1"}));
  EXPECT_EQ(early.rc, 5);
  EXPECT_NE(early.err.find("not-initialized"), std::string::npos) << early.err;

  EXPECT_NE(Ok(client({"--ck", ck, "setup"})).find("m_bound 1000000"), std::string::npos);
  EXPECT_EQ(Run(client({"--ck", ck, "setup"})).rc, 5);
  const std::vector<std::pair<int, std::string>> rows{{40, "forty"}, {-7, "minus seven"}, {12, "twelve"},
                                                      {40, "again"}, {0, "zero"}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(Ok(client({"insert", "--m", std::to_string(rows[i].first), "--payload", rows[i].second})),
              "entry_id " + std::to_string(i + 1));
  }
  EXPECT_EQ(Run(client({"insert", "--m", "1000001"})).rc, 4);

  auto b64 = [](const std::string& s) { return hope::Base64Encode(std::vector<std::uint8_t>(s.begin(), s.end())); };
  const std::string expected = "2\t-7\t" + b64("minus seven") + "\n5\t0\t" + b64("zero") + "\n3\t12\t" +
                               b64("twelve") + "\n1\t40\t" + b64("forty") + "\n4\t40\t" + b64("again");
  EXPECT_EQ(Ok(client({"--sk", sk, "range", "--lo", "-10", "--hi", "40"})), expected);
  EXPECT_EQ(Ok(client({"--sk", sk, "range", "--lo", "-10", "--hi", "40", "--hi-exclusive"})),
            "2\t-7\t" + b64("minus seven") + "\n5\t0\t" + b64("zero") + "\n3\t12\t" + b64("twelve"));
  EXPECT_EQ(Ok(client({"--sk", sk, "group-by"})), "-7\t1\n0\t1\n12\t1\n40\t2");
  // Without sk the rows carry ciphertexts.
  std::string opaque = Ok(client({"range", "--lo", "0", "--hi", "0"}));
  EXPECT_EQ(opaque.substr(0, 2), "5\t");
  EXPECT_EQ(opaque.find("\t0\t"), std::string::npos);

  const fs::path ck1 = dir_ / "ck1.json";
  EXPECT_EQ(Ok(client({"--sk", sk, "--ck", ck, "rotate-ck", "--ck-out", ck1.string()})), "epoch 1");
  EXPECT_EQ(Run(client({"--sk", sk, "--ck", ck, "rotate-ck"})).rc, 5);  // stale epoch
  EXPECT_EQ(Ok(client({"--sk", sk, "range", "--lo", "-10", "--hi", "40"})), expected);
  std::string stats = Ok(client({"stats"}));
  EXPECT_NE(stats.find("size 5"), std::string::npos);
  EXPECT_NE(stats.find("epoch 1"), std::string::npos);

  EXPECT_EQ(server->Stop(), "snapshot " + snap.string() + "\n");
  EXPECT_EQ(server->exit_code(), 0);
  server = std::make_unique<ServerProcess>(std::vector<std::string>{"--restore", snap.string()});
  const std::string ep2 = server->endpoint();
  EXPECT_EQ(Ok({"client", "--server", ep2, "--pk", pk, "--sk", sk, "range", "--lo", "-10", "--hi", "40"}), expected);
  EXPECT_EQ(Ok({"client", "--server", ep2, "--pk", pk, "--sk", sk, "--ck", ck1.string(), "rotate-ck", "--ck-out",
                (dir_ / "ck2.json").string()}),
            "epoch 2");
  const fs::path snap2 = dir_ / "snap2.json";
  EXPECT_EQ(Ok({"client", "--server", ep2, "--pk", pk, "snapshot", "--path", snap2.string()}),
            "snapshot " + snap2.string());
  EXPECT_TRUE(fs::exists(snap2));
}

}  // namespace
