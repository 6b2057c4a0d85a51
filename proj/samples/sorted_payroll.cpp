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

// A data owner outsources salary records. The server keeps them ordered and
// answers range and group-by queries without ever seeing a salary.

#include <iostream>
#include <string>
#include <vector>

#include "hope/client.hpp"
#include "hope/server.hpp"

int main() {
  hope::SecureRandom rng;

  // Owner side: Paillier keys plus a comparison key for |salary| <= 10^9.
  hope::KeyPair keys = hope::paillier::KeyGen(2048, rng);
  const hope::BigInt bound = 1'000'000'000;
  hope::ComparisonKey ck = hope::GenerateComparisonKey(keys.private_key, bound, rng);

  // Server side. The loopback transport stands in for a socket.
  hope::Server server;
  hope::LoopbackTransport wire([&server](const hope::Json& m) { return server.Handle(m); });

  hope::Client owner(wire, keys.public_key, keys.private_key, bound, rng);
  owner.Setup(ck);

  const std::vector<std::pair<long, std::string>> staff = {
      {72000, "ada"}, {51000, "brook"}, {98000, "cyd"}, {51000, "dee"}, {64000, "eli"}};
  for (const auto& [salary, name] : staff) {
    owner.Insert(salary, std::vector<std::uint8_t>(name.begin(), name.end()));
  }

  std::cout << "salaries in [50000, 75000]:\n";
  for (const hope::RangeRow& row : owner.Range(50000, 75000)) {
    std::cout << "  " << std::string(row.payload.begin(), row.payload.end()) << " "
              << row.plaintext->get_str() << "\n";
  }

  std::cout << "distinct salaries:\n";
  for (const hope::GroupRow& g : owner.GroupBy()) {
    std::cout << "  " << g.plaintext->get_str() << " x" << g.count << "\n";
  }

  hope::ServerStatus status = owner.Stats();
  std::cout << "server did " << status.stats.comparisons << " comparisons over "
            << wire.message_count() / 2 << " round trips\n";
  return 0;
}
