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

#ifndef HOPE_OSTORE_HPP_
#define HOPE_OSTORE_HPP_

// Server-side ordered index over HOPE ciphertexts.
//
// The index never sees plaintexts or the private key; every ordering
// decision is an EvalCmp under the comparison key it was constructed with.
// Keys that compare equal share a bucket (insertion order kept), and buckets
// are held in a sorted vector searched by three-way binary search, so an
// insert or a range bound costs at most ceil(log2(B + 1)) comparisons for B
// distinct keys.
//
// Ordering is guaranteed only for keys whose plaintexts lie in [-M, M],
// M = comparison_key().bound_m. The server cannot check this.

#include <atomic>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "hope/error.hpp"
#include "hope/hope.hpp"
#include "hope/paillier.hpp"

namespace hope {

struct IndexEntry {
  Ciphertext key;
  std::vector<std::uint8_t> payload;
  std::uint64_t entry_id = 0;
};

struct IndexOptions {
  // Cache L(c^ck0) per bucket so a comparison is one multiplication mod n
  // instead of an exponentiation mod n^2. Results are identical either way.
  bool cache_prepared_keys = true;
};

struct IndexStats {
  std::size_t size = 0;
  std::uint64_t comparisons = 0;
  std::size_t depth = 0;

  friend bool operator==(const IndexStats&, const IndexStats&) = default;
};

struct RangeOptions {
  bool lo_inclusive = true;
  bool hi_inclusive = true;
};

struct GroupCount {
  Ciphertext representative;
  std::size_t count = 0;
};

class EncryptedIndex {
 public:
  EncryptedIndex(PublicKey pk, ComparisonKey ck, IndexOptions options = {})
      : pk_(std::move(pk)), ck_(std::move(ck)), options_(options) {
    if (ck_.key_fingerprint != pk_.fingerprint()) {
      throw Error(ErrorCode::kKeyMismatch, "comparison key does not match the public key");
    }
  }

  EncryptedIndex(EncryptedIndex&& other) noexcept
      : pk_(std::move(other.pk_)),
        ck_(std::move(other.ck_)),
        options_(other.options_),
        buckets_(std::move(other.buckets_)),
        size_(other.size_),
        next_id_(other.next_id_),
        comparisons_(other.comparisons_.load()) {}

  EncryptedIndex& operator=(EncryptedIndex&& other) noexcept {
    pk_ = std::move(other.pk_);
    ck_ = std::move(other.ck_);
    options_ = other.options_;
    buckets_ = std::move(other.buckets_);
    size_ = other.size_;
    next_id_ = other.next_id_;
    comparisons_.store(other.comparisons_.load());
    return *this;
  }

  // Returns the assigned entry id.
  std::uint64_t Insert(Ciphertext key, std::vector<std::uint8_t> payload) {
    std::uint64_t id = next_id_;
    InsertWithId(IndexEntry{std::move(key), std::move(payload), id});
    return id;
  }

  // Used when restoring a snapshot; ids must stay unique.
  void InsertWithId(IndexEntry entry) {
    CheckKey(entry.key);
    Probe probe = MakeProbe(entry.key);
    auto [pos, found] = Search(probe);
    if (found) {
      buckets_[pos].entries.push_back(std::move(entry));
    } else {
      Bucket bucket{std::move(probe.prepared), {}};
      bucket.entries.push_back(std::move(entry));
      buckets_.insert(buckets_.begin() + static_cast<std::ptrdiff_t>(pos), std::move(bucket));
    }
    const std::uint64_t id = buckets_[pos].entries.back().entry_id;
    if (id >= next_id_) next_id_ = id + 1;
    ++size_;
  }

  // Point lookup: all entries whose key compares equal.
  std::vector<IndexEntry> Find(const Ciphertext& key) const {
    CheckKey(key);
    auto [pos, found] = Search(MakeProbe(key));
    if (!found) return {};
    return buckets_[pos].entries;
  }

  // Entries with lo <= key <= hi (bounds optionally exclusive), ascending.
  std::vector<IndexEntry> Range(const Ciphertext& lo, const Ciphertext& hi,
                                RangeOptions options = {}) const {
    CheckKey(lo);
    CheckKey(hi);
    auto [first, lo_found] = Search(MakeProbe(lo));
    if (lo_found && !options.lo_inclusive) ++first;
    auto [last, hi_found] = Search(MakeProbe(hi));
    if (hi_found && options.hi_inclusive) ++last;
    std::vector<IndexEntry> out;
    for (std::size_t i = first; i < last; ++i) {
      out.insert(out.end(), buckets_[i].entries.begin(), buckets_[i].entries.end());
    }
    return out;
  }

  // One group per distinct key, ascending.
  std::vector<GroupCount> GroupBy() const {
    std::vector<GroupCount> out;
    out.reserve(buckets_.size());
    for (const Bucket& b : buckets_) out.push_back({b.entries.front().key, b.entries.size()});
    return out;
  }

  // Full in-order traversal.
  std::vector<IndexEntry> Entries() const {
    std::vector<IndexEntry> out;
    out.reserve(size_);
    for (const Bucket& b : buckets_) out.insert(out.end(), b.entries.begin(), b.entries.end());
    return out;
  }

  // depth is the height of the implicit binary search tree over the buckets.
  IndexStats Stats() const {
    return IndexStats{size_, comparisons_.load(), static_cast<std::size_t>(std::bit_width(buckets_.size()))};
  }

  // Installs a rotated comparison key. Bucket order is kept (signs do not
  // change across rotation); cached prepared keys are recomputed.
  void ReplaceComparisonKey(ComparisonKey next) {
    if (next.key_fingerprint != pk_.fingerprint()) {
      throw Error(ErrorCode::kKeyMismatch, "comparison key does not match the public key");
    }
    std::vector<std::optional<PreparedKey>> prepared;
    prepared.reserve(buckets_.size());
    for (const Bucket& b : buckets_) {
      if (options_.cache_prepared_keys) {
        prepared.emplace_back(Prepare(b.entries.front().key, next, pk_));
      } else {
        prepared.emplace_back();
      }
    }
    ck_ = std::move(next);
    for (std::size_t i = 0; i < buckets_.size(); ++i) buckets_[i].prepared = std::move(prepared[i]);
  }

  const PublicKey& public_key() const { return pk_; }
  const ComparisonKey& comparison_key() const { return ck_; }
  const IndexOptions& options() const { return options_; }
  std::size_t distinct_keys() const { return buckets_.size(); }
  std::uint64_t next_entry_id() const { return next_id_; }

 private:
  struct Bucket {
    std::optional<PreparedKey> prepared;
    std::vector<IndexEntry> entries;
  };

  struct Probe {
    const Ciphertext& key;
    std::optional<PreparedKey> prepared;
  };

  void CheckKey(const Ciphertext& key) const {
    if (key.key_fingerprint() != pk_.fingerprint()) {
      throw Error(ErrorCode::kKeyMismatch, "key was encrypted under a different public key");
    }
  }

  Probe MakeProbe(const Ciphertext& key) const {
    Probe probe{key, std::nullopt};
    if (options_.cache_prepared_keys) probe.prepared = Prepare(key, ck_, pk_);
    return probe;
  }

  // Sgn(bucket - probe).
  int Compare(const Bucket& bucket, const Probe& probe) const {
    comparisons_.fetch_add(1, std::memory_order_relaxed);
    if (bucket.prepared && probe.prepared) {
      return EvalCmp(*bucket.prepared, *probe.prepared, ck_, pk_).sign;
    }
    return EvalCmp(bucket.entries.front().key, probe.key, ck_, pk_).sign;
  }

  // Position of the first bucket >= probe, and whether it is equal.
  std::pair<std::size_t, bool> Search(const Probe& probe) const {
    std::size_t lo = 0, hi = buckets_.size();
    while (lo < hi) {
      std::size_t mid = lo + (hi - lo) / 2;
      int s = Compare(buckets_[mid], probe);
      if (s == 0) return {mid, true};
      if (s < 0) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return {lo, false};
  }

  PublicKey pk_;
  ComparisonKey ck_;
  IndexOptions options_;
  std::vector<Bucket> buckets_;
  std::size_t size_ = 0;
  std::uint64_t next_id_ = 1;
  mutable std::atomic<std::uint64_t> comparisons_{0};
};

}  // namespace hope

#endif  // HOPE_OSTORE_HPP_
