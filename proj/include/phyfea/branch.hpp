// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>

namespace phyfea {

/// While a BranchScope is alive on a thread, kernel ops fold every discrete
/// decision they make (rectifier activity, max-pool winners, data-derived masks,
/// iteration counts) into a running hash. Two evaluations with equal signatures
/// took the same smooth branch.
class BranchScope {
 public:
  BranchScope();
  ~BranchScope();
  BranchScope(const BranchScope&) = delete;
  BranchScope& operator=(const BranchScope&) = delete;

  std::uint64_t signature() const { return hash_; }

 private:
  friend void note_branch(std::uint64_t);
  BranchScope* previous_;
  std::uint64_t hash_ = 1469598103934665603ull;
};

bool branch_recording();
void note_branch(std::uint64_t value);

template <class T, class Pred>
void note_branch_mask(std::span<const T> values, Pred pred) {
  if (!branch_recording()) return;
  std::uint64_t word = 0;
  std::size_t bit = 0;
  for (const T& v : values) {
    if (pred(v)) word |= (1ull << bit);
    if (++bit == 64) {
      note_branch(word);
      word = 0;
      bit = 0;
    }
  }
  note_branch(word ^ (static_cast<std::uint64_t>(values.size()) << 32));
}

}  // namespace phyfea
