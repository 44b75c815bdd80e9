// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace phyfea {

/// Ordered class pair. In a catalog, `inner` is the enclosed class and `outer`
/// the surrounding one.
struct ClassPair {
  std::int32_t inner = 0;
  std::int32_t outer = 0;

  friend auto operator<=>(const ClassPair&, const ClassPair&) = default;
};

// All ordered pairs (i, j), i != j, enumerated row-major: i outer loop, j inner.
std::vector<ClassPair> ordered_pairs(std::size_t num_classes);

// Position of (i, j) in ordered_pairs(num_classes).
std::size_t pair_position(ClassPair pair, std::size_t num_classes);

enum class Verdict { feasible, infeasible, non_constraint };

std::string_view verdict_name(Verdict v);
Verdict parse_verdict(std::string_view s);

struct PairRecord {
  ClassPair pair;
  std::uint64_t occurrence_count = 0;
  std::uint64_t image_count = 0;
  bool co_occurs = false;
  Verdict verdict = Verdict::non_constraint;
};

struct ConstraintCatalog {
  std::size_t num_classes = 0;
  // One record per ordered pair, in ordered_pairs() order.
  std::vector<PairRecord> records;
  std::string corpus_id;
  std::uint64_t threshold = 0;
  std::size_t num_images = 0;

  // Throws CatalogError when the pair is not covered.
  const PairRecord& at(ClassPair pair) const;
};

}  // namespace phyfea
