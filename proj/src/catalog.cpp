// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "phyfea/catalog.hpp"

#include "phyfea/error.hpp"

namespace phyfea {

std::vector<ClassPair> ordered_pairs(std::size_t num_classes) {
  std::vector<ClassPair> pairs;
  pairs.reserve(num_classes * (num_classes ? num_classes - 1 : 0));
  for (std::size_t i = 0; i < num_classes; ++i) {
    for (std::size_t j = 0; j < num_classes; ++j) {
      if (i != j) pairs.push_back({static_cast<std::int32_t>(i), static_cast<std::int32_t>(j)});
    }
  }
  return pairs;
}

std::size_t pair_position(ClassPair pair, std::size_t num_classes) {
  const auto i = static_cast<std::size_t>(pair.inner);
  const auto j = static_cast<std::size_t>(pair.outer);
  return i * (num_classes - 1) + (j < i ? j : j - 1);
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::feasible: return "feasible";
    case Verdict::infeasible: return "infeasible";
    case Verdict::non_constraint: return "non_constraint";
  }
  return "non_constraint";
}

Verdict parse_verdict(std::string_view s) {
  if (s == "feasible") return Verdict::feasible;
  if (s == "infeasible") return Verdict::infeasible;
  if (s == "non_constraint") return Verdict::non_constraint;
  throw CatalogError("unknown verdict '" + std::string(s) + "'");
}

const PairRecord& ConstraintCatalog::at(ClassPair pair) const {
  const bool in_range = pair.inner >= 0 && pair.outer >= 0 && pair.inner != pair.outer &&
                        static_cast<std::size_t>(pair.inner) < num_classes &&
                        static_cast<std::size_t>(pair.outer) < num_classes;
  if (in_range && records.size() == num_classes * (num_classes - 1)) {
    const auto& rec = records[pair_position(pair, num_classes)];
    if (rec.pair == pair) return rec;
  }
  throw CatalogError("catalog does not cover pair (" + std::to_string(pair.inner) + "," +
                     std::to_string(pair.outer) + ")");
}

}  // namespace phyfea
