// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phyfea/catalog.hpp"
#include "phyfea/tensor.hpp"

namespace phyfea {

/// Integer class-id image. Pixels equal to ignore_value carry no class.
struct LabelMap {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int32_t> labels;  // row-major
  std::int32_t ignore_value = 255;
  std::size_t num_classes = 0;

  LabelMap() = default;
  LabelMap(std::size_t rows, std::size_t cols, std::size_t num_classes, std::int32_t fill = 0,
           std::int32_t ignore_value = 255);

  std::size_t size() const { return labels.size(); }
  std::int32_t& at(std::size_t r, std::size_t c) { return labels[r * cols + c]; }
  std::int32_t at(std::size_t r, std::size_t c) const { return labels[r * cols + c]; }
  bool ignored(std::size_t i) const { return labels[i] == ignore_value; }
};

// Throws ValidationError naming the first offending value and its (row, col).
void validate_labels(const LabelMap& map);

struct BoundingBox {
  std::size_t row0 = 0, col0 = 0, row1 = 0, col1 = 0;  // inclusive
};

struct Component {
  std::int32_t cls = 0;
  std::vector<std::uint32_t> pixels;  // row-major indices, ascending
  bool border_touching = false;
  BoundingBox bbox;

  std::size_t size() const { return pixels.size(); }
};

// Components of every class, ordered by their first pixel in row-major order.
std::vector<Component> label_components(const LabelMap& map, int connectivity);

std::vector<Component> connected_components(const LabelMap& map, std::int32_t cls,
                                            int connectivity);

struct Enclosure {
  ClassPair pair;  // (inner, outer)
  Component component;
};

/// A component of class i is enclosed by j when it touches no border pixel
/// and every non-ignore pixel 4-adjacent to it from outside has label j.
/// Ignore pixels are skipped. Components with no labelled neighbor at all are
/// not enclosures.
std::vector<Enclosure> find_enclosures(const LabelMap& map, int connectivity);

struct Discontinuity {
  std::int32_t cls = 0;
  std::size_t gt_count = 0;
  std::size_t pred_count = 0;
  bool anomaly = false;  // pred_count > gt_count
};

// One entry per class in [0, C), C the larger class count of the two maps.
std::vector<Discontinuity> count_discontinuities(const LabelMap& gt, const LabelMap& pred,
                                                 int connectivity);

struct AnomalyReport {
  std::vector<Enclosure> enclosures;
  std::vector<Discontinuity> discontinuities;  // anomalies only

  bool clean() const { return enclosures.empty() && discontinuities.empty(); }
};

AnomalyReport check(const LabelMap& gt, const LabelMap& pred, int connectivity);

/// Enclosure counts over a corpus. Verdicts: 0 occurrences -> non_constraint,
/// 1..threshold -> infeasible (rare in ground truth, read as labelling noise),
/// more -> feasible.
ConstraintCatalog build_catalog(const std::vector<LabelMap>& corpus, std::uint64_t threshold,
                                int connectivity, std::string corpus_id = "",
                                std::size_t workers = 1);

struct EmpiricalStats {
  std::size_t co_occurring = 0;
  std::size_t constraint = 0;
  std::size_t non_constraint = 0;
  std::size_t feasible = 0;
  std::size_t infeasible = 0;
  // Percentages of co-occurring pairs, and of constraint pairs for the last two.
  double constraint_pct = 0.0;
  double non_constraint_pct = 0.0;
  double feasible_pct = 0.0;
  double infeasible_pct = 0.0;
};

// Ground-truth mode: the catalog's own verdicts.
EmpiricalStats empirical_stats(const ConstraintCatalog& catalog);

/// Prediction mode: enclosures and co-occurrence are counted on the predictions;
/// a constraint pair counts as feasible only when the ground-truth catalog says
/// feasible.
EmpiricalStats empirical_stats(const std::vector<LabelMap>& predictions,
                               const ConstraintCatalog& gt_catalog, int connectivity,
                               std::size_t workers = 1);

/// Foreground pixels of a {0,1} map not reachable from the border by a flood
/// fill through foreground. Returns a row-major 0/1 mask.
template <class T>
std::vector<std::uint8_t> border_reachability_oracle(const Tensor<T>& binary, int connectivity);

}  // namespace phyfea
