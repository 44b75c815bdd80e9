// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "phyfea/analyzer.hpp"

#include <algorithm>
#include <set>

#include "phyfea/parallel.hpp"

namespace phyfea {

LabelMap::LabelMap(std::size_t rows_, std::size_t cols_, std::size_t num_classes_,
                   std::int32_t fill, std::int32_t ignore_value_)
    : rows(rows_),
      cols(cols_),
      labels(rows_ * cols_, fill),
      ignore_value(ignore_value_),
      num_classes(num_classes_) {}

void validate_labels(const LabelMap& map) {
  if (map.rows == 0 || map.cols == 0) throw DimensionError("label map has a zero extent");
  if (map.labels.size() != map.rows * map.cols) {
    throw DimensionError("label map holds " + std::to_string(map.labels.size()) +
                         " labels for " + std::to_string(map.rows) + "x" +
                         std::to_string(map.cols));
  }
  for (std::size_t i = 0; i < map.labels.size(); ++i) {
    const auto v = map.labels[i];
    if (v == map.ignore_value) continue;
    if (v < 0 || (map.num_classes && static_cast<std::size_t>(v) >= map.num_classes)) {
      throw ValidationError("label " + std::to_string(v) + " at (row " +
                            std::to_string(i / map.cols) + ", col " +
                            std::to_string(i % map.cols) + ") is outside [0, " +
                            std::to_string(map.num_classes) + ")");
    }
  }
}

namespace {

void require_connectivity(int connectivity) {
  if (connectivity != 4 && connectivity != 8) {
    throw ConfigError("connectivity must be 4 or 8, got " + std::to_string(connectivity));
  }
}

constexpr int kDr[] = {-1, 0, 0, 1, -1, -1, 1, 1};
constexpr int kDc[] = {0, -1, 1, 0, -1, 1, -1, 1};

// Visits in-bounds neighbors of (r,c); the first four offsets are the edge
// neighbors, so connectivity 4 simply stops early.
template <class F>
void for_neighbors(std::size_t r, std::size_t c, std::size_t rows, std::size_t cols,
                   int connectivity, F&& f) {
  for (int k = 0; k < connectivity; ++k) {
    const long rr = static_cast<long>(r) + kDr[k];
    const long cc = static_cast<long>(c) + kDc[k];
    if (rr < 0 || cc < 0 || rr >= static_cast<long>(rows) || cc >= static_cast<long>(cols)) continue;
    f(static_cast<std::size_t>(rr) * cols + static_cast<std::size_t>(cc));
  }
}

struct Labelling {
  std::vector<std::int32_t> id;  // component id per pixel, -1 on ignore
  std::vector<Component> components;
};

Labelling label_all(const LabelMap& map, int connectivity) {
  require_connectivity(connectivity);
  Labelling out;
  out.id.assign(map.size(), -1);
  std::vector<std::uint32_t> stack;
  for (std::size_t seed = 0; seed < map.size(); ++seed) {
    if (out.id[seed] >= 0 || map.ignored(seed)) continue;
    const auto cid = static_cast<std::int32_t>(out.components.size());
    Component comp;
    comp.cls = map.labels[seed];
    comp.bbox = {seed / map.cols, seed % map.cols, seed / map.cols, seed % map.cols};
    out.id[seed] = cid;
    stack.assign(1, static_cast<std::uint32_t>(seed));
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      comp.pixels.push_back(static_cast<std::uint32_t>(p));
      const std::size_t r = p / map.cols, c = p % map.cols;
      comp.border_touching |= r == 0 || c == 0 || r + 1 == map.rows || c + 1 == map.cols;
      comp.bbox.row0 = std::min(comp.bbox.row0, r);
      comp.bbox.row1 = std::max(comp.bbox.row1, r);
      comp.bbox.col0 = std::min(comp.bbox.col0, c);
      comp.bbox.col1 = std::max(comp.bbox.col1, c);
      for_neighbors(r, c, map.rows, map.cols, connectivity, [&](std::size_t q) {
        if (out.id[q] < 0 && map.labels[q] == comp.cls) {
          out.id[q] = cid;
          stack.push_back(static_cast<std::uint32_t>(q));
        }
      });
    }
    std::sort(comp.pixels.begin(), comp.pixels.end());
    out.components.push_back(std::move(comp));
  }
  return out;
}

struct ImageScan {
  std::vector<ClassPair> enclosures;
  std::vector<bool> present;
};

ImageScan scan_image(const LabelMap& map, std::size_t classes, int connectivity) {
  ImageScan scan;
  scan.present.assign(classes, false);
  for (std::size_t i = 0; i < map.size(); ++i) {
    const auto v = map.labels[i];
    if (!map.ignored(i) && v >= 0 && static_cast<std::size_t>(v) < classes) scan.present[v] = true;
  }
  for (const auto& e : find_enclosures(map, connectivity)) scan.enclosures.push_back(e.pair);
  return scan;
}

std::size_t corpus_classes(const std::vector<LabelMap>& corpus) {
  std::size_t classes = 0;
  for (const auto& m : corpus) {
    classes = std::max(classes, m.num_classes);
    if (m.num_classes == 0) {
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (!m.ignored(i)) classes = std::max(classes, static_cast<std::size_t>(m.labels[i]) + 1);
      }
    }
  }
  return std::max<std::size_t>(classes, 2);
}

double percent(std::size_t part, std::size_t whole) {
  return whole ? 100.0 * static_cast<double>(part) / static_cast<double>(whole) : 0.0;
}

}  // namespace

std::vector<Component> label_components(const LabelMap& map, int connectivity) {
  return label_all(map, connectivity).components;
}

std::vector<Component> connected_components(const LabelMap& map, std::int32_t cls,
                                            int connectivity) {
  auto all = label_all(map, connectivity).components;
  std::vector<Component> out;
  for (auto& comp : all) {
    if (comp.cls == cls) out.push_back(std::move(comp));
  }
  return out;
}

std::vector<Enclosure> find_enclosures(const LabelMap& map, int connectivity) {
  auto lab = label_all(map, connectivity);
  std::vector<Enclosure> out;
  for (std::size_t k = 0; k < lab.components.size(); ++k) {
    auto& comp = lab.components[k];
    if (comp.border_touching) continue;
    std::int32_t outer = -1;
    bool mixed = false;
    for (const auto p : comp.pixels) {
      for_neighbors(p / map.cols, p % map.cols, map.rows, map.cols, 4, [&](std::size_t q) {
        if (lab.id[q] == static_cast<std::int32_t>(k) || map.ignored(q)) return;
        if (outer < 0) {
          outer = map.labels[q];
        } else if (map.labels[q] != outer) {
          mixed = true;
        }
      });
      if (mixed) break;
    }
    if (mixed || outer < 0) continue;
    out.push_back({{comp.cls, outer}, std::move(comp)});
  }
  return out;
}

std::vector<Discontinuity> count_discontinuities(const LabelMap& gt, const LabelMap& pred,
                                                 int connectivity) {
  if (gt.rows != pred.rows || gt.cols != pred.cols) {
    throw DimensionError("ground truth is " + std::to_string(gt.rows) + "x" +
                         std::to_string(gt.cols) + " but prediction is " +
                         std::to_string(pred.rows) + "x" + std::to_string(pred.cols));
  }
  const std::size_t classes = corpus_classes({gt, pred});
  std::vector<std::size_t> gt_count(classes, 0), pred_count(classes, 0);
  for (const auto& c : label_all(gt, connectivity).components) {
    if (static_cast<std::size_t>(c.cls) < classes) ++gt_count[c.cls];
  }
  for (const auto& c : label_all(pred, connectivity).components) {
    if (static_cast<std::size_t>(c.cls) < classes) ++pred_count[c.cls];
  }
  std::vector<Discontinuity> out;
  for (std::size_t k = 0; k < classes; ++k) {
    out.push_back({static_cast<std::int32_t>(k), gt_count[k], pred_count[k],
                   pred_count[k] > gt_count[k]});
  }
  return out;
}

AnomalyReport check(const LabelMap& gt, const LabelMap& pred, int connectivity) {
  AnomalyReport report;
  report.enclosures = find_enclosures(pred, connectivity);
  for (const auto& d : count_discontinuities(gt, pred, connectivity)) {
    if (d.anomaly) report.discontinuities.push_back(d);
  }
  return report;
}

namespace {

struct CorpusCounts {
  std::size_t classes = 0;
  std::vector<std::uint64_t> occurrences;  // per ordered pair position
  std::vector<std::uint64_t> images;
  std::vector<bool> co_occurs;
};

CorpusCounts count_corpus(const std::vector<LabelMap>& corpus, std::size_t classes,
                          int connectivity, std::size_t workers) {
  require_connectivity(connectivity);
  std::vector<ImageScan> scans(corpus.size());
  parallel_for(corpus.size(), workers,
               [&](std::size_t k) { scans[k] = scan_image(corpus[k], classes, connectivity); });

  CorpusCounts counts;
  counts.classes = classes;
  const std::size_t pairs = classes * (classes - 1);
  counts.occurrences.assign(pairs, 0);
  counts.images.assign(pairs, 0);
  counts.co_occurs.assign(pairs, false);
  for (const auto& scan : scans) {
    std::set<std::size_t> seen;
    for (const auto& pair : scan.enclosures) {
      if (static_cast<std::size_t>(pair.inner) >= classes ||
          static_cast<std::size_t>(pair.outer) >= classes) {
        continue;
      }
      const auto pos = pair_position(pair, classes);
      ++counts.occurrences[pos];
      seen.insert(pos);
    }
    for (auto pos : seen) ++counts.images[pos];
    for (std::size_t i = 0; i < classes; ++i) {
      if (!scan.present[i]) continue;
      for (std::size_t j = 0; j < classes; ++j) {
        if (i != j && scan.present[j]) {
          counts.co_occurs[pair_position({static_cast<std::int32_t>(i),
                                          static_cast<std::int32_t>(j)},
                                         classes)] = true;
        }
      }
    }
  }
  return counts;
}

}  // namespace

ConstraintCatalog build_catalog(const std::vector<LabelMap>& corpus, std::uint64_t threshold,
                                int connectivity, std::string corpus_id, std::size_t workers) {
  if (corpus.empty()) throw ValidationError("build_catalog: empty corpus");
  const std::size_t classes = corpus_classes(corpus);
  const auto counts = count_corpus(corpus, classes, connectivity, workers);

  ConstraintCatalog catalog;
  catalog.num_classes = classes;
  catalog.corpus_id = std::move(corpus_id);
  catalog.threshold = threshold;
  catalog.num_images = corpus.size();
  const auto pairs = ordered_pairs(classes);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    PairRecord rec;
    rec.pair = pairs[k];
    rec.occurrence_count = counts.occurrences[k];
    rec.image_count = counts.images[k];
    rec.co_occurs = counts.co_occurs[k];
    if (rec.occurrence_count == 0) {
      rec.verdict = Verdict::non_constraint;
    } else if (rec.occurrence_count <= threshold) {
      rec.verdict = Verdict::infeasible;
    } else {
      rec.verdict = Verdict::feasible;
    }
    catalog.records.push_back(rec);
  }
  return catalog;
}

namespace {

void finish(EmpiricalStats& s) {
  s.non_constraint = s.co_occurring - s.constraint;
  s.constraint_pct = percent(s.constraint, s.co_occurring);
  s.non_constraint_pct = s.co_occurring ? 100.0 - s.constraint_pct : 0.0;
  s.feasible_pct = percent(s.feasible, s.constraint);
  s.infeasible_pct = s.constraint ? 100.0 - s.feasible_pct : 0.0;
}

}  // namespace

EmpiricalStats empirical_stats(const ConstraintCatalog& catalog) {
  EmpiricalStats s;
  for (const auto& rec : catalog.records) {
    if (!rec.co_occurs) continue;
    ++s.co_occurring;
    if (rec.verdict == Verdict::non_constraint) continue;
    ++s.constraint;
    if (rec.verdict == Verdict::feasible) {
      ++s.feasible;
    } else {
      ++s.infeasible;
    }
  }
  finish(s);
  return s;
}

EmpiricalStats empirical_stats(const std::vector<LabelMap>& predictions,
                               const ConstraintCatalog& gt_catalog, int connectivity,
                               std::size_t workers) {
  const std::size_t classes = gt_catalog.num_classes;
  if (classes < 2) throw CatalogError("catalog has fewer than 2 classes");
  for (const auto& p : predictions) {
    if (corpus_classes({p}) > classes) {
      throw CatalogError("prediction labels exceed the catalog's " + std::to_string(classes) +
                         " classes");
    }
  }
  const auto counts = count_corpus(predictions, classes, connectivity, workers);
  EmpiricalStats s;
  const auto pairs = ordered_pairs(classes);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (!counts.co_occurs[k]) continue;
    ++s.co_occurring;
    if (counts.occurrences[k] == 0) continue;
    ++s.constraint;
    if (gt_catalog.at(pairs[k]).verdict == Verdict::feasible) {
      ++s.feasible;
    } else {
      ++s.infeasible;
    }
  }
  finish(s);
  return s;
}

template <class T>
std::vector<std::uint8_t> border_reachability_oracle(const Tensor<T>& binary, int connectivity) {
  require_rank(binary.dims(), 2, "border_reachability_oracle");
  require_connectivity(connectivity);
  const std::size_t rows = binary.rows(), cols = binary.cols();
  std::vector<std::uint8_t> reached(binary.size(), 0);
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < binary.size(); ++i) {
    const std::size_t r = i / cols, c = i % cols;
    const bool border = r == 0 || c == 0 || r + 1 == rows || c + 1 == cols;
    if (border && binary[i] != T(0)) {
      reached[i] = 1;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const std::size_t p = stack.back();
    stack.pop_back();
    for_neighbors(p / cols, p % cols, rows, cols, connectivity, [&](std::size_t q) {
      if (!reached[q] && binary[q] != T(0)) {
        reached[q] = 1;
        stack.push_back(q);
      }
    });
  }
  std::vector<std::uint8_t> unreachable(binary.size(), 0);
  for (std::size_t i = 0; i < binary.size(); ++i) {
    unreachable[i] = binary[i] != T(0) && !reached[i];
  }
  return unreachable;
}

template std::vector<std::uint8_t> border_reachability_oracle(const Tensor<float>&, int);
template std::vector<std::uint8_t> border_reachability_oracle(const Tensor<double>&, int);

}  // namespace phyfea
