// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "phyfea/pairmap.hpp"

#include <map>

#include "phyfea/ops.hpp"

namespace phyfea {
namespace {

template <class T>
void require_scores(const Dims& dims) {
  require_rank(dims, 3, "scores");
  if (dims[0] < 2) {
    throw ConfigError("scores need at least 2 classes, got " + std::to_string(dims[0]));
  }
}

}  // namespace

template <class T>
Var<T> normalize_scores(const Var<T>& scores) {
  require_scores<T>(scores.dims());
  return softmax_channels(scores);
}

template <class T>
NormalizedScores<T> normalize_scores(const Tensor<T>& scores) {
  return {normalize_scores(constant(scores)).value()};
}

template <class T>
std::vector<std::int32_t> argmax_classes(const Tensor<T>& probs, const IgnoreMask& ignore) {
  require_rank(probs.dims(), 3, "argmax_classes");
  const std::size_t channels = probs.dim(0), plane = probs.dim(1) * probs.dim(2);
  if (!ignore.empty() && ignore.size() != plane) {
    throw DimensionError("ignore mask length " + std::to_string(ignore.size()) + " vs plane " +
                         std::to_string(plane));
  }
  std::vector<std::int32_t> arg(plane, 0);
  for (std::size_t p = 0; p < plane; ++p) {
    if (!ignore.empty() && ignore[p]) {
      arg[p] = -1;
      continue;
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < channels; ++c) {
      if (probs[c * plane + p] > probs[best * plane + p]) best = c;
    }
    arg[p] = static_cast<std::int32_t>(best);
  }
  return arg;
}

template <class T>
Var<T> pair_channel(const Var<T>& peak, const std::vector<std::int32_t>& argmax, ClassPair pair) {
  require_rank(peak.dims(), 2, "pair_channel");
  if (argmax.size() != peak.value().size()) {
    throw DimensionError("pair_channel: argmax length does not match the plane");
  }
  Tensor<T> support(peak.dims());
  for (std::size_t p = 0; p < argmax.size(); ++p) {
    support[p] = (argmax[p] == pair.inner || argmax[p] == pair.outer) ? T(1) : T(0);
  }
  const Var<T> mask = constant(support);
  const Var<T> on_support = mul(peak, mask);
  const Var<T> mean = masked_mean(on_support, support);
  return mul(rectifier(sub_scalar(on_support, mean)), mask);
}

template <class T>
PairStack<T> build_pair_stack(const NormalizedScores<T>& scores, const IgnoreMask& ignore) {
  const auto& probs = scores.probs;
  require_scores<T>(probs.dims());
  const std::size_t classes = probs.dim(0), rows = probs.dim(1), cols = probs.dim(2);
  const auto arg = argmax_classes(probs, ignore);
  const Var<T> peak = select_channels(constant(probs), arg);

  PairStack<T> stack;
  stack.num_classes = classes;
  stack.pair_index = ordered_pairs(classes);
  stack.maps = Tensor<T>(Dims{stack.pair_index.size(), rows, cols});
  // (i,j) and (j,i) share a support and therefore a map.
  std::map<std::pair<std::int32_t, std::int32_t>, Tensor<T>> cache;
  for (std::size_t k = 0; k < stack.pair_index.size(); ++k) {
    const ClassPair pair = stack.pair_index[k];
    const auto key = std::minmax(pair.inner, pair.outer);
    auto it = cache.find(key);
    if (it == cache.end()) {
      it = cache.emplace(key, pair_channel(peak, arg, pair).value()).first;
    }
    stack.maps.set_channel(k, it->second);
  }
  return stack;
}

std::vector<ClassPair> select_pairs(std::size_t num_classes, const ConstraintCatalog* catalog,
                                    PairMode mode) {
  auto pairs = ordered_pairs(num_classes);
  if (mode == PairMode::all) return pairs;
  if (!catalog) throw CatalogError("pair mode infeasible_only needs a constraint catalog");
  std::vector<ClassPair> kept;
  for (const auto& pair : pairs) {
    if (catalog->at(pair).verdict == Verdict::infeasible) kept.push_back(pair);
  }
  return kept;
}

template <class T>
PairStack<T> prune_pairs(const PairStack<T>& stack, const ConstraintCatalog& catalog,
                         PairMode mode) {
  if (mode == PairMode::all) return stack;
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < stack.pair_index.size(); ++k) {
    if (catalog.at(stack.pair_index[k]).verdict == Verdict::infeasible) keep.push_back(k);
  }
  PairStack<T> out;
  out.num_classes = stack.num_classes;
  const std::size_t rows = stack.maps.dim(1), cols = stack.maps.dim(2);
  out.maps = Tensor<T>(Dims{keep.size(), rows, cols});
  for (std::size_t n = 0; n < keep.size(); ++n) {
    out.pair_index.push_back(stack.pair_index[keep[n]]);
    out.maps.set_channel(n, stack.maps.channel(keep[n]));
  }
  return out;
}

#define PHYFEA_INSTANTIATE_PAIRMAP(T)                                                         \
  template Var<T> normalize_scores(const Var<T>&);                                            \
  template NormalizedScores<T> normalize_scores(const Tensor<T>&);                            \
  template std::vector<std::int32_t> argmax_classes(const Tensor<T>&, const IgnoreMask&);     \
  template Var<T> pair_channel(const Var<T>&, const std::vector<std::int32_t>&, ClassPair);   \
  template PairStack<T> build_pair_stack(const NormalizedScores<T>&, const IgnoreMask&);      \
  template PairStack<T> prune_pairs(const PairStack<T>&, const ConstraintCatalog&, PairMode);

PHYFEA_INSTANTIATE_PAIRMAP(float)
PHYFEA_INSTANTIATE_PAIRMAP(double)

#undef PHYFEA_INSTANTIATE_PAIRMAP

}  // namespace phyfea
