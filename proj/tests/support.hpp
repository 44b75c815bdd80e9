// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0
//
// Helpers shared by the test binaries: random inputs and small brute-force
// oracles written without any engine code.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "phyfea/analyzer.hpp"
#include "phyfea/rng.hpp"
#include "phyfea/tensor.hpp"

namespace testing {

using phyfea::Dims;
using phyfea::Rng;
using phyfea::Tensor;

template <class T = double>
Tensor<T> random_tensor(const Dims& dims, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  Rng rng(seed);
  Tensor<T> t(dims);
  for (auto& v : t.data()) v = static_cast<T>(rng.uniform(lo, hi));
  return t;
}

template <class T = double>
Tensor<T> random_binary(std::size_t rows, std::size_t cols, double density, std::uint64_t seed) {
  Rng rng(seed);
  Tensor<T> t(Dims{rows, cols});
  for (auto& v : t.data()) v = rng.uniform() < density ? T(1) : T(0);
  return t;
}

// Direct 3x3 (or cross) pooling with zero outside, written cell by cell.
inline Tensor<double> naive_pool(const Tensor<double>& x, bool max, bool cross = false) {
  const long rows = static_cast<long>(x.rows()), cols = static_cast<long>(x.cols());
  Tensor<double> out(x.dims());
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      double acc = max ? -1e300 : 0.0;
      int n = 0;
      for (long dr = -1; dr <= 1; ++dr) {
        for (long dc = -1; dc <= 1; ++dc) {
          if (cross && dr != 0 && dc != 0) continue;
          ++n;
          const long rr = r + dr, cc = c + dc;
          const double v = (rr < 0 || cc < 0 || rr >= rows || cc >= cols) ? 0.0 : x.at(rr, cc);
          acc = max ? std::max(acc, v) : acc + v;
        }
      }
      out.at(r, c) = max ? acc : acc / n;
    }
  }
  return out;
}

// Foreground cells of a binary plane that a breadth-first walk from the border
// cannot reach (8-neighbors). Independent of the analyzer implementation.
inline std::vector<std::uint8_t> enclosed_cells(const Tensor<double>& b) {
  const long rows = static_cast<long>(b.rows()), cols = static_cast<long>(b.cols());
  std::vector<std::uint8_t> seen(b.size(), 0);
  std::vector<long> queue;
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      if ((r == 0 || c == 0 || r == rows - 1 || c == cols - 1) && b.at(r, c) != 0.0) {
        seen[r * cols + c] = 1;
        queue.push_back(r * cols + c);
      }
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const long r = queue[head] / cols, c = queue[head] % cols;
    for (long dr = -1; dr <= 1; ++dr) {
      for (long dc = -1; dc <= 1; ++dc) {
        const long rr = r + dr, cc = c + dc;
        if (rr < 0 || cc < 0 || rr >= rows || cc >= cols) continue;
        const long q = rr * cols + cc;
        if (!seen[q] && b[q] != 0.0) {
          seen[q] = 1;
          queue.push_back(q);
        }
      }
    }
  }
  std::vector<std::uint8_t> out(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = b[i] != 0.0 && !seen[i];
  return out;
}

// Number of 8-connected components among cells where mask != 0.
inline std::size_t count_components8(const std::vector<std::uint8_t>& mask, std::size_t rows,
                                     std::size_t cols) {
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::size_t count = 0;
  for (std::size_t s = 0; s < mask.size(); ++s) {
    if (!mask[s] || seen[s]) continue;
    ++count;
    std::vector<std::size_t> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      const long r = static_cast<long>(p / cols), c = static_cast<long>(p % cols);
      for (long dr = -1; dr <= 1; ++dr) {
        for (long dc = -1; dc <= 1; ++dc) {
          const long rr = r + dr, cc = c + dc;
          if (rr < 0 || cc < 0 || rr >= static_cast<long>(rows) || cc >= static_cast<long>(cols)) {
            continue;
          }
          const std::size_t q = static_cast<std::size_t>(rr) * cols + static_cast<std::size_t>(cc);
          if (mask[q] && !seen[q]) {
            seen[q] = 1;
            stack.push_back(q);
          }
        }
      }
    }
  }
  return count;
}

inline bool close(double a, double b, double rel = 1e-12, double abs_tol = 1e-15) {
  return std::abs(a - b) <= std::max(abs_tol, rel * std::max(std::abs(a), std::abs(b)));
}

// Label map from rows of digits, '.' for the ignore value.
inline phyfea::LabelMap parse_map(const std::vector<const char*>& lines, std::size_t classes) {
  phyfea::LabelMap m(lines.size(), std::string_view(lines[0]).size(), classes);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      const char ch = lines[r][c];
      m.at(r, c) = ch == '.' ? m.ignore_value : ch - '0';
    }
  }
  return m;
}

// Corpus with known counts over C = 5: co-occurring unordered pairs {0,1},
// {0,2}, {2,3}, {0,4}, {1,4}; enclosures (1 in 0) x5, (2 in 0) x4, (3 in 2) x1.
// At threshold 3 that is 3 constraint pairs out of 10 ordered co-occurring
// pairs, one of them infeasible.
inline std::vector<phyfea::LabelMap> planted_corpus() {
  std::vector<phyfea::LabelMap> corpus;
  auto block_in = [&](std::int32_t inner, std::int32_t outer) {
    phyfea::LabelMap m(9, 9, 5, outer);
    for (std::size_t r = 3; r < 6; ++r) {
      for (std::size_t c = 3; c < 6; ++c) m.at(r, c) = inner;
    }
    corpus.push_back(m);
  };
  auto halves = [&](std::int32_t top, std::int32_t bottom) {
    phyfea::LabelMap m(9, 9, 5, top);
    for (std::size_t r = 5; r < 9; ++r) {
      for (std::size_t c = 0; c < 9; ++c) m.at(r, c) = bottom;
    }
    corpus.push_back(m);
  };
  for (int k = 0; k < 5; ++k) block_in(1, 0);
  for (int k = 0; k < 4; ++k) block_in(2, 0);
  block_in(3, 2);
  halves(0, 4);
  halves(1, 4);
  return corpus;
}

}  // namespace testing
