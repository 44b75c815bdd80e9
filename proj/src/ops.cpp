// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "phyfea/ops.hpp"

#include "phyfea/branch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace phyfea {
namespace {

constexpr std::uint32_t kNoWinner = std::numeric_limits<std::uint32_t>::max();

template <class T>
void require_plane(const Var<T>& x, const char* what) {
  require_rank(x.dims(), 2, what);
}

template <class T>
void require_scalar(const Var<T>& x, const char* what) {
  if (x.value().size() != 1 || x.dims().size() != 0) {
    throw DimensionError(std::string(what) + ": expected rank-0 scalar, got " +
                         format_dims(x.dims()));
  }
}

template <class T>
void accumulate(Tensor<T>* dst, const Tensor<T>& src) {
  if (!dst) return;
  auto d = dst->data();
  auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

// Window offsets in row-major order; the tie rule depends on this order.
struct Offset {
  int dr;
  int dc;
};
constexpr Offset kBox[] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 0},
                           {0, 1},   {1, -1}, {1, 0},  {1, 1}};
constexpr Offset kCross[] = {{-1, 0}, {0, -1}, {0, 0}, {0, 1}, {1, 0}};

template <class T>
void max_with_winners(const Tensor<T>& x, Window window, Tensor<T>& out,
                      std::vector<std::uint32_t>& winners) {
  const auto rows = static_cast<long>(x.rows());
  const auto cols = static_cast<long>(x.cols());
  const std::span<const Offset> offsets =
      window == Window::box ? std::span<const Offset>(kBox) : std::span<const Offset>(kCross);
  winners.assign(x.size(), kNoWinner);
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      bool have = false;
      T best = T(0);
      std::uint32_t win = kNoWinner;
      for (const auto& o : offsets) {
        const long rr = r + o.dr;
        const long cc = c + o.dc;
        const bool inside = rr >= 0 && rr < rows && cc >= 0 && cc < cols;
        const T v = inside ? x[static_cast<std::size_t>(rr * cols + cc)] : T(0);
        if (!have || v > best) {
          best = v;
          win = inside ? static_cast<std::uint32_t>(rr * cols + cc) : kNoWinner;
          have = true;
        }
      }
      const auto i = static_cast<std::size_t>(r * cols + c);
      out[i] = best;
      winners[i] = win;
    }
  }
}

template <class T>
void cross_max(const T* in, T* out, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t i = r * cols + c;
      T m = in[i];
      m = std::max(m, r > 0 ? in[i - cols] : T(0));
      m = std::max(m, c > 0 ? in[i - 1] : T(0));
      m = std::max(m, c + 1 < cols ? in[i + 1] : T(0));
      m = std::max(m, r + 1 < rows ? in[i + cols] : T(0));
      out[i] = m;
    }
  }
}

}  // namespace

namespace kernel {

template <class T>
void box_avg(const T* in, T* out, std::size_t rows, std::size_t cols) {
  std::vector<T> h(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const T* row = in + r * cols;
    T* hr = h.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) {
      T s = row[c];
      if (c > 0) s += row[c - 1];
      if (c + 1 < cols) s += row[c + 1];
      hr[c] = s;
    }
  }
  const T inv = T(1) / T(9);
  for (std::size_t r = 0; r < rows; ++r) {
    const T* mid = h.data() + r * cols;
    const T* up = r > 0 ? mid - cols : nullptr;
    const T* down = r + 1 < rows ? mid + cols : nullptr;
    T* o = out + r * cols;
    for (std::size_t c = 0; c < cols; ++c) {
      T s = mid[c];
      if (up) s += up[c];
      if (down) s += down[c];
      o[c] = s * inv;
    }
  }
}

template <class T>
void cross_avg(const T* in, T* out, std::size_t rows, std::size_t cols) {
  const T inv = T(1) / T(5);
  for (std::size_t r = 0; r < rows; ++r) {
    const T* mid = in + r * cols;
    const T* up = r > 0 ? mid - cols : nullptr;
    const T* down = r + 1 < rows ? mid + cols : nullptr;
    T* o = out + r * cols;
    for (std::size_t c = 0; c < cols; ++c) {
      T s = mid[c];
      if (up) s += up[c];
      if (c > 0) s += mid[c - 1];
      if (c + 1 < cols) s += mid[c + 1];
      if (down) s += down[c];
      o[c] = s * inv;
    }
  }
}

template <class T>
void box_max(const T* in, T* out, std::size_t rows, std::size_t cols) {
  std::vector<T> h(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const T* row = in + r * cols;
    T* hr = h.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) {
      T m = row[c];
      m = std::max(m, c > 0 ? row[c - 1] : T(0));
      m = std::max(m, c + 1 < cols ? row[c + 1] : T(0));
      hr[c] = m;
    }
  }
  for (std::size_t r = 0; r < rows; ++r) {
    const T* mid = h.data() + r * cols;
    T* o = out + r * cols;
    for (std::size_t c = 0; c < cols; ++c) {
      T m = mid[c];
      m = std::max(m, r > 0 ? mid[c - cols] : T(0));
      m = std::max(m, r + 1 < rows ? mid[c + cols] : T(0));
      o[c] = m;
    }
  }
}

template void box_avg(const float*, float*, std::size_t, std::size_t);
template void box_avg(const double*, double*, std::size_t, std::size_t);
template void cross_avg(const float*, float*, std::size_t, std::size_t);
template void cross_avg(const double*, double*, std::size_t, std::size_t);
template void box_max(const float*, float*, std::size_t, std::size_t);
template void box_max(const double*, double*, std::size_t, std::size_t);

}  // namespace kernel

template <class T>
Var<T> pad_frame(const Var<T>& x, T value) {
  require_plane(x, "pad_frame");
  const auto& in = x.value();
  const std::size_t rows = in.rows(), cols = in.cols();
  Tensor<T> out(Dims{rows + 2, cols + 2}, value);
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(&in.at(r, 0), cols, &out.at(r + 1, 1));
  }
  auto* tape = common_tape({&x});
  if (!tape) return constant(std::move(out));
  return tape->record(OpKind::pad_frame, {&x}, std::move(out),
                      [rows, cols](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
                        if (!gi[0]) return;
                        for (std::size_t r = 0; r < rows; ++r) {
                          for (std::size_t c = 0; c < cols; ++c) gi[0]->at(r, c) += g.at(r + 1, c + 1);
                        }
                      });
}

template <class T>
Var<T> crop_interior(const Var<T>& x) {
  require_plane(x, "crop_interior");
  const auto& in = x.value();
  if (in.rows() < 3 || in.cols() < 3) {
    throw DimensionError("crop_interior needs at least 3x3, got " + format_dims(in.dims()));
  }
  const std::size_t rows = in.rows() - 2, cols = in.cols() - 2;
  Tensor<T> out(Dims{rows, cols});
  for (std::size_t r = 0; r < rows; ++r) std::copy_n(&in.at(r + 1, 1), cols, &out.at(r, 0));
  auto* tape = common_tape({&x});
  if (!tape) return constant(std::move(out));
  return tape->record(OpKind::crop_interior, {&x}, std::move(out),
                      [rows, cols](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
                        if (!gi[0]) return;
                        for (std::size_t r = 0; r < rows; ++r) {
                          for (std::size_t c = 0; c < cols; ++c) gi[0]->at(r + 1, c + 1) += g.at(r, c);
                        }
                      });
}

template <class T>
Var<T> reframe(const Var<T>& x, T value) {
  require_plane(x, "reframe");
  Tensor<T> out = x.value();
  const std::size_t rows = out.rows(), cols = out.cols();
  for (std::size_t c = 0; c < cols; ++c) {
    out.at(0, c) = value;
    out.at(rows - 1, c) = value;
  }
  for (std::size_t r = 0; r < rows; ++r) {
    out.at(r, 0) = value;
    out.at(r, cols - 1) = value;
  }
  auto* tape = common_tape({&x});
  if (!tape) return constant(std::move(out));
  return tape->record(OpKind::reframe, {&x}, std::move(out),
                      [rows, cols](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
                        if (!gi[0]) return;
                        for (std::size_t r = 1; r + 1 < rows; ++r) {
                          for (std::size_t c = 1; c + 1 < cols; ++c) gi[0]->at(r, c) += g.at(r, c);
                        }
                      });
}

template <class T>
Var<T> pool3(const Var<T>& x, PoolKind kind, Window window) {
  require_plane(x, "pool3");
  const auto& in = x.value();
  const std::size_t rows = in.rows(), cols = in.cols();
  Tensor<T> out(in.dims());
  auto* tape = common_tape({&x});

  if (kind == PoolKind::avg) {
    auto filter = window == Window::box ? &kernel::box_avg<T> : &kernel::cross_avg<T>;
    filter(in.data().data(), out.data().data(), rows, cols);
    if (!tape) return constant(std::move(out));
    // The zero-padded averaging operator is symmetric, so its adjoint is itself.
    return tape->record(OpKind::pool_avg, {&x}, std::move(out),
                        [rows, cols, filter](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
                          if (!gi[0]) return;
                          Tensor<T> back(g.dims());
                          filter(g.data().data(), back.data().data(), rows, cols);
                          accumulate(gi[0], back);
                        });
  }

  if (!tape && !branch_recording()) {
    if (window == Window::box) {
      kernel::box_max(in.data().data(), out.data().data(), rows, cols);
    } else {
      cross_max(in.data().data(), out.data().data(), rows, cols);
    }
    return constant(std::move(out));
  }
  std::vector<std::uint32_t> winners;
  max_with_winners(in, window, out, winners);
  for (auto w : winners) note_branch(w);
  if (!tape) return constant(std::move(out));
  return tape->record(OpKind::pool_max, {&x}, std::move(out),
                      [winners = std::move(winners)](const Tensor<T>& g,
                                                     std::span<Tensor<T>* const> gi) {
                        if (!gi[0]) return;
                        for (std::size_t i = 0; i < winners.size(); ++i) {
                          if (winners[i] != kNoWinner) (*gi[0])[winners[i]] += g[i];
                        }
                      });
}

template <class T>
Var<T> rectifier(const Var<T>& x) {
  const auto& in = x.value();
  Tensor<T> out(in.dims());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > T(0) ? in[i] : T(0);
  note_branch_mask(in.data(), [](T v) { return v > T(0); });
  auto* tape = common_tape({&x});
  if (!tape) return constant(std::move(out));
  return tape->record(OpKind::rectifier, {&x}, std::move(out),
                      [xv = x.shared_value()](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
                        if (!gi[0]) return;
                        for (std::size_t i = 0; i < g.size(); ++i) {
                          if ((*xv)[i] > T(0)) (*gi[0])[i] += g[i];
                        }
                      });
}

template <class T>
Var<T> masked_mean(const Var<T>& x, const Tensor<T>& mask) {
  require_same_dims(x.dims(), mask.dims(), "masked_mean");
  const auto& in = x.value();
  T total = T(0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (mask[i] == T(1)) {
      total += in[i];
      ++count;
    } else if (mask[i] != T(0)) {
      throw ContractError("masked_mean: mask value at index " + std::to_string(i) +
                          " is neither 0 nor 1");
    }
  }
  const T mean = count ? total / static_cast<T>(count) : T(0);
  note_branch_mask(mask.data(), [](T v) { return v == T(1); });
  auto* tape = common_tape({&x});
  if (!tape) return constant(Tensor<T>::scalar(mean));
  return tape->record(
      OpKind::masked_mean, {&x}, Tensor<T>::scalar(mean),
      [mask, count](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
        if (!gi[0] || count == 0) return;
        const T share = g[0] / static_cast<T>(count);
        for (std::size_t i = 0; i < mask.size(); ++i) {
          if (mask[i] == T(1)) (*gi[0])[i] += share;
        }
      });
}

template <class T>
Var<T> mul(const Var<T>& a, const Var<T>& b) {
  require_same_dims(a.dims(), b.dims(), "mul");
  const auto& av = a.value();
  const auto& bv = b.value();
  Tensor<T> out(av.dims());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] * bv[i];
  auto* tape = common_tape({&a, &b});
  if (!tape) return constant(std::move(out));
  return tape->record(OpKind::mul, {&a, &b}, std::move(out),
                      [ap = a.shared_value(), bp = b.shared_value()](
                          const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
                        for (std::size_t i = 0; i < g.size(); ++i) {
                          if (gi[0]) (*gi[0])[i] += g[i] * (*bp)[i];
                          if (gi[1]) (*gi[1])[i] += g[i] * (*ap)[i];
                        }
                      });
}

template <class T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  require_same_dims(a.dims(), b.dims(), "add");
  const auto& av = a.value();
  const auto& bv = b.value();
  Tensor<T> out(av.dims());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] + bv[i];
  auto* tape = common_tape({&a, &b});
  if (!tape) return constant(std::move(out));
  return tape->record(OpKind::add, {&a, &b}, std::move(out),
                      [](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
                        accumulate(gi[0], g);
                        accumulate(gi[1], g);
                      });
}

template <class T>
Var<T> sub(const Var<T>& a, const Var<T>& b) {
  require_same_dims(a.dims(), b.dims(), "sub");
  const auto& av = a.value();
  const auto& bv = b.value();
  Tensor<T> out(av.dims());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] - bv[i];
  auto* tape = common_tape({&a, &b});
  if (!tape) return constant(std::move(out));
  return tape->record(OpKind::sub, {&a, &b}, std::move(out),
                      [](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
                        accumulate(gi[0], g);
                        if (gi[1]) {
                          for (std::size_t i = 0; i < g.size(); ++i) (*gi[1])[i] -= g[i];
                        }
                      });
}

template <class T>
Var<T> sub_scalar(const Var<T>& x, const Var<T>& s) {
  require_scalar(s, "sub_scalar");
  const auto& xv = x.value();
  const T sv = s.value()[0];
  Tensor<T> out(xv.dims());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] - sv;
  auto* tape = common_tape({&x, &s});
  if (!tape) return constant(std::move(out));
  return tape->record(OpKind::sub_scalar, {&x, &s}, std::move(out),
                      [](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
                        accumulate(gi[0], g);
                        if (gi[1]) {
                          T total = T(0);
                          for (std::size_t i = 0; i < g.size(); ++i) total += g[i];
                          (*gi[1])[0] -= total;
                        }
                      });
}

template <class T>
Var<T> scale(const Var<T>& x, T factor) {
  const auto& xv = x.value();
  Tensor<T> out(xv.dims());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] * factor;
  auto* tape = common_tape({&x});
  if (!tape) return constant(std::move(out));
  return tape->record(OpKind::scale, {&x}, std::move(out),
                      [factor](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
                        if (!gi[0]) return;
                        for (std::size_t i = 0; i < g.size(); ++i) (*gi[0])[i] += g[i] * factor;
                      });
}

template <class T>
Var<T> guarded_max_normalize(const Var<T>& x, T epsilon) {
  if (!(epsilon > T(0))) throw ConfigError("guarded_max_normalize: epsilon must be > 0");
  const auto& xv = x.value();
  T peak = T(0);
  for (std::size_t i = 0; i < xv.size(); ++i) {
    if (xv[i] < T(0)) {
      throw ContractError("guarded_max_normalize: negative entry at index " + std::to_string(i));
    }
    peak = std::max(peak, xv[i]);
  }
  const T denom = std::max(peak, epsilon);
  if (branch_recording()) {
    std::size_t arg = 0;
    while (arg < xv.size() && xv[arg] != peak) ++arg;
    note_branch(peak < epsilon ? ~0ull : arg);
  }
  Tensor<T> out(xv.dims());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] / denom;
  auto* tape = common_tape({&x});
  if (!tape) return constant(std::move(out));
  return tape->record(OpKind::guarded_max_normalize, {&x}, std::move(out),
                      [denom](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
                        if (!gi[0]) return;
                        for (std::size_t i = 0; i < g.size(); ++i) (*gi[0])[i] += g[i] / denom;
                      });
}

template <class T>
Var<T> l1(const Var<T>& x) {
  const auto& xv = x.value();
  T total = T(0);
  for (std::size_t i = 0; i < xv.size(); ++i) total += std::abs(xv[i]);
  note_branch_mask(xv.data(), [](T v) { return v > T(0); });
  note_branch_mask(xv.data(), [](T v) { return v < T(0); });
  auto* tape = common_tape({&x});
  if (!tape) return constant(Tensor<T>::scalar(total));
  return tape->record(OpKind::l1, {&x}, Tensor<T>::scalar(total),
                      [xp = x.shared_value()](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
                        if (!gi[0]) return;
                        for (std::size_t i = 0; i < xp->size(); ++i) {
                          const T v = (*xp)[i];
                          if (v > T(0)) (*gi[0])[i] += g[0];
                          else if (v < T(0)) (*gi[0])[i] -= g[0];
                        }
                      });
}

template <class T>
Var<T> sum(const Var<T>& x) {
  const auto& xv = x.value();
  T total = T(0);
  for (std::size_t i = 0; i < xv.size(); ++i) total += xv[i];
  auto* tape = common_tape({&x});
  if (!tape) return constant(Tensor<T>::scalar(total));
  return tape->record(OpKind::sum, {&x}, Tensor<T>::scalar(total),
                      [](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
                        if (!gi[0]) return;
                        for (auto& v : gi[0]->data()) v += g[0];
                      });
}

template <class T>
Var<T> abs(const Var<T>& x) {
  const auto& xv = x.value();
  Tensor<T> out(xv.dims());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = std::abs(xv[i]);
  note_branch_mask(xv.data(), [](T v) { return v > T(0); });
  note_branch_mask(xv.data(), [](T v) { return v < T(0); });
  auto* tape = common_tape({&x});
  if (!tape) return constant(std::move(out));
  return tape->record(OpKind::abs, {&x}, std::move(out),
                      [xp = x.shared_value()](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
                        if (!gi[0]) return;
                        for (std::size_t i = 0; i < g.size(); ++i) {
                          const T v = (*xp)[i];
                          if (v > T(0)) (*gi[0])[i] += g[i];
                          else if (v < T(0)) (*gi[0])[i] -= g[i];
                        }
                      });
}

template <class T>
Var<T> softmax_channels(const Var<T>& x) {
  require_rank(x.dims(), 3, "softmax_channels");
  const auto& xv = x.value();
  const std::size_t channels = xv.dim(0), plane = xv.dim(1) * xv.dim(2);
  Tensor<T> out(xv.dims());
  // The denominator is summed in ascending order, independent of class order.
  std::vector<T> terms(channels);
  for (std::size_t p = 0; p < plane; ++p) {
    T peak = xv[p];
    for (std::size_t c = 1; c < channels; ++c) peak = std::max(peak, xv[c * plane + p]);
    for (std::size_t c = 0; c < channels; ++c) {
      const T e = std::exp(xv[c * plane + p] - peak);
      out[c * plane + p] = e;
      terms[c] = e;
    }
    std::sort(terms.begin(), terms.end());
    T total = T(0);
    for (const T e : terms) total += e;
    for (std::size_t c = 0; c < channels; ++c) out[c * plane + p] /= total;
  }
  auto* tape = common_tape({&x});
  if (!tape) return constant(std::move(out));
  auto probs = std::make_shared<const Tensor<T>>(out);
  return tape->record(OpKind::softmax_channels, {&x}, std::move(out),
                      [probs, channels, plane](const Tensor<T>& g,
                                               std::span<Tensor<T>* const> gi) {
                        if (!gi[0]) return;
                        for (std::size_t p = 0; p < plane; ++p) {
                          T dot = T(0);
                          for (std::size_t c = 0; c < channels; ++c) {
                            dot += (*probs)[c * plane + p] * g[c * plane + p];
                          }
                          for (std::size_t c = 0; c < channels; ++c) {
                            const std::size_t i = c * plane + p;
                            (*gi[0])[i] += (*probs)[i] * (g[i] - dot);
                          }
                        }
                      });
}

template <class T>
Var<T> select_channels(const Var<T>& x, const std::vector<std::int32_t>& index) {
  require_rank(x.dims(), 3, "select_channels");
  const auto& xv = x.value();
  const std::size_t channels = xv.dim(0), rows = xv.dim(1), cols = xv.dim(2);
  const std::size_t plane = rows * cols;
  if (index.size() != plane) {
    throw DimensionError("select_channels: index length " + std::to_string(index.size()) +
                         " vs plane " + std::to_string(plane));
  }
  Tensor<T> out(Dims{rows, cols});
  for (std::size_t p = 0; p < plane; ++p) {
    const auto k = index[p];
    if (k < 0) continue;
    if (static_cast<std::size_t>(k) >= channels) {
      throw DimensionError("select_channels: channel " + std::to_string(k) + " out of range");
    }
    out[p] = xv[static_cast<std::size_t>(k) * plane + p];
  }
  if (branch_recording()) {
    for (auto k : index) note_branch(static_cast<std::uint64_t>(static_cast<std::int64_t>(k)));
  }
  auto* tape = common_tape({&x});
  if (!tape) return constant(std::move(out));
  return tape->record(OpKind::select_channels, {&x}, std::move(out),
                      [index, plane](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
                        if (!gi[0]) return;
                        for (std::size_t p = 0; p < plane; ++p) {
                          if (index[p] >= 0) {
                            (*gi[0])[static_cast<std::size_t>(index[p]) * plane + p] += g[p];
                          }
                        }
                      });
}

#define PHYFEA_INSTANTIATE_OPS(T)                                                \
  template Var<T> pad_frame(const Var<T>&, T);                                   \
  template Var<T> crop_interior(const Var<T>&);                                  \
  template Var<T> reframe(const Var<T>&, T);                                     \
  template Var<T> pool3(const Var<T>&, PoolKind, Window);                        \
  template Var<T> rectifier(const Var<T>&);                                      \
  template Var<T> masked_mean(const Var<T>&, const Tensor<T>&);                  \
  template Var<T> mul(const Var<T>&, const Var<T>&);                             \
  template Var<T> add(const Var<T>&, const Var<T>&);                             \
  template Var<T> sub(const Var<T>&, const Var<T>&);                             \
  template Var<T> sub_scalar(const Var<T>&, const Var<T>&);                      \
  template Var<T> scale(const Var<T>&, T);                                       \
  template Var<T> guarded_max_normalize(const Var<T>&, T);                       \
  template Var<T> l1(const Var<T>&);                                             \
  template Var<T> sum(const Var<T>&);                                            \
  template Var<T> abs(const Var<T>&);                                            \
  template Var<T> softmax_channels(const Var<T>&);                               \
  template Var<T> select_channels(const Var<T>&, const std::vector<std::int32_t>&);

PHYFEA_INSTANTIATE_OPS(float)
PHYFEA_INSTANTIATE_OPS(double)

#undef PHYFEA_INSTANTIATE_OPS

}  // namespace phyfea
