// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phyfea/analyzer.hpp"
#include "phyfea/tensor.hpp"

namespace phyfea {

/// Reads an 8-bit single-channel id map: binary PGM (P5) or grayscale PNG.
/// Colour, palette, alpha and 16-bit images are rejected. When num_classes is
/// nonzero every non-ignore label must lie below it.
LabelMap read_label_map(const std::string& path, std::size_t num_classes = 0,
                        std::int32_t ignore_value = 255);

// Writes P5 PGM, or PNG when the path ends in ".png".
void write_label_map(const std::string& path, const LabelMap& map);

// SFT1 score tensors: "SFT1", u32 rank, u32 dims[rank], f32 payload, all little-endian.
Tensor<float> read_tensor(const std::string& path);
void write_tensor(const std::string& path, const Tensor<float>& t);

// Byte-level forms of the above, for in-memory round trips.
Tensor<float> decode_tensor(std::string_view bytes);
std::string encode_tensor(const Tensor<float>& t);

enum class FixtureKind { enclosure, broken_bar, clean, ring, random_binary };

std::string_view fixture_name(FixtureKind k);
FixtureKind parse_fixture(std::string_view s);

struct FixtureSpec {
  FixtureKind kind = FixtureKind::enclosure;
  std::size_t rows = 7;
  std::size_t cols = 7;
  std::size_t num_classes = 3;
  std::int32_t background = 0;
  std::int32_t inner = 1;  // planted class: enclosed block, bars, ring hole filler
  std::int32_t outer = 2;  // surrounding class
  std::size_t gap = 1;
  std::size_t bar_length = 2;
  bool at_border = false;  // enclosure: shift the block onto the top edge
  double density = 0.5;    // random_binary
  std::uint64_t seed = 0;
  bool with_scores = false;
  double p_fg = 0.9;       // planted class
  double p_context = 0.7;  // every other labelled pixel, for its own label
};

struct Fixture {
  LabelMap labels;
  std::optional<Tensor<float>> scores;  // (C,H,W) log-probabilities
};

/// Deterministic synthetic maps.
///  enclosure:     3x3 block of `inner` ringed by `outer` on `background`.
///  broken_bar:    two collinear horizontal bars of `inner`, `gap` cells apart.
///  clean:         `background` top half, `outer` bottom half.
///  ring:          an annulus of `outer` around a hole of `background`.
///  random_binary: `inner` with probability `density` on `background`.
/// Scores put p_fg on the planted class at its pixels, p_context on the label
/// elsewhere, and spread the rest evenly over the other classes.
Fixture gen_fixture(const FixtureSpec& spec);

// Scores for an arbitrary label map under the same probability rule, with
// `planted` receiving p_fg.
Tensor<float> scores_for_labels(const LabelMap& map, std::int32_t planted, double p_fg,
                                double p_context);

/// RGB rendering: labels as gray levels, pixels with mask != 0 in opaque red.
/// PNG when the path ends in ".png", binary PPM otherwise.
void write_overlay(const std::string& path, const LabelMap& map,
                   const std::vector<std::uint8_t>& mask);

// All regular files in a directory with a .pgm or .png extension, sorted by name.
std::vector<std::string> list_label_files(const std::string& dir);

}  // namespace phyfea
