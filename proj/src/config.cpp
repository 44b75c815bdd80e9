// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "phyfea/config.hpp"

#include <cmath>

#include "phyfea/error.hpp"

namespace phyfea {

std::string_view precision_name(Precision p) {
  return p == Precision::single ? "single" : "double";
}

Precision parse_precision(std::string_view s) {
  if (s == "single" || s == "float") return Precision::single;
  if (s == "double") return Precision::double_;
  throw ConfigError("precision must be 'single' or 'double', got '" + std::string(s) + "'");
}

std::string_view pair_mode_name(PairMode m) {
  return m == PairMode::all ? "all" : "infeasible_only";
}

PairMode parse_pair_mode(std::string_view s) {
  if (s == "all") return PairMode::all;
  if (s == "infeasible_only") return PairMode::infeasible_only;
  throw ConfigError("pair_mode must be 'all' or 'infeasible_only', got '" + std::string(s) + "'");
}

void set_losses(EngineConfig& cfg, std::string_view spec) {
  if (spec == "both" || spec == "opening,dilation" || spec == "dilation,opening") {
    cfg.use_opening = cfg.use_dilation = true;
  } else if (spec == "opening") {
    cfg.use_opening = true;
    cfg.use_dilation = false;
  } else if (spec == "dilation") {
    cfg.use_opening = false;
    cfg.use_dilation = true;
  } else if (spec == "none") {
    cfg.use_opening = cfg.use_dilation = false;
  } else {
    throw ConfigError("losses must be opening, dilation, both or none; got '" + std::string(spec) +
                      "'");
  }
}

std::string losses_name(const EngineConfig& cfg) {
  if (cfg.use_opening && cfg.use_dilation) return "both";
  if (cfg.use_opening) return "opening";
  if (cfg.use_dilation) return "dilation";
  return "none";
}

void EngineConfig::validate(bool require_losses) const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be > 0");
  if (!(bg_tol >= 0.0) || !std::isfinite(bg_tol)) throw ConfigError("bg_tol must be >= 0");
  if (iterations && *iterations == 0) throw ConfigError("iterations must be at least 1");
  if (connectivity != 4 && connectivity != 8) {
    throw ConfigError("connectivity must be 4 or 8, got " + std::to_string(connectivity));
  }
  if (workers && *workers == 0) throw ConfigError("workers must be at least 1");
  if (ignore_value < 0 || ignore_value > 255) throw ConfigError("ignore_value must be in [0, 255]");
  if (require_losses && !use_opening && !use_dilation) {
    throw ConfigError("no loss enabled; losses = none is only valid for analysis commands");
  }
}

}  // namespace phyfea
