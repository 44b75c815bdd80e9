// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <json.hpp>

#include "phyfea/analyzer.hpp"
#include "phyfea/config.hpp"
#include "phyfea/gradcheck.hpp"
#include "phyfea/loss.hpp"

namespace phyfea {

using Json = nlohmann::ordered_json;

// Nine significant digits with a minimal exponent, e.g. 1.50000000e-5.
std::string format_real(double v);

// Serializes with keys in insertion order and every float through format_real.
std::string dump_json(const Json& j, int indent = 2);

Json pair_json(ClassPair p);

template <class T>
Json to_json(const PenaltyReport<T>& r);

Json to_json(const AnomalyReport& r);
Json to_json(const ConstraintCatalog& c);
Json to_json(const EmpiricalStats& s);
Json to_json(const GradCheckReport& r);
Json to_json(const EngineConfig& c);

ConstraintCatalog catalog_from_json(const Json& j);
ConstraintCatalog read_catalog(const std::string& path);

// Applies the keys present in j on top of `base`; unknown keys are rejected.
EngineConfig config_from_json(const Json& j, EngineConfig base = {});
EngineConfig read_config(const std::string& path, EngineConfig base = {});

Json read_json(const std::string& path);
void write_json(const std::string& path, const Json& j);

}  // namespace phyfea
