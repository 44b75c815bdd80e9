// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#ifndef PHYFEA_VERSION
#define PHYFEA_VERSION "0.0.0"
#endif

namespace phyfea {

// Shared by `phyfea --version` and the Python module.
inline std::string version_info() { return std::string("phyfea-engine ") + PHYFEA_VERSION + " double"; }

}  // namespace phyfea
