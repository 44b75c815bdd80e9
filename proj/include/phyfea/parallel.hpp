// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <optional>

namespace phyfea {

// Worker count: explicit request, else PHYFEA_THREADS, else hardware concurrency.
// Always at least 1.
std::size_t resolve_workers(std::optional<std::size_t> requested = std::nullopt);

/// Runs body(i) for i in [0, count) on up to `workers` threads, handing out
/// indices dynamically. Callers write results into per-index slots and fold them
/// afterwards, so the outcome never depends on scheduling. The first exception
/// thrown by any body is rethrown after all threads have joined.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace phyfea
